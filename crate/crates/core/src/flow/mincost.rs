//! Integral min-cost flow by successive shortest augmenting paths.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num::bigint::BigInt;
use num::{Signed, Zero};

use super::{FlowError, FlowNetwork, IntegralFlow};
use crate::rational::Rational;

struct Edge {
    to: usize,
    residual: BigInt,
    cost: Rational,
}

struct Residual {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual { adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    fn add(&mut self, from: usize, to: usize, capacity: BigInt, cost: Rational) -> usize {
        let id = self.edges.len();
        self.adj[from].push(id);
        self.edges.push(Edge { to, residual: capacity, cost: cost.clone() });
        self.adj[to].push(id + 1);
        self.edges.push(Edge { to: from, residual: BigInt::zero(), cost: -cost });
        id
    }
}

/// Shortest distances from `source` by a label-correcting (SPFA) pass over
/// residual arcs. Detects negative cycles reachable from `source`.
fn label_correcting(res: &Residual, source: usize) -> Result<Vec<Option<Rational>>, FlowError> {
    let n = res.adj.len();
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut in_queue = vec![false; n];
    let mut relaxations = vec![0usize; n];
    let mut queue = std::collections::VecDeque::new();
    dist[source] = Some(Rational::zero());
    queue.push_back(source);
    in_queue[source] = true;
    while let Some(u) = queue.pop_front() {
        in_queue[u] = false;
        let du = dist[u].clone().expect("queued node has a distance");
        for &eid in &res.adj[u] {
            let e = &res.edges[eid];
            if e.residual.is_zero() {
                continue;
            }
            let cand = du.clone() + &e.cost;
            if dist[e.to].as_ref().map_or(true, |dv| &cand < dv) {
                dist[e.to] = Some(cand);
                if !in_queue[e.to] {
                    relaxations[e.to] += 1;
                    if relaxations[e.to] > n {
                        return Err(FlowError::NegativeCycle);
                    }
                    queue.push_back(e.to);
                    in_queue[e.to] = true;
                }
            }
        }
    }
    Ok(dist)
}

/// Minimum-cost integral flow meeting all declared supplies and demands.
///
/// Requires integer capacities and supplies (balanced). Negative arc costs
/// are supported; a negative-cost cycle reachable from a supply node is
/// reported as an error. Ties between equal-cost routes are broken by arc
/// insertion order, so witnesses are deterministic.
pub fn min_cost_flow(net: &FlowNetwork) -> Result<IntegralFlow, FlowError> {
    let n = net.node_count();
    for (i, arc) in net.arcs().iter().enumerate() {
        if !arc.capacity.is_integer() {
            return Err(FlowError::NonIntegerCapacity(i));
        }
    }
    let mut total_supply = Rational::zero();
    for (v, s) in net.supplies().iter().enumerate() {
        if !s.is_integer() {
            return Err(FlowError::NonIntegerSupply(v));
        }
        total_supply += s;
    }
    if !total_supply.is_zero() {
        return Err(FlowError::Unbalanced(total_supply.to_string()));
    }

    let source = n;
    let sink = n + 1;
    let mut res = Residual::new(n + 2);
    let mut arc_edge = Vec::with_capacity(net.arcs().len());
    for arc in net.arcs() {
        arc_edge.push(res.add(arc.from, arc.to, arc.capacity.to_integer(), arc.cost.clone()));
    }
    let mut required = BigInt::zero();
    for (v, s) in net.supplies().iter().enumerate() {
        if s.is_positive() {
            required += s.to_integer();
            res.add(source, v, s.to_integer(), Rational::zero());
        } else if s.is_negative() {
            res.add(v, sink, (-s).to_integer(), Rational::zero());
        }
    }

    // Node potentials: seeded by a label-correcting pass (handles negative
    // costs), then maintained by Dijkstra distances after each augmentation.
    let mut potential = label_correcting(&res, source)?;

    let mut pushed = BigInt::zero();
    while pushed < required {
        // Dijkstra over reduced costs, deterministic tie-break by node index.
        let nn = res.adj.len();
        let mut dist: Vec<Option<Rational>> = vec![None; nn];
        let mut parent: Vec<Option<usize>> = vec![None; nn];
        let mut done = vec![false; nn];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(Rational::zero());
        heap.push(Reverse((Rational::zero(), source)));
        while let Some(Reverse((du, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            let pu = potential[u].clone().expect("visited node has a potential");
            for &eid in &res.adj[u] {
                let e = &res.edges[eid];
                if e.residual.is_zero() {
                    continue;
                }
                let Some(pv) = potential[e.to].clone() else { continue };
                if done[e.to] {
                    continue;
                }
                let reduced = e.cost.clone() + &pu - &pv;
                debug_assert!(reduced >= Rational::zero(), "negative reduced cost");
                let cand = du.clone() + reduced;
                if dist[e.to].as_ref().map_or(true, |dv| &cand < dv) {
                    dist[e.to] = Some(cand.clone());
                    parent[e.to] = Some(eid);
                    heap.push(Reverse((cand, e.to)));
                }
            }
        }
        if dist[sink].is_none() {
            return Err(FlowError::Infeasible);
        }
        for v in 0..nn {
            if let (Some(d), Some(p)) = (&dist[v], &mut potential[v]) {
                *p += d;
            }
        }
        // Bottleneck along the augmenting path, capped by what is still owed.
        let mut bottleneck = required.clone() - &pushed;
        let mut v = sink;
        while let Some(eid) = parent[v] {
            bottleneck = bottleneck.min(res.edges[eid].residual.clone());
            v = res.edges[eid ^ 1].to;
        }
        let mut v = sink;
        while let Some(eid) = parent[v] {
            res.edges[eid].residual -= &bottleneck;
            res.edges[eid ^ 1].residual += &bottleneck;
            v = res.edges[eid ^ 1].to;
        }
        pushed += bottleneck;
    }

    let mut flows = Vec::with_capacity(net.arcs().len());
    let mut total_cost = Rational::zero();
    for (arc, &eid) in net.arcs().iter().zip(&arc_edge) {
        let flow = arc.capacity.to_integer() - &res.edges[eid].residual;
        total_cost += arc.cost.clone() * Rational::from_integer(flow.clone());
        flows.push(flow);
    }
    Ok(IntegralFlow { flows, total_cost })
}
