//! Exact-rational maximum flow (Edmonds–Karp).

use std::collections::VecDeque;

use num::Zero;

use super::FlowNetwork;
use crate::rational::Rational;

/// Maximum `source → sink` flow value and a witness flow per arc.
///
/// Breadth-first augmenting paths bound the number of augmentations
/// combinatorially (O(V·E)), so exact rational capacities terminate.
pub fn max_flow(net: &FlowNetwork, source: usize, sink: usize) -> (Rational, Vec<Rational>) {
    assert!(source < net.node_count() && sink < net.node_count(), "terminal out of bounds");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); net.node_count()];
    // edges: (to, residual); arc i maps to edges 2i (forward) and 2i+1 (back).
    let mut edges: Vec<(usize, Rational)> = Vec::with_capacity(net.arcs().len() * 2);
    for arc in net.arcs() {
        adj[arc.from].push(edges.len());
        edges.push((arc.to, arc.capacity.clone()));
        adj[arc.to].push(edges.len());
        edges.push((arc.from, Rational::zero()));
    }
    let mut value = Rational::zero();
    if source == sink {
        return (value, vec![Rational::zero(); net.arcs().len()]);
    }
    loop {
        let mut parent: Vec<Option<usize>> = vec![None; net.node_count()];
        let mut seen = vec![false; net.node_count()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        'bfs: while let Some(u) = queue.pop_front() {
            for &eid in &adj[u] {
                let (to, ref residual) = edges[eid];
                if !seen[to] && !residual.is_zero() {
                    seen[to] = true;
                    parent[to] = Some(eid);
                    if to == sink {
                        break 'bfs;
                    }
                    queue.push_back(to);
                }
            }
        }
        if !seen[sink] {
            break;
        }
        let mut bottleneck: Option<Rational> = None;
        let mut v = sink;
        while let Some(eid) = parent[v] {
            let r = edges[eid].1.clone();
            bottleneck = Some(match bottleneck {
                None => r,
                Some(b) => b.min(r),
            });
            v = edges[eid ^ 1].0;
        }
        let delta = bottleneck.expect("augmenting path is non-empty");
        let mut v = sink;
        while let Some(eid) = parent[v] {
            edges[eid].1 -= &delta;
            edges[eid ^ 1].1 += &delta;
            v = edges[eid ^ 1].0;
        }
        value += delta;
    }
    let flows = net
        .arcs()
        .iter()
        .enumerate()
        .map(|(i, arc)| arc.capacity.clone() - &edges[2 * i].1)
        .collect();
    (value, flows)
}
