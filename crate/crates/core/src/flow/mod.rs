//! Exact network-flow algorithms.
//!
//! [`min_cost_flow`] is an integral successive-shortest-path solver with node
//! potentials (negative arc costs allowed, negative cycles rejected).
//! [`max_flow`] is an exact-rational Edmonds–Karp. [`fractional_feasibility`]
//! answers the splittable-flow question "can these demands be routed, and if
//! not, what is the minimum total capacity slack Σρ that would make them
//! routable?" — exactly, with no floating point anywhere near the slack-zero
//! decision boundary.

mod decompose;
mod feasible;
mod maxflow;
mod mincost;

pub use decompose::{decompose_fractional_paths, decompose_integral_paths};
pub use feasible::{fractional_feasibility, Commodity, FeasibilityOutcome};
pub use maxflow::max_flow;
pub use mincost::min_cost_flow;

use num::bigint::BigInt;
use num::Zero;
use thiserror::Error;

use crate::rational::Rational;

/// One directed arc of a flow network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: Rational,
    pub cost: Rational,
}

/// A capacitated digraph over dense node indices with per-node supplies
/// (positive = supply, negative = demand). Parallel arcs are allowed here —
/// solvers use them for overflow and bypass constructions.
#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    node_count: usize,
    arcs: Vec<FlowArc>,
    supplies: Vec<Rational>,
}

impl FlowNetwork {
    pub fn new(node_count: usize) -> Self {
        FlowNetwork { node_count, arcs: Vec::new(), supplies: vec![Rational::zero(); node_count] }
    }

    pub fn add_node(&mut self) -> usize {
        self.node_count += 1;
        self.supplies.push(Rational::zero());
        self.node_count - 1
    }

    /// Add an arc; returns its index. Capacities must be non-negative.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: Rational, cost: Rational) -> usize {
        assert!(from < self.node_count && to < self.node_count, "arc endpoint out of bounds");
        assert!(capacity >= Rational::zero(), "negative arc capacity");
        self.arcs.push(FlowArc { from, to, capacity, cost });
        self.arcs.len() - 1
    }

    pub fn set_supply(&mut self, node: usize, supply: Rational) {
        assert!(node < self.node_count, "supply node out of bounds");
        self.supplies[node] = supply;
    }

    pub fn add_supply(&mut self, node: usize, delta: &Rational) {
        assert!(node < self.node_count, "supply node out of bounds");
        self.supplies[node] += delta;
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    pub fn supplies(&self) -> &[Rational] {
        &self.supplies
    }
}

/// An integral flow: one non-negative integer per arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralFlow {
    pub flows: Vec<BigInt>,
    pub total_cost: Rational,
}

impl IntegralFlow {
    /// Arc flows as rationals, for conservation checking and decomposition.
    pub fn rational_flows(&self) -> Vec<Rational> {
        self.flows.iter().map(|f| Rational::from_integer(f.clone())).collect()
    }
}

/// A fractional (possibly multicommodity) flow with per-arc slack ρ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalFlow {
    /// `flows[c][a]` = commodity `c`'s flow on arc `a`.
    pub flows: Vec<Vec<Rational>>,
    /// `slack[a]` = ρ_a, extra capacity needed on arc `a` (0 when feasible).
    pub slack: Vec<Rational>,
}

impl FractionalFlow {
    /// Total flow on one arc across commodities.
    pub fn total_on(&self, arc: usize) -> Rational {
        self.flows.iter().map(|f| f[arc].clone()).fold(Rational::zero(), |a, b| a + b)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("supplies do not balance (sum {0})")]
    Unbalanced(String),
    #[error("arc {0} has a non-integer capacity")]
    NonIntegerCapacity(usize),
    #[error("node {0} has a non-integer supply")]
    NonIntegerSupply(usize),
    #[error("negative-cost cycle reachable from a supply node")]
    NegativeCycle,
    #[error("demand cannot be met")]
    Infeasible,
    #[error("commodity {0} has unequal supply and demand")]
    UnbalancedCommodity(usize),
}

/// Check capacity bounds and conservation of `flow` against `net`'s declared
/// supplies: at every node, outflow − inflow must equal the supply.
pub fn check_flow_conservation(net: &FlowNetwork, flow: &[Rational]) -> bool {
    if flow.len() != net.arcs().len() {
        return false;
    }
    for (arc, f) in net.arcs().iter().zip(flow) {
        if f < &Rational::zero() || f > &arc.capacity {
            return false;
        }
    }
    let mut balance: Vec<Rational> = net.supplies().to_vec();
    for (arc, f) in net.arcs().iter().zip(flow) {
        balance[arc.from] -= f;
        balance[arc.to] += f;
    }
    balance.iter().all(|b| b.is_zero())
}
