//! Path decomposition of flow witnesses.
//!
//! Turns a conservation-respecting arc flow into an explicit list of
//! source→sink paths (plus nothing else: zero-flow cycles are cancelled, not
//! reported). Deterministic: peeling always starts at the lowest-index node
//! with remaining outflow surplus and walks the lowest-index usable arc.

use num::{BigInt, Signed, Zero};

use super::{FlowNetwork, IntegralFlow};
use crate::rational::Rational;

/// One peeled path: arc indices in walk order and the amount it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPath {
    pub arcs: Vec<usize>,
    pub amount: Rational,
}

impl FlowPath {
    /// Node sequence visited by the path, source first.
    pub fn nodes(&self, net: &FlowNetwork) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        if let Some(&first) = self.arcs.first() {
            out.push(net.arcs()[first].from);
        }
        for &a in &self.arcs {
            out.push(net.arcs()[a].to);
        }
        out
    }
}

/// Decompose a fractional flow into paths.
///
/// `flows[a]` is the amount on arc `a`; every node's surplus (outflow minus
/// inflow) must match some source/sink pattern — sources are nodes with
/// positive surplus, sinks those with negative. Panics in debug builds if a
/// walk gets stuck, which would mean the input violates conservation.
pub fn decompose_fractional_paths(net: &FlowNetwork, flows: &[Rational]) -> Vec<FlowPath> {
    assert_eq!(flows.len(), net.arcs().len(), "flow vector length mismatch");
    let mut residual: Vec<Rational> = flows.to_vec();
    let n = net.node_count();
    let mut surplus = vec![Rational::zero(); n];
    for (a, arc) in net.arcs().iter().enumerate() {
        if residual[a].is_positive() {
            surplus[arc.from] += &residual[a];
            surplus[arc.to] -= &residual[a];
        } else {
            residual[a] = Rational::zero();
        }
    }
    // Outgoing arc indices per node, ascending, fixed once.
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, arc) in net.arcs().iter().enumerate() {
        outgoing[arc.from].push(a);
    }

    let mut paths = Vec::new();
    while let Some(start) = (0..n).find(|&v| surplus[v].is_positive()) {
        // Walk forward on positive-flow arcs. A revisited node closes a
        // cycle: cancel it and restart the walk from `start`.
        'walk: loop {
            let mut at = start;
            let mut trail: Vec<usize> = Vec::new();
            let mut seen_at = vec![usize::MAX; n];
            seen_at[at] = 0;
            loop {
                if surplus[at].is_negative() && !trail.is_empty() {
                    let mut amount = surplus[start].clone().min(-surplus[at].clone());
                    for &a in &trail {
                        amount = amount.min(residual[a].clone());
                    }
                    debug_assert!(amount.is_positive());
                    for &a in &trail {
                        residual[a] -= &amount;
                    }
                    surplus[start] -= &amount;
                    surplus[at] += &amount;
                    paths.push(FlowPath { arcs: trail, amount });
                    break 'walk;
                }
                let next = outgoing[at]
                    .iter()
                    .copied()
                    .find(|&a| residual[a].is_positive())
                    .unwrap_or_else(|| panic!("flow not conserved: walk stuck at node {at}"));
                let to = net.arcs()[next].to;
                if seen_at[to] != usize::MAX {
                    // Cancel the cycle trail[seen_at[to]..] + next.
                    let cycle_start = seen_at[to];
                    let mut amount = residual[next].clone();
                    for &a in &trail[cycle_start..] {
                        amount = amount.min(residual[a].clone());
                    }
                    for &a in &trail[cycle_start..] {
                        residual[a] -= &amount;
                    }
                    residual[next] -= &amount;
                    continue 'walk;
                }
                trail.push(next);
                seen_at[to] = trail.len();
                at = to;
            }
        }
    }
    // Anything left is a union of cycles; cancel silently.
    paths
}

/// Decompose an integral flow; amounts come back as integer-valued rationals.
pub fn decompose_integral_paths(net: &FlowNetwork, flow: &IntegralFlow) -> Vec<FlowPath> {
    let rational: Vec<Rational> = flow
        .flows
        .iter()
        .map(|f: &BigInt| Rational::from_integer(f.clone()))
        .collect();
    decompose_fractional_paths(net, &rational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn net_with(arcs: &[(usize, usize)], nodes: usize) -> FlowNetwork {
        let mut net = FlowNetwork::new(nodes);
        for &(u, v) in arcs {
            net.add_arc(u, v, rat(100), Rational::zero());
        }
        net
    }

    #[test]
    fn single_path_recovered() {
        let net = net_with(&[(0, 1), (1, 2)], 3);
        let paths = decompose_fractional_paths(&net, &[rat(2), rat(2)]);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].arcs, vec![0, 1]);
        assert_eq!(paths[0].amount, rat(2));
        assert_eq!(paths[0].nodes(&net), vec![0, 1, 2]);
    }

    #[test]
    fn split_flow_yields_two_paths() {
        // 0→1→3 carries 1/2, 0→2→3 carries 3/2.
        let net = net_with(&[(0, 1), (0, 2), (1, 3), (2, 3)], 4);
        let flows = vec![ratio(1, 2), ratio(3, 2), ratio(1, 2), ratio(3, 2)];
        let paths = decompose_fractional_paths(&net, &flows);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].arcs, vec![0, 2]);
        assert_eq!(paths[0].amount, ratio(1, 2));
        assert_eq!(paths[1].arcs, vec![1, 3]);
        assert_eq!(paths[1].amount, ratio(3, 2));
    }

    #[test]
    fn cycle_is_cancelled_not_reported() {
        // Path 0→1→2 plus a parasitic cycle 1→3→1.
        let net = net_with(&[(0, 1), (1, 2), (1, 3), (3, 1)], 4);
        let flows = vec![rat(1), rat(1), rat(5), rat(5)];
        let paths = decompose_fractional_paths(&net, &flows);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].arcs, vec![0, 1]);
        assert_eq!(paths[0].amount, rat(1));
    }

    #[test]
    fn pure_circulation_yields_nothing() {
        let net = net_with(&[(0, 1), (1, 0)], 2);
        let paths = decompose_fractional_paths(&net, &[rat(3), rat(3)]);
        assert!(paths.is_empty());
    }

    #[test]
    fn multi_source_multi_sink() {
        // Sources 0 (1 unit) and 1 (1 unit) both feed 2, which fans to 3.
        let net = net_with(&[(0, 2), (1, 2), (2, 3)], 4);
        let paths = decompose_fractional_paths(&net, &[rat(1), rat(1), rat(2)]);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].nodes(&net), vec![0, 2, 3]);
        assert_eq!(paths[1].nodes(&net), vec![1, 2, 3]);
    }
}
