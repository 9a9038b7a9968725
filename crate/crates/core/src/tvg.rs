//! Time-varying graphs: snapshot-indexed satellite topologies.
//!
//! A constellation over a horizon of `K` snapshots is modeled as one digraph
//! per snapshot plus derived "cache" arcs that carry stored data from a
//! satellite's node in snapshot `k` to its node in snapshot `k+1`. Within a
//! snapshot the subgraph is an ordinary capacitated flow network (multi-hop
//! forwarding inside one snapshot is allowed); across snapshots only the cache
//! arcs move data, so time is monotone along any path.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::FlowNetwork;
use crate::rational::{floor_div, Rational};

/// A node of the (possibly expanded) time-varying graph.
///
/// `Sat { satellite: i, snapshot: k }` is satellite `i` during snapshot `k`
/// (both 1-based). `AuxSink` nodes are per-client collection points added by
/// [`expand_with_client_sinks`]; they carry no snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SatNode {
    Sat { satellite: u32, snapshot: u32 },
    AuxSink { client: u32 },
}

impl SatNode {
    pub fn sat(satellite: u32, snapshot: u32) -> Self {
        SatNode::Sat { satellite, snapshot }
    }

    pub fn satellite(&self) -> Option<u32> {
        match self {
            SatNode::Sat { satellite, .. } => Some(*satellite),
            SatNode::AuxSink { .. } => None,
        }
    }

    pub fn snapshot(&self) -> Option<u32> {
        match self {
            SatNode::Sat { snapshot, .. } => Some(*snapshot),
            SatNode::AuxSink { .. } => None,
        }
    }
}

impl fmt::Display for SatNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatNode::Sat { satellite, snapshot } => write!(f, "{satellite}@{snapshot}"),
            SatNode::AuxSink { client } => write!(f, "sink({client})"),
        }
    }
}

/// One directed intra-snapshot arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TvgArc {
    pub from: SatNode,
    pub to: SatNode,
    pub capacity: Rational,
}

/// Capacity rule for the derived inter-snapshot (cache) arcs.
///
/// `Auto` means "resolve to the total demand of the instance this graph ends
/// up in" — graphs from the generators stay `Auto` until an instance binds
/// them. `Uniform` is a resolved value. Per-satellite overrides (experiments
/// only) sit on top of either.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CachePolicy {
    Auto,
    Uniform(Rational),
}

/// A time-varying graph: `satellite_count` satellites over `snapshot_count`
/// snapshots, explicit intra-snapshot arcs, derived cache arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeVaryingGraph {
    satellite_count: u32,
    snapshot_count: u32,
    intra: Vec<TvgArc>,
    cache: CachePolicy,
    cache_overrides: BTreeMap<u32, Rational>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("satellite {satellite} out of bounds (count {count})")]
    SatelliteOutOfBounds { satellite: u32, count: u32 },
    #[error("snapshot {snapshot} out of bounds (count {count})")]
    SnapshotOutOfBounds { snapshot: u32, count: u32 },
    #[error("negative capacity on link ({i},{j}) in snapshot {k}")]
    NegativeCapacity { i: u32, j: u32, k: u32 },
    #[error("self-loop link ({i},{i}) in snapshot {k}")]
    SelfLoop { i: u32, k: u32 },
    #[error("duplicate arc ({i}->{j}) in snapshot {k}")]
    DuplicateArc { i: u32, j: u32, k: u32 },
    #[error("client {0} is not a valid satellite")]
    InvalidClient(u32),
    #[error("client {0} listed twice")]
    DuplicateClient(u32),
    #[error("source node {0} not in graph")]
    InvalidSource(SatNode),
    #[error("model size must be positive")]
    NonPositiveModelSize,
}

/// Build a time-varying graph from per-snapshot bidirectional links.
///
/// Each link `(i, j, k, cap_ij, cap_ji)` contributes up to two directed arcs
/// in snapshot `k`; a zero-capacity direction is simply absent. Cache arcs are
/// derived, one per satellite between consecutive snapshots, with capacity
/// `model_demand_total` (large enough that caching is never the bottleneck
/// under the default policy).
pub fn build_tvg(
    satellite_count: u32,
    snapshot_count: u32,
    intra_links: &[(u32, u32, u32, Rational, Rational)],
    model_demand_total: Rational,
) -> Result<TimeVaryingGraph, GraphError> {
    let mut g = TimeVaryingGraph::empty(satellite_count, snapshot_count, CachePolicy::Uniform(model_demand_total));
    for (i, j, k, cap_ij, cap_ji) in intra_links {
        g.add_link(*i, *j, *k, cap_ij.clone(), cap_ji.clone())?;
    }
    Ok(g)
}

impl TimeVaryingGraph {
    /// An arcless graph with the given cache policy; used by builders.
    pub fn empty(satellite_count: u32, snapshot_count: u32, cache: CachePolicy) -> Self {
        TimeVaryingGraph {
            satellite_count,
            snapshot_count,
            intra: Vec::new(),
            cache,
            cache_overrides: BTreeMap::new(),
        }
    }

    pub fn satellite_count(&self) -> u32 {
        self.satellite_count
    }

    pub fn snapshot_count(&self) -> u32 {
        self.snapshot_count
    }

    pub fn intra_arcs(&self) -> &[TvgArc] {
        &self.intra
    }

    pub fn cache_policy(&self) -> &CachePolicy {
        &self.cache
    }

    pub fn cache_overrides(&self) -> &BTreeMap<u32, Rational> {
        &self.cache_overrides
    }

    fn check_satellite(&self, i: u32) -> Result<(), GraphError> {
        if i == 0 || i > self.satellite_count {
            return Err(GraphError::SatelliteOutOfBounds { satellite: i, count: self.satellite_count });
        }
        Ok(())
    }

    fn check_snapshot(&self, k: u32) -> Result<(), GraphError> {
        if k == 0 || k > self.snapshot_count {
            return Err(GraphError::SnapshotOutOfBounds { snapshot: k, count: self.snapshot_count });
        }
        Ok(())
    }

    /// Add both directions of a link in snapshot `k`. Zero-capacity directions
    /// are dropped; duplicate directed arcs are rejected.
    pub fn add_link(
        &mut self,
        i: u32,
        j: u32,
        k: u32,
        cap_ij: Rational,
        cap_ji: Rational,
    ) -> Result<(), GraphError> {
        self.check_satellite(i)?;
        self.check_satellite(j)?;
        self.check_snapshot(k)?;
        if i == j {
            return Err(GraphError::SelfLoop { i, k });
        }
        for (a, b, cap) in [(i, j, cap_ij), (j, i, cap_ji)] {
            if cap < Rational::zero() {
                return Err(GraphError::NegativeCapacity { i: a, j: b, k });
            }
            if cap.is_zero() {
                continue;
            }
            let from = SatNode::sat(a, k);
            let to = SatNode::sat(b, k);
            if self.intra.iter().any(|arc| arc.from == from && arc.to == to) {
                return Err(GraphError::DuplicateArc { i: a, j: b, k });
            }
            self.intra.push(TvgArc { from, to, capacity: cap });
        }
        Ok(())
    }

    /// Override the cache capacity of one satellite (experiments only).
    pub fn set_cache_override(&mut self, satellite: u32, capacity: Rational) -> Result<(), GraphError> {
        self.check_satellite(satellite)?;
        self.cache_overrides.insert(satellite, capacity);
        Ok(())
    }

    /// Resolve an `Auto` cache policy to a concrete uniform capacity
    /// (the total demand of the enclosing instance). Overrides are kept.
    pub fn resolve_cache(&self, total_demand: Rational) -> TimeVaryingGraph {
        let mut g = self.clone();
        if matches!(g.cache, CachePolicy::Auto) {
            g.cache = CachePolicy::Uniform(total_demand);
        }
        g
    }

    /// Cache-arc capacity for one satellite.
    ///
    /// # Panics
    /// Panics if the policy is still `Auto`; solvers always work on graphs
    /// resolved via [`TimeVaryingGraph::resolve_cache`].
    pub fn cache_capacity(&self, satellite: u32) -> Rational {
        if let Some(cap) = self.cache_overrides.get(&satellite) {
            return cap.clone();
        }
        match &self.cache {
            CachePolicy::Uniform(cap) => cap.clone(),
            CachePolicy::Auto => panic!("cache policy unresolved; call resolve_cache first"),
        }
    }

    /// Derived inter-snapshot arcs: `(i@k → i@k+1)` for every satellite and
    /// consecutive snapshot pair — exactly `I·(K−1)` arcs.
    pub fn inter_arcs(&self) -> Vec<TvgArc> {
        let mut arcs = Vec::with_capacity(self.satellite_count as usize * self.snapshot_count.saturating_sub(1) as usize);
        for i in 1..=self.satellite_count {
            for k in 1..self.snapshot_count {
                arcs.push(TvgArc {
                    from: SatNode::sat(i, k),
                    to: SatNode::sat(i, k + 1),
                    capacity: self.cache_capacity(i),
                });
            }
        }
        arcs
    }

    /// Prefix graph containing only snapshots `1..=k`.
    pub fn truncate(&self, k: u32) -> Result<TimeVaryingGraph, GraphError> {
        self.check_snapshot(k)?;
        let intra = self
            .intra
            .iter()
            .filter(|arc| arc.from.snapshot().expect("intra arcs are satellite nodes") <= k)
            .cloned()
            .collect();
        Ok(TimeVaryingGraph {
            satellite_count: self.satellite_count,
            snapshot_count: k,
            intra,
            cache: self.cache.clone(),
            cache_overrides: self.cache_overrides.clone(),
        })
    }

    /// Forward-reachable satellite nodes from `source`, using intra arcs with
    /// capacity ≥ `min_capacity` and all cache arcs (stored data persists
    /// regardless of the threshold).
    pub fn reachable_set(&self, source: SatNode, min_capacity: &Rational) -> Result<BTreeSet<SatNode>, GraphError> {
        match source {
            SatNode::Sat { satellite, snapshot } => {
                self.check_satellite(satellite).map_err(|_| GraphError::InvalidSource(source))?;
                self.check_snapshot(snapshot).map_err(|_| GraphError::InvalidSource(source))?;
            }
            SatNode::AuxSink { .. } => return Err(GraphError::InvalidSource(source)),
        }
        let mut adjacency: BTreeMap<SatNode, Vec<SatNode>> = BTreeMap::new();
        for arc in &self.intra {
            if &arc.capacity >= min_capacity {
                adjacency.entry(arc.from).or_default().push(arc.to);
            }
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(source);
        queue.push_back(source);
        while let Some(node) = queue.pop_front() {
            let step = |next: SatNode, seen: &mut BTreeSet<SatNode>, queue: &mut VecDeque<SatNode>| {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            };
            if let Some(nexts) = adjacency.get(&node) {
                for &next in nexts {
                    step(next, &mut seen, &mut queue);
                }
            }
            if let (Some(i), Some(k)) = (node.satellite(), node.snapshot()) {
                if k < self.snapshot_count {
                    step(SatNode::sat(i, k + 1), &mut seen, &mut queue);
                }
            }
        }
        Ok(seen)
    }
}

/// Maps [`SatNode`]s to dense indices for the flow engine and back.
///
/// Satellite nodes are laid out in `(satellite, snapshot)` lexicographic
/// order — the canonical node order used for deterministic tie-breaking —
/// followed by one index per auxiliary sink.
#[derive(Debug, Clone)]
pub struct TvgIndexer {
    satellite_count: u32,
    snapshot_count: u32,
    aux_clients: Vec<u32>,
}

impl TvgIndexer {
    pub fn new(tvg: &TimeVaryingGraph, aux_clients: Vec<u32>) -> Self {
        TvgIndexer {
            satellite_count: tvg.satellite_count,
            snapshot_count: tvg.snapshot_count,
            aux_clients,
        }
    }

    pub fn node_count(&self) -> usize {
        (self.satellite_count * self.snapshot_count) as usize + self.aux_clients.len()
    }

    pub fn index(&self, node: SatNode) -> usize {
        match node {
            SatNode::Sat { satellite, snapshot } => {
                debug_assert!(satellite >= 1 && satellite <= self.satellite_count);
                debug_assert!(snapshot >= 1 && snapshot <= self.snapshot_count);
                ((satellite - 1) * self.snapshot_count + (snapshot - 1)) as usize
            }
            SatNode::AuxSink { client } => {
                let pos = self
                    .aux_clients
                    .iter()
                    .position(|&c| c == client)
                    .expect("aux sink not registered in indexer");
                (self.satellite_count * self.snapshot_count) as usize + pos
            }
        }
    }

    pub fn node(&self, index: usize) -> SatNode {
        let sat_nodes = (self.satellite_count * self.snapshot_count) as usize;
        if index < sat_nodes {
            SatNode::Sat {
                satellite: index as u32 / self.snapshot_count + 1,
                snapshot: index as u32 % self.snapshot_count + 1,
            }
        } else {
            SatNode::AuxSink { client: self.aux_clients[index - sat_nodes] }
        }
    }
}

/// The client-sink expanded topology: the base graph plus one auxiliary sink
/// per client, reachable from each snapshot copy of the client's satellite by
/// an entry arc of cost `k·w_c`. Entry arcs are the only positive-cost arcs.
#[derive(Debug, Clone)]
pub struct ExpandedGraph {
    pub base: TimeVaryingGraph,
    clients: Vec<(u32, Rational)>,
    entry_capacity: Rational,
}

/// Expand `tvg` with one auxiliary sink per `(client, weight)` pair.
///
/// `entry_capacity` is 1 for normalized (per-copy) networks or the model size
/// for unnormalized ones.
pub fn expand_with_client_sinks(
    tvg: &TimeVaryingGraph,
    clients: &[(u32, Rational)],
    entry_capacity: Rational,
) -> Result<ExpandedGraph, GraphError> {
    let mut seen = BTreeSet::new();
    for (c, _) in clients {
        if *c == 0 || *c > tvg.satellite_count() {
            return Err(GraphError::InvalidClient(*c));
        }
        if !seen.insert(*c) {
            return Err(GraphError::DuplicateClient(*c));
        }
    }
    Ok(ExpandedGraph { base: tvg.clone(), clients: clients.to_vec(), entry_capacity })
}

impl ExpandedGraph {
    pub fn clients(&self) -> &[(u32, Rational)] {
        &self.clients
    }

    pub fn aux_sinks(&self) -> Vec<SatNode> {
        self.clients.iter().map(|(c, _)| SatNode::AuxSink { client: *c }).collect()
    }

    /// Entry arcs `(c@k → sink(c))` with cost `k·w_c`, for `k = 1..=K`.
    pub fn entry_arcs(&self) -> Vec<(SatNode, SatNode, Rational, Rational)> {
        let k_max = self.base.snapshot_count();
        let mut arcs = Vec::with_capacity(self.clients.len() * k_max as usize);
        for (c, w) in &self.clients {
            for k in 1..=k_max {
                arcs.push((
                    SatNode::sat(*c, k),
                    SatNode::AuxSink { client: *c },
                    Rational::from_integer(k.into()) * w,
                    self.entry_capacity.clone(),
                ));
            }
        }
        arcs
    }

    pub fn indexer(&self) -> TvgIndexer {
        TvgIndexer::new(&self.base, self.clients.iter().map(|(c, _)| *c).collect())
    }
}

/// Dense-index flow view of a time-varying graph (base arcs only, cost 0).
///
/// Capacities are kept rational; [`normalize_capacities`] produces the
/// integer-capacity variant used by unsplittable-flow solvers.
pub fn to_flow_network(tvg: &TimeVaryingGraph) -> (FlowNetwork, TvgIndexer) {
    let indexer = TvgIndexer::new(tvg, Vec::new());
    let mut net = FlowNetwork::new(indexer.node_count());
    for arc in tvg.intra_arcs().iter().chain(tvg.inter_arcs().iter()) {
        net.add_arc(indexer.index(arc.from), indexer.index(arc.to), arc.capacity.clone(), Rational::zero());
    }
    (net, indexer)
}

/// Integer-capacity flow view: every capacity `p` becomes `⌊p / q⌋`, the
/// number of whole size-`q` model copies the arc can carry.
pub fn normalize_capacities(tvg: &TimeVaryingGraph, q: &Rational) -> Result<(FlowNetwork, TvgIndexer), GraphError> {
    if q <= &Rational::zero() {
        return Err(GraphError::NonPositiveModelSize);
    }
    let indexer = TvgIndexer::new(tvg, Vec::new());
    let mut net = FlowNetwork::new(indexer.node_count());
    for arc in tvg.intra_arcs().iter().chain(tvg.inter_arcs().iter()) {
        let copies = Rational::from_integer(floor_div(&arc.capacity, q));
        net.add_arc(indexer.index(arc.from), indexer.index(arc.to), copies, Rational::zero());
    }
    Ok((net, indexer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn unit_links(pairs: &[(u32, u32, u32)]) -> Vec<(u32, u32, u32, Rational, Rational)> {
        pairs.iter().map(|&(i, j, k)| (i, j, k, rat(1), rat(1))).collect()
    }

    #[test]
    fn single_snapshot_chain_has_no_cache_arcs() {
        let g = build_tvg(3, 1, &unit_links(&[(1, 2, 1), (2, 3, 1)]), rat(1)).unwrap();
        assert_eq!(g.intra_arcs().len(), 4);
        assert_eq!(g.inter_arcs().len(), 0);
    }

    #[test]
    fn cache_arcs_carry_declared_total() {
        let g = build_tvg(2, 2, &unit_links(&[(1, 2, 1)]), rat(5)).unwrap();
        assert_eq!(g.intra_arcs().len(), 2);
        let inter = g.inter_arcs();
        assert_eq!(inter.len(), 2);
        for arc in &inter {
            assert_eq!(arc.capacity, rat(5));
            assert_eq!(arc.from.satellite(), arc.to.satellite());
            assert_eq!(arc.from.snapshot().unwrap() + 1, arc.to.snapshot().unwrap());
        }
    }

    #[test]
    fn full_chain_gets_one_cache_arc_per_satellite() {
        let links = unit_links(&[(1, 2, 1), (2, 3, 1), (1, 2, 2), (2, 3, 2)]);
        let g = build_tvg(3, 2, &links, rat(7)).unwrap();
        let inter = g.inter_arcs();
        assert_eq!(inter.len(), 3);
        for i in 1..=3u32 {
            assert!(inter.iter().any(|a| a.from == SatNode::sat(i, 1) && a.to == SatNode::sat(i, 2) && a.capacity == rat(7)));
        }
    }

    #[test]
    fn rejects_bad_links() {
        assert_eq!(
            build_tvg(2, 1, &unit_links(&[(1, 3, 1)]), rat(1)).unwrap_err(),
            GraphError::SatelliteOutOfBounds { satellite: 3, count: 2 }
        );
        assert_eq!(
            build_tvg(2, 1, &unit_links(&[(1, 2, 2)]), rat(1)).unwrap_err(),
            GraphError::SnapshotOutOfBounds { snapshot: 2, count: 1 }
        );
        assert_eq!(
            build_tvg(2, 1, &[(1, 2, 1, rat(-1), rat(1))], rat(1)).unwrap_err(),
            GraphError::NegativeCapacity { i: 1, j: 2, k: 1 }
        );
        assert_eq!(
            build_tvg(2, 1, &unit_links(&[(1, 2, 1), (1, 2, 1)]), rat(1)).unwrap_err(),
            GraphError::DuplicateArc { i: 1, j: 2, k: 1 }
        );
        assert_eq!(
            build_tvg(2, 1, &unit_links(&[(1, 1, 1)]), rat(1)).unwrap_err(),
            GraphError::SelfLoop { i: 1, k: 1 }
        );
    }

    #[test]
    fn entry_arc_cost_ladder() {
        let g = build_tvg(2, 3, &unit_links(&[(1, 2, 1)]), rat(1)).unwrap();
        let ex = expand_with_client_sinks(&g, &[(2, rat(1))], rat(1)).unwrap();
        let costs: Vec<Rational> = ex.entry_arcs().iter().map(|(_, _, c, _)| c.clone()).collect();
        assert_eq!(costs, vec![rat(1), rat(2), rat(3)]);
    }

    #[test]
    fn single_snapshot_entry_arc_costs_weight() {
        let g = build_tvg(2, 1, &unit_links(&[(1, 2, 1)]), rat(1)).unwrap();
        let ex = expand_with_client_sinks(&g, &[(2, rat(5))], rat(1)).unwrap();
        let arcs = ex.entry_arcs();
        assert_eq!(arcs.len(), 1);
        assert_eq!(arcs[0].2, rat(5));
    }

    #[test]
    fn two_clients_weighted_ladders() {
        let g = build_tvg(3, 2, &unit_links(&[(1, 2, 1), (1, 3, 1)]), rat(2)).unwrap();
        let ex = expand_with_client_sinks(&g, &[(2, rat(1)), (3, rat(2))], rat(1)).unwrap();
        let costs: Vec<Rational> = ex.entry_arcs().iter().map(|(_, _, c, _)| c.clone()).collect();
        assert_eq!(costs, vec![rat(1), rat(2), rat(2), rat(4)]);
        assert_eq!(ex.entry_arcs().len(), 4);
        assert_eq!(ex.aux_sinks().len(), 2);
    }

    #[test]
    fn expansion_rejects_bad_clients() {
        let g = build_tvg(2, 1, &unit_links(&[(1, 2, 1)]), rat(1)).unwrap();
        assert_eq!(
            expand_with_client_sinks(&g, &[(4, rat(1))], rat(1)).unwrap_err(),
            GraphError::InvalidClient(4)
        );
        assert_eq!(
            expand_with_client_sinks(&g, &[(2, rat(1)), (2, rat(1))], rat(1)).unwrap_err(),
            GraphError::DuplicateClient(2)
        );
    }

    #[test]
    fn truncate_is_identity_at_full_horizon() {
        let links = unit_links(&[(1, 2, 1), (1, 2, 2), (1, 2, 3)]);
        let g = build_tvg(2, 3, &links, rat(1)).unwrap();
        assert_eq!(g.truncate(3).unwrap(), g);
    }

    #[test]
    fn truncate_to_first_snapshot_drops_cache_arcs() {
        let g = build_tvg(2, 3, &unit_links(&[(1, 2, 1), (1, 2, 2)]), rat(1)).unwrap();
        let t = g.truncate(1).unwrap();
        assert_eq!(t.inter_arcs().len(), 0);
        assert_eq!(t.intra_arcs().len(), 2);
        assert!(g.truncate(4).is_err());
    }

    #[test]
    fn truncate_is_monotone_in_arcs() {
        let g = build_tvg(2, 2, &unit_links(&[(1, 2, 1), (1, 2, 2)]), rat(1)).unwrap();
        let t1 = g.truncate(1).unwrap();
        let t2 = g.truncate(2).unwrap();
        for arc in t1.intra_arcs() {
            assert!(t2.intra_arcs().contains(arc));
        }
        assert_eq!(t1.intra_arcs().len(), 2);
    }

    #[test]
    fn reachability_respects_threshold() {
        let g = build_tvg(3, 1, &[(1, 2, 1, rat(1), rat(0)), (2, 3, 1, ratio(1, 2), rat(0))], rat(1)).unwrap();
        let isolated = build_tvg(2, 1, &[], rat(1)).unwrap();
        assert_eq!(
            isolated.reachable_set(SatNode::sat(1, 1), &rat(1)).unwrap(),
            BTreeSet::from([SatNode::sat(1, 1)])
        );
        let r = g.reachable_set(SatNode::sat(1, 1), &rat(1)).unwrap();
        assert_eq!(r, BTreeSet::from([SatNode::sat(1, 1), SatNode::sat(2, 1)]));
    }

    #[test]
    fn reachability_crosses_snapshots_via_cache() {
        // Satellite 3 only becomes adjacent to 2 in snapshot 2; data must be
        // cached at 2 between snapshots.
        let g = build_tvg(3, 2, &[(1, 2, 1, rat(1), rat(0)), (2, 3, 2, rat(1), rat(0))], rat(1)).unwrap();
        let r = g.reachable_set(SatNode::sat(1, 1), &rat(1)).unwrap();
        assert!(r.contains(&SatNode::sat(3, 2)));
        assert!(!r.contains(&SatNode::sat(3, 1)));
    }

    #[test]
    fn reachability_monotone_in_threshold() {
        let g = build_tvg(3, 2, &[(1, 2, 1, rat(2), rat(1)), (2, 3, 1, ratio(3, 2), rat(0))], rat(3)).unwrap();
        let loose = g.reachable_set(SatNode::sat(1, 1), &rat(1)).unwrap();
        let tight = g.reachable_set(SatNode::sat(1, 1), &rat(2)).unwrap();
        assert!(tight.is_subset(&loose));
    }

    #[test]
    fn rejects_invalid_reachability_source() {
        let g = build_tvg(2, 1, &unit_links(&[(1, 2, 1)]), rat(1)).unwrap();
        assert!(g.reachable_set(SatNode::sat(5, 1), &rat(1)).is_err());
        assert!(g.reachable_set(SatNode::AuxSink { client: 1 }, &rat(1)).is_err());
    }

    #[test]
    fn normalization_floors_capacities() {
        let g = build_tvg(2, 1, &[(1, 2, 1, ratio(5, 2), rat(0))], rat(1)).unwrap();
        let (net, idx) = normalize_capacities(&g, &rat(1)).unwrap();
        let arc = &net.arcs()[0];
        assert_eq!(arc.capacity, rat(2));
        assert_eq!(idx.node(arc.from), SatNode::sat(1, 1));

        let unit = build_tvg(2, 1, &[(1, 2, 1, rat(1), rat(0))], rat(1)).unwrap();
        let (net, _) = normalize_capacities(&unit, &rat(1)).unwrap();
        assert_eq!(net.arcs()[0].capacity, rat(1));

        // n/(n+1) with n=3 cannot carry a whole unit-size model.
        let frac = build_tvg(2, 1, &[(1, 2, 1, ratio(3, 4), rat(0))], rat(1)).unwrap();
        let (net, _) = normalize_capacities(&frac, &rat(1)).unwrap();
        assert_eq!(net.arcs()[0].capacity, rat(0));

        assert!(normalize_capacities(&g, &rat(0)).is_err());
    }

    #[test]
    fn indexer_round_trips_nodes() {
        let g = build_tvg(3, 2, &[], rat(1)).unwrap();
        let idx = TvgIndexer::new(&g, vec![7, 9]);
        for n in 0..idx.node_count() {
            assert_eq!(idx.index(idx.node(n)), n);
        }
        assert_eq!(idx.node_count(), 8);
    }
}
