//! Exhaustive reference computations.
//!
//! Everything here recomputes answers the fast solvers also produce, but by
//! enumeration over a search space small enough to be checked directly:
//! temporal walks with joint capacity accounting, arc subsets, client
//! subsets, truth assignments, vertex subsets. The implementations
//! deliberately avoid the solver modules' constructions so that agreement
//! between the two is meaningful evidence; shared code is limited to the
//! graph/instance types and the low-level flow and pivot engines.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use crate::flow::{max_flow, FlowNetwork};
use crate::instance::{FlowKind, Objective, Phase, RoutingInstance, ServerMode, Variant};
use crate::limits::{BudgetExceeded, OracleBudget, StepCounter};
use crate::lp::{self, StandardForm};
use crate::rational::{rat, Rational};
use crate::reduction::{CnfFormula, InputDigraph, UndirectedGraph};
use crate::solution::{DownloadRouting, DownloadSolution, ModelTree, RoutedPath, SolverKind};
use crate::tvg::{SatNode, TimeVaryingGraph};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("no feasible routing exists: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// An optimum found by enumeration, with a witness in solver format so the
/// replay validator can check it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub objective: Rational,
    pub arrivals: BTreeMap<(usize, u32), u32>,
    pub routing: DownloadRouting,
}

impl OracleSolution {
    /// Repackage for [`crate::validate::validate_download`].
    pub fn into_download_solution(self) -> DownloadSolution {
        DownloadSolution {
            arrivals: self.arrivals,
            routing: self.routing,
            objective: self.objective,
            solver: SolverKind::ExactSearch,
        }
    }
}

// ---------------------------------------------------------------------------
// Time-expanded moves and walk enumeration
// ---------------------------------------------------------------------------

/// One unit of movement in the time-expanded graph: a link crossing inside a
/// snapshot, or holding at a satellite into the next snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mv {
    Link(usize),
    Hold(usize),
}

/// The instance graph flattened to indexed move lists.
struct Expanded {
    horizon: u32,
    /// `(from, to, snapshot, capacity)`, in graph insertion order.
    links: Vec<(u32, u32, u32, Rational)>,
    /// `(satellite, snapshot k, capacity)` for the hold `k → k+1`.
    holds: Vec<(u32, u32, Rational)>,
    /// Moves leaving each `(satellite, snapshot)`.
    out: BTreeMap<(u32, u32), Vec<Mv>>,
}

impl Expanded {
    fn from_instance(inst: &RoutingInstance) -> Expanded {
        let tvg = inst.resolved_tvg();
        Self::from_tvg(&tvg)
    }

    fn from_tvg(tvg: &TimeVaryingGraph) -> Expanded {
        let horizon = tvg.snapshot_count();
        let mut links = Vec::new();
        let mut out: BTreeMap<(u32, u32), Vec<Mv>> = BTreeMap::new();
        for arc in tvg.intra_arcs() {
            let (SatNode::Sat { satellite: i, snapshot: k }, SatNode::Sat { satellite: j, .. }) =
                (arc.from, arc.to)
            else {
                unreachable!("graph arcs connect satellites");
            };
            out.entry((i, k)).or_default().push(Mv::Link(links.len()));
            links.push((i, j, k, arc.capacity.clone()));
        }
        let mut holds = Vec::new();
        for sat in 1..=tvg.satellite_count() {
            let cap = tvg.cache_capacity(sat);
            if cap.is_zero() {
                continue;
            }
            for k in 1..horizon {
                out.entry((sat, k)).or_default().push(Mv::Hold(holds.len()));
                holds.push((sat, k, cap.clone()));
            }
        }
        Expanded { horizon, links, holds, out }
    }

    fn moves_from(&self, sat: u32, k: u32) -> &[Mv] {
        self.out.get(&(sat, k)).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// A walk through the time-expanded graph: per-snapshot node-simple, ending
/// the first time it touches the target satellite.
#[derive(Debug, Clone)]
struct Walk {
    nodes: Vec<SatNode>,
    moves: Vec<Mv>,
    /// Snapshot of the final node.
    arrival: u32,
}

/// Every walk from `(start_sat, start_k)` to the first visit of `target`.
/// Within one snapshot a walk never revisits a satellite; crossing into the
/// next snapshot (a hold) resets that restriction. `lead_hold: false`
/// forbids holding as the very first move — used when the caller enumerates
/// later starting snapshots itself, where an initial hold is dominated by
/// simply starting later.
fn enumerate_walks(
    exp: &Expanded,
    start_sat: u32,
    start_k: u32,
    target: u32,
    lead_hold: bool,
    steps: &mut StepCounter,
) -> Result<Vec<Walk>, BudgetExceeded> {
    let mut found = Vec::new();
    if start_k > exp.horizon {
        return Ok(found);
    }
    let start = SatNode::sat(start_sat, start_k);
    if start_sat == target {
        found.push(Walk { nodes: vec![start], moves: Vec::new(), arrival: start_k });
        return Ok(found);
    }
    let mut nodes = vec![start];
    let mut moves = Vec::new();
    let mut visited = BTreeSet::from([start_sat]);
    walk_dfs(
        exp,
        (start_sat, start_k),
        target,
        lead_hold,
        &mut nodes,
        &mut moves,
        &mut visited,
        &mut found,
        steps,
    )?;
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn walk_dfs(
    exp: &Expanded,
    at: (u32, u32),
    target: u32,
    allow_hold: bool,
    nodes: &mut Vec<SatNode>,
    moves: &mut Vec<Mv>,
    visited: &mut BTreeSet<u32>,
    found: &mut Vec<Walk>,
    steps: &mut StepCounter,
) -> Result<(), BudgetExceeded> {
    for &mv in exp.moves_from(at.0, at.1) {
        steps.tick()?;
        match mv {
            Mv::Link(i) => {
                let (_, to, k, _) = exp.links[i];
                if visited.contains(&to) {
                    continue;
                }
                nodes.push(SatNode::sat(to, k));
                moves.push(mv);
                if to == target {
                    found.push(Walk { nodes: nodes.clone(), moves: moves.clone(), arrival: k });
                } else {
                    visited.insert(to);
                    walk_dfs(exp, (to, k), target, true, nodes, moves, visited, found, steps)?;
                    visited.remove(&to);
                }
                nodes.pop();
                moves.pop();
            }
            Mv::Hold(i) => {
                if !allow_hold {
                    continue;
                }
                let (sat, k, _) = exp.holds[i];
                nodes.push(SatNode::sat(sat, k + 1));
                moves.push(mv);
                let saved = std::mem::replace(visited, BTreeSet::from([sat]));
                walk_dfs(exp, (sat, k + 1), target, true, nodes, moves, visited, found, steps)?;
                *visited = saved;
                nodes.pop();
                moves.pop();
            }
        }
    }
    Ok(())
}

/// Walks for one collection client: departures at every snapshot from its
/// ready time onward (initial holds are dominated by later departures and
/// skipped).
fn upload_walks(
    exp: &Expanded,
    client: u32,
    ready: u32,
    server: u32,
    steps: &mut StepCounter,
) -> Result<Vec<Walk>, BudgetExceeded> {
    let mut all = Vec::new();
    for k0 in ready..=exp.horizon {
        all.extend(enumerate_walks(exp, client, k0, server, false, steps)?);
    }
    Ok(all)
}

// ---------------------------------------------------------------------------
// Joint unsplittable assignment
// ---------------------------------------------------------------------------

/// One copy to be routed: its walk candidates and objective data.
struct PathTask {
    model: usize,
    client: u32,
    amount: Rational,
    weight: Rational,
    walks: Vec<Walk>,
}

struct Assignment {
    value: Rational,
    chosen: Vec<usize>,
}

/// Exhaustively assign one walk per task under joint capacities. With an
/// objective, returns a minimizer; with `None`, returns the first feasible
/// assignment. Walk lists must be sorted by arrival so the arrival-monotone
/// bound can cut the remainder of a list.
fn assign_paths(
    exp: &Expanded,
    tasks: &[PathTask],
    objective: Option<Objective>,
    steps: &mut StepCounter,
) -> Result<Option<Assignment>, BudgetExceeded> {
    if tasks.iter().any(|t| t.walks.is_empty()) {
        return Ok(None);
    }
    // Capacity-free per-task lower bounds for admissible pruning.
    let earliest: Vec<u32> = tasks.iter().map(|t| t.walks[0].arrival).collect();
    let mut tail_sum = vec![Rational::zero(); tasks.len() + 1];
    let mut tail_max = vec![0u32; tasks.len() + 1];
    for i in (0..tasks.len()).rev() {
        tail_sum[i] = &tail_sum[i + 1] + &tasks[i].weight * rat(earliest[i] as i64);
        tail_max[i] = tail_max[i + 1].max(earliest[i]);
    }

    struct Search<'a> {
        exp: &'a Expanded,
        tasks: &'a [PathTask],
        objective: Option<Objective>,
        tail_sum: Vec<Rational>,
        tail_max: Vec<u32>,
        links_rem: Vec<Rational>,
        holds_rem: Vec<Rational>,
        chosen: Vec<usize>,
        best: Option<Assignment>,
    }

    impl Search<'_> {
        fn consume(&mut self, walk: &Walk, amount: &Rational) -> bool {
            for mv in &walk.moves {
                let rem = match mv {
                    Mv::Link(i) => &self.links_rem[*i],
                    Mv::Hold(i) => &self.holds_rem[*i],
                };
                if rem < amount {
                    return false;
                }
            }
            for mv in &walk.moves {
                match mv {
                    Mv::Link(i) => self.links_rem[*i] -= amount,
                    Mv::Hold(i) => self.holds_rem[*i] -= amount,
                }
            }
            true
        }

        fn restore(&mut self, walk: &Walk, amount: &Rational) {
            for mv in &walk.moves {
                match mv {
                    Mv::Link(i) => self.links_rem[*i] += amount,
                    Mv::Hold(i) => self.holds_rem[*i] += amount,
                }
            }
        }

        /// Returns true when the search can stop (feasibility mode found a hit).
        fn rec(
            &mut self,
            i: usize,
            partial_sum: Rational,
            prefix_max: u32,
            steps: &mut StepCounter,
        ) -> Result<bool, BudgetExceeded> {
            if i == self.tasks.len() {
                let value = match self.objective {
                    Some(Objective::WeightedSum) => partial_sum,
                    Some(Objective::MinMax) => rat(prefix_max as i64),
                    None => Rational::zero(),
                };
                let better = match &self.best {
                    None => true,
                    Some(b) => value < b.value,
                };
                if better {
                    self.best = Some(Assignment { value, chosen: self.chosen.clone() });
                }
                return Ok(self.objective.is_none());
            }
            let task = &self.tasks[i];
            for wi in 0..task.walks.len() {
                steps.tick()?;
                let arrival = self.tasks[i].walks[wi].arrival;
                let next_sum =
                    &partial_sum + &self.tasks[i].weight * rat(arrival as i64);
                let next_max = prefix_max.max(arrival);
                if let (Some(obj), Some(best)) = (self.objective, &self.best) {
                    let bound = match obj {
                        Objective::WeightedSum => &next_sum + &self.tail_sum[i + 1],
                        Objective::MinMax => rat(next_max.max(self.tail_max[i + 1]) as i64),
                    };
                    if bound >= best.value {
                        // Walks are arrival-sorted, so later ones bound no better.
                        break;
                    }
                }
                let walk = self.tasks[i].walks[wi].clone();
                let amount = self.tasks[i].amount.clone();
                if !self.consume(&walk, &amount) {
                    continue;
                }
                self.chosen.push(wi);
                let stop = self.rec(i + 1, next_sum, next_max, steps)?;
                self.chosen.pop();
                self.restore(&walk, &amount);
                if stop {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }

    let mut search = Search {
        exp,
        tasks,
        objective,
        tail_sum,
        tail_max,
        links_rem: exp.links.iter().map(|(_, _, _, c)| c.clone()).collect(),
        holds_rem: exp.holds.iter().map(|(_, _, c)| c.clone()).collect(),
        chosen: Vec::with_capacity(tasks.len()),
        best: None,
    };
    search.rec(0, Rational::zero(), 0, steps)?;
    Ok(search.best)
}

fn budget_guard(inst: &RoutingInstance, budget: &OracleBudget) -> Result<(), BudgetExceeded> {
    budget.check_nodes(inst.tvg.satellite_count() as usize)?;
    budget.check_snapshots(inst.tvg.snapshot_count() as usize)?;
    let clients: usize = inst.models.iter().map(|m| m.clients.len()).sum();
    budget.check_clients(clients)
}

// ---------------------------------------------------------------------------
// Unsplittable distribution by path/schedule enumeration
// ---------------------------------------------------------------------------

/// Exact optimum for unsplittable distribution by enumerating, for every
/// `(model, client)` copy, all temporal walks from the model's server, and
/// assigning one walk per copy under joint capacities.
///
/// Applies to distribution instances with unsplittable flow (a multicast
/// variant is accepted and treated as per-copy traffic, which upper-bounds
/// the shared-copy optimum).
///
/// # Panics
/// On collection instances or splittable flow.
pub fn brute_force_unicast(
    inst: &RoutingInstance,
    objective: Objective,
    budget: &OracleBudget,
) -> Result<OracleSolution, OracleError> {
    assert_eq!(inst.phase, Phase::Download, "distribution instances only");
    let Variant::Download(v) = &inst.variant else { unreachable!() };
    assert_eq!(v.flow, FlowKind::Unsplittable, "unsplittable flow only");
    budget_guard(inst, budget)?;
    let mut steps = budget.start();
    let exp = Expanded::from_instance(inst);

    let mut tasks = Vec::new();
    for (m, model) in inst.models.iter().enumerate() {
        for client in &model.clients {
            let mut walks =
                enumerate_walks(&exp, model.server, 1, client.satellite, true, &mut steps)?;
            walks.sort_by_key(|w| w.arrival);
            if walks.is_empty() {
                return Err(OracleError::Infeasible(format!(
                    "client {} of model {m} cannot be reached within the horizon",
                    client.satellite
                )));
            }
            tasks.push(PathTask {
                model: m,
                client: client.satellite,
                amount: model.size.clone(),
                weight: client.weight.clone(),
                walks,
            });
        }
    }

    let Some(assignment) = assign_paths(&exp, &tasks, Some(objective), &mut steps)? else {
        return Err(OracleError::Infeasible(
            "no joint walk assignment fits the capacities".to_string(),
        ));
    };

    let mut arrivals = BTreeMap::new();
    let mut paths = Vec::new();
    for (task, &wi) in tasks.iter().zip(&assignment.chosen) {
        let walk = &task.walks[wi];
        arrivals.insert((task.model, task.client), walk.arrival);
        paths.push(RoutedPath {
            model: task.model,
            client: task.client,
            nodes: walk.nodes.clone(),
            amount: task.amount.clone(),
        });
    }
    Ok(OracleSolution {
        objective: assignment.value,
        arrivals,
        routing: DownloadRouting::Unicast(paths),
    })
}

// ---------------------------------------------------------------------------
// Single-model multicast by earliest arrivals
// ---------------------------------------------------------------------------

/// Exact optimum for single-model multicast.
///
/// One shared copy fans out along a tree, so link sharing between clients is
/// free and every client's arrival is bounded below by its earliest
/// reachable snapshot over links that fit the whole model. A breadth-first
/// tree attains all those bounds at once, which therefore minimizes both
/// supported objectives. The witness is that tree, trimmed to the paths the
/// clients actually use.
///
/// # Panics
/// On collection instances or a model count other than one.
pub fn brute_force_multicast(
    inst: &RoutingInstance,
    objective: Objective,
    budget: &OracleBudget,
) -> Result<OracleSolution, OracleError> {
    assert_eq!(inst.phase, Phase::Download, "distribution instances only");
    assert_eq!(inst.models.len(), 1, "one shared copy means one model");
    budget_guard(inst, budget)?;
    let mut steps = budget.start();

    let tvg = inst.resolved_tvg();
    let exp = Expanded::from_tvg(&tvg);
    let model = &inst.models[0];
    let q = &model.size;

    // parents[(sat, k)] = the expanded node the model came from (None at the
    // server's start node). Presence at (sat, k) means the model can be at
    // `sat` in snapshot `k`.
    let mut parents: BTreeMap<(u32, u32), Option<(u32, u32)>> = BTreeMap::new();
    parents.insert((model.server, 1), None);
    let mut earliest: BTreeMap<u32, u32> = BTreeMap::new();
    earliest.insert(model.server, 1);

    for k in 1..=exp.horizon {
        if k > 1 {
            // Carry everything over from snapshot k-1 where the buffer fits
            // the model.
            let held: Vec<u32> = parents
                .keys()
                .filter(|&&(_, kk)| kk == k - 1)
                .map(|&(sat, _)| sat)
                .collect();
            for sat in held {
                if tvg.cache_capacity(sat) >= *q {
                    parents.entry((sat, k)).or_insert(Some((sat, k - 1)));
                    earliest.entry(sat).or_insert(k);
                }
            }
        }
        // Close within the snapshot over links that fit the model.
        let mut frontier: Vec<u32> = parents
            .keys()
            .filter(|&&(_, kk)| kk == k)
            .map(|&(sat, _)| sat)
            .collect();
        while let Some(u) = frontier.pop() {
            for &mv in exp.moves_from(u, k) {
                steps.tick()?;
                let Mv::Link(i) = mv else { continue };
                let (_, to, _, ref cap) = exp.links[i];
                if cap < q || parents.contains_key(&(to, k)) {
                    continue;
                }
                parents.insert((to, k), Some((u, k)));
                earliest.entry(to).or_insert(k);
                frontier.push(to);
            }
        }
    }

    let mut arrivals = BTreeMap::new();
    for client in &model.clients {
        match earliest.get(&client.satellite) {
            Some(&k) => {
                arrivals.insert((0usize, client.satellite), k);
            }
            None => {
                return Err(OracleError::Infeasible(format!(
                    "client {} is unreachable with the whole model within the horizon",
                    client.satellite
                )))
            }
        }
    }

    // Tree witness: parent chains from each client's earliest node.
    let mut tree_arcs: BTreeSet<(SatNode, SatNode)> = BTreeSet::new();
    for (&(_, client), &k) in &arrivals {
        let mut at = (client, k);
        while let Some(Some(parent)) = parents.get(&at) {
            tree_arcs.insert((SatNode::sat(parent.0, parent.1), SatNode::sat(at.0, at.1)));
            at = *parent;
        }
    }
    let tree = ModelTree {
        model: 0,
        root: SatNode::sat(model.server, 1),
        arcs: tree_arcs.into_iter().collect(),
    };

    let objective_value = match objective {
        Objective::WeightedSum => model.clients.iter().fold(Rational::zero(), |acc, c| {
            acc + &c.weight * rat(arrivals[&(0, c.satellite)] as i64)
        }),
        Objective::MinMax => rat(arrivals.values().copied().max().unwrap_or(0) as i64),
    };
    Ok(OracleSolution {
        objective: objective_value,
        arrivals,
        routing: DownloadRouting::Multicast(vec![tree]),
    })
}

// ---------------------------------------------------------------------------
// Splittable feasibility references
// ---------------------------------------------------------------------------

/// Dense index for `(satellite, snapshot)` nodes of a flow network truncated
/// at `horizon`.
fn node_index(sat: u32, k: u32, horizon: u32) -> usize {
    ((sat - 1) * horizon + (k - 1)) as usize
}

/// Base network: every link instance up to `horizon`, every hold between
/// consecutive kept snapshots, zero costs.
fn base_network(inst: &RoutingInstance, exp: &Expanded, horizon: u32) -> FlowNetwork {
    let sats = inst.tvg.satellite_count();
    let mut net = FlowNetwork::new((sats * horizon) as usize);
    for (from, to, k, cap) in &exp.links {
        if *k <= horizon {
            net.add_arc(
                node_index(*from, *k, horizon),
                node_index(*to, *k, horizon),
                cap.clone(),
                Rational::zero(),
            );
        }
    }
    for (sat, k, cap) in &exp.holds {
        if k + 1 <= horizon {
            net.add_arc(
                node_index(*sat, *k, horizon),
                node_index(*sat, k + 1, horizon),
                cap.clone(),
                Rational::zero(),
            );
        }
    }
    net
}

/// Splittable distribution feasibility by `horizon`, common server: a max
/// flow from the server's start node against per-client collectors meets
/// every demand iff a feasible routing exists. Contents are interchangeable
/// in the flow picture because every model starts at the same node; a path
/// decomposition assigns each path the content of the collector it reaches.
fn sf_download_feasible_common(inst: &RoutingInstance, exp: &Expanded, horizon: u32) -> bool {
    let mut net = base_network(inst, exp, horizon);
    let sink = net.add_node();
    let mut total = Rational::zero();
    for model in &inst.models {
        for client in &model.clients {
            let collector = net.add_node();
            for k in 1..=horizon {
                net.add_arc(
                    node_index(client.satellite, k, horizon),
                    collector,
                    model.size.clone(),
                    Rational::zero(),
                );
            }
            net.add_arc(collector, sink, model.size.clone(), Rational::zero());
            total += &model.size;
        }
    }
    let source = node_index(inst.models[0].server, 1, horizon);
    let (value, _) = max_flow(&net, source, sink);
    value == total
}

/// Splittable collection feasibility for the selected clients, common
/// server: a max flow from per-client injectors into the server's timeline.
fn sf_upload_feasible_common(
    inst: &RoutingInstance,
    exp: &Expanded,
    selected: &[BTreeSet<u32>],
) -> bool {
    let horizon = exp.horizon;
    let mut net = base_network(inst, exp, horizon);
    let source = net.add_node();
    let sink = net.add_node();
    let mut total = Rational::zero();
    for (m, model) in inst.models.iter().enumerate() {
        for client in &model.clients {
            if !selected[m].contains(&client.satellite) {
                continue;
            }
            net.add_arc(
                source,
                node_index(client.satellite, client.start, horizon),
                model.size.clone(),
                Rational::zero(),
            );
            total += &model.size;
        }
    }
    if total.is_zero() {
        return true;
    }
    let server = inst.models[0].server;
    for k in 1..=horizon {
        net.add_arc(node_index(server, k, horizon), sink, total.clone(), Rational::zero());
    }
    let (value, _) = max_flow(&net, source, sink);
    value == total
}

/// Multicommodity splittable feasibility by a path-formulation linear
/// program: one variable per temporal walk of each `(model, client)` pair,
/// demand rows per pair, capacity rows (with slack) per used move. Used for
/// separate-server instances, where flows of the two models are not
/// interchangeable.
fn sf_feasible_lp(
    pair_walks: &[(Rational, Vec<Walk>)],
    exp: &Expanded,
) -> bool {
    if pair_walks.iter().any(|(_, walks)| walks.is_empty()) {
        return false;
    }
    let nwalks: usize = pair_walks.iter().map(|(_, w)| w.len()).sum();
    // Which moves are used by at least one walk, in deterministic order.
    let mut used_moves: BTreeSet<(u8, usize)> = BTreeSet::new();
    for (_, walks) in pair_walks {
        for walk in walks {
            for mv in &walk.moves {
                used_moves.insert(match mv {
                    Mv::Link(i) => (0, *i),
                    Mv::Hold(i) => (1, *i),
                });
            }
        }
    }
    let used_moves: Vec<(u8, usize)> = used_moves.into_iter().collect();
    let move_row: BTreeMap<(u8, usize), usize> =
        used_moves.iter().enumerate().map(|(r, &m)| (m, r)).collect();

    let cols = nwalks + used_moves.len(); // walk variables then slacks
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    // Demand rows.
    let mut col = 0;
    for (amount, walks) in pair_walks {
        let mut coeffs = vec![Rational::zero(); cols];
        for _ in walks {
            coeffs[col] = Rational::one();
            col += 1;
        }
        rows.push((coeffs, amount.clone()));
    }
    // Capacity rows.
    let mut cap_rows: Vec<(Vec<Rational>, Rational)> = used_moves
        .iter()
        .map(|&(kind, i)| {
            let cap = if kind == 0 { exp.links[i].3.clone() } else { exp.holds[i].2.clone() };
            let mut coeffs = vec![Rational::zero(); cols];
            coeffs[nwalks + move_row[&(kind, i)]] = Rational::one();
            (coeffs, cap)
        })
        .collect();
    let mut col = 0;
    for (_, walks) in pair_walks {
        for walk in walks {
            for mv in &walk.moves {
                let key = match mv {
                    Mv::Link(i) => (0, *i),
                    Mv::Hold(i) => (1, *i),
                };
                cap_rows[move_row[&key]].0[col] = Rational::one();
            }
            col += 1;
        }
    }
    rows.extend(cap_rows);

    let lp = StandardForm { objective: vec![Rational::zero(); cols], rows };
    match lp::solve(&lp) {
        lp::LpOutcome::Optimal { .. } => true,
        lp::LpOutcome::Infeasible => false,
        lp::LpOutcome::Unbounded => unreachable!("bounded feasibility program"),
    }
}

/// Smallest horizon by which a splittable distribution instance is
/// feasible, by direct feasibility checks per horizon (max flow for a
/// common server, a path-formulation program for separate servers).
///
/// # Panics
/// On collection instances or unsplittable flow.
pub fn sf_minmax_oracle(inst: &RoutingInstance, budget: &OracleBudget) -> Result<u32, OracleError> {
    assert_eq!(inst.phase, Phase::Download, "distribution instances only");
    let Variant::Download(v) = &inst.variant else { unreachable!() };
    assert_eq!(v.flow, FlowKind::Splittable, "splittable flow only");
    budget_guard(inst, budget)?;
    let mut steps = budget.start();
    let exp = Expanded::from_instance(inst);

    let separate = inst.variant.servers() == ServerMode::Separate;
    // For the path formulation, enumerate walks once at the full horizon;
    // a walk arriving by `k` never uses a later move.
    let pair_walks: Option<Vec<(Rational, Vec<Walk>)>> = if separate {
        let mut pairs = Vec::new();
        for model in &inst.models {
            for client in &model.clients {
                let walks =
                    enumerate_walks(&exp, model.server, 1, client.satellite, true, &mut steps)?;
                pairs.push((model.size.clone(), walks));
            }
        }
        Some(pairs)
    } else {
        None
    };

    for k in 1..=exp.horizon {
        steps.tick()?;
        let feasible = match &pair_walks {
            None => sf_download_feasible_common(inst, &exp, k),
            Some(pairs) => {
                let truncated: Vec<(Rational, Vec<Walk>)> = pairs
                    .iter()
                    .map(|(q, walks)| {
                        (q.clone(), walks.iter().filter(|w| w.arrival <= k).cloned().collect())
                    })
                    .collect();
                sf_feasible_lp(&truncated, &exp)
            }
        };
        if feasible {
            return Ok(k);
        }
    }
    Err(OracleError::Infeasible(
        "demands cannot be met by the end of the horizon".to_string(),
    ))
}

// ---------------------------------------------------------------------------
// Collection feasibility and client selection
// ---------------------------------------------------------------------------

/// Precomputed per-client data for collection enumeration.
struct UploadContext {
    exp: Expanded,
    flow: FlowKind,
    separate: bool,
    /// `(model, client, size, utility, walks)` — walks only for the
    /// unsplittable or separate-server cases that need them.
    pairs: Vec<(usize, u32, Rational, Rational, Vec<Walk>)>,
}

impl UploadContext {
    fn build(inst: &RoutingInstance, budget: &OracleBudget) -> Result<Self, OracleError> {
        assert_eq!(inst.phase, Phase::Upload, "collection instances only");
        budget_guard(inst, budget)?;
        let mut steps = budget.start();
        let exp = Expanded::from_instance(inst);
        let Variant::Upload(v) = &inst.variant else { unreachable!() };
        let separate = inst.variant.servers() == ServerMode::Separate;
        let need_walks = v.flow == FlowKind::Unsplittable || separate;

        let mut pairs = Vec::new();
        for (m, model) in inst.models.iter().enumerate() {
            for client in &model.clients {
                let walks = if need_walks {
                    let mut w = upload_walks(
                        &exp,
                        client.satellite,
                        client.start,
                        model.server,
                        &mut steps,
                    )?;
                    w.sort_by_key(|w| w.arrival);
                    w
                } else {
                    Vec::new()
                };
                pairs.push((m, client.satellite, model.size.clone(), client.utility.clone(), walks));
            }
        }
        Ok(UploadContext { exp, flow: v.flow, separate, pairs })
    }

    /// Can the pairs listed in `picked` (indices into `self.pairs`) all
    /// deliver by the deadline?
    fn feasible(
        &self,
        inst: &RoutingInstance,
        picked: &[usize],
        steps: &mut StepCounter,
    ) -> Result<bool, BudgetExceeded> {
        match (self.flow, self.separate) {
            (FlowKind::Unsplittable, _) => {
                let tasks: Vec<PathTask> = picked
                    .iter()
                    .map(|&i| {
                        let (m, c, q, _, ref walks) = self.pairs[i];
                        PathTask {
                            model: m,
                            client: c,
                            amount: q.clone(),
                            weight: Rational::zero(),
                            walks: walks.clone(),
                        }
                    })
                    .collect();
                Ok(assign_paths(&self.exp, &tasks, None, steps)?.is_some())
            }
            (FlowKind::Splittable, false) => {
                let mut selected = vec![BTreeSet::new(); inst.models.len()];
                for &i in picked {
                    selected[self.pairs[i].0].insert(self.pairs[i].1);
                }
                Ok(sf_upload_feasible_common(inst, &self.exp, &selected))
            }
            (FlowKind::Splittable, true) => {
                let pair_walks: Vec<(Rational, Vec<Walk>)> = picked
                    .iter()
                    .map(|&i| (self.pairs[i].2.clone(), self.pairs[i].4.clone()))
                    .collect();
                Ok(sf_feasible_lp(&pair_walks, &self.exp))
            }
        }
    }
}

/// Can every client of a collection instance deliver by the deadline?
pub fn upload_feasible_oracle(
    inst: &RoutingInstance,
    budget: &OracleBudget,
) -> Result<bool, OracleError> {
    let ctx = UploadContext::build(inst, budget)?;
    let mut steps = budget.start();
    let all: Vec<usize> = (0..ctx.pairs.len()).collect();
    Ok(ctx.feasible(inst, &all, &mut steps)?)
}

/// The best feasible client selection, by subset enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsOutcome {
    pub total_utility: Rational,
    /// Per model, the chosen client satellites.
    pub selected: Vec<BTreeSet<u32>>,
}

/// Maximize total utility over feasible client subsets by checking every
/// subset (cheapest-first skip: subsets that cannot beat the incumbent are
/// not routed at all).
pub fn brute_force_cs(
    inst: &RoutingInstance,
    budget: &OracleBudget,
) -> Result<CsOutcome, OracleError> {
    let ctx = UploadContext::build(inst, budget)?;
    let n = ctx.pairs.len();
    if n >= 63 {
        return Err(OracleError::Budget(BudgetExceeded(format!(
            "{n} selectable clients is beyond subset enumeration"
        ))));
    }
    budget.check_subsets(1u64 << n)?;
    let mut steps = budget.start();

    let mut best_mask = 0u64;
    let mut best_utility = Rational::zero(); // the empty selection is always feasible
    for mask in 1u64..(1u64 << n) {
        steps.tick()?;
        let utility = (0..n)
            .filter(|b| mask >> b & 1 == 1)
            .fold(Rational::zero(), |acc, b| acc + &ctx.pairs[b].3);
        if utility <= best_utility {
            continue;
        }
        let picked: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
        if ctx.feasible(inst, &picked, &mut steps)? {
            best_utility = utility;
            best_mask = mask;
        }
    }

    let mut selected = vec![BTreeSet::new(); inst.models.len()];
    for b in 0..n {
        if best_mask >> b & 1 == 1 {
            selected[ctx.pairs[b].0].insert(ctx.pairs[b].1);
        }
    }
    Ok(CsOutcome { total_utility: best_utility, selected })
}

// ---------------------------------------------------------------------------
// Minimum-cost flow by direct enumeration
// ---------------------------------------------------------------------------

/// Exact minimum-cost flow on an integral network by enumerating every
/// integral arc assignment, pruned by per-node balance bounds (and by
/// accumulated cost when no cost is negative, where partial cost is a valid
/// lower bound). Returns `None` when no flow meets the supplies.
///
/// # Panics
/// If any capacity or supply is not an integer.
pub fn enumerate_min_cost_flow(
    net: &FlowNetwork,
    budget: &OracleBudget,
) -> Result<Option<crate::flow::IntegralFlow>, BudgetExceeded> {
    let caps: Vec<BigInt> = net
        .arcs()
        .iter()
        .map(|a| {
            assert!(a.capacity.is_integer(), "integral capacities only");
            a.capacity.to_integer()
        })
        .collect();
    let mut balance: Vec<BigInt> = net
        .supplies()
        .iter()
        .map(|s| {
            assert!(s.is_integer(), "integral supplies only");
            s.to_integer()
        })
        .collect();
    let n = net.node_count();
    let mut ri = vec![BigInt::zero(); n];
    let mut ro = vec![BigInt::zero(); n];
    for (arc, cap) in net.arcs().iter().zip(&caps) {
        ri[arc.to] += cap;
        ro[arc.from] += cap;
    }
    let nonnegative_costs = net.arcs().iter().all(|a| !a.cost.is_negative());

    struct Enum<'a> {
        net: &'a FlowNetwork,
        caps: Vec<BigInt>,
        nonneg: bool,
        best: Option<(Rational, Vec<BigInt>)>,
        flows: Vec<BigInt>,
    }

    impl Enum<'_> {
        fn feasible_node(&self, bal: &BigInt, ri: &BigInt, ro: &BigInt) -> bool {
            bal <= ro && *bal >= -ri
        }

        fn rec(
            &mut self,
            a: usize,
            balance: &mut Vec<BigInt>,
            ri: &mut Vec<BigInt>,
            ro: &mut Vec<BigInt>,
            cost: Rational,
            steps: &mut StepCounter,
        ) -> Result<(), BudgetExceeded> {
            if a == self.caps.len() {
                if balance.iter().all(|b| b.is_zero()) {
                    let better = match &self.best {
                        None => true,
                        Some((c, _)) => cost < *c,
                    };
                    if better {
                        self.best = Some((cost, self.flows.clone()));
                    }
                }
                return Ok(());
            }
            let arc = &self.net.arcs()[a];
            let cap = self.caps[a].clone();
            // This arc is no longer "future" capacity.
            ri[arc.to] -= &cap;
            ro[arc.from] -= &cap;
            let mut f = BigInt::zero();
            while f <= cap {
                steps.tick()?;
                let step_cost = &cost + &arc.cost * Rational::from_integer(f.clone());
                let cost_cut = self.nonneg
                    && matches!(&self.best, Some((c, _)) if step_cost >= *c);
                if !cost_cut {
                    balance[arc.from] -= &f;
                    balance[arc.to] += &f;
                    let ok = self.feasible_node(&balance[arc.from], &ri[arc.from], &ro[arc.from])
                        && self.feasible_node(&balance[arc.to], &ri[arc.to], &ro[arc.to]);
                    if ok {
                        self.flows[a] = f.clone();
                        self.rec(a + 1, balance, ri, ro, step_cost, steps)?;
                        self.flows[a] = BigInt::zero();
                    }
                    balance[arc.from] += &f;
                    balance[arc.to] -= &f;
                } else if self.nonneg {
                    // Larger f only costs more; no need to continue.
                    break;
                }
                f += BigInt::one();
            }
            ri[arc.to] += &cap;
            ro[arc.from] += &cap;
            Ok(())
        }
    }

    let arc_count = caps.len();
    let mut search = Enum {
        net,
        caps,
        nonneg: nonnegative_costs,
        best: None,
        flows: vec![BigInt::zero(); arc_count],
    };
    let mut steps = budget.start();
    search.rec(0, &mut balance, &mut ri, &mut ro, Rational::zero(), &mut steps)?;
    Ok(search
        .best
        .map(|(total_cost, flows)| crate::flow::IntegralFlow { flows, total_cost }))
}

// ---------------------------------------------------------------------------
// Steiner arborescence by arc-subset enumeration
// ---------------------------------------------------------------------------

/// Cheapest arc subset that forms an arborescence rooted at `root` covering
/// every terminal, by trying all `2^|arcs|` subsets. Returns the cost and
/// the chosen arc indices, or `None` when no subset covers the terminals.
pub fn exhaustive_steiner_arborescence(
    g: &crate::arborescence::Digraph,
    root: usize,
    terminals: &BTreeSet<usize>,
    budget: &OracleBudget,
) -> Result<Option<(Rational, Vec<usize>)>, BudgetExceeded> {
    let arcs = &g.arcs;
    if arcs.len() >= 63 {
        return Err(BudgetExceeded(format!(
            "{} arcs is beyond subset enumeration",
            arcs.len()
        )));
    }
    budget.check_subsets(1u64 << arcs.len())?;
    let mut steps = budget.start();

    let mut best: Option<(Rational, Vec<usize>)> = None;
    'mask: for mask in 0u64..(1u64 << arcs.len()) {
        steps.tick()?;
        let chosen: Vec<usize> = (0..arcs.len()).filter(|b| mask >> b & 1 == 1).collect();
        let mut parent: Vec<Option<usize>> = vec![None; g.nodes];
        for &i in &chosen {
            let (from, to, _) = (arcs[i].0, arcs[i].1, ());
            if to == root || parent[to].is_some() {
                continue 'mask;
            }
            parent[to] = Some(from);
        }
        // Every arc must leave a tree node, and parent chains must reach the
        // root without cycles.
        for &i in &chosen {
            let from = arcs[i].0;
            if from != root && parent[from].is_none() {
                continue 'mask;
            }
        }
        for &i in &chosen {
            let mut hops = 0;
            let mut at = arcs[i].1;
            while at != root {
                match parent[at] {
                    Some(up) => at = up,
                    None => continue 'mask,
                }
                hops += 1;
                if hops > g.nodes {
                    continue 'mask; // cycle
                }
            }
        }
        if terminals.iter().any(|&t| t != root && parent[t].is_none()) {
            continue;
        }
        let cost = chosen
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &arcs[i].2);
        let better = match &best {
            None => true,
            Some((c, _)) => cost < *c,
        };
        if better {
            best = Some((cost, chosen));
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Source-problem references
// ---------------------------------------------------------------------------

/// Result of trying every truth assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatOutcome {
    pub satisfiable: bool,
    /// Largest number of clauses any assignment satisfies.
    pub max_satisfied: usize,
    /// First assignment attaining the maximum (index = variable − 1).
    pub best_assignment: Vec<bool>,
}

/// Evaluate every assignment of the formula's variables.
pub fn sat_brute_force(
    formula: &CnfFormula,
    budget: &OracleBudget,
) -> Result<SatOutcome, BudgetExceeded> {
    let m = formula.variables();
    if m >= 63 {
        return Err(BudgetExceeded(format!("{m} variables is beyond assignment enumeration")));
    }
    budget.check_subsets(1u64 << m)?;
    let mut steps = budget.start();

    let mut best = 0usize;
    let mut witness = vec![false; m as usize];
    let mut have = false;
    for mask in 0u64..(1u64 << m) {
        steps.tick()?;
        let assignment: Vec<bool> = (0..m).map(|v| mask >> v & 1 == 1).collect();
        let count = formula.satisfied_count(&assignment);
        if !have || count > best {
            best = count;
            witness = assignment;
            have = true;
        }
    }
    Ok(SatOutcome {
        satisfiable: best == formula.clause_count(),
        max_satisfied: best,
        best_assignment: witness,
    })
}

/// A smallest vertex cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverOutcome {
    pub size: u32,
    pub cover: BTreeSet<u32>,
}

/// Find a minimum vertex cover by trying vertex subsets in increasing size.
pub fn mvc_brute_force(
    graph: &UndirectedGraph,
    budget: &OracleBudget,
) -> Result<CoverOutcome, BudgetExceeded> {
    let v = graph.vertices();
    if v >= 63 {
        return Err(BudgetExceeded(format!("{v} vertices is beyond subset enumeration")));
    }
    budget.check_subsets(1u64 << v)?;
    let mut steps = budget.start();

    for size in 0..=v {
        for mask in 0u64..(1u64 << v) {
            if mask.count_ones() != size {
                continue;
            }
            steps.tick()?;
            let covers = graph
                .edges()
                .iter()
                .all(|&(i, j)| mask >> (i - 1) & 1 == 1 || mask >> (j - 1) & 1 == 1);
            if covers {
                let cover = (1..=v).filter(|x| mask >> (x - 1) & 1 == 1).collect();
                return Ok(CoverOutcome { size, cover });
            }
        }
    }
    unreachable!("the full vertex set covers every edge")
}

/// Are there arc-disjoint directed paths `o1 → d1` and `o2 → d2`? Checked by
/// enumerating node-simple paths for the first pair and testing residual
/// reachability for the second. (If any arc-disjoint pair of walks exists,
/// a node-simple pair does too, since a walk contains a simple path over a
/// subset of its arcs.)
pub fn edp_brute_force(
    digraph: &InputDigraph,
    origin1: u32,
    dest1: u32,
    origin2: u32,
    dest2: u32,
    budget: &OracleBudget,
) -> Result<bool, BudgetExceeded> {
    let n = digraph.nodes();
    for t in [origin1, dest1, origin2, dest2] {
        assert!(t >= 1 && t <= n, "terminal {t} outside 1..={n}");
    }
    let mut steps = budget.start();
    let arcs = digraph.arcs();
    let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, (from, _)) in arcs.iter().enumerate() {
        out.entry(*from).or_default().push(i);
    }

    fn residual_reach(
        arcs: &[(u32, u32)],
        out: &BTreeMap<u32, Vec<usize>>,
        used: &[bool],
        from: u32,
        to: u32,
    ) -> bool {
        let mut seen = BTreeSet::from([from]);
        let mut queue = vec![from];
        while let Some(u) = queue.pop() {
            if u == to {
                return true;
            }
            for &i in out.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                if used[i] || !seen.insert(arcs[i].1) {
                    continue;
                }
                queue.push(arcs[i].1);
            }
        }
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        arcs: &[(u32, u32)],
        out: &BTreeMap<u32, Vec<usize>>,
        used: &mut Vec<bool>,
        visited: &mut BTreeSet<u32>,
        at: u32,
        dest1: u32,
        origin2: u32,
        dest2: u32,
        steps: &mut StepCounter,
    ) -> Result<bool, BudgetExceeded> {
        if at == dest1 {
            return Ok(residual_reach(arcs, out, used, origin2, dest2));
        }
        for &i in out.get(&at).map(Vec::as_slice).unwrap_or(&[]) {
            steps.tick()?;
            let next = arcs[i].1;
            if used[i] || visited.contains(&next) {
                continue;
            }
            used[i] = true;
            visited.insert(next);
            let hit = dfs(arcs, out, used, visited, next, dest1, origin2, dest2, steps)?;
            visited.remove(&next);
            used[i] = false;
            if hit {
                return Ok(true);
            }
        }
        Ok(false)
    }

    let mut used = vec![false; arcs.len()];
    let mut visited = BTreeSet::from([origin1]);
    dfs(arcs, &out, &mut used, &mut visited, origin1, dest1, origin2, dest2, &mut steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arborescence::{min_cost_arborescence, prune_to_steiner, Digraph};
    use crate::flow::min_cost_flow;
    use crate::instance::{
        ClientSpec, DownloadVariant, ModelSpec, UploadVariant,
    };
    use crate::rational::ratio;
    use crate::reduction::Lit;
    use crate::tvg::build_tvg;
    use crate::validate::validate_download;

    fn budget() -> OracleBudget {
        OracleBudget::default()
    }

    /// Three satellites in a row, both links in both snapshots, capacity q.
    fn line3(q: i64, w2: i64, w3: i64, objective: Objective, flow: FlowKind) -> RoutingInstance {
        let tvg = build_tvg(
            3,
            2,
            &[
                (1, 2, 1, rat(q), rat(0)),
                (2, 3, 1, rat(q), rat(0)),
                (1, 2, 2, rat(q), rat(0)),
                (2, 3, 2, rat(q), rat(0)),
            ],
            rat(2 * q),
        )
        .unwrap();
        let model = ModelSpec {
            size: rat(q),
            server: 1,
            clients: vec![
                ClientSpec::new(2).with_weight(rat(w2)),
                ClientSpec::new(3).with_weight(rat(w3)),
            ],
        };
        let variant = Variant::Download(DownloadVariant::unicast(1, flow, objective));
        RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap()
    }

    #[test]
    fn line_of_three_weighted_sum_is_three() {
        let inst = line3(1, 1, 1, Objective::WeightedSum, FlowKind::Unsplittable);
        let sol = brute_force_unicast(&inst, Objective::WeightedSum, &budget()).unwrap();
        assert_eq!(sol.objective, rat(3));
        validate_download(&inst, &sol.clone().into_download_solution()).unwrap();
    }

    #[test]
    fn line_of_three_heavy_tail_pays_twelve() {
        let inst = line3(1, 1, 10, Objective::WeightedSum, FlowKind::Unsplittable);
        let sol = brute_force_unicast(&inst, Objective::WeightedSum, &budget()).unwrap();
        assert_eq!(sol.objective, rat(12));
        // The heavy client must be served first.
        assert_eq!(sol.arrivals[&(0, 3)], 1);
        assert_eq!(sol.arrivals[&(0, 2)], 2);
    }

    #[test]
    fn line_of_three_minmax_is_two() {
        let inst = line3(1, 1, 1, Objective::MinMax, FlowKind::Unsplittable);
        let sol = brute_force_unicast(&inst, Objective::MinMax, &budget()).unwrap();
        assert_eq!(sol.objective, rat(2));
    }

    #[test]
    fn adjacent_client_costs_its_weight() {
        let tvg = build_tvg(2, 1, &[(1, 2, 1, rat(1), rat(0))], rat(1)).unwrap();
        let model = ModelSpec {
            size: rat(1),
            server: 1,
            clients: vec![ClientSpec::new(2).with_weight(rat(5))],
        };
        let variant = Variant::Download(DownloadVariant::unicast(
            1,
            FlowKind::Unsplittable,
            Objective::WeightedSum,
        ));
        let inst = RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap();
        let sol = brute_force_unicast(&inst, Objective::WeightedSum, &budget()).unwrap();
        assert_eq!(sol.objective, rat(5));
    }

    #[test]
    fn unreachable_client_is_infeasible() {
        let tvg = build_tvg(3, 1, &[(1, 2, 1, rat(1), rat(0))], rat(2)).unwrap();
        let model = ModelSpec {
            size: rat(1),
            server: 1,
            clients: vec![ClientSpec::new(2), ClientSpec::new(3)],
        };
        let variant = Variant::Download(DownloadVariant::unicast(
            1,
            FlowKind::Unsplittable,
            Objective::WeightedSum,
        ));
        let inst = RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap();
        assert!(matches!(
            brute_force_unicast(&inst, Objective::WeightedSum, &budget()),
            Err(OracleError::Infeasible(_))
        ));
    }

    #[test]
    fn co_located_client_is_served_at_start() {
        let tvg = build_tvg(2, 1, &[(1, 2, 1, rat(1), rat(0))], rat(2)).unwrap();
        let model = ModelSpec {
            size: rat(1),
            server: 1,
            clients: vec![ClientSpec::new(1), ClientSpec::new(2)],
        };
        let variant = Variant::Download(DownloadVariant::unicast(
            1,
            FlowKind::Unsplittable,
            Objective::WeightedSum,
        ));
        let inst = RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap();
        let sol = brute_force_unicast(&inst, Objective::WeightedSum, &budget()).unwrap();
        assert_eq!(sol.arrivals[&(0, 1)], 1);
        assert_eq!(sol.objective, rat(2));
        validate_download(&inst, &sol.into_download_solution()).unwrap();
    }

    fn fanout_instance(multicast: bool) -> RoutingInstance {
        // Server 1 feeds hub 2 over a unit link; hub fans out to 3 and 4.
        let links = [
            (1, 2, 1, rat(1), rat(0)),
            (2, 3, 1, rat(1), rat(0)),
            (2, 4, 1, rat(1), rat(0)),
            (1, 2, 2, rat(1), rat(0)),
            (2, 3, 2, rat(1), rat(0)),
            (2, 4, 2, rat(1), rat(0)),
        ];
        let tvg = build_tvg(4, 2, &links, rat(2)).unwrap();
        let model = ModelSpec {
            size: rat(1),
            server: 1,
            clients: vec![ClientSpec::new(3), ClientSpec::new(4)],
        };
        let variant = if multicast {
            Variant::Download(DownloadVariant::multicast(1, Objective::WeightedSum))
        } else {
            Variant::Download(DownloadVariant::unicast(
                1,
                FlowKind::Unsplittable,
                Objective::WeightedSum,
            ))
        };
        RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap()
    }

    #[test]
    fn shared_copy_beats_per_client_copies_across_a_bottleneck() {
        let uni = fanout_instance(false);
        let mul = fanout_instance(true);
        let u = brute_force_unicast(&uni, Objective::WeightedSum, &budget()).unwrap();
        let m = brute_force_multicast(&mul, Objective::WeightedSum, &budget()).unwrap();
        assert_eq!(u.objective, rat(3));
        assert_eq!(m.objective, rat(2));
        assert!(u.objective >= m.objective);
        validate_download(&uni, &u.into_download_solution()).unwrap();
        validate_download(&mul, &m.into_download_solution()).unwrap();
    }

    #[test]
    fn chain_multicast_reaches_both_in_snapshot_one() {
        let tvg = build_tvg(
            3,
            1,
            &[(1, 2, 1, rat(1), rat(0)), (2, 3, 1, rat(1), rat(0))],
            rat(1),
        )
        .unwrap();
        let model = ModelSpec {
            size: rat(1),
            server: 1,
            clients: vec![ClientSpec::new(2), ClientSpec::new(3)],
        };
        let variant = Variant::Download(DownloadVariant::multicast(1, Objective::WeightedSum));
        let inst = RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap();
        let sol = brute_force_multicast(&inst, Objective::WeightedSum, &budget()).unwrap();
        assert_eq!(sol.objective, rat(2));
        validate_download(&inst, &sol.into_download_solution()).unwrap();
    }

    #[test]
    fn multicast_disconnection_is_infeasible() {
        let tvg = build_tvg(3, 1, &[(1, 2, 1, rat(1), rat(0))], rat(1)).unwrap();
        let model = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(3)] };
        let variant = Variant::Download(DownloadVariant::multicast(1, Objective::MinMax));
        let inst = RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap();
        assert!(matches!(
            brute_force_multicast(&inst, Objective::MinMax, &budget()),
            Err(OracleError::Infeasible(_))
        ));
    }

    #[test]
    fn multicast_skips_links_too_narrow_for_the_model() {
        // A wide two-snapshot detour vs a narrow direct link.
        let links = [
            (1, 3, 1, ratio(1, 2), rat(0)), // too narrow for q = 1
            (1, 2, 1, rat(1), rat(0)),
            (2, 3, 2, rat(1), rat(0)),
        ];
        let tvg = build_tvg(3, 2, &links, rat(1)).unwrap();
        let model = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(3)] };
        let variant = Variant::Download(DownloadVariant::multicast(1, Objective::MinMax));
        let inst = RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap();
        let sol = brute_force_multicast(&inst, Objective::MinMax, &budget()).unwrap();
        assert_eq!(sol.objective, rat(2));
    }

    #[test]
    fn splittable_minmax_on_the_line_is_two() {
        let inst = line3(1, 1, 1, Objective::MinMax, FlowKind::Splittable);
        assert_eq!(sf_minmax_oracle(&inst, &budget()).unwrap(), 2);
    }

    #[test]
    fn splittable_routing_uses_half_width_paths() {
        // Two half-capacity routes from 1 to 4; unsplittable traffic cannot
        // use either, split traffic crosses in one snapshot.
        let links = [
            (1, 2, 1, ratio(1, 2), rat(0)),
            (1, 3, 1, ratio(1, 2), rat(0)),
            (2, 4, 1, ratio(1, 2), rat(0)),
            (3, 4, 1, ratio(1, 2), rat(0)),
        ];
        let tvg = build_tvg(4, 1, &links, rat(1)).unwrap();
        let model = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(4)] };
        let variant = Variant::Download(DownloadVariant::unicast(
            1,
            FlowKind::Splittable,
            Objective::MinMax,
        ));
        let inst = RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap();
        assert_eq!(sf_minmax_oracle(&inst, &budget()).unwrap(), 1);
    }

    #[test]
    fn splittable_accumulates_across_snapshots() {
        // A quarter-capacity link: half a unit takes two snapshots.
        let links = [(1, 2, 1, ratio(1, 4), rat(0)), (1, 2, 2, ratio(1, 4), rat(0))];
        let tvg = build_tvg(2, 2, &links, rat(1)).unwrap();
        let model = ModelSpec { size: ratio(1, 2), server: 1, clients: vec![ClientSpec::new(2)] };
        let variant = Variant::Download(DownloadVariant::unicast(
            1,
            FlowKind::Splittable,
            Objective::MinMax,
        ));
        let inst = RoutingInstance::new(Phase::Download, tvg, vec![model], variant).unwrap();
        assert_eq!(sf_minmax_oracle(&inst, &budget()).unwrap(), 2);
    }

    #[test]
    fn separate_servers_share_a_link_fairly() {
        // Two servers both reach client 3 of their own model through the
        // same middle node; capacities force the second snapshot.
        let links = [
            (1, 3, 1, ratio(1, 2), rat(0)),
            (2, 3, 1, ratio(1, 2), rat(0)),
            (1, 3, 2, ratio(1, 2), rat(0)),
            (2, 3, 2, ratio(1, 2), rat(0)),
        ];
        let tvg = build_tvg(3, 2, &links, rat(2)).unwrap();
        let models = vec![
            ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(3)] },
            ModelSpec { size: rat(1), server: 2, clients: vec![ClientSpec::new(3)] },
        ];
        let variant = Variant::Download(
            DownloadVariant::unicast(2, FlowKind::Splittable, Objective::MinMax)
                .with_separate_servers(),
        );
        let inst = RoutingInstance::new(Phase::Download, tvg, models, variant).unwrap();
        assert_eq!(sf_minmax_oracle(&inst, &budget()).unwrap(), 2);
    }

    fn funnel_upload(selection: bool, cap: i64, horizon: u32, flow: FlowKind) -> RoutingInstance {
        // Clients 2 and 3 feed node 4, which drains into server 1.
        let mut links = Vec::new();
        for k in 1..=horizon {
            links.push((2, 4, k, rat(1), rat(0)));
            links.push((3, 4, k, rat(1), rat(0)));
            links.push((4, 1, k, rat(cap), rat(0)));
        }
        let tvg = build_tvg(4, horizon, &links, rat(2)).unwrap();
        let model = ModelSpec {
            size: rat(1),
            server: 1,
            clients: vec![
                ClientSpec::new(2).with_utility(rat(3)),
                ClientSpec::new(3).with_utility(rat(5)),
            ],
        };
        let variant = Variant::Upload(UploadVariant::new(1, flow, selection));
        RoutingInstance::new(Phase::Upload, tvg, vec![model], variant).unwrap()
    }

    #[test]
    fn selection_prefers_the_higher_utility_behind_a_bottleneck() {
        for flow in [FlowKind::Unsplittable, FlowKind::Splittable] {
            let inst = funnel_upload(true, 1, 1, flow);
            let out = brute_force_cs(&inst, &budget()).unwrap();
            assert_eq!(out.total_utility, rat(5));
            assert_eq!(out.selected, vec![BTreeSet::from([3])]);
        }
    }

    #[test]
    fn ample_capacity_selects_everyone() {
        let inst = funnel_upload(true, 2, 1, FlowKind::Splittable);
        let out = brute_force_cs(&inst, &budget()).unwrap();
        assert_eq!(out.total_utility, rat(8));
        assert_eq!(out.selected, vec![BTreeSet::from([2, 3])]);
    }

    #[test]
    fn no_clients_means_zero_utility() {
        let tvg = build_tvg(2, 1, &[(2, 1, 1, rat(1), rat(0))], rat(1)).unwrap();
        let model = ModelSpec { size: rat(1), server: 1, clients: vec![] };
        let variant = Variant::Upload(UploadVariant::new(1, FlowKind::Splittable, true));
        let inst = RoutingInstance::new(Phase::Upload, tvg, vec![model], variant).unwrap();
        let out = brute_force_cs(&inst, &budget()).unwrap();
        assert_eq!(out.total_utility, rat(0));
        assert_eq!(out.selected, vec![BTreeSet::new()]);
    }

    #[test]
    fn deadline_feasibility_needs_the_second_snapshot() {
        let tight = funnel_upload(false, 1, 1, FlowKind::Unsplittable);
        assert!(!upload_feasible_oracle(&tight, &budget()).unwrap());
        let relaxed = funnel_upload(false, 1, 2, FlowKind::Unsplittable);
        assert!(upload_feasible_oracle(&relaxed, &budget()).unwrap());
    }

    #[test]
    fn flow_enumeration_matches_the_fast_solver() {
        // Diamond with distinct costs.
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, rat(2), rat(1));
        net.add_arc(0, 2, rat(2), rat(3));
        net.add_arc(1, 3, rat(1), rat(0));
        net.add_arc(2, 3, rat(2), rat(1));
        net.set_supply(0, rat(2));
        net.set_supply(3, rat(-2));
        let slow = enumerate_min_cost_flow(&net, &budget()).unwrap().unwrap();
        let fast = min_cost_flow(&net).unwrap();
        assert_eq!(slow.total_cost, fast.total_cost);
        assert_eq!(slow.total_cost, rat(6)); // 1·(1+0) + 1·(3+1) padding-free
    }

    #[test]
    fn flow_enumeration_reports_infeasibility_as_none() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, rat(1), rat(0));
        net.set_supply(0, rat(2));
        net.set_supply(1, rat(-2));
        assert_eq!(enumerate_min_cost_flow(&net, &budget()).unwrap(), None);
    }

    #[test]
    fn steiner_enumeration_agrees_with_contraction_and_pruning() {
        let mut g = Digraph::new(4);
        g.add_arc(0, 1, rat(2));
        g.add_arc(1, 2, rat(0));
        g.add_arc(0, 2, rat(5));
        g.add_arc(2, 3, rat(1));
        let terminals = BTreeSet::from([3]);
        let (cost, _) =
            exhaustive_steiner_arborescence(&g, 0, &terminals, &budget()).unwrap().unwrap();
        assert_eq!(cost, rat(3));
        let spanning = min_cost_arborescence(&g, 0).unwrap();
        let pruned = prune_to_steiner(&spanning, &terminals).unwrap();
        assert_eq!(pruned.total_cost, cost);
    }

    #[test]
    fn steiner_enumeration_handles_uncoverable_terminals() {
        let mut g = Digraph::new(3);
        g.add_arc(0, 1, rat(1));
        let terminals = BTreeSet::from([2]);
        assert_eq!(exhaustive_steiner_arborescence(&g, 0, &terminals, &budget()).unwrap(), None);
    }

    #[test]
    fn single_clause_is_satisfiable() {
        let f = CnfFormula::new(3, vec![[Lit::pos(1), Lit::pos(2), Lit::pos(3)]]).unwrap();
        let out = sat_brute_force(&f, &budget()).unwrap();
        assert!(out.satisfiable);
        assert_eq!(out.max_satisfied, 1);
    }

    #[test]
    fn all_sign_patterns_leave_one_clause_unsatisfied() {
        let clauses: Vec<[Lit; 3]> = (0..8u32)
            .map(|signs| {
                [
                    Lit { var: 1, negated: signs & 1 != 0 },
                    Lit { var: 2, negated: signs & 2 != 0 },
                    Lit { var: 3, negated: signs & 4 != 0 },
                ]
            })
            .collect();
        let f = CnfFormula::new(3, clauses).unwrap();
        let out = sat_brute_force(&f, &budget()).unwrap();
        assert!(!out.satisfiable);
        assert_eq!(out.max_satisfied, 7);
    }

    #[test]
    fn empty_formula_is_vacuously_satisfiable() {
        let f = CnfFormula::new(0, vec![]).unwrap();
        let out = sat_brute_force(&f, &budget()).unwrap();
        assert!(out.satisfiable);
        assert_eq!(out.max_satisfied, 0);
    }

    #[test]
    fn vertex_cover_examples() {
        let single = UndirectedGraph::new(2, vec![(1, 2)]).unwrap();
        assert_eq!(mvc_brute_force(&single, &budget()).unwrap().size, 1);
        let triangle = UndirectedGraph::new(3, vec![(1, 2), (2, 3), (1, 3)]).unwrap();
        assert_eq!(mvc_brute_force(&triangle, &budget()).unwrap().size, 2);
        let edgeless = UndirectedGraph::new(3, vec![]).unwrap();
        let out = mvc_brute_force(&edgeless, &budget()).unwrap();
        assert_eq!(out.size, 0);
        assert!(out.cover.is_empty());
    }

    #[test]
    fn disjoint_paths_found_and_refuted() {
        let open =
            InputDigraph::new(6, vec![(1, 3), (3, 4), (2, 6), (6, 5)]).unwrap();
        assert!(edp_brute_force(&open, 1, 4, 2, 5, &budget()).unwrap());

        // Both pairs must cross the single 3→4 bridge.
        let bridge =
            InputDigraph::new(6, vec![(1, 3), (2, 3), (3, 4), (4, 5), (4, 6)]).unwrap();
        assert!(!edp_brute_force(&bridge, 1, 5, 2, 6, &budget()).unwrap());
    }

    #[test]
    fn budgets_refuse_oversized_inputs() {
        let inst = line3(1, 1, 1, Objective::WeightedSum, FlowKind::Unsplittable);
        let tiny = OracleBudget { max_nodes: 2, ..OracleBudget::default() };
        assert!(matches!(
            brute_force_unicast(&inst, Objective::WeightedSum, &tiny),
            Err(OracleError::Budget(_))
        ));
        let f = CnfFormula::new(3, vec![[Lit::pos(1), Lit::pos(2), Lit::pos(3)]]).unwrap();
        let small = OracleBudget { max_subsets: 4, ..OracleBudget::default() };
        assert!(sat_brute_force(&f, &small).is_err());
    }
}
