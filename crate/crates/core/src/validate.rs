//! Independent replay validation of solutions.
//!
//! The validator re-derives everything from the instance and the claimed
//! routes: walk legality, joint capacity accounting per link and buffer,
//! delivered amounts, arrival snapshots, deadlines, and the objective value.
//! It shares no code with the solvers beyond the graph type, so a solver bug
//! cannot vouch for itself.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};
use thiserror::Error;

use crate::instance::{FlowKind, RoutingInstance, Variant};
use crate::rational::{format_rational, Rational};
use crate::solution::{
    DownloadRouting, DownloadSolution, ModelTree, RoutedPath, Solution, UploadOutcome,
    UploadSolution,
};
use crate::tvg::{SatNode, TimeVaryingGraph};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("path for model {model} client {client} is malformed: {reason}")]
    BadPath { model: usize, client: u32, reason: String },
    #[error("move {from}->{to} does not exist in the graph")]
    NoSuchMove { from: SatNode, to: SatNode },
    #[error("link {from}->{to} carries {used} but has capacity {capacity}")]
    LinkOverload { from: SatNode, to: SatNode, used: String, capacity: String },
    #[error("buffer at satellite {satellite} into snapshot {snapshot} carries {used} but holds {capacity}")]
    BufferOverload { satellite: u32, snapshot: u32, used: String, capacity: String },
    #[error("model {model} client {client} received {got}, needs {want}")]
    WrongAmount { model: usize, client: u32, got: String, want: String },
    #[error("model {model} client {client}: unsplittable traffic must use exactly one path, found {paths}")]
    SplitUnsplittable { model: usize, client: u32, paths: usize },
    #[error("arrival for model {model} client {client} recorded as {recorded:?} but routes say {actual:?}")]
    WrongArrival { model: usize, client: u32, recorded: Option<u32>, actual: Option<u32> },
    #[error("objective recorded as {recorded} but arrivals give {actual}")]
    WrongObjective { recorded: String, actual: String },
    #[error("delivery tree for model {model} is not a tree rooted at {root}: {reason}")]
    BadTree { model: usize, root: SatNode, reason: String },
    #[error("selected client {client} is not a client of model {model}")]
    UnknownSelection { model: usize, client: u32 },
    #[error("total utility recorded as {recorded} but selection sums to {actual}")]
    WrongUtility { recorded: String, actual: String },
    #[error("infeasible verdict must not carry routes")]
    RoutesOnInfeasible,
    #[error("solution shape does not match the variant: {0}")]
    ShapeMismatch(String),
}

/// Joint capacity accounting across every route of a solution.
struct CapacityLedger<'a> {
    tvg: &'a TimeVaryingGraph,
    links: BTreeMap<(u32, u32, u32), Rational>,
    link_caps: BTreeMap<(u32, u32, u32), Rational>,
    buffers: BTreeMap<(u32, u32), Rational>,
}

impl<'a> CapacityLedger<'a> {
    fn new(tvg: &'a TimeVaryingGraph) -> Self {
        let mut link_caps = BTreeMap::new();
        for arc in tvg.intra_arcs() {
            if let (SatNode::Sat { satellite: i, snapshot: k }, SatNode::Sat { satellite: j, .. }) =
                (arc.from, arc.to)
            {
                link_caps.insert((i, j, k), arc.capacity.clone());
            }
        }
        CapacityLedger { tvg, links: BTreeMap::new(), link_caps, buffers: BTreeMap::new() }
    }

    /// Record `amount` over one move, checking the move exists.
    fn add_move(&mut self, from: SatNode, to: SatNode, amount: &Rational) -> Result<(), ValidationError> {
        match (from, to) {
            (
                SatNode::Sat { satellite: i, snapshot: k },
                SatNode::Sat { satellite: j, snapshot: k2 },
            ) if k == k2 => {
                if !self.link_caps.contains_key(&(i, j, k)) {
                    return Err(ValidationError::NoSuchMove { from, to });
                }
                *self.links.entry((i, j, k)).or_insert_with(Rational::zero) += amount;
                Ok(())
            }
            (
                SatNode::Sat { satellite: i, snapshot: k },
                SatNode::Sat { satellite: j, snapshot: k2 },
            ) if i == j && k2 == k + 1 => {
                *self.buffers.entry((i, k2)).or_insert_with(Rational::zero) += amount;
                Ok(())
            }
            _ => Err(ValidationError::NoSuchMove { from, to }),
        }
    }

    fn check(&self) -> Result<(), ValidationError> {
        for (&(i, j, k), used) in &self.links {
            let cap = &self.link_caps[&(i, j, k)];
            if used > cap {
                return Err(ValidationError::LinkOverload {
                    from: SatNode::sat(i, k),
                    to: SatNode::sat(j, k),
                    used: format_rational(used),
                    capacity: format_rational(cap),
                });
            }
        }
        for (&(i, k), used) in &self.buffers {
            let cap = self.tvg.cache_capacity(i);
            if *used > cap {
                return Err(ValidationError::BufferOverload {
                    satellite: i,
                    snapshot: k,
                    used: format_rational(used),
                    capacity: format_rational(&cap),
                });
            }
        }
        Ok(())
    }
}

fn path_shape(path: &RoutedPath) -> Result<(), ValidationError> {
    let bad = |reason: &str| ValidationError::BadPath {
        model: path.model,
        client: path.client,
        reason: reason.to_string(),
    };
    if path.nodes.is_empty() {
        return Err(bad("empty node list"));
    }
    if !path.amount.is_positive() {
        return Err(bad("non-positive amount"));
    }
    for node in &path.nodes {
        if node.satellite().is_none() {
            return Err(bad("path visits a non-graph node"));
        }
    }
    Ok(())
}

/// Validate a distribution solution against its instance.
pub fn validate_download(
    inst: &RoutingInstance,
    sol: &DownloadSolution,
) -> Result<(), ValidationError> {
    let Variant::Download(variant) = &inst.variant else {
        return Err(ValidationError::ShapeMismatch("distribution solution for collection variant".into()));
    };
    let tvg = inst.resolved_tvg();
    let mut ledger = CapacityLedger::new(&tvg);
    let mut actual_arrivals: BTreeMap<(usize, u32), u32> = BTreeMap::new();

    match (&sol.routing, variant.multicast) {
        (DownloadRouting::Unicast(paths), false) => {
            for path in paths {
                path_shape(path)?;
                let model = inst.models.get(path.model).ok_or_else(|| {
                    ValidationError::ShapeMismatch(format!("path references model {}", path.model))
                })?;
                let bad = |reason: String| ValidationError::BadPath {
                    model: path.model,
                    client: path.client,
                    reason,
                };
                if model.client(path.client).is_none() {
                    return Err(bad("not a client of this model".into()));
                }
                let first = path.nodes[0];
                if first != SatNode::sat(model.server, 1) {
                    return Err(bad(format!("starts at {first}, not at the server in snapshot 1")));
                }
                let last = *path.nodes.last().unwrap();
                match last {
                    SatNode::Sat { satellite, snapshot } if satellite == path.client => {
                        if snapshot > tvg.snapshot_count() {
                            return Err(bad("ends beyond the horizon".into()));
                        }
                        let entry = actual_arrivals.entry((path.model, path.client)).or_insert(0);
                        *entry = (*entry).max(snapshot);
                    }
                    _ => return Err(bad(format!("ends at {last}, not at the client"))),
                }
                for pair in path.nodes.windows(2) {
                    ledger.add_move(pair[0], pair[1], &path.amount)?;
                }
            }
            // Delivered amounts per (model, client).
            for (m, model) in inst.models.iter().enumerate() {
                for client in &model.clients {
                    let mine: Vec<&RoutedPath> = paths
                        .iter()
                        .filter(|p| p.model == m && p.client == client.satellite)
                        .collect();
                    if variant.flow == FlowKind::Unsplittable && mine.len() != 1 {
                        return Err(ValidationError::SplitUnsplittable {
                            model: m,
                            client: client.satellite,
                            paths: mine.len(),
                        });
                    }
                    let got = mine
                        .iter()
                        .fold(Rational::zero(), |acc, p| acc + &p.amount);
                    if got != model.size {
                        return Err(ValidationError::WrongAmount {
                            model: m,
                            client: client.satellite,
                            got: format_rational(&got),
                            want: format_rational(&model.size),
                        });
                    }
                }
            }
        }
        (DownloadRouting::Multicast(trees), true) => {
            for tree in trees {
                let model = inst.models.get(tree.model).ok_or_else(|| {
                    ValidationError::ShapeMismatch(format!("tree references model {}", tree.model))
                })?;
                validate_tree_structure(tree)?;
                if tree.root != SatNode::sat(model.server, 1) {
                    return Err(ValidationError::BadTree {
                        model: tree.model,
                        root: tree.root,
                        reason: "root is not the server in snapshot 1".into(),
                    });
                }
                for &(from, to) in &tree.arcs {
                    ledger.add_move(from, to, &model.size)?;
                }
                let nodes = tree.nodes();
                for client in &model.clients {
                    let earliest = (1..=tvg.snapshot_count())
                        .find(|&k| nodes.contains(&SatNode::sat(client.satellite, k)));
                    match earliest {
                        Some(k) => {
                            actual_arrivals.insert((tree.model, client.satellite), k);
                        }
                        None => {
                            return Err(ValidationError::BadTree {
                                model: tree.model,
                                root: tree.root,
                                reason: format!("client {} is not covered", client.satellite),
                            })
                        }
                    }
                }
            }
            if trees.len() != inst.models.len() {
                return Err(ValidationError::ShapeMismatch(format!(
                    "{} delivery trees for {} models",
                    trees.len(),
                    inst.models.len()
                )));
            }
        }
        _ => {
            return Err(ValidationError::ShapeMismatch(
                "routing kind does not match the variant's multicast flag".into(),
            ))
        }
    }
    ledger.check()?;

    // Arrivals must match the routes exactly, covering every client.
    for (m, model) in inst.models.iter().enumerate() {
        for client in &model.clients {
            let key = (m, client.satellite);
            let actual = actual_arrivals.get(&key).copied();
            let recorded = sol.arrivals.get(&key).copied();
            if actual != recorded || actual.is_none() {
                return Err(ValidationError::WrongArrival {
                    model: m,
                    client: client.satellite,
                    recorded,
                    actual,
                });
            }
        }
    }
    if sol.arrivals.len() != actual_arrivals.len() {
        return Err(ValidationError::ShapeMismatch("extra arrival entries".into()));
    }

    let actual_objective = objective_value(inst, &sol.arrivals);
    if actual_objective != sol.objective {
        return Err(ValidationError::WrongObjective {
            recorded: format_rational(&sol.objective),
            actual: format_rational(&actual_objective),
        });
    }
    Ok(())
}

/// Recompute the variant's objective from arrival snapshots.
pub fn objective_value(inst: &RoutingInstance, arrivals: &BTreeMap<(usize, u32), u32>) -> Rational {
    let Variant::Download(variant) = &inst.variant else {
        panic!("objective_value is a distribution concept")
    };
    match variant.objective {
        crate::instance::Objective::WeightedSum => {
            let mut total = Rational::zero();
            for (m, model) in inst.models.iter().enumerate() {
                for client in &model.clients {
                    let k = arrivals
                        .get(&(m, client.satellite))
                        .copied()
                        .expect("arrival for every client");
                    total += &client.weight * Rational::from_integer((k as i64).into());
                }
            }
            total
        }
        crate::instance::Objective::MinMax => {
            let k = arrivals.values().copied().max().unwrap_or(0);
            Rational::from_integer((k as i64).into())
        }
    }
}

fn validate_tree_structure(tree: &ModelTree) -> Result<(), ValidationError> {
    let bad = |reason: String| ValidationError::BadTree { model: tree.model, root: tree.root, reason };
    let mut incoming: BTreeMap<SatNode, SatNode> = BTreeMap::new();
    for &(from, to) in &tree.arcs {
        if to == tree.root {
            return Err(bad("arc enters the root".into()));
        }
        if incoming.insert(to, from).is_some() {
            return Err(bad(format!("node {to} has two incoming arcs")));
        }
    }
    // Every node must reach the root by walking parents (acyclicity + connectivity).
    for (&start, _) in &incoming {
        let mut seen = BTreeSet::new();
        let mut at = start;
        while at != tree.root {
            if !seen.insert(at) {
                return Err(bad("cycle among tree arcs".into()));
            }
            match incoming.get(&at) {
                Some(&parent) => at = parent,
                None => return Err(bad(format!("node {at} is disconnected from the root"))),
            }
        }
    }
    Ok(())
}

/// Validate a collection solution against its instance.
pub fn validate_upload(inst: &RoutingInstance, sol: &UploadSolution) -> Result<(), ValidationError> {
    let Variant::Upload(variant) = &inst.variant else {
        return Err(ValidationError::ShapeMismatch("collection solution for distribution variant".into()));
    };
    let tvg = inst.resolved_tvg();
    let horizon = tvg.snapshot_count();

    // Which clients must deliver, per model?
    let delivering: Vec<BTreeSet<u32>> = match (&sol.outcome, variant.client_selection) {
        (UploadOutcome::Feasibility { feasible }, false) => {
            if !*feasible {
                if !sol.routing.is_empty() {
                    return Err(ValidationError::RoutesOnInfeasible);
                }
                return Ok(());
            }
            inst.models.iter().map(|m| m.client_satellites().into_iter().collect()).collect()
        }
        (UploadOutcome::Selection { selected, total_utility }, true) => {
            if selected.len() != inst.models.len() {
                return Err(ValidationError::ShapeMismatch(format!(
                    "{} selection sets for {} models",
                    selected.len(),
                    inst.models.len()
                )));
            }
            let mut actual_utility = Rational::zero();
            for (m, (model, chosen)) in inst.models.iter().zip(selected).enumerate() {
                for &c in chosen {
                    match model.client(c) {
                        Some(spec) => actual_utility += &spec.utility,
                        None => return Err(ValidationError::UnknownSelection { model: m, client: c }),
                    }
                }
            }
            if actual_utility != *total_utility {
                return Err(ValidationError::WrongUtility {
                    recorded: format_rational(total_utility),
                    actual: format_rational(&actual_utility),
                });
            }
            selected.clone()
        }
        _ => {
            return Err(ValidationError::ShapeMismatch(
                "outcome kind does not match the variant's selection flag".into(),
            ))
        }
    };

    let mut ledger = CapacityLedger::new(&tvg);
    for path in &sol.routing {
        path_shape(path)?;
        let model = inst.models.get(path.model).ok_or_else(|| {
            ValidationError::ShapeMismatch(format!("path references model {}", path.model))
        })?;
        let bad = |reason: String| ValidationError::BadPath {
            model: path.model,
            client: path.client,
            reason,
        };
        let spec = model
            .client(path.client)
            .ok_or_else(|| bad("not a client of this model".into()))?;
        if !delivering[path.model].contains(&path.client) {
            return Err(bad("routes traffic for an unselected client".into()));
        }
        match path.nodes[0] {
            SatNode::Sat { satellite, snapshot } if satellite == path.client => {
                if snapshot < spec.start {
                    return Err(bad(format!(
                        "departs in snapshot {snapshot}, before its model is ready at {}",
                        spec.start
                    )));
                }
            }
            other => return Err(bad(format!("starts at {other}, not at the client"))),
        }
        match *path.nodes.last().unwrap() {
            SatNode::Sat { satellite, snapshot } if satellite == model.server => {
                if snapshot > horizon {
                    return Err(bad("arrives after the deadline".into()));
                }
            }
            other => return Err(bad(format!("ends at {other}, not at the server"))),
        }
        for pair in path.nodes.windows(2) {
            ledger.add_move(pair[0], pair[1], &path.amount)?;
        }
    }
    ledger.check()?;

    // Delivered amounts.
    for (m, model) in inst.models.iter().enumerate() {
        for &c in &delivering[m] {
            let mine: Vec<&RoutedPath> =
                sol.routing.iter().filter(|p| p.model == m && p.client == c).collect();
            if variant.flow == FlowKind::Unsplittable && mine.len() != 1 {
                return Err(ValidationError::SplitUnsplittable { model: m, client: c, paths: mine.len() });
            }
            let got = mine.iter().fold(Rational::zero(), |acc, p| acc + &p.amount);
            if got != model.size {
                return Err(ValidationError::WrongAmount {
                    model: m,
                    client: c,
                    got: format_rational(&got),
                    want: format_rational(&model.size),
                });
            }
        }
    }
    Ok(())
}

/// Validate any solution against its instance.
pub fn validate_solution(inst: &RoutingInstance, sol: &Solution) -> Result<(), ValidationError> {
    match sol {
        Solution::Download(s) => validate_download(inst, s),
        Solution::Upload(s) => validate_upload(inst, s),
    }
}
