//! Solver outputs: routed paths, delivery trees, arrivals, selections.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::limits::BudgetExceeded;
use crate::rational::Rational;
use crate::tvg::SatNode;

/// Which algorithm family produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Polynomial,
    ExactSearch,
}

/// One routed packet: the walk its copy (or fraction) of model `model`
/// takes for client `client`, and the amount it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedPath {
    pub model: usize,
    pub client: u32,
    /// Walk through the graph; consecutive nodes are joined by an
    /// intra-snapshot link or a store-and-forward buffer hop.
    pub nodes: Vec<SatNode>,
    pub amount: Rational,
}

/// A delivery tree: one copy of the model fans out from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelTree {
    pub model: usize,
    pub root: SatNode,
    pub arcs: Vec<(SatNode, SatNode)>,
}

impl ModelTree {
    pub fn nodes(&self) -> BTreeSet<SatNode> {
        let mut out = BTreeSet::new();
        out.insert(self.root);
        for (from, to) in &self.arcs {
            out.insert(*from);
            out.insert(*to);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DownloadRouting {
    Unicast(Vec<RoutedPath>),
    Multicast(Vec<ModelTree>),
}

/// A distribution answer: when each client receives its model, over which
/// routes, and the objective value those arrivals realize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DownloadSolution {
    /// `(model index, client satellite) → arrival snapshot`.
    pub arrivals: BTreeMap<(usize, u32), u32>,
    pub routing: DownloadRouting,
    pub objective: Rational,
    pub solver: SolverKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UploadOutcome {
    /// All-or-nothing collection: can every client deliver by the deadline?
    Feasibility { feasible: bool },
    /// Utility-maximizing selection, per model.
    Selection { selected: Vec<BTreeSet<u32>>, total_utility: Rational },
}

/// A collection answer: the verdict or chosen client set, with witness routes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UploadSolution {
    pub outcome: UploadOutcome,
    pub routing: Vec<RoutedPath>,
    pub solver: SolverKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Download(DownloadSolution),
    Upload(UploadSolution),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolveError {
    /// No routing meets the variant's requirements within the horizon.
    #[error("no feasible routing exists: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}
