//! Encodings of classic combinatorial decision problems as routing instances.
//!
//! Each builder takes a problem instance (a CNF formula, an undirected graph,
//! a digraph with two terminal pairs) and produces a [`ReductionArtifact`]: a
//! validated [`RoutingInstance`] together with the rule for reading the
//! routing answer back as an answer to the original problem. The encodings
//! are used to cross-check the search solvers against independent
//! brute-force references over the source problems.

use std::collections::BTreeSet;
use std::fmt;

use num::Zero;
use rand::Rng;
use thiserror::Error;

use crate::instance::{
    ClientSpec, DownloadVariant, FlowKind, InstanceError, ModelSpec, Objective, Phase,
    RoutingInstance, UploadVariant, Variant,
};
use crate::rational::{rat, ratio, Rational};
use crate::tvg::{CachePolicy, GraphError, TimeVaryingGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("a formula needs at least one clause")]
    EmptyFormula,
    #[error("clause {clause} uses variable {var}, outside 1..={count}")]
    VariableOutOfRange { clause: usize, var: u32, count: u32 },
    #[error("clause {clause} repeats variable {var}; a clause needs three distinct variables")]
    RepeatedVariable { clause: usize, var: u32 },
    #[error("graph edge ({i}, {j}) touches a vertex outside 1..={count}")]
    VertexOutOfRange { i: u32, j: u32, count: u32 },
    #[error("self-loop on vertex {v}")]
    SelfLoop { v: u32 },
    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: u32, j: u32 },
    #[error("digraph arc ({from}, {to}) touches a node outside 1..={count}")]
    ArcOutOfRange { from: u32, to: u32, count: u32 },
    #[error("duplicate arc ({from}, {to})")]
    DuplicateArc { from: u32, to: u32 },
    #[error("terminals must be four distinct nodes")]
    TerminalsNotDistinct,
    #[error("cover size {size} is outside 1..={vertices}")]
    CoverSizeOutOfRange { size: u32, vertices: u32 },
    #[error("could not sample a formula where every variable occurs in both polarities ({attempts} attempts)")]
    GenerationFailed { attempts: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

// ---------------------------------------------------------------------------
// CNF formulas
// ---------------------------------------------------------------------------

/// A literal: variable `var` (1-based), plain or negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lit {
    pub var: u32,
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: u32) -> Self {
        Lit { var, negated: false }
    }

    pub fn neg(var: u32) -> Self {
        Lit { var, negated: true }
    }

    pub fn complement(self) -> Self {
        Lit { var: self.var, negated: !self.negated }
    }

    /// Truth value under `assignment` (index `var - 1`).
    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[(self.var - 1) as usize] != self.negated
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A CNF formula in which every clause has exactly three literals over three
/// distinct variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    variables: u32,
    clauses: Vec<[Lit; 3]>,
}

impl CnfFormula {
    /// Validate and canonicalize: within each clause, literals are sorted by
    /// variable. Clause order is preserved. An empty clause list is legal
    /// (vacuously satisfiable); the instance builders reject it instead.
    pub fn new(variables: u32, clauses: Vec<[Lit; 3]>) -> Result<Self, ReductionError> {
        let mut canon = Vec::with_capacity(clauses.len());
        for (h, clause) in clauses.into_iter().enumerate() {
            for lit in &clause {
                if lit.var == 0 || lit.var > variables {
                    return Err(ReductionError::VariableOutOfRange {
                        clause: h,
                        var: lit.var,
                        count: variables,
                    });
                }
            }
            let mut c = clause;
            c.sort();
            if c[0].var == c[1].var || c[1].var == c[2].var {
                let var = if c[0].var == c[1].var { c[0].var } else { c[1].var };
                return Err(ReductionError::RepeatedVariable { clause: h, var });
            }
            canon.push(c);
        }
        Ok(CnfFormula { variables, clauses: canon })
    }

    pub fn variables(&self) -> u32 {
        self.variables
    }

    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// Number of clauses satisfied by `assignment` (index `var - 1`).
    pub fn satisfied_count(&self, assignment: &[bool]) -> usize {
        assert_eq!(assignment.len(), self.variables as usize, "assignment length");
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.holds(assignment)))
            .count()
    }

    /// True when every variable `1..=variables` occurs at least once plain
    /// and at least once negated. Formulas failing this admit a polarity
    /// simplification, so generators resample until it holds.
    pub fn is_irreducible(&self) -> bool {
        let n = self.variables as usize;
        let mut plain = vec![false; n];
        let mut negated = vec![false; n];
        for clause in &self.clauses {
            for lit in clause {
                let idx = (lit.var - 1) as usize;
                if lit.negated {
                    negated[idx] = true;
                } else {
                    plain[idx] = true;
                }
            }
        }
        (0..n).all(|i| plain[i] && negated[i])
    }

    /// Sample a formula with `clauses` clauses over `variables` variables,
    /// resampling until it is irreducible.
    pub fn random<R: Rng>(
        variables: u32,
        clauses: usize,
        rng: &mut R,
    ) -> Result<CnfFormula, ReductionError> {
        const ATTEMPTS: u32 = 10_000;
        // Each clause contributes three literal slots; both polarities of
        // every variable need a slot.
        if variables < 3 || 3 * clauses < 2 * variables as usize {
            return Err(ReductionError::GenerationFailed { attempts: 0 });
        }
        for _ in 0..ATTEMPTS {
            let mut list = Vec::with_capacity(clauses);
            for _ in 0..clauses {
                let vars = rand::seq::index::sample(rng, variables as usize, 3);
                let clause = [
                    Lit { var: vars.index(0) as u32 + 1, negated: rng.gen() },
                    Lit { var: vars.index(1) as u32 + 1, negated: rng.gen() },
                    Lit { var: vars.index(2) as u32 + 1, negated: rng.gen() },
                ];
                list.push(clause);
            }
            let formula = CnfFormula::new(variables, list)?;
            if formula.is_irreducible() {
                return Ok(formula);
            }
        }
        Err(ReductionError::GenerationFailed { attempts: ATTEMPTS })
    }

    /// Every irreducible formula with at most `max_variables` variables and
    /// at most `max_clauses` distinct clauses, one representative per
    /// variable-relabeling class. Clause order is immaterial.
    pub fn enumerate_irreducible(max_variables: u32, max_clauses: usize) -> Vec<CnfFormula> {
        let mut out = Vec::new();
        let mut seen: BTreeSet<Vec<[(u32, bool); 3]>> = BTreeSet::new();
        for m in 3..=max_variables {
            // All three-distinct-variable clauses over m variables.
            let mut all_clauses = Vec::new();
            for a in 1..=m {
                for b in (a + 1)..=m {
                    for c in (b + 1)..=m {
                        for signs in 0..8u32 {
                            all_clauses.push([
                                Lit { var: a, negated: signs & 1 != 0 },
                                Lit { var: b, negated: signs & 2 != 0 },
                                Lit { var: c, negated: signs & 4 != 0 },
                            ]);
                        }
                    }
                }
            }
            for n in 1..=max_clauses {
                let mut picks = combinations(all_clauses.len(), n);
                while let Some(pick) = picks.next() {
                    let clauses: Vec<[Lit; 3]> = pick.iter().map(|&i| all_clauses[i]).collect();
                    let formula = CnfFormula::new(m, clauses).expect("enumerated clause is valid");
                    if !formula.is_irreducible() {
                        continue;
                    }
                    if seen.insert(formula.relabeling_key()) {
                        out.push(formula);
                    }
                }
            }
        }
        out
    }

    /// Canonical form under variable renaming: the lexicographically least
    /// sorted clause list over all permutations of the variable names.
    fn relabeling_key(&self) -> Vec<[(u32, bool); 3]> {
        let m = self.variables;
        let mut best: Option<Vec<[(u32, bool); 3]>> = None;
        let mut perm: Vec<u32> = (1..=m).collect();
        permutations(&mut perm, 0, &mut |p| {
            let mut relabeled: Vec<[(u32, bool); 3]> = self
                .clauses
                .iter()
                .map(|clause| {
                    let mut c = [(0u32, false); 3];
                    for (slot, lit) in clause.iter().enumerate() {
                        c[slot] = (p[(lit.var - 1) as usize], lit.negated);
                    }
                    c.sort();
                    c
                })
                .collect();
            relabeled.sort();
            relabeled.dedup();
            match &best {
                Some(b) if *b <= relabeled => {}
                _ => best = Some(relabeled),
            }
        });
        best.expect("at least one permutation")
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (h, clause) in self.clauses.iter().enumerate() {
            if h > 0 {
                write!(f, " & ")?;
            }
            write!(f, "({} | {} | {})", clause[0], clause[1], clause[2])?;
        }
        Ok(())
    }
}

/// Iterator over `n`-element index subsets of `0..len`, ascending.
struct Combinations {
    len: usize,
    current: Vec<usize>,
    done: bool,
}

fn combinations(len: usize, n: usize) -> Combinations {
    Combinations { len, current: (0..n).collect(), done: n > len }
}

impl Combinations {
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let n = self.current.len();
        // Advance: rightmost index that can still move right.
        let mut i = n;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.len - (n - i) {
                self.current[i] += 1;
                for j in (i + 1)..n {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Visit every permutation of `items[at..]` (Heap-style recursion).
fn permutations<T: Clone, F: FnMut(&[T])>(items: &mut Vec<T>, at: usize, visit: &mut F) {
    if at == items.len() {
        visit(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permutations(items, at + 1, visit);
        items.swap(at, i);
    }
}

// ---------------------------------------------------------------------------
// Plain graphs
// ---------------------------------------------------------------------------

/// A simple undirected graph on vertices `1..=vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    vertices: u32,
    edges: Vec<(u32, u32)>,
}

impl UndirectedGraph {
    /// Validate and normalize: every edge stored as `(min, max)`, sorted.
    pub fn new(vertices: u32, edges: Vec<(u32, u32)>) -> Result<Self, ReductionError> {
        let mut norm = Vec::with_capacity(edges.len());
        for (i, j) in edges {
            if i == 0 || i > vertices || j == 0 || j > vertices {
                return Err(ReductionError::VertexOutOfRange { i, j, count: vertices });
            }
            if i == j {
                return Err(ReductionError::SelfLoop { v: i });
            }
            norm.push((i.min(j), i.max(j)));
        }
        norm.sort();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(ReductionError::DuplicateEdge { i: w[0].0, j: w[0].1 });
        }
        Ok(UndirectedGraph { vertices, edges: norm })
    }

    pub fn vertices(&self) -> u32 {
        self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All `2^(V choose 2)` labeled simple graphs on exactly `vertices`
    /// vertices.
    pub fn enumerate(vertices: u32) -> Vec<UndirectedGraph> {
        let mut pairs = Vec::new();
        for i in 1..=vertices {
            for j in (i + 1)..=vertices {
                pairs.push((i, j));
            }
        }
        let total = 1u64 << pairs.len();
        (0..total)
            .map(|mask| {
                let edges = pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, e)| *e)
                    .collect();
                UndirectedGraph::new(vertices, edges).expect("enumerated edges are valid")
            })
            .collect()
    }
}

/// A simple directed graph on nodes `1..=nodes` (no self-loops, no duplicate
/// arcs; antiparallel pairs are fine).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDigraph {
    nodes: u32,
    arcs: Vec<(u32, u32)>,
}

impl InputDigraph {
    pub fn new(nodes: u32, arcs: Vec<(u32, u32)>) -> Result<Self, ReductionError> {
        let mut sorted = arcs;
        sorted.sort();
        for (from, to) in &sorted {
            if *from == 0 || *from > nodes || *to == 0 || *to > nodes {
                return Err(ReductionError::ArcOutOfRange { from: *from, to: *to, count: nodes });
            }
            if from == to {
                return Err(ReductionError::SelfLoop { v: *from });
            }
        }
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ReductionError::DuplicateArc { from: w[0].0, to: w[0].1 });
        }
        Ok(InputDigraph { nodes, arcs: sorted })
    }

    pub fn nodes(&self) -> u32 {
        self.nodes
    }

    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

/// How to read a routing answer back as an answer to the encoded problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecisionRule {
    /// Yes iff a feasible routing exists within the instance horizon.
    FeasibleWithinHorizon,
    /// Yes iff some feasible client subset reaches this size (utilities are
    /// all one, so optimal total utility = largest feasible subset).
    SelectedAtLeast(u64),
    /// The optimal total utility equals `base` plus the answer count of the
    /// encoded maximization problem.
    UtilityOffsetCount { base: Rational },
    /// The encoded question is answered without routing; the instance is a
    /// well-formed placeholder.
    TriviallyYes,
}

/// A routing instance encoding a decision problem, plus the read-back rule.
#[derive(Debug, Clone)]
pub struct ReductionArtifact {
    /// Family tag, e.g. `"3sat-1sfws"`; matches the CLI name.
    pub family: &'static str,
    pub instance: RoutingInstance,
    pub decision: DecisionRule,
    /// Human-readable description of the encoding (node roles, thresholds).
    pub notes: Vec<String>,
}

// ---------------------------------------------------------------------------
// 3SAT → single splittable model, weighted-sum objective
// ---------------------------------------------------------------------------

/// Hub capacity that leaves spare `n/(n+1)` after one unit is taken: enough
/// to top up every clause gate fed by the idle side. The equivalence proof
/// goes through with this value.
pub fn hub_capacity_wide(clause_count: usize) -> Rational {
    let n = clause_count as i64;
    ratio(2 * n + 1, n + 1)
}

/// Hub capacity that leaves spare `1/n` after one unit is taken. Kept as an
/// alternative setting so the two can be compared experimentally.
pub fn hub_capacity_tight(clause_count: usize) -> Rational {
    let n = clause_count as i64;
    ratio(n + 1, n)
}

/// Encode a formula as a 1-SF-WS instance over two snapshots.
///
/// Layout (satellite numbers): server `1`; per variable `ℓ` a hub `1+ℓ`
/// feeding a plain-literal node `1+m+ℓ` and a negated-literal node `1+2m+ℓ`
/// via unit arcs; per clause `h` a node `1+3m+h`. The hub wiring persists in
/// both snapshots. Clause nodes are reachable only in snapshot 1: a direct
/// server arc of capacity `n/(n+1)` plus, for each literal in the clause, an
/// arc of capacity `1/(n+1)` from that literal's *complement* node. All
/// `2m+n` literal and clause nodes are unit-weight clients of one unit-size
/// model.
///
/// The formula is satisfiable iff every client can be served within the two
/// snapshots: one literal node per variable takes the model in snapshot 1
/// (the truth assignment), its sibling waits for snapshot 2, and the spare
/// hub capacity tops up exactly the clause nodes whose clauses the
/// assignment satisfies.
pub fn sat_to_1sfws(
    formula: &CnfFormula,
    hub_capacity: Option<Rational>,
) -> Result<ReductionArtifact, ReductionError> {
    if formula.clause_count() == 0 {
        return Err(ReductionError::EmptyFormula);
    }
    let m = formula.variables();
    let n = formula.clause_count();
    let hub_cap = hub_capacity.unwrap_or_else(|| hub_capacity_wide(n));
    let direct_cap = ratio(n as i64, n as i64 + 1);
    let gate_cap = ratio(1, n as i64 + 1);

    let server = 1u32;
    let hub = |l: u32| 1 + l;
    let plain = |l: u32| 1 + m + l;
    let negated = |l: u32| 1 + 2 * m + l;
    let clause_node = |h: u32| 1 + 3 * m + h;
    let satellites = 1 + 3 * m + n as u32;

    let mut tvg = TimeVaryingGraph::empty(satellites, 2, CachePolicy::Auto);
    for l in 1..=m {
        for k in 1..=2 {
            tvg.add_link(server, hub(l), k, hub_cap.clone(), rat(0))?;
            tvg.add_link(hub(l), plain(l), k, rat(1), rat(0))?;
            tvg.add_link(hub(l), negated(l), k, rat(1), rat(0))?;
        }
    }
    for (h, clause) in formula.clauses().iter().enumerate() {
        let node = clause_node(h as u32 + 1);
        tvg.add_link(server, node, 1, direct_cap.clone(), rat(0))?;
        for lit in clause {
            let source = if lit.negated { plain(lit.var) } else { negated(lit.var) };
            tvg.add_link(source, node, 1, gate_cap.clone(), rat(0))?;
        }
    }

    let mut clients = Vec::new();
    for l in 1..=m {
        clients.push(ClientSpec::new(plain(l)));
        clients.push(ClientSpec::new(negated(l)));
    }
    for h in 1..=n as u32 {
        clients.push(ClientSpec::new(clause_node(h)));
    }
    let model = ModelSpec { size: rat(1), server, clients };
    let variant = Variant::Download(DownloadVariant::unicast(
        1,
        FlowKind::Splittable,
        Objective::WeightedSum,
    ));
    let instance = RoutingInstance::new(Phase::Download, tvg, vec![model], variant)?;

    Ok(ReductionArtifact {
        family: "3sat-1sfws",
        instance,
        decision: DecisionRule::FeasibleWithinHorizon,
        notes: vec![
            format!("{m} variables, {n} clauses; clients: {} (2m literal + n clause nodes)", 2 * m + n as u32),
            format!("hub capacity {hub_cap}; clause gates vanish after snapshot 1"),
            "yes iff every client is served within the 2-snapshot horizon".to_string(),
        ],
    })
}

// ---------------------------------------------------------------------------
// 3SAT → two unsplittable models, min-max objective
// ---------------------------------------------------------------------------

/// Encode a formula as a 2-UF-MM instance with a single snapshot.
///
/// Layout: server `1`; per variable `ℓ` a plain node `1+ℓ`, a negated node
/// `1+m+ℓ`, and a big-model client `1+2m+ℓ` reachable through either literal
/// node over capacity-`n` arcs; per clause `h` a small-model client `1+3m+h`
/// with a unit arc from each literal node whose literal is in the clause.
/// The big model has size `n`, the small model size 1, both at the server.
///
/// The unsplittable big copy for `v_ℓ` saturates one literal side entirely;
/// the free side is the true literal, and a clause client can be fed only
/// through a true literal it contains — so routing everything in one
/// snapshot is possible iff the formula is satisfiable.
pub fn sat_to_2ufmm(formula: &CnfFormula) -> Result<ReductionArtifact, ReductionError> {
    let (tvg, big_clients, small_clients, n) = sat_two_model_topology(formula, Direction::FromServer)?;
    let models = vec![
        ModelSpec {
            size: rat(n as i64),
            server: 1,
            clients: big_clients.into_iter().map(ClientSpec::new).collect(),
        },
        ModelSpec {
            size: rat(1),
            server: 1,
            clients: small_clients.into_iter().map(ClientSpec::new).collect(),
        },
    ];
    let variant =
        Variant::Download(DownloadVariant::unicast(2, FlowKind::Unsplittable, Objective::MinMax));
    let instance = RoutingInstance::new(Phase::Download, tvg, models, variant)?;
    Ok(ReductionArtifact {
        family: "3sat-2ufmm",
        instance,
        decision: DecisionRule::FeasibleWithinHorizon,
        notes: vec![
            format!(
                "{} variables, {n} clauses; big model size {n} to per-variable clients, unit model to clause clients",
                formula.variables()
            ),
            "yes iff both models can be routed in the single snapshot".to_string(),
        ],
    })
}

enum Direction {
    FromServer,
    ToServer,
}

/// Shared single-snapshot topology for the two-model formula encodings:
/// per-variable literal lanes of capacity `n` and unit clause gates, oriented
/// away from or toward the server.
fn sat_two_model_topology(
    formula: &CnfFormula,
    direction: Direction,
) -> Result<(TimeVaryingGraph, Vec<u32>, Vec<u32>, usize), ReductionError> {
    if formula.clause_count() == 0 {
        return Err(ReductionError::EmptyFormula);
    }
    let m = formula.variables();
    let n = formula.clause_count();
    let lane_cap = rat(n as i64);

    let server = 1u32;
    let plain = |l: u32| 1 + l;
    let negated = |l: u32| 1 + m + l;
    let big = |l: u32| 1 + 2 * m + l;
    let clause_node = |h: u32| 1 + 3 * m + h;
    let satellites = 1 + 3 * m + n as u32;

    let mut tvg = TimeVaryingGraph::empty(satellites, 1, CachePolicy::Auto);
    let mut link = |from: u32, to: u32, cap: Rational| -> Result<(), ReductionError> {
        match direction {
            Direction::FromServer => tvg.add_link(from, to, 1, cap, rat(0))?,
            Direction::ToServer => tvg.add_link(to, from, 1, cap, rat(0))?,
        }
        Ok(())
    };
    for l in 1..=m {
        link(server, plain(l), lane_cap.clone())?;
        link(plain(l), big(l), lane_cap.clone())?;
        link(server, negated(l), lane_cap.clone())?;
        link(negated(l), big(l), lane_cap.clone())?;
    }
    for (h, clause) in formula.clauses().iter().enumerate() {
        let node = clause_node(h as u32 + 1);
        for lit in clause {
            let source = if lit.negated { negated(lit.var) } else { plain(lit.var) };
            link(source, node, rat(1))?;
        }
    }

    let big_clients = (1..=m).map(big).collect();
    let small_clients = (1..=n as u32).map(clause_node).collect();
    Ok((tvg, big_clients, small_clients, n))
}

// ---------------------------------------------------------------------------
// 3SAT → two-model collection feasibility; MAX-3SAT → collection with
// client selection
// ---------------------------------------------------------------------------

/// Encode a formula as a 2-UF-NCS instance: the two-model topology of
/// [`sat_to_2ufmm`] with every arc reversed, all clients ready at snapshot 1,
/// horizon 1. Collection is feasible iff the formula is satisfiable.
pub fn sat_to_2ufncs(formula: &CnfFormula) -> Result<ReductionArtifact, ReductionError> {
    let (tvg, big_clients, small_clients, n) = sat_two_model_topology(formula, Direction::ToServer)?;
    let models = vec![
        ModelSpec {
            size: rat(n as i64),
            server: 1,
            clients: big_clients.into_iter().map(ClientSpec::new).collect(),
        },
        ModelSpec {
            size: rat(1),
            server: 1,
            clients: small_clients.into_iter().map(ClientSpec::new).collect(),
        },
    ];
    let variant = Variant::Upload(UploadVariant::new(2, FlowKind::Unsplittable, false));
    let instance = RoutingInstance::new(Phase::Upload, tvg, models, variant)?;
    Ok(ReductionArtifact {
        family: "3sat-2ufncs",
        instance,
        decision: DecisionRule::FeasibleWithinHorizon,
        notes: vec![
            format!("{} variables, {n} clauses; reversed literal lanes, single snapshot", formula.variables()),
            "yes iff every client can deliver its update in the single snapshot".to_string(),
        ],
    })
}

/// Encode a formula as a 2-UF-CS instance: the reversed topology of
/// [`sat_to_2ufncs`] with utilities `n+1` for each big-model client and `1`
/// for each clause client.
///
/// Selecting a big-model client is always worth more than every clause
/// combined, so an optimal selection takes all `m` of them; the remaining
/// capacity serves exactly the clause clients a best assignment satisfies.
/// Optimal total utility = `m(n+1)` + (max satisfiable clause count).
pub fn max3sat_to_2ufcs(formula: &CnfFormula) -> Result<ReductionArtifact, ReductionError> {
    let (tvg, big_clients, small_clients, n) = sat_two_model_topology(formula, Direction::ToServer)?;
    let m = formula.variables();
    let big_utility = rat(n as i64 + 1);
    let models = vec![
        ModelSpec {
            size: rat(n as i64),
            server: 1,
            clients: big_clients
                .into_iter()
                .map(|c| ClientSpec::new(c).with_utility(big_utility.clone()))
                .collect(),
        },
        ModelSpec {
            size: rat(1),
            server: 1,
            clients: small_clients.into_iter().map(ClientSpec::new).collect(),
        },
    ];
    let variant = Variant::Upload(UploadVariant::new(2, FlowKind::Unsplittable, true));
    let instance = RoutingInstance::new(Phase::Upload, tvg, models, variant)?;
    let base = rat(m as i64) * big_utility;
    Ok(ReductionArtifact {
        family: "max3sat-2ufcs",
        instance,
        decision: DecisionRule::UtilityOffsetCount { base: base.clone() },
        notes: vec![
            format!("{m} variables, {n} clauses; utilities {} per big client, 1 per clause client", n + 1),
            format!("optimal utility = {base} + max satisfiable clause count"),
        ],
    })
}

// ---------------------------------------------------------------------------
// Vertex cover → single-model collection with client selection
// ---------------------------------------------------------------------------

/// Encode "does `graph` have a vertex cover of size `cover_size`?" as a
/// 1-SF-CS instance with a single snapshot.
///
/// Layout: server `1`, relief node `2`, a client node `2+v` per vertex, a
/// gate node `2+V+e` per edge. Each vertex node reaches the gates of its
/// incident edges and the relief node over capacity-`E` arcs; each gate
/// reaches the server over a unit arc; the relief node reaches the server
/// over capacity `(cover_size−1)·E`. Every client uploads `E` units with
/// utility 1.
///
/// Total server-side capacity is exactly `cover_size·E`, and the unit gate
/// arcs can absorb the last `E` units only if every gate is fed — i.e. the
/// selected vertices cover every edge. So `cover_size` clients are
/// simultaneously routable iff a cover of that size exists.
///
/// An edgeless graph is covered by the empty set; the encoding needs at
/// least one edge, so that case returns a placeholder instance with
/// [`DecisionRule::TriviallyYes`].
pub fn mvc_to_1sfcs(
    graph: &UndirectedGraph,
    cover_size: u32,
) -> Result<ReductionArtifact, ReductionError> {
    let v_count = graph.vertices();
    if cover_size == 0 || cover_size > v_count {
        return Err(ReductionError::CoverSizeOutOfRange { size: cover_size, vertices: v_count });
    }
    let e_count = graph.edge_count() as u32;

    if e_count == 0 {
        // Nothing to cover: any vertex set works. Emit a minimal well-formed
        // instance so downstream plumbing still has something to validate.
        let mut tvg = TimeVaryingGraph::empty(2, 1, CachePolicy::Auto);
        tvg.add_link(2, 1, 1, rat(1), rat(0))?;
        let model = ModelSpec { size: rat(1), server: 1, clients: vec![ClientSpec::new(2)] };
        let variant = Variant::Upload(UploadVariant::new(1, FlowKind::Splittable, true));
        let instance = RoutingInstance::new(Phase::Upload, tvg, vec![model], variant)?;
        return Ok(ReductionArtifact {
            family: "mvc-1sfcs",
            instance,
            decision: DecisionRule::TriviallyYes,
            notes: vec!["the graph has no edges; the empty set covers it".to_string()],
        });
    }

    let server = 1u32;
    let relief = 2u32;
    let vertex_node = |v: u32| 2 + v;
    let gate = |e: u32| 2 + v_count + e;
    let satellites = 2 + v_count + e_count;
    let lane_cap = rat(e_count as i64);

    let mut tvg = TimeVaryingGraph::empty(satellites, 1, CachePolicy::Auto);
    for (idx, (i, j)) in graph.edges().iter().enumerate() {
        let g = gate(idx as u32 + 1);
        tvg.add_link(vertex_node(*i), g, 1, lane_cap.clone(), rat(0))?;
        tvg.add_link(vertex_node(*j), g, 1, lane_cap.clone(), rat(0))?;
        tvg.add_link(g, server, 1, rat(1), rat(0))?;
    }
    for v in 1..=v_count {
        tvg.add_link(vertex_node(v), relief, 1, lane_cap.clone(), rat(0))?;
    }
    let relief_cap = rat((cover_size as i64 - 1) * e_count as i64);
    if !relief_cap.is_zero() {
        tvg.add_link(relief, server, 1, relief_cap, rat(0))?;
    }

    let clients = (1..=v_count).map(|v| ClientSpec::new(vertex_node(v))).collect();
    let model = ModelSpec { size: lane_cap, server, clients };
    let variant = Variant::Upload(UploadVariant::new(1, FlowKind::Splittable, true));
    let instance = RoutingInstance::new(Phase::Upload, tvg, vec![model], variant)?;

    Ok(ReductionArtifact {
        family: "mvc-1sfcs",
        instance,
        decision: DecisionRule::SelectedAtLeast(cover_size as u64),
        notes: vec![
            format!("{v_count} vertices, {e_count} edges; asking for a cover of size {cover_size}"),
            format!("each client uploads {e_count} units; yes iff {cover_size} clients are simultaneously routable"),
        ],
    })
}

// ---------------------------------------------------------------------------
// Two arc-disjoint paths → two-model multicast with separate servers
// ---------------------------------------------------------------------------

/// Encode "does `digraph` contain arc-disjoint paths `o1→d1` and `o2→d2`?"
/// as a separate-server mul-2-MM instance: the digraph becomes a single
/// snapshot with unit arc capacities, model 1 (size 1) lives at `o1` with
/// sole client `d1`, model 2 at `o2` with sole client `d2`. With one client
/// each, a delivery tree degenerates to a path, and unit capacities forbid
/// sharing an arc — so both models can be routed in the single snapshot iff
/// the disjoint paths exist. The four terminals must be distinct.
pub fn edp_to_mul2mm(
    digraph: &InputDigraph,
    origin1: u32,
    dest1: u32,
    origin2: u32,
    dest2: u32,
) -> Result<ReductionArtifact, ReductionError> {
    let nodes = digraph.nodes();
    let terminals = [origin1, dest1, origin2, dest2];
    for t in terminals {
        if t == 0 || t > nodes {
            return Err(ReductionError::ArcOutOfRange { from: t, to: t, count: nodes });
        }
    }
    for a in 0..4 {
        for b in (a + 1)..4 {
            if terminals[a] == terminals[b] {
                return Err(ReductionError::TerminalsNotDistinct);
            }
        }
    }

    let mut tvg = TimeVaryingGraph::empty(nodes, 1, CachePolicy::Auto);
    for (from, to) in digraph.arcs() {
        tvg.add_link(*from, *to, 1, rat(1), rat(0))?;
    }
    let models = vec![
        ModelSpec { size: rat(1), server: origin1, clients: vec![ClientSpec::new(dest1)] },
        ModelSpec { size: rat(1), server: origin2, clients: vec![ClientSpec::new(dest2)] },
    ];
    let variant =
        Variant::Download(DownloadVariant::multicast(2, Objective::MinMax).with_separate_servers());
    let instance = RoutingInstance::new(Phase::Download, tvg, models, variant)?;

    Ok(ReductionArtifact {
        family: "2edp-mul2mm",
        instance,
        decision: DecisionRule::FeasibleWithinHorizon,
        notes: vec![
            format!("{nodes} nodes, {} unit-capacity arcs; terminals {origin1}→{dest1}, {origin2}→{dest2}", digraph.arcs().len()),
            "yes iff both single-client trees fit in the snapshot without sharing an arc".to_string(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ServerMode;
    use crate::tvg::SatNode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixture_formula() -> CnfFormula {
        // (x1 | x2 | x3) & (~x1 | ~x2 | x3) & (x1 | ~x2 | ~x3)
        CnfFormula::new(
            3,
            vec![
                [Lit::pos(1), Lit::pos(2), Lit::pos(3)],
                [Lit::neg(1), Lit::neg(2), Lit::pos(3)],
                [Lit::pos(1), Lit::neg(2), Lit::neg(3)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_formulas_are_legal_but_not_encodable() {
        let f = CnfFormula::new(0, vec![]).unwrap();
        assert_eq!(f.clause_count(), 0);
        assert_eq!(f.satisfied_count(&[]), 0);
        assert_eq!(sat_to_1sfws(&f, None).unwrap_err(), ReductionError::EmptyFormula);
        assert_eq!(sat_to_2ufmm(&f).unwrap_err(), ReductionError::EmptyFormula);
        assert_eq!(sat_to_2ufncs(&f).unwrap_err(), ReductionError::EmptyFormula);
        assert_eq!(max3sat_to_2ufcs(&f).unwrap_err(), ReductionError::EmptyFormula);
    }

    #[test]
    fn clause_with_repeated_variable_is_rejected() {
        let err = CnfFormula::new(3, vec![[Lit::pos(1), Lit::neg(1), Lit::pos(2)]]).unwrap_err();
        assert_eq!(err, ReductionError::RepeatedVariable { clause: 0, var: 1 });
    }

    #[test]
    fn out_of_range_variable_is_rejected() {
        let err = CnfFormula::new(2, vec![[Lit::pos(1), Lit::pos(2), Lit::pos(3)]]).unwrap_err();
        assert_eq!(err, ReductionError::VariableOutOfRange { clause: 0, var: 3, count: 2 });
    }

    #[test]
    fn irreducibility_requires_both_polarities_everywhere() {
        let f = fixture_formula();
        assert!(f.is_irreducible());
        // x3 never appears negated here.
        let g = CnfFormula::new(
            3,
            vec![
                [Lit::pos(1), Lit::pos(2), Lit::pos(3)],
                [Lit::neg(1), Lit::neg(2), Lit::pos(3)],
            ],
        )
        .unwrap();
        assert!(!g.is_irreducible());
    }

    #[test]
    fn satisfied_count_walks_all_clauses() {
        let f = fixture_formula();
        assert_eq!(f.satisfied_count(&[true, true, true]), 3);
        // x1=x2=true, x3=false falsifies exactly (~x1 | ~x2 | x3).
        assert_eq!(f.satisfied_count(&[true, true, false]), 2);
    }

    #[test]
    fn random_formulas_are_irreducible_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = CnfFormula::random(4, 5, &mut rng).unwrap();
        assert!(f.is_irreducible());
        assert_eq!(f.clause_count(), 5);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let g = CnfFormula::random(4, 5, &mut rng2).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn random_formula_rejects_hopeless_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Two clauses give six literal slots; five variables need ten.
        assert!(matches!(
            CnfFormula::random(5, 2, &mut rng),
            Err(ReductionError::GenerationFailed { .. })
        ));
    }

    // Hand count for the enumeration, done over sign patterns rather than
    // through the enumerator: a clause over exactly the variables {1,2,3} is
    // one of 8 sign patterns. Two distinct clauses expose both polarities of
    // every variable iff they are complements: 4 unordered pairs, which
    // collapse to 2 classes under variable renaming. For three clauses,
    // inclusion-exclusion over "some variable has constant polarity" leaves
    // 32 labeled sets, and Burnside over the 6 renamings (32, 8 per swap,
    // 2 per 3-cycle) gives (32 + 24 + 4)/6 = 10 classes. One clause cannot
    // show both polarities of anything.
    #[test]
    fn enumeration_matches_hand_count() {
        let all = CnfFormula::enumerate_irreducible(3, 3);
        assert_eq!(all.len(), 12);
        assert_eq!(all.iter().filter(|f| f.clause_count() == 2).count(), 2);
        assert_eq!(all.iter().filter(|f| f.clause_count() == 3).count(), 10);
        for f in &all {
            assert!(f.is_irreducible());
            assert_eq!(f.variables(), 3);
        }
    }

    #[test]
    fn enumeration_deduplicates_relabelings() {
        let all = CnfFormula::enumerate_irreducible(3, 2);
        // The two classes: a complement pair with 0/3 positive signs, and
        // one with 1/2.
        assert_eq!(all.len(), 2);
        let keys: BTreeSet<_> = all.iter().map(|f| f.relabeling_key()).collect();
        assert_eq!(keys.len(), 2);
    }

    #[test]
    fn undirected_graph_normalizes_and_validates() {
        let g = UndirectedGraph::new(4, vec![(3, 1), (2, 4)]).unwrap();
        assert_eq!(g.edges(), &[(1, 3), (2, 4)]);
        assert!(matches!(
            UndirectedGraph::new(3, vec![(1, 1)]),
            Err(ReductionError::SelfLoop { v: 1 })
        ));
        assert!(matches!(
            UndirectedGraph::new(3, vec![(1, 2), (2, 1)]),
            Err(ReductionError::DuplicateEdge { i: 1, j: 2 })
        ));
        assert!(matches!(
            UndirectedGraph::new(3, vec![(1, 4)]),
            Err(ReductionError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn graph_enumeration_counts_match() {
        assert_eq!(UndirectedGraph::enumerate(1).len(), 1);
        assert_eq!(UndirectedGraph::enumerate(3).len(), 8);
        assert_eq!(UndirectedGraph::enumerate(4).len(), 64);
    }

    #[test]
    fn sfws_gadget_has_expected_shape() {
        let f = fixture_formula();
        let art = sat_to_1sfws(&f, None).unwrap();
        let inst = &art.instance;
        let (m, n) = (3u32, 3u32);
        assert_eq!(inst.tvg.satellite_count(), 1 + 3 * m + n);
        assert_eq!(inst.tvg.snapshot_count(), 2);
        // Persistent wiring: 3 arcs per variable per snapshot.
        let snap = |k: u32| {
            inst.tvg
                .intra_arcs()
                .iter()
                .filter(|a| a.from.snapshot() == Some(k))
                .count() as u32
        };
        assert_eq!(snap(1), 3 * m + 4 * n);
        assert_eq!(snap(2), 3 * m);
        // Capacities: hub (2n+1)/(n+1), direct n/(n+1), gates 1/(n+1).
        let caps: BTreeSet<Rational> =
            inst.tvg.intra_arcs().iter().map(|a| a.capacity.clone()).collect();
        assert!(caps.contains(&ratio(7, 4)));
        assert!(caps.contains(&ratio(3, 4)));
        assert!(caps.contains(&ratio(1, 4)));
        assert!(caps.contains(&rat(1)));
        assert_eq!(inst.models[0].clients.len(), (2 * m + n) as usize);
        assert_eq!(art.decision, DecisionRule::FeasibleWithinHorizon);
    }

    #[test]
    fn sfws_gates_come_from_complement_nodes() {
        // Single-purpose formula so arc sources are easy to predict.
        let f = fixture_formula();
        let art = sat_to_1sfws(&f, None).unwrap();
        // Clause 1 is (x1 | x2 | x3): its gates come from the negated nodes
        // 1+2m+ℓ = 8, 9, 10; clause node is 1+3m+1 = 11.
        let gates: BTreeSet<u32> = art
            .instance
            .tvg
            .intra_arcs()
            .iter()
            .filter(|a| a.to == SatNode::sat(11, 1) && a.capacity == ratio(1, 4))
            .map(|a| a.from.satellite().unwrap())
            .collect();
        assert_eq!(gates, BTreeSet::from([8, 9, 10]));
    }

    #[test]
    fn hub_capacity_variants_differ() {
        assert_eq!(hub_capacity_wide(3), ratio(7, 4));
        assert_eq!(hub_capacity_tight(3), ratio(4, 3));
        let f = fixture_formula();
        let tight = sat_to_1sfws(&f, Some(hub_capacity_tight(3))).unwrap();
        let caps: BTreeSet<Rational> =
            tight.instance.tvg.intra_arcs().iter().map(|a| a.capacity.clone()).collect();
        assert!(caps.contains(&ratio(4, 3)));
        assert!(!caps.contains(&ratio(7, 4)));
    }

    #[test]
    fn two_model_gadget_counts_and_sizes() {
        let f = fixture_formula();
        let art = sat_to_2ufmm(&f).unwrap();
        let inst = &art.instance;
        let (m, n) = (3u32, 3usize);
        assert_eq!(inst.tvg.satellite_count(), 1 + 3 * m + n as u32);
        assert_eq!(inst.tvg.snapshot_count(), 1);
        assert_eq!(inst.tvg.intra_arcs().len(), (4 * m) as usize + 3 * n);
        assert_eq!(inst.models[0].size, rat(3));
        assert_eq!(inst.models[1].size, rat(1));
        assert_eq!(inst.models[0].clients.len(), m as usize);
        assert_eq!(inst.models[1].clients.len(), n);
    }

    #[test]
    fn collection_gadget_reverses_every_arc() {
        let f = fixture_formula();
        let down = sat_to_2ufmm(&f).unwrap();
        let up = sat_to_2ufncs(&f).unwrap();
        let forward: BTreeSet<(SatNode, SatNode)> =
            down.instance.tvg.intra_arcs().iter().map(|a| (a.from, a.to)).collect();
        let reversed: BTreeSet<(SatNode, SatNode)> =
            up.instance.tvg.intra_arcs().iter().map(|a| (a.to, a.from)).collect();
        assert_eq!(forward, reversed);
        assert_eq!(up.instance.phase, Phase::Upload);
        assert!(up.instance.models.iter().all(|m| m.clients.iter().all(|c| c.start == 1)));
    }

    #[test]
    fn selection_gadget_sets_utilities_and_base() {
        let f = fixture_formula();
        let art = max3sat_to_2ufcs(&f).unwrap();
        let inst = &art.instance;
        assert!(inst.models[0].clients.iter().all(|c| c.utility == rat(4)));
        assert!(inst.models[1].clients.iter().all(|c| c.utility == rat(1)));
        assert_eq!(art.decision, DecisionRule::UtilityOffsetCount { base: rat(12) });
    }

    #[test]
    fn cover_gadget_shape_and_capacities() {
        // Triangle plus a pendant vertex.
        let g = UndirectedGraph::new(4, vec![(1, 2), (2, 3), (1, 3), (3, 4)]).unwrap();
        let art = mvc_to_1sfcs(&g, 2).unwrap();
        let inst = &art.instance;
        let (v, e) = (4u32, 4u32);
        assert_eq!(inst.tvg.satellite_count(), 2 + v + e);
        // 3 arcs per edge + 1 relief arc per vertex + relief→server.
        assert_eq!(inst.tvg.intra_arcs().len(), (3 * e + v + 1) as usize);
        assert_eq!(inst.models[0].size, rat(4));
        let relief_cap = inst
            .tvg
            .intra_arcs()
            .iter()
            .find(|a| a.from == SatNode::sat(2, 1) && a.to == SatNode::sat(1, 1))
            .map(|a| a.capacity.clone());
        assert_eq!(relief_cap, Some(rat(4)));
        assert_eq!(art.decision, DecisionRule::SelectedAtLeast(2));
    }

    #[test]
    fn cover_size_one_drops_relief_outlet() {
        let g = UndirectedGraph::new(3, vec![(1, 2), (2, 3)]).unwrap();
        let art = mvc_to_1sfcs(&g, 1).unwrap();
        let has_relief_out = art
            .instance
            .tvg
            .intra_arcs()
            .iter()
            .any(|a| a.from == SatNode::sat(2, 1) && a.to == SatNode::sat(1, 1));
        assert!(!has_relief_out);
    }

    #[test]
    fn edgeless_cover_is_trivially_yes() {
        let g = UndirectedGraph::new(3, vec![]).unwrap();
        let art = mvc_to_1sfcs(&g, 2).unwrap();
        assert_eq!(art.decision, DecisionRule::TriviallyYes);
        art.instance.validate().unwrap();
    }

    #[test]
    fn cover_size_bounds_are_enforced() {
        let g = UndirectedGraph::new(3, vec![(1, 2)]).unwrap();
        assert!(matches!(
            mvc_to_1sfcs(&g, 0),
            Err(ReductionError::CoverSizeOutOfRange { .. })
        ));
        assert!(matches!(
            mvc_to_1sfcs(&g, 4),
            Err(ReductionError::CoverSizeOutOfRange { .. })
        ));
    }

    #[test]
    fn disjoint_path_gadget_uses_separate_servers() {
        let d = InputDigraph::new(5, vec![(1, 3), (3, 2), (2, 3), (3, 4), (1, 5), (5, 4)]).unwrap();
        let art = edp_to_mul2mm(&d, 1, 4, 2, 5).unwrap();
        let inst = &art.instance;
        assert_eq!(inst.variant.servers(), ServerMode::Separate);
        assert_eq!(inst.models[0].server, 1);
        assert_eq!(inst.models[1].server, 2);
        assert!(inst.tvg.intra_arcs().iter().all(|a| a.capacity == rat(1)));
        assert_eq!(inst.tvg.intra_arcs().len(), 6);
    }

    #[test]
    fn disjoint_path_gadget_rejects_shared_terminals() {
        let d = InputDigraph::new(4, vec![(1, 2), (2, 3), (3, 4)]).unwrap();
        assert!(matches!(
            edp_to_mul2mm(&d, 1, 4, 1, 3),
            Err(ReductionError::TerminalsNotDistinct)
        ));
    }

    #[test]
    fn digraph_validation_rejects_duplicates_and_loops() {
        assert!(matches!(
            InputDigraph::new(3, vec![(1, 2), (1, 2)]),
            Err(ReductionError::DuplicateArc { from: 1, to: 2 })
        ));
        assert!(matches!(
            InputDigraph::new(3, vec![(2, 2)]),
            Err(ReductionError::SelfLoop { v: 2 })
        ));
        // Antiparallel arcs are legal.
        assert!(InputDigraph::new(3, vec![(1, 2), (2, 1)]).is_ok());
    }
}
