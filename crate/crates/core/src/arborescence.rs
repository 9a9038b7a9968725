//! Minimum-cost spanning arborescences (Chu-Liu/Edmonds) and pruning of
//! non-terminal branches.
//!
//! The contraction loop is iterative with an explicit expansion stack rather
//! than recursive, so deeply chained graphs (long cache chains over many
//! snapshots) cannot overflow the call stack. Ties among equal-cost incoming
//! arcs are broken toward the arc whose tail has the smaller node index in
//! the *original* graph, then toward the smaller arc index, which keeps the
//! output deterministic across contraction rounds.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::Zero;
use thiserror::Error;

use crate::rational::Rational;

/// Arc list digraph with rational costs.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    pub nodes: usize,
    /// `(from, to, cost)` triples; parallel arcs are allowed.
    pub arcs: Vec<(usize, usize, Rational)>,
}

impl Digraph {
    pub fn new(nodes: usize) -> Self {
        Digraph { nodes, arcs: Vec::new() }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cost: Rational) {
        assert!(from < self.nodes && to < self.nodes, "arc endpoint out of bounds");
        self.arcs.push((from, to, cost));
    }
}

/// The arc of an [`Arborescence`] entering one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeArc {
    pub from: usize,
    /// Index into the source digraph's arc list.
    pub arc: usize,
    pub cost: Rational,
}

/// A rooted spanning tree of arcs directed away from the root: every
/// non-root node has exactly one incoming arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arborescence {
    pub root: usize,
    /// node → its unique incoming arc.
    pub parent: BTreeMap<usize, TreeArc>,
    pub total_cost: Rational,
}

impl Arborescence {
    /// All nodes of the tree, root included.
    pub fn nodes(&self) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = self.parent.keys().copied().collect();
        out.insert(self.root);
        out
    }

    /// Nodes with no outgoing tree arc.
    pub fn leaves(&self) -> BTreeSet<usize> {
        let mut out = self.nodes();
        for arc in self.parent.values() {
            out.remove(&arc.from);
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArborescenceError {
    #[error("node {0} is not reachable from the root")]
    UnreachableNode(usize),
    #[error("terminal {0} is not a node of the arborescence")]
    TerminalNotInTree(usize),
}

/// An arc in one contraction round, remembering which input arc it stands for.
#[derive(Debug, Clone)]
struct RoundArc {
    from: usize,
    to: usize,
    cost: Rational,
    orig: usize,
}

/// One contracted cycle: its members (round-local ids) and the arc each
/// member had chosen, which re-enters the solution during expansion.
#[derive(Debug)]
struct CycleRecord {
    members: Vec<usize>,
    chosen: Vec<usize>,
}

/// Compute a minimum-total-cost arborescence rooted at `root` spanning every
/// node of `g`. Costs may be negative; parallel arcs are fine.
pub fn min_cost_arborescence(g: &Digraph, root: usize) -> Result<Arborescence, ArborescenceError> {
    assert!(root < g.nodes, "root out of bounds");
    // Reachability precheck so the failure names the offending node.
    let mut reach = vec![false; g.nodes];
    reach[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.nodes];
    for (a, &(from, to, _)) in g.arcs.iter().enumerate() {
        adj[from].push(a);
        let _ = to;
    }
    while let Some(v) = queue.pop_front() {
        for &a in &adj[v] {
            let to = g.arcs[a].1;
            if !reach[to] {
                reach[to] = true;
                queue.push_back(to);
            }
        }
    }
    if let Some(v) = (0..g.nodes).find(|&v| !reach[v]) {
        return Err(ArborescenceError::UnreachableNode(v));
    }

    // maps[r][v] = id of original node v in round r's contracted graph.
    let mut maps: Vec<Vec<usize>> = vec![(0..g.nodes).collect()];
    let mut cycles_per_round: Vec<Vec<CycleRecord>> = Vec::new();
    let mut arcs: Vec<RoundArc> = g
        .arcs
        .iter()
        .enumerate()
        .filter(|&(_, &(from, to, _))| from != to && to != root)
        .map(|(orig, &(from, to, ref cost))| RoundArc { from, to, cost: cost.clone(), orig })
        .collect();
    let mut node_count = g.nodes;
    let mut cur_root = root;
    let final_chosen: Vec<usize>;

    loop {
        // Minimum incoming arc per non-root node. Deterministic tie-break:
        // original tail index, then original arc index.
        let mut best: Vec<Option<usize>> = vec![None; node_count];
        for (i, arc) in arcs.iter().enumerate() {
            if arc.to == cur_root {
                continue;
            }
            let replace = match best[arc.to] {
                None => true,
                Some(b) => {
                    let cur = &arcs[b];
                    arc.cost < cur.cost
                        || (arc.cost == cur.cost
                            && (g.arcs[arc.orig].0, arc.orig) < (g.arcs[cur.orig].0, cur.orig))
                }
            };
            if replace {
                best[arc.to] = Some(i);
            }
        }
        let chosen: Vec<usize> = (0..node_count)
            .filter(|&v| v != cur_root)
            .map(|v| best[v].expect("reachable node lost its incoming arcs"))
            .collect();

        // Cycle detection over the functional graph v → tail(best[v]).
        let mut color = vec![0u8; node_count]; // 0 unvisited, 1 in-progress, 2 done
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for start in 0..node_count {
            if color[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut v = start;
            while color[v] == 0 && v != cur_root {
                color[v] = 1;
                path.push(v);
                v = arcs[best[v].unwrap()].from;
            }
            if color[v] == 1 {
                let pos = path.iter().position(|&p| p == v).unwrap();
                cycles.push(path[pos..].to_vec());
            }
            for p in path {
                color[p] = 2;
            }
        }

        if cycles.is_empty() {
            final_chosen = chosen;
            break;
        }

        // Contract every cycle found this round; untouched nodes keep dense
        // fresh ids, each cycle becomes one new node at the end.
        let mut remap = vec![usize::MAX; node_count];
        let mut in_cycle = vec![false; node_count];
        for cyc in &cycles {
            for &v in cyc {
                in_cycle[v] = true;
            }
        }
        let mut next = 0;
        for v in 0..node_count {
            if !in_cycle[v] {
                remap[v] = next;
                next += 1;
            }
        }
        let mut records = Vec::new();
        for cyc in &cycles {
            for &v in cyc {
                remap[v] = next;
            }
            records.push(CycleRecord {
                members: cyc.clone(),
                chosen: cyc.iter().map(|&v| arcs[best[v].unwrap()].orig).collect(),
            });
            next += 1;
        }

        let reduced: Vec<RoundArc> = arcs
            .iter()
            .filter(|arc| remap[arc.from] != remap[arc.to])
            .map(|arc| {
                let cost = if in_cycle[arc.to] {
                    &arc.cost - &arcs[best[arc.to].unwrap()].cost
                } else {
                    arc.cost.clone()
                };
                RoundArc { from: remap[arc.from], to: remap[arc.to], cost, orig: arc.orig }
            })
            .collect();

        let prev_map = maps.last().unwrap().clone();
        maps.push(prev_map.iter().map(|&v| remap[v]).collect());
        cycles_per_round.push(records);
        arcs = reduced;
        cur_root = remap[cur_root];
        node_count = next;
    }

    // Expansion: walk the stack backwards, breaking each cycle at the member
    // the higher-level solution enters through.
    let mut selected: BTreeSet<usize> = final_chosen.iter().map(|&i| arcs[i].orig).collect();
    for (round, records) in cycles_per_round.iter().enumerate().rev() {
        let map = &maps[round];
        for rec in records {
            let entering = selected
                .iter()
                .copied()
                .find(|&a| rec.members.contains(&map[g.arcs[a].1]))
                .expect("contracted cycle must be entered exactly once");
            let broken_member = map[g.arcs[entering].1];
            for (&member, &arc) in rec.members.iter().zip(&rec.chosen) {
                if member != broken_member {
                    selected.insert(arc);
                }
            }
        }
    }

    let mut parent = BTreeMap::new();
    let mut total_cost = Rational::zero();
    for a in selected {
        let (from, to, ref cost) = g.arcs[a];
        total_cost += cost;
        let prev = parent.insert(to, TreeArc { from, arc: a, cost: cost.clone() });
        debug_assert!(prev.is_none(), "two arcs entering node {to}");
    }
    debug_assert_eq!(parent.len(), g.nodes - 1, "result does not span the graph");
    Ok(Arborescence { root, parent, total_cost })
}

/// Repeatedly remove non-terminal leaves, leaving the subtree that still
/// spans every terminal (plus whatever internal nodes connect them).
pub fn prune_to_steiner(
    arb: &Arborescence,
    terminals: &BTreeSet<usize>,
) -> Result<Arborescence, ArborescenceError> {
    let nodes = arb.nodes();
    if let Some(&t) = terminals.iter().find(|t| !nodes.contains(t)) {
        return Err(ArborescenceError::TerminalNotInTree(t));
    }
    let mut children: BTreeMap<usize, usize> = BTreeMap::new();
    for arc in arb.parent.values() {
        *children.entry(arc.from).or_insert(0) += 1;
    }
    let mut parent = arb.parent.clone();
    let mut queue: VecDeque<usize> = parent
        .keys()
        .filter(|v| !terminals.contains(v) && children.get(v).copied().unwrap_or(0) == 0)
        .copied()
        .collect();
    while let Some(leaf) = queue.pop_front() {
        if children.get(&leaf).copied().unwrap_or(0) != 0 {
            continue; // gained nothing to prune after all
        }
        let Some(arc) = parent.remove(&leaf) else { continue };
        let c = children.get_mut(&arc.from).expect("parent must have child count");
        *c -= 1;
        if *c == 0 && !terminals.contains(&arc.from) && arc.from != arb.root {
            queue.push_back(arc.from);
        }
    }
    let total_cost = parent.values().fold(Rational::zero(), |acc, a| acc + &a.cost);
    let pruned = Arborescence { root: arb.root, parent, total_cost };
    debug_assert!(
        terminals.is_empty()
            || pruned.leaves().iter().all(|l| terminals.contains(l) || *l == pruned.root),
        "pruning left a non-terminal leaf"
    );
    Ok(pruned)
}
