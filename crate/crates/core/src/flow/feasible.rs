//! Concurrent fractional feasibility with minimum total capacity overflow.
//!
//! Given a capacitated network and one or more commodities (each a set of
//! sources with supplies and sinks with demands), decide whether all demands
//! can be routed simultaneously within capacity. When they cannot, report the
//! minimum total overflow `Σ ρ_a` over all routings that still deliver every
//! demand, where arc `a` may carry up to `capacity + ρ_a`.
//!
//! Two routes, both exact:
//! - one commodity: scale to integers by the common denominator and run
//!   min-cost flow where each arc gets a parallel overflow copy costing 1 per
//!   scaled unit — the optimal cost divided by the scale factor is `min Σρ`;
//! - several commodities: a linear program solved with exact-rational
//!   simplex, since commodities interact only through shared capacities and
//!   no combinatorial algorithm covers that case.
//!
//! The single-commodity case is also expressible as the LP, and tests keep
//! both routes honest against each other.

use num::{BigInt, Zero};

use super::{min_cost_flow, FlowError, FlowNetwork, FractionalFlow};
use crate::lp::{self, LpOutcome, StandardForm};
use crate::rational::{lcm_bigint, Rational};

/// One commodity: where its flow originates and where it must arrive.
/// Total supply must equal total demand.
#[derive(Debug, Clone)]
pub struct Commodity {
    pub sources: Vec<(usize, Rational)>,
    pub sinks: Vec<(usize, Rational)>,
}

impl Commodity {
    pub fn single(source: usize, sink: usize, amount: Rational) -> Self {
        Commodity { sources: vec![(source, amount.clone())], sinks: vec![(sink, amount)] }
    }

    fn total_supply(&self) -> Rational {
        self.sources.iter().fold(Rational::zero(), |acc, (_, s)| acc + s)
    }

    fn total_demand(&self) -> Rational {
        self.sinks.iter().fold(Rational::zero(), |acc, (_, d)| acc + d)
    }

    /// Net surplus per node (positive at sources, negative at sinks).
    fn node_balance(&self, nodes: usize) -> Vec<Rational> {
        let mut balance = vec![Rational::zero(); nodes];
        for (v, s) in &self.sources {
            balance[*v] += s;
        }
        for (v, d) in &self.sinks {
            balance[*v] -= d;
        }
        balance
    }
}

#[derive(Debug, Clone)]
pub enum FeasibilityOutcome {
    /// All demands routable within capacity; the witness routing is attached.
    Feasible(FractionalFlow),
    /// Demands routable only by exceeding capacity; the least total excess.
    Infeasible { min_total_slack: Rational },
    /// Some demand cannot reach its sink no matter how capacities are raised.
    Disconnected,
}

/// Decide concurrent feasibility of `commodities` on `net`.
///
/// Arc costs in `net` are ignored — this is a pure capacity question.
pub fn fractional_feasibility(
    net: &FlowNetwork,
    commodities: &[Commodity],
) -> Result<FeasibilityOutcome, FlowError> {
    for (c, com) in commodities.iter().enumerate() {
        for (v, _) in com.sources.iter().chain(&com.sinks) {
            assert!(*v < net.node_count(), "commodity {c} references node {v} out of bounds");
        }
        if com.total_supply() != com.total_demand() {
            return Err(FlowError::UnbalancedCommodity(c));
        }
    }
    match commodities {
        [] => Ok(FeasibilityOutcome::Feasible(FractionalFlow {
            flows: Vec::new(),
            slack: vec![Rational::zero(); net.arcs().len()],
        })),
        [single] => Ok(single_commodity(net, single)),
        many => Ok(multicommodity(net, many)),
    }
}

/// Min-cost-flow route: exact after clearing denominators.
pub(crate) fn single_commodity(net: &FlowNetwork, com: &Commodity) -> FeasibilityOutcome {
    let narcs = net.arcs().len();
    let mut scale = BigInt::from(1);
    for arc in net.arcs() {
        scale = lcm_bigint(&scale, arc.capacity.denom());
    }
    for (_, amt) in com.sources.iter().chain(&com.sinks) {
        scale = lcm_bigint(&scale, amt.denom());
    }
    let scale_rat = Rational::from_integer(scale.clone());

    let to_int = |r: &Rational| -> Rational {
        let scaled = r * &scale_rat;
        debug_assert!(scaled.is_integer());
        scaled
    };
    let total_demand = to_int(&com.total_demand());

    // Arc 2a mirrors the original (cost 0); arc 2a+1 is its overflow copy
    // (cost 1 per scaled unit, capacity = everything that could ever flow).
    let mut aug = FlowNetwork::new(net.node_count());
    for arc in net.arcs() {
        aug.add_arc(arc.from, arc.to, to_int(&arc.capacity), Rational::zero());
        aug.add_arc(arc.from, arc.to, total_demand.clone(), Rational::from_integer(1.into()));
    }
    for (v, bal) in com.node_balance(net.node_count()).into_iter().enumerate() {
        if !bal.is_zero() {
            aug.add_supply(v, &to_int(&bal));
        }
    }

    match min_cost_flow(&aug) {
        Err(FlowError::Infeasible) => FeasibilityOutcome::Disconnected,
        Err(e) => unreachable!("scaled network is integral and balanced: {e}"),
        Ok(flow) => {
            if flow.total_cost.is_zero() {
                let flows: Vec<Rational> = (0..narcs)
                    .map(|a| {
                        let combined = &flow.flows[2 * a] + &flow.flows[2 * a + 1];
                        Rational::from_integer(combined) / &scale_rat
                    })
                    .collect();
                let slack = vec![Rational::zero(); narcs];
                FeasibilityOutcome::Feasible(FractionalFlow { flows: vec![flows], slack })
            } else {
                FeasibilityOutcome::Infeasible { min_total_slack: flow.total_cost / scale_rat }
            }
        }
    }
}

/// Simplex route for interacting commodities.
///
/// Variables, per arc `a`: one flow `x_{c,a}` per commodity, overflow `ρ_a`,
/// and capacity slack `s_a`, all ≥ 0. Rows: flow conservation per
/// (commodity, node), and `Σ_c x_{c,a} − ρ_a + s_a = capacity_a` per arc.
/// Objective: `min Σ_a ρ_a`.
pub(crate) fn multicommodity(net: &FlowNetwork, commodities: &[Commodity]) -> FeasibilityOutcome {
    let narcs = net.arcs().len();
    let ncom = commodities.len();
    let nvars = (ncom + 2) * narcs;
    let x = |c: usize, a: usize| c * narcs + a;
    let rho = |a: usize| ncom * narcs + a;
    let slack = |a: usize| (ncom + 1) * narcs + a;

    let mut objective = vec![Rational::zero(); nvars];
    for a in 0..narcs {
        objective[rho(a)] = Rational::from_integer(1.into());
    }

    let mut rows = Vec::new();
    for (c, com) in commodities.iter().enumerate() {
        let balance = com.node_balance(net.node_count());
        for v in 0..net.node_count() {
            let mut coef = vec![Rational::zero(); nvars];
            let mut touched = !balance[v].is_zero();
            for (a, arc) in net.arcs().iter().enumerate() {
                if arc.from == v {
                    coef[x(c, a)] += Rational::from_integer(1.into());
                    touched = true;
                }
                if arc.to == v {
                    coef[x(c, a)] -= Rational::from_integer(1.into());
                    touched = true;
                }
            }
            if touched {
                rows.push((coef, balance[v].clone()));
            }
        }
    }
    for (a, arc) in net.arcs().iter().enumerate() {
        let mut coef = vec![Rational::zero(); nvars];
        for c in 0..ncom {
            coef[x(c, a)] = Rational::from_integer(1.into());
        }
        coef[rho(a)] = Rational::from_integer((-1).into());
        coef[slack(a)] = Rational::from_integer(1.into());
        rows.push((coef, arc.capacity.clone()));
    }

    match lp::solve(&StandardForm { objective, rows }) {
        LpOutcome::Infeasible => FeasibilityOutcome::Disconnected,
        LpOutcome::Unbounded => unreachable!("overflow objective is bounded below by zero"),
        LpOutcome::Optimal { solution, objective } => {
            if objective.is_zero() {
                let flows = (0..ncom)
                    .map(|c| (0..narcs).map(|a| solution[x(c, a)].clone()).collect())
                    .collect();
                let slack_vals = (0..narcs).map(|a| solution[rho(a)].clone()).collect();
                FeasibilityOutcome::Feasible(FractionalFlow { flows, slack: slack_vals })
            } else {
                FeasibilityOutcome::Infeasible { min_total_slack: objective }
            }
        }
    }
}
