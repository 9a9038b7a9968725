//! Exact-rational linear programming: dense two-phase simplex.
//!
//! Used for genuinely multicommodity feasibility questions, where no
//! combinatorial flow algorithm applies. All arithmetic is exact, so an
//! optimum of zero is zero — the feasibility verdicts that hang on "is the
//! minimum slack exactly 0?" are never at the mercy of an epsilon.
//!
//! Pivoting uses Dantzig's rule for speed and falls back to Bland's rule
//! after a run of degenerate pivots, which restores the termination
//! guarantee Bland's rule provides without paying its price on every step.

use num::{Signed, Zero};

use crate::rational::Rational;

/// `min c·x` subject to `A·x = b`, `x ≥ 0`.
///
/// Callers encode inequalities by adding their own slack variables; rows are
/// re-signed internally so `b ≥ 0` is not required.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub objective: Vec<Rational>,
    pub rows: Vec<(Vec<Rational>, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { solution: Vec<Rational>, objective: Rational },
    Infeasible,
    Unbounded,
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK_LIMIT: u32 = 12;

struct Tableau {
    /// `rows[i]` has the variable coefficients followed by the rhs.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row (same layout; rhs slot holds −objective value).
    cost: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
    degenerate_streak: u32,
}

enum PivotResult {
    Optimal,
    Unbounded,
    Continue,
}

impl Tableau {
    fn rhs(&self, row: usize) -> &Rational {
        &self.rows[row][self.cols]
    }

    /// One simplex step: pick an entering column (Dantzig, or Bland when the
    /// degenerate streak is long), a leaving row by minimum ratio with ties
    /// broken toward the smallest basis variable, then pivot.
    fn step(&mut self) -> PivotResult {
        let bland = self.degenerate_streak >= DEGENERATE_STREAK_LIMIT;
        let mut entering: Option<usize> = None;
        for j in 0..self.cols {
            if self.cost[j].is_negative() {
                match entering {
                    None => entering = Some(j),
                    Some(e) => {
                        if !bland && self.cost[j] < self.cost[e] {
                            entering = Some(j);
                        }
                    }
                }
                if bland {
                    break;
                }
            }
        }
        let Some(j) = entering else { return PivotResult::Optimal };

        let mut leaving: Option<(usize, Rational)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][j];
            if a.is_positive() {
                let ratio = self.rhs(i) / a;
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((i, ratio)) = leaving else { return PivotResult::Unbounded };
        if ratio.is_zero() {
            self.degenerate_streak += 1;
        } else {
            self.degenerate_streak = 0;
        }
        self.pivot(i, j);
        PivotResult::Continue
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = {
            let p = self.rows[row][col].clone();
            debug_assert!(!p.is_zero());
            p
        };
        for x in self.rows[row].iter_mut() {
            *x /= &inv;
        }
        let pivot_row = self.rows[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                *x -= factor.clone() * p;
            }
        }
        if !self.cost[col].is_zero() {
            let factor = self.cost[col].clone();
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                *x -= factor.clone() * p;
            }
        }
        self.basis[row] = col;
    }

    fn run(&mut self) -> PivotResult {
        loop {
            match self.step() {
                PivotResult::Continue => continue,
                done => return done,
            }
        }
    }

    /// Reduced costs for objective `c` given the current basis.
    fn install_objective(&mut self, c: &[Rational]) {
        let mut cost = c.to_vec();
        cost.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let factor = cost[b].clone();
            let row = self.rows[i].clone();
            for (x, a) in cost.iter_mut().zip(&row) {
                *x -= factor.clone() * a;
            }
        }
        self.cost = cost;
    }
}

/// Solve `min c·x, A·x = b, x ≥ 0` exactly.
pub fn solve(lp: &StandardForm) -> LpOutcome {
    let n = lp.objective.len();
    let m = lp.rows.len();
    debug_assert!(lp.rows.iter().all(|(coef, _)| coef.len() == n), "ragged LP row");

    // Phase 1: artificial variable per row (columns n..n+m), rhs made ≥ 0.
    let mut rows = Vec::with_capacity(m);
    for (i, (coef, rhs)) in lp.rows.iter().enumerate() {
        let negate = rhs.is_negative();
        let mut row: Vec<Rational> = coef
            .iter()
            .map(|a| if negate { -a.clone() } else { a.clone() })
            .collect();
        row.extend((0..m).map(|j| if j == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
        row.push(if negate { -rhs.clone() } else { rhs.clone() });
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        cost: Vec::new(),
        basis: (n..n + m).collect(),
        cols: n + m,
        degenerate_streak: 0,
    };
    let mut phase1 = vec![Rational::zero(); n];
    phase1.extend(std::iter::repeat(Rational::from_integer(1.into())).take(m));
    t.install_objective(&phase1);
    match t.run() {
        PivotResult::Unbounded => unreachable!("phase-1 objective is bounded below by zero"),
        PivotResult::Optimal | PivotResult::Continue => {}
    }
    // −cost[rhs] is the phase-1 optimum.
    if t.cost[t.cols].is_negative() {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            debug_assert!(t.rhs(i).is_zero(), "artificial basic at nonzero value after phase 1");
            if let Some(j) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }
    // Truncate artificial columns.
    for row in t.rows.iter_mut() {
        let rhs = row[n + m].clone();
        row.truncate(n);
        row.push(rhs);
    }
    t.cols = n;
    t.degenerate_streak = 0;
    t.install_objective(&lp.objective);

    match t.run() {
        PivotResult::Unbounded => LpOutcome::Unbounded,
        PivotResult::Optimal | PivotResult::Continue => {
            let mut solution = vec![Rational::zero(); n];
            for (i, &b) in t.basis.iter().enumerate() {
                solution[b] = t.rhs(i).clone();
            }
            let objective = lp
                .objective
                .iter()
                .zip(&solution)
                .map(|(c, x)| c.clone() * x)
                .fold(Rational::zero(), |a, b| a + b);
            LpOutcome::Optimal { solution, objective }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn optimal(lp: &StandardForm) -> (Vec<Rational>, Rational) {
        match solve(lp) {
            LpOutcome::Optimal { solution, objective } => (solution, objective),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn solves_tiny_equality_program() {
        // min x2 s.t. x1 + x2 = 2, x1 ≤ 1 (as x1 + x3 = 1)
        let lp = StandardForm {
            objective: vec![rat(0), rat(1), rat(0)],
            rows: vec![
                (vec![rat(1), rat(1), rat(0)], rat(2)),
                (vec![rat(1), rat(0), rat(1)], rat(1)),
            ],
        };
        let (x, obj) = optimal(&lp);
        assert_eq!(obj, rat(1));
        assert_eq!(x[0], rat(1));
        assert_eq!(x[1], rat(1));
    }

    #[test]
    fn detects_infeasible() {
        let lp = StandardForm {
            objective: vec![rat(0), rat(0)],
            rows: vec![
                (vec![rat(1), rat(1)], rat(1)),
                (vec![rat(1), rat(1)], rat(2)),
            ],
        };
        assert_eq!(solve(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // min −x1 s.t. x1 − x2 = 0
        let lp = StandardForm {
            objective: vec![rat(-1), rat(0)],
            rows: vec![(vec![rat(1), rat(-1)], rat(0))],
        };
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_rows_are_renormalized() {
        // −x1 = −3 ⟹ x1 = 3
        let lp = StandardForm {
            objective: vec![rat(1)],
            rows: vec![(vec![rat(-1)], rat(-3))],
        };
        let (x, obj) = optimal(&lp);
        assert_eq!(x[0], rat(3));
        assert_eq!(obj, rat(3));
    }

    #[test]
    fn handles_redundant_rows() {
        let lp = StandardForm {
            objective: vec![rat(1), rat(1)],
            rows: vec![
                (vec![rat(1), rat(1)], rat(1)),
                (vec![rat(2), rat(2)], rat(2)),
            ],
        };
        let (_, obj) = optimal(&lp);
        assert_eq!(obj, rat(1));
    }

    #[test]
    fn exact_fractions_survive() {
        // min x1 s.t. (2/3)x1 = 5/7 → x1 = 15/14
        let lp = StandardForm {
            objective: vec![rat(1)],
            rows: vec![(vec![ratio(2, 3)], ratio(5, 7))],
        };
        let (x, _) = optimal(&lp);
        assert_eq!(x[0], ratio(15, 14));
    }

    #[test]
    fn degenerate_vertices_terminate() {
        // A program with a degenerate basic feasible solution (three planes
        // through one vertex); must not cycle.
        let lp = StandardForm {
            objective: vec![rat(-3), rat(-2), rat(0), rat(0), rat(0)],
            rows: vec![
                (vec![rat(1), rat(1), rat(1), rat(0), rat(0)], rat(4)),
                (vec![rat(1), rat(1), rat(0), rat(1), rat(0)], rat(4)),
                (vec![rat(1), rat(0), rat(0), rat(0), rat(1)], rat(4)),
            ],
        };
        let (_, obj) = optimal(&lp);
        assert_eq!(obj, rat(-12));
    }
}
