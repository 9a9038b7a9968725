//! Budgets for the exhaustive (exponential-time) code paths.
//!
//! Every exhaustive solver and oracle takes an explicit budget and refuses
//! inputs beyond it with [`BudgetExceeded`] instead of silently truncating
//! the search or hanging; a refusal is always distinguishable from an answer.

use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("exhaustive search budget exceeded: {0}")]
pub struct BudgetExceeded(pub String);

/// Limits for the exact (exhaustive) routing solvers.
#[derive(Debug, Clone)]
pub struct SearchLimits {
    /// Refuse up front when the instance graph has more nodes than this.
    pub max_graph_nodes: usize,
    /// Abort once the search has expanded this many states.
    pub max_search_steps: u64,
    /// Wall-clock ceiling for one solve call.
    pub max_duration: Duration,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_graph_nodes: 64,
            max_search_steps: 50_000_000,
            max_duration: Duration::from_secs(120),
        }
    }
}

impl SearchLimits {
    pub fn check_graph_size(&self, nodes: usize) -> Result<(), BudgetExceeded> {
        if nodes > self.max_graph_nodes {
            return Err(BudgetExceeded(format!(
                "instance has {nodes} graph nodes, exhaustive search accepts at most {}",
                self.max_graph_nodes
            )));
        }
        Ok(())
    }

    pub fn start(&self) -> StepCounter {
        StepCounter {
            remaining: self.max_search_steps,
            deadline: Instant::now() + self.max_duration,
            since_clock_check: 0,
        }
    }
}

/// Per-search step counter; cheap to tick, checks the clock sparsely.
#[derive(Debug)]
pub struct StepCounter {
    remaining: u64,
    deadline: Instant,
    since_clock_check: u32,
}

impl StepCounter {
    pub fn tick(&mut self) -> Result<(), BudgetExceeded> {
        if self.remaining == 0 {
            return Err(BudgetExceeded("search step limit reached".into()));
        }
        self.remaining -= 1;
        self.since_clock_check += 1;
        if self.since_clock_check >= 4096 {
            self.since_clock_check = 0;
            if Instant::now() > self.deadline {
                return Err(BudgetExceeded("search time limit reached".into()));
            }
        }
        Ok(())
    }
}

/// Limits for the brute-force oracles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_nodes: usize,
    pub max_clients: usize,
    pub max_snapshots: usize,
    pub max_subsets: u64,
    pub max_duration: Duration,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_nodes: 48,
            max_clients: 10,
            max_snapshots: 12,
            max_subsets: 1 << 22,
            max_duration: Duration::from_secs(300),
        }
    }
}

/// Environment variable read by [`OracleBudget::from_env`].
pub const ORACLE_BUDGET_ENV: &str = "SATROUTE_ORACLE_BUDGET";

impl OracleBudget {
    /// Default budget, overridden by `SATROUTE_ORACLE_BUDGET` when set.
    ///
    /// Format: comma-separated `key=value` pairs over the keys `nodes`,
    /// `clients`, `snapshots`, `subsets`, `millis`; unknown keys or malformed
    /// values are rejected loudly (a silent fallback would defeat the point
    /// of setting the variable).
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(ORACLE_BUDGET_ENV) {
            Err(_) => Ok(Self::default()),
            Ok(spec) => Self::parse_spec(&spec),
        }
    }

    fn parse_spec(spec: &str) -> Result<Self, String> {
        let mut budget = Self::default();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("budget entry {part:?} is not key=value"))?;
            let num: u64 = value
                .trim()
                .parse()
                .map_err(|_| format!("budget value {value:?} for {key:?} is not a number"))?;
            match key.trim() {
                "nodes" => budget.max_nodes = num as usize,
                "clients" => budget.max_clients = num as usize,
                "snapshots" => budget.max_snapshots = num as usize,
                "subsets" => budget.max_subsets = num,
                "millis" => budget.max_duration = Duration::from_millis(num),
                other => return Err(format!("unknown budget key {other:?}")),
            }
        }
        Ok(budget)
    }

    pub fn check(&self, what: &str, value: usize, max: usize) -> Result<(), BudgetExceeded> {
        if value > max {
            return Err(BudgetExceeded(format!("{what} = {value} exceeds oracle budget {max}")));
        }
        Ok(())
    }

    pub fn check_nodes(&self, nodes: usize) -> Result<(), BudgetExceeded> {
        self.check("node count", nodes, self.max_nodes)
    }

    pub fn check_clients(&self, clients: usize) -> Result<(), BudgetExceeded> {
        self.check("client count", clients, self.max_clients)
    }

    pub fn check_snapshots(&self, snapshots: usize) -> Result<(), BudgetExceeded> {
        self.check("snapshot count", snapshots, self.max_snapshots)
    }

    pub fn check_subsets(&self, subsets: u64) -> Result<(), BudgetExceeded> {
        if subsets > self.max_subsets {
            return Err(BudgetExceeded(format!(
                "subset count {subsets} exceeds oracle budget {}",
                self.max_subsets
            )));
        }
        Ok(())
    }

    pub fn start(&self) -> StepCounter {
        StepCounter {
            remaining: self.max_subsets.saturating_mul(64),
            deadline: Instant::now() + self.max_duration,
            since_clock_check: 0,
        }
    }
}
