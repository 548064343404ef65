//! Depth-first branch-and-bound for the two model shapes.
//!
//! Both searches branch on string positions instead of LP relaxations: every
//! row of the models is an interval-coverage constraint, so deciding the
//! leftmost open position of `s1` at each node enumerates all solutions.
//!
//! * [`solve_min_partition`] serves the exact model and the phase-2 model
//!   (forced blocks pre-placed).
//! * [`solve_max_coverage`] serves the phase-1 model.
//!
//! Search stops on exhaustion (proven optimal), on the time or node budget,
//! or once `stop_after_first_feasible_at_s` has elapsed with an incumbent.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Partition};
use crate::lp::Sense;

mod coverage;
mod partition;

pub use coverage::solve_max_coverage;
pub use partition::solve_min_partition;

/// Stopping rules for one solve call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Wall-clock limit in seconds; `None` is unlimited.
    pub time_limit_s: Option<f64>,
    /// Stop once this much time has elapsed and an incumbent exists.
    pub stop_after_first_feasible_at_s: Option<f64>,
    /// Hard cap on search nodes.
    pub node_limit: Option<u64>,
    /// Ignore wall-clock rules so that only `node_limit` can interrupt the
    /// search. Two runs with the same input then explore identical trees.
    pub deterministic: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::unlimited()
    }
}

impl SolverConfig {
    pub fn unlimited() -> Self {
        Self {
            time_limit_s: None,
            stop_after_first_feasible_at_s: None,
            node_limit: None,
            deterministic: false,
        }
    }

    pub fn with_time_limit(seconds: f64) -> Self {
        Self {
            time_limit_s: Some(seconds),
            ..Self::unlimited()
        }
    }

    /// Per-solve rule of the two-phase heuristic: stop when optimal, or when
    /// `seconds` have passed and a solution is known.
    pub fn first_feasible_after(seconds: f64) -> Self {
        Self {
            stop_after_first_feasible_at_s: Some(seconds),
            ..Self::unlimited()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.time_limit_s, self.stop_after_first_feasible_at_s]
            .into_iter()
            .flatten()
        {
            if !(v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "time limits must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    ProvenOptimal,
    FeasibleTimeLimit,
    NoSolutionTimeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    #[serde(serialize_with = "ser_sense")]
    pub sense: Sense,
    pub incumbent: Option<Partition>,
    /// Objective value of the incumbent.
    pub objective: Option<i64>,
    /// Best proven bound: lower bound when minimising, upper when maximising.
    pub bound: i64,
    /// `|objective - bound| / max(|objective|, 1)`.
    pub gap: Option<f64>,
    pub time_first_s: Option<f64>,
    pub time_best_s: Option<f64>,
    pub time_total_s: f64,
    pub nodes: u64,
    /// Size of the block set the search ran over.
    pub block_set_size: usize,
}

fn ser_sense<S: serde::Serializer>(s: &Sense, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(match s {
        Sense::Minimize => "min",
        Sense::Maximize => "max",
    })
}

fn relative_gap(objective: i64, bound: i64) -> f64 {
    (objective - bound).abs() as f64 / (objective.abs().max(1)) as f64
}

struct Budget<'a> {
    cfg: &'a SolverConfig,
    start: Instant,
    nodes: u64,
}

impl<'a> Budget<'a> {
    fn new(cfg: &'a SolverConfig) -> Self {
        Self {
            cfg,
            start: Instant::now(),
            nodes: 0,
        }
    }

    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn exhausted(&self, have_incumbent: bool) -> bool {
        if let Some(limit) = self.cfg.node_limit {
            if self.nodes >= limit {
                return true;
            }
        }
        if self.cfg.deterministic {
            return false;
        }
        let t = self.elapsed();
        if let Some(limit) = self.cfg.time_limit_s {
            if t >= limit {
                return true;
            }
        }
        matches!(self.cfg.stop_after_first_feasible_at_s, Some(after) if have_incumbent && t >= after)
    }
}

/// Outcome of one slice of a resumable search.
enum Run {
    Finished,
    Paused,
    Stopped,
}

/// Largest instance [`brute_force_optimal`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 14;

/// Exact optimum by exhaustive enumeration of all partitions, working on the
/// raw strings (no block set, no bounds). Testing oracle only.
pub fn brute_force_optimal(inst: &Instance) -> Result<usize> {
    let n = inst.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    fn rec(
        a: &[char],
        b: &[char],
        used1: &mut [bool],
        used2: &mut [bool],
        count: usize,
        best: &mut usize,
    ) {
        let n = a.len();
        let Some(p) = used1.iter().position(|u| !u) else {
            *best = (*best).min(count);
            return;
        };
        for q in 0..n {
            let mut len = 0;
            while p + len < n
                && q + len < n
                && !used1[p + len]
                && !used2[q + len]
                && a[p + len] == b[q + len]
            {
                len += 1;
                used1[p..p + len].fill(true);
                used2[q..q + len].fill(true);
                rec(a, b, used1, used2, count + 1, best);
                used1[p..p + len].fill(false);
                used2[q..q + len].fill(false);
            }
        }
    }
    let mut best = usize::MAX;
    rec(
        inst.symbols1(),
        inst.symbols2(),
        &mut vec![false; n],
        &mut vec![false; n],
        0,
        &mut best,
    );
    Ok(best)
}
