//! Two-phase heuristic.
//!
//! Phase 1 packs blocks of length at least `l` so that as much of both
//! strings as possible is covered, preferring fewer blocks at equal coverage.
//! Phase 2 keeps those blocks and solves the exact problem over the blocks
//! still compatible with them. The sweep runs this for every `l` in
//! `[2, l_max]` and keeps the best partition.

use std::fmt::Write as _;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::{compatible_blocks, l_max, BlockSet};
use crate::error::{Error, Result};
use crate::greedy::greedy_extend;
use crate::instance::{Instance, Partition};
use crate::model::phase1_weight;
use crate::solver::{
    solve_max_coverage, solve_min_partition, SolveResult, SolveStatus, SolverConfig,
};

/// Minimum block length used for large instances when `l` is not swept.
pub const DEFAULT_FIXED_L: usize = 5;

/// Default per-solve time after which the first feasible solution is kept.
pub const DEFAULT_FIRST_FEASIBLE_S: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LChoice {
    Fixed(usize),
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicConfig {
    pub l: LChoice,
    /// Stopping rules applied to each of the two solves.
    pub per_solve: SolverConfig,
    /// Run the sweep's `l` values concurrently.
    pub parallel: bool,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            l: LChoice::Sweep,
            per_solve: SolverConfig::first_feasible_after(DEFAULT_FIRST_FEASIBLE_S),
            parallel: false,
        }
    }
}

impl HeuristicConfig {
    /// Single run with `l = 5`.
    pub fn large_instance() -> Self {
        Self {
            l: LChoice::Fixed(DEFAULT_FIXED_L),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseStats {
    pub block_set_size: usize,
    pub status: SolveStatus,
    pub objective: Option<i64>,
    pub bound: i64,
    pub time_s: f64,
    pub nodes: u64,
}

impl PhaseStats {
    fn from_result(r: &SolveResult, time_s: f64) -> Self {
        Self {
            block_set_size: r.block_set_size,
            status: r.status,
            objective: r.objective,
            bound: r.bound,
            time_s,
            nodes: r.nodes,
        }
    }

    pub fn proven_optimal(&self) -> bool {
        self.status == SolveStatus::ProvenOptimal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome {
    pub partition: Partition,
    pub stats: PhaseStats,
}

/// Phase 1: weighted max-coverage over `B_{>=l}`. Returns a valid partial
/// partition (possibly empty under tight limits).
pub fn run_phase1(
    inst: &Instance,
    blocks: &BlockSet,
    l: usize,
    cfg: &SolverConfig,
) -> Result<PhaseOutcome> {
    let start = Instant::now();
    let max = l_max(blocks)?;
    if l < 2 || l > max {
        return Err(Error::LengthOutOfRange { l, min: 2, max });
    }
    let filtered = blocks.filter_min_length(l);
    let r = solve_max_coverage(inst, &filtered, phase1_weight(inst.n()), cfg)?;
    let partition = r
        .incumbent
        .clone()
        .expect("max-coverage always has the empty incumbent");
    Ok(PhaseOutcome {
        stats: PhaseStats::from_result(&r, start.elapsed().as_secs_f64()),
        partition,
    })
}

/// Phase 2: exact completion of `phase1` over `phase1 ∪ B(phase1)`.
///
/// The result is always complete and contains every phase-1 block. Should a
/// hard time limit expire before any completion is found, the greedy
/// continuation of `phase1` is returned instead.
pub fn run_phase2(
    inst: &Instance,
    blocks: &BlockSet,
    phase1: &Partition,
    cfg: &SolverConfig,
) -> Result<PhaseOutcome> {
    let start = Instant::now();
    let mut reduced: Vec<_> = compatible_blocks(blocks, phase1).as_slice().to_vec();
    reduced.extend_from_slice(phase1.blocks());
    let reduced = BlockSet::from_blocks(reduced);
    if phase1.is_empty() {
        warn!("phase 1 selected no blocks; phase 2 solves the exact model over all blocks");
    }
    let r = solve_min_partition(inst, &reduced, phase1.blocks(), cfg)?;
    let partition = match &r.incumbent {
        Some(p) => p.clone(),
        None => {
            warn!("phase 2 found no completion within its limits; completing greedily");
            greedy_extend(inst, &reduced, phase1.clone())
        }
    };
    Ok(PhaseOutcome {
        stats: PhaseStats::from_result(&r, start.elapsed().as_secs_f64()),
        partition,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPhaseResult {
    pub l: usize,
    pub phase1: PhaseStats,
    pub phase2: PhaseStats,
    pub phase1_partition: Partition,
    pub partition: Partition,
    pub objective: usize,
    pub time_s: f64,
}

/// Phase 1 followed by phase 2 for one value of `l`.
pub fn two_phase(
    inst: &Instance,
    blocks: &BlockSet,
    l: usize,
    cfg: &SolverConfig,
) -> Result<TwoPhaseResult> {
    let start = Instant::now();
    let ph1 = run_phase1(inst, blocks, l, cfg)?;
    let ph2 = run_phase2(inst, blocks, &ph1.partition, cfg)?;
    Ok(TwoPhaseResult {
        l,
        objective: ph2.partition.len(),
        phase1: ph1.stats,
        phase2: ph2.stats,
        phase1_partition: ph1.partition,
        partition: ph2.partition,
        time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub l: usize,
    pub phase1_blockset_size: usize,
    pub phase2_blockset_size: usize,
    pub phase1_proven_optimal: bool,
    pub phase2_proven_optimal: bool,
    pub objective: usize,
    pub time_s: f64,
}

impl From<&TwoPhaseResult> for SweepEntry {
    fn from(r: &TwoPhaseResult) -> Self {
        Self {
            l: r.l,
            phase1_blockset_size: r.phase1.block_set_size,
            phase2_blockset_size: r.phase2.block_set_size,
            phase1_proven_optimal: r.phase1.proven_optimal(),
            phase2_proven_optimal: r.phase2.proven_optimal(),
            objective: r.objective,
            time_s: r.time_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// `l` of the best entry; `None` when no `l` was admissible.
    pub best_l: Option<usize>,
    pub best_objective: usize,
    pub best: Partition,
    /// Sum of per-`l` times, each including block filtering and model setup.
    pub total_time_s: f64,
    pub block_count_total: usize,
    pub warnings: Vec<String>,
}

impl SweepReport {
    /// One CSV row per `l`.
    pub fn to_csv(&self) -> String {
        sweep_csv(&self.entries)
    }
}

/// `l`-table as CSV with a header line.
pub fn sweep_csv(entries: &[SweepEntry]) -> String {
    let mut out = String::from(
        "l,phase1_blockset_size,phase2_blockset_size,phase1_proven_optimal,phase2_proven_optimal,objective,time_s\n",
    );
    for e in entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6}",
            e.l,
            e.phase1_blockset_size,
            e.phase2_blockset_size,
            e.phase1_proven_optimal,
            e.phase2_proven_optimal,
            e.objective,
            e.time_s
        );
    }
    out
}

/// Runs the heuristic for the `l` values selected by `cfg` and keeps the best
/// result (the smallest `l` among ties).
pub fn sweep_l(inst: &Instance, blocks: &BlockSet, cfg: &HeuristicConfig) -> Result<SweepReport> {
    let max = l_max(blocks)?;
    let mut warnings = Vec::new();
    let ls: Vec<usize> = match cfg.l {
        LChoice::Fixed(l) => {
            if l < 2 || l > max {
                return Err(Error::LengthOutOfRange { l, min: 2, max });
            }
            vec![l]
        }
        LChoice::Sweep => (2..=max).collect(),
    };
    if ls.is_empty() {
        let msg = format!("longest common block has length {max}; no l in [2, l_max], returning the singleton partition");
        warn!("{msg}");
        warnings.push(msg);
        let best = Partition::singletons(inst);
        return Ok(SweepReport {
            entries: Vec::new(),
            best_l: None,
            best_objective: best.len(),
            best,
            total_time_s: 0.0,
            block_count_total: blocks.len(),
            warnings,
        });
    }

    let runs: Vec<TwoPhaseResult> = if cfg.parallel {
        ls.par_iter()
            .map(|&l| two_phase(inst, blocks, l, &cfg.per_solve))
            .collect::<Result<_>>()?
    } else {
        ls.iter()
            .map(|&l| two_phase(inst, blocks, l, &cfg.per_solve))
            .collect::<Result<_>>()?
    };
    for r in &runs {
        if r.phase1_partition.is_empty() {
            warnings.push(format!("l={}: phase 1 selected no blocks", r.l));
        }
    }
    let best_run = runs
        .iter()
        .min_by_key(|r| (r.objective, r.l))
        .expect("at least one l");
    Ok(SweepReport {
        entries: runs.iter().map(SweepEntry::from).collect(),
        best_l: Some(best_run.l),
        best_objective: best_run.objective,
        best: best_run.partition.clone(),
        total_time_s: runs.iter().map(|r| r.time_s).sum(),
        block_count_total: blocks.len(),
        warnings,
    })
}
