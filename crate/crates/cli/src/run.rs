//! Algorithm runners shared by `solve` and `bench`.

use std::time::Instant;

use clap::ValueEnum;
use mcsp::{
    enumerate_blocks, greedy_partition, solve_min_partition, sweep_l, validate_blocks,
    HeuristicConfig, Instance, LChoice, Partition, SolverConfig, Validity,
};

use crate::report::{Params, Report, SCHEMA_VERSION};
use crate::{Failure, INTERNAL};

pub const DEFAULT_EXACT_LIMIT_S: f64 = 3600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Exact,
    Greedy,
    Heuristic,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Exact => "exact",
            Algo::Greedy => "greedy",
            Algo::Heuristic => "heuristic",
        }
    }
}

/// Limits and heuristic settings as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub time_limit_s: Option<f64>,
    pub first_feasible_after_s: Option<f64>,
    pub l: Option<usize>,
    pub parallel: bool,
}

impl RunOptions {
    /// Caps the hard time limit at `seconds`.
    pub fn capped(&self, seconds: f64) -> Self {
        let mut o = self.clone();
        o.time_limit_s = Some(o.time_limit_s.map_or(seconds, |t| t.min(seconds)));
        o
    }
}

fn check(inst: &Instance, p: &Partition) -> Result<(), Failure> {
    match validate_blocks(inst, p.blocks()) {
        Validity::Complete => Ok(()),
        v => Err(Failure::new(
            INTERNAL,
            anyhow::anyhow!("solver produced an invalid partition: {v:?}"),
        )),
    }
}

pub fn run(inst: &Instance, label: &str, algo: Algo, opts: &RunOptions) -> Result<Report, Failure> {
    let start = Instant::now();
    let blocks = enumerate_blocks(inst);
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        instance: label.to_string(),
        n: inst.n(),
        algorithm: algo.name().to_string(),
        params: Params::default(),
        objective: None,
        status: "Heuristic".to_string(),
        bound: None,
        gap: None,
        time_first_s: None,
        time_best_s: None,
        time_total_s: 0.0,
        block_count_total: blocks.len(),
        blocks: Vec::new(),
        sweep: None,
    };
    let partition = match algo {
        Algo::Exact => {
            let cfg = SolverConfig {
                time_limit_s: Some(opts.time_limit_s.unwrap_or(DEFAULT_EXACT_LIMIT_S)),
                stop_after_first_feasible_at_s: opts.first_feasible_after_s,
                ..SolverConfig::unlimited()
            };
            report.params.time_limit_s = cfg.time_limit_s;
            report.params.first_feasible_after_s = cfg.stop_after_first_feasible_at_s;
            let r = solve_min_partition(inst, &blocks, &[], &cfg)?;
            report.status = format!("{:?}", r.status);
            report.bound = Some(r.bound);
            report.gap = r.gap;
            report.time_first_s = r.time_first_s;
            report.time_best_s = r.time_best_s;
            r.incumbent
        }
        Algo::Greedy => {
            let p = greedy_partition(inst);
            let t = start.elapsed().as_secs_f64();
            report.time_first_s = Some(t);
            report.time_best_s = Some(t);
            Some(p)
        }
        Algo::Heuristic => {
            let cfg = HeuristicConfig {
                l: opts.l.map_or(LChoice::Sweep, LChoice::Fixed),
                per_solve: SolverConfig {
                    time_limit_s: opts.time_limit_s,
                    stop_after_first_feasible_at_s: Some(
                        opts.first_feasible_after_s
                            .unwrap_or(mcsp::heuristic::DEFAULT_FIRST_FEASIBLE_S),
                    ),
                    ..SolverConfig::unlimited()
                },
                parallel: opts.parallel,
            };
            report.params.time_limit_s = cfg.per_solve.time_limit_s;
            report.params.first_feasible_after_s = cfg.per_solve.stop_after_first_feasible_at_s;
            report.params.l = opts.l;
            report.params.sweep = Some(opts.l.is_none());
            let r = sweep_l(inst, &blocks, &cfg)?;
            let t = start.elapsed().as_secs_f64();
            report.time_first_s = Some(t);
            report.time_best_s = Some(t);
            report.sweep = Some(r.entries);
            Some(r.best)
        }
    };
    if let Some(p) = &partition {
        check(inst, p)?;
        report.objective = Some(p.len());
        report.blocks = Report::blocks_of(inst, p);
    }
    report.time_total_s = start.elapsed().as_secs_f64();
    Ok(report)
}
