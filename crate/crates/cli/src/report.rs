//! JSON result report written by `solve`, `import` and `bench`.

use serde::{Deserialize, Serialize};

use mcsp::heuristic::SweepEntry;
use mcsp::{CommonBlock, Instance, Partition};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockRecord {
    pub text: String,
    pub k1: usize,
    pub k2: usize,
}

impl BlockRecord {
    pub fn new(inst: &Instance, b: &CommonBlock) -> Self {
        Self {
            text: b.text(inst),
            k1: b.k1,
            k2: b.k2,
        }
    }

    pub fn block(&self) -> CommonBlock {
        CommonBlock::new(self.k1, self.k2, self.text.chars().count())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_feasible_after_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub instance: String,
    pub n: usize,
    pub algorithm: String,
    pub params: Params,
    /// Number of blocks in the solution; `null` when none was found.
    pub objective: Option<usize>,
    /// `ProvenOptimal`, `FeasibleTimeLimit`, `NoSolutionTimeLimit`, or
    /// `Heuristic` for results without a bound.
    pub status: String,
    pub bound: Option<i64>,
    pub gap: Option<f64>,
    pub time_first_s: Option<f64>,
    pub time_best_s: Option<f64>,
    pub time_total_s: f64,
    pub block_count_total: usize,
    pub blocks: Vec<BlockRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepEntry>>,
}

/// The part of a report read back as a phase-1 solution.
#[derive(Debug, Deserialize)]
pub struct BlocksOnly {
    pub blocks: Vec<BlockRecord>,
}

impl Report {
    pub fn blocks_of(inst: &Instance, p: &Partition) -> Vec<BlockRecord> {
        p.blocks()
            .iter()
            .map(|b| BlockRecord::new(inst, b))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serialisable");
        s.push('\n');
        s
    }
}

/// Human-readable summary for the terminal.
pub fn summary(r: &Report) -> String {
    let mut out = format!(
        "{} on {} (n={}): objective {} [{}]",
        r.algorithm,
        r.instance,
        r.n,
        r.objective.map_or("-".to_string(), |v| v.to_string()),
        r.status
    );
    if let Some(b) = r.bound {
        out.push_str(&format!(", bound {b}"));
    }
    if let Some(g) = r.gap {
        out.push_str(&format!(", gap {:.4}", g));
    }
    out.push_str(&format!(
        ", {:.3} s, |B|={}\n",
        r.time_total_s, r.block_count_total
    ));
    for b in &r.blocks {
        out.push_str(&format!("{}\t{}\t{}\n", b.text, b.k1, b.k2));
    }
    out
}
