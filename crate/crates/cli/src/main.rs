//! `mcsp` command-line tool.
//!
//! Exit codes: 0 success, 1 usage, 2 input or format error, 3 infeasible
//! input or failed validation, 4 internal error.

mod bench;
mod report;
mod run;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};

use mcsp::instgen::{instance_file_name, DNA};
use mcsp::{
    build_ilp_orig, build_ilp_ph1, build_ilp_ph2, compatible_blocks, enumerate_blocks,
    generate_instance, import_solution, length_histogram, phase1_weight, validate_blocks, BlockSet,
    CommonBlock, Formulation, IlpModel, Instance, Partition, Validity,
};

use report::{BlocksOnly, Params, Report, SCHEMA_VERSION};
use run::{Algo, RunOptions};

pub const USAGE: u8 = 1;
pub const INPUT: u8 = 2;
pub const INVALID: u8 = 3;
pub const INTERNAL: u8 = 4;

/// Seed used by `gen` when `--seed` is omitted.
const DEFAULT_SEED: u64 = 1;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub err: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, err: anyhow::Error) -> Self {
        Self { code, err }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Self::new(USAGE, anyhow!(msg.into()))
    }
}

impl From<mcsp::Error> for Failure {
    fn from(e: mcsp::Error) -> Self {
        use mcsp::Error::*;
        let code = match &e {
            EmptyString
            | InvalidSymbol(_)
            | Format(_)
            | LpParse { .. }
            | UnknownVariable(_)
            | NonBinaryValue { .. } => INPUT,
            LengthMismatch(..)
            | NotRelated { .. }
            | Infeasible
            | NotACommonBlock { .. }
            | ForcedOverlap
            | ForcedNotInSet { .. }
            | ConstraintViolation(_)
            | InvalidSolution(_) => INVALID,
            LengthOutOfRange { .. }
            | InvalidConfig(_)
            | ZeroLength
            | EmptyAlphabet
            | EmptyBlockSet => USAGE,
            IndexOutOfRange { .. } | WeightTooSmall { .. } | TooLarge { .. } => INTERNAL,
        };
        Self::new(code, e.into())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn io_err(e: std::io::Error, what: String) -> Failure {
    Failure::new(INPUT, anyhow::Error::new(e).context(what))
}

#[derive(Parser, Debug)]
#[command(
    name = "mcsp",
    version,
    about = "Minimum common string partition toolkit"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random related instance.
    Gen(GenArgs),
    /// List the common blocks of an instance.
    Blocks(BlocksArgs),
    /// Solve an instance.
    Solve(SolveArgs),
    /// Write an integer-programming model in LP format.
    ExportLp(ExportArgs),
    /// Read an external solver's assignment for an exported model.
    Import(ImportArgs),
    /// Run algorithms over a directory of instances and tabulate the results.
    Bench(bench::BenchArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// String length.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Symbols to draw from, each listed once.
    #[arg(long, default_value_t = DNA.iter().collect())]
    alphabet: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file or directory; `-` for stdout. Defaults to
    /// `rand_<n>_<seed>.txt` in the working directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BlocksArgs {
    instance: PathBuf,
    /// Keep only blocks of at least this length.
    #[arg(long, default_value_t = 1)]
    min_len: usize,
    /// Print a `length,count` histogram instead of the blocks.
    #[arg(long)]
    histogram: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct LimitArgs {
    /// Time limit in seconds: whole search for `exact` (default 3600), each
    /// phase solve for `heuristic` (default none).
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Stop a solve once this many seconds have passed and a solution is
    /// known (heuristic default 50).
    #[arg(long)]
    pub first_feasible_after: Option<f64>,
    /// Minimum phase-1 block length for `heuristic`; sweeps all lengths
    /// when omitted.
    #[arg(long, conflicts_with = "sweep")]
    pub l: Option<usize>,
    /// Try every admissible `l` and keep the best (default).
    #[arg(long)]
    pub sweep: bool,
}

impl LimitArgs {
    pub fn options(&self, parallel: bool) -> CliResult<RunOptions> {
        for v in [self.time_limit, self.first_feasible_after]
            .into_iter()
            .flatten()
        {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Failure::usage(format!(
                    "time values must be non-negative, got {v}"
                )));
            }
        }
        Ok(RunOptions {
            time_limit_s: self.time_limit,
            first_feasible_after_s: self.first_feasible_after,
            l: self.l,
            parallel,
        })
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Heuristic)]
    algo: Algo,
    #[command(flatten)]
    limits: LimitArgs,
    /// Run the values of a sweep concurrently.
    #[arg(long)]
    parallel: bool,
    /// Print the JSON report.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Print the per-`l` table of a heuristic run as CSV.
    #[arg(long)]
    csv: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Orig,
    Ph1,
    Ph2,
}

#[derive(Args, Debug)]
struct ModelArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Minimum block length of the phase-1 model.
    #[arg(long)]
    l: Option<usize>,
    /// Phase-1 solution for `ph2`: a JSON report, or an assignment file of
    /// the `ph1` model built with `--l`.
    #[arg(long)]
    phase1: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ImportArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Assignment file, one `<variable> <value>` pair per line.
    #[arg(long)]
    solution: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn read_instance(path: &Path) -> CliResult<Instance> {
    let text =
        fs::read_to_string(path).map_err(|e| io_err(e, format!("reading {}", path.display())))?;
    Instance::parse(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.err = f.err.context(format!("in {}", path.display()));
        f
    })
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).map_err(|e| io_err(e, format!("writing {}", p.display())))
        }
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| io_err(e, "writing stdout".into()))
        }
    }
}

fn cmd_gen(a: GenArgs) -> CliResult {
    let alphabet: Vec<char> = a.alphabet.chars().collect();
    let mut seen = std::collections::BTreeSet::new();
    if let Some(c) = alphabet.iter().find(|c| !seen.insert(**c)) {
        return Err(Failure::usage(format!(
            "symbol {c:?} listed twice in --alphabet"
        )));
    }
    let inst = generate_instance(a.n as usize, &alphabet, a.seed)?;
    let name = instance_file_name(inst.n(), a.seed);
    let path = match a.out {
        Some(p) if p == Path::new("-") => return write_output(None, &inst.to_text()),
        Some(p) if p.is_dir() => p.join(name),
        Some(p) => p,
        None => PathBuf::from(name),
    };
    write_output(Some(&path), &inst.to_text())?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_blocks(a: BlocksArgs) -> CliResult {
    let inst = read_instance(&a.instance)?;
    let blocks = enumerate_blocks(&inst).filter_min_length(a.min_len);
    let text = if a.histogram {
        length_histogram(&blocks).to_csv()
    } else {
        blocks.dump(&inst)
    };
    write_output(a.out.as_deref(), &text)
}

fn cmd_solve(a: SolveArgs) -> CliResult {
    let inst = read_instance(&a.instance)?;
    if a.csv && a.algo != Algo::Heuristic {
        return Err(Failure::usage("--csv applies to --algo heuristic only"));
    }
    let opts = a.limits.options(a.parallel)?;
    let label = a.instance.display().to_string();
    let r = run::run(&inst, &label, a.algo, &opts)?;
    if let Some(p) = &a.out {
        write_output(Some(p), &r.to_json())?;
    }
    let text = if a.json {
        r.to_json()
    } else if a.csv {
        mcsp::heuristic::sweep_csv(r.sweep.as_deref().unwrap_or(&[]))
    } else {
        report::summary(&r)
    };
    write_output(None, &text)
}

/// Builds the requested model over the instance's full block set.
fn build_model(inst: &Instance, a: &ModelArgs) -> CliResult<IlpModel> {
    let blocks = enumerate_blocks(inst);
    match a.model {
        ModelKind::Orig => Ok(build_ilp_orig(inst, &blocks)?),
        ModelKind::Ph1 => {
            let l =
                a.l.ok_or_else(|| Failure::usage("--model ph1 requires --l"))?;
            Ok(phase1_model(inst, &blocks, l)?)
        }
        ModelKind::Ph2 => {
            let path = a
                .phase1
                .as_deref()
                .ok_or_else(|| Failure::usage("--model ph2 requires --phase1 <solution file>"))?;
            let forced = read_phase1(inst, &blocks, path, a.l)?;
            let partial = Partition::from_blocks(inst.n(), forced.iter().copied())
                .map_err(|v| Failure::new(INVALID, anyhow!("phase-1 solution is invalid: {v}")))?;
            let mut reduced = compatible_blocks(&blocks, &partial).as_slice().to_vec();
            reduced.extend_from_slice(&forced);
            Ok(build_ilp_ph2(
                inst,
                &BlockSet::from_blocks(reduced),
                &forced,
            )?)
        }
    }
}

fn phase1_model(inst: &Instance, blocks: &BlockSet, l: usize) -> mcsp::Result<IlpModel> {
    let max = mcsp::l_max(blocks)?;
    if l < 2 || l > max {
        return Err(mcsp::Error::LengthOutOfRange { l, min: 2, max });
    }
    build_ilp_ph1(inst, &blocks.filter_min_length(l), phase1_weight(inst.n()))
}

fn read_phase1(
    inst: &Instance,
    blocks: &BlockSet,
    path: &Path,
    l: Option<usize>,
) -> CliResult<Vec<CommonBlock>> {
    let text =
        fs::read_to_string(path).map_err(|e| io_err(e, format!("reading {}", path.display())))?;
    let chosen: Vec<CommonBlock> = if text.trim_start().starts_with('{') {
        let parsed: BlocksOnly = serde_json::from_str(&text).map_err(|e| {
            Failure::new(
                INPUT,
                anyhow::Error::new(e).context(format!("parsing {}", path.display())),
            )
        })?;
        parsed.blocks.iter().map(|b| b.block()).collect()
    } else {
        let l = l.ok_or_else(|| {
            Failure::usage("an assignment file given to --phase1 needs the --l of its ph1 model")
        })?;
        let model = phase1_model(inst, blocks, l)?;
        import_solution(&model, &text)?.blocks().to_vec()
    };
    match validate_blocks(inst, &chosen) {
        Validity::Invalid(v) => Err(Failure::new(
            INVALID,
            anyhow!("phase-1 solution in {} is invalid: {v}", path.display()),
        )),
        _ => Ok(chosen),
    }
}

fn cmd_export(a: ExportArgs) -> CliResult {
    let inst = read_instance(&a.model.instance)?;
    let model = build_model(&inst, &a.model)?;
    write_output(a.out.as_deref(), &model.to_lp_string())
}

fn cmd_import(a: ImportArgs) -> CliResult {
    let inst = read_instance(&a.model.instance)?;
    let model = build_model(&inst, &a.model)?;
    let path = &a.solution;
    let text =
        fs::read_to_string(path).map_err(|e| io_err(e, format!("reading {}", path.display())))?;
    let p = import_solution(&model, &text)?;
    let validity = validate_blocks(&inst, p.blocks());
    let complete_required = !matches!(model.formulation, Formulation::Phase1 { .. });
    match validity {
        Validity::Complete => {}
        Validity::Partial if !complete_required => {}
        v => {
            return Err(Failure::new(
                INVALID,
                anyhow!("imported solution does not form a partition: {v:?}"),
            ))
        }
    }
    let r = Report {
        schema_version: SCHEMA_VERSION,
        instance: a.model.instance.display().to_string(),
        n: inst.n(),
        algorithm: "import".to_string(),
        params: Params {
            l: a.model.l,
            model: Some(model.formulation.label().to_string()),
            ..Params::default()
        },
        objective: Some(p.len()),
        status: if complete_required {
            "Imported"
        } else {
            "ImportedPartial"
        }
        .to_string(),
        bound: None,
        gap: None,
        time_first_s: None,
        time_best_s: None,
        time_total_s: 0.0,
        block_count_total: model.blocks.len(),
        blocks: Report::blocks_of(&inst, &p),
        sweep: None,
    };
    if let Some(o) = &a.out {
        write_output(Some(o), &r.to_json())?;
    }
    write_output(
        None,
        &if a.json {
            r.to_json()
        } else {
            report::summary(&r)
        },
    )
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::Blocks(a) => cmd_blocks(a),
        Command::Solve(a) => cmd_solve(a),
        Command::ExportLp(a) => cmd_export(a),
        Command::Import(a) => cmd_import(a),
        Command::Bench(a) => bench::cmd_bench(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
