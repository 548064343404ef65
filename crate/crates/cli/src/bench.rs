//! `bench`: every algorithm on every instance of a directory, one CSV row per
//! run plus one averages row per algorithm.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::anyhow;
use clap::Args;
use log::warn;

use crate::run::{self, Algo, DEFAULT_EXACT_LIMIT_S};
use crate::{io_err, read_instance, write_output, CliResult, Failure, LimitArgs, INPUT};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of instance files (`*.txt`).
    dir: PathBuf,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "greedy,heuristic"
    )]
    algos: Vec<Algo>,
    /// Total wall-clock budget in seconds. Runs not started when it expires
    /// are skipped; running ones get the remaining time as their limit.
    #[arg(long)]
    budget: Option<f64>,
    /// Concurrent runs.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    limits: LimitArgs,
    /// CSV output file; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Directory for per-run JSON reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Row {
    instance: String,
    n: usize,
    algorithm: &'static str,
    value: Option<usize>,
    time_s: f64,
    gap: Option<f64>,
    block_count: usize,
    status: String,
}

const HEADER: &str = "instance,n,algorithm,value,time_s,gap,block_count,status";

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, k) = xs.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    (k > 0).then(|| sum / k as f64)
}

fn table(rows: &[Row], algos: &[Algo]) -> String {
    let mut out = format!("{HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{},{},{}",
            field(&r.instance),
            r.n,
            r.algorithm,
            opt(r.value),
            r.time_s,
            opt(r.gap.map(|g| format!("{g:.6}"))),
            r.block_count,
            r.status
        );
    }
    for a in algos {
        let mine: Vec<&Row> = rows.iter().filter(|r| r.algorithm == a.name()).collect();
        if mine.is_empty() {
            continue;
        }
        let f = |v: Option<f64>| opt(v.map(|x| format!("{x:.6}")));
        let _ = writeln!(
            out,
            "average,{},{},{},{},{},{},",
            f(mean(mine.iter().map(|r| r.n as f64))),
            a.name(),
            f(mean(mine.iter().filter_map(|r| r.value.map(|v| v as f64)))),
            f(mean(mine.iter().map(|r| r.time_s))),
            f(mean(mine.iter().filter_map(|r| r.gap))),
            f(mean(mine.iter().map(|r| r.block_count as f64))),
        );
    }
    out
}

pub fn cmd_bench(a: BenchArgs) -> CliResult {
    if a.workers == 0 {
        return Err(Failure::usage("--workers must be at least 1"));
    }
    if let Some(b) = a.budget {
        if !(b >= 0.0) {
            return Err(Failure::usage(format!(
                "--budget must be non-negative, got {b}"
            )));
        }
    }
    let opts = a.limits.options(false)?;
    let entries =
        fs::read_dir(&a.dir).map_err(|e| io_err(e, format!("reading {}", a.dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    if files.is_empty() {
        warn!("no instance files (*.txt) in {}", a.dir.display());
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| io_err(e, format!("creating {}", dir.display())))?;
    }

    let tasks: Vec<(usize, Algo)> = (0..files.len())
        .flat_map(|i| a.algos.iter().map(move |&g| (i, g)))
        .collect();
    let results: Mutex<Vec<Option<Row>>> = Mutex::new((0..tasks.len()).map(|_| None).collect());
    let failures = Mutex::new(Vec::new());
    let skipped = AtomicUsize::new(0);
    let next = AtomicUsize::new(0);
    let start = Instant::now();

    let work = || loop {
        let t = next.fetch_add(1, Ordering::SeqCst);
        let Some(&(fi, algo)) = tasks.get(t) else {
            break;
        };
        let mut o = opts.clone();
        if algo == Algo::Exact && o.time_limit_s.is_none() {
            o.time_limit_s = Some(DEFAULT_EXACT_LIMIT_S);
        }
        if let Some(budget) = a.budget {
            let left = budget - start.elapsed().as_secs_f64();
            if left <= 0.0 {
                skipped.fetch_add(1, Ordering::SeqCst);
                continue;
            }
            o = o.capped(left);
        }
        let path = &files[fi];
        let name = path
            .file_name()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        let outcome = read_instance(path).and_then(|inst| run::run(&inst, &name, algo, &o));
        match outcome {
            Ok(rep) => {
                if let Some(dir) = &a.out {
                    let stem = path
                        .file_stem()
                        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
                    let target = dir.join(format!("{stem}.{}.json", algo.name()));
                    if let Err(f) = write_output(Some(&target), &rep.to_json()) {
                        failures.lock().unwrap().push(f);
                    }
                }
                results.lock().unwrap()[t] = Some(Row {
                    instance: name,
                    n: rep.n,
                    algorithm: algo.name(),
                    value: rep.objective,
                    time_s: rep.time_total_s,
                    gap: rep.gap,
                    block_count: rep.block_count_total,
                    status: rep.status,
                });
            }
            Err(mut f) => {
                f.err = f
                    .err
                    .context(format!("{} with {}", path.display(), algo.name()));
                failures.lock().unwrap().push(f);
            }
        }
    };
    std::thread::scope(|s| {
        for _ in 0..a.workers {
            s.spawn(work);
        }
    });

    let rows: Vec<Row> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .flatten()
        .collect();
    write_output(a.csv.as_deref(), &table(&rows, &a.algos))?;

    let skipped = skipped.into_inner();
    if skipped > 0 {
        warn!(
            "budget of {} s exhausted: {skipped} of {} runs skipped, table holds the {} completed",
            a.budget.unwrap_or(0.0),
            tasks.len(),
            rows.len()
        );
    }
    let mut failures = failures.into_inner().unwrap();
    match failures.len() {
        0 => Ok(()),
        1 => Err(failures.pop().unwrap()),
        k => {
            for f in &failures {
                warn!("{:#}", f.err);
            }
            let code = failures.iter().map(|f| f.code).max().unwrap_or(INPUT);
            Err(Failure::new(code, anyhow!("{k} runs failed")))
        }
    }
}
