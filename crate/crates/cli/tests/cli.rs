use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mcsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcsp"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn example(dir: &TempDir) -> String {
    let p = dir.path().join("ex.txt");
    fs::write(&p, "AGACTG\nACTAGG\n").unwrap();
    p.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_related_instance() {
    let dir = TempDir::new().unwrap();
    let o = mcsp(&["gen", "--n", "6", "--seed", "1", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = dir.path().join("rand_6_1.txt");
    assert_eq!(stdout(&o).trim(), s(&path));
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let sorted = |x: &str| {
        let mut c: Vec<char> = x.chars().collect();
        c.sort();
        c
    };
    assert_eq!(lines[0].len(), 6);
    assert_eq!(sorted(lines[0]), sorted(lines[1]));

    // same seed, same file
    let again = mcsp(&["gen", "--n", "6", "--seed", "1", "--out", "-"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn gen_usage_errors() {
    assert_eq!(code(&mcsp(&["gen", "--n", "0"])), 1);
    assert_eq!(
        code(&mcsp(&[
            "gen",
            "--n",
            "5",
            "--alphabet",
            "AA",
            "--out",
            "-"
        ])),
        1
    );
    assert_eq!(
        code(&mcsp(&["gen", "--n", "5", "--alphabet", "", "--out", "-"])),
        1
    );
    assert_eq!(code(&mcsp(&["frobnicate"])), 1);
    assert_eq!(code(&mcsp(&["--help"])), 0);
}

#[test]
fn gen_then_blocks_at_scale() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("big.txt");
    let o = mcsp(&["gen", "--n", "1000", "--seed", "7", "--out", s(&path)]);
    assert_eq!(code(&o), 0);
    let o = mcsp(&["blocks", s(&path), "--histogram"]);
    assert_eq!(code(&o), 0);
    let total: usize = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert!((317_000..=351_000).contains(&total), "|B| = {total}");
}

#[test]
fn blocks_dump_and_histogram() {
    let dir = TempDir::new().unwrap();
    let ex = example(&dir);
    let o = mcsp(&["blocks", &ex]);
    assert_eq!(stdout(&o).lines().count(), 14);
    let o = mcsp(&["blocks", &ex, "--min-len", "2"]);
    assert_eq!(stdout(&o), "ACT\t3\t1\nAG\t1\t4\nAC\t3\t1\nCT\t4\t2\n");
    let o = mcsp(&["blocks", &ex, "--histogram"]);
    assert_eq!(stdout(&o), "length,count\n1,10\n2,3\n3,1\n");
}

#[test]
fn solve_exact_json() {
    let dir = TempDir::new().unwrap();
    let ex = example(&dir);
    let o = mcsp(&["solve", &ex, "--algo", "exact", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["algorithm"], "exact");
    assert_eq!(v["objective"], 3);
    assert_eq!(v["status"], "ProvenOptimal");
    assert_eq!(v["gap"], 0.0);
    assert_eq!(v["bound"], 3);
    assert_eq!(v["block_count_total"], 14);
    assert_eq!(v["params"]["time_limit_s"], 3600.0);
    for key in ["time_first_s", "time_best_s", "time_total_s"] {
        assert!(v[key].is_number(), "{key}");
    }
    let texts: Vec<&str> = v["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["text"].as_str().unwrap())
        .collect();
    assert_eq!(texts, ["ACT", "AG", "G"]);
}

#[test]
fn solve_greedy_and_heuristic() {
    let dir = TempDir::new().unwrap();
    let ex = example(&dir);
    let out = dir.path().join("r.json");
    let o = mcsp(&["solve", &ex, "--algo", "greedy", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("objective 3"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["objective"], 3);

    let o = mcsp(&["solve", &ex, "--algo", "heuristic", "--sweep", "--csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("2,4,3,true,true,3,"));
    assert!(rows[2].starts_with("3,1,7,true,true,3,"));

    let o = mcsp(&["solve", &ex, "--l", "3", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["objective"], 3);
    assert_eq!(v["params"]["l"], 3);
    assert_eq!(v["sweep"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_errors() {
    let dir = TempDir::new().unwrap();
    let ex = example(&dir);
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "AAC\nACC\n").unwrap();
    let o = mcsp(&["solve", s(&bad)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("not related"));

    let short = dir.path().join("short.txt");
    fs::write(&short, "AC\nCAT\n").unwrap();
    assert_eq!(code(&mcsp(&["solve", s(&short)])), 3);

    let junk = dir.path().join("junk.txt");
    fs::write(&junk, "ACGT\n").unwrap();
    assert_eq!(code(&mcsp(&["solve", s(&junk)])), 2);

    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&mcsp(&["solve", s(&missing)])), 2);

    assert_eq!(code(&mcsp(&["solve", &ex, "--algo", "simplex"])), 1);
    assert_eq!(code(&mcsp(&["solve", &ex, "--l", "9"])), 1);
    assert_eq!(
        code(&mcsp(&[
            "solve",
            &ex,
            "--time-limit",
            "-1",
            "--algo",
            "exact"
        ])),
        1
    );
    assert_eq!(code(&mcsp(&["solve", &ex, "--algo", "exact", "--csv"])), 1);
}

#[test]
fn export_models() {
    let dir = TempDir::new().unwrap();
    let ex = example(&dir);
    let lp = dir.path().join("orig.lp");
    let o = mcsp(&["export-lp", &ex, "--model", "orig", "--out", s(&lp)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&lp).unwrap();
    let prog = mcsp::lp::LinearProgram::parse_lp(&text).unwrap();
    assert_eq!(prog.num_vars(), 14);
    assert_eq!(prog.constraints.len(), 13);

    let o = mcsp(&["export-lp", &ex, "--model", "ph1", "--l", "2"]);
    let prog = mcsp::lp::LinearProgram::parse_lp(&stdout(&o)).unwrap();
    assert_eq!(prog.num_vars(), 4);
    assert_eq!(prog.objective, [20, 13, 13, 13]);

    assert_eq!(code(&mcsp(&["export-lp", &ex, "--model", "ph2"])), 1);
    assert_eq!(code(&mcsp(&["export-lp", &ex, "--model", "ph1"])), 1);
}

#[test]
fn external_solver_round_trip() {
    let dir = TempDir::new().unwrap();
    let ex = example(&dir);
    // phase 1 answered by "an external solver": ACT and AG
    let sol1 = dir.path().join("ph1.sol");
    fs::write(&sol1, "# ph1\nx1 1\nx2 1\nx3 0\n").unwrap();
    let p1 = dir.path().join("ph1.json");
    let o = mcsp(&[
        "import",
        &ex,
        "--model",
        "ph1",
        "--l",
        "2",
        "--solution",
        s(&sol1),
        "--json",
        "--out",
        s(&p1),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["objective"], 2);
    assert_eq!(v["status"], "ImportedPartial");

    // B_ph2 = {ACT, AG} plus the only compatible block, G(6,6)
    let o = mcsp(&["export-lp", &ex, "--model", "ph2", "--phase1", s(&p1)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let prog = mcsp::lp::LinearProgram::parse_lp(&stdout(&o)).unwrap();
    assert_eq!(prog.num_vars(), 3);
    assert!(prog.constraints.iter().any(|c| c.name == "fix_x1"));
    // the assignment file works too when its l is given
    let o = mcsp(&[
        "export-lp",
        &ex,
        "--model",
        "ph2",
        "--phase1",
        s(&sol1),
        "--l",
        "2",
    ]);
    assert_eq!(
        mcsp::lp::LinearProgram::parse_lp(&stdout(&o)).unwrap(),
        prog
    );

    let sol2 = dir.path().join("ph2.sol");
    fs::write(&sol2, "x1 1\nx2 1\nx3 1\n").unwrap();
    let o = mcsp(&[
        "import",
        &ex,
        "--model",
        "ph2",
        "--phase1",
        s(&p1),
        "--solution",
        s(&sol2),
        "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["objective"], 3);

    // an assignment that leaves positions uncovered is rejected
    let partial = dir.path().join("partial.sol");
    fs::write(&partial, "x1 1\nx2 1\n").unwrap();
    let o = mcsp(&["import", &ex, "--model", "orig", "--solution", s(&partial)]);
    assert_eq!(code(&o), 3);
    let garbage = dir.path().join("garbage.sol");
    fs::write(&garbage, "x99 1\n").unwrap();
    let o = mcsp(&["import", &ex, "--model", "orig", "--solution", s(&garbage)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bench_table_and_reports() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("inst");
    fs::create_dir(&inst).unwrap();
    for seed in 1..=3 {
        let o = mcsp(&[
            "gen",
            "--n",
            "10",
            "--seed",
            &seed.to_string(),
            "--out",
            s(&inst),
        ]);
        assert_eq!(code(&o), 0);
    }
    let csv = dir.path().join("table.csv");
    let json = dir.path().join("json");
    let o = mcsp(&[
        "bench",
        s(&inst),
        "--algos",
        "greedy,heuristic",
        "--workers",
        "2",
        "--csv",
        s(&csv),
        "--out",
        s(&json),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(
        lines[0],
        "instance,n,algorithm,value,time_s,gap,block_count,status"
    );
    let data: Vec<&&str> = lines[1..]
        .iter()
        .filter(|l| !l.starts_with("average"))
        .collect();
    let avg: Vec<&&str> = lines[1..]
        .iter()
        .filter(|l| l.starts_with("average"))
        .collect();
    assert_eq!(data.len(), 6);
    assert_eq!(avg.len(), 2);
    assert!(data[0].starts_with("rand_10_1.txt,10,greedy,"));
    assert!(data[1].starts_with("rand_10_1.txt,10,heuristic,"));
    assert_eq!(fs::read_dir(&json).unwrap().count(), 6);
    let v: Value =
        serde_json::from_str(&fs::read_to_string(json.join("rand_10_2.heuristic.json")).unwrap())
            .unwrap();
    assert_eq!(v["n"], 10);
}

#[test]
fn bench_empty_directory() {
    let dir = TempDir::new().unwrap();
    let o = mcsp(&["bench", s(dir.path())]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "instance,n,algorithm,value,time_s,gap,block_count,status\n"
    );
    assert!(stderr(&o).contains("no instance files"));
}

#[test]
fn bench_budget_keeps_finished_rows() {
    let dir = TempDir::new().unwrap();
    for seed in 1..=2 {
        mcsp(&[
            "gen",
            "--n",
            "8",
            "--seed",
            &seed.to_string(),
            "--out",
            s(dir.path()),
        ]);
    }
    // the hard instance exhausts the budget; the runs queued after it are skipped
    let hard = dir.path().join("zz_hard.txt");
    mcsp(&["gen", "--n", "400", "--seed", "3", "--out", s(&hard)]);
    let extra = dir.path().join("zzz_after.txt");
    fs::write(&extra, "AB\nBA\n").unwrap();
    let o = mcsp(&[
        "bench",
        s(dir.path()),
        "--algos",
        "greedy,exact",
        "--budget",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let data: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with("average"))
        .collect();
    assert!(data.iter().any(|l| l.starts_with("rand_8_1.txt,8,exact,")));
    assert!(data
        .iter()
        .any(|l| l.starts_with("zz_hard.txt,400,exact,") && l.ends_with("FeasibleTimeLimit")));
    assert!(!data.iter().any(|l| l.starts_with("zzz_after.txt")));
    assert!(stderr(&o).contains("budget"));
}
