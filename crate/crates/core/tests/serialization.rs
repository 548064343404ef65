use mcsp::{enumerate_blocks, solve_max_coverage, solve_min_partition, Instance, SolverConfig};
use serde_json::{json, Value};

#[test]
fn solve_result_json_shape() {
    let inst = Instance::new("AGACTG", "ACTAGG").unwrap();
    let b = enumerate_blocks(&inst);
    let r = solve_min_partition(&inst, &b, &[], &SolverConfig::unlimited()).unwrap();
    let v: Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["sense"], "min");
    assert_eq!(v["status"], "ProvenOptimal");
    assert_eq!(v["objective"], 3);
    assert_eq!(v["bound"], 3);
    assert_eq!(v["block_set_size"], 14);
    assert_eq!(
        v["incumbent"]["blocks"],
        json!([
            {"k1": 3, "k2": 1, "len": 3},
            {"k1": 1, "k2": 4, "len": 2},
            {"k1": 6, "k2": 6, "len": 1}
        ])
    );
    // cover masks are internal
    assert!(v["incumbent"].get("cover1").is_none());

    let r = solve_max_coverage(
        &inst,
        &b.filter_min_length(2),
        7,
        &SolverConfig::unlimited(),
    )
    .unwrap();
    let v: Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["sense"], "max");
    assert_eq!(v["objective"], 33);
}
