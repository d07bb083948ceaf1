use std::process::{Command, Output};

use serde_json::Value;

fn schreier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schreier"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = schreier(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn first_line(args: &[&str]) -> String {
    stdout(args).lines().next().unwrap_or_default().to_string()
}

fn record(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = schreier(&full);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    (v, out.status.code().unwrap())
}

#[test]
fn member_examples() {
    assert_eq!(first_line(&["member", "w", "{3,5,9}"]), "Member");
    assert_eq!(first_line(&["member", "w", "{3,5}"]), "ProperInitial");
    assert_eq!(first_line(&["member", "0", "{}"]), "Member");
    assert_eq!(first_line(&["member", "w", "{1,2}"]), "ExtendsMember(1)");
    let text = stdout(&["member", "w", "{3,5,9}"]);
    assert_eq!(text.lines().nth(1), Some("trace: w -> 2 -> 1 -> 0"));
}

#[test]
fn decompose_examples() {
    assert_eq!(
        first_line(&["decompose", "w", "{1,2,3,4,5}"]),
        "[{1},{2,3}] trailing {4,5} type 2"
    );
    assert_eq!(
        first_line(&["decompose", "w", "evens", "--blocks", "2"]),
        "{2,4} {6,8,10,12,14,16}"
    );
    assert_eq!(first_line(&["decompose", "1", "{7}"]), "[{7}] trailing {} type 1");
    assert_eq!(schreier(&["decompose", "w", "evens"]).status.code(), Some(1));
}

#[test]
fn arithmetic_examples() {
    assert_eq!(first_line(&["step", "w^2", "3"]), "w*2+2");
    assert_eq!(first_line(&["step", "w", "4"]), "3");
    assert_eq!(first_line(&["fund", "w^2", "3"]), "w*3");
    assert_eq!(first_line(&["enumerate", "w", "6", "--count"]), "8");
    assert_eq!(first_line(&["enumerate", "3", "8", "--count"]), "56");
    let listed = stdout(&["enumerate", "w", "6"]);
    assert_eq!(listed.lines().count(), 8);
    assert_eq!(listed.lines().next(), Some("{1}"));
}

#[test]
fn index_example() {
    assert_eq!(
        first_line(&["index", "substar(A_3)", "all", "--ladder", "1,2,3,4,5"]),
        "Exactly 4"
    );
    let (v, code) = record(&["index", "substar(A_w)", "all", "--ladder", "1,2,3"]);
    assert_eq!(code, 3);
    assert_eq!(v["index"]["kind"], "AtLeast");
    assert_eq!(v["index"]["ordinal"], "4");
}

#[test]
fn search_commands() {
    let (v, code) = record(&["dichotomy", "1", "card(\"min%2==0\")", "all", "--target", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"], "Found");
    assert_eq!(v["horn"], "Inside");
    assert_eq!(v["L"], serde_json::json!([2, 4, 6, 8, 10, 12, 14, 16]));
    assert_eq!(v["policy"], "majority");
    assert_eq!(v["horizon"], 40);

    let (v, code) = record(&[
        "dichotomy",
        "2",
        "card(\"|s|<=min\")",
        "all",
        "--horizon",
        "8",
        "--target",
        "8",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["outcome"], "Failure");

    let (v, code) = record(&["classify", "substar(A_3)", "all", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["case_tag"], "Case2i");

    let (v, code) = record(&["spreadcheck", "1", "drop:2:all"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);

    let (v, code) = record(&["segment", "tree(A_w)", "w+1", "all"]);
    assert_eq!(code, 0);
    assert_eq!(v["segment"], serde_json::json!([1, 2, 3]));

    let (v, code) = record(&["lemma28", "3", "1", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);

    let (v, code) = record(&[
        "partition",
        "1",
        "all",
        "card(\"min%2==0\")",
        "card(\"min%2==1\")",
        "empty",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["part"], 0);

    let (v, code) = record(&[
        "nwprobe",
        "card(\"sum<100\")",
        "arith:10:1",
        "--horizon",
        "20",
        "--target",
        "10",
        "--ladder",
        "1,2,3,4,5,6,7,8",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["horn"], "Segments");
}

#[test]
fn records_carry_op_inputs_and_config() {
    let (v, _) = record(&["step", "w^2", "3"]);
    assert_eq!(v["op"], "step");
    assert_eq!(v["inputs"]["xi"], "w^2");
    assert_eq!(v["config"]["budget"], 1_000_000);
    assert_eq!(v["step"], "w*2+2");
}

#[test]
fn errors_and_echo() {
    for bad in [
        vec!["member", "w", "{3,x}"],
        vec!["step", "w+", "3"],
        vec!["frobnicate"],
        vec!["member", "w", "{1}", "--no-such-flag"],
        vec!["index", "nonsense(", "all"],
    ] {
        assert_eq!(schreier(&bad).status.code(), Some(1), "{bad:?}");
    }
    let out = schreier(&["step", "w", "3"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.starts_with("step: horizon=40 target=6 budget=1000000 policy=majority"),
        "{err}"
    );
}

#[test]
fn output_is_deterministic() {
    let args = ["dichotomy", "w", "card(\"|s|<=min\")", "all", "--json"];
    let a = schreier(&args).stdout;
    let b = schreier(&args).stdout;
    assert_eq!(a, b);
}
