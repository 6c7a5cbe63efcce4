//! The command-line front end, run in-process.

use pithresh::cli::{run, RunOutput};
use pithresh::report::{parse_rat, CountReport, TableReport, ThresholdRow};
use pithresh_core::thresholds::table_spec;
use pithresh_core::{Rational, ThresholdBook};

fn example(name: &str) -> String {
    format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn pithresh(args: &[&str]) -> RunOutput {
    run(std::iter::once("pithresh").chain(args.iter().copied()))
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

#[test]
fn thiele_ordered_majority_example() {
    let out = pithresh(&["count", "--method", "thiele-o", &example("etho2.profile")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "thiele-o, S = 3\n1 outcome\n  {A, X, Y}\n");
}

#[test]
fn count_json_lists_committees_and_loads() {
    let out = pithresh(&["--format", "json", "count", "--method", "phragmen", &example("ega3.profile")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r: CountReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(r.seats, 3);
    assert!(!r.committees.is_empty());
    for c in &r.committees {
        assert_eq!(c.members.len(), 3);
        assert!(parse_rat(c.max_load.as_deref().unwrap()).unwrap().is_positive());
    }
}

#[test]
fn tactic_examples_switch_outcome() {
    let party = pithresh(&["count", "--method", "thiele-o", &example("etactic-o-party.profile")]);
    let split = pithresh(&["count", "--method", "thiele-o", &example("etactic-o-split.profile")]);
    assert!(party.stdout.contains("{A, C}"), "{}", party.stdout);
    assert!(split.stdout.contains("{A, B}"), "{}", split.stdout);
}

#[test]
fn check_exit_codes() {
    let bad = pithresh(&["check", "--method", "thiele-o", "--scenario", "same", "--ell", "2", &example("etho2.profile")]);
    assert_eq!(bad.code, 1, "{}{}", bad.stdout, bad.stderr);
    let good = pithresh(&["check", "--method", "thiele-o", "--scenario", "same", "--ell", "1", &example("etho2.profile")]);
    assert_eq!(good.code, 0, "{}{}", good.stdout, good.stderr);
    let none = pithresh(&["check", "--method", "thiele-add", "--scenario", "same", "--ell", "1", &example("ecounter.profile")]);
    assert_eq!(none.code, 2);
    assert!(none.stdout.contains("not an instance"));
}

#[test]
fn check_derives_ejr_targets_from_w() {
    let out = pithresh(&[
        "--json",
        "check",
        "--method",
        "phragmen",
        "--scenario",
        "ejr",
        "--ell",
        "2",
        &example("ebrill5xx.profile"),
    ]);
    assert_eq!(out.code, 1, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["targets"], serde_json::json!(["A", "B"]));
    assert_eq!(v["fraction"], "409/2409");
}

#[test]
fn check_with_explicit_target() {
    let out = pithresh(&[
        "check",
        "--method",
        "thiele-elim",
        "--scenario",
        "pjr",
        "--ell",
        "1",
        "--target",
        "A",
        &example("ethe.profile"),
    ]);
    assert_eq!(out.code, 1, "{}", out.stderr);
    assert!(out.stdout.contains("{B1}"));
}

#[test]
fn weak_solid_coalition_table_cell() {
    let out = pithresh(&["--format", "json", "table", "tho-wpsc"]);
    assert_eq!(out.code, 0);
    let t: TableReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(t.cells.len(), 15);
    assert_eq!(t.get(3, 5).unwrap().value.as_deref(), Some("48/71"));
    let human = pithresh(&["table", "tho-wpsc"]);
    assert!(human.stdout.contains("48/71"));
}

#[test]
fn alpha_four_is_24_over_7() {
    let out = pithresh(&["seq", "--which", "alpha", "--n", "4"]);
    assert_eq!(out.stdout, "24/7\n");
    let out = pithresh(&["seq", "--which", "b", "--n", "6", "--decimals", "3"]);
    assert_eq!(out.stdout, "95/288 (~0.330)\n");
}

#[test]
fn dump_lp_lists_one_constraint_per_line() {
    let out = pithresh(&["--dump-lp", "seq", "--which", "alpha", "--n", "2"]);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "variables: x1 x2 x12");
    assert_eq!(lines[1], "minimize: 1 1 1");
    assert_eq!(lines.iter().filter(|l| l.contains(">=")).count(), 3);
    assert_eq!(*lines.last().unwrap(), "2");
}

#[test]
fn alpha_beyond_the_cap_is_refused() {
    let out = pithresh(&["seq", "--which", "alpha", "--n", "8"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("limit"), "{}", out.stderr);
}

#[test]
fn json_and_csv_round_trip_thresholds_exactly() {
    let spec = table_spec("av-ejr").unwrap();
    let grid = ThresholdBook::new().table(&spec, 5).unwrap();
    let json = pithresh(&["--format", "json", "table", "av-ejr"]);
    let t: TableReport = serde_json::from_str(&json.stdout).unwrap();
    let csv_out = pithresh(&["--format", "csv", "table", "av-ejr"]);
    let rows: Vec<ThresholdRow> =
        csv::Reader::from_reader(csv_out.stdout.as_bytes()).deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows, t.cells);
    for cell in &t.cells {
        let exact = grid[cell.seats - 1][cell.ell - 1].value.clone();
        assert_eq!(cell.value.as_deref().map(|v| parse_rat(v).unwrap()), exact);
    }
    assert_eq!(t.get(3, 5).unwrap().value.as_deref(), Some("5/8"));
}

#[test]
fn tables_are_byte_identical_across_runs_and_thread_counts() {
    for name in ["optimal", "tha-same", "borda-tactic", "sequences"] {
        let a = pithresh(&["--threads", "1", "table", name]);
        let b = pithresh(&["--threads", "3", "table", name]);
        let c = pithresh(&["table", name]);
        assert_eq!(a.code, 0, "{name}: {}", a.stderr);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stdout, c.stdout);
    }
    let s1 = pithresh(&["--threads", "1", "--json", "search", "--method", "sntv", "--scenario", "same", "--ell", "1", "--seats", "2", "--candidates", "4"]);
    let s3 = pithresh(&["--threads", "3", "--json", "search", "--method", "sntv", "--scenario", "same", "--ell", "1", "--seats", "2", "--candidates", "4"]);
    assert_eq!(s1.code, 0, "{}", s1.stderr);
    assert_eq!(s1.stdout, s3.stdout);
}

#[test]
fn threshold_and_criterion() {
    let out = pithresh(&["--json", "threshold", "--method", "stl", "--scenario", "party", "--ell", "2", "--seats", "3"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["value"], "3/5");
    assert_eq!(v["status"], "exact");
    let out = pithresh(&["threshold", "--method", "thiele-o", "--scenario", "tactic", "--ell", "1", "--seats", "5", "--kind", "pihat"]);
    assert!(out.stdout.contains("720/2621"), "{}", out.stdout);
    let out = pithresh(&["threshold", "--method", "phragmen", "--criterion", "jr", "--seats", "4"]);
    assert_eq!(out.stdout, "jr for phragmen with S = 4: holds\n");
    let out = pithresh(&["threshold", "--method", "av", "--criterion", "jr", "--seats", "4"]);
    assert_eq!(out.stdout, "jr for av with S = 4: fails\n");
    let out = pithresh(&["threshold", "--method", "dhondt", "--seats", "4"]);
    assert_eq!(out.code, 2);
}

#[test]
fn apportion_from_votes() {
    let out = pithresh(&["apportion", "--method", "dhondt", "--seats", "5", "--votes", "50,30,20"]);
    assert_eq!(out.stdout, "div:1, S = 5\n1 outcome\n  P1=3 P2=1 P3=1\n");
    let out = pithresh(&["apportion", "--method", "hare", "--seats", "2", "--votes", "X=1,Y=1"]);
    assert!(out.stdout.contains("X=1 Y=1"));
    let out = pithresh(&["apportion", "--method", "bv", "--seats", "2", "--votes", "1,2"]);
    assert_eq!(out.code, 2);
}

#[test]
fn witness_verifies_and_lists() {
    let out = pithresh(&[
        "witness",
        "--theorem",
        "divisor-boundary",
        "--method",
        "dhondt",
        "--scenario",
        "party",
        "--ell",
        "2",
        "--seats",
        "4",
    ]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("W fraction 2/5"), "{}", out.stdout);
    let list = pithresh(&["--format", "csv", "witness", "--list"]);
    assert_eq!(list.stdout.lines().count(), 15);
    let out = pithresh(&["witness", "--theorem", "no-such-token", "--method", "bv", "--scenario", "pjr", "--ell", "1", "--seats", "2"]);
    assert_eq!(out.code, 2);
}

#[test]
fn search_reports_table_value() {
    let out = pithresh(&["--json", "search", "--method", "div:1", "--scenario", "party", "--ell", "1", "--seats", "2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(parse_rat(v["best_fraction"].as_str().unwrap()).unwrap(), q("1/3"));
    assert_eq!(v["sound"], true);
}

#[test]
fn audit_small_corpus_passes() {
    let out = pithresh(&["audit", "--smax", "4", "--witnesses"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("no violations"));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let bad = std::env::temp_dir().join(format!("pithresh-bad-{}.profile", std::process::id()));
    std::fs::write(&bad, "!seats 2\n1 : {A B}\n2 : {A\n").unwrap();
    let out = pithresh(&["count", "--method", "bv", bad.to_str().unwrap()]);
    std::fs::remove_file(&bad).unwrap();
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
    assert_eq!(pithresh(&["frobnicate"]).code, 2);
    assert_eq!(pithresh(&["count", "--method", "nope", "x"]).code, 2);
    assert_eq!(pithresh(&["count", "--method", "bv", "/no/such/file"]).code, 2);
    assert_eq!(pithresh(&["--help"]).code, 0);
}
