//! The threshold book satisfies every inequality family.

use pithresh_core::verifier::{audit_table, standard_corpus, AuditOptions, SearchSpec};
use pithresh_core::ThresholdBook;

#[test]
fn standard_corpus_audits_clean() {
    let mut book = ThresholdBook::new();
    let opts = AuditOptions { witnesses: true, search: None };
    let report = audit_table(&mut book, &standard_corpus(), 10, &opts).unwrap();
    let lines: Vec<String> = report
        .violations
        .iter()
        .map(|v| format!("{} {} ({},{}) {}", v.family, v.method, v.ell, v.seats, v.detail))
        .collect();
    assert!(report.passed(), "{}", lines.join("\n"));
    assert!(report.checks > 1000);
    assert!(report.witnesses_verified > 50);
}

#[test]
fn small_search_cross_check_audits_clean() {
    let mut book = ThresholdBook::new();
    let spec = SearchSpec { max_candidates: 3, weight_grid: 2, max_ballot_groups: 2, max_ballot_length: 2, ..SearchSpec::default() };
    let methods = [pithresh_core::MethodId::SNTV, pithresh_core::MethodId::BV];
    let opts = AuditOptions { witnesses: false, search: Some(spec) };
    let report = audit_table(&mut book, &methods, 2, &opts).unwrap();
    assert!(report.passed(), "{:?}", report.violations);
    assert!(report.searches > 0);
}
