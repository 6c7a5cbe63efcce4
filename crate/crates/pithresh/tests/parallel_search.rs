//! The parallel search agrees with the sequential one and does not depend
//! on the number of threads.

use pithresh::search::{run_probes, search_parallel, Probe, SharedBook};
use pithresh_core::verifier::{search_lower_bound, SearchSpec};
use pithresh_core::{MethodId, Rational, ScenarioId, ThresholdBook};

fn small() -> SearchSpec {
    SearchSpec { max_candidates: 4, weight_grid: 2, max_ballot_groups: 3, max_voters: 5, ..SearchSpec::default() }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn parallel_best_matches_sequential() {
    let cases = [
        (MethodId::Div(Rational::one()), ScenarioId::Party, 1, 2),
        (MethodId::AV, ScenarioId::PJR, 1, 2),
        (MethodId::SNTV, ScenarioId::Same, 1, 2),
        (MethodId::ThieleO, ScenarioId::WPSC, 1, 2),
        (MethodId::SNTV, ScenarioId::Tactic, 1, 2),
    ];
    for (m, sc, ell, s) in cases {
        let seq = search_lower_bound(&m, sc, ell, s, &small()).unwrap();
        let par = search_parallel(&m, sc, ell, s, &small()).unwrap();
        assert_eq!(par.best, seq.best, "{m} {sc}");
        assert_eq!(par.exhausted, seq.exhausted);
        assert!(par.undecided >= seq.undecided);
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let m = MethodId::BV;
    let spec = SearchSpec::default();
    let one = in_pool(1, || search_parallel(&m, ScenarioId::EJR, 2, 3, &spec).unwrap());
    let four = in_pool(4, || search_parallel(&m, ScenarioId::EJR, 2, 3, &spec).unwrap());
    assert_eq!(one, four);
    assert_eq!(one.best_fraction(), Some(&Rational::ratio(3, 5)));
}

#[test]
fn budget_cut_is_reported() {
    let spec = SearchSpec { max_profiles: 100, ..small() };
    let r = search_parallel(&MethodId::AV, ScenarioId::PJR, 1, 2, &spec).unwrap();
    assert!(r.exhausted);
    assert_eq!(r.examined, 100);
}

#[test]
fn probes_share_one_book() {
    let probes = vec![
        Probe { method: MethodId::Div(Rational::one()), scenario: ScenarioId::Party, ell: 1, seats: 2 },
        Probe { method: MethodId::AV, scenario: ScenarioId::Same, ell: 1, seats: 1 },
        Probe { method: MethodId::CV, scenario: ScenarioId::PJR, ell: 1, seats: 2 },
    ];
    let book = SharedBook::new(ThresholdBook::new());
    let err = run_probes(&probes, &small(), &book).unwrap_err();
    assert!(err.to_string().contains("no counting engine"), "{err}");
    let results = run_probes(&probes[..2], &small(), &book).unwrap();
    assert_eq!(results.len(), 2);
    assert!(results.iter().all(|r| r.sound()));
    assert_eq!(results[0].report.best_fraction(), Some(&Rational::ratio(1, 3)));
}
