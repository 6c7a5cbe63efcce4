//! Parallel drivers for the exhaustive search and for soundness probes.
//!
//! Work is split into fixed-size chunks of the index space, each scanned
//! sequentially with its own pruning floor, and the chunk results are
//! combined with [`better`]. Chunk boundaries do not depend on the thread
//! count, so reports are identical however many threads run.

use std::sync::Mutex;

use rayon::prelude::*;

use pithresh_core::thresholds::Side;
use pithresh_core::verifier::{better, SearchReport, SearchSpace, SearchSpec, TacticSpace, Undecided, Witness};
use pithresh_core::{Error, Kind, MethodId, Rational, Result, ScenarioId, ThresholdBook, ThresholdValue};

/// Profiles scanned per chunk of a non-tactic search.
pub const CHUNK: u128 = 2048;
/// Strategies tried per parallel round of a tactic search.
pub const STRATEGY_CHUNK: u128 = 32;

#[derive(Default)]
struct ChunkResult {
    best: Option<(u128, Rational)>,
    undecided: u64,
}

fn scan_chunk(space: &SearchSpace, start: u128, end: u128) -> ChunkResult {
    let mut out = ChunkResult::default();
    for idx in start..end {
        match space.evaluate(idx, out.best.as_ref().map(|b| &b.1)) {
            Ok(Some(inst)) => out.best = better(out.best.take(), Some((idx, inst.fraction()))),
            Ok(None) => {}
            Err(Undecided) => out.undecided += 1,
        }
    }
    out
}

/// Parallel counterpart of `verifier::search_lower_bound`. The best
/// fraction and witness agree with the sequential search; `undecided` may
/// be larger because pruning is per chunk.
pub fn search_parallel(
    method: &MethodId,
    scenario: ScenarioId,
    ell: usize,
    seats: usize,
    spec: &SearchSpec,
) -> Result<SearchReport> {
    if scenario == ScenarioId::Tactic {
        return search_tactic_parallel(method, ell, seats, spec);
    }
    let space = SearchSpace::new(method, scenario, ell, seats, spec)?;
    let total = space.len();
    let limit = total.min(u128::from(spec.max_profiles));
    // `limit` is bounded by a u64 budget, so the chunk count fits in u64.
    let chunks = limit.div_ceil(CHUNK) as u64;
    let merged = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = u128::from(c) * CHUNK;
            scan_chunk(&space, start, (start + CHUNK).min(limit))
        })
        .reduce(ChunkResult::default, |a, b| ChunkResult {
            best: better(a.best, b.best),
            undecided: a.undecided + b.undecided,
        });
    Ok(SearchReport {
        best: merged.best.and_then(|(i, _)| space.instance(i)).map(|instance| Witness {
            claimed_fraction: instance.fraction(),
            instance,
            source: "search",
        }),
        examined: limit as u64,
        undecided: merged.undecided,
        exhausted: limit < total,
    })
}

fn search_tactic_parallel(method: &MethodId, ell: usize, seats: usize, spec: &SearchSpec) -> Result<SearchReport> {
    let space = TacticSpace::new(method, ell, seats, spec)?;
    let mut examined = 0u64;
    let mut undecided = 0u64;
    for (v, w) in space.cells(spec.max_voters) {
        let total = space.strategies(w);
        let mut first = None;
        let mut all_defeated = true;
        let mut start = 0u128;
        while start < total {
            let budget = u128::from(spec.max_profiles - examined);
            if budget == 0 {
                return Ok(SearchReport { best: None, examined, undecided, exhausted: true });
            }
            let end = (start + STRATEGY_CHUNK).min(total).min(start + budget);
            let results: Vec<_> = (start..end).into_par_iter().map(|s| space.defeat(v, w, s)).collect();
            examined += (end - start) as u64;
            for r in results {
                match r {
                    Ok(Some(inst)) => {
                        first.get_or_insert(inst);
                    }
                    Ok(None) => all_defeated = false,
                    Err(Undecided) => {
                        undecided += 1;
                        all_defeated = false;
                    }
                }
            }
            if !all_defeated {
                break;
            }
            start = end;
        }
        if all_defeated {
            if let Some(instance) = first {
                let best = Witness { claimed_fraction: instance.fraction(), instance, source: "search" };
                return Ok(SearchReport { best: Some(best), examined, undecided, exhausted: false });
            }
        }
    }
    Ok(SearchReport { best: None, examined, undecided, exhausted: false })
}

/// A threshold oracle shared between worker threads.
#[derive(Debug, Default)]
pub struct SharedBook(Mutex<ThresholdBook>);

impl SharedBook {
    pub fn new(book: ThresholdBook) -> Self {
        SharedBook(Mutex::new(book))
    }

    pub fn threshold(&self, method: &MethodId, scenario: ScenarioId, ell: usize, seats: usize) -> Result<ThresholdValue> {
        let mut book = self.0.lock().unwrap_or_else(|p| p.into_inner());
        book.threshold_of_kind(method, scenario, ell, seats, Kind::Pi)
    }

    pub fn into_inner(self) -> ThresholdBook {
        self.0.into_inner().unwrap_or_else(|p| p.into_inner())
    }
}

/// One `(method, scenario, ell, S)` point to search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    pub method: MethodId,
    pub scenario: ScenarioId,
    pub ell: usize,
    pub seats: usize,
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub probe: Probe,
    /// `None` when the pair has no threshold.
    pub threshold: Option<ThresholdValue>,
    pub report: SearchReport,
}

impl ProbeResult {
    /// The searched fraction does not exceed what the threshold allows.
    pub fn sound(&self) -> bool {
        let (Some(t), Some(f)) = (&self.threshold, self.report.best_fraction()) else {
            return true;
        };
        match &t.upper {
            Some(u) => f < u || (f == u && !(t.is_exact() && t.side == Side::Minus)),
            None => true,
        }
    }
}

/// Search every probe in parallel and look up its threshold.
pub fn run_probes(probes: &[Probe], spec: &SearchSpec, book: &SharedBook) -> Result<Vec<ProbeResult>> {
    probes
        .par_iter()
        .map(|p| {
            let threshold = match book.threshold(&p.method, p.scenario, p.ell, p.seats) {
                Ok(t) => Some(t),
                Err(Error::NotApplicable(_)) => None,
                Err(e) => return Err(e),
            };
            let report = pithresh_core::verifier::search_lower_bound(&p.method, p.scenario, p.ell, p.seats, spec)?;
            Ok(ProbeResult { probe: p.clone(), threshold, report })
        })
        .collect()
}
