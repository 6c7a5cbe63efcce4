//! Empirical side of the thresholds: extremal witnesses rebuilt from the
//! constructions that prove the lower bounds, bounded adversarial search,
//! and an audit of the inequalities every threshold must satisfy.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ballots::{BallotContent, Candidate, CountOptions, Profile, ProfileKind, WeightScheme, WeightedBallot};
use crate::error::{Error, Result};
use crate::explore::binomial;
use crate::method::{count, MethodId};
use crate::numerics::Rational;
use crate::scenarios::{ScenarioId, ScenarioInstance};
use crate::sequences::{alpha_vertex, SequenceCache, DEFAULT_ALPHA_CAP};
use crate::thresholds::{generic_bounds, GenericConstraint, Kind, ThresholdBook, ThresholdValue};

/// A scenario instance in which a bad outcome is reachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub instance: ScenarioInstance,
    /// `W`'s share of the total weight.
    pub claimed_fraction: Rational,
    /// Catalog token of the construction.
    pub source: &'static str,
}

impl Witness {
    fn new(instance: ScenarioInstance, source: &'static str) -> Self {
        Witness { claimed_fraction: instance.fraction(), instance, source }
    }
}

/// Tokens accepted by [`construct_witness`], with what each one builds.
pub const WITNESS_CATALOG: [(&str, &str); 14] = [
    ("symmetric-blocks", "(S+1)/ell equal groups of ell names each; any method, ell | S+1"),
    ("divisor-boundary", "W at its ell-th divisor boundary against S+1-ell unit parties; div:G with G > 0"),
    ("quota-boundary", "W with ell-1+t quotas against S+1-ell parties of t quotas; quota:D and stv:D"),
    ("majority-list", "W with half the votes on S names against S other names; bv, av, lv"),
    ("ejr-tie-construction", "three-block tie where W is denied ell names on any ballot; bv, av, lv, EJR"),
    ("cvq-self-votes", "W spread over itself, S outsiders voting for themselves; cvq, needs eps"),
    ("addition-lp-vertex", "W on A against the optimal alpha vertex on B; thiele-add"),
    ("optimize-cyclic", "W on A against cyclic windows of B; thiele-opt, ell = 1"),
    ("ordered-suffix-strategy", "W on one list against suffix ballots weighted by b_i; thiele-o, same"),
    ("no-elimination-self-first", "each W voter ranks herself first; phragmen-o and thiele-o, PSC, needs eps"),
    ("addition-split-list", "fixed 50-voter profile where the large party splits its lists; thiele-add, ell = 1, S = 3"),
    ("ordered-majority-split", "fixed 100-voter profile where a majority list gets one seat; thiele-o, same, (2, 3)"),
    ("phragmen-ejr-counterexample", "fixed 2409-voter profile; phragmen, EJR, (2, 12)"),
    ("elimination-decoy", "W on A plus decoy lists eliminated after A; thiele-elim, PJR, ell = 1, needs eps"),
];

fn cand(name: &str) -> Candidate {
    Candidate::new(name).expect("generated names are valid")
}

fn names(prefix: &str, range: core::ops::Range<usize>) -> Vec<Candidate> {
    range.map(|i| cand(&format!("{prefix}{}", i + 1))).collect()
}

fn unordered(c: &[Candidate]) -> BallotContent {
    BallotContent::Unordered(c.iter().cloned().collect())
}

fn ordered(c: &[Candidate]) -> BallotContent {
    BallotContent::Ordered(c.to_vec())
}

/// A list in the ballot form `kind` uses; party ballots name only the first.
fn list(kind: ProfileKind, c: &[Candidate]) -> BallotContent {
    match kind {
        ProfileKind::Party => BallotContent::Party(c[0].clone()),
        ProfileKind::Unordered => unordered(c),
        ProfileKind::Ordered => ordered(c),
    }
}

/// The `len` names starting at `start`, cyclically.
fn window(pool: &[Candidate], start: usize, len: usize) -> Vec<Candidate> {
    (0..len).map(|j| pool[(start + j) % pool.len()].clone()).collect()
}

fn ru(n: usize) -> Rational {
    Rational::from_usize(n)
}

fn bad_params(token: &str, why: &str) -> Error {
    Error::InvalidParameter(format!("{token}: {why}"))
}

fn instance(
    ballots: Vec<WeightedBallot>,
    seats: usize,
    targets: &[Candidate],
    ell: usize,
    scenario: ScenarioId,
) -> Result<ScenarioInstance> {
    let targets = match scenario {
        ScenarioId::Party | ScenarioId::Same => BTreeSet::new(),
        _ => targets.iter().cloned().collect(),
    };
    Ok(ScenarioInstance::new(Profile::new(ballots, seats)?, targets, ell, scenario))
}

/// Smallest integer `n >= floor` with `S/(n+S) <= eps`.
fn limit_size(eps: Option<&Rational>, seats_like: usize, floor: usize) -> Result<usize> {
    let eps = eps.ok_or_else(|| Error::InvalidParameter("limit construction needs eps".into()))?;
    if !eps.is_positive() || *eps >= 1 {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    // S/(n+S) <= eps  <=>  n >= S(1-eps)/eps
    let need = (ru(seats_like) * (Rational::one() - eps) / eps).ceil();
    let need: usize = need.try_into().map_err(|_| Error::InvalidParameter("eps too small".into()))?;
    Ok(need.max(floor))
}

/// Build the named witness for `(method, scenario, ell, S)`. Constructions
/// whose supremum is not attained take `eps`, the allowed shortfall.
pub fn construct_witness(
    token: &str,
    method: &MethodId,
    scenario: ScenarioId,
    ell: usize,
    seats: usize,
    eps: Option<&Rational>,
) -> Result<Witness> {
    use ScenarioId::*;
    if ell == 0 || ell > seats {
        return Err(Error::InvalidParameter(format!("need 1 <= ell <= S, got ell = {ell}, S = {seats}")));
    }
    if !scenario.accepts(method.ballot_kind()) {
        return Err(bad_params(token, "scenario does not fit the method's ballots"));
    }
    let kind = method.ballot_kind();
    let one = Rational::one();
    let w_ = |weight: Rational, c: BallotContent| WeightedBallot::designated(weight, c);
    let o_ = |weight: Rational, c: BallotContent| WeightedBallot::new(weight, c);
    let source = WITNESS_CATALOG
        .iter()
        .find(|(t, _)| *t == token)
        .map(|(t, _)| *t)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown witness token `{token}`")))?;
    let inst = match source {
        "symmetric-blocks" => {
            if !(seats + 1).is_multiple_of(ell) || scenario == Tactic {
                return Err(bad_params(token, "needs ell dividing S+1 and a non-tactic scenario"));
            }
            if method.ballot_cap(seats).is_some_and(|cap| cap < ell) {
                return Err(bad_params(token, "ballots too short for ell names"));
            }
            let groups = (seats + 1) / ell;
            let mut ballots = Vec::new();
            let mut targets = Vec::new();
            for g in 0..groups {
                let letter = char::from(b'A' + (g % 26) as u8);
                let prefix = if g < 26 { format!("{letter}") } else { format!("{letter}{}_", g / 26) };
                let c = if kind == ProfileKind::Party { vec![cand(&prefix)] } else { names(&prefix, 0..ell) };
                if g == 0 {
                    targets = c.clone();
                    ballots.push(w_(one.clone(), list(kind, &c)));
                } else {
                    ballots.push(o_(one.clone(), list(kind, &c)));
                }
            }
            instance(ballots, seats, &targets, ell, scenario)?
        }
        "divisor-boundary" => {
            let MethodId::Div(gamma) = method else {
                return Err(bad_params(token, "needs a divisor method"));
            };
            if !gamma.is_positive() || !matches!(scenario, Party | Same) {
                return Err(bad_params(token, "needs G > 0 and the party or same scenario"));
            }
            let mut ballots = vec![w_(ru(ell - 1) + gamma, BallotContent::Party(cand("W")))];
            for p in names("P", 0..seats + 1 - ell) {
                ballots.push(o_(gamma.clone(), BallotContent::Party(p)));
            }
            instance(ballots, seats, &[], ell, scenario)?
        }
        "quota-boundary" => {
            let delta = match method {
                MethodId::Quota(d) if matches!(scenario, Party | Same) => d,
                MethodId::STV(d) if matches!(scenario, Party | Same | WPSC | PSC) => d,
                _ => return Err(bad_params(token, "needs quota:D or stv:D with a list scenario")),
            };
            if delta.is_negative() || *delta > 1 {
                return Err(bad_params(token, "needs 0 <= D <= 1"));
            }
            let t = (ru(seats + 1 - ell) + delta) / ru(seats + 2 - ell);
            let a = names("A", 0..ell);
            let mut ballots = vec![w_(ru(ell - 1) + &t, list(kind, &a))];
            for b in names("B", 0..seats + 1 - ell) {
                ballots.push(o_(t.clone(), list(kind, &[b])));
            }
            instance(ballots, seats, &a, ell, scenario)?
        }
        "majority-list" => {
            let ok_method = matches!(method, MethodId::BV | MethodId::AV)
                || matches!(method, MethodId::LV(l) if *l >= seats)
                || matches!(method, MethodId::ThieleOpt(w) if w.is_constant_upto(seats));
            if !ok_method || !matches!(scenario, Party | Same | PJR) {
                return Err(bad_params(token, "needs bv, av or lv:L with L >= S, and party, same or pjr"));
            }
            let a = names("A", 0..seats);
            let ballots = vec![w_(one.clone(), unordered(&a)), o_(one.clone(), unordered(&names("B", 0..seats)))];
            instance(ballots, seats, &a, ell, scenario)?
        }
        "ejr-tie-construction" => {
            let cap = match method {
                MethodId::BV => seats,
                MethodId::AV => usize::MAX,
                MethodId::LV(l) => *l,
                _ => return Err(bad_params(token, "needs bv, av or lv:L")),
            };
            if scenario != EJR || ell > cap {
                return Err(bad_params(token, "needs the EJR scenario and ell <= L"));
            }
            let k = (2 * ell).saturating_sub(cap.saturating_add(1));
            let m = (ell - k - 1).min(cap - ell);
            let mp = (seats - k).min(cap);
            let a_frac = ru(mp) / ru(seats + 1 - ell + mp);
            let targets = names("A", 0..ell);
            let c3 = names("B", 0..seats - k);
            let n3 = c3.len();
            let mut ballots = Vec::new();
            if m == 0 {
                ballots.push(w_(a_frac.clone(), unordered(&targets)));
            } else {
                for i in 0..n3 {
                    let mut c = targets.clone();
                    c.extend(window(&c3, i, m));
                    ballots.push(w_(a_frac.clone() / ru(n3), unordered(&c)));
                }
            }
            let rest = Rational::one() - &a_frac;
            if mp == n3 {
                ballots.push(o_(rest, unordered(&c3)));
            } else {
                for i in 0..n3 {
                    ballots.push(o_(rest.clone() / ru(n3), unordered(&window(&c3, i, mp))));
                }
            }
            instance(ballots, seats, &targets, ell, scenario)?
        }
        "cvq-self-votes" => {
            if *method != MethodId::CVq || !matches!(scenario, Party | Same | PJR | EJR) {
                return Err(bad_params(token, "needs cvq with party, same, pjr or ejr"));
            }
            let n = limit_size(eps, seats, ell)?;
            let w = names("W", 0..n);
            let mut ballots = vec![w_(ru(n), unordered(&w))];
            for u in names("U", 0..seats) {
                ballots.push(o_(one.clone(), unordered(&[u])));
            }
            instance(ballots, seats, &w, ell, scenario)?
        }
        "addition-lp-vertex" => {
            let MethodId::ThieleAdd(w) = method else {
                return Err(bad_params(token, "needs thiele-add"));
            };
            if !matches!(scenario, Same | PJR | EJR) || w.w(ell).is_zero() {
                return Err(bad_params(token, "needs same, pjr or ejr and w_ell > 0"));
            }
            let n = seats + 1 - ell;
            let (_, point) = alpha_vertex(n, w, DEFAULT_ALPHA_CAP)?;
            let a = names("A", 0..ell);
            let b = names("B", 0..n);
            let mut ballots = vec![w_(w.w(ell).recip()?, unordered(&a))];
            for (j, x) in point.iter().enumerate() {
                if x.is_positive() {
                    let sigma = j + 1;
                    let c: Vec<Candidate> = (0..n).filter(|i| sigma & (1 << i) != 0).map(|i| b[i].clone()).collect();
                    ballots.push(o_(x.clone(), unordered(&c)));
                }
            }
            instance(ballots, seats, &a, ell, scenario)?
        }
        "optimize-cyclic" => {
            let MethodId::ThieleOpt(w) = method else {
                return Err(bad_params(token, "needs thiele-opt"));
            };
            if ell != 1 || !matches!(scenario, Same | PJR | EJR) {
                return Err(bad_params(token, "needs ell = 1 and same, pjr or ejr"));
            }
            let (k, peak) = (1..=seats)
                .map(|k| (k, ru(k) * w.w(k)))
                .fold((1, Rational::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            let a = names("A", 0..1);
            let b = names("B", 0..seats);
            let mut ballots = vec![w_(peak, unordered(&a))];
            if k == seats {
                ballots.push(o_(ru(seats), unordered(&b)));
            } else {
                for i in 0..seats {
                    ballots.push(o_(one.clone(), unordered(&window(&b, i, k))));
                }
            }
            instance(ballots, seats, &a, ell, scenario)?
        }
        "ordered-suffix-strategy" => {
            if *method != MethodId::ThieleO || scenario != Same {
                return Err(bad_params(token, "needs thiele-o and the same scenario"));
            }
            let m = seats + 1 - ell;
            let mut cache = SequenceCache::default();
            let a = names("A", 0..ell);
            let b = names("B", 0..m);
            let mut ballots = vec![w_(ru(ell), ordered(&a))];
            for i in 0..m {
                ballots.push(o_(cache.b(i + 1)?, ordered(&b[i..])));
            }
            instance(ballots, seats, &a, ell, scenario)?
        }
        "no-elimination-self-first" => {
            if !matches!(method, MethodId::PhragmenO | MethodId::ThieleO) || scenario != PSC {
                return Err(bad_params(token, "needs phragmen-o or thiele-o and the PSC scenario"));
            }
            let n = limit_size(eps, 2 * seats, ell)?;
            let w = names("W", 0..n);
            let mut ballots = Vec::new();
            for i in 0..n {
                ballots.push(w_(one.clone(), ordered(&window(&w, i, n))));
            }
            for b in names("B", 0..seats) {
                ballots.push(o_(ru(2), ordered(&[b])));
            }
            instance(ballots, seats, &w, ell, scenario)?
        }
        "addition-split-list" => {
            if !matches!(method, MethodId::ThieleAdd(w) if w.is_harmonic_upto(3))
                || (ell, seats) != (1, 3)
                || !matches!(scenario, Same | PJR | EJR)
            {
                return Err(bad_params(token, "needs harmonic thiele-add, same, pjr or ejr, at (1, 3)"));
            }
            let s = |v: &[&str]| BallotContent::unordered(v);
            let ballots = vec![
                o_(ru(1), s(&["A"])),
                o_(ru(9), s(&["A", "B"])),
                o_(ru(9), s(&["A", "C"])),
                o_(ru(9), s(&["B"])),
                o_(ru(9), s(&["C"])),
                w_(ru(13), s(&["K", "L", "M"])),
            ];
            instance(ballots, seats, &[cand("K"), cand("L"), cand("M")], ell, scenario)?
        }
        "ordered-majority-split" => {
            if *method != MethodId::ThieleO || (ell, seats) != (2, 3) || scenario != Same {
                return Err(bad_params(token, "needs thiele-o, same, at (2, 3)"));
            }
            let ballots = vec![
                w_(ru(55), BallotContent::ordered(&["A", "B", "C"])),
                o_(ru(30), BallotContent::ordered(&["X", "Y", "Z"])),
                o_(ru(15), BallotContent::ordered(&["Y", "Z", "X"])),
            ];
            instance(ballots, seats, &[], ell, scenario)?
        }
        "phragmen-ejr-counterexample" => {
            if *method != MethodId::PhragmenU || (ell, seats) != (2, 12) || scenario != EJR {
                return Err(bad_params(token, "needs phragmen, EJR, at (2, 12)"));
            }
            let c = names("C", 0..12);
            let (a, b) = (cand("A"), cand("B"));
            let ballots = vec![
                w_(ru(200), unordered(&[a.clone(), b.clone(), c[0].clone()])),
                w_(ru(209), unordered(&[a.clone(), b.clone(), c[1].clone()])),
                o_(ru(600), unordered(&c)),
                o_(ru(500), unordered(&c[1..])),
                o_(ru(900), unordered(&c[2..])),
            ];
            instance(ballots, seats, &[a, b], ell, scenario)?
        }
        "elimination-decoy" => {
            if *method != MethodId::ThieleElim || ell != 1 || !matches!(scenario, PJR | EJR) {
                return Err(bad_params(token, "needs thiele-elim, pjr or ejr, ell = 1"));
            }
            elimination_decoy(seats, scenario, eps)?
        }
        _ => unreachable!("catalog tokens are exhaustive"),
    };
    Ok(Witness::new(inst, source))
}

/// `m` groups of `n+1` voters each vote `{A, C_i1..C_in}`, every `C_ij`
/// has `m-1` further votes and every `B_k` has `m+n`. Eliminating `A` first
/// leaves only `B` standing. The fraction tends to `m/(m^2+S)` as `n` grows;
/// `n` is the least value within `eps` of it, with `m` the best for `S`.
fn elimination_decoy(seats: usize, scenario: ScenarioId, eps: Option<&Rational>) -> Result<ScenarioInstance> {
    let eps = eps.ok_or_else(|| Error::InvalidParameter("limit construction needs eps".into()))?;
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let limit = |m: usize| ru(m) / ru(m * m + seats);
    let m = (1..=seats).fold(1, |best, m| if limit(m) > limit(best) { m } else { best });
    let fraction = |n: usize| ru(m * (n + 1)) / ru(m * (m * n + 1) + (m + n) * seats);
    let n = (1..=4096)
        .find(|&n| limit(m) - fraction(n) <= *eps)
        .ok_or_else(|| Error::InvalidParameter("eps too small".into()))?;
    let a = cand("A");
    let mut ballots = Vec::new();
    for i in 0..m {
        let c = names(&format!("C{}_", i + 1), 0..n);
        let mut w = vec![a.clone()];
        w.extend(c.iter().cloned());
        ballots.push(WeightedBallot::designated(ru(n + 1), unordered(&w)));
        if m > 1 {
            for cij in c {
                ballots.push(WeightedBallot::new(ru(m - 1), unordered(&[cij])));
            }
        }
    }
    for b in names("B", 0..seats) {
        ballots.push(WeightedBallot::new(ru(m + n), unordered(&[b])));
    }
    instance(ballots, seats, &[a], 1, scenario)
}

/// The catalog token whose construction attains the exact threshold
/// `value` at `(method, scenario, ell, S)`, if any.
pub fn covering_token(
    method: &MethodId,
    scenario: ScenarioId,
    ell: usize,
    seats: usize,
    value: &Rational,
) -> Option<&'static str> {
    use ScenarioId::*;
    match (method, scenario) {
        (MethodId::Div(g), Party | Same) if g.is_positive() => Some("divisor-boundary"),
        (MethodId::Quota(d), Party | Same) if !d.is_negative() => Some("quota-boundary"),
        (MethodId::STV(d), Party | Same | WPSC | PSC) if !d.is_negative() => Some("quota-boundary"),
        (MethodId::BV | MethodId::AV, EJR) => Some("ejr-tie-construction"),
        (MethodId::LV(l), EJR) if ell <= *l => Some("ejr-tie-construction"),
        (MethodId::BV | MethodId::AV, Party | Same | PJR) => Some("majority-list"),
        (MethodId::LV(l), Party | Same | PJR) if *l >= seats => Some("majority-list"),
        (MethodId::ThieleAdd(w), Same | PJR | EJR) if ell == 1 && seats <= DEFAULT_ALPHA_CAP && !w.w(1).is_zero() => {
            Some("addition-lp-vertex")
        }
        (MethodId::ThieleOpt(w), Same | PJR | EJR) if ell == 1 && !w.is_constant_upto(seats) => Some("optimize-cyclic"),
        (MethodId::ThieleO, Same) => Some("ordered-suffix-strategy"),
        (m, s) if s != Tactic
            && *value == ru(ell) / ru(seats + 1)
            && (seats + 1).is_multiple_of(ell)
            && m.has_engine()
            && m.ballot_cap(seats).is_none_or(|c| c >= ell)
            && !matches!(m, MethodId::Div(g) if g.is_zero()) =>
        {
            Some("symmetric-blocks")
        }
        _ => None,
    }
}

/// Whether counting the witness profile reaches a bad outcome and its
/// fraction is as claimed. A truncated outcome set is an error.
pub fn verify_witness(w: &Witness, method: &MethodId, opts: &CountOptions) -> Result<bool> {
    if w.instance.fraction() != w.claimed_fraction {
        return Ok(false);
    }
    match w.instance.bad_outcome_reachable(method, opts) {
        Ok(bad) => Ok(bad),
        Err(Error::ScenarioMismatch { what: "not an instance", .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Bounds for the exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    /// Size of the candidate pool.
    pub max_candidates: usize,
    /// Group weights range over `1..=weight_grid`.
    pub weight_grid: u32,
    /// Most ballot groups in a profile.
    pub max_ballot_groups: usize,
    /// Longest ballot.
    pub max_ballot_length: usize,
    pub branch_cap: usize,
    /// Stop after this many profiles, reporting the partial best.
    pub max_profiles: u64,
    /// Tactic only: voters have unit weight and the electorate ranges over
    /// `2..=max_voters`.
    pub max_voters: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            max_candidates: 5,
            weight_grid: 2,
            max_ballot_groups: 4,
            max_ballot_length: 3,
            branch_cap: 10_000,
            max_profiles: 2_000_000,
            max_voters: 6,
        }
    }
}

impl SearchSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = self.max_candidates > 0
            && self.weight_grid > 0
            && self.max_ballot_groups > 0
            && self.max_ballot_length > 0
            && self.branch_cap > 0
            && self.max_profiles > 0
            && self.max_voters > 1;
        if positive {
            Ok(())
        } else {
            Err(Error::InvalidParameter("search bounds must be positive (max_voters at least 2)".into()))
        }
    }

    fn count_options(&self) -> CountOptions {
        CountOptions { branch_cap: self.branch_cap, ..CountOptions::default() }
    }
}

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    /// Largest fraction found with a bad outcome, and a witness for it.
    pub best: Option<Witness>,
    pub examined: u64,
    /// Profiles that could not be decided (truncated or rejected by the method).
    pub undecided: u64,
    /// The profile budget ran out before the space was covered.
    pub exhausted: bool,
}

impl SearchReport {
    pub fn best_fraction(&self) -> Option<&Rational> {
        self.best.as_ref().map(|w| &w.claimed_fraction)
    }
}

fn multiset_count(n: usize, k: usize) -> u128 {
    match (n, k) {
        (_, 0) => 1,
        (0, _) => 0,
        _ => binomial(n + k - 1, k),
    }
}

/// The `idx`-th size-`k` multiset of `0..n` (non-decreasing, lexicographic).
fn unrank_multiset(n: usize, k: usize, mut idx: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut v = 0;
    for p in 0..k {
        let rest = k - p - 1;
        loop {
            let c = multiset_count(n - v, rest);
            if idx < c {
                out.push(v);
                break;
            }
            idx -= c;
            v += 1;
        }
    }
    out
}

/// All ballots over `pool` of length `1..=max_len` in the given form.
fn ballot_pool(kind: ProfileKind, pool: &[Candidate], max_len: usize) -> Vec<BallotContent> {
    match kind {
        ProfileKind::Party => pool.iter().cloned().map(BallotContent::Party).collect(),
        ProfileKind::Unordered => {
            let n = pool.len();
            let mut out: Vec<BallotContent> = (1u32..(1 << n))
                .filter(|s| (s.count_ones() as usize) <= max_len)
                .map(|s| unordered(&(0..n).filter(|i| s & (1 << i) != 0).map(|i| pool[i].clone()).collect::<Vec<_>>()))
                .collect();
            out.sort_by_key(|b| b.len());
            out
        }
        ProfileKind::Ordered => {
            let mut out = Vec::new();
            let mut stack: Vec<Vec<usize>> = (0..pool.len()).map(|i| vec![i]).collect();
            while let Some(seq) = stack.pop() {
                out.push(ordered(&seq.iter().map(|&i| pool[i].clone()).collect::<Vec<_>>()));
                if seq.len() < max_len {
                    for i in (0..pool.len()).rev() {
                        if !seq.contains(&i) {
                            let mut next = seq.clone();
                            next.push(i);
                            stack.push(next);
                        }
                    }
                }
            }
            out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
            out
        }
    }
}

/// Index-addressable space of non-tactic profiles: a multiset of `W` groups
/// and a multiset of other groups, each group a ballot with a grid weight.
#[derive(Clone, Debug)]
pub struct SearchSpace {
    method: MethodId,
    scenario: ScenarioId,
    ell: usize,
    seats: usize,
    pool: Vec<Candidate>,
    w_items: Vec<(BallotContent, u32)>,
    o_items: Vec<(BallotContent, u32)>,
    /// `(kw, ko, size)` blocks in index order.
    blocks: Vec<(usize, usize, u128)>,
    opts: CountOptions,
}

/// A count that hit the branch cap, so its verdict is unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Undecided;

impl SearchSpace {
    pub fn new(method: &MethodId, scenario: ScenarioId, ell: usize, seats: usize, spec: &SearchSpec) -> Result<Self> {
        spec.validate()?;
        if scenario == ScenarioId::Tactic {
            return Err(Error::InvalidParameter("tactic search uses search_tactic".into()));
        }
        if ell == 0 || ell > seats {
            return Err(Error::InvalidParameter(format!("need 1 <= ell <= S, got ell = {ell}, S = {seats}")));
        }
        let kind = method.ballot_kind();
        if !scenario.accepts(kind) {
            return Err(Error::ScenarioMismatch { scenario: scenario.name(), what: kind.name() });
        }
        if !method.has_engine() {
            return Err(Error::Unsupported(format!("{method} has no counting engine")));
        }
        let pool = names("c", 0..spec.max_candidates);
        let max_len = spec.max_ballot_length.min(method.ballot_cap(seats).unwrap_or(usize::MAX));
        let ballots = ballot_pool(kind, &pool, max_len);
        let a: BTreeSet<Candidate> = pool.iter().take(ell).cloned().collect();
        let fits_w = |b: &BallotContent| match scenario {
            ScenarioId::PJR | ScenarioId::EJR => a.iter().all(|c| b.contains(c)),
            ScenarioId::WPSC => b.top(ell).as_ref() == Some(&a),
            ScenarioId::PSC => (ell..=b.len()).any(|m| b.top(m) == Some(pool.iter().take(m).cloned().collect())),
            _ => kind == ProfileKind::Party || b.len() >= ell,
        };
        let grid = 1..=spec.weight_grid;
        let w_items: Vec<_> = ballots
            .iter()
            .filter(|b| fits_w(b))
            .flat_map(|b| grid.clone().map(move |x| (b.clone(), x)))
            .collect();
        let o_items: Vec<_> = ballots.iter().flat_map(|b| grid.clone().map(move |x| (b.clone(), x))).collect();
        let kw_max = match scenario {
            ScenarioId::Party | ScenarioId::Same => 1,
            _ => spec.max_ballot_groups,
        };
        let mut blocks = Vec::new();
        for kw in 1..=kw_max.min(spec.max_ballot_groups) {
            for ko in 0..=spec.max_ballot_groups - kw {
                let size = multiset_count(w_items.len(), kw).saturating_mul(multiset_count(o_items.len(), ko));
                if size > 0 {
                    blocks.push((kw, ko, size));
                }
            }
        }
        Ok(SearchSpace {
            method: method.clone(),
            scenario,
            ell,
            seats,
            pool,
            w_items,
            o_items,
            blocks,
            opts: spec.count_options(),
        })
    }

    pub fn len(&self) -> u128 {
        self.blocks.iter().map(|b| b.2).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The scenario instance at `idx`, or `None` when its groups do not
    /// form a valid instance.
    pub fn instance(&self, mut idx: u128) -> Option<ScenarioInstance> {
        let &(kw, ko, _) = self.blocks.iter().find(|b| {
            if idx < b.2 {
                true
            } else {
                idx -= b.2;
                false
            }
        })?;
        let o_count = multiset_count(self.o_items.len(), ko);
        let (wi, oi) = (idx / o_count, idx % o_count);
        let mut ballots = Vec::with_capacity(kw + ko);
        for i in unrank_multiset(self.w_items.len(), kw, wi) {
            let (b, x) = &self.w_items[i];
            ballots.push(WeightedBallot::designated(Rational::from(*x as i64), b.clone()));
        }
        for i in unrank_multiset(self.o_items.len(), ko, oi) {
            let (b, x) = &self.o_items[i];
            ballots.push(WeightedBallot::new(Rational::from(*x as i64), b.clone()));
        }
        let targets: BTreeSet<Candidate> = match self.scenario {
            ScenarioId::PJR | ScenarioId::EJR | ScenarioId::WPSC => self.pool.iter().take(self.ell).cloned().collect(),
            ScenarioId::PSC => {
                let m = (self.ell..=self.pool.len()).find(|&m| {
                    let a: BTreeSet<Candidate> = self.pool.iter().take(m).cloned().collect();
                    ballots.iter().filter(|b| b.designated).all(|b| b.content.top(m).as_ref() == Some(&a))
                })?;
                self.pool.iter().take(m).cloned().collect()
            }
            _ => BTreeSet::new(),
        };
        let profile = Profile::new(ballots, self.seats).ok()?;
        let inst = ScenarioInstance::new(profile, targets, self.ell, self.scenario);
        matches!(inst.is_instance(), Ok(true)).then_some(inst)
    }

    /// Evaluate the profile at `idx`: `Ok(Some(fraction))` when a bad outcome
    /// is reachable, `Ok(None)` when not (or when below `floor`), and
    /// `Err(Undecided)` when the count could not be decided.
    pub fn evaluate(&self, idx: u128, floor: Option<&Rational>) -> core::result::Result<Option<ScenarioInstance>, Undecided> {
        let Some(inst) = self.instance(idx) else {
            return Ok(None);
        };
        if floor.is_some_and(|f| inst.fraction() < *f) {
            return Ok(None);
        }
        match count(&self.method, &inst.profile, &self.opts) {
            Ok(outcome) => match inst.is_bad_outcome_possible(&outcome) {
                Ok(true) => Ok(Some(inst)),
                Ok(false) => Ok(None),
                Err(_) => Err(Undecided),
            },
            Err(Error::InsufficientCandidates { .. }) => Ok(None),
            Err(_) => Err(Undecided),
        }
    }
}

/// Keep the larger fraction; on ties, the earlier index.
pub fn better(a: Option<(u128, Rational)>, b: Option<(u128, Rational)>) -> Option<(u128, Rational)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Exhaustive search for the largest `W` fraction with a reachable bad
/// outcome. For the tactic scenario this is a max-min over unit-weight
/// electorates: a fraction counts only if every strategy of `W` (within
/// the grid) can be defeated by some adversary profile.
pub fn search_lower_bound(
    method: &MethodId,
    scenario: ScenarioId,
    ell: usize,
    seats: usize,
    spec: &SearchSpec,
) -> Result<SearchReport> {
    if scenario == ScenarioId::Tactic {
        return search_tactic(method, ell, seats, spec);
    }
    let space = SearchSpace::new(method, scenario, ell, seats, spec)?;
    let total = space.len();
    let limit = total.min(spec.max_profiles as u128);
    let mut best: Option<(u128, Rational)> = None;
    let mut undecided = 0;
    for idx in 0..limit {
        match space.evaluate(idx, best.as_ref().map(|b| &b.1)) {
            Ok(Some(inst)) => best = better(best, Some((idx, inst.fraction()))),
            Ok(None) => {}
            Err(Undecided) => undecided += 1,
        }
    }
    Ok(SearchReport {
        best: best.and_then(|(i, _)| space.instance(i)).map(|inst| Witness::new(inst, "search")),
        examined: limit as u64,
        undecided,
        exhausted: limit < total,
    })
}

/// Unit-voter max-min search for the tactic scenario.
#[derive(Clone, Debug)]
pub struct TacticSpace {
    method: MethodId,
    ell: usize,
    seats: usize,
    w_ballots: Vec<BallotContent>,
    o_ballots: Vec<BallotContent>,
    opts: CountOptions,
}

impl TacticSpace {
    pub fn new(method: &MethodId, ell: usize, seats: usize, spec: &SearchSpec) -> Result<Self> {
        spec.validate()?;
        if ell == 0 || ell > seats {
            return Err(Error::InvalidParameter(format!("need 1 <= ell <= S, got ell = {ell}, S = {seats}")));
        }
        if !method.has_engine() {
            return Err(Error::Unsupported(format!("{method} has no counting engine")));
        }
        let kind = method.ballot_kind();
        let max_len = spec.max_ballot_length.min(method.ballot_cap(seats).unwrap_or(usize::MAX));
        let w_pool = names("a", 0..spec.max_candidates.saturating_sub(seats).max(ell));
        let o_pool = names("b", 0..seats);
        Ok(TacticSpace {
            method: method.clone(),
            ell,
            seats,
            w_ballots: ballot_pool(kind, &w_pool, max_len),
            o_ballots: ballot_pool(kind, &o_pool, max_len),
            opts: spec.count_options(),
        })
    }

    /// `(V, W)` cells, largest fraction first.
    pub fn cells(&self, max_voters: usize) -> Vec<(usize, usize)> {
        let mut cells: Vec<(usize, usize)> = (2..=max_voters).flat_map(|v| (1..v).map(move |w| (v, w))).collect();
        cells.sort_by(|x, y| (ru(y.1) / ru(y.0)).cmp(&(ru(x.1) / ru(x.0))).then(x.cmp(y)));
        cells
    }

    pub fn strategies(&self, w: usize) -> u128 {
        multiset_count(self.w_ballots.len(), w)
    }

    fn profile(&self, v: usize, w: usize, strategy: u128, adversary: u128) -> Option<ScenarioInstance> {
        let mut ballots = Vec::new();
        for i in unrank_multiset(self.w_ballots.len(), w, strategy) {
            ballots.push(WeightedBallot::designated(Rational::one(), self.w_ballots[i].clone()));
        }
        for i in unrank_multiset(self.o_ballots.len(), v - w, adversary) {
            ballots.push(WeightedBallot::new(Rational::one(), self.o_ballots[i].clone()));
        }
        let profile = Profile::new(ballots, self.seats).ok()?.normalize();
        Some(ScenarioInstance::new(profile, BTreeSet::new(), self.ell, ScenarioId::Tactic))
    }

    /// An adversary profile defeating `strategy`, if one exists in the grid.
    /// `Err(Undecided)` when some count could not be decided.
    pub fn defeat(&self, v: usize, w: usize, strategy: u128) -> core::result::Result<Option<ScenarioInstance>, Undecided> {
        let mut undecided = false;
        for adv in 0..multiset_count(self.o_ballots.len(), v - w) {
            let Some(inst) = self.profile(v, w, strategy, adv) else { continue };
            match count(&self.method, &inst.profile, &self.opts).and_then(|o| inst.is_bad_outcome_possible(&o)) {
                Ok(true) => return Ok(Some(inst)),
                Ok(false) => {}
                Err(Error::InsufficientCandidates { .. }) => {}
                Err(_) => undecided = true,
            }
        }
        if undecided {
            Err(Undecided)
        } else {
            Ok(None)
        }
    }
}

fn search_tactic(method: &MethodId, ell: usize, seats: usize, spec: &SearchSpec) -> Result<SearchReport> {
    let space = TacticSpace::new(method, ell, seats, spec)?;
    let mut examined = 0u64;
    let mut undecided = 0u64;
    for (v, w) in space.cells(spec.max_voters) {
        let mut first = None;
        let mut all_defeated = true;
        for s in 0..space.strategies(w) {
            if examined >= spec.max_profiles {
                return Ok(SearchReport { best: None, examined, undecided, exhausted: true });
            }
            examined += 1;
            match space.defeat(v, w, s) {
                Ok(Some(inst)) => {
                    first.get_or_insert(inst);
                }
                Ok(None) => {
                    all_defeated = false;
                    break;
                }
                Err(Undecided) => {
                    undecided += 1;
                    all_defeated = false;
                    break;
                }
            }
        }
        if all_defeated {
            if let Some(inst) = first {
                return Ok(SearchReport { best: Some(Witness::new(inst, "search")), examined, undecided, exhausted: false });
            }
        }
    }
    Ok(SearchReport { best: None, examined, undecided, exhausted: false })
}

/// One failed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub family: &'static str,
    pub method: MethodId,
    pub ell: usize,
    pub seats: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    /// Inequalities that were decidable and checked.
    pub checks: u64,
    pub violations: Vec<Violation>,
    pub witnesses_verified: u64,
    pub searches: u64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Extra work done by [`audit_table`] for small `S`.
#[derive(Clone, Debug, Default)]
pub struct AuditOptions {
    /// Verify the covering catalog witness of each exact entry with `S <= 3`.
    pub witnesses: bool,
    /// Run the search on each exact entry with `S <= 3` and check it never
    /// exceeds the threshold.
    pub search: Option<SearchSpec>,
}

struct Auditor<'a> {
    report: &'a mut AuditReport,
    method: &'a MethodId,
    ell: usize,
    seats: usize,
}

impl Auditor<'_> {
    fn fail(&mut self, family: &'static str, detail: String) {
        self.report.violations.push(Violation {
            family,
            method: self.method.clone(),
            ell: self.ell,
            seats: self.seats,
            detail,
        });
    }

    /// `a <= b` fails only if `a`'s lower bound exceeds `b`'s upper bound.
    fn le(&mut self, family: &'static str, a: Option<&ThresholdValue>, b: Option<&ThresholdValue>, what: &str) {
        let (Some(a), Some(b)) = (a, b) else { return };
        let (Some(lo), Some(hi)) = (&a.lower, &b.upper) else { return };
        self.report.checks += 1;
        if lo > hi {
            self.fail(family, format!("{what}: {a} > {b}"));
        }
    }
}

fn lookup(book: &mut ThresholdBook, m: &MethodId, sc: ScenarioId, ell: usize, s: usize, kind: Kind) -> Result<Option<ThresholdValue>> {
    match book.threshold_of_kind(m, sc, ell, s, kind) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NotApplicable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Check every inequality family over `methods` for `S <= smax`.
pub fn audit_table(book: &mut ThresholdBook, methods: &[MethodId], smax: usize, opts: &AuditOptions) -> Result<AuditReport> {
    use ScenarioId::*;
    let mut report = AuditReport::default();
    for method in methods {
        for seats in 1..=smax {
            let mut pi = Vec::with_capacity(seats + 1);
            let mut hat = Vec::with_capacity(seats + 1);
            pi.push(Vec::new());
            hat.push(None);
            for ell in 1..=seats {
                let mut row = Vec::new();
                for sc in ScenarioId::ALL {
                    row.push(lookup(book, method, sc, ell, seats, Kind::Pi)?);
                }
                pi.push(row);
                hat.push(lookup(book, method, Tactic, ell, seats, Kind::PiHat)?);
            }
            let at = |row: &Vec<Option<ThresholdValue>>, sc: ScenarioId| {
                row[ScenarioId::ALL.iter().position(|x| *x == sc).expect("listed")].clone()
            };
            for ell in 1..=seats {
                let mut a = Auditor { report: &mut report, method, ell, seats };
                let row = &pi[ell];
                let (party, same, tactic) = (at(row, Party), at(row, Same), at(row, Tactic));
                let (pjr, ejr, wpsc, psc) = (at(row, PJR), at(row, EJR), at(row, WPSC), at(row, PSC));
                a.le("chain", party.as_ref(), same.as_ref(), "party <= same");
                a.le("chain", tactic.as_ref(), same.as_ref(), "tactic <= same");
                a.le("chain", same.as_ref(), pjr.as_ref(), "same <= pjr");
                a.le("chain", pjr.as_ref(), ejr.as_ref(), "pjr <= ejr");
                a.le("chain", same.as_ref(), wpsc.as_ref(), "same <= wpsc");
                a.le("chain", wpsc.as_ref(), psc.as_ref(), "wpsc <= psc");
                a.le("limit", hat[ell].as_ref(), tactic.as_ref(), "pihat <= pi");

                for bound in generic_bounds(ell, seats)? {
                    match bound.constraint {
                        GenericConstraint::Lower(g) => {
                            for t in row.iter().flatten() {
                                if let Some(u) = &t.upper {
                                    a.report.checks += 1;
                                    if *u < g {
                                        a.fail("generic-lower", format!("{t} below {g} ({})", bound.source));
                                    }
                                }
                            }
                        }
                        GenericConstraint::ComplementSum { complement } => {
                            for (i, t) in row.iter().enumerate() {
                                let other = &pi[complement][i];
                                if let (Some(x), Some(y)) = (t.as_ref().and_then(|t| t.upper.clone()), other.as_ref().and_then(|t| t.upper.clone())) {
                                    a.report.checks += 1;
                                    if x.clone() + &y < Rational::one() {
                                        a.fail("complement", format!("{} + {} < 1 for {}", x, y, ScenarioId::ALL[i]));
                                    }
                                }
                            }
                        }
                        GenericConstraint::Infimum(_) => {}
                    }
                }

                // Split bounds on the tactic limit.
                if let (Some(h), Some(p1)) = (&hat[ell], at(&pi[1], Tactic)) {
                    if let (Some(lo), Some(hi)) = (&h.lower, &p1.upper) {
                        a.report.checks += 1;
                        if *lo > ru(ell) * hi {
                            a.fail("split", format!("pihat({ell}) = {h} exceeds ell * pi(1) = {ell} * {p1}"));
                        }
                    }
                }
                for m in 1..=seats - ell {
                    if ell + m > seats {
                        break;
                    }
                    if let (Some(x), Some(y), Some(z)) = (&hat[ell], &hat[m], &hat[ell + m]) {
                        if let (Some(xu), Some(yu), Some(zl)) = (&x.upper, &y.upper, &z.lower) {
                            a.report.checks += 1;
                            if *zl > xu.clone() + yu {
                                a.fail("split", format!("pihat({}) = {z} > pihat({ell}) + pihat({m})", ell + m));
                            }
                        }
                    }
                }

                if seats <= 3 && method.has_engine() {
                    for (i, t) in row.iter().enumerate() {
                        let sc = ScenarioId::ALL[i];
                        let Some(t) = t else { continue };
                        let Some(value) = t.exact_value() else { continue };
                        if sc == Tactic {
                            continue;
                        }
                        if opts.witnesses {
                            if let Some(token) = covering_token(method, sc, ell, seats, value) {
                                let w = construct_witness(token, method, sc, ell, seats, None)?;
                                let ok = verify_witness(&w, method, &CountOptions::default())?;
                                a.report.witnesses_verified += 1;
                                if !ok || w.claimed_fraction != *value {
                                    a.fail("catalog", format!("{token} for {sc}: fraction {} vs {value}, bad = {ok}", w.claimed_fraction));
                                }
                            }
                        }
                        if let Some(spec) = &opts.search {
                            let found = search_lower_bound(method, sc, ell, seats, spec)?;
                            a.report.searches += 1;
                            if let Some(f) = found.best_fraction() {
                                if f > value {
                                    a.fail("search", format!("search found {f} above {sc} threshold {value}"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// A representative method list covering every engine and formula family.
pub fn standard_corpus() -> Vec<MethodId> {
    let r = Rational::ratio;
    vec![
        MethodId::Div(Rational::one()),
        MethodId::Div(r(1, 2)),
        MethodId::Div(Rational::zero()),
        MethodId::Quota(Rational::zero()),
        MethodId::Quota(Rational::one()),
        MethodId::BV,
        MethodId::AV,
        MethodId::SNTV,
        MethodId::LV(2),
        MethodId::CV,
        MethodId::CVq,
        MethodId::PhragmenU,
        MethodId::ThieleOpt(WeightScheme::Harmonic),
        MethodId::ThieleOpt(WeightScheme::Weak),
        MethodId::ThieleAdd(WeightScheme::Harmonic),
        MethodId::ThieleAdd(WeightScheme::Weak),
        MethodId::ThieleElim,
        MethodId::STV(Rational::one()),
        MethodId::STV(Rational::zero()),
        MethodId::PhragmenO,
        MethodId::ThieleO,
        MethodId::Borda(WeightScheme::Harmonic),
    ]
}
