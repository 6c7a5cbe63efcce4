//! Closed-form thresholds: for each method and scenario, the largest
//! fraction of the votes that `W` can hold and still suffer a bad outcome.
//!
//! Values are computed from formulas at query time, so parametric methods
//! are supported throughout. Quantities defined by sequences or linear
//! programs are drawn from a shared [`SequenceCache`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::ballots::{ProfileKind, WeightScheme};
use crate::error::{Error, Result};
use crate::method::MethodId;
use crate::numerics::Rational;
use crate::scenarios::ScenarioId;
use crate::sequences::{seq_c, SequenceCache};

/// Plain threshold, or its large-electorate limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Pi,
    PiHat,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Pi => "pi",
            Kind::PiHat => "pihat",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pi" => Ok(Kind::Pi),
            "pihat" | "pi-hat" | "hat" => Ok(Kind::PiHat),
            _ => Err(Error::InvalidParameter(format!("unknown threshold kind `{s}`"))),
        }
    }
}

/// Whether a bad outcome exists at exactly the threshold (`Plus`) or only
/// below it (`Minus`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Plus,
    Minus,
    Unspecified,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
            Side::Unspecified => "",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Exact,
    LowerBound,
    UpperBound,
    /// Known to lie in `[lower, upper]`.
    Interval,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "exact",
            Status::LowerBound => "lower-bound",
            Status::UpperBound => "upper-bound",
            Status::Interval => "interval",
            Status::Unknown => "unknown",
        })
    }
}

/// A threshold together with what is known about it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdValue {
    /// The exact value, or the bound named by `status`; `None` for
    /// `Interval` and `Unknown`.
    pub value: Option<Rational>,
    pub side: Side,
    pub kind: Kind,
    pub status: Status,
    /// A lower bound that is believed, but not proved, to be exact.
    pub conjectured: bool,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
    /// Token naming the construction or argument the value comes from.
    pub source: &'static str,
}

impl ThresholdValue {
    pub fn exact(value: Rational, source: &'static str) -> Self {
        let side = if value.is_one() { Side::Minus } else { Side::Unspecified };
        ThresholdValue {
            lower: Some(value.clone()),
            upper: Some(value.clone()),
            value: Some(value),
            side,
            kind: Kind::Pi,
            status: Status::Exact,
            conjectured: false,
            source,
        }
    }

    pub fn lower_bound(value: Rational, source: &'static str) -> Self {
        ThresholdValue {
            lower: Some(value.clone()),
            upper: None,
            value: Some(value),
            side: Side::Unspecified,
            kind: Kind::Pi,
            status: Status::LowerBound,
            conjectured: false,
            source,
        }
    }

    pub fn upper_bound(value: Rational, source: &'static str) -> Self {
        ThresholdValue {
            lower: None,
            upper: Some(value.clone()),
            value: Some(value),
            side: Side::Unspecified,
            kind: Kind::Pi,
            status: Status::UpperBound,
            conjectured: false,
            source,
        }
    }

    /// What is known is `lower <= pi <= upper`, either of which may be absent.
    pub fn bounded(lower: Option<Rational>, upper: Option<Rational>, source: &'static str) -> Self {
        match (lower, upper) {
            (Some(l), Some(u)) if l == u => ThresholdValue::exact(l, source),
            (Some(l), Some(u)) => ThresholdValue {
                value: None,
                side: Side::Unspecified,
                kind: Kind::Pi,
                status: Status::Interval,
                conjectured: false,
                lower: Some(l),
                upper: Some(u),
                source,
            },
            (lower, upper) => ThresholdValue {
                value: None,
                side: Side::Unspecified,
                kind: Kind::Pi,
                status: Status::Unknown,
                conjectured: false,
                lower,
                upper,
                source,
            },
        }
    }

    pub fn unknown(source: &'static str) -> Self {
        ThresholdValue::bounded(None, None, source)
    }

    pub fn with_kind(mut self, kind: Kind) -> Self {
        self.kind = kind;
        self
    }

    fn conjecture(mut self) -> Self {
        self.conjectured = true;
        self
    }

    /// The value when it is known exactly.
    pub fn exact_value(&self) -> Option<&Rational> {
        match self.status {
            Status::Exact => self.value.as_ref(),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }

    /// Tighten the lower bound to `bound` when that is stronger.
    fn raise_lower(self, bound: Rational) -> Self {
        if self.is_exact() || self.lower.as_ref().is_some_and(|l| *l >= bound) {
            return self;
        }
        let mut out = self;
        match out.status {
            Status::LowerBound => {
                out.value = Some(bound.clone());
                out.lower = Some(bound);
                out.conjectured = false;
            }
            Status::Interval | Status::Unknown | Status::UpperBound => {
                if out.upper.as_ref() == Some(&bound) {
                    let kind = out.kind;
                    return ThresholdValue::exact(bound, out.source).with_kind(kind);
                }
                out.lower = Some(bound);
                if out.upper.is_some() {
                    out.status = Status::Interval;
                    out.value = None;
                }
            }
            Status::Exact => {}
        }
        out
    }

    /// Render with an optional decimal approximation.
    pub fn render(&self, decimals: Option<usize>) -> String {
        let num = |r: &Rational| match decimals {
            Some(d) => format!("{r} (~{})", r.to_decimal(d)),
            None => format!("{r}"),
        };
        let mut s = match self.status {
            Status::Exact => format!("{}{}", num(self.value.as_ref().expect("exact value")), self.side),
            Status::LowerBound => format!(">= {}", num(self.value.as_ref().expect("bound"))),
            Status::UpperBound => format!("<= {}", num(self.value.as_ref().expect("bound"))),
            Status::Interval => format!(
                "in [{}, {}]",
                num(self.lower.as_ref().expect("lower")),
                num(self.upper.as_ref().expect("upper"))
            ),
            Status::Unknown => match (&self.lower, &self.upper) {
                (Some(l), _) => format!("unknown, >= {}", num(l)),
                (None, Some(u)) => format!("unknown, <= {}", num(u)),
                (None, None) => String::from("unknown"),
            },
        };
        if self.conjectured {
            s.push_str(" (conjectured exact)");
        }
        s
    }
}

impl fmt::Display for ThresholdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

/// Tactic thresholds come in pairs; `prefer_hat` says which one the
/// governing result is stated for.
struct TacticPair {
    pi: ThresholdValue,
    hat: ThresholdValue,
    prefer_hat: bool,
}

fn r(p: i64, q: i64) -> Rational {
    Rational::ratio(p, q)
}

fn ru(n: usize) -> Rational {
    Rational::from_usize(n)
}

/// `ell/(S+1)`.
fn optimal(ell: usize, seats: usize) -> Rational {
    ru(ell) / ru(seats + 1)
}

fn check_range(ell: usize, seats: usize) -> Result<()> {
    if seats == 0 || ell == 0 || ell > seats {
        return Err(Error::InvalidParameter(format!("need 1 <= ell <= S, got ell = {ell}, S = {seats}")));
    }
    Ok(())
}

/// Divisor method `Div(gamma)`, party lists.
pub fn divisor_party(gamma: &Rational, ell: usize, seats: usize) -> Option<Rational> {
    let num = ru(ell - 1) + gamma;
    let den = ru(ell - 1) + gamma * ru(seats + 2 - ell);
    (!den.is_zero()).then(|| num / den)
}

/// Quota method (and STV) with quota `V/(S+delta)`, party lists.
pub fn quota_party(delta: &Rational, ell: usize, seats: usize) -> Rational {
    let m = ru(seats + 2 - ell);
    (ru(ell) * &m - Rational::one() + delta) / ((ru(seats) + delta) * m)
}

/// EJR for block, approval and limited vote; `cap = None` for approval.
pub fn ejr_capped(cap: Option<usize>, ell: usize, seats: usize) -> Rational {
    let cap = cap.unwrap_or(usize::MAX);
    let k1 = (2 * ell).saturating_sub(cap.saturating_add(1));
    let m = cap.min(seats - k1);
    ru(m) / ru(seats + 1 - ell + m)
}

/// Tactic limit for limited vote with `L` names.
pub fn limited_tactic(cap: usize, ell: usize, seats: usize) -> Rational {
    let rest = seats + 1 - ell;
    let a = ru(ell * cap.min(rest));
    let b = ru(rest * cap.min(ell));
    a.clone() / (a + b)
}

/// Borda tactic limit and same-list value with weights `w`.
pub fn borda_values(w: &WeightScheme, ell: usize, seats: usize) -> (Rational, Rational) {
    let rest = w.mean(seats + 1 - ell);
    let tactic = rest.clone() / (w.mean(ell) + &rest);
    let same = rest.clone() / (w.w(ell) + rest);
    (tactic, same)
}

/// Best lower bound for Thiele's elimination method under PJR at `ell = 1`:
/// `max_m m/(m^2 + S)`.
pub fn elimination_pjr_bound(seats: usize) -> Rational {
    (1..=seats.max(1))
        .map(|m| ru(m) / ru(m * m + seats))
        .fold(Rational::zero(), Rational::max)
}

/// The universal constraints on any threshold at `(ell, S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericConstraint {
    /// `pi(ell, S) >= value`.
    Lower(Rational),
    /// `pi(ell, S) + pi(S+1-ell, S) >= 1`.
    ComplementSum { complement: usize },
    /// The infimum over all methods is `value`.
    Infimum(Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericBound {
    pub constraint: GenericConstraint,
    pub source: &'static str,
}

/// The bounds that hold for every method and scenario.
pub fn generic_bounds(ell: usize, seats: usize) -> Result<Vec<GenericBound>> {
    check_range(ell, seats)?;
    let mut out = Vec::new();
    if ell == 1 {
        out.push(GenericBound {
            constraint: GenericConstraint::Lower(optimal(1, seats)),
            source: "symmetric-singletons",
        });
    }
    if (seats + 1).is_multiple_of(ell) {
        out.push(GenericBound {
            constraint: GenericConstraint::Lower(optimal(ell, seats)),
            source: "symmetric-blocks",
        });
    }
    out.push(GenericBound {
        constraint: GenericConstraint::ComplementSum { complement: seats + 1 - ell },
        source: "seat-count",
    });
    if 2 * ell > seats {
        out.push(GenericBound { constraint: GenericConstraint::Infimum(r(1, 2)), source: "majority-infimum" });
    }
    Ok(out)
}

fn generic_lower(ell: usize, seats: usize) -> Option<Rational> {
    (ell == 1 || (seats + 1).is_multiple_of(ell)).then(|| optimal(ell, seats))
}

/// Proportionality criteria expressed as families of threshold inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    /// `pi_PJR(1, S) < 1/S`.
    JR,
    /// `pi_PJR(ell, S) < ell/S` for `ell < S`.
    PJR,
    /// `pi_EJR(ell, S) < ell/S` for `ell < S`.
    EJR,
    /// `pi_PSC(ell, S) <= ell/(S+1)` with a bad outcome allowed at equality.
    DPC,
    /// `pi_PSC(ell, S) < ell/S` for `ell < S`.
    PscStrong,
    /// `pi_WPSC(ell, S) < ell/S` for `ell < S`.
    WpscFloor,
}

impl Criterion {
    pub const ALL: [Criterion; 6] =
        [Criterion::JR, Criterion::PJR, Criterion::EJR, Criterion::DPC, Criterion::PscStrong, Criterion::WpscFloor];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::JR => "jr",
            Criterion::PJR => "pjr",
            Criterion::EJR => "ejr",
            Criterion::DPC => "dpc",
            Criterion::PscStrong => "psc-strong",
            Criterion::WpscFloor => "wpsc-floor",
        }
    }

    fn scenario(self) -> ScenarioId {
        match self {
            Criterion::JR | Criterion::PJR => ScenarioId::PJR,
            Criterion::EJR => ScenarioId::EJR,
            Criterion::DPC | Criterion::PscStrong => ScenarioId::PSC,
            Criterion::WpscFloor => ScenarioId::WPSC,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == lower)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown criterion `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        })
    }
}

fn below(t: &ThresholdValue, p: &Rational, allow_equal: bool) -> Verdict {
    let ok = |x: &Rational| x < p || (allow_equal && x == p);
    if t.upper.as_ref().is_some_and(ok) {
        Verdict::Holds
    } else if t.lower.as_ref().is_some_and(|x| !ok(x)) {
        Verdict::Fails
    } else {
        Verdict::Unknown
    }
}

/// A named grid of thresholds over `1 <= ell <= S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableSpec {
    pub name: &'static str,
    pub title: &'static str,
    pub method: MethodId,
    pub scenario: ScenarioId,
    pub kind: Kind,
}

/// Names accepted by [`table_spec`] (plus `sequences`, which is not a
/// threshold grid).
pub const TABLE_NAMES: [&str; 11] = [
    "optimal",
    "stl",
    "lr",
    "bv-ejr",
    "av-ejr",
    "tha-same",
    "tho-tactic",
    "tho-same",
    "tho-wpsc",
    "borda-tactic",
    "borda-same",
];

pub fn table_spec(name: &str) -> Result<TableSpec> {
    let (title, method, scenario, kind) = match name {
        "optimal" => ("party lists, D'Hondt: ell/(S+1)", MethodId::Div(Rational::one()), ScenarioId::Party, Kind::Pi),
        "stl" => ("party lists, Sainte-Lague", MethodId::Div(r(1, 2)), ScenarioId::Party, Kind::Pi),
        "lr" => ("party lists, largest remainder (Hare quota)", MethodId::Quota(Rational::zero()), ScenarioId::Party, Kind::Pi),
        "bv-ejr" => ("EJR, block vote", MethodId::BV, ScenarioId::EJR, Kind::Pi),
        "av-ejr" => ("EJR, approval vote", MethodId::AV, ScenarioId::EJR, Kind::Pi),
        "tha-same" => ("same list, Thiele addition", MethodId::ThieleAdd(WeightScheme::Harmonic), ScenarioId::Same, Kind::Pi),
        "tho-tactic" => ("tactic (large electorate), Thiele ordered", MethodId::ThieleO, ScenarioId::Tactic, Kind::PiHat),
        "tho-same" => ("same list, Thiele ordered", MethodId::ThieleO, ScenarioId::Same, Kind::Pi),
        "tho-wpsc" => ("weak solid coalition, Thiele ordered", MethodId::ThieleO, ScenarioId::WPSC, Kind::Pi),
        "borda-tactic" => ("tactic (large electorate), harmonic Borda", MethodId::Borda(WeightScheme::Harmonic), ScenarioId::Tactic, Kind::PiHat),
        "borda-same" => ("same list, harmonic Borda", MethodId::Borda(WeightScheme::Harmonic), ScenarioId::Same, Kind::Pi),
        _ => return Err(Error::InvalidParameter(format!("unknown table `{name}`"))),
    };
    Ok(TableSpec { name: TABLE_NAMES.iter().find(|n| **n == name).copied().unwrap_or("sequences"), title, method, scenario, kind })
}

/// Threshold oracle with a memo table for the sequences it needs.
#[derive(Clone, Debug, Default)]
pub struct ThresholdBook {
    cache: SequenceCache,
}

impl ThresholdBook {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cache(cache: SequenceCache) -> Self {
        ThresholdBook { cache }
    }

    pub fn cache(&self) -> &SequenceCache {
        &self.cache
    }

    pub fn cache_mut(&mut self) -> &mut SequenceCache {
        &mut self.cache
    }

    /// The threshold in the form the governing result states it: `PiHat`
    /// for tactic cases proved only in the large-electorate limit.
    pub fn threshold(&mut self, method: &MethodId, scenario: ScenarioId, ell: usize, seats: usize) -> Result<ThresholdValue> {
        check_range(ell, seats)?;
        check_pair(method, scenario, ell, seats)?;
        if scenario == ScenarioId::Tactic {
            let pair = self.tactic(method, ell, seats)?;
            return Ok(if pair.prefer_hat { pair.hat } else { pair.pi });
        }
        self.static_threshold(method, scenario, ell, seats)
    }

    /// The threshold of the requested kind.
    pub fn threshold_of_kind(
        &mut self,
        method: &MethodId,
        scenario: ScenarioId,
        ell: usize,
        seats: usize,
        kind: Kind,
    ) -> Result<ThresholdValue> {
        check_range(ell, seats)?;
        check_pair(method, scenario, ell, seats)?;
        if scenario == ScenarioId::Tactic {
            let pair = self.tactic(method, ell, seats)?;
            return Ok(match kind {
                Kind::Pi => pair.pi,
                Kind::PiHat => pair.hat,
            });
        }
        // Away from tactic, instances scale freely, so the limit agrees with
        // the plain threshold.
        Ok(self.static_threshold(method, scenario, ell, seats)?.with_kind(kind))
    }

    /// Evaluate a proportionality criterion for `S` seats.
    pub fn criterion_check(&mut self, method: &MethodId, criterion: Criterion, seats: usize) -> Result<Verdict> {
        if seats == 0 {
            return Err(Error::InvalidParameter("S must be positive".into()));
        }
        let scenario = criterion.scenario();
        if !scenario.accepts(method.ballot_kind()) {
            return Err(Error::NotApplicable(format!("{criterion} needs {} ballots", match scenario {
                ScenarioId::PSC | ScenarioId::WPSC => "ordered",
                _ => "unordered",
            })));
        }
        let ells: Vec<usize> = match criterion {
            Criterion::JR => (seats > 1).then_some(1).into_iter().collect(),
            Criterion::DPC => (1..=seats).collect(),
            _ => (1..seats).collect(),
        };
        let mut verdict = Verdict::Holds;
        for ell in ells {
            let t = match self.threshold(method, scenario, ell, seats) {
                Ok(t) => t,
                Err(Error::NotApplicable(_)) => continue,
                Err(e) => return Err(e),
            };
            let v = match criterion {
                Criterion::DPC => below(&t, &optimal(ell, seats), true),
                _ => below(&t, &(ru(ell) / ru(seats)), false),
            };
            match v {
                Verdict::Fails => return Ok(Verdict::Fails),
                Verdict::Unknown => verdict = Verdict::Unknown,
                Verdict::Holds => {}
            }
        }
        Ok(verdict)
    }

    /// Every cell of a named table for `1 <= ell <= S <= smax`.
    pub fn table(&mut self, spec: &TableSpec, smax: usize) -> Result<Vec<Vec<ThresholdValue>>> {
        (1..=smax)
            .map(|s| {
                (1..=s)
                    .map(|ell| self.threshold_of_kind(&spec.method, spec.scenario, ell, s, spec.kind))
                    .collect()
            })
            .collect()
    }

    fn alpha(&mut self, n: usize, w: &WeightScheme) -> Result<Option<Rational>> {
        if n > self.cache.alpha_cap() {
            return Ok(None);
        }
        self.cache.alpha(n, w).map(Some)
    }

    /// `1/(1 + alpha_S(w))`, or its bounds when `alpha_S` is out of reach.
    fn addition_single(&mut self, w: &WeightScheme, seats: usize) -> Result<ThresholdValue> {
        Ok(match self.alpha(seats, w)? {
            Some(a) => ThresholdValue::exact(Rational::one() / (Rational::one() + a), "addition-lp-vertex"),
            None => ThresholdValue::bounded(
                Some(optimal(1, seats)),
                Some(Rational::one() / (Rational::one() + ru(seats) / w.psi(seats))),
                "addition-lp-over-cap",
            ),
        })
    }

    fn static_threshold(&mut self, method: &MethodId, scenario: ScenarioId, ell: usize, seats: usize) -> Result<ThresholdValue> {
        use ScenarioId::*;
        let opt = optimal(ell, seats);
        let exact = ThresholdValue::exact;
        let v = match method {
            MethodId::Div(gamma) => match divisor_party(gamma, ell, seats) {
                Some(v) => exact(v, "divisor-boundary"),
                None => ThresholdValue::unknown("adams-ill-defined"),
            },
            MethodId::Quota(delta) => quota_value(delta, ell, seats),
            MethodId::BV | MethodId::AV => match scenario {
                EJR => exact(ejr_capped(method.ballot_cap(seats), ell, seats), "ejr-tie-construction"),
                _ => exact(r(1, 2), "majority-list"),
            },
            MethodId::SNTV => exact(opt, "sntv-equal-split"),
            MethodId::LV(cap) => {
                let cap = (*cap).min(seats);
                match scenario {
                    EJR => exact(ejr_capped(Some(cap), ell, seats), "ejr-tie-construction"),
                    Party => ThresholdValue::bounded(
                        generic_lower(ell, seats),
                        Some(limited_tactic(cap, ell, seats)),
                        "limited-vote-party",
                    ),
                    _ => exact(limited_tactic(cap, ell, seats), "sntv-equal-split"),
                }
            }
            MethodId::CV => ThresholdValue::unknown("cumulative-free-split"),
            MethodId::CVq => exact(Rational::one(), "cvq-self-votes"),
            MethodId::PhragmenU => match scenario {
                EJR if ell >= 2 => {
                    let lower = if (ell, seats) == (2, 12) { r(409, 2409) } else { opt };
                    ThresholdValue::bounded(Some(lower), None, "phragmen-ejr-counterexample")
                }
                _ => exact(opt, "phragmen-free-voting-power"),
            },
            MethodId::ThieleOpt(w) => self.optimize_static(w, scenario, ell, seats)?,
            MethodId::ThieleAdd(w) => self.addition_static(w, scenario, ell, seats)?,
            MethodId::ThieleElim => match scenario {
                PJR | EJR => {
                    let lower = if ell == 1 { elimination_pjr_bound(seats) } else { opt };
                    ThresholdValue::bounded(Some(lower), None, "elimination-decoy")
                }
                _ => exact(opt, "elimination-same"),
            },
            MethodId::STV(delta) => quota_value(delta, ell, seats),
            MethodId::PhragmenO => match scenario {
                PSC => exact(Rational::one(), "no-elimination-self-first"),
                _ => exact(opt, "phragmen-free-voting-power"),
            },
            MethodId::ThieleO => {
                let a = self.cache.a(seats + 1 - ell)?;
                match scenario {
                    Party => exact(opt, "divisor-boundary"),
                    Same => exact(ru(ell) / (ru(ell) + a), "ordered-suffix-strategy"),
                    WPSC => {
                        let c = Rational::from_bigint(seq_c(ell)?);
                        exact(c.clone() / (c + a), "ordered-suffix-strategy")
                    }
                    _ => exact(Rational::one(), "no-elimination-self-first"),
                }
            }
            MethodId::Borda(w) => {
                let (_, same) = borda_values(w, ell, seats);
                match scenario {
                    Party if w.is_harmonic_upto(seats) => exact(opt, "divisor-boundary"),
                    Party => ThresholdValue::bounded(generic_lower(ell, seats), Some(same), "borda-party"),
                    PSC => ThresholdValue::bounded(Some(same), None, "borda-psc"),
                    _ => exact(same, "ordered-suffix-strategy"),
                }
            }
        };
        Ok(match generic_lower(ell, seats) {
            Some(g) => v.raise_lower(g),
            None => v,
        })
    }

    fn optimize_static(&mut self, w: &WeightScheme, scenario: ScenarioId, ell: usize, seats: usize) -> Result<ThresholdValue> {
        use ScenarioId::*;
        if w.is_constant_upto(seats) {
            return self.static_threshold(&MethodId::AV, scenario, ell, seats);
        }
        let opt = optimal(ell, seats);
        if w.is_harmonic_upto(seats) {
            return Ok(ThresholdValue::exact(opt, "optimize-swap"));
        }
        let peak = (1..=seats).map(|k| ru(k) * w.w(k)).fold(Rational::zero(), Rational::max);
        let single = Rational::one() / (Rational::one() + ru(seats) / &peak);
        Ok(match (scenario, ell) {
            (Party, 1) => ThresholdValue::bounded(Some(optimal(1, seats)), Some(single), "optimize-cyclic"),
            (Party, _) => ThresholdValue::unknown("optimize-party"),
            (_, 1) => ThresholdValue::exact(single, "optimize-cyclic"),
            _ => {
                let wl = w.w(ell);
                let bound = Rational::one() / (&wl * ru(seats + 1 - ell) + Rational::one());
                if wl.is_zero() {
                    ThresholdValue::exact(bound, "weak-optimize-split")
                } else {
                    ThresholdValue::lower_bound(bound, "optimize-threshold-weight")
                }
            }
        })
    }

    fn addition_static(&mut self, w: &WeightScheme, scenario: ScenarioId, ell: usize, seats: usize) -> Result<ThresholdValue> {
        use ScenarioId::*;
        let opt = optimal(ell, seats);
        let harmonic = w.is_harmonic_upto(seats);
        if scenario == Party {
            return Ok(if harmonic {
                ThresholdValue::exact(opt, "divisor-boundary")
            } else if ell == 1 {
                let same = self.addition_single(w, seats)?;
                ThresholdValue::bounded(Some(opt), same.upper, "addition-party")
            } else {
                ThresholdValue::unknown("addition-party")
            });
        }
        if ell == 1 {
            return self.addition_single(w, seats);
        }
        let wl = w.w(ell);
        if wl.is_zero() {
            return Ok(ThresholdValue::exact(Rational::one(), "weak-optimize-split"));
        }
        let inv = wl.recip()?;
        let n = seats + 1 - ell;
        let bound = match self.alpha(n, w)? {
            Some(a) => inv.clone() / (inv + a),
            // alpha_n <= n
            None => inv.clone() / (inv + ru(n)),
        };
        Ok(match scenario {
            EJR => ThresholdValue::bounded(Some(bound), None, "addition-lp-vertex"),
            _ => {
                let t = ThresholdValue::lower_bound(bound, "addition-lp-vertex");
                if harmonic {
                    t.conjecture()
                } else {
                    t
                }
            }
        })
    }

    fn tactic(&mut self, method: &MethodId, ell: usize, seats: usize) -> Result<TacticPair> {
        let opt = optimal(ell, seats);
        let both = |t: ThresholdValue, prefer_hat: bool| TacticPair {
            hat: t.clone().with_kind(Kind::PiHat),
            pi: t,
            prefer_hat,
        };
        let limit_only = |hat: Rational, pi_exact: bool, pi_upper: Option<Rational>, source: &'static str| {
            let pi = if pi_exact {
                ThresholdValue::exact(hat.clone(), source)
            } else {
                ThresholdValue::bounded(Some(hat.clone()), pi_upper, source)
            };
            TacticPair { pi, hat: ThresholdValue::exact(hat, source).with_kind(Kind::PiHat), prefer_hat: true }
        };
        Ok(match method {
            MethodId::Div(_) | MethodId::Quota(_) => {
                let party = self.static_threshold(method, ScenarioId::Party, ell, seats)?;
                let t = ThresholdValue::bounded(generic_lower(ell, seats), party.upper.clone(), "party-tactic");
                TacticPair { hat: ThresholdValue::bounded(None, party.upper, "party-tactic").with_kind(Kind::PiHat), pi: t, prefer_hat: false }
            }
            MethodId::BV | MethodId::AV => both(ThresholdValue::exact(r(1, 2), "majority-list"), false),
            MethodId::SNTV => limit_only(opt, ell == 1, None, "sntv-equal-split"),
            MethodId::LV(cap) if *cap >= seats => both(ThresholdValue::exact(r(1, 2), "majority-list"), false),
            MethodId::LV(cap) => limit_only(limited_tactic(*cap, ell, seats), ell <= *cap, None, "sntv-equal-split"),
            MethodId::CV => both(ThresholdValue::exact(opt, "sntv-equal-split"), true),
            MethodId::CVq => both(ThresholdValue::exact(opt, "sntv-equal-split"), false),
            MethodId::PhragmenU | MethodId::ThieleElim | MethodId::PhragmenO => {
                both(ThresholdValue::exact(opt, "split-equality"), false)
            }
            MethodId::STV(delta) => {
                let same = quota_value(delta, ell, seats);
                limit_only(opt, ell == 1 || delta.is_one(), same.upper, "split-equality")
            }
            MethodId::ThieleOpt(w) => {
                if w.is_constant_upto(seats) {
                    both(ThresholdValue::exact(r(1, 2), "majority-list"), false)
                } else if w.is_harmonic_upto(seats) {
                    both(ThresholdValue::exact(opt, "split-equality"), false)
                } else {
                    let peak = (1..=seats).map(|k| ru(k) * w.w(k)).fold(Rational::zero(), Rational::max);
                    if peak.is_one() {
                        let same = self.optimize_static(w, ScenarioId::Same, ell, seats)?;
                        let upper = same.exact_value().cloned();
                        limit_only(opt, ell == 1, upper, "split-equality")
                    } else {
                        let same = self.optimize_static(w, ScenarioId::Same, ell, seats)?;
                        let upper = same.exact_value().cloned();
                        TacticPair {
                            pi: ThresholdValue::bounded(generic_lower(ell, seats), upper.clone(), "optimize-tactic"),
                            hat: ThresholdValue::bounded(None, upper, "optimize-tactic").with_kind(Kind::PiHat),
                            prefer_hat: false,
                        }
                    }
                }
            }
            MethodId::ThieleAdd(w) => {
                if w.is_weak_upto(seats) {
                    limit_only(opt, ell == 1, None, "split-equality")
                } else if ell == 1 {
                    both(self.addition_single(w, seats)?, false)
                } else {
                    let single = self.addition_single(w, seats)?;
                    let hi1 = single.upper.clone().expect("single-seat upper bound");
                    let lo1 = single.lower.clone().expect("single-seat lower bound");
                    // Split W into ell single-seat groups; the complement
                    // split bounds from below.
                    let upper = (ru(ell) * &hi1).min(Rational::one());
                    let _ = lo1;
                    let lower = (Rational::one() - ru(seats + 1 - ell) * &hi1).max(Rational::zero());
                    let lower = (!lower.is_zero()).then_some(lower);
                    let hat = ThresholdValue::bounded(lower.clone(), Some(upper), "addition-split").with_kind(Kind::PiHat);
                    let pi_lower = lower.into_iter().chain(generic_lower(ell, seats)).fold(None::<Rational>, |acc, x| {
                        Some(match acc {
                            Some(a) => a.max(x),
                            None => x,
                        })
                    });
                    TacticPair { pi: ThresholdValue::bounded(pi_lower, None, "addition-split"), hat, prefer_hat: true }
                }
            }
            MethodId::ThieleO => {
                let al = self.cache.a(ell)?;
                let ar = self.cache.a(seats + 1 - ell)?;
                let hat = al.clone() / (al + &ar);
                let same = ru(ell) / (ru(ell) + ar);
                limit_only(hat, ell == 1, Some(same), "ordered-suffix-strategy")
            }
            MethodId::Borda(w) => {
                let (hat, same) = borda_values(w, ell, seats);
                limit_only(hat, ell == 1, Some(same), "ordered-suffix-strategy")
            }
        })
    }
}

fn quota_value(delta: &Rational, ell: usize, seats: usize) -> ThresholdValue {
    if delta.is_negative() || *delta > 1 {
        return ThresholdValue::unknown("quota-outside-range");
    }
    ThresholdValue::exact(quota_party(delta, ell, seats), "quota-boundary")
}

/// Reject pairs with no instances: scenario and ballot kind must match, and
/// ballots capped below `ell` names cannot carry a common target set.
fn check_pair(method: &MethodId, scenario: ScenarioId, ell: usize, seats: usize) -> Result<()> {
    let kind = method.ballot_kind();
    if !scenario.accepts(kind) {
        return Err(Error::NotApplicable(format!("scenario {scenario} does not apply to {} ballots", kind.name())));
    }
    if kind == ProfileKind::Party && !matches!(scenario, ScenarioId::Party | ScenarioId::Same | ScenarioId::Tactic) {
        return Err(Error::NotApplicable(format!("scenario {scenario} does not apply to party ballots")));
    }
    if let MethodId::LV(l) = method {
        if *l > seats {
            return Err(Error::NotApplicable(format!("{method} needs S >= {l}, got S = {seats}")));
        }
    }
    if scenario != ScenarioId::Tactic {
        if let Some(cap) = method.ballot_cap(seats) {
            if ell > cap {
                return Err(Error::NotApplicable(format!(
                    "{method} ballots carry at most {cap} names, fewer than ell = {ell}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn value(m: &MethodId, sc: ScenarioId, ell: usize, s: usize) -> Rational {
        ThresholdBook::new().threshold(m, sc, ell, s).unwrap().value.unwrap()
    }

    #[test]
    fn party_methods() {
        assert_eq!(value(&MethodId::Div(q("1")), ScenarioId::Party, 2, 5), q("1/3"));
        assert_eq!(value(&MethodId::Div(q("1/2")), ScenarioId::Party, 2, 3), q("3/5"));
        assert_eq!(value(&MethodId::Quota(q("0")), ScenarioId::Party, 2, 4), q("7/16"));
        let adams = ThresholdBook::new().threshold(&MethodId::Div(q("0")), ScenarioId::Party, 1, 3).unwrap();
        assert_eq!(adams.status, Status::Unknown);
    }

    #[test]
    fn ejr_nonmonotone() {
        let row: Vec<_> = (1..=3).map(|l| value(&MethodId::BV, ScenarioId::EJR, l, 3)).collect();
        assert_eq!(row, [q("1/2"), q("3/5"), q("1/2")]);
        assert_eq!(value(&MethodId::AV, ScenarioId::EJR, 3, 5), q("5/8"));
    }

    #[test]
    fn limited_vote() {
        let t = ThresholdBook::new().threshold(&MethodId::LV(2), ScenarioId::Tactic, 1, 4).unwrap();
        assert_eq!((t.value.unwrap(), t.kind), (q("1/3"), Kind::PiHat));
        assert!(matches!(
            ThresholdBook::new().threshold(&MethodId::SNTV, ScenarioId::Same, 2, 3),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn value_one_is_minus() {
        let t = ThresholdBook::new().threshold(&MethodId::CVq, ScenarioId::Same, 1, 3).unwrap();
        assert_eq!((t.value.unwrap(), t.side), (q("1"), Side::Minus));
    }

    #[test]
    fn criteria() {
        let mut book = ThresholdBook::new();
        let h = WeightScheme::Harmonic;
        for s in 1..=5 {
            assert_eq!(book.criterion_check(&MethodId::ThieleOpt(h.clone()), Criterion::EJR, s).unwrap(), Verdict::Holds);
        }
        assert_eq!(book.criterion_check(&MethodId::ThieleAdd(h.clone()), Criterion::JR, 5).unwrap(), Verdict::Holds);
        assert_eq!(book.criterion_check(&MethodId::ThieleAdd(h), Criterion::JR, 6).unwrap(), Verdict::Fails);
        assert_eq!(book.criterion_check(&MethodId::BV, Criterion::JR, 3).unwrap(), Verdict::Fails);
        assert_eq!(book.criterion_check(&MethodId::STV(q("1")), Criterion::DPC, 4).unwrap(), Verdict::Holds);
    }

    #[test]
    fn generic() {
        let b = generic_bounds(2, 3).unwrap();
        assert!(b.iter().any(|g| g.constraint == GenericConstraint::Lower(q("1/2"))));
        let b = generic_bounds(3, 5).unwrap();
        assert!(b.iter().any(|g| g.constraint == GenericConstraint::Infimum(q("1/2"))));
    }
}
