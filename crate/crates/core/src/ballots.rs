//! Candidates, ballots, profiles, committees and weight schemes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::numerics::Rational;

/// Characters that cannot appear in a candidate name; they delimit ballots
/// in the text formats.
const RESERVED: &[char] = &['{', '}', '[', ']', ':', '#', '!', ',', '"', '\''];

/// A candidate (or, for party ballots, a party) identified by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate(String);

impl Candidate {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
            return Err(Error::InvalidCandidate(name));
        }
        Ok(Candidate(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl core::str::FromStr for Candidate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Candidate::new(s)
    }
}

impl fmt::Debug for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Convenience constructor for a list of candidate names.
///
/// # Panics
/// When a name is not a valid candidate name.
pub fn cands(names: &[&str]) -> Vec<Candidate> {
    names.iter().map(|n| Candidate::new(*n).expect("valid candidate name")).collect()
}

/// What a single ballot says.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum BallotContent {
    /// A vote for one party.
    Party(Candidate),
    /// An unordered set of approved candidates.
    Unordered(BTreeSet<Candidate>),
    /// A ranked list of distinct candidates, most preferred first.
    Ordered(Vec<Candidate>),
}

impl BallotContent {
    pub fn unordered(names: &[&str]) -> Self {
        BallotContent::Unordered(cands(names).into_iter().collect())
    }

    pub fn ordered(names: &[&str]) -> Self {
        BallotContent::Ordered(cands(names))
    }

    pub fn party(name: &str) -> Self {
        BallotContent::Party(Candidate::new(name).expect("valid party name"))
    }

    pub fn kind(&self) -> ProfileKind {
        match self {
            BallotContent::Party(_) => ProfileKind::Party,
            BallotContent::Unordered(_) => ProfileKind::Unordered,
            BallotContent::Ordered(_) => ProfileKind::Ordered,
        }
    }

    /// Number of names on the ballot.
    pub fn len(&self) -> usize {
        match self {
            BallotContent::Party(_) => 1,
            BallotContent::Unordered(s) => s.len(),
            BallotContent::Ordered(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Names on the ballot, in ballot order for ranked ballots.
    pub fn names(&self) -> Vec<&Candidate> {
        match self {
            BallotContent::Party(p) => alloc::vec![p],
            BallotContent::Unordered(s) => s.iter().collect(),
            BallotContent::Ordered(v) => v.iter().collect(),
        }
    }

    pub fn name_set(&self) -> BTreeSet<Candidate> {
        self.names().into_iter().cloned().collect()
    }

    pub fn contains(&self, c: &Candidate) -> bool {
        match self {
            BallotContent::Party(p) => p == c,
            BallotContent::Unordered(s) => s.contains(c),
            BallotContent::Ordered(v) => v.contains(c),
        }
    }

    /// The set of the first `m` names; `None` if the ballot is shorter.
    pub fn top(&self, m: usize) -> Option<BTreeSet<Candidate>> {
        match self {
            BallotContent::Ordered(v) if v.len() >= m => Some(v[..m].iter().cloned().collect()),
            _ => None,
        }
    }

    /// Rename every candidate through `f`.
    pub fn map_names(&self, f: impl Fn(&Candidate) -> Candidate) -> Self {
        match self {
            BallotContent::Party(p) => BallotContent::Party(f(p)),
            BallotContent::Unordered(s) => BallotContent::Unordered(s.iter().map(&f).collect()),
            BallotContent::Ordered(v) => BallotContent::Ordered(v.iter().map(&f).collect()),
        }
    }
}

impl fmt::Display for BallotContent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |names: Vec<&Candidate>| {
            names.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" ")
        };
        match self {
            BallotContent::Party(p) => write!(f, "party {p}"),
            BallotContent::Unordered(_) => write!(f, "{{{}}}", join(self.names())),
            BallotContent::Ordered(_) => write!(f, "[{}]", join(self.names())),
        }
    }
}

/// The three ballot families a profile can consist of.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum ProfileKind {
    Party,
    Unordered,
    Ordered,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Party => "party",
            ProfileKind::Unordered => "unordered",
            ProfileKind::Ordered => "ordered",
        }
    }
}

/// A group of identical ballots with a positive rational total weight.
///
/// `designated` marks groups that belong to the voter set `W` of a scenario.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct WeightedBallot {
    pub content: BallotContent,
    pub weight: Rational,
    pub designated: bool,
}

impl WeightedBallot {
    pub fn new(weight: Rational, content: BallotContent) -> Self {
        WeightedBallot { content, weight, designated: false }
    }

    pub fn designated(weight: Rational, content: BallotContent) -> Self {
        WeightedBallot { content, weight, designated: true }
    }
}

/// A validated election profile.
///
/// All groups share one ballot kind, every weight is positive, every named
/// candidate belongs to the universe, and the universe is at least as large
/// as the number of seats.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Profile {
    ballots: Vec<WeightedBallot>,
    candidates: BTreeSet<Candidate>,
    seats: usize,
    kind: ProfileKind,
}

impl Profile {
    /// Build a profile whose universe is exactly the named candidates.
    pub fn new(ballots: Vec<WeightedBallot>, seats: usize) -> Result<Self> {
        let universe = ballots
            .iter()
            .flat_map(|b| b.content.names().into_iter().cloned())
            .collect();
        Self::with_candidates(ballots, universe, seats)
    }

    /// Build a profile with an explicit candidate universe, which may include
    /// candidates nobody names.
    pub fn with_candidates(
        ballots: Vec<WeightedBallot>,
        candidates: BTreeSet<Candidate>,
        seats: usize,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidProfile(msg));
        let Some(first) = ballots.first() else {
            return invalid("no ballots".into());
        };
        let kind = first.content.kind();
        if seats == 0 {
            return invalid("the number of seats must be positive".into());
        }
        for (i, b) in ballots.iter().enumerate() {
            if b.content.kind() != kind {
                return invalid(format!(
                    "ballot {i} is {} but ballot 0 is {}",
                    b.content.kind().name(),
                    kind.name()
                ));
            }
            if !b.weight.is_positive() {
                return invalid(format!("ballot {i} has non-positive weight {}", b.weight));
            }
            if b.content.is_empty() {
                return invalid(format!("ballot {i} names no candidate"));
            }
            if let BallotContent::Ordered(v) = &b.content {
                let distinct: BTreeSet<_> = v.iter().collect();
                if distinct.len() != v.len() {
                    return invalid(format!("ballot {i} ranks a candidate twice"));
                }
            }
            if let Some(c) = b.content.names().into_iter().find(|c| !candidates.contains(*c)) {
                return invalid(format!("ballot {i} names {c}, who is not a candidate"));
            }
        }
        if kind != ProfileKind::Party && candidates.len() < seats {
            return Err(Error::InsufficientCandidates { candidates: candidates.len(), seats });
        }
        Ok(Profile { ballots, candidates, seats, kind })
    }

    pub fn ballots(&self) -> &[WeightedBallot] {
        &self.ballots
    }

    pub fn candidates(&self) -> &BTreeSet<Candidate> {
        &self.candidates
    }

    pub fn seats(&self) -> usize {
        self.seats
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn total_weight(&self) -> Rational {
        self.ballots.iter().map(|b| &b.weight).sum()
    }

    pub fn designated_weight(&self) -> Rational {
        self.ballots.iter().filter(|b| b.designated).map(|b| &b.weight).sum()
    }

    /// Same ballots and candidates, different number of seats.
    pub fn with_seats(&self, seats: usize) -> Result<Self> {
        Self::with_candidates(self.ballots.clone(), self.candidates.clone(), seats)
    }

    /// Merge groups with identical content and designation, and sort them.
    pub fn normalize(&self) -> Self {
        let mut merged: BTreeMap<(BallotContent, bool), Rational> = BTreeMap::new();
        for b in &self.ballots {
            *merged
                .entry((b.content.clone(), b.designated))
                .or_insert_with(Rational::zero) += &b.weight;
        }
        let ballots = merged
            .into_iter()
            .map(|((content, designated), weight)| WeightedBallot { content, weight, designated })
            .collect();
        Profile { ballots, candidates: self.candidates.clone(), seats: self.seats, kind: self.kind }
    }

    /// Multiply every weight by a positive factor.
    pub fn scale(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidParameter(format!("scale factor {factor} is not positive")));
        }
        let ballots = self
            .ballots
            .iter()
            .map(|b| WeightedBallot { weight: &b.weight * factor, ..b.clone() })
            .collect();
        Ok(Profile { ballots, candidates: self.candidates.clone(), seats: self.seats, kind: self.kind })
    }

    /// Rename candidates through `f`, which must be injective.
    pub fn relabel(&self, f: impl Fn(&Candidate) -> Candidate) -> Result<Self> {
        let ballots = self
            .ballots
            .iter()
            .map(|b| WeightedBallot { content: b.content.map_names(&f), ..b.clone() })
            .collect();
        let candidates: BTreeSet<_> = self.candidates.iter().map(&f).collect();
        if candidates.len() != self.candidates.len() {
            return Err(Error::InvalidParameter("relabeling is not injective".into()));
        }
        Self::with_candidates(ballots, candidates, self.seats)
    }

    /// Fail unless the profile has ballots of kind `expected`.
    pub fn expect_kind(&self, expected: ProfileKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::BallotKind { expected: expected.name(), found: self.kind.name() });
        }
        Ok(())
    }
}

/// A set of elected candidates, kept sorted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Committee(Vec<Candidate>);

impl Committee {
    pub fn new(members: impl IntoIterator<Item = Candidate>) -> Self {
        let set: BTreeSet<_> = members.into_iter().collect();
        Committee(set.into_iter().collect())
    }

    pub fn from_names(names: &[&str]) -> Self {
        Committee::new(cands(names))
    }

    pub fn members(&self) -> &[Candidate] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: &Candidate) -> bool {
        self.0.binary_search(c).is_ok()
    }

    /// Number of members that also appear in `set`.
    pub fn overlap<'a>(&self, set: impl IntoIterator<Item = &'a Candidate>) -> usize {
        set.into_iter().filter(|c| self.contains(c)).count()
    }
}

impl fmt::Display for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.0.iter().map(|c| c.as_str()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

impl fmt::Debug for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Every committee reachable under some resolution of ties.
///
/// `truncated` is set when enumeration stopped at the branch cap; the set is
/// then a proper subset of the true outcomes.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct OutcomeSet {
    pub committees: BTreeSet<Committee>,
    pub truncated: bool,
}

impl OutcomeSet {
    pub fn len(&self) -> usize {
        self.committees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.committees.is_empty()
    }

    pub fn contains(&self, c: &Committee) -> bool {
        self.committees.contains(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Committee> {
        self.committees.iter()
    }

    /// The unique committee, if ties did not matter.
    pub fn unique(&self) -> Option<&Committee> {
        if self.committees.len() == 1 && !self.truncated {
            self.committees.iter().next()
        } else {
            None
        }
    }
}

/// Seats per party, keyed by party name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct SeatVector(pub BTreeMap<Candidate, usize>);

impl SeatVector {
    pub fn seats_of(&self, party: &Candidate) -> usize {
        self.0.get(party).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

impl fmt::Display for SeatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(|(p, s)| format!("{p}={s}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A non-increasing sequence of weights `w_1 = 1 >= w_2 >= ... >= 0`, used by
/// Thiele-type methods and positional scoring.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum WeightScheme {
    /// `w_k = 1/k`.
    Harmonic,
    /// `w = (1, 0, 0, ...)`.
    Weak,
    /// `w_k = 1` for every `k`.
    Constant,
    /// A finite prefix followed by a constant tail.
    Explicit { prefix: Vec<Rational>, tail: Rational },
}

impl WeightScheme {
    /// Build and validate an explicit scheme.
    pub fn explicit(prefix: Vec<Rational>, tail: Rational) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidWeights(msg.into()));
        match prefix.first() {
            Some(w1) if w1.is_one() => {}
            Some(_) => return bad("the first weight must be 1"),
            None => return bad("at least one weight is required"),
        }
        if prefix.windows(2).any(|p| p[1] > p[0]) {
            return bad("weights must be non-increasing");
        }
        if tail.is_negative() {
            return bad("weights must be non-negative");
        }
        if tail > *prefix.last().expect("non-empty") {
            return bad("the tail weight exceeds the last listed weight");
        }
        Ok(WeightScheme::Explicit { prefix, tail })
    }

    /// The `k`-th weight, 1-based. `w(0)` is taken to be 0.
    pub fn w(&self, k: usize) -> Rational {
        if k == 0 {
            return Rational::zero();
        }
        match self {
            WeightScheme::Harmonic => Rational::ratio(1, k as i64),
            WeightScheme::Weak => {
                if k == 1 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            WeightScheme::Constant => Rational::one(),
            WeightScheme::Explicit { prefix, tail } => {
                prefix.get(k - 1).cloned().unwrap_or_else(|| tail.clone())
            }
        }
    }

    /// `w_1, ..., w_n`.
    pub fn prefix(&self, n: usize) -> Vec<Rational> {
        (1..=n).map(|k| self.w(k)).collect()
    }

    /// `psi(n) = w_1 + ... + w_n`.
    pub fn psi(&self, n: usize) -> Rational {
        self.prefix(n).iter().sum()
    }

    /// Mean of the first `k` weights.
    pub fn mean(&self, k: usize) -> Rational {
        self.psi(k) / Rational::from_usize(k)
    }

    /// True when `w_k = 1/k` for every `k <= n`.
    pub fn is_harmonic_upto(&self, n: usize) -> bool {
        matches!(self, WeightScheme::Harmonic)
            || (1..=n).all(|k| self.w(k) == Rational::ratio(1, k as i64))
    }

    /// True when `w_k = 0` for every `2 <= k <= n`.
    pub fn is_weak_upto(&self, n: usize) -> bool {
        (2..=n).all(|k| self.w(k).is_zero())
    }

    /// True when `w_k = 1` for every `k <= n`.
    pub fn is_constant_upto(&self, n: usize) -> bool {
        (1..=n).all(|k| self.w(k).is_one())
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Harmonic => f.write_str("harmonic"),
            WeightScheme::Weak => f.write_str("weak"),
            WeightScheme::Constant => f.write_str("constant"),
            WeightScheme::Explicit { prefix, tail } => {
                let parts: Vec<_> = prefix.iter().map(|r| r.to_string()).collect();
                write!(f, "{}", parts.join(","))?;
                if !tail.is_zero() {
                    write!(f, "|{tail}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::str::FromStr for WeightScheme {
    type Err = Error;

    /// `harmonic`, `weak`, `constant`, or a comma-separated list of weights
    /// optionally followed by `|tail` (the tail defaults to 0).
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "harmonic" | "h" => Ok(WeightScheme::Harmonic),
            "weak" => Ok(WeightScheme::Weak),
            "constant" | "av" => Ok(WeightScheme::Constant),
            other => {
                let (list, tail) = match other.split_once('|') {
                    Some((l, t)) => (l, t.parse()?),
                    None => (other, Rational::zero()),
                };
                WeightScheme::explicit(crate::numerics::parse_list(list)?, tail)
            }
        }
    }
}

/// Limits applied while enumerating tie outcomes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// Maximum number of committees (and of simultaneously open branches)
    /// before the outcome set is truncated.
    pub branch_cap: usize,
    /// Maximum number of committees an exhaustive optimizer may score.
    pub enumeration_budget: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { branch_cap: 10_000, enumeration_budget: 5_000_000 }
    }
}

/// A profile compiled to candidate indices, which the engines work on.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub cands: Vec<Candidate>,
    pub groups: Vec<Group>,
}

#[derive(Clone, Debug)]
pub(crate) struct Group {
    /// Candidate indices; ballot order for ranked ballots, ascending otherwise.
    pub members: Vec<usize>,
    pub weight: Rational,
}

impl Compiled {
    pub fn new(profile: &Profile) -> Self {
        let cands: Vec<Candidate> = profile.candidates().iter().cloned().collect();
        let index = |c: &Candidate| cands.binary_search(c).expect("validated candidate");
        let groups = profile
            .ballots()
            .iter()
            .map(|b| Group {
                members: b.content.names().into_iter().map(index).collect(),
                weight: b.weight.clone(),
            })
            .collect();
        Compiled { cands, groups }
    }

    pub fn committee(&self, members: impl IntoIterator<Item = usize>) -> Committee {
        Committee::new(members.into_iter().map(|i| self.cands[i].clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn normalize_merges_identical_groups() {
        let p = Profile::new(
            alloc::vec![
                WeightedBallot::new(w(2), BallotContent::unordered(&["A"])),
                WeightedBallot::new(w(3), BallotContent::unordered(&["A"])),
            ],
            1,
        )
        .unwrap();
        let n = p.normalize();
        assert_eq!(n.ballots().len(), 1);
        assert_eq!(n.ballots()[0].weight, w(5));
    }

    #[test]
    fn rejects_zero_weight_and_mixed_kinds() {
        let zero = Profile::new(
            alloc::vec![WeightedBallot::new(w(0), BallotContent::unordered(&["A"]))],
            1,
        );
        assert!(zero.is_err());
        let mixed = Profile::new(
            alloc::vec![
                WeightedBallot::new(w(1), BallotContent::unordered(&["A"])),
                WeightedBallot::new(w(1), BallotContent::ordered(&["A"])),
            ],
            1,
        );
        assert!(mixed.is_err());
    }

    #[test]
    fn too_few_candidates() {
        let p = Profile::new(
            alloc::vec![WeightedBallot::new(w(1), BallotContent::unordered(&["A", "B"]))],
            3,
        );
        assert_eq!(p.unwrap_err(), Error::InsufficientCandidates { candidates: 2, seats: 3 });
    }

    #[test]
    fn weight_scheme_parsing() {
        assert_eq!("harmonic".parse::<WeightScheme>().unwrap(), WeightScheme::Harmonic);
        let s: WeightScheme = "1,3/4".parse().unwrap();
        assert_eq!(s.w(2), Rational::ratio(3, 4));
        assert_eq!(s.w(3), Rational::zero());
        let s: WeightScheme = "1,1/2|1/4".parse().unwrap();
        assert_eq!(s.w(9), Rational::ratio(1, 4));
        assert!("1,2".parse::<WeightScheme>().is_err());
        assert!("1/2".parse::<WeightScheme>().is_err());
    }

    #[test]
    fn candidate_names() {
        assert!(Candidate::new("A1").is_ok());
        assert!(Candidate::new("a b").is_err());
        assert!(Candidate::new("{x").is_err());
        assert!(Candidate::new("").is_err());
    }
}
