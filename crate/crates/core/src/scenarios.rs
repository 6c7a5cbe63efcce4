//! Scenarios: restrictions on how a designated voter set `W` votes, and
//! whether a committee (or seat vector) is good for `W`.
//!
//! `W` is the set of ballot groups marked `designated` in the profile.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::ballots::{BallotContent, Candidate, Committee, CountOptions, Profile, ProfileKind, SeatVector};
use crate::error::{Error, Result};
use crate::method::{count, MethodId, Outcome};

/// The scenarios for which thresholds are defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioId {
    /// Everyone votes for disjoint party lists; `W` is one party.
    Party,
    /// `W` all cast the same ballot.
    Same,
    /// `W` votes however its leader decides.
    Tactic,
    /// Every `W` ballot contains `A`; good if `ell` elected names appear on some `W` ballot.
    PJR,
    /// Every `W` ballot contains `A`; good if some `W` ballot has `ell` elected names.
    EJR,
    /// Every `W` ballot ranks `A` (with `|A| >= ell`) on top; good if `ell` of `A` are elected.
    PSC,
    /// Every `W` ballot ranks `A` (with `|A| = ell`) on top; good if all of `A` are elected.
    WPSC,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 7] = [
        ScenarioId::Party,
        ScenarioId::Same,
        ScenarioId::Tactic,
        ScenarioId::PJR,
        ScenarioId::EJR,
        ScenarioId::PSC,
        ScenarioId::WPSC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::Party => "party",
            ScenarioId::Same => "same",
            ScenarioId::Tactic => "tactic",
            ScenarioId::PJR => "pjr",
            ScenarioId::EJR => "ejr",
            ScenarioId::PSC => "psc",
            ScenarioId::WPSC => "wpsc",
        }
    }

    /// Whether the scenario can be posed for ballots of `kind`.
    pub fn accepts(self, kind: ProfileKind) -> bool {
        match self {
            ScenarioId::PJR | ScenarioId::EJR => kind == ProfileKind::Unordered,
            ScenarioId::PSC | ScenarioId::WPSC => kind == ProfileKind::Ordered,
            ScenarioId::Party | ScenarioId::Same | ScenarioId::Tactic => true,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.name() == lower)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scenario `{s}`")))
    }
}

/// A profile with a designated voter set, a target set and a level `ell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioInstance {
    pub profile: Profile,
    /// The set `A`. For `Party` and `Same` it may be left empty, in which case
    /// the names on `W`'s common ballot are used; likewise for `Tactic`, where
    /// the names on `W`'s ballots are used.
    pub targets: BTreeSet<Candidate>,
    pub ell: usize,
    pub scenario: ScenarioId,
}

impl ScenarioInstance {
    pub fn new(profile: Profile, targets: BTreeSet<Candidate>, ell: usize, scenario: ScenarioId) -> Self {
        ScenarioInstance { profile, targets, ell, scenario }
    }

    fn designated(&self) -> impl Iterator<Item = &BallotContent> {
        self.profile.ballots().iter().filter(|b| b.designated).map(|b| &b.content)
    }

    fn designated_union(&self) -> BTreeSet<Candidate> {
        self.designated().flat_map(|c| c.names().into_iter().cloned()).collect()
    }

    /// The candidates whose election counts towards a good outcome.
    pub fn target_set(&self) -> BTreeSet<Candidate> {
        match self.scenario {
            ScenarioId::Party | ScenarioId::Same => self.designated_union(),
            ScenarioId::Tactic if self.targets.is_empty() => self.designated_union(),
            _ => self.targets.clone(),
        }
    }

    /// Fraction of the total weight cast by `W`.
    pub fn fraction(&self) -> crate::Rational {
        self.profile.designated_weight() / self.profile.total_weight()
    }

    fn check_kind(&self) -> Result<()> {
        if self.scenario.accepts(self.profile.kind()) {
            Ok(())
        } else {
            Err(Error::ScenarioMismatch { scenario: self.scenario.name(), what: self.profile.kind().name() })
        }
    }

    /// Whether `W` votes as the scenario requires.
    pub fn is_instance(&self) -> Result<bool> {
        self.check_kind()?;
        let seats = self.profile.seats();
        if self.ell == 0 || self.ell > seats {
            return Err(Error::InvalidParameter(format!("ell = {} outside 1..={seats}", self.ell)));
        }
        let w: Vec<&BallotContent> = self.designated().collect();
        let Some(first) = w.first() else {
            return Ok(false);
        };
        let party_kind = self.profile.kind() == ProfileKind::Party;
        Ok(match self.scenario {
            ScenarioId::Tactic => true,
            ScenarioId::Same => w.iter().all(|c| c == first) && (party_kind || first.len() >= self.ell),
            ScenarioId::Party => {
                w.iter().all(|c| c == first)
                    && (party_kind || first.len() >= self.ell)
                    && self.lists_disjoint()
            }
            ScenarioId::PJR | ScenarioId::EJR => {
                self.targets.len() >= self.ell
                    && w.iter().all(|c| self.targets.iter().all(|a| c.contains(a)))
            }
            ScenarioId::PSC => {
                let m = self.targets.len();
                m >= self.ell && w.iter().all(|c| c.top(m).as_ref() == Some(&self.targets))
            }
            ScenarioId::WPSC => {
                self.targets.len() == self.ell
                    && w.iter().all(|c| c.top(self.ell).as_ref() == Some(&self.targets))
            }
        })
    }

    /// Every two ballots are identical or share no name.
    fn lists_disjoint(&self) -> bool {
        let ballots = self.profile.ballots();
        ballots.iter().enumerate().all(|(i, a)| {
            ballots[i + 1..].iter().all(|b| {
                a.content == b.content || a.content.name_set().is_disjoint(&b.content.name_set())
            })
        })
    }

    /// Whether `committee` is a good outcome for `W`.
    pub fn is_good(&self, committee: &Committee) -> bool {
        match self.scenario {
            ScenarioId::Party | ScenarioId::Same | ScenarioId::Tactic | ScenarioId::PSC => {
                committee.overlap(&self.target_set()) >= self.ell
            }
            ScenarioId::PJR => committee.overlap(&self.designated_union()) >= self.ell,
            ScenarioId::EJR => self.designated().any(|c| committee.overlap(c.names()) >= self.ell),
            ScenarioId::WPSC => self.targets.iter().all(|a| committee.contains(a)),
        }
    }

    /// Whether a seat vector (party ballots) is good: `W`'s parties hold at
    /// least `ell` seats between them.
    pub fn is_good_seats(&self, seats: &SeatVector) -> bool {
        self.target_set().iter().map(|p| seats.seats_of(p)).sum::<usize>() >= self.ell
    }

    /// Whether some outcome in `outcome` is bad.
    pub fn is_bad_outcome_possible(&self, outcome: &Outcome) -> Result<bool> {
        if outcome.truncated() {
            return Err(Error::Truncated);
        }
        Ok(match outcome {
            Outcome::Seats(a) => a.vectors.iter().any(|v| !self.is_good_seats(v)),
            other => other
                .committees()
                .is_some_and(|o| o.iter().any(|c| !self.is_good(c))),
        })
    }

    /// Count with `method` and report whether a bad outcome is reachable.
    /// Fails with `ScenarioMismatch` when the instance restriction does not hold.
    pub fn bad_outcome_reachable(&self, method: &MethodId, opts: &CountOptions) -> Result<bool> {
        if !self.is_instance()? {
            return Err(Error::ScenarioMismatch { scenario: self.scenario.name(), what: "not an instance" });
        }
        self.is_bad_outcome_possible(&count(method, &self.profile, opts)?)
    }
}
