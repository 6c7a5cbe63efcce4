//! Exact proportionality thresholds for multi-winner election methods.
//!
//! Everything here is `no_std` and uses only `alloc`: exact rational
//! arithmetic, tie-complete counting engines, scenario predicates, closed-form
//! threshold values, the sequences and linear programs behind them, and a
//! verifier that builds and checks extremal instances.
//!
//! All arithmetic is exact. Counting engines return every committee reachable
//! under some resolution of ties, never a single tie-broken winner.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod ballots;
pub mod error;
mod explore;
pub mod lp;
pub mod method;
pub mod numerics;
pub mod ordered;
pub mod party;
pub mod scenarios;
pub mod sequences;
pub mod thresholds;
pub mod unordered;
pub mod verifier;

pub use ballots::{
    BallotContent, Candidate, Committee, CountOptions, OutcomeSet, Profile, ProfileKind,
    SeatVector, WeightScheme, WeightedBallot,
};
pub use error::{Error, Result};
pub use method::{MethodId, Outcome};
pub use numerics::Rational;
pub use scenarios::{ScenarioId, ScenarioInstance};
pub use thresholds::{Kind, Side, Status, ThresholdBook, ThresholdValue};
