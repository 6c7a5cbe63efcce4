//! Profile builders and random profile strategies shared by the test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use pithresh_core::{BallotContent, Candidate, Committee, Profile, Rational, WeightedBallot};
use proptest::prelude::*;

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn unordered(groups: &[(i64, &[&str])], seats: usize) -> Profile {
    let ballots = groups
        .iter()
        .map(|(w, names)| WeightedBallot::new(Rational::from_integer(*w), BallotContent::unordered(names)))
        .collect();
    Profile::new(ballots, seats).unwrap()
}

pub fn ordered(groups: &[(i64, &[&str])], seats: usize) -> Profile {
    let ballots = groups
        .iter()
        .map(|(w, names)| WeightedBallot::new(Rational::from_integer(*w), BallotContent::ordered(names)))
        .collect();
    Profile::new(ballots, seats).unwrap()
}

pub fn committees(sets: &[&[&str]]) -> BTreeSet<Committee> {
    sets.iter().map(|s| Committee::from_names(s)).collect()
}

pub const POOL: [&str; 5] = ["A", "B", "C", "D", "E"];

fn universe() -> BTreeSet<Candidate> {
    POOL.iter().map(|n| Candidate::new(*n).unwrap()).collect()
}

/// Up to five unordered groups over five candidates, weights 1..=6, S in 1..=3.
pub fn unordered_profile() -> impl Strategy<Value = Profile> {
    (prop::collection::vec((1i64..=6, 1u32..32), 1..=5), 1usize..=3).prop_map(|(groups, seats)| {
        let ballots = groups
            .into_iter()
            .map(|(w, mask)| {
                let names: Vec<&str> = (0..5).filter(|i| mask & (1 << i) != 0).map(|i| POOL[i]).collect();
                WeightedBallot::new(Rational::from_integer(w), BallotContent::unordered(&names))
            })
            .collect();
        Profile::with_candidates(ballots, universe(), seats).unwrap()
    })
}

/// Up to five ranked groups, each a prefix of a permutation of five names.
pub fn ordered_profile() -> impl Strategy<Value = Profile> {
    let ballot = (Just(POOL.to_vec()).prop_shuffle(), 1usize..=4);
    (prop::collection::vec((1i64..=6, ballot), 1..=5), 1usize..=3).prop_map(|(groups, seats)| {
        let ballots = groups
            .into_iter()
            .map(|(w, (perm, len))| WeightedBallot::new(Rational::from_integer(w), BallotContent::ordered(&perm[..len])))
            .collect();
        Profile::with_candidates(ballots, universe(), seats).unwrap()
    })
}

/// Up to four parties with weights 1..=9 and S in 1..=5.
pub fn party_votes() -> impl Strategy<Value = (Vec<i64>, usize)> {
    (prop::collection::vec(1i64..=9, 1..=4), 1usize..=5)
}

/// A positive scale factor p/q with small p, q.
pub fn scale_factor() -> impl Strategy<Value = Rational> {
    (1i64..=7, 1i64..=7).prop_map(|(p, q)| Rational::ratio(p, q))
}
