//! On disjoint party lists every candidate method reduces to a party method.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use pithresh_core::method::count;
use pithresh_core::{BallotContent, CountOptions, MethodId, Outcome, Profile, Rational, WeightScheme, WeightedBallot};
use proptest::prelude::*;

const PARTIES: [&str; 4] = ["P", "Q", "R", "T"];

/// Seat multisets, as sorted per-party counts keyed by party letter.
type Seats = BTreeSet<BTreeMap<String, usize>>;

fn list(party: usize, seats: usize) -> Vec<String> {
    (1..=seats).map(|i| format!("{}{i}", PARTIES[party])).collect()
}

fn build(votes: &[i64], seats: usize, content: impl Fn(&[&str]) -> BallotContent) -> Profile {
    let ballots = votes
        .iter()
        .enumerate()
        .map(|(p, v)| {
            let names = list(p, seats);
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            WeightedBallot::new(Rational::from_integer(*v), content(&names))
        })
        .collect();
    Profile::new(ballots, seats).unwrap()
}

fn seats_of(method: &MethodId, profile: &Profile) -> Seats {
    // Equal party votes put every list member into one tie; a wider cap keeps
    // the elimination count complete.
    let opts = CountOptions { branch_cap: 1_000_000, ..CountOptions::default() };
    let out = count(method, profile, &opts).unwrap();
    assert!(!out.truncated(), "{method}");
    match out {
        Outcome::Seats(a) => a
            .vectors
            .iter()
            .map(|v| v.0.iter().filter(|(_, n)| **n > 0).map(|(k, n)| (k.as_str().to_string(), *n)).collect())
            .collect(),
        o => o
            .committees()
            .unwrap()
            .iter()
            .map(|c| {
                let mut m = BTreeMap::new();
                for member in c.members() {
                    *m.entry(member.as_str()[..1].to_string()).or_insert(0) += 1;
                }
                m
            })
            .collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn candidate_methods_reduce_to_party_methods((votes, seats) in common::party_votes()) {
        let party = build(&votes, seats, |n| BallotContent::party(&n[0][..1]));
        let unordered = build(&votes, seats, BallotContent::unordered);
        let ordered = build(&votes, seats, BallotContent::ordered);
        let dhondt = seats_of(&MethodId::Div(Rational::one()), &party);

        for m in [
            MethodId::PhragmenU,
            MethodId::ThieleOpt(WeightScheme::Harmonic),
            MethodId::ThieleAdd(WeightScheme::Harmonic),
            MethodId::ThieleElim,
        ] {
            prop_assert_eq!(&seats_of(&m, &unordered), &dhondt, "{}", m);
        }
        for m in [MethodId::PhragmenO, MethodId::ThieleO, MethodId::Borda(WeightScheme::Harmonic)] {
            prop_assert_eq!(&seats_of(&m, &ordered), &dhondt, "{}", m);
        }
        for delta in [Rational::zero(), Rational::ratio(1, 2), Rational::one()] {
            let quota = seats_of(&MethodId::Quota(delta.clone()), &party);
            prop_assert_eq!(&seats_of(&MethodId::STV(delta.clone()), &ordered), &quota, "stv:{}", delta);
        }
    }
}
