//! Apportionment between parties: divisor methods and quota methods.
//!
//! A divisor method `Div(gamma)` uses the divisors `d(n) = n - 1 + gamma`;
//! `gamma = 1` is D'Hondt, `1/2` is Sainte-Laguë and `0` is Adams. A quota
//! method `Quota(delta)` uses the quota `V/(S + delta)`; `delta = 0` is Hare
//! (largest remainder) and `1` is Droop.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::ballots::{BallotContent, Candidate, Profile, ProfileKind, SeatVector};
use crate::error::{Error, Result};
use crate::explore::{all_max, explore, Step};
use crate::numerics::Rational;

/// All seat vectors reachable under some resolution of ties.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Apportionment {
    pub vectors: BTreeSet<SeatVector>,
    pub truncated: bool,
}

/// Total votes per party of a party-ballot profile, in candidate order.
pub fn party_votes(profile: &Profile) -> Result<Vec<(Candidate, Rational)>> {
    profile.expect_kind(ProfileKind::Party)?;
    let mut votes: BTreeMap<Candidate, Rational> =
        profile.candidates().iter().map(|c| (c.clone(), Rational::zero())).collect();
    for b in profile.ballots() {
        if let BallotContent::Party(p) = &b.content {
            *votes.get_mut(p).expect("validated party") += &b.weight;
        }
    }
    Ok(votes.into_iter().collect())
}

pub fn check_gamma(gamma: &Rational) -> Result<()> {
    if gamma.is_negative() || *gamma > 1 {
        return Err(Error::InvalidParameter(format!("divisor parameter {gamma} is outside [0, 1]")));
    }
    Ok(())
}

pub fn check_delta(delta: &Rational, seats: usize) -> Result<()> {
    if *delta > 1 || delta + Rational::from_usize(seats) <= Rational::zero() {
        return Err(Error::InvalidParameter(format!(
            "quota parameter {delta} is outside (-{seats}, 1]"
        )));
    }
    Ok(())
}

/// Divisor-method apportionment of a party-ballot profile.
pub fn divisor_apportion(gamma: &Rational, profile: &Profile, cap: usize) -> Result<Apportionment> {
    let votes = party_votes(profile)?;
    let (names, v): (Vec<_>, Vec<_>) = votes.into_iter().unzip();
    let (vectors, truncated) = divisor_seats(gamma, &v, profile.seats(), cap)?;
    Ok(label(&names, vectors, truncated))
}

/// Quota-method apportionment of a party-ballot profile.
pub fn quota_apportion(delta: &Rational, profile: &Profile, cap: usize) -> Result<Apportionment> {
    let votes = party_votes(profile)?;
    let (names, v): (Vec<_>, Vec<_>) = votes.into_iter().unzip();
    let (vectors, truncated) = quota_seats(delta, &v, profile.seats(), cap)?;
    Ok(label(&names, vectors, truncated))
}

fn label(names: &[Candidate], vectors: BTreeSet<Vec<usize>>, truncated: bool) -> Apportionment {
    let vectors = vectors
        .into_iter()
        .map(|s| SeatVector(names.iter().cloned().zip(s).collect()))
        .collect();
    Apportionment { vectors, truncated }
}

/// Divisor-method seat vectors for plain vote totals.
///
/// Seats are handed out one at a time to a party with the largest quotient
/// `v_i / d(s_i + 1)`; every tied party is branched on.
pub fn divisor_seats(
    gamma: &Rational,
    votes: &[Rational],
    seats: usize,
    cap: usize,
) -> Result<(BTreeSet<Vec<usize>>, bool)> {
    check_gamma(gamma)?;
    check_votes(votes)?;
    let supported = votes.iter().filter(|v| v.is_positive()).count();
    if gamma.is_zero() && supported > seats {
        return Err(Error::AdamsIllDefined { parties: supported, seats });
    }
    let quotient = |v: &Rational, s: usize| -> (bool, Rational) {
        let d = Rational::from_usize(s) + gamma;
        if d.is_zero() {
            // Adams: the first seat of a supported party has infinite priority.
            (v.is_positive(), Rational::zero())
        } else {
            (false, v / d)
        }
    };
    explore(alloc::vec![0usize; votes.len()], cap, |s| {
        if s.iter().sum::<usize>() == seats {
            return Ok(Step::Done(s.clone()));
        }
        let winners = all_max(votes.iter().zip(s).enumerate().map(|(i, (v, &si))| (i, Some(quotient(v, si)))));
        Ok(Step::Next(
            winners
                .into_iter()
                .map(|i| {
                    let mut n = s.clone();
                    n[i] += 1;
                    n
                })
                .collect(),
        ))
    })
}

/// Quota-method seat vectors for plain vote totals.
///
/// With `x_i = v_i / Q`, a vector `s` is an outcome when `sum s_i = S` and
/// some `t` in `[0, 1]` has `s_i - 1 + t <= x_i <= s_i + t` for every party.
pub fn quota_seats(
    delta: &Rational,
    votes: &[Rational],
    seats: usize,
    cap: usize,
) -> Result<(BTreeSet<Vec<usize>>, bool)> {
    check_delta(delta, seats)?;
    check_votes(votes)?;
    let total: Rational = votes.iter().sum();
    let scale = (Rational::from_usize(seats) + delta) / total;
    let x: Vec<Rational> = votes.iter().map(|v| v * &scale).collect();

    // The admissible integers for party i only change where x_i - t is an
    // integer, so it suffices to test those t and one point between each
    // consecutive pair.
    let mut critical: BTreeSet<Rational> = [Rational::zero(), Rational::one()].into_iter().collect();
    critical.extend(x.iter().map(Rational::fract));
    let critical: Vec<Rational> = critical.into_iter().collect();
    let mut probes = critical.clone();
    probes.extend(critical.windows(2).map(|p| (&p[0] + &p[1]) / Rational::from_integer(2)));

    let mut out = BTreeSet::new();
    let mut truncated = false;
    for t in &probes {
        let options: Vec<Vec<usize>> = x
            .iter()
            .map(|xi| {
                let lo = (xi - t).ceil();
                let hi = (xi - t + Rational::one()).floor();
                let lo = lo.to_i64().unwrap_or(i64::MAX).max(0);
                let hi = hi.to_i64().unwrap_or(i64::MAX);
                (lo..=hi).map(|s| s as usize).collect()
            })
            .collect();
        combine(&options, seats, &mut Vec::new(), &mut out, cap, &mut truncated);
    }
    Ok((out, truncated))
}

fn combine(
    options: &[Vec<usize>],
    remaining: usize,
    pick: &mut Vec<usize>,
    out: &mut BTreeSet<Vec<usize>>,
    cap: usize,
    truncated: &mut bool,
) {
    let i = pick.len();
    if i == options.len() {
        if remaining == 0 {
            if out.len() < cap || out.contains(pick) {
                out.insert(pick.clone());
            } else {
                *truncated = true;
            }
        }
        return;
    }
    for &s in &options[i] {
        if s > remaining {
            break;
        }
        pick.push(s);
        combine(options, remaining - s, pick, out, cap, truncated);
        pick.pop();
    }
}

fn check_votes(votes: &[Rational]) -> Result<()> {
    if votes.iter().any(Rational::is_negative) {
        return Err(Error::InvalidProfile("negative vote total".into()));
    }
    if !votes.iter().any(Rational::is_positive) {
        return Err(Error::InvalidProfile("no party has any votes".into()));
    }
    Ok(())
}
