//! Counting engines for ordered (ranked) ballots.
//!
//! Ideal fractional STV, Phragmén's and Thiele's methods for ranked ballots,
//! and positional (Borda-type) scoring.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::ballots::{Committee, Compiled, CountOptions, OutcomeSet, Profile, ProfileKind, WeightScheme};
use crate::error::Result;
use crate::explore::{all_max, all_min, explore, Step};
use crate::numerics::Rational;
use crate::party::check_delta;
use crate::unordered::{phragmen_core, top_with_ties, PhragmenOutcome};

/// Result of an STV count.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StvOutcome {
    pub outcomes: OutcomeSet,
    pub quota: Rational,
    /// For every distinct final state: the committee, the remaining value of
    /// each ballot group, and how many members reached the quota.
    pub finals: BTreeSet<(Committee, Vec<Rational>, usize)>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct StvState {
    elected: Vec<usize>,
    eliminated: Vec<usize>,
    values: Vec<Rational>,
    by_quota: usize,
}

/// Ideal fractional STV with quota `V/(S + delta)`.
///
/// A ballot counts, at its current value, for its first continuing name.
/// Whenever some continuing candidate reaches the quota, one such candidate
/// is elected and every ballot counting for it is scaled by `(v - Q)/v`,
/// where `v` is the candidate's total. Otherwise a candidate with the
/// smallest total is eliminated. When the continuing candidates exactly fill
/// the remaining seats, they are all elected.
pub fn stv_count(delta: &Rational, profile: &Profile, opts: &CountOptions) -> Result<StvOutcome> {
    profile.expect_kind(ProfileKind::Ordered)?;
    let seats = profile.seats();
    check_delta(delta, seats)?;
    let c = Compiled::new(profile);
    let n = c.cands.len();
    let quota = profile.total_weight() / (Rational::from_usize(seats) + delta);
    let init = StvState {
        elected: Vec::new(),
        eliminated: Vec::new(),
        values: c.groups.iter().map(|g| g.weight.clone()).collect(),
        by_quota: 0,
    };
    let (done, truncated) = explore(init, opts.branch_cap, |s| {
        let mut status = alloc::vec![0u8; n];
        for &e in &s.elected {
            status[e] = 1;
        }
        for &e in &s.eliminated {
            status[e] = 2;
        }
        let continuing: Vec<usize> = (0..n).filter(|&i| status[i] == 0).collect();
        let unfilled = seats - s.elected.len();
        if unfilled == 0 || continuing.len() <= unfilled {
            let mut committee = s.elected.clone();
            committee.extend(continuing.iter().take(unfilled));
            committee.sort_unstable();
            return Ok(Step::Done((committee, s.values.clone(), s.by_quota)));
        }
        let top: Vec<Option<usize>> = c
            .groups
            .iter()
            .map(|g| g.members.iter().copied().find(|&m| status[m] == 0))
            .collect();
        let mut tally = alloc::vec![Rational::zero(); n];
        for (g, t) in top.iter().enumerate() {
            if let Some(t) = t {
                tally[*t] += &s.values[g];
            }
        }
        let reached: Vec<usize> = continuing.iter().copied().filter(|&i| tally[i] >= quota).collect();
        let mut next = Vec::new();
        if !reached.is_empty() {
            for w in reached {
                let factor = (&tally[w] - &quota) / &tally[w];
                let mut st = s.clone();
                for (g, t) in top.iter().enumerate() {
                    if *t == Some(w) {
                        st.values[g] = &st.values[g] * &factor;
                    }
                }
                st.elected.push(w);
                st.elected.sort_unstable();
                st.by_quota += 1;
                next.push(st);
            }
        } else {
            for l in all_min(continuing.iter().map(|&i| (i, Some(tally[i].clone())))) {
                let mut st = s.clone();
                st.eliminated.push(l);
                st.eliminated.sort_unstable();
                next.push(st);
            }
        }
        Ok(Step::Next(next))
    })?;
    let mut out = StvOutcome { quota, ..Default::default() };
    out.outcomes.truncated = truncated;
    for (committee, values, by_quota) in done {
        let committee = c.committee(committee);
        out.outcomes.committees.insert(committee.clone());
        out.finals.insert((committee, values, by_quota));
    }
    Ok(out)
}

/// Phragmén's method for ranked ballots: a ballot supports only its first
/// unelected name, otherwise loads are distributed as in the unordered
/// method.
pub fn phragmen_ordered(profile: &Profile, opts: &CountOptions) -> Result<PhragmenOutcome> {
    profile.expect_kind(ProfileKind::Ordered)?;
    let c = Compiled::new(profile);
    phragmen_core(&c, profile.seats(), opts, |c, g, elected| {
        c.groups[g].members.iter().copied().find(|&m| !elected[m]).into_iter().collect()
    })
}

/// Thiele's method for ranked ballots: a ballot counts only for its first
/// unelected name, with weight `1/k` when that name is the `k`-th on the
/// ballot.
pub fn thiele_ordered(profile: &Profile, opts: &CountOptions) -> Result<OutcomeSet> {
    profile.expect_kind(ProfileKind::Ordered)?;
    let c = Compiled::new(profile);
    let seats = profile.seats();
    let n = c.cands.len();
    let (done, truncated) = explore(Vec::<usize>::new(), opts.branch_cap, |elected| {
        if elected.len() == seats {
            return Ok(Step::Done(elected.clone()));
        }
        let mut is_elected = alloc::vec![false; n];
        for &e in elected {
            is_elected[e] = true;
        }
        let mut scores = alloc::vec![Rational::zero(); n];
        for g in &c.groups {
            if let Some(k) = g.members.iter().position(|&m| !is_elected[m]) {
                scores[g.members[k]] += &g.weight / Rational::from_usize(k + 1);
            }
        }
        let winners = all_max((0..n).filter(|&i| !is_elected[i]).map(|i| (i, Some(scores[i].clone()))));
        Ok(Step::Next(
            winners
                .into_iter()
                .map(|w| {
                    let mut e = elected.clone();
                    e.push(w);
                    e.sort_unstable();
                    e
                })
                .collect(),
        ))
    })?;
    Ok(OutcomeSet { committees: done.into_iter().map(|s| c.committee(s)).collect(), truncated })
}

/// Positional scoring: the name in place `k` receives `w_k` times the ballot
/// weight, and the `S` highest totals are elected.
pub fn borda_count(w: &WeightScheme, profile: &Profile, opts: &CountOptions) -> Result<OutcomeSet> {
    profile.expect_kind(ProfileKind::Ordered)?;
    let c = Compiled::new(profile);
    let mut scores = alloc::vec![Rational::zero(); c.cands.len()];
    for g in &c.groups {
        for (k, &m) in g.members.iter().enumerate() {
            scores[m] += &g.weight * w.w(k + 1);
        }
    }
    let (sets, truncated) = top_with_ties(&scores, profile.seats(), opts.branch_cap);
    Ok(OutcomeSet { committees: sets.into_iter().map(|s| c.committee(s)).collect(), truncated })
}
