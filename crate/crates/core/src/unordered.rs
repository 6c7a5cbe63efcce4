//! Counting engines for unordered (approval) ballots.
//!
//! Score rules (block vote, approval vote, SNTV, limited vote, equal-and-even
//! cumulative vote), Phragmén's sequential method, and the three Thiele
//! variants: optimization, sequential addition and sequential elimination.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::ballots::{Committee, Compiled, CountOptions, OutcomeSet, Profile, ProfileKind, WeightScheme};
use crate::error::{Error, Result};
use crate::explore::{all_max, all_min, binomial, explore, subsets, Step};
use crate::numerics::Rational;

/// Rules that elect the `S` candidates with the largest vote totals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScoreRule {
    /// Up to `S` names, one vote each.
    BlockVote,
    /// Any number of names, one vote each.
    ApprovalVote,
    /// A single name.
    Sntv,
    /// Up to `L` names, one vote each.
    LimitedVote(usize),
    /// Any number of names, each receiving `1/n` of the ballot.
    CumulativeEqual,
}

impl ScoreRule {
    /// Maximal ballot length for `seats` seats, if any.
    pub fn cap(self, seats: usize) -> Option<usize> {
        match self {
            ScoreRule::BlockVote => Some(seats),
            ScoreRule::Sntv => Some(1),
            ScoreRule::LimitedVote(l) => Some(l),
            ScoreRule::ApprovalVote | ScoreRule::CumulativeEqual => None,
        }
    }
}

/// Count a score rule, returning every committee of `S` top scorers.
pub fn score_family_count(rule: ScoreRule, profile: &Profile, opts: &CountOptions) -> Result<OutcomeSet> {
    profile.expect_kind(ProfileKind::Unordered)?;
    let seats = profile.seats();
    if let ScoreRule::LimitedVote(l) = rule {
        if l == 0 || l > seats {
            return Err(Error::InvalidParameter(format!("limited vote needs 1 <= L <= S, got L = {l}")));
        }
    }
    if let Some(cap) = rule.cap(seats) {
        if let Some((index, b)) = profile.ballots().iter().enumerate().find(|(_, b)| b.content.len() > cap) {
            return Err(Error::BallotTooLong { index, len: b.content.len(), cap });
        }
    }
    let c = Compiled::new(profile);
    let mut scores = alloc::vec![Rational::zero(); c.cands.len()];
    for g in &c.groups {
        let share = match rule {
            ScoreRule::CumulativeEqual => &g.weight / Rational::from_usize(g.members.len()),
            _ => g.weight.clone(),
        };
        for &m in &g.members {
            scores[m] += &share;
        }
    }
    let (sets, truncated) = top_with_ties(&scores, seats, opts.branch_cap);
    Ok(OutcomeSet { committees: sets.into_iter().map(|s| c.committee(s)).collect(), truncated })
}

/// Every way to choose `seats` indices with the largest scores.
pub(crate) fn top_with_ties(scores: &[Rational], seats: usize, cap: usize) -> (BTreeSet<Vec<usize>>, bool) {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    let boundary = &scores[order[seats - 1]];
    let above: Vec<usize> = order.iter().copied().filter(|&i| scores[i] > *boundary).collect();
    let tied: Vec<usize> = order.iter().copied().filter(|&i| scores[i] == *boundary).collect();
    let need = seats - above.len();
    let mut out = BTreeSet::new();
    let mut truncated = false;
    if binomial(tied.len(), need) > cap as u128 {
        truncated = true;
    }
    for pick in subsets(&tied, need).into_iter().take(cap) {
        let mut set: Vec<usize> = above.iter().copied().chain(pick).collect();
        set.sort_unstable();
        out.insert(set);
    }
    (out, truncated)
}

/// Level `L` at which spreading one unit of load over `supporters`
/// (`(weight, current load)` pairs) by raising the lowest loads first
/// exhausts the unit: `sum w_g * max(0, L - x_g) = 1`.
pub(crate) fn water_level(supporters: &[(&Rational, &Rational)]) -> Rational {
    let mut sorted: Vec<(&Rational, &Rational)> = supporters.to_vec();
    sorted.sort_by(|a, b| a.1.cmp(b.1));
    let mut weight = Rational::zero();
    let mut mass = Rational::zero();
    for (j, (w, x)) in sorted.iter().enumerate() {
        weight += *w;
        mass += *w * *x;
        let level = (Rational::one() + &mass) / &weight;
        if j + 1 == sorted.len() || level <= *sorted[j + 1].1 {
            return level;
        }
    }
    unreachable!("water level needs at least one supporter")
}

/// Committees of a Phragmén count with the final ballot loads of each.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PhragmenOutcome {
    pub outcomes: OutcomeSet,
    /// Final load per ballot group (profile order), for every distinct way
    /// the committee was reached.
    pub final_loads: BTreeMap<Committee, BTreeSet<Vec<Rational>>>,
}

impl PhragmenOutcome {
    /// Smallest final maximal load among the ways `committee` was reached.
    pub fn max_load(&self, committee: &Committee) -> Option<Rational> {
        self.final_loads.get(committee).and_then(|loads| {
            loads
                .iter()
                .map(|l| l.iter().cloned().fold(Rational::zero(), Rational::max))
                .min()
        })
    }
}

/// Phragmén's sequential method for unordered ballots.
///
/// Each elected candidate adds one unit of load, spread over the ballots
/// approving it so that the resulting maximal load is as small as possible;
/// the candidate whose election yields the smallest maximum is elected.
pub fn phragmen_unordered(profile: &Profile, opts: &CountOptions) -> Result<PhragmenOutcome> {
    profile.expect_kind(ProfileKind::Unordered)?;
    let c = Compiled::new(profile);
    phragmen_core(&c, profile.seats(), opts, |c, g, _elected| c.groups[g].members.clone())
}

/// Shared Phragmén driver; `supports(c, g, elected)` lists the candidates
/// ballot group `g` currently supports.
pub(crate) fn phragmen_core(
    c: &Compiled,
    seats: usize,
    opts: &CountOptions,
    supports: impl Fn(&Compiled, usize, &[bool]) -> Vec<usize>,
) -> Result<PhragmenOutcome> {
    let n = c.cands.len();
    let init = (Vec::<usize>::new(), alloc::vec![Rational::zero(); c.groups.len()]);
    let (done, truncated) = explore(init, opts.branch_cap, |(elected, loads)| {
        if elected.len() == seats {
            return Ok(Step::Done((elected.clone(), loads.clone())));
        }
        let mut is_elected = alloc::vec![false; n];
        for &e in elected {
            is_elected[e] = true;
        }
        let mut backers: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        for g in 0..c.groups.len() {
            for s in supports(c, g, &is_elected) {
                backers[s].push(g);
            }
        }
        let levels: Vec<(usize, Option<Rational>)> = (0..n)
            .filter(|&i| !is_elected[i])
            .map(|i| {
                if backers[i].is_empty() {
                    return (i, None);
                }
                let sup: Vec<_> = backers[i].iter().map(|&g| (&c.groups[g].weight, &loads[g])).collect();
                let level = water_level(&sup);
                let peak = backers[i].iter().map(|&g| loads[g].clone()).fold(level, Rational::max);
                (i, Some(peak))
            })
            .collect();
        let winners = all_min(levels.iter().cloned());
        let mut next = Vec::new();
        for w in winners {
            let mut loads = loads.clone();
            if !backers[w].is_empty() {
                let sup: Vec<_> = backers[w].iter().map(|&g| (&c.groups[g].weight, &loads[g])).collect();
                let level = water_level(&sup);
                for &g in &backers[w] {
                    if loads[g] < level {
                        loads[g] = level.clone();
                    }
                }
            }
            let mut elected = elected.clone();
            elected.push(w);
            elected.sort_unstable();
            next.push((elected, loads));
        }
        Ok(Step::Next(next))
    })?;
    let mut out = PhragmenOutcome::default();
    out.outcomes.truncated = truncated;
    for (elected, loads) in done {
        let committee = c.committee(elected);
        out.outcomes.committees.insert(committee.clone());
        out.final_loads.entry(committee).or_default().insert(loads);
    }
    Ok(out)
}

/// Thiele's optimization method: every committee maximizing
/// `sum over ballots of psi(|ballot ∩ committee|)`.
pub fn thiele_optimize(w: &WeightScheme, profile: &Profile, opts: &CountOptions) -> Result<OutcomeSet> {
    profile.expect_kind(ProfileKind::Unordered)?;
    let c = Compiled::new(profile);
    let seats = profile.seats();
    let needed = binomial(c.cands.len(), seats);
    if needed > opts.enumeration_budget {
        return Err(Error::EnumerationBudget { needed, budget: opts.enumeration_budget });
    }
    let psi: Vec<Rational> = (0..=seats).map(|k| w.psi(k)).collect();
    let all: Vec<usize> = (0..c.cands.len()).collect();
    let mut best: Option<Rational> = None;
    let mut winners: Vec<Vec<usize>> = Vec::new();
    let mut member = alloc::vec![false; c.cands.len()];
    for set in subsets(&all, seats) {
        for &i in &set {
            member[i] = true;
        }
        let value: Rational = c
            .groups
            .iter()
            .map(|g| &g.weight * &psi[g.members.iter().filter(|&&m| member[m]).count()])
            .sum();
        for &i in &set {
            member[i] = false;
        }
        match &best {
            Some(b) if value < *b => {}
            Some(b) if value == *b => winners.push(set),
            _ => {
                best = Some(value);
                winners.clear();
                winners.push(set);
            }
        }
    }
    let truncated = winners.len() > opts.branch_cap;
    Ok(OutcomeSet {
        committees: winners.into_iter().take(opts.branch_cap).map(|s| c.committee(s)).collect(),
        truncated,
    })
}

fn addition_scores(c: &Compiled, w: &WeightScheme, elected: &[usize]) -> Vec<(usize, Option<Rational>)> {
    let n = c.cands.len();
    let mut is_elected = alloc::vec![false; n];
    for &e in elected {
        is_elected[e] = true;
    }
    let mut scores = alloc::vec![Rational::zero(); n];
    for g in &c.groups {
        let have = g.members.iter().filter(|&&m| is_elected[m]).count();
        let weight = &g.weight * w.w(have + 1);
        if weight.is_zero() {
            continue;
        }
        for &m in &g.members {
            if !is_elected[m] {
                scores[m] += &weight;
            }
        }
    }
    (0..n).filter(|&i| !is_elected[i]).map(|i| (i, Some(scores[i].clone()))).collect()
}

/// Thiele's sequential addition method: repeatedly elect the candidate with
/// the largest marginal gain, a ballot with `k` elected names contributing
/// its weight times `w_{k+1}`.
pub fn thiele_addition(w: &WeightScheme, profile: &Profile, opts: &CountOptions) -> Result<OutcomeSet> {
    profile.expect_kind(ProfileKind::Unordered)?;
    let c = Compiled::new(profile);
    let seats = profile.seats();
    let (done, truncated) = explore(Vec::<usize>::new(), opts.branch_cap, |elected| {
        if elected.len() == seats {
            return Ok(Step::Done(elected.clone()));
        }
        let winners = all_max(addition_scores(&c, w, elected));
        Ok(Step::Next(
            winners
                .into_iter()
                .map(|i| {
                    let mut e = elected.clone();
                    e.push(i);
                    e.sort_unstable();
                    e
                })
                .collect(),
        ))
    })?;
    Ok(OutcomeSet { committees: done.into_iter().map(|s| c.committee(s)).collect(), truncated })
}

/// Every election sequence of Thiele's addition method, with the score each
/// candidate had when elected. Sequences are not merged, so this is meant
/// for small profiles; at most `cap` sequences are produced.
pub fn thiele_addition_paths(
    w: &WeightScheme,
    profile: &Profile,
    cap: usize,
) -> Result<Vec<Vec<(crate::ballots::Candidate, Rational)>>> {
    profile.expect_kind(ProfileKind::Unordered)?;
    let c = Compiled::new(profile);
    let seats = profile.seats();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<(usize, Rational)>> = alloc::vec![Vec::new()];
    while let Some(path) = stack.pop() {
        if out.len() >= cap {
            break;
        }
        if path.len() == seats {
            out.push(path.into_iter().map(|(i, s)| (c.cands[i].clone(), s)).collect());
            continue;
        }
        let elected: Vec<usize> = path.iter().map(|p| p.0).collect();
        let scores = addition_scores(&c, w, &elected);
        let score_of: BTreeMap<usize, Rational> =
            scores.iter().map(|(i, s)| (*i, s.clone().unwrap_or_default())).collect();
        for i in all_max(scores) {
            let mut p = path.clone();
            p.push((i, score_of[&i].clone()));
            stack.push(p);
        }
    }
    Ok(out)
}

/// Thiele's sequential elimination method: a ballot with `k` remaining
/// names gives `1/k` of its weight to each; the candidate with the smallest
/// total is eliminated until `S` remain.
pub fn thiele_elimination(profile: &Profile, opts: &CountOptions) -> Result<OutcomeSet> {
    profile.expect_kind(ProfileKind::Unordered)?;
    let c = Compiled::new(profile);
    let seats = profile.seats();
    let n = c.cands.len();
    let (done, truncated) = explore((0..n).collect::<Vec<usize>>(), opts.branch_cap, |remaining| {
        if remaining.len() == seats {
            return Ok(Step::Done(remaining.clone()));
        }
        let mut alive = alloc::vec![false; n];
        for &r in remaining {
            alive[r] = true;
        }
        let mut scores = alloc::vec![Rational::zero(); n];
        for g in &c.groups {
            let k = g.members.iter().filter(|&&m| alive[m]).count();
            if k == 0 {
                continue;
            }
            let share = &g.weight / Rational::from_usize(k);
            for &m in &g.members {
                if alive[m] {
                    scores[m] += &share;
                }
            }
        }
        let losers = all_min(remaining.iter().map(|&i| (i, Some(scores[i].clone()))));
        Ok(Step::Next(
            losers
                .into_iter()
                .map(|l| remaining.iter().copied().filter(|&i| i != l).collect())
                .collect(),
        ))
    })?;
    Ok(OutcomeSet { committees: done.into_iter().map(|s| c.committee(s)).collect(), truncated })
}
