//! Layered enumeration of tie branches.
//!
//! Every sequential engine is a state machine that, at each step, either
//! finishes or moves to one successor per tied choice. States reached by
//! different tie resolutions are merged, so enumeration is exponential only
//! in the number of genuinely different intermediate states.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::Result;

pub(crate) enum Step<S, T> {
    Done(T),
    Next(Vec<S>),
}

/// Expand `init` layer by layer until every branch is done.
///
/// Returns the set of results and whether the branch cap truncated either
/// an intermediate layer or the result set.
pub(crate) fn explore<S: Ord, T: Ord>(
    init: S,
    cap: usize,
    mut expand: impl FnMut(&S) -> Result<Step<S, T>>,
) -> Result<(BTreeSet<T>, bool)> {
    let cap = cap.max(1);
    let mut frontier = BTreeSet::new();
    frontier.insert(init);
    let mut done = BTreeSet::new();
    let mut truncated = false;
    while !frontier.is_empty() {
        let mut next = BTreeSet::new();
        for state in &frontier {
            match expand(state)? {
                Step::Done(t) => {
                    if done.len() < cap || done.contains(&t) {
                        done.insert(t);
                    } else {
                        truncated = true;
                    }
                }
                Step::Next(succ) => next.extend(succ),
            }
        }
        if next.len() > cap {
            truncated = true;
            next = next.into_iter().take(cap).collect();
        }
        frontier = next;
    }
    Ok((done, truncated))
}

/// Indices whose key is maximal. Keys of `None` never win unless all are
/// `None`, in which case every index is returned.
pub(crate) fn all_max<K: Ord>(items: impl IntoIterator<Item = (usize, Option<K>)>) -> Vec<usize> {
    extremes(items, |a, b| a > b)
}

/// Indices whose key is minimal, with the same `None` convention as
/// [`all_max`].
pub(crate) fn all_min<K: Ord>(items: impl IntoIterator<Item = (usize, Option<K>)>) -> Vec<usize> {
    extremes(items, |a, b| a < b)
}

fn extremes<K: Ord>(
    items: impl IntoIterator<Item = (usize, Option<K>)>,
    better: impl Fn(&K, &K) -> bool,
) -> Vec<usize> {
    let mut best: Option<K> = None;
    let mut winners = Vec::new();
    let mut unkeyed = Vec::new();
    for (i, key) in items {
        match key {
            None => unkeyed.push(i),
            Some(k) => match &best {
                Some(b) if better(&k, b) => {
                    best = Some(k);
                    winners.clear();
                    winners.push(i);
                }
                Some(b) if !better(b, &k) => winners.push(i),
                Some(_) => {}
                None => {
                    best = Some(k);
                    winners.push(i);
                }
            },
        }
    }
    if best.is_none() {
        unkeyed
    } else {
        winners
    }
}

/// All `k`-subsets of `items`, each in ascending position order.
pub(crate) fn subsets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(k);
    fn rec<T: Clone>(items: &[T], k: usize, start: usize, pick: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if pick.len() == k {
            out.push(pick.clone());
            return;
        }
        let need = k - pick.len();
        for i in start..items.len() {
            if items.len() - i < need {
                break;
            }
            pick.push(items[i].clone());
            rec(items, k, i + 1, pick, out);
            pick.pop();
        }
    }
    rec(items, k, 0, &mut pick, &mut out);
    out
}

/// Binomial coefficient, saturating.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}
