//! The sequences `a_n`, `b_n`, `c_n` behind the thresholds of Thiele's
//! ordered method, and the linear-programming quantity `alpha_n(w)` behind
//! those of Thiele's addition method.
//!
//! `b_n = 1 - sum_{i<n} b_i/(n+1-i)`, `a_n = b_1 + ... + b_n` and
//! `c_n = floor((n+1)/2) * ceil((n+1)/2)`.
//!
//! `alpha_n(w)` is the least total weight of ballots (none naming a fixed
//! outside candidate) under which Thiele's addition method with weights `w`
//! can elect `n` candidates `C_1, ..., C_n` in that order, each with score at
//! least 1 when elected.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::ballots::WeightScheme;
use crate::error::{Error, Result};
use crate::lp::{solve, LinearProgram, LpOutcome, Relation};
use crate::numerics::Rational;

/// Default largest `n` for which `alpha_n` is computed (`2^n - 1` variables).
pub const DEFAULT_ALPHA_CAP: usize = 7;

/// Memo tables for the sequences and for `alpha`.
#[derive(Clone, Debug)]
pub struct SequenceCache {
    b: Vec<Rational>,
    alpha: BTreeMap<(usize, WeightScheme), Rational>,
    alpha_cap: usize,
}

impl Default for SequenceCache {
    fn default() -> Self {
        Self::new(DEFAULT_ALPHA_CAP)
    }
}

impl SequenceCache {
    pub fn new(alpha_cap: usize) -> Self {
        SequenceCache { b: Vec::new(), alpha: BTreeMap::new(), alpha_cap }
    }

    pub fn alpha_cap(&self) -> usize {
        self.alpha_cap
    }

    pub fn set_alpha_cap(&mut self, cap: usize) {
        self.alpha_cap = cap;
    }

    /// `b_n`, `n >= 1`.
    pub fn b(&mut self, n: usize) -> Result<Rational> {
        check_index(n)?;
        while self.b.len() < n {
            let k = self.b.len() + 1;
            let tail: Rational = self
                .b
                .iter()
                .enumerate()
                .map(|(i, bi)| bi / Rational::from_usize(k - i))
                .sum();
            self.b.push(Rational::one() - tail);
        }
        Ok(self.b[n - 1].clone())
    }

    /// `a_n = b_1 + ... + b_n`, `n >= 1`.
    pub fn a(&mut self, n: usize) -> Result<Rational> {
        self.b(n)?;
        Ok(self.b[..n].iter().sum())
    }

    /// `alpha_n(w)`, computed exactly by linear programming and memoized.
    pub fn alpha(&mut self, n: usize, w: &WeightScheme) -> Result<Rational> {
        let key = (n, canonical(w, n));
        if let Some(v) = self.alpha.get(&key) {
            return Ok(v.clone());
        }
        let value = alpha_uncached(n, w, self.alpha_cap)?;
        self.alpha.insert(key, value.clone());
        Ok(value)
    }

    /// Seed `alpha_n(w)` from a trusted source, such as a shared cache.
    pub fn insert_alpha(&mut self, n: usize, w: &WeightScheme, value: Rational) {
        self.alpha.insert((n, canonical(w, n)), value);
    }

    pub fn cached_alpha(&self, n: usize, w: &WeightScheme) -> Option<Rational> {
        self.alpha.get(&(n, canonical(w, n))).cloned()
    }
}

/// Only `w_1..w_n` affect `alpha_n`, so schemes agreeing there share a key.
fn canonical(w: &WeightScheme, n: usize) -> WeightScheme {
    if w.is_harmonic_upto(n) {
        WeightScheme::Harmonic
    } else if w.is_weak_upto(n) {
        WeightScheme::Weak
    } else if w.is_constant_upto(n) {
        WeightScheme::Constant
    } else {
        WeightScheme::Explicit { prefix: w.prefix(n), tail: Rational::zero() }
    }
}

fn check_index(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("sequence index must be at least 1".into()));
    }
    Ok(())
}

/// `b_n` without a cache.
pub fn seq_b(n: usize) -> Result<Rational> {
    SequenceCache::default().b(n)
}

/// `a_n` without a cache.
pub fn seq_a(n: usize) -> Result<Rational> {
    SequenceCache::default().a(n)
}

/// `c_n = floor((n+1)/2) * ceil((n+1)/2)`.
pub fn seq_c(n: usize) -> Result<BigInt> {
    check_index(n)?;
    let lo = n.div_ceil(2);
    let hi = (n + 2) / 2;
    Ok(BigInt::from(lo) * BigInt::from(hi))
}

/// Name of the variable for the ballot `sigma` (a bit mask over `C_1..C_n`).
pub fn ballot_name(sigma: usize, n: usize) -> String {
    let mut s = String::from("x");
    for k in 0..n {
        if sigma & (1 << k) != 0 {
            if n < 10 {
                s.push_str(&format!("{}", k + 1));
            } else {
                s.push_str(&format!("_{}", k + 1));
            }
        }
    }
    s
}

/// The linear program whose optimum is `alpha_n(w)`.
///
/// Variable `x_sigma` (for each non-empty `sigma ⊆ {1..n}`, in bit-mask
/// order) is the weight of ballots `{C_i : i ∈ sigma}`. At step `k` a ballot
/// gives `w_{1 + |sigma ∩ {1..k-1}|}` to each of its unelected names; `C_k`
/// must then score at least as much as every later `C_j` and at least 1.
pub fn build_alpha_lp(n: usize, w: &WeightScheme, cap: usize) -> Result<LinearProgram> {
    check_index(n)?;
    if n > cap {
        return Err(Error::SequenceLimit { n, limit: cap });
    }
    let vars = (1usize << n) - 1;
    let names = (1..=vars).map(|s| ballot_name(s, n)).collect();
    let mut lp = LinearProgram::new(names, alloc::vec![Rational::one(); vars]);
    let weights: Vec<Rational> = (0..=n).map(|k| w.w(k)).collect();
    // score(k, c)[sigma] = coefficient of x_sigma in c's score at step k.
    let score_row = |k: usize, c: usize| -> Vec<Rational> {
        (1..=vars)
            .map(|sigma| {
                if sigma & (1 << (c - 1)) == 0 {
                    return Rational::zero();
                }
                let before = (sigma & ((1 << (k - 1)) - 1)).count_ones() as usize;
                weights[before + 1].clone()
            })
            .collect()
    };
    for k in 1..=n {
        let own = score_row(k, k);
        for j in k + 1..=n {
            let other = score_row(k, j);
            let diff = own.iter().zip(&other).map(|(a, b)| a - b).collect();
            lp.add(diff, Relation::Ge, Rational::zero());
        }
    }
    for k in 1..=n {
        lp.add(score_row(k, k), Relation::Ge, Rational::one());
    }
    Ok(lp)
}

fn alpha_uncached(n: usize, w: &WeightScheme, cap: usize) -> Result<Rational> {
    match solve(&build_alpha_lp(n, w, cap)?)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Infeasible => Err(Error::LinearProgram("infeasible")),
        LpOutcome::Unbounded => Err(Error::LinearProgram("unbounded")),
    }
}

/// Optimal `alpha_n(w)` program solution: value and vertex.
pub fn alpha_vertex(n: usize, w: &WeightScheme, cap: usize) -> Result<(Rational, Vec<Rational>)> {
    match solve(&build_alpha_lp(n, w, cap)?)? {
        LpOutcome::Optimal { value, point } => Ok((value, point)),
        LpOutcome::Infeasible => Err(Error::LinearProgram("infeasible")),
        LpOutcome::Unbounded => Err(Error::LinearProgram("unbounded")),
    }
}

/// `alpha_n(w)` without a cache.
pub fn alpha(n: usize, w: &WeightScheme) -> Result<Rational> {
    alpha_uncached(n, w, DEFAULT_ALPHA_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn small_sequences() {
        assert_eq!(seq_b(2).unwrap(), r("1/2"));
        assert_eq!(seq_b(3).unwrap(), r("5/12"));
        assert_eq!(seq_a(3).unwrap(), r("23/12"));
        assert_eq!(seq_c(4).unwrap(), BigInt::from(6));
        assert!(seq_b(0).is_err());
    }

    #[test]
    fn single_candidate_program() {
        let lp = build_alpha_lp(1, &WeightScheme::Harmonic, 7).unwrap();
        assert_eq!(lp.num_vars(), 1);
        assert_eq!(lp.constraints.len(), 1);
        assert_eq!(lp.constraints[0].rhs, Rational::one());
    }

    #[test]
    fn two_candidate_program() {
        let lp = build_alpha_lp(2, &WeightScheme::Harmonic, 7).unwrap();
        assert_eq!(lp.names, ["x1", "x2", "x12"]);
        // C1 beats C2: x1 + x12 >= x2 + x12.
        assert_eq!(lp.constraints[0].coeffs, [r("1"), r("-1"), r("0")]);
        // C2 scores 1 at step 2: x2 + x12/2 >= 1.
        assert_eq!(lp.constraints[2].coeffs, [r("0"), r("1"), r("1/2")]);
        assert_eq!(alpha(2, &WeightScheme::Harmonic).unwrap(), r("2"));
    }

    #[test]
    fn over_cap() {
        assert_eq!(
            build_alpha_lp(8, &WeightScheme::Harmonic, 7).unwrap_err(),
            Error::SequenceLimit { n: 8, limit: 7 }
        );
    }
}
