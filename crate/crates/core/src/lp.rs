//! Exact linear programming over rationals.
//!
//! Dense two-phase simplex with Bland's pivoting rule, which terminates on
//! degenerate programs without perturbation. Programs are minimizations
//! with per-variable lower bounds.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::numerics::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Minimize `objective · x` subject to the constraints and
/// `x_j >= lower_bounds[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// A program over `names` with zero lower bounds and no constraints.
    pub fn new(names: Vec<String>, objective: Vec<Rational>) -> Self {
        let n = names.len();
        LinearProgram { names, objective, constraints: Vec::new(), lower_bounds: alloc::vec![Rational::zero(); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::LinearProgram("malformed: no variables"));
        }
        if self.objective.len() != n
            || self.lower_bounds.len() != n
            || self.constraints.iter().any(|c| c.coeffs.len() != n)
        {
            return Err(Error::LinearProgram("malformed: dimension mismatch"));
        }
        Ok(())
    }

    /// True when `point` satisfies every constraint and bound.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars()
            && point.iter().zip(&self.lower_bounds).all(|(x, l)| x >= l)
            && self.constraints.iter().all(|c| c.holds_at(point))
    }

    pub fn objective_at(&self, point: &[Rational]) -> Rational {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }

    /// Plain-text dump: a variable header, the objective, then one
    /// constraint per line with rational coefficients.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "variables: {}", self.names.join(" "));
        let join = |v: &[Rational]| v.iter().map(|r| format!("{r}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "minimize: {}", join(&self.objective));
        if self.lower_bounds.iter().any(|l| !l.is_zero()) {
            let _ = writeln!(out, "lower: {}", join(&self.lower_bounds));
        }
        for c in &self.constraints {
            let _ = writeln!(out, "{} {} {}", join(&c.coeffs), c.relation.symbol(), c.rhs);
        }
        out
    }

    /// The dual of a program with zero lower bounds, written again as a
    /// minimization: its optimal value is the negative of the primal one.
    ///
    /// Rows are first rewritten as `>=` (negating `<=` rows and splitting
    /// equalities), so every dual variable is non-negative.
    pub fn dual(&self) -> Result<LinearProgram> {
        self.validate()?;
        if self.lower_bounds.iter().any(|l| !l.is_zero()) {
            return Err(Error::LinearProgram("dual needs zero lower bounds"));
        }
        let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for c in &self.constraints {
            let neg = || (c.coeffs.iter().map(|a| -a).collect::<Vec<_>>(), -&c.rhs);
            match c.relation {
                Relation::Ge => rows.push((c.coeffs.clone(), c.rhs.clone())),
                Relation::Le => rows.push(neg()),
                Relation::Eq => {
                    rows.push((c.coeffs.clone(), c.rhs.clone()));
                    rows.push(neg());
                }
            }
        }
        let names = (0..rows.len()).map(|i| format!("y{}", i + 1)).collect();
        let objective = rows.iter().map(|(_, b)| -b).collect();
        let mut dual = LinearProgram::new(names, objective);
        for j in 0..self.num_vars() {
            let coeffs = rows.iter().map(|(a, _)| a[j].clone()).collect();
            dual.add(coeffs, Relation::Le, self.objective[j].clone());
        }
        Ok(dual)
    }
}

/// Solve `lp` exactly.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();

    // Shift x = y + lower so that y >= 0, and make every rhs non-negative.
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::with_capacity(lp.constraints.len());
    for c in &lp.constraints {
        let shift: Rational = c.coeffs.iter().zip(&lp.lower_bounds).map(|(a, l)| a * l).sum();
        let rhs = &c.rhs - shift;
        if rhs.is_negative() {
            let relation = match c.relation {
                Relation::Ge => Relation::Le,
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
            };
            rows.push((c.coeffs.iter().map(|a| -a).collect(), relation, -rhs));
        } else {
            rows.push((c.coeffs.clone(), c.relation, rhs));
        }
    }

    let m = rows.len();
    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let arts = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = n + slacks + arts;
    let mut t = Tableau {
        a: Vec::with_capacity(m),
        b: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        width,
    };
    let mut next_slack = n;
    let mut next_art = n + slacks;
    for (coeffs, relation, rhs) in rows {
        let mut row = coeffs;
        row.resize(width, Rational::zero());
        match relation {
            Relation::Le => {
                row[next_slack] = Rational::one();
                t.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                t.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                t.basis.push(next_art);
                next_art += 1;
            }
        }
        t.a.push(row);
        t.b.push(rhs);
    }
    let first_art = n + slacks;

    // Phase one: minimize the sum of artificials.
    if arts > 0 {
        let mut cost = alloc::vec![Rational::zero(); width];
        for c in cost.iter_mut().skip(first_art) {
            *c = Rational::one();
        }
        if t.optimize(&cost, width) == Pivot::Unbounded {
            return Err(Error::LinearProgram("unbounded in phase one"));
        }
        let infeasibility: Rational =
            t.basis.iter().zip(&t.b).filter(|(&j, _)| j >= first_art).map(|(_, b)| b.clone()).sum();
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.a.len() {
            if t.basis[i] >= first_art {
                match (0..first_art).find(|&j| !t.a[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.a.remove(i);
                        t.b.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase two over structural and slack columns only.
    let mut cost = alloc::vec![Rational::zero(); width];
    cost[..n].clone_from_slice(&lp.objective);
    if t.optimize(&cost, first_art) == Pivot::Unbounded {
        return Ok(LpOutcome::Unbounded);
    }
    let mut point = lp.lower_bounds.clone();
    for (i, &j) in t.basis.iter().enumerate() {
        if j < n {
            point[j] = &point[j] + &t.b[i];
        }
    }
    let value = lp.objective_at(&point);
    debug_assert!(lp.is_feasible(&point));
    Ok(LpOutcome::Optimal { value, point })
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

#[derive(PartialEq, Eq)]
enum Pivot {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        if !p.is_one() {
            for x in self.a[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x / &p;
                }
            }
            self.b[r] = &self.b[r] / &p;
        }
        let pivot_row = self.a[r].clone();
        let pivot_b = self.b[r].clone();
        let nonzero: Vec<usize> = (0..self.width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for &j in &nonzero {
                let d = &f * &pivot_row[j];
                self.a[i][j] -= d;
            }
            self.b[i] -= &f * &pivot_b;
        }
        self.basis[r] = c;
    }

    /// Minimize `cost` over the current basis, letting only columns below
    /// `allowed` enter.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> Pivot {
        loop {
            // Reduced cost d_j = c_j - c_B · column j (Bland: first negative).
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() && !self.a[i][j].is_zero() {
                        d -= &cost[bi] * &self.a[i][j];
                    }
                }
                d.is_negative()
            });
            let Some(c) = entering else {
                return Pivot::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                if self.a[i][c].is_positive() {
                    let ratio = &self.b[i] / &self.a[i][c];
                    let better = match &leave {
                        None => true,
                        Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Pivot::Unbounded,
            }
        }
    }
}
