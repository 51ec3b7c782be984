//! Exact two-phase primal simplex with Bland's rule.
//!
//! Solves `min cᵀx` subject to `A x = b`, `x ≥ 0` over the rationals and
//! returns a basic optimal solution (a vertex).

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// Rows `0..m` are constraints, each with `cols + 1` entries (last is rhs).
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of `cost` (indexed by column) for the current basis.
    fn reduced(&self, cost: &[Rational], allowed: &[bool]) -> Vec<Option<Rational>> {
        (0..self.cols)
            .map(|j| {
                if !allowed[j] {
                    return None;
                }
                let mut d = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    if !row[j].is_zero() {
                        d -= &cost[self.basis[i]] * &row[j];
                    }
                }
                Some(d)
            })
            .collect()
    }

    /// Runs Bland's rule to optimality. Returns `false` if unbounded.
    fn optimise(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            let reduced = self.reduced(cost, allowed);
            let entering = (0..self.cols).find(|&j| {
                !self.basis.contains(&j) && reduced[j].as_ref().is_some_and(|d| d.is_negative())
            });
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

pub fn minimise(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (ai, bi) in a.iter().zip(b) {
        let flip = bi.is_negative();
        let mut row: Vec<Rational> = ai
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        row.extend((0..m).map(|_| Rational::zero()));
        row.push(if flip { -bi.clone() } else { bi.clone() });
        rows.push(row);
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[n + i] = Rational::from_integer(1.into());
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        cols,
    };

    let phase1: Vec<Rational> = (0..cols)
        .map(|j| Rational::from_integer(((j >= n) as i64).into()))
        .collect();
    let all = vec![true; cols];
    t.optimise(&phase1, &all);
    let infeasibility: Rational = t
        .rows
        .iter()
        .zip(&t.basis)
        .filter(|(_, &bj)| bj >= n)
        .fold(Rational::zero(), |acc, (row, _)| acc + &row[cols]);
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    let mut cost: Vec<Rational> = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    let allowed: Vec<bool> = (0..cols).map(|j| j < n).collect();
    if !t.optimise(&cost, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &bj) in t.rows.iter().zip(&t.basis) {
        if bj < n {
            x[bj] = row[cols].clone();
        }
    }
    let value = x
        .iter()
        .zip(c)
        .fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::from_int;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| from_int(x)).collect()
    }

    #[test]
    fn small_lp() {
        // min x0 + 2 x1  s.t. x0 + x1 = 3, x0 - x2 = 1
        let a = vec![r(&[1, 1, 0]), r(&[1, 0, -1])];
        match minimise(&a, &r(&[3, 1]), &r(&[1, 2, 0])) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, r(&[3, 0, 2]));
                assert_eq!(value, from_int(3));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_redundant() {
        let a = vec![r(&[1, 1]), r(&[1, 1])];
        assert_eq!(
            minimise(&a, &r(&[1, 2]), &r(&[1, 1])),
            LpOutcome::Infeasible
        );
        match minimise(&a, &r(&[2, 2]), &r(&[1, 3])) {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, r(&[2, 0])),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            minimise(&[r(&[1])], &r(&[-1]), &r(&[0])),
            LpOutcome::Infeasible
        );
    }

    #[test]
    fn unbounded() {
        let a = vec![r(&[1, -1])];
        assert_eq!(minimise(&a, &r(&[0]), &r(&[-1, 0])), LpOutcome::Unbounded);
    }
}
