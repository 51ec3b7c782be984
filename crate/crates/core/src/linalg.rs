//! Exact integer and rational linear algebra on small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Determinant by fraction-free Bareiss elimination.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Solves a square non-singular system exactly; `None` if singular.
pub fn solve_square(m: &[Vec<i64>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row: Vec<Rational> = r
                .iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect();
            row.push(bi.clone());
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(p, k);
        let pivot = a[k][k].clone();
        for v in a[k].iter_mut() {
            *v = &*v / &pivot;
        }
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != k && !row[k].is_zero() {
                let f = row[k].clone();
                for (x, p) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(
        a.into_iter()
            .map(|mut r| r.pop().expect("augmented"))
            .collect(),
    )
}

/// Outcome of asking for an integer solution of `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegerSolution {
    Integer(Vec<BigInt>),
    /// Rationally solvable, but no integer solution exists.
    RationalOnly,
    Unsolvable,
}

/// Decides integer solvability of `A x = b` through a column Hermite form
/// `A U = H` with `U` unimodular. The pivot coordinates of `H z = b` are
/// uniquely determined, so integrality of those decides the question.
pub fn integer_solve(a: &[Vec<i64>], b: &[i64]) -> IntegerSolution {
    let m = a.len();
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    let mut h: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();

    // Column operation helpers act on both H and U.
    fn combine(mat: &mut [Vec<BigInt>], i: usize, j: usize, c: [&BigInt; 4]) {
        // (col_i, col_j) <- (c0 col_i + c1 col_j, c2 col_i + c3 col_j)
        for row in mat.iter_mut() {
            let (x, y) = (row[i].clone(), row[j].clone());
            row[i] = c[0] * &x + c[1] * &y;
            row[j] = c[2] * &x + c[3] * &y;
        }
    }

    let mut pivots: Vec<Option<usize>> = vec![None; m];
    let mut k = 0;
    for r in 0..m {
        if k == n {
            break;
        }
        for j in k + 1..n {
            if h[r][j].is_zero() {
                continue;
            }
            if h[r][k].is_zero() {
                for row in h.iter_mut().chain(u.iter_mut()) {
                    row.swap(k, j);
                }
                continue;
            }
            let (p, q) = (h[r][k].clone(), h[r][j].clone());
            let e = p.extended_gcd(&q);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let pg = &p / &g;
            let qg = &q / &g;
            let neg_qg = -qg;
            // New col_k = s col_k + t col_j (entry g); new col_j = -q/g col_k + p/g col_j (entry 0).
            combine(&mut h, k, j, [&s, &t, &neg_qg, &pg]);
            combine(&mut u, k, j, [&s, &t, &neg_qg, &pg]);
        }
        if !h[r][k].is_zero() {
            pivots[r] = Some(k);
            k += 1;
        }
    }

    let mut z: Vec<Rational> = vec![Rational::zero(); n];
    for r in 0..m {
        let mut residual = Rational::from_integer(b[r].into());
        for (j, zj) in z.iter().enumerate() {
            if !h[r][j].is_zero() && !zj.is_zero() {
                residual -= Rational::from_integer(h[r][j].clone()) * zj;
            }
        }
        match pivots[r] {
            Some(c) => z[c] = residual / Rational::from_integer(h[r][c].clone()),
            None => {
                if !residual.is_zero() {
                    return IntegerSolution::Unsolvable;
                }
            }
        }
    }
    if z.iter().any(|v| !v.is_integer()) {
        return IntegerSolution::RationalOnly;
    }
    let zi: Vec<BigInt> = z.into_iter().map(|v| v.to_integer()).collect();
    let x = (0..n)
        .map(|i| {
            u[i].iter()
                .zip(&zi)
                .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect();
    IntegerSolution::Integer(x)
}

/// Rank over the rationals.
pub fn rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect()
        })
        .collect();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        let (done, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &done[rank];
        for row in rest.iter_mut() {
            if !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row[c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn is_unit(v: &BigInt) -> bool {
    v.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::from_int;

    #[test]
    fn determinants() {
        assert_eq!(determinant(&[]), BigInt::one());
        assert_eq!(determinant(&[vec![2]]), BigInt::from(2));
        assert_eq!(determinant(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(
            determinant(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]),
            BigInt::from(2)
        );
        assert_eq!(determinant(&[vec![1, 2], vec![2, 4]]), BigInt::zero());
    }

    #[test]
    fn square_solve() {
        let x = solve_square(&[vec![2]], &[from_int(1)]).unwrap();
        assert_eq!(x, vec![Rational::new(1.into(), 2.into())]);
        assert!(solve_square(&[vec![1, 1], vec![1, 1]], &[from_int(1), from_int(2)]).is_none());
    }

    #[test]
    fn integer_solvability() {
        assert_eq!(
            integer_solve(&[vec![2]], &[1]),
            IntegerSolution::RationalOnly
        );
        assert_eq!(
            integer_solve(&[vec![2]], &[4]),
            IntegerSolution::Integer(vec![2.into()])
        );
        assert_eq!(
            integer_solve(&[vec![1], vec![1]], &[1, 2]),
            IntegerSolution::Unsolvable
        );
        assert_eq!(
            integer_solve(&[vec![0, 0], vec![0, 0]], &[0, 0]),
            IntegerSolution::Integer(vec![0.into(), 0.into()])
        );
        // 6a + 10b = 2 has integer solutions, 6a + 10b = 3 does not.
        match integer_solve(&[vec![6, 10]], &[2]) {
            IntegerSolution::Integer(x) => assert_eq!(&x[0] * 6 + &x[1] * 10, BigInt::from(2)),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            integer_solve(&[vec![6, 10]], &[3]),
            IntegerSolution::RationalOnly
        );
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 0], vec![0, 1], vec![1, 1]]), 2);
        assert_eq!(rank(&[]), 0);
    }
}
