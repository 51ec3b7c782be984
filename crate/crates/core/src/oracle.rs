//! Brute-force ground truth over boxes of face coefficients `η`.
//!
//! Absence of a witness in a box is not a refutation on its own; refutations
//! come from exact linear algebra ([`exact_refutation`]), and box searches are
//! conclusive when the box contains the per-face bounds of
//! [`conclusive_bounds`].

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::dual::BoundaryMatrix;
use crate::embedding::EmbeddedDigraph;
use crate::error::{Error, Result};
use crate::linalg::{integer_solve, rank, IntegerSolution};
use crate::lp::{minimise, LpOutcome};
use crate::rational::{from_int, Rational, ScaledCosts};

pub const MAX_BOX_POINTS: f64 = 1e8;

/// Integer points of `{-K..K}^F`, optionally intersected with per-face
/// intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaBox {
    pub radius: i64,
    pub ranges: Vec<(i64, i64)>,
}

impl EtaBox {
    pub fn new(radius: i64, dim: usize) -> Result<Self> {
        Self::with_bounds(radius, vec![(-radius, radius); dim])
    }

    pub fn with_bounds(radius: i64, bounds: Vec<(i64, i64)>) -> Result<Self> {
        if radius < 0 {
            return Err(Error::BadParams("box radius must be non-negative".into()));
        }
        let ranges = bounds
            .into_iter()
            .map(|(lo, hi)| (lo.max(-radius), hi.min(radius)))
            .collect();
        let b = EtaBox { radius, ranges };
        let points = b.points();
        if points > MAX_BOX_POINTS {
            return Err(Error::BoxTooLarge { points });
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn points(&self) -> f64 {
        self.ranges
            .iter()
            .map(|&(lo, hi)| (hi - lo + 1).max(0) as f64)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.iter().any(|&(lo, hi)| lo > hi)
    }

    /// Whether every interval of `bounds` lies inside this box.
    pub fn covers(&self, bounds: &[(i64, i64)]) -> bool {
        bounds.len() == self.dim()
            && bounds
                .iter()
                .zip(&self.ranges)
                .all(|(&(lo, hi), &(blo, bhi))| lo > hi || (blo <= lo && hi <= bhi))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomologyVerdict {
    Yes(Vec<i64>),
    NoWitnessInBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refutation {
    /// `∂η = x - y` has no real solution.
    NotRealHomologous,
    /// Real solutions exist, none integral.
    NotIntegerHomologous,
}

/// Shared depth-first search over faces in index order.
struct Search<'a> {
    boundary: &'a BoundaryMatrix,
    ranges: &'a [(i64, i64)],
    /// `rem[k][a]`: min and max of `Σ_{f ≥ k} ∂[a][f] η_f` over the box.
    rem: Vec<Vec<(i64, i64)>>,
}

impl<'a> Search<'a> {
    fn new(boundary: &'a BoundaryMatrix, ranges: &'a [(i64, i64)]) -> Self {
        let (arcs, faces) = (boundary.rows(), boundary.cols());
        let mut rem = vec![vec![(0i64, 0i64); arcs]; faces + 1];
        for k in (0..faces).rev() {
            let (head, tail) = rem.split_at_mut(k + 1);
            for (a, (cur, &(pl, ph))) in head[k].iter_mut().zip(&tail[0]).enumerate() {
                let m = boundary.get(a, k);
                let (lo, hi) = ranges[k];
                let (u, v) = (m * lo, m * hi);
                *cur = (pl + u.min(v), ph + u.max(v));
            }
        }
        Search {
            boundary,
            ranges,
            rem,
        }
    }

    fn add_face(&self, partial: &mut [i64], f: usize, coeff: i64) {
        for (a, p) in partial.iter_mut().enumerate() {
            *p += self.boundary.get(a, f) * coeff;
        }
    }
}

/// Searches the box for an integer `η` with `∂η = x - y`, in lexicographic
/// order of `η`.
pub fn oracle_homologous(
    x: &[i64],
    y: &[i64],
    boundary: &BoundaryMatrix,
    eta_box: &EtaBox,
) -> Result<HomologyVerdict> {
    check_dims(boundary, eta_box, &[x, y])?;
    let z: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    if eta_box.is_empty() {
        return Ok(HomologyVerdict::NoWitnessInBox);
    }
    let search = Search::new(boundary, &eta_box.ranges);
    let mut eta = vec![0i64; boundary.cols()];
    let mut partial = vec![0i64; boundary.rows()];
    fn go(s: &Search<'_>, k: usize, z: &[i64], eta: &mut [i64], partial: &mut [i64]) -> bool {
        let feasible = partial.iter().zip(z).enumerate().all(|(a, (p, t))| {
            let (lo, hi) = s.rem[k][a];
            let need = t - p;
            lo <= need && need <= hi
        });
        if !feasible {
            return false;
        }
        if k == eta.len() {
            return true;
        }
        let (lo, hi) = s.ranges[k];
        for v in lo..=hi {
            eta[k] = v;
            s.add_face(partial, k, v);
            let found = go(s, k + 1, z, eta, partial);
            s.add_face(partial, k, -v);
            if found {
                return true;
            }
        }
        false
    }
    if go(&search, 0, &z, &mut eta, &mut partial) {
        Ok(HomologyVerdict::Yes(eta))
    } else {
        Ok(HomologyVerdict::NoWitnessInBox)
    }
}

/// Exact refutation of `x ~ y`, or `None` when an integer `η` exists.
pub fn exact_refutation(x: &[i64], y: &[i64], boundary: &BoundaryMatrix) -> Option<Refutation> {
    let z: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    match integer_solve(&boundary.to_rows(), &z) {
        IntegerSolution::Integer(_) => None,
        IntegerSolution::RationalOnly => Some(Refutation::NotIntegerHomologous),
        IntegerSolution::Unsolvable => Some(Refutation::NotRealHomologous),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleSolve {
    Optimal {
        x: Vec<i64>,
        objective: Rational,
        eta: Vec<i64>,
    },
    InfeasibleInBox,
}

/// Exhaustive minimum of `cᵀ(y + ∂η)` over the box subject to `y + ∂η ≥ 0`.
/// Among optimal `η` the lexicographically least is returned.
pub fn oracle_solve(
    graph: &EmbeddedDigraph,
    y: &[i64],
    boundary: &BoundaryMatrix,
    eta_box: &EtaBox,
) -> Result<OracleSolve> {
    check_dims(boundary, eta_box, &[y])?;
    if eta_box.is_empty() {
        return Ok(OracleSolve::InfeasibleInBox);
    }
    let scaled = ScaledCosts::new(&graph.costs())?;
    let costs: Vec<i128> = scaled.scaled.iter().map(|&c| c as i128).collect();
    let search = Search::new(boundary, &eta_box.ranges);
    struct State {
        best: Option<(i128, Vec<i64>)>,
        eta: Vec<i64>,
        partial: Vec<i64>,
    }
    let mut st = State {
        best: None,
        eta: vec![0; boundary.cols()],
        partial: y.to_vec(),
    };
    fn go(s: &Search<'_>, costs: &[i128], k: usize, st: &mut State) {
        let mut lower = 0i128;
        for (a, &p) in st.partial.iter().enumerate() {
            let (lo, hi) = s.rem[k][a];
            if p + hi < 0 {
                return;
            }
            lower += costs[a] * (p + lo).max(0) as i128;
        }
        if st.best.as_ref().is_some_and(|(b, _)| lower >= *b) {
            return;
        }
        if k == st.eta.len() {
            st.best = Some((lower, st.eta.clone()));
            return;
        }
        let (lo, hi) = s.ranges[k];
        for v in lo..=hi {
            st.eta[k] = v;
            s.add_face(&mut st.partial, k, v);
            go(s, costs, k + 1, st);
            s.add_face(&mut st.partial, k, -v);
        }
    }
    go(&search, &costs, 0, &mut st);
    Ok(match st.best {
        None => OracleSolve::InfeasibleInBox,
        Some((cost, eta)) => {
            let d = boundary.apply(&eta);
            let x: Vec<i64> = y.iter().zip(d).map(|(a, b)| a + b).collect();
            OracleSolve::Optimal {
                x,
                objective: scaled.to_rational(cost as u128),
                eta,
            }
        }
    })
}

/// `{y + ∂η : η in the box}` as a sorted set.
pub fn oracle_enumerate_class(
    y: &[i64],
    boundary: &BoundaryMatrix,
    eta_box: &EtaBox,
) -> Result<Vec<Vec<i64>>> {
    check_dims(boundary, eta_box, &[y])?;
    let mut out = BTreeSet::new();
    if eta_box.is_empty() {
        return Ok(Vec::new());
    }
    let mut eta: Vec<i64> = eta_box.ranges.iter().map(|r| r.0).collect();
    loop {
        let d = boundary.apply(&eta);
        out.insert(y.iter().zip(d).map(|(a, b)| a + b).collect::<Vec<i64>>());
        let mut k = 0;
        loop {
            if k == eta.len() {
                return Ok(out.into_iter().collect());
            }
            if eta[k] < eta_box.ranges[k].1 {
                eta[k] += 1;
                break;
            }
            eta[k] = eta_box.ranges[k].0;
            k += 1;
        }
    }
}

fn check_dims(boundary: &BoundaryMatrix, eta_box: &EtaBox, vectors: &[&[i64]]) -> Result<()> {
    if eta_box.dim() != boundary.cols() {
        return Err(Error::DimensionMismatch {
            expected: boundary.cols(),
            got: eta_box.dim(),
        });
    }
    for v in vectors {
        if v.len() != boundary.rows() {
            return Err(Error::DimensionMismatch {
                expected: boundary.rows(),
                got: v.len(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceBounds {
    /// No real `η` satisfies the constraints.
    Empty,
    /// Integer hull of the real range of each `η_f`.
    Bounded(Vec<(i64, i64)>),
    Unbounded,
}

/// Real ranges of each `η_f` over `{η : y + ∂η ≥ 0, cᵀ(y + ∂η) ≤ upper}`.
///
/// When `∂` has a kernel (orientable surfaces) face 0 is pinned to zero,
/// which loses no circulation. Every integer `η` certifying a circulation of
/// cost at most `upper` lies inside the returned bounds, so a box covering
/// them makes [`oracle_solve`] conclusive.
pub fn conclusive_bounds(
    graph: &EmbeddedDigraph,
    y: &[i64],
    boundary: &BoundaryMatrix,
    upper: Option<&Rational>,
) -> FaceBounds {
    let (arcs, faces) = (boundary.rows(), boundary.cols());
    let pin = rank(&boundary.to_rows()) < faces;
    // Variables: η⁺ (faces), η⁻ (faces), x (arcs), slack t (if upper).
    let with_upper = upper.is_some();
    let n = 2 * faces + arcs + with_upper as usize;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for a in 0..arcs {
        // ∂η⁺ - ∂η⁻ - x = -y
        let mut row = vec![Rational::zero(); n];
        for f in 0..faces {
            let m = boundary.get(a, f);
            row[f] = from_int(m);
            row[faces + f] = from_int(-m);
        }
        row[2 * faces + a] = from_int(-1);
        rows.push(row);
        rhs.push(from_int(-y[a]));
    }
    if let Some(u) = upper {
        let mut row = vec![Rational::zero(); n];
        for (a, c) in graph.costs().into_iter().enumerate() {
            row[2 * faces + a] = c;
        }
        row[n - 1] = from_int(1);
        rows.push(row);
        rhs.push(u.clone());
    }
    if pin && faces > 0 {
        for col in [0, faces] {
            let mut row = vec![Rational::zero(); n];
            row[col] = from_int(1);
            rows.push(row);
            rhs.push(Rational::zero());
        }
    }
    let mut bounds = Vec::with_capacity(faces);
    for f in 0..faces {
        let mut ends = [0i64; 2];
        for (i, sign) in [1i64, -1].into_iter().enumerate() {
            let mut c = vec![Rational::zero(); n];
            c[f] = from_int(sign);
            c[faces + f] = from_int(-sign);
            match minimise(&rows, &rhs, &c) {
                LpOutcome::Infeasible => return FaceBounds::Empty,
                LpOutcome::Unbounded => return FaceBounds::Unbounded,
                LpOutcome::Optimal { value, .. } => {
                    // value = sign · η_f at the optimum.
                    ends[i] = if sign > 0 {
                        value
                            .ceil()
                            .to_integer()
                            .try_into()
                            .expect("bound fits in i64")
                    } else {
                        (-value)
                            .floor()
                            .to_integer()
                            .try_into()
                            .expect("bound fits in i64")
                    };
                }
            }
        }
        bounds.push((ends[0], ends[1]));
    }
    FaceBounds::Bounded(bounds)
}

/// Smallest radius covering the given bounds.
pub fn radius_for(bounds: &[(i64, i64)]) -> i64 {
    bounds
        .iter()
        .filter(|(lo, hi)| lo <= hi)
        .map(|&(lo, hi)| lo.abs().max(hi.abs()))
        .max()
        .unwrap_or(0)
}

/// Convenience: the oracle optimum with a conclusiveness flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ConclusiveSolve {
    pub outcome: OracleSolve,
    pub conclusive: bool,
}

/// Runs [`oracle_solve`] over the box derived from [`conclusive_bounds`].
/// `upper` must be the cost of some known feasible circulation, or `None`.
pub fn oracle_solve_conclusive(
    graph: &EmbeddedDigraph,
    y: &[i64],
    boundary: &BoundaryMatrix,
    upper: Option<&Rational>,
) -> Result<ConclusiveSolve> {
    match conclusive_bounds(graph, y, boundary, upper) {
        FaceBounds::Empty => Ok(ConclusiveSolve {
            outcome: OracleSolve::InfeasibleInBox,
            conclusive: true,
        }),
        FaceBounds::Unbounded => Err(Error::BadParams(
            "face coefficients are unbounded; supply a cost bound".into(),
        )),
        FaceBounds::Bounded(bounds) => {
            let radius = radius_for(&bounds);
            let eta_box = EtaBox::with_bounds(radius, bounds)?;
            let outcome = oracle_solve(graph, y, boundary, &eta_box)?;
            Ok(ConclusiveSolve {
                outcome,
                conclusive: true,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::families;
    use crate::Surface;

    #[test]
    fn box_guard() {
        assert!(EtaBox::new(3, 4).is_ok());
        assert!(matches!(
            EtaBox::new(10, 10),
            Err(Error::BoxTooLarge { .. })
        ));
        assert_eq!(EtaBox::new(0, 5).unwrap().points(), 1.0);
    }

    #[test]
    fn projective_loop_homology() {
        let g = families::projective_loop().unwrap();
        let s = Surface::analyse(&g).unwrap();
        let b = EtaBox::new(3, 1).unwrap();
        assert_eq!(
            oracle_homologous(&[1], &[1], &s.boundary, &b).unwrap(),
            HomologyVerdict::Yes(vec![0])
        );
        assert_eq!(
            oracle_homologous(&[1], &[0], &s.boundary, &b).unwrap(),
            HomologyVerdict::NoWitnessInBox
        );
        assert_eq!(
            exact_refutation(&[1], &[0], &s.boundary),
            Some(Refutation::NotIntegerHomologous)
        );
        assert_eq!(exact_refutation(&[2], &[0], &s.boundary), None);
        let class = oracle_enumerate_class(&[0], &s.boundary, &EtaBox::new(1, 1).unwrap()).unwrap();
        assert_eq!(class, vec![vec![-2], vec![0], vec![2]]);
        let class = oracle_enumerate_class(&[5], &s.boundary, &EtaBox::new(0, 1).unwrap()).unwrap();
        assert_eq!(class, vec![vec![5]]);
    }

    #[test]
    fn projective_loop_solve() {
        let g = families::projective_loop().unwrap();
        let s = Surface::analyse(&g).unwrap();
        let b = EtaBox::new(2, 1).unwrap();
        match oracle_solve(&g, &[1], &s.boundary, &b).unwrap() {
            OracleSolve::Optimal { x, objective, .. } => {
                assert_eq!(x, vec![1]);
                assert_eq!(objective, from_int(1));
            }
            other => panic!("{other:?}"),
        }
        match oracle_solve(&g, &[0], &s.boundary, &b).unwrap() {
            OracleSolve::Optimal { x, .. } => assert_eq!(x, vec![0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn torus_bouquet_negative_class() {
        let g = families::torus_bouquet().unwrap();
        let s = Surface::analyse(&g).unwrap();
        let b = EtaBox::new(2, 1).unwrap();
        assert_eq!(
            oracle_solve(&g, &[-1, 0], &s.boundary, &b).unwrap(),
            OracleSolve::InfeasibleInBox
        );
        assert_eq!(
            conclusive_bounds(&g, &[-1, 0], &s.boundary, None),
            FaceBounds::Empty
        );
    }

    #[test]
    fn conclusive_bounds_on_klein_grid() {
        let g = families::klein_grid(2, 2).unwrap();
        let s = Surface::analyse(&g).unwrap();
        let y: Vec<i64> = vec![0; g.arc_count()];
        let r = oracle_solve_conclusive(&g, &y, &s.boundary, Some(&from_int(0))).unwrap();
        assert!(r.conclusive);
        match r.outcome {
            OracleSolve::Optimal { x, .. } => assert_eq!(x, y),
            other => panic!("{other:?}"),
        }
    }
}
