//! Dual graph, boundary matrix `∂` and the crossing vector `ξ` of dual walks.
//!
//! A dual dart is one *side* of a primal edge: one of its two occurrences in
//! the facial walks. Leaving a face through a dual dart crosses the edge to
//! the face holding the other occurrence.

use crate::embedding::{ArcSpec, EmbeddedDigraph, End, FacialWalkSet, Occurrence};
use crate::error::{Error, Result};
use crate::rational::{from_int, Rational};
use crate::tree::{EdgeRef, Hop};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualDart {
    pub arc: usize,
    /// Index into the arc's two occurrences.
    pub side: usize,
}

impl DualDart {
    pub fn partner(self) -> Self {
        DualDart {
            arc: self.arc,
            side: 1 - self.side,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DualGraph {
    faces: usize,
    occurrences: Vec<[Occurrence; 2]>,
    signature: Vec<i8>,
    rotation: Vec<Vec<DualDart>>,
}

impl DualGraph {
    pub fn build(graph: &EmbeddedDigraph, faces: &FacialWalkSet) -> Self {
        let occurrences = faces.occurrences.clone();
        let signature = occurrences
            .iter()
            .map(|[a, b]| if a.forward != b.forward { 1 } else { -1 })
            .collect();
        let mut slots: Vec<Vec<(usize, DualDart)>> = vec![Vec::new(); faces.len()];
        for (arc, occ) in occurrences.iter().enumerate() {
            for (side, o) in occ.iter().enumerate() {
                slots[o.face].push((o.pos, DualDart { arc, side }));
            }
        }
        let rotation = slots
            .into_iter()
            .map(|mut s| {
                s.sort();
                s.into_iter().map(|(_, d)| d).collect()
            })
            .collect();
        debug_assert_eq!(graph.arc_count(), faces.occurrences.len());
        DualGraph {
            faces: faces.len(),
            occurrences,
            signature,
            rotation,
        }
    }

    pub fn face_count(&self) -> usize {
        self.faces
    }

    pub fn arc_count(&self) -> usize {
        self.occurrences.len()
    }

    /// Dual signature: `+1` iff the two facial walks use the edge in
    /// opposite directions.
    pub fn signature(&self, arc: usize) -> i8 {
        self.signature[arc]
    }

    pub fn occurrence(&self, d: DualDart) -> Occurrence {
        self.occurrences[d.arc][d.side]
    }

    pub fn face_of(&self, d: DualDart) -> usize {
        self.occurrence(d).face
    }

    /// Face reached by leaving through `d`.
    pub fn target(&self, d: DualDart) -> usize {
        self.face_of(d.partner())
    }

    /// `+1` if the face walk at this side crosses the arc tail to head.
    pub fn side_sign(&self, d: DualDart) -> i64 {
        if self.occurrence(d).forward {
            1
        } else {
            -1
        }
    }

    pub fn is_loop(&self, arc: usize) -> bool {
        self.occurrences[arc][0].face == self.occurrences[arc][1].face
    }

    /// Dual darts at `face` in facial-walk order.
    pub fn rotation(&self, face: usize) -> &[DualDart] {
        &self.rotation[face]
    }

    pub(crate) fn edge_refs(&self) -> Vec<EdgeRef> {
        self.occurrences
            .iter()
            .enumerate()
            .map(|(id, [a, b])| EdgeRef {
                id,
                u: a.face,
                v: b.face,
            })
            .collect()
    }

    /// Dual dart realising a tree hop. Loops use side 0.
    pub(crate) fn dart_for_hop(&self, hop: Hop) -> DualDart {
        let side = if self.occurrences[hop.edge][0].face == hop.from {
            0
        } else {
            1
        };
        debug_assert_eq!(self.occurrences[hop.edge][side].face, hop.from);
        DualDart {
            arc: hop.edge,
            side,
        }
    }

    /// The dual as an ordinary embedded digraph: node ids are face indices,
    /// arc ids are the primal arc ids, each arc points from its lower face
    /// index (first occurrence) to the other, and costs are copied.
    pub fn to_instance(&self, primal: &EmbeddedDigraph) -> Result<EmbeddedDigraph> {
        let arcs = (0..self.arc_count())
            .map(|a| ArcSpec {
                id: primal.arc(a).id,
                tail: self.occurrences[a][0].face as u32,
                head: self.occurrences[a][1].face as u32,
                cost: primal.arc(a).cost.clone(),
            })
            .collect();
        let rotation = self
            .rotation
            .iter()
            .enumerate()
            .map(|(f, darts)| {
                let darts = darts
                    .iter()
                    .map(|d| {
                        let end = if d.side == 0 { End::Tail } else { End::Head };
                        (primal.arc(d.arc).id, end)
                    })
                    .collect();
                (f as u32, darts)
            })
            .collect();
        let signature = (0..self.arc_count())
            .map(|a| (primal.arc(a).id, self.signature[a]))
            .collect();
        EmbeddedDigraph::new((0..self.faces as u32).collect(), arcs, rotation, signature)
    }
}

/// `s(a, f)`: the crossing direction of `f` over arc `a` when `f` uses the
/// edge once, or twice in the same direction; zero otherwise.
pub fn face_sign(faces: &FacialWalkSet, arc: usize, face: usize) -> i8 {
    let dirs: Vec<bool> = faces.occurrences[arc]
        .iter()
        .filter(|o| o.face == face)
        .map(|o| o.forward)
        .collect();
    match dirs.as_slice() {
        [d] => {
            if *d {
                1
            } else {
                -1
            }
        }
        [a, b] if a == b => {
            if *a {
                1
            } else {
                -1
            }
        }
        _ => 0,
    }
}

/// A walk in the dual graph: starting face and the dual dart left through at
/// each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualWalk {
    pub start: usize,
    pub steps: Vec<DualDart>,
}

impl DualWalk {
    pub fn empty(start: usize) -> Self {
        DualWalk {
            start,
            steps: Vec::new(),
        }
    }

    pub fn validate(&self, dual: &DualGraph) -> Result<()> {
        let mut at = self.start;
        for d in &self.steps {
            if dual.face_of(*d) != at {
                return Err(Error::InvalidInput(format!(
                    "dual walk leaves face {} through a dart of face {}",
                    at,
                    dual.face_of(*d)
                )));
            }
            at = dual.target(*d);
        }
        Ok(())
    }

    pub fn end(&self, dual: &DualGraph) -> usize {
        self.steps
            .last()
            .map(|d| dual.target(*d))
            .unwrap_or(self.start)
    }

    pub fn is_closed(&self, dual: &DualGraph) -> bool {
        self.end(dual) == self.start
    }

    /// Product of dual signatures along the walk.
    pub fn sign(&self, dual: &DualGraph) -> i8 {
        self.steps.iter().map(|d| dual.signature(d.arc)).product()
    }

    pub fn is_two_sided(&self, dual: &DualGraph) -> bool {
        self.sign(dual) == 1
    }

    /// Faces visited, including start and end.
    pub fn faces(&self, dual: &DualGraph) -> Vec<usize> {
        let mut out = vec![self.start];
        out.extend(self.steps.iter().map(|d| dual.target(*d)));
        out
    }

    /// Same walk traversed backwards.
    pub fn reversed(&self, dual: &DualGraph) -> Self {
        DualWalk {
            start: self.end(dual),
            steps: self.steps.iter().rev().map(|d| d.partner()).collect(),
        }
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn concat(&self, other: &DualWalk) -> Self {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        DualWalk {
            start: self.start,
            steps,
        }
    }

    /// Cyclic shift of a closed walk so that it starts after `k` steps.
    pub fn rotated(&self, dual: &DualGraph, k: usize) -> Self {
        if self.steps.is_empty() {
            return self.clone();
        }
        let k = k % self.steps.len();
        let mut steps = self.steps.clone();
        steps.rotate_left(k);
        let start = if k == 0 {
            self.start
        } else {
            dual.target(self.steps[k - 1])
        };
        DualWalk { start, steps }
    }

    /// How many times each arc is crossed.
    pub fn usage(&self, arc_count: usize) -> Vec<usize> {
        let mut u = vec![0; arc_count];
        for d in &self.steps {
            u[d.arc] += 1;
        }
        u
    }
}

/// Crossing vector of a dual walk: every crossing of arc `a` contributes the
/// crossing direction of the face being left, times the product of dual
/// signatures of all earlier crossings.
pub fn xi(dual: &DualGraph, walk: &DualWalk) -> Vec<i64> {
    let mut out = vec![0i64; dual.arc_count()];
    let mut prefix = 1i64;
    for d in &walk.steps {
        out[d.arc] += prefix * dual.side_sign(*d);
        prefix *= dual.signature(d.arc) as i64;
    }
    out
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense `|A| x |F|` integer matrix whose column `f` is `χ(f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl BoundaryMatrix {
    pub fn build(graph: &EmbeddedDigraph, faces: &FacialWalkSet) -> Self {
        let rows = graph.arc_count();
        let cols = faces.len();
        let mut data = vec![0i64; rows * cols];
        for (a, occ) in faces.occurrences.iter().enumerate() {
            for o in occ {
                data[a * cols + o.face] += if o.forward { 1 } else { -1 };
            }
        }
        BoundaryMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        let n = rows.len();
        BoundaryMatrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, arc: usize, face: usize) -> i64 {
        self.data[arc * self.cols + face]
    }

    pub fn row(&self, arc: usize) -> &[i64] {
        &self.data[arc * self.cols..(arc + 1) * self.cols]
    }

    pub fn column(&self, face: usize) -> Vec<i64> {
        (0..self.rows).map(|a| self.get(a, face)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|a| self.row(a).to_vec()).collect()
    }

    /// `∂ η` for an integer coefficient vector.
    pub fn apply(&self, eta: &[i64]) -> Vec<i64> {
        (0..self.rows).map(|a| dot(self.row(a), eta)).collect()
    }

    pub fn apply_rational(&self, eta: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|a| {
                self.row(a)
                    .iter()
                    .zip(eta)
                    .fold(from_int(0), |acc, (&m, e)| acc + from_int(m) * e)
            })
            .collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<i64>> {
        rows.iter()
            .map(|&r| cols.iter().map(|&c| self.get(r, c)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::trace_facial_walks;
    use crate::instances::families;

    fn setup(g: &EmbeddedDigraph) -> (FacialWalkSet, DualGraph, BoundaryMatrix) {
        let f = trace_facial_walks(g);
        let d = DualGraph::build(g, &f);
        let b = BoundaryMatrix::build(g, &f);
        (f, d, b)
    }

    #[test]
    fn triangle_dual_is_theta_graph() {
        let g = families::sphere_cycle(3).unwrap();
        let (f, d, b) = setup(&g);
        assert_eq!(d.face_count(), 2);
        for a in 0..3 {
            assert_eq!(d.signature(a), 1);
            assert!(!d.is_loop(a));
            let row = b.row(a);
            assert_eq!(row[0] + row[1], 0);
            assert_eq!(row[0].abs(), 1);
            assert_eq!(face_sign(&f, a, 0) as i64, row[0]);
        }
    }

    #[test]
    fn projective_dual() {
        let g = families::projective_loop().unwrap();
        let (f, d, b) = setup(&g);
        assert_eq!(d.face_count(), 1);
        assert!(d.is_loop(0));
        assert_eq!(d.signature(0), -1);
        assert_eq!(b.get(0, 0).abs(), 2);
        assert_eq!(face_sign(&f, 0, 0) as i64, b.get(0, 0).signum());
    }

    #[test]
    fn torus_bouquet_dual_and_zero_boundary() {
        let g = families::torus_bouquet().unwrap();
        let (f, d, b) = setup(&g);
        assert_eq!(d.face_count(), 1);
        assert!(d.is_loop(0) && d.is_loop(1));
        assert_eq!(b.to_rows(), vec![vec![0], vec![0]]);
        assert_eq!(face_sign(&f, 0, 0), 0);
    }

    #[test]
    fn xi_basics() {
        let g = families::sphere_cycle(3).unwrap();
        let (_, d, _) = setup(&g);
        assert_eq!(xi(&d, &DualWalk::empty(0)), vec![0, 0, 0]);
        let dart = d.rotation(0)[0];
        let walk = DualWalk {
            start: 0,
            steps: vec![dart],
        };
        walk.validate(&d).unwrap();
        let v = xi(&d, &walk);
        assert_eq!(v.iter().map(|x| x.abs()).sum::<i64>(), 1);
        assert_eq!(v[dart.arc].abs(), 1);
        let bad = DualWalk {
            start: 1,
            steps: vec![dart],
        };
        assert!(bad.validate(&d).is_err());
    }

    #[test]
    fn orientable_duals_are_all_positive() {
        for g in [
            families::sphere_cycle(5).unwrap(),
            families::torus_grid(3, 3).unwrap(),
            families::torus_bouquet().unwrap(),
        ] {
            let (_, d, _) = setup(&g);
            assert!((0..d.arc_count()).all(|a| d.signature(a) == 1));
        }
        let g = families::klein_grid(2, 2).unwrap();
        let (_, d, _) = setup(&g);
        assert!((0..d.arc_count()).any(|a| d.signature(a) == -1));
    }

    #[test]
    fn dual_instance_round_trip() {
        for g in [
            families::sphere_cycle(4).unwrap(),
            families::torus_grid(2, 3).unwrap(),
            families::klein_grid(3, 2).unwrap(),
        ] {
            let (f, d, _) = setup(&g);
            let inst = d.to_instance(&g).unwrap();
            let ff = trace_facial_walks(&inst);
            assert_eq!(ff.len(), g.node_count());
            assert_eq!(inst.node_count(), f.len());
        }
    }
}
