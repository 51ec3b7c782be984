//! Homology bases and ℤ-homology tests for circulations.
//!
//! Orientable surfaces: `x` and `y` are homologous iff `⟨x - y, ξ(C_i)⟩ = 0`
//! for the `g` dual cycles `C_i` closed by the arcs outside a primal tree `K`
//! and a dual tree `T*` avoiding `K*`.
//!
//! Non-orientable surfaces: a dual 1-tree `T*` whose cycle `C*` is one-sided
//! and `g - 1` two-sided dual closed walks `W*_i` give the conditions
//! `w_iᵀ(x - y) = 0` and `hᵀ(x - y) ≡ 0 (mod 2)` with `w_i = ξ(W*_i)` and `h`
//! the indicator of the arcs crossed by `C*`.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dual::{dot, xi, DualDart, DualGraph, DualWalk};
use crate::embedding::{check_circulation, EmbeddedDigraph};
use crate::error::{Error, Result};
use crate::linalg::{determinant, solve_square};
use crate::rational::{from_int, Rational};
use crate::tree::{EdgeRef, Hop, SpanningTree};
use crate::Surface;

#[derive(Debug, Clone)]
pub struct OrientableBasis {
    /// Arcs of the primal spanning tree `K`.
    pub primal_tree: Vec<usize>,
    /// Arcs whose duals form the spanning tree `T*` of the dual.
    pub dual_tree: Vec<usize>,
    /// The `g` arcs in neither tree.
    pub extra: Vec<usize>,
    pub cycles: Vec<DualWalk>,
    pub vectors: Vec<Vec<i64>>,
    k: SpanningTree,
    t: SpanningTree,
}

#[derive(Debug, Clone)]
pub struct NonOrientableBasis {
    /// The one-sided dual cycle `C*`.
    pub one_sided: DualWalk,
    /// Arcs crossed by `C*`, in walk order.
    pub cycle_arcs: Vec<usize>,
    /// Faces visited by `C*`, in walk order.
    pub cycle_faces: Vec<usize>,
    /// Arcs of the 1-tree `T*` (spanning tree plus the closing arc of `C*`).
    pub dual_tree: Vec<usize>,
    /// Arcs of the primal spanning tree `K` avoiding the arcs of `T*`.
    pub primal_tree: Vec<usize>,
    /// The `g - 1` arcs outside `K` and `T*`.
    pub extra: Vec<usize>,
    pub walks: Vec<DualWalk>,
    pub vectors: Vec<Vec<i64>>,
    pub parity: Vec<u8>,
    s: SpanningTree,
}

#[derive(Debug, Clone)]
pub enum Basis {
    Orientable(OrientableBasis),
    NonOrientable(NonOrientableBasis),
}

/// Result of solving `∂η = z` through the one-sided cycle block.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaRecovery {
    pub eta: Vec<Rational>,
    pub integral: bool,
    /// `Σ_{a ∈ C} z(a)` is even.
    pub parity_even: bool,
    /// `∂η = z` holds on every arc, not only on the tree arcs.
    pub exact: bool,
}

fn rng_for(seed: Option<u64>) -> Option<ChaCha8Rng> {
    seed.map(ChaCha8Rng::seed_from_u64)
}

fn walk_from_hops(dual: &DualGraph, start: usize, hops: &[Hop]) -> DualWalk {
    DualWalk {
        start,
        steps: hops.iter().map(|h| dual.dart_for_hop(*h)).collect(),
    }
}

/// Closed dual walk: cross `arc` from its first face, return along `tree`.
fn fundamental_dual_cycle(dual: &DualGraph, tree: &SpanningTree, arc: usize) -> DualWalk {
    let first = DualDart { arc, side: 0 };
    let (u, v) = (dual.face_of(first), dual.target(first));
    let mut walk = DualWalk {
        start: u,
        steps: vec![first],
    };
    walk.steps
        .extend(tree.path(v, u).into_iter().map(|h| dual.dart_for_hop(h)));
    walk
}

fn members(flags: &[bool]) -> Vec<usize> {
    flags
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| f.then_some(i))
        .collect()
}

impl OrientableBasis {
    pub fn build(graph: &EmbeddedDigraph, surface: &Surface, seed: Option<u64>) -> Result<Self> {
        if !surface.orientable {
            return Err(Error::NotOrientable);
        }
        let mut rng = rng_for(seed);
        let k = SpanningTree::bfs(
            graph.node_count(),
            &graph.edge_refs(),
            |_| true,
            0,
            rng.as_mut(),
        );
        let dual = &surface.dual;
        let t = SpanningTree::bfs(
            dual.face_count(),
            &dual.edge_refs(),
            |a| !k.contains_edge(a),
            0,
            rng.as_mut(),
        );
        if !t.spans() {
            return Err(Error::InternalInconsistency(
                "dual graph minus the primal tree is disconnected".into(),
            ));
        }
        let arcs = graph.arc_count();
        let extra: Vec<usize> = (0..arcs)
            .filter(|&a| !k.contains_edge(a) && !t.contains_edge(a))
            .collect();
        if extra.len() != surface.genus {
            return Err(Error::InternalInconsistency(format!(
                "{} arcs outside both trees, expected {}",
                extra.len(),
                surface.genus
            )));
        }
        let cycles: Vec<DualWalk> = extra
            .iter()
            .map(|&a| fundamental_dual_cycle(dual, &t, a))
            .collect();
        let vectors = cycles.iter().map(|c| xi(dual, c)).collect();
        Ok(OrientableBasis {
            primal_tree: (0..arcs).filter(|&a| k.contains_edge(a)).collect(),
            dual_tree: (0..arcs).filter(|&a| t.contains_edge(a)).collect(),
            extra,
            cycles,
            vectors,
            k,
            t,
        })
    }

    /// Characteristic flow of the primal fundamental cycle of `extra[i]` in `K`.
    pub fn primal_cycle(&self, graph: &EmbeddedDigraph, i: usize) -> Vec<i64> {
        let a = self.extra[i];
        let arc = graph.arc(a);
        let mut flow = vec![0i64; graph.arc_count()];
        flow[a] += 1;
        for hop in self.k.path(arc.head, arc.tail) {
            let forward =
                graph.arc(hop.edge).tail == hop.from && graph.arc(hop.edge).head == hop.to;
            flow[hop.edge] += if forward { 1 } else { -1 };
        }
        flow
    }

    /// Integer `η` with `∂η = z`, anchored at face 0, if one exists.
    pub fn witness(&self, surface: &Surface, z: &[i64]) -> Option<Vec<i64>> {
        let b = &surface.boundary;
        let mut eta = vec![0i64; surface.dual.face_count()];
        for &f in &self.t.order {
            let Some(hop) = self.t.parent[f] else {
                continue;
            };
            let (a, h) = (hop.edge, hop.from);
            let coeff = b.get(a, f);
            let rest = z[a] - b.get(a, h) * eta[h];
            if coeff == 0 || rest % coeff != 0 {
                return None;
            }
            eta[f] = rest / coeff;
        }
        (b.apply(&eta) == z).then_some(eta)
    }
}

/// A one-sided closed dual walk: a BFS tree plus the first non-tree edge
/// whose switched sign is negative.
pub fn find_one_sided_cycle(surface: &Surface, seed: Option<u64>) -> Result<DualWalk> {
    let mut rng = rng_for(seed);
    let (_, walk, _) = one_sided_parts(&surface.dual, rng.as_mut())?;
    Ok(walk)
}

fn one_sided_parts(
    dual: &DualGraph,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<(SpanningTree, DualWalk, usize)> {
    let edges = dual.edge_refs();
    let s = SpanningTree::bfs(dual.face_count(), &edges, |_| true, 0, rng);
    let e: EdgeRef = s
        .first_one_sided(&edges, |a| dual.signature(a))
        .ok_or(Error::OrientableInput)?;
    let walk = fundamental_dual_cycle(dual, &s, e.id);
    Ok((s, walk, e.id))
}

impl NonOrientableBasis {
    pub fn build(graph: &EmbeddedDigraph, surface: &Surface, seed: Option<u64>) -> Result<Self> {
        if surface.orientable {
            return Err(Error::OrientableInput);
        }
        let dual = &surface.dual;
        let arcs = graph.arc_count();
        let mut rng = rng_for(seed);
        let (s, one_sided, closing) = one_sided_parts(dual, rng.as_mut())?;

        let mut in_t: Vec<bool> = (0..arcs).map(|a| s.contains_edge(a)).collect();
        in_t[closing] = true;
        let k = SpanningTree::bfs(
            graph.node_count(),
            &graph.edge_refs(),
            |a| !in_t[a],
            0,
            rng.as_mut(),
        );
        if !k.spans() {
            return Err(Error::InternalInconsistency(
                "primal graph minus the dual 1-tree is disconnected".into(),
            ));
        }
        let extra: Vec<usize> = (0..arcs)
            .filter(|&a| !in_t[a] && !k.contains_edge(a))
            .collect();
        if extra.len() + 1 != surface.genus {
            return Err(Error::InternalInconsistency(format!(
                "{} arcs outside both trees, expected {}",
                extra.len(),
                surface.genus - 1
            )));
        }

        let cycle_arcs: Vec<usize> = one_sided.steps.iter().map(|d| d.arc).collect();
        let mut cycle_faces = one_sided.faces(dual);
        cycle_faces.pop();
        let walks: Vec<DualWalk> = extra
            .iter()
            .map(|&b| two_sided_walk(dual, &s, &one_sided, closing, b))
            .collect::<Result<_>>()?;
        let vectors: Vec<Vec<i64>> = walks.iter().map(|w| xi(dual, w)).collect();
        let mut parity = vec![0u8; arcs];
        for &a in &cycle_arcs {
            parity[a] = 1;
        }
        let basis = NonOrientableBasis {
            one_sided,
            cycle_arcs,
            cycle_faces,
            dual_tree: members(&in_t),
            primal_tree: (0..arcs).filter(|&a| k.contains_edge(a)).collect(),
            extra,
            walks,
            vectors,
            parity,
            s,
        };
        let det = determinant(&basis.cycle_block(surface));
        if det.abs() != BigInt::from(2) {
            return Err(Error::InternalInconsistency(format!(
                "one-sided cycle block has determinant {det}"
            )));
        }
        Ok(basis)
    }

    /// `∂_C`: rows are the arcs of `C*`, columns its faces, both in walk order.
    pub fn cycle_block(&self, surface: &Surface) -> Vec<Vec<i64>> {
        surface
            .boundary
            .submatrix(&self.cycle_arcs, &self.cycle_faces)
    }

    /// Solves `∂_C η_C = z_C` exactly and extends along the tree arcs of `T*`.
    pub fn recover_eta(&self, surface: &Surface, z: &[i64]) -> EtaRecovery {
        let b = &surface.boundary;
        let faces = surface.dual.face_count();
        let rhs: Vec<Rational> = self.cycle_arcs.iter().map(|&a| from_int(z[a])).collect();
        let block = self.cycle_block(surface);
        let eta_c = solve_square(&block, &rhs).expect("the cycle block is non-singular");
        let mut eta: Vec<Option<Rational>> = vec![None; faces];
        let mut queue = VecDeque::new();
        for (&f, v) in self.cycle_faces.iter().zip(eta_c) {
            eta[f] = Some(v);
            queue.push_back(f);
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); faces];
        for (f, p) in self.s.parent.iter().enumerate() {
            if let Some(h) = p {
                adj[h.from].push((h.edge, f));
                adj[f].push((h.edge, h.from));
            }
        }
        while let Some(h) = queue.pop_front() {
            for &(a, g) in &adj[h] {
                if eta[g].is_some() {
                    continue;
                }
                let known = eta[h].clone().expect("queued faces are known");
                let rest = from_int(z[a]) - from_int(b.get(a, h)) * known;
                eta[g] = Some(rest / from_int(b.get(a, g)));
                queue.push_back(g);
            }
        }
        let eta: Vec<Rational> = eta
            .into_iter()
            .map(|v| v.expect("T* spans the dual"))
            .collect();
        let integral = eta.iter().all(|v| v.is_integer());
        let sum: i64 = self.cycle_arcs.iter().map(|&a| z[a]).sum();
        let exact = b
            .apply_rational(&eta)
            .iter()
            .zip(z)
            .all(|(l, &r)| *l == from_int(r));
        EtaRecovery {
            eta,
            integral,
            parity_even: sum % 2 == 0,
            exact,
        }
    }

    /// The `g - 1` equations `⟨z, w_i⟩ = 0` hold.
    pub fn equations_hold(&self, z: &[i64]) -> bool {
        self.vectors.iter().all(|w| dot(w, z) == 0)
    }
}

/// Two-sided closed dual walk through `b*` inside `T* ∪ {b*}`.
fn two_sided_walk(
    dual: &DualGraph,
    s: &SpanningTree,
    one_sided: &DualWalk,
    closing: usize,
    b: usize,
) -> Result<DualWalk> {
    let z = fundamental_dual_cycle(dual, s, b);
    if z.is_two_sided(dual) {
        return Ok(z);
    }
    let c_arcs: Vec<usize> = one_sided.steps.iter().map(|d| d.arc).collect();
    if let Some(shared) = z.steps.iter().map(|d| d.arc).find(|a| c_arcs.contains(a)) {
        // The remaining cycle of T* ∪ {b*} avoids the shared arc.
        let edges = dual.edge_refs();
        let alt = SpanningTree::bfs(
            dual.face_count(),
            &edges,
            |a| a != shared && (s.contains_edge(a) || a == closing),
            0,
            None,
        );
        if !alt.spans() {
            return Err(Error::InternalInconsistency(
                "1-tree minus a cycle arc is disconnected".into(),
            ));
        }
        let w = fundamental_dual_cycle(dual, &alt, b);
        if !w.is_two_sided(dual) {
            return Err(Error::InternalInconsistency(
                "expected a two-sided cycle".into(),
            ));
        }
        return Ok(w);
    }

    // C* · P · Z_b · P⁻¹ with P the shortest tree path from C* to Z_b.
    let c_faces = one_sided.faces(dual);
    let z_faces = z.faces(dual);
    let faces = dual.face_count();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); faces];
    for (f, p) in s.parent.iter().enumerate() {
        if let Some(h) = p {
            adj[h.from].push((h.edge, f));
            adj[f].push((h.edge, h.from));
        }
    }
    let mut back: Vec<Option<Hop>> = vec![None; faces];
    let mut seen = vec![false; faces];
    let mut queue = VecDeque::new();
    for &f in &c_faces {
        if !seen[f] {
            seen[f] = true;
            queue.push_back(f);
        }
    }
    let mut meet = None;
    while let Some(u) = queue.pop_front() {
        if z_faces.contains(&u) {
            meet = Some(u);
            break;
        }
        for &(a, w) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                back[w] = Some(Hop {
                    edge: a,
                    from: u,
                    to: w,
                });
                queue.push_back(w);
            }
        }
    }
    let meet =
        meet.ok_or_else(|| Error::InternalInconsistency("dual tree is disconnected".into()))?;
    let mut hops = Vec::new();
    let mut at = meet;
    while let Some(h) = back[at] {
        hops.push(h);
        at = h.from;
    }
    hops.reverse();
    let p_start = at;

    let c_pos = c_faces
        .iter()
        .position(|&f| f == p_start)
        .expect("path starts on C*");
    let c_rot = one_sided.rotated(dual, c_pos);
    let path = walk_from_hops(dual, p_start, &hops);
    let z_pos = z_faces
        .iter()
        .position(|&f| f == meet)
        .expect("path ends on Z_b");
    let z_rot = z.rotated(dual, z_pos);
    let back_path = path.reversed(dual);
    let w = c_rot.concat(&path).concat(&z_rot).concat(&back_path);
    debug_assert!(w.validate(dual).is_ok());
    if !w.is_two_sided(dual) || !w.is_closed(dual) {
        return Err(Error::InternalInconsistency(
            "concatenated walk is not two-sided".into(),
        ));
    }
    Ok(w)
}

impl Basis {
    pub fn build(graph: &EmbeddedDigraph, surface: &Surface, seed: Option<u64>) -> Result<Self> {
        if surface.orientable {
            OrientableBasis::build(graph, surface, seed).map(Basis::Orientable)
        } else {
            NonOrientableBasis::build(graph, surface, seed).map(Basis::NonOrientable)
        }
    }

    /// Rows `M` of the linear homology conditions.
    pub fn vectors(&self) -> &[Vec<i64>] {
        match self {
            Basis::Orientable(b) => &b.vectors,
            Basis::NonOrientable(b) => &b.vectors,
        }
    }

    /// Parity vector `h`; `None` on orientable surfaces.
    pub fn parity(&self) -> Option<&[u8]> {
        match self {
            Basis::Orientable(_) => None,
            Basis::NonOrientable(b) => Some(&b.parity),
        }
    }

    /// Decides whether `x - y` is an integer combination of facial circulations.
    pub fn check_homologous(&self, graph: &EmbeddedDigraph, x: &[i64], y: &[i64]) -> Result<bool> {
        for v in [x, y] {
            if v.len() != graph.arc_count() {
                return Err(Error::DimensionMismatch {
                    expected: graph.arc_count(),
                    got: v.len(),
                });
            }
            check_circulation(graph, v)?;
        }
        let z: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        Ok(self.is_null_homologous(&z))
    }

    pub(crate) fn is_null_homologous(&self, z: &[i64]) -> bool {
        let linear = self.vectors().iter().all(|w| dot(w, z) == 0);
        match self.parity() {
            None => linear,
            Some(h) => {
                let s: i64 = h.iter().zip(z).map(|(&p, &v)| p as i64 * v).sum();
                linear && s % 2 == 0
            }
        }
    }

    /// Integer `η` with `∂η = z`, if `z` is null-homologous.
    pub fn witness(&self, surface: &Surface, z: &[i64]) -> Option<Vec<i64>> {
        match self {
            Basis::Orientable(b) => b.witness(surface, z),
            Basis::NonOrientable(b) => {
                let r = b.recover_eta(surface, z);
                (r.integral && r.exact).then(|| {
                    r.eta
                        .iter()
                        .map(|v| {
                            let i = v.to_integer();
                            i64::try_from(i).expect("witness coefficient fits in i64")
                        })
                        .collect()
                })
            }
        }
    }
}
