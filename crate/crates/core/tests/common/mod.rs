//! Instance generators and independent reference computations shared by the
//! integration and acceptance tests.

#![allow(dead_code)]

use homcirc::embedding::{characteristic_flow, trace_facial_walks, Dart, EmbeddedDigraph};
use homcirc::rational::{from_int, Rational};
use homcirc::Surface;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Sphere,
    Torus,
    Projective,
    Klein,
    /// Non-orientable, Euler genus 3.
    Dyck,
}

impl Kind {
    pub fn genus(self) -> usize {
        match self {
            Kind::Sphere => 0,
            Kind::Projective => 1,
            Kind::Torus | Kind::Klein => 2,
            Kind::Dyck => 3,
        }
    }

    pub fn orientable(self) -> bool {
        matches!(self, Kind::Sphere | Kind::Torus)
    }
}

/// Mutable copy of an embedding's data.
#[derive(Debug, Clone)]
pub struct Parts {
    pub nodes: usize,
    pub arcs: Vec<(usize, usize, Rational)>,
    pub rotation: Vec<Vec<Dart>>,
    pub signature: Vec<i8>,
}

impl Parts {
    pub fn of(g: &EmbeddedDigraph) -> Self {
        Parts {
            nodes: g.node_count(),
            arcs: g
                .arcs()
                .iter()
                .map(|a| (a.tail, a.head, a.cost.clone()))
                .collect(),
            rotation: (0..g.node_count())
                .map(|v| g.rotation(v).to_vec())
                .collect(),
            signature: g.signatures().to_vec(),
        }
    }

    pub fn build(&self) -> EmbeddedDigraph {
        EmbeddedDigraph::from_indices(
            self.nodes,
            self.arcs.clone(),
            self.rotation.clone(),
            self.signature.clone(),
        )
        .expect("generated embedding is valid")
    }
}

/// One node carrying loops whose rotation is the standard surface word.
pub fn base(kind: Kind) -> EmbeddedDigraph {
    let (loops, word, sig): (usize, Vec<Dart>, Vec<i8>) = match kind {
        Kind::Sphere => (1, vec![Dart::tail(0), Dart::head(0)], vec![1]),
        // a b a⁻¹ b⁻¹
        Kind::Torus => (
            2,
            vec![Dart::tail(0), Dart::tail(1), Dart::head(0), Dart::head(1)],
            vec![1, 1],
        ),
        Kind::Projective => (1, vec![Dart::tail(0), Dart::head(0)], vec![-1]),
        Kind::Klein => (
            2,
            vec![Dart::tail(0), Dart::head(0), Dart::tail(1), Dart::head(1)],
            vec![-1, -1],
        ),
        Kind::Dyck => (
            3,
            vec![
                Dart::tail(0),
                Dart::head(0),
                Dart::tail(1),
                Dart::head(1),
                Dart::tail(2),
                Dart::head(2),
            ],
            vec![-1, -1, -1],
        ),
    };
    let arcs = (0..loops).map(|_| (0, 0, from_int(1))).collect();
    EmbeddedDigraph::from_indices(1, arcs, vec![word], sig).unwrap()
}

fn surface_of(p: &Parts) -> (usize, bool) {
    let g = p.build();
    let s = Surface::analyse(&g).unwrap();
    (s.genus, s.orientable)
}

pub fn random_cost(rng: &mut ChaCha8Rng) -> Rational {
    let choices = [(1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];
    let (n, d) = choices[rng.gen_range(0..choices.len())];
    Rational::new(n.into(), d.into())
}

/// Grows `start` to `arcs` arcs and at most `max_nodes` nodes by pendant
/// arcs, subdivisions and chords inside faces; none of these changes the
/// surface. Arc directions, costs and rotations are randomised.
pub fn grow(
    start: &EmbeddedDigraph,
    arcs: usize,
    max_nodes: usize,
    rng: &mut ChaCha8Rng,
) -> EmbeddedDigraph {
    let mut p = Parts::of(start);
    let surface = surface_of(&p);
    for a in 0..p.arcs.len() {
        p.arcs[a].2 = random_cost(rng);
    }
    while p.arcs.len() < arcs {
        let op = rng.gen_range(0..10);
        let a = p.arcs.len();
        if op < 2 && p.nodes < max_nodes {
            // pendant arc
            let u = rng.gen_range(0..p.nodes);
            let w = p.nodes;
            p.nodes += 1;
            let (t, h, du, dw) = if rng.gen_bool(0.5) {
                (u, w, Dart::tail(a), Dart::head(a))
            } else {
                (w, u, Dart::head(a), Dart::tail(a))
            };
            p.arcs.push((t, h, random_cost(rng)));
            let pos = rng.gen_range(0..=p.rotation[u].len());
            p.rotation[u].insert(pos, du);
            p.rotation.push(vec![dw]);
            p.signature.push(if rng.gen_bool(0.5) { 1 } else { -1 });
        } else if op < 4 && p.nodes < max_nodes {
            // subdivide arc b into b (tail side) and a (head side)
            let b = rng.gen_range(0..a);
            let (t, h, _) = p.arcs[b].clone();
            let w = p.nodes;
            p.nodes += 1;
            p.arcs[b].1 = w;
            let at_h = p.rotation[h]
                .iter()
                .position(|&d| d == Dart::head(b))
                .unwrap();
            let forward = rng.gen_bool(0.5);
            if forward {
                p.arcs.push((w, h, random_cost(rng)));
                p.rotation[h][at_h] = Dart::head(a);
                p.rotation.push(vec![Dart::head(b), Dart::tail(a)]);
            } else {
                p.arcs.push((h, w, random_cost(rng)));
                p.rotation[h][at_h] = Dart::tail(a);
                p.rotation.push(vec![Dart::head(b), Dart::head(a)]);
            }
            // the new arc inherits nothing; keep the twist on b
            p.signature.push(1);
            let _ = t;
        } else {
            // chord: accept only if the surface is unchanged
            let u = rng.gen_range(0..p.nodes);
            let v = rng.gen_range(0..p.nodes);
            let mut q = p.clone();
            q.arcs.push((u, v, random_cost(rng)));
            let pu = rng.gen_range(0..=q.rotation[u].len());
            q.rotation[u].insert(pu, Dart::tail(a));
            let pv = rng.gen_range(0..=q.rotation[v].len());
            q.rotation[v].insert(pv, Dart::head(a));
            let mut signs = [1i8, -1];
            signs.shuffle(rng);
            for s in signs {
                let mut r = q.clone();
                r.signature.push(s);
                if surface_of(&r) == surface {
                    p = r;
                    break;
                }
            }
        }
    }
    let g = p.build();
    assert_eq!(surface_of(&Parts::of(&g)), surface);
    g
}

pub fn random_on(
    kind: Kind,
    arcs: usize,
    max_nodes: usize,
    rng: &mut ChaCha8Rng,
) -> EmbeddedDigraph {
    grow(&base(kind), arcs, max_nodes, rng)
}

/// Fundamental cycles of a BFS tree of the underlying graph, as signed arc
/// vectors (a basis of the integer circulation space).
pub fn cycle_basis(g: &EmbeddedDigraph) -> Vec<Vec<i64>> {
    let n = g.node_count();
    let m = g.arc_count();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; m];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for (a, arc) in g.arcs().iter().enumerate() {
            let other = if arc.tail == u {
                arc.head
            } else if arc.head == u {
                arc.tail
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                parent[other] = Some((u, a));
                in_tree[a] = true;
                queue.push_back(other);
            }
        }
    }
    // signed path from the root to v, as a flow pushing one unit root -> v
    let path = |mut v: usize| {
        let mut f = vec![0i64; m];
        while let Some((u, a)) = parent[v] {
            f[a] += if g.arc(a).head == v { 1 } else { -1 };
            v = u;
        }
        f
    };
    let mut basis = Vec::new();
    for a in 0..m {
        if in_tree[a] {
            continue;
        }
        let arc = g.arc(a);
        // root -> tail, arc, head -> root
        let mut f = path(arc.tail);
        for (x, y) in f.iter_mut().zip(path(arc.head)) {
            *x -= y;
        }
        f[a] += 1;
        basis.push(f);
    }
    basis
}

pub fn random_circulation(
    basis: &[Vec<i64>],
    m: usize,
    range: i64,
    rng: &mut ChaCha8Rng,
) -> Vec<i64> {
    let mut z = vec![0i64; m];
    for c in basis {
        let k = rng.gen_range(-range..=range);
        for (x, v) in z.iter_mut().zip(c) {
            *x += k * v;
        }
    }
    z
}

/// A directed closed walk found by a random walk along out-arcs, if any.
pub fn random_directed_cycle(g: &EmbeddedDigraph, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); g.node_count()];
    for (a, arc) in g.arcs().iter().enumerate() {
        out[arc.tail].push(a);
    }
    for _ in 0..20 {
        let mut v = rng.gen_range(0..g.node_count());
        let mut seen_at = vec![usize::MAX; g.node_count()];
        let mut arcs: Vec<usize> = Vec::new();
        loop {
            if seen_at[v] != usize::MAX {
                return Some(arcs[seen_at[v]..].to_vec());
            }
            seen_at[v] = arcs.len();
            let Some(&a) = out[v].choose(rng) else { break };
            arcs.push(a);
            v = g.arc(a).head;
        }
    }
    None
}

/// Boundary matrix recomputed from the facial walks, row per arc.
pub fn boundary_rows(g: &EmbeddedDigraph) -> Vec<Vec<i64>> {
    let faces = trace_facial_walks(g);
    let cols: Vec<Vec<i64>> = faces
        .walks
        .iter()
        .map(|w| characteristic_flow(g, w))
        .collect();
    (0..g.arc_count())
        .map(|a| cols.iter().map(|c| c[a]).collect())
        .collect()
}

pub fn mat_vec(rows: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    rows.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn cost(g: &EmbeddedDigraph, x: &[i64]) -> Rational {
    g.arcs()
        .iter()
        .zip(x)
        .fold(from_int(0), |acc, (a, &v)| acc + &a.cost * from_int(v))
}

/// Planted instance: `y = x* - ∂η*` with `x* ≥ 0` a sum of directed closed
/// walks and `η*` in `{-1, 0, 1}^F`.
pub struct Planted {
    pub graph: EmbeddedDigraph,
    pub y: Vec<i64>,
    pub x_star: Vec<i64>,
}

pub fn planted(graph: EmbeddedDigraph, rng: &mut ChaCha8Rng) -> Planted {
    let m = graph.arc_count();
    let mut x_star = vec![0i64; m];
    for _ in 0..rng.gen_range(0..=3) {
        if let Some(c) = random_directed_cycle(&graph, rng) {
            for a in c {
                x_star[a] += 1;
            }
        }
    }
    let rows = boundary_rows(&graph);
    let faces = rows.first().map_or(0, |r| r.len());
    let eta: Vec<i64> = (0..faces).map(|_| rng.gen_range(-1..=1)).collect();
    let d = mat_vec(&rows, &eta);
    let y = x_star.iter().zip(&d).map(|(a, b)| a - b).collect();
    Planted { graph, y, x_star }
}
