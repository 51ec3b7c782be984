//! Small named embeddings covering the sphere, torus, projective plane and
//! Klein bottle, plus random embedding schemes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{Dart, EmbeddedDigraph};
use crate::error::{Error, Result};
use crate::rational::{from_int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    SphereCycle { n: usize },
    TorusBouquet,
    TorusGrid { m: usize, n: usize },
    ProjectiveLoop,
    KleinBouquet,
    KleinGrid { m: usize, n: usize },
    RandomScheme { n: usize, m: usize, seed: u64 },
}

impl Family {
    pub const NAMES: [&'static str; 7] = [
        "sphere_cycle",
        "torus_bouquet",
        "torus_grid",
        "projective_loop",
        "klein_bouquet",
        "klein_grid",
        "random_scheme",
    ];

    pub fn parse(name: &str, params: &[u64]) -> Result<Self> {
        let want = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::BadParams(format!(
                    "{name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let family = match name {
            "sphere_cycle" => {
                want(1)?;
                Family::SphereCycle {
                    n: params[0] as usize,
                }
            }
            "torus_bouquet" => {
                want(0)?;
                Family::TorusBouquet
            }
            "torus_grid" => {
                want(2)?;
                Family::TorusGrid {
                    m: params[0] as usize,
                    n: params[1] as usize,
                }
            }
            "projective_loop" => {
                want(0)?;
                Family::ProjectiveLoop
            }
            "klein_bouquet" => {
                want(0)?;
                Family::KleinBouquet
            }
            "klein_grid" => {
                want(2)?;
                Family::KleinGrid {
                    m: params[0] as usize,
                    n: params[1] as usize,
                }
            }
            "random_scheme" => {
                want(3)?;
                Family::RandomScheme {
                    n: params[0] as usize,
                    m: params[1] as usize,
                    seed: params[2],
                }
            }
            other => return Err(Error::BadParams(format!("unknown family {other:?}"))),
        };
        Ok(family)
    }

    pub fn build(self) -> Result<EmbeddedDigraph> {
        match self {
            Family::SphereCycle { n } => sphere_cycle(n),
            Family::TorusBouquet => torus_bouquet(),
            Family::TorusGrid { m, n } => torus_grid(m, n),
            Family::ProjectiveLoop => projective_loop(),
            Family::KleinBouquet => klein_bouquet(),
            Family::KleinGrid { m, n } => klein_grid(m, n),
            Family::RandomScheme { n, m, seed } => random_scheme(n, m, seed),
        }
    }
}

pub fn gen_family(name: &str, params: &[u64]) -> Result<EmbeddedDigraph> {
    Family::parse(name, params)?.build()
}

fn unit_costs(k: usize) -> Vec<Rational> {
    vec![from_int(1); k]
}

/// Directed cycle `0 -> 1 -> ... -> n-1 -> 0` on the sphere.
pub fn sphere_cycle(n: usize) -> Result<EmbeddedDigraph> {
    if n < 1 {
        return Err(Error::BadParams("sphere_cycle needs n >= 1".into()));
    }
    let arcs: Vec<_> = (0..n)
        .zip(unit_costs(n))
        .map(|(i, c)| (i, (i + 1) % n, c))
        .collect();
    // arc i leaves node i, arc i-1 enters it
    let rotation = (0..n)
        .map(|v| vec![Dart::tail(v), Dart::head((v + n - 1) % n)])
        .collect();
    EmbeddedDigraph::from_indices(n, arcs, rotation, vec![1; n])
}

/// One node with loops `a`, `b` and rotation `a+ b+ a- b-`.
pub fn torus_bouquet() -> Result<EmbeddedDigraph> {
    EmbeddedDigraph::from_indices(
        1,
        vec![(0, 0, from_int(1)), (0, 0, from_int(1))],
        vec![vec![
            Dart::tail(0),
            Dart::tail(1),
            Dart::head(0),
            Dart::head(1),
        ]],
        vec![1, 1],
    )
}

/// One node with a single negative loop.
pub fn projective_loop() -> Result<EmbeddedDigraph> {
    EmbeddedDigraph::from_indices(
        1,
        vec![(0, 0, from_int(1))],
        vec![vec![Dart::tail(0), Dart::head(0)]],
        vec![-1],
    )
}

/// One node with two negative loops and rotation `a+ a- b+ b-`.
pub fn klein_bouquet() -> Result<EmbeddedDigraph> {
    EmbeddedDigraph::from_indices(
        1,
        vec![(0, 0, from_int(1)), (0, 0, from_int(1))],
        vec![vec![
            Dart::tail(0),
            Dart::head(0),
            Dart::tail(1),
            Dart::head(1),
        ]],
        vec![-1, -1],
    )
}

/// `m x n` grid with rightward and downward arcs wrapping around; `flip`
/// glues the last row to the first with a reflection and negative signature.
fn grid(m: usize, n: usize, flip: bool) -> Result<EmbeddedDigraph> {
    if m < 1 || n < 1 {
        return Err(Error::BadParams("grid dimensions must be positive".into()));
    }
    let node = |i: usize, j: usize| i * n + j;
    // arc 2*node(i,j) goes right, arc 2*node(i,j)+1 goes down
    let right = |i: usize, j: usize| 2 * node(i, j);
    let down = |i: usize, j: usize| 2 * node(i, j) + 1;
    let mut arcs = Vec::with_capacity(2 * m * n);
    let mut signature = Vec::with_capacity(2 * m * n);
    // where the down arc entering each node comes from
    let mut from_above = vec![usize::MAX; m * n];
    for i in 0..m {
        for j in 0..n {
            arcs.push((node(i, j), node(i, (j + 1) % n), from_int(1)));
            signature.push(1);
            let (ti, tj, s) = if i + 1 < m {
                (i + 1, j, 1)
            } else if flip {
                (0, n - 1 - j, -1)
            } else {
                (0, j, 1)
            };
            arcs.push((node(i, j), node(ti, tj), from_int(1)));
            signature.push(s);
            from_above[node(ti, tj)] = down(i, j);
        }
    }
    let mut rotation = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            // counter-clockwise: east, north, west, south
            rotation.push(vec![
                Dart::tail(right(i, j)),
                Dart::head(from_above[node(i, j)]),
                Dart::head(right(i, (j + n - 1) % n)),
                Dart::tail(down(i, j)),
            ]);
        }
    }
    EmbeddedDigraph::from_indices(m * n, arcs, rotation, signature)
}

pub fn torus_grid(m: usize, n: usize) -> Result<EmbeddedDigraph> {
    grid(m, n, false)
}

pub fn klein_grid(m: usize, n: usize) -> Result<EmbeddedDigraph> {
    grid(m, n, true)
}

/// How [`random_scheme_with`] assigns signatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureMode {
    Random,
    AllPositive,
    AllNegative,
}

/// Random connected multigraph (loops and parallel arcs allowed) with random
/// rotations, random signatures, random arc directions and costs in `1..=3`.
pub fn random_scheme(n: usize, m: usize, seed: u64) -> Result<EmbeddedDigraph> {
    random_scheme_with(n, m, seed, SignatureMode::Random, 3)
}

pub fn random_scheme_with(
    n: usize,
    m: usize,
    seed: u64,
    mode: SignatureMode,
    max_cost: u32,
) -> Result<EmbeddedDigraph> {
    if n < 1 || m + 1 < n || max_cost < 1 {
        return Err(Error::BadParams(format!(
            "random_scheme needs n >= 1, m >= n - 1 and max_cost >= 1 (got n={n}, m={m})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ends = Vec::with_capacity(m);
    for v in 1..n {
        ends.push((rng.gen_range(0..v), v));
    }
    while ends.len() < m {
        ends.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    let mut arcs = Vec::with_capacity(m);
    let mut rotation = vec![Vec::new(); n];
    let mut signature = Vec::with_capacity(m);
    for (a, (u, v)) in ends.into_iter().enumerate() {
        let (t, h) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
        arcs.push((t, h, from_int(rng.gen_range(1..=max_cost) as i64)));
        rotation[t].push(Dart::tail(a));
        rotation[h].push(Dart::head(a));
        signature.push(match mode {
            SignatureMode::Random => {
                if rng.gen_bool(0.5) {
                    1
                } else {
                    -1
                }
            }
            SignatureMode::AllPositive => 1,
            SignatureMode::AllNegative => -1,
        });
    }
    for darts in &mut rotation {
        darts.shuffle(&mut rng);
    }
    EmbeddedDigraph::from_indices(n, arcs, rotation, signature)
}
