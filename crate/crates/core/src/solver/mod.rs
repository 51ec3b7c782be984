//! Exact minimum-cost non-negative integer circulations homologous to `y`.
//!
//! Orientable surfaces: an exact LP over flow conservation plus the `g`
//! homology equations, whose optimal vertices are integral.
//!
//! Non-orientable surfaces: enumerate `Ω` by layered shortest paths, solve the
//! fixed-row integer program over its columns and glue the chosen walks.

pub mod fixed_row;
pub mod omega;

use std::time::Instant;

use num_traits::Zero;

use crate::embedding::{is_circulation, EmbeddedDigraph};
use crate::error::{Error, Result};
use crate::homology::{Basis, NonOrientableBasis, OrientableBasis};
use crate::lp::{minimise, LpOutcome};
use crate::rational::{dot_cost, from_int, Rational, ScaledCosts};
use crate::Surface;

pub use fixed_row::{
    default_radius, in_tube, irreducible_columns, solve_fixed_row_ip, Column, IpSolution,
};
pub use omega::{enumerate_omega, OmegaEntry, OmegaInput, OmegaMap, OmegaStats};

pub const DEFAULT_GENUS_CAP: usize = 4;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub witness: bool,
    pub tube_radius: Option<i64>,
    pub genus_cap: usize,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            witness: false,
            tube_radius: None,
            genus_cap: DEFAULT_GENUS_CAP,
            seed: None,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Infeasible => "Infeasible",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub elapsed_ms: u128,
    pub omega_size: Option<usize>,
    /// Columns left after dropping reducible ones.
    pub columns: Option<usize>,
    pub omega_states: Option<u64>,
    pub ip_states: Option<u64>,
    pub walk_bound: Option<i64>,
    pub tube_radius: Option<i64>,
    pub lp_rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub x: Option<Vec<i64>>,
    pub objective: Option<Rational>,
    pub witness: Option<Vec<i64>>,
    pub stats: SolveStats,
}

impl SolveResult {
    fn infeasible(stats: SolveStats) -> Self {
        SolveResult {
            status: SolveStatus::Infeasible,
            x: None,
            objective: None,
            witness: None,
            stats,
        }
    }
}

fn validate_y(graph: &EmbeddedDigraph, y: &[i64]) -> Result<()> {
    if y.len() != graph.arc_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.arc_count(),
            got: y.len(),
        });
    }
    if !is_circulation(graph, y) {
        return Err(Error::InvalidInput("y is not a circulation".into()));
    }
    Ok(())
}

/// Solves from scratch: analyses the surface and builds a basis first.
pub fn solve(graph: &EmbeddedDigraph, y: &[i64], options: &SolveOptions) -> Result<SolveResult> {
    validate_y(graph, y)?;
    let surface = Surface::analyse(graph)?;
    if !surface.orientable && surface.genus > options.genus_cap {
        return Err(Error::GenusCapExceeded {
            genus: surface.genus,
            cap: options.genus_cap,
        });
    }
    let basis = Basis::build(graph, &surface, options.seed)?;
    solve_with(graph, &surface, &basis, y, options)
}

pub fn solve_with(
    graph: &EmbeddedDigraph,
    surface: &Surface,
    basis: &Basis,
    y: &[i64],
    options: &SolveOptions,
) -> Result<SolveResult> {
    match basis {
        Basis::Orientable(b) => solve_orientable(graph, surface, b, y, options),
        Basis::NonOrientable(b) => solve_nonorientable(graph, surface, b, y, options),
    }
}

pub fn solve_orientable(
    graph: &EmbeddedDigraph,
    surface: &Surface,
    basis: &OrientableBasis,
    y: &[i64],
    options: &SolveOptions,
) -> Result<SolveResult> {
    validate_y(graph, y)?;
    let started = Instant::now();
    let n = graph.arc_count();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for v in 0..graph.node_count() {
        let mut row = vec![Rational::zero(); n];
        for (a, arc) in graph.arcs().iter().enumerate() {
            if arc.tail == arc.head {
                continue;
            }
            if arc.tail == v {
                row[a] += from_int(1);
            }
            if arc.head == v {
                row[a] -= from_int(1);
            }
        }
        rows.push(row);
        rhs.push(Rational::zero());
    }
    for w in &basis.vectors {
        rows.push(w.iter().map(|&v| from_int(v)).collect());
        rhs.push(from_int(crate::dual::dot(w, y)));
    }
    let costs = graph.costs();
    let mut stats = SolveStats {
        lp_rows: Some(rows.len()),
        ..SolveStats::default()
    };
    let outcome = minimise(&rows, &rhs, &costs);
    stats.elapsed_ms = started.elapsed().as_millis();
    let (x, value) = match outcome {
        LpOutcome::Optimal { x, value } => (x, value),
        LpOutcome::Infeasible => return Ok(SolveResult::infeasible(stats)),
        LpOutcome::Unbounded => {
            return Err(Error::InternalInconsistency(
                "LP unbounded despite non-negative costs".into(),
            ))
        }
    };
    if x.iter().any(|v| !v.is_integer()) {
        return Err(Error::NonIntegralVertex);
    }
    let x: Vec<i64> = x
        .iter()
        .map(|v| i64::try_from(v.to_integer()).expect("flow value fits in i64"))
        .collect();
    finish(
        graph,
        surface,
        &Basis::Orientable(basis.clone()),
        y,
        x,
        value,
        options,
        stats,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    graph: &EmbeddedDigraph,
    surface: &Surface,
    basis: &Basis,
    y: &[i64],
    x: Vec<i64>,
    objective: Rational,
    options: &SolveOptions,
    stats: SolveStats,
) -> Result<SolveResult> {
    let z: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    if x.iter().any(|&v| v < 0) || !is_circulation(graph, &x) || !basis.is_null_homologous(&z) {
        return Err(Error::InternalInconsistency(
            "solver produced an infeasible circulation".into(),
        ));
    }
    if dot_cost(&graph.costs(), &x) != objective {
        return Err(Error::InternalInconsistency(
            "objective does not match cᵀx".into(),
        ));
    }
    let witness = if options.witness {
        let eta = basis.witness(surface, &z).ok_or_else(|| {
            Error::InternalInconsistency("no integral witness for a homologous solution".into())
        })?;
        Some(eta)
    } else {
        None
    };
    Ok(SolveResult {
        status: SolveStatus::Optimal,
        x: Some(x),
        objective: Some(objective),
        witness,
        stats,
    })
}

/// `Ω` for the given basis, with costs in the scaled integer units of
/// `ScaledCosts::new(graph.costs())`.
pub fn compute_omega(
    graph: &EmbeddedDigraph,
    basis: &NonOrientableBasis,
    threads: Option<usize>,
) -> Result<(OmegaMap, OmegaStats, ScaledCosts)> {
    let scaled = ScaledCosts::new(&graph.costs())?;
    let input = OmegaInput {
        graph,
        costs: &scaled.scaled,
        rows: &basis.vectors,
        parity: &basis.parity,
        bound: walk_bound(graph),
    };
    let (omega, stats) = with_threads(threads, || enumerate_omega(&input))??;
    Ok((omega, stats, scaled))
}

/// `B = 2|V|`.
pub fn walk_bound(graph: &EmbeddedDigraph) -> i64 {
    2 * graph.node_count() as i64
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::BadParams(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

pub fn solve_nonorientable(
    graph: &EmbeddedDigraph,
    surface: &Surface,
    basis: &NonOrientableBasis,
    y: &[i64],
    options: &SolveOptions,
) -> Result<SolveResult> {
    validate_y(graph, y)?;
    if surface.genus > options.genus_cap {
        return Err(Error::GenusCapExceeded {
            genus: surface.genus,
            cap: options.genus_cap,
        });
    }
    let started = Instant::now();
    let (omega, omega_stats, scaled) = compute_omega(graph, basis, options.threads)?;
    let entries: Vec<&OmegaEntry> = omega.values().collect();
    let all: Vec<Column> = entries
        .iter()
        .map(|e| Column {
            q: e.q.clone(),
            p: e.p,
            cost: e.cost,
        })
        .collect();
    let kept = irreducible_columns(&all);
    let columns: Vec<Column> = kept.iter().map(|&j| all[j].clone()).collect();
    let d: Vec<i64> = basis
        .vectors
        .iter()
        .map(|w| crate::dual::dot(w, y))
        .collect();
    let e = (basis
        .parity
        .iter()
        .zip(y)
        .map(|(&h, &v)| h as i64 * v)
        .sum::<i64>())
    .rem_euclid(2) as u8;
    let radius = options
        .tube_radius
        .unwrap_or_else(|| default_radius(&columns, surface.genus));
    let mut stats = SolveStats {
        omega_size: Some(omega.len()),
        columns: Some(columns.len()),
        omega_states: Some(omega_stats.states_settled),
        walk_bound: Some(walk_bound(graph)),
        tube_radius: Some(radius),
        ..SolveStats::default()
    };
    let solution = solve_fixed_row_ip(&columns, &d, e, radius);
    stats.elapsed_ms = started.elapsed().as_millis();
    let Some(solution) = solution else {
        return Ok(SolveResult::infeasible(stats));
    };
    stats.ip_states = Some(solution.states_settled);
    let mut x = vec![0i64; graph.arc_count()];
    for (&j, &mult) in kept.iter().zip(&solution.z) {
        for &a in &entries[j].walk {
            x[a] += mult as i64;
        }
    }
    let objective = scaled.to_rational(solution.cost);
    finish(
        graph,
        surface,
        &Basis::NonOrientable(basis.clone()),
        y,
        x,
        objective,
        options,
        stats,
    )
}
