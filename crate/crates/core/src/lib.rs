//! Surface-embedded digraphs, integer homology of circulations, and exact
//! minimum-cost homologous circulations.
//!
//! The crate is organised bottom-up:
//!
//! - [`embedding`]: embedding schemes over darts, facial walks, Euler genus.
//! - [`dual`]: dual graph, boundary matrix and crossing vectors of dual walks.
//! - [`homology`]: homology bases for orientable and non-orientable surfaces.
//! - [`solver`]: the exact optimisation pipeline.
//! - [`oracle`]: brute-force ground truth for small instances.
//! - [`instances`]: file format, instance families and reduction generators.

pub mod dual;
pub mod embedding;
pub mod error;
pub mod homology;
pub mod instances;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod rational;
pub mod solver;
mod tree;

pub use dual::{BoundaryMatrix, DualDart, DualGraph, DualWalk};
pub use embedding::{Dart, EmbeddedDigraph, End, FacialWalkSet, Walk};
pub use error::{Error, Result};
pub use homology::{Basis, NonOrientableBasis, OrientableBasis};
pub use solver::{solve, SolveOptions, SolveResult, SolveStatus};

/// Everything derived from an embedded digraph that the homology and solver
/// layers need: faces, genus, dual and boundary matrix.
#[derive(Debug, Clone)]
pub struct Surface {
    pub faces: FacialWalkSet,
    pub genus: usize,
    pub orientable: bool,
    pub dual: DualGraph,
    pub boundary: BoundaryMatrix,
}

impl Surface {
    pub fn analyse(graph: &EmbeddedDigraph) -> Result<Self> {
        let faces = embedding::trace_facial_walks(graph);
        let (genus, orientable) = embedding::euler_genus(graph, &faces)?;
        let dual = DualGraph::build(graph, &faces);
        let boundary = BoundaryMatrix::build(graph, &faces);
        Ok(Surface {
            faces,
            genus,
            orientable,
            dual,
            boundary,
        })
    }
}
