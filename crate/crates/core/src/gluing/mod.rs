//! Both sides of the gluing circle as vertical graphs, the mode-by-mode
//! Cauchy-data matching, a finite-difference graph mean curvature, and
//! composite meshes.
//!
//! Everything is written in the local frame of the gluing point: `p` at the
//! origin, the outward normal of the base along `+z`, the matching circle of
//! radius `r_τ` in the plane.

pub mod assemble;
pub mod boundary;
pub mod graph;
pub mod matching;

pub use assemble::{assemble_glued_mesh, Base, GlueOptions, GlueReport, GluedMesh};
pub use boundary::{
    delaunay_boundary_data, delaunay_graph, delaunay_remainder_sup, surface_boundary_data,
    AnnulusGraphData, CauchyPair, Side,
};
pub use graph::{graph_mean_curvature, GraphCurvature, PolarGrid};
pub use matching::{match_cauchy_data, MatchResidual, MatchResult, MatchState};

/// Sign `∓` in the end-graph formulas: `-1` for unduloids, `+1` for nodoids.
pub(crate) fn mp(tau: f64) -> f64 {
    -tau.signum()
}
