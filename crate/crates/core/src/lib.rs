//! Numerical toolkit for constant mean curvature surfaces with Delaunay ends.
//!
//! * [`profile`]: Delaunay generating curves (σ, κ), periods and neck data.
//! * [`embedding`]: the isothermal embedding, its normal, exact mean curvature
//!   and structured meshes.
//! * [`mesh`] / [`meshio`]: triangle meshes, cotangent mean curvature, OBJ/PLY.
//! * [`jacobi`] / [`floquet`]: mode operators, geometric Jacobi fields,
//!   monodromy and indicial roots.
//! * [`harmonic`]: Fourier-side harmonic extensions and the matching operator.
//! * [`gluing`]: boundary graphs, Cauchy-data matching and composite meshes.
//! * [`verify`]: executable invariant suites with structured reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embedding;
pub mod error;
pub mod floquet;
pub mod gluing;
pub mod harmonic;
pub mod jacobi;
pub mod mesh;
pub mod meshio;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod verify;
pub mod weighted;

pub use error::{Error, Result};
pub use profile::{solve_profile, DelaunayParam, DelaunayProfile, NeckGeometry};
