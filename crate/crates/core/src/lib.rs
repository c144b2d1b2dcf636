//! Monte Carlo and first-order analytic study of how a small normal
//! perturbation breaks ties in the Delaunay triangulation of degenerate
//! point sets (square grids and regular polygons).

pub mod analytic;
pub mod baselines;
pub mod corner;
pub mod error;
pub mod geom;
pub mod largegrid;
pub mod plot;
pub mod pointsets;
pub mod quadrature;
pub mod simulate;
pub mod stats;
pub mod triangulate;

pub use error::{Error, Result};
