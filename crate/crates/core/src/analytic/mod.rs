//! First-order probabilities: each incircle test is replaced by its linear
//! term in the shifts, so a triangulation corresponds to a polyhedral cone in
//! shift space and its probability to the Gaussian measure of that cone.

mod distribution;
mod gradient;
mod orthant;
mod systems;

pub use distribution::{
    grid2_distribution, polygon_distribution, probability_levels, triangle_probability, ProbabilityEntry,
    ProbabilityLevel, DEFAULT_TARGET_SE,
};
pub use gradient::incircle_gradient;
pub use orthant::{
    cholesky, gram_angles, orthant_prob, orthant_prob_4d, orthant_prob_ambient, orthant_prob_with,
    spherical_triangle_prob, OrthantMethod, OrthantResult, QmcConfig,
};
pub use systems::{
    build_tree, grid2_halfspaces, grid_halfspaces, polygon_halfspaces, triangle_halfspaces, ConstraintTree,
    HalfspaceSystem,
};
