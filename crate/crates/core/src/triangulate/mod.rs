//! Delaunay triangulations of perturbed grids and polygons, and their
//! canonical encodings.

mod brute;
mod classes;
mod grid;
mod polygon;

pub use brute::{brute_force_dt, BRUTE_FORCE_MAX_POINTS};
pub use classes::{canonical_class, dihedral_images, enumerate_polygon_codes, isomorphism_classes};
pub use grid::{grid_code_of, grid_dt, GridCell, GridCode};
pub use polygon::{convex_polygon_dt, PolygonCode};

use serde::{Deserialize, Serialize};

/// Triangles as 1-based vertex labels, each in counter-clockwise order and
/// rotated to start at its smallest label. The list is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triangulation {
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    pub(crate) fn from_ccw(mut triangles: Vec<[usize; 3]>) -> Self {
        for t in triangles.iter_mut() {
            let first = (0..3).min_by_key(|&i| t[i]).unwrap();
            t.rotate_left(first);
        }
        triangles.sort_unstable();
        Self { triangles }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Whether the undirected edge `a–b` belongs to some triangle.
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.triangles.iter().any(|t| {
            (0..3).any(|i| {
                let (p, q) = (t[i], t[(i + 1) % 3]);
                (p == a && q == b) || (p == b && q == a)
            })
        })
    }
}
