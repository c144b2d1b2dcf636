use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::pointsets::{make_grid, make_polygon, PointSet};
use crate::triangulate::{GridCode, PolygonCode};

use super::gradient::incircle_gradient;

/// Halfspaces through the origin of the shift space, one unit normal each.
/// A shift vector satisfies constraint `i` when its dot product with
/// `normals[i]` is positive.
///
/// Shift coordinates are ordered `(x_1, y_1, x_2, y_2, ...)` by point label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSystem {
    pub dim: usize,
    pub normals: Vec<Vec<f64>>,
}

impl HalfspaceSystem {
    /// Normalizes each vector; rejects zero vectors and dimension mismatches.
    pub fn from_gradients(dim: usize, gradients: Vec<Vec<f64>>) -> Result<Self> {
        if gradients.is_empty() {
            return Err(Error::DegenerateSystem("no constraints".into()));
        }
        let mut normals = Vec::with_capacity(gradients.len());
        for g in gradients {
            if g.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "normal has dimension {}, expected {dim}",
                    g.len()
                )));
            }
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::DegenerateSystem("zero normal".into()));
            }
            normals.push(g.into_iter().map(|v| v / norm).collect());
        }
        Ok(Self { dim, normals })
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Matrix of pairwise dot products.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let k = self.len();
        let mut g = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                g[i][j] = dot(&self.normals[i], &self.normals[j]);
            }
        }
        g
    }

    /// `true` when every dot product with `shift` is positive.
    pub fn contains(&self, shift: &[f64]) -> bool {
        self.normals.iter().all(|n| dot(n, shift) > 0.0)
    }

    pub fn with_extra(&self, normal: Vec<f64>) -> Result<Self> {
        let mut g = self.normals.clone();
        g.push(normal);
        Self::from_gradients(self.dim, g)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Incircle gradient of the labeled quadruple, embedded in the shift space.
fn embedded_gradient(set: &PointSet, labels: [usize; 4]) -> Vec<f64> {
    let [a, b, c, d]: [Point2; 4] = labels.map(|l| set.label(l));
    let g = incircle_gradient(a, b, c, d);
    let mut out = vec![0.0; 2 * set.len()];
    for (r, &l) in labels.iter().enumerate() {
        out[2 * (l - 1)] += g[2 * r];
        out[2 * (l - 1) + 1] += g[2 * r + 1];
    }
    out
}

/// One constraint per cell: the sign of the linearized incircle test on the
/// cell corners must select the cell's diagonal in `code`.
pub fn grid_halfspaces(code: &GridCode) -> Result<HalfspaceSystem> {
    let m = code.m();
    let grid = make_grid(m)?;
    let gradients = GridCode::cells(m)
        .map(|cell| {
            let mut g = embedded_gradient(&grid, cell.corners(m));
            // Positive slope needs the top-left corner outside: determinant < 0.
            if code.is_slash(cell.i, cell.j) {
                g.iter_mut().for_each(|v| *v = -*v);
            }
            g
        })
        .collect();
    HalfspaceSystem::from_gradients(2 * grid.len(), gradients)
}

/// [`grid_halfspaces`] restricted to `m = 2`: four normals in `R^18`.
pub fn grid2_halfspaces(code: &GridCode) -> Result<HalfspaceSystem> {
    if code.m() != 2 {
        return Err(Error::InvalidArgument("grid2_halfspaces needs m = 2".into()));
    }
    grid_halfspaces(code)
}

/// Spanning tree of the triangle adjacency of a polygon triangulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintTree {
    /// Triangles, counter-clockwise, in the sorted order of
    /// [`PolygonCode::triangulation`]. Node 0 is the root.
    pub nodes: Vec<[usize; 3]>,
    /// `(parent, child)` node indices in breadth-first order.
    pub edges: Vec<(usize, usize)>,
}

impl ConstraintTree {
    pub fn root(&self) -> usize {
        0
    }
}

fn shares_edge(a: &[usize; 3], b: &[usize; 3]) -> bool {
    a.iter().filter(|v| b.contains(v)).count() == 2
}

/// Breadth-first tree rooted at the lowest-indexed triangle; children are
/// the not-yet-visited triangles sharing a side with the parent.
pub fn build_tree(code: &PolygonCode) -> ConstraintTree {
    let nodes = code.triangulation().triangles;
    let mut visited = vec![false; nodes.len()];
    let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(u) = queue.pop_front() {
        for v in 0..nodes.len() {
            if !visited[v] && shares_edge(&nodes[u], &nodes[v]) {
                visited[v] = true;
                edges.push((u, v));
                queue.push_back(v);
            }
        }
    }
    ConstraintTree { nodes, edges }
}

/// For each tree edge `(u, v)`: the apex of `v` lies outside the
/// circumcircle of `u`, linearized at the regular polygon.
pub fn polygon_halfspaces(code: &PolygonCode) -> Result<HalfspaceSystem> {
    let n = code.n;
    if n < 4 {
        return Err(Error::DegenerateSystem("a triangle has no constraints".into()));
    }
    let poly = make_polygon(n)?;
    let tree = build_tree(code);
    let gradients = tree
        .edges
        .iter()
        .map(|&(u, v)| {
            let parent = tree.nodes[u];
            let apex = *tree.nodes[v]
                .iter()
                .find(|x| !parent.contains(x))
                .expect("adjacent triangles differ in one vertex");
            outside_gradient(&poly, parent, apex)
        })
        .collect();
    HalfspaceSystem::from_gradients(2 * n, gradients)
}

fn outside_gradient(poly: &PointSet, tri: [usize; 3], q: usize) -> Vec<f64> {
    let mut g = embedded_gradient(poly, [tri[0], tri[1], tri[2], q]);
    g.iter_mut().for_each(|v| *v = -*v);
    g
}

/// Every other vertex outside the circumcircle of triangle `ijk`.
pub fn triangle_halfspaces(n: usize, i: usize, j: usize, k: usize) -> Result<HalfspaceSystem> {
    crate::baselines::arcs(n, i, j, k)?;
    if n < 4 {
        return Err(Error::DegenerateSystem("a triangle has no constraints".into()));
    }
    let poly = make_polygon(n)?;
    let gradients = (1..=n)
        .filter(|q| ![i, j, k].contains(q))
        .map(|q| outside_gradient(&poly, [i, j, k], q))
        .collect();
    HalfspaceSystem::from_gradients(2 * n, gradients)
}
