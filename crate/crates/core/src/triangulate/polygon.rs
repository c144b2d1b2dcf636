use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{incircle_unchecked, orient2d_unchecked, Point2, Sign};
use crate::pointsets::{PointSet, PointSetKind};

use super::Triangulation;

/// Triangulation of a convex `n`-gon as its sorted diagonal list.
///
/// Serializes as a JSON list of `[i, j]` pairs with `i < j`, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PolygonCode {
    pub n: usize,
    pub diagonals: Vec<(usize, usize)>,
}

impl PolygonCode {
    /// Validates and normalizes a diagonal list.
    pub fn new(n: usize, diagonals: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut diagonals: Vec<(usize, usize)> = diagonals.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        diagonals.sort_unstable();
        diagonals.dedup();
        let code = Self { n, diagonals };
        code.validate()?;
        Ok(code)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, diagonals: Vec<(usize, usize)>) -> Self {
        Self { n, diagonals }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 3 {
            return Err(Error::InvalidArgument("polygon needs n >= 3".into()));
        }
        if self.diagonals.len() != n - 3 {
            return Err(Error::InvalidArgument(format!(
                "expected {} diagonals, got {}",
                n - 3,
                self.diagonals.len()
            )));
        }
        for &(i, j) in &self.diagonals {
            if i < 1 || j > n || j - i < 2 || (i == 1 && j == n) {
                return Err(Error::InvalidArgument(format!("({i}, {j}) is not a diagonal")));
            }
        }
        for (k, &d) in self.diagonals.iter().enumerate() {
            for &e in &self.diagonals[k + 1..] {
                if crosses(d, e) {
                    return Err(Error::InvalidArgument(format!("{d:?} crosses {e:?}")));
                }
            }
        }
        Ok(())
    }

    /// The `n - 2` triangles, each counter-clockwise.
    pub fn triangulation(&self) -> Triangulation {
        let n = self.n;
        let mut adj = vec![vec![false; n + 1]; n + 1];
        for v in 1..=n {
            let w = v % n + 1;
            adj[v][w] = true;
            adj[w][v] = true;
        }
        for &(a, b) in &self.diagonals {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        // Outerplanar: every 3-cycle bounds a face.
        let mut tris = Vec::with_capacity(n - 2);
        for i in 1..=n {
            for j in i + 1..=n {
                if !adj[i][j] {
                    continue;
                }
                for k in j + 1..=n {
                    if adj[i][k] && adj[j][k] {
                        tris.push([i, j, k]);
                    }
                }
            }
        }
        Triangulation::from_ccw(tris)
    }
}

impl fmt::Display for PolygonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, (a, b)) in self.diagonals.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "[{a},{b}]")?;
        }
        f.write_str("]")
    }
}

/// Two chords of a convex polygon cross iff their endpoints interleave.
pub(crate) fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

struct Mesh {
    tris: Vec<[usize; 3]>,
    /// `nbrs[t][i]` is the triangle across the edge opposite `tris[t][i]`.
    nbrs: Vec<[Option<usize>; 3]>,
}

impl Mesh {
    /// Fan from vertex 0 over a convex chain `0..n`.
    fn fan(n: usize) -> Self {
        let tris: Vec<[usize; 3]> = (1..n - 1).map(|k| [0, k, k + 1]).collect();
        let count = tris.len();
        let nbrs = (0..count)
            .map(|t| {
                // [0, k, k+1]: opposite 0 is the hull edge, opposite k
                // is 0–(k+1) shared with t+1, opposite k+1 is 0–k shared with t-1.
                [None, (t + 1 < count).then_some(t + 1), t.checked_sub(1)]
            })
            .collect();
        Self { tris, nbrs }
    }

    fn slot_of(&self, t: usize, other: usize) -> usize {
        (0..3)
            .find(|&i| self.nbrs[t][i] == Some(other))
            .expect("neighbour links are symmetric")
    }

    fn edge(&self, t: usize, i: usize) -> (usize, usize) {
        let tri = self.tris[t];
        (tri[(i + 1) % 3], tri[(i + 2) % 3])
    }

    /// Replaces the edge opposite slot `i` of `t` by the other diagonal of
    /// the quadrilateral. Returns the four outer edges as `(triangle, slot)`.
    fn flip(&mut self, t: usize, i: usize) -> [(usize, usize); 4] {
        let u = self.nbrs[t][i].expect("interior edge");
        let [a, b, c] = rotate(self.tris[t], i);
        let [n_bc, n_ca, n_ab] = rotate(self.nbrs[t], i);
        debug_assert_eq!(n_bc, Some(u));
        let j = self.slot_of(u, t);
        let [d, _c, _b] = rotate(self.tris[u], j);
        let [_, n_bd, n_dc] = rotate(self.nbrs[u], j);

        self.tris[t] = [a, b, d];
        self.nbrs[t] = [n_bd, Some(u), n_ab];
        self.tris[u] = [d, c, a];
        self.nbrs[u] = [n_ca, Some(t), n_dc];
        if let Some(x) = n_bd {
            let s = self.slot_of(x, u);
            self.nbrs[x][s] = Some(t);
        }
        if let Some(x) = n_ca {
            let s = self.slot_of(x, t);
            self.nbrs[x][s] = Some(u);
        }
        [(t, 0), (t, 2), (u, 0), (u, 2)]
    }
}

fn rotate<T: Copy>(v: [T; 3], i: usize) -> [T; 3] {
    [v[i], v[(i + 1) % 3], v[(i + 2) % 3]]
}

/// Delaunay triangulation of a perturbed polygon in convex position, by
/// Lawson flips starting from the fan at vertex 1.
pub fn convex_polygon_dt(perturbed: &PointSet) -> Result<(PolygonCode, Triangulation)> {
    if let PointSetKind::Grid(_) = perturbed.kind {
        return Err(Error::InvalidArgument(
            "convex_polygon_dt needs a polygon point set".into(),
        ));
    }
    let pts = &perturbed.points;
    let n = pts.len();
    if n < 3 {
        return Err(Error::InvalidArgument("polygon needs n >= 3".into()));
    }
    check_convex(pts)?;
    let mut mesh = Mesh::fan(n);
    let mut stack: Vec<(usize, usize, (usize, usize))> = Vec::new();
    for t in 0..mesh.tris.len() {
        for i in 0..3 {
            if let Some(u) = mesh.nbrs[t][i] {
                if t < u {
                    stack.push((t, i, mesh.edge(t, i)));
                }
            }
        }
    }
    let budget = n * n + 16;
    let mut flips = 0usize;
    while let Some((t, i, e)) = stack.pop() {
        if mesh.edge(t, i) != e {
            continue;
        }
        let Some(u) = mesh.nbrs[t][i] else { continue };
        let [a, b, c] = rotate(mesh.tris[t], i);
        let d = mesh.tris[u][mesh.slot_of(u, t)];
        match incircle_unchecked(pts[a], pts[b], pts[c], pts[d]) {
            Sign::Negative => {}
            Sign::Zero => {
                return Err(Error::Degenerate(format!(
                    "vertices {}, {}, {}, {} are cocircular",
                    a + 1,
                    b + 1,
                    c + 1,
                    d + 1
                )))
            }
            Sign::Positive => {
                flips += 1;
                if flips > budget {
                    return Err(Error::Internal(format!("flip budget {budget} exceeded")));
                }
                for (s, k) in mesh.flip(t, i) {
                    if mesh.nbrs[s][k].is_some() {
                        stack.push((s, k, mesh.edge(s, k)));
                    }
                }
            }
        }
    }

    let mut diagonals = Vec::with_capacity(n - 3);
    for t in 0..mesh.tris.len() {
        for i in 0..3 {
            if let Some(u) = mesh.nbrs[t][i] {
                if t < u {
                    let (p, q) = mesh.edge(t, i);
                    diagonals.push((p.min(q) + 1, p.max(q) + 1));
                }
            }
        }
    }
    diagonals.sort_unstable();
    let tris = mesh.tris.iter().map(|t| t.map(|v| v + 1)).collect();
    Ok((
        PolygonCode::from_sorted_unchecked(n, diagonals),
        Triangulation::from_ccw(tris),
    ))
}

fn check_convex(pts: &[Point2]) -> Result<()> {
    let n = pts.len();
    for k in 0..n {
        let s = orient2d_unchecked(pts[k], pts[(k + 1) % n], pts[(k + 2) % n]);
        if s != Sign::Positive {
            return Err(Error::NotConvex);
        }
    }
    Ok(())
}
