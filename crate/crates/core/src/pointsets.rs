//! Degenerate configurations and the normal perturbation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointSetKind {
    Grid(usize),
    Polygon(usize),
    Custom,
}

/// Labeled planar points. `points[i]` carries label `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub kind: PointSetKind,
    pub points: Vec<Point2>,
}

impl PointSet {
    pub fn custom(points: Vec<Point2>) -> Self {
        Self {
            kind: PointSetKind::Custom,
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point with the 1-based `label`.
    pub fn label(&self, label: usize) -> Point2 {
        self.points[label - 1]
    }

    /// `label,x,y` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,x,y\n");
        for (i, p) in self.points.iter().enumerate() {
            writeln!(out, "{},{:?},{:?}", i + 1, p.x, p.y).unwrap();
        }
        out
    }
}

/// `(m+1)²` integer points, labeled row-major starting at the bottom-left.
pub fn make_grid(m: usize) -> Result<PointSet> {
    if m < 1 {
        return Err(Error::InvalidArgument("grid needs m >= 1".into()));
    }
    let mut points = Vec::with_capacity((m + 1) * (m + 1));
    for j in 0..=m {
        for i in 0..=m {
            points.push(Point2::new(i as f64, j as f64));
        }
    }
    Ok(PointSet {
        kind: PointSetKind::Grid(m),
        points,
    })
}

/// Label of grid point `(i, j)` in a grid with parameter `m`.
pub fn grid_label(m: usize, i: usize, j: usize) -> usize {
    j * (m + 1) + i + 1
}

/// Vertices of the regular `n`-gon on the unit circle, counter-clockwise from `(1, 0)`.
pub fn make_polygon(n: usize) -> Result<PointSet> {
    if n < 3 {
        return Err(Error::InvalidArgument("polygon needs n >= 3".into()));
    }
    let points = (0..n).map(|k| polygon_vertex(n, k)).collect();
    Ok(PointSet {
        kind: PointSetKind::Polygon(n),
        points,
    })
}

/// Vertex `k` (0-based) of the regular `n`-gon.
pub fn polygon_vertex(n: usize, k: usize) -> Point2 {
    // Reduce the angle exactly so that the axis-aligned vertices are exact.
    let k = k % n;
    if 4 * k == n {
        return Point2::new(0.0, 1.0);
    }
    if 2 * k == n {
        return Point2::new(-1.0, 0.0);
    }
    if 4 * k == 3 * n {
        return Point2::new(0.0, -1.0);
    }
    let angle = 2.0 * PI * k as f64 / n as f64;
    Point2::new(angle.cos(), angle.sin())
}

/// Minimum distance over all pairs of points.
pub fn min_pairwise_distance(set: &PointSet) -> Result<f64> {
    if set.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    match set.kind {
        PointSetKind::Grid(_) => return Ok(1.0),
        PointSetKind::Polygon(n) => return Ok(2.0 * (PI / n as f64).sin()),
        PointSetKind::Custom => {}
    }
    let mut best = f64::INFINITY;
    for (i, a) in set.points.iter().enumerate() {
        for b in &set.points[i + 1..] {
            best = best.min((a.x - b.x).hypot(a.y - b.y));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    pub scale_factor: f64,
    pub d_min: f64,
}

impl PerturbationParams {
    pub const DEFAULT_SCALE: f64 = 0.001;

    /// Default scale with `d_min` taken from the point set.
    pub fn for_set(set: &PointSet) -> Result<Self> {
        Ok(Self {
            scale_factor: Self::DEFAULT_SCALE,
            d_min: min_pairwise_distance(set)?,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.scale_factor * self.d_min
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale_factor >= 0.0 && self.scale_factor.is_finite()) {
            return Err(Error::InvalidArgument("scale_factor must be >= 0".into()));
        }
        if !(self.d_min > 0.0 && self.d_min.is_finite()) {
            return Err(Error::InvalidArgument("d_min must be > 0".into()));
        }
        Ok(())
    }
}

/// Identifies one random stream: iteration `iteration_index` of a run
/// seeded with `master_seed`, on retry `attempt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub iteration_index: u64,
    #[serde(default)]
    pub attempt: u32,
}

impl SeedSpec {
    pub fn new(master_seed: u64, iteration_index: u64) -> Self {
        Self {
            master_seed,
            iteration_index,
            attempt: 0,
        }
    }

    /// Fresh stream for the next retry of the same iteration.
    pub fn retry(self) -> Self {
        Self {
            attempt: self.attempt + 1,
            ..self
        }
    }

    /// ChaCha8 keyed by the master seed, one stream per iteration and a
    /// disjoint block range per retry. Positioning is O(1).
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.iteration_index);
        rng.set_word_pos((self.attempt as u128) << 40);
        rng
    }
}

/// Shifts every coordinate by an independent `N(0, (scale_factor·d_min)²)` draw.
pub fn perturb(set: &PointSet, params: &PerturbationParams, seed: SeedSpec) -> Result<PointSet> {
    params.validate()?;
    let mut rng = seed.rng();
    Ok(perturb_with(set, params.sigma(), &mut rng))
}

pub(crate) fn perturb_with<R: rand::Rng>(set: &PointSet, sigma: f64, rng: &mut R) -> PointSet {
    let points = set
        .points
        .iter()
        .map(|p| {
            let dx: f64 = StandardNormal.sample(rng);
            let dy: f64 = StandardNormal.sample(rng);
            Point2::new(p.x + sigma * dx, p.y + sigma * dy)
        })
        .collect();
    PointSet { kind: set.kind, points }
}
