//! Component counts and cycle lengths of large grid triangulations.
//!
//! `Ĝ(T)` has every grid vertex and only the cell diagonals as edges.
//! `G(T)` has one node per triangle, joined when two triangles share a
//! horizontal or vertical edge; every node has degree at most two, so its
//! components are paths and cycles, and `CC(Ĝ) = CC(G) + 1`.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::sample_uniform_grid;
use crate::error::{Error, Result};
use crate::geom::{incircle_unchecked, Sign};
use crate::pointsets::{grid_label, make_grid, perturb, PerturbationParams, PointSet, SeedSpec};
use crate::stats::{mean_sd, one_sided_p_value};
use crate::triangulate::{grid_dt, GridCode};

/// Union–find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Components of `Ĝ(T)`, isolated grid vertices included.
pub fn count_components_hat(code: &GridCode) -> usize {
    let m = code.m();
    let mut dsu = DisjointSets::new((m + 1) * (m + 1));
    for cell in GridCode::cells(m) {
        let [bl, br, tr, tl] = cell.corners(m);
        let (a, b) = if code.is_slash(cell.i, cell.j) {
            (bl, tr)
        } else {
            (br, tl)
        };
        dsu.union(a - 1, b - 1);
    }
    dsu.components()
}

/// Side of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    pub fn opposite(self) -> Side {
        match self {
            Side::Bottom => Side::Top,
            Side::Top => Side::Bottom,
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Which of the cell's two triangles owns `side`: 0 for the triangle on the
/// bottom edge, 1 for the one on the top edge.
pub fn triangle_of(slash: bool, side: Side) -> usize {
    match (slash, side) {
        (_, Side::Bottom) => 0,
        (_, Side::Top) => 1,
        (true, Side::Right) | (false, Side::Left) => 0,
        (true, Side::Left) | (false, Side::Right) => 1,
    }
}

/// The other grid edge of the triangle that owns `side`.
pub fn other_side(slash: bool, side: Side) -> Side {
    match (slash, side) {
        (true, Side::Bottom) => Side::Right,
        (true, Side::Right) => Side::Bottom,
        (true, Side::Left) => Side::Top,
        (true, Side::Top) => Side::Left,
        (false, Side::Bottom) => Side::Left,
        (false, Side::Left) => Side::Bottom,
        (false, Side::Right) => Side::Top,
        (false, Side::Top) => Side::Right,
    }
}

/// Neighbouring cell across `side`, if inside the `m × m` grid.
pub fn neighbour(m: usize, i: usize, j: usize, side: Side) -> Option<(usize, usize)> {
    match side {
        Side::Bottom => j.checked_sub(1).map(|j| (i, j)),
        Side::Left => i.checked_sub(1).map(|i| (i, j)),
        Side::Top => (j + 1 < m).then_some((i, j + 1)),
        Side::Right => (i + 1 < m).then_some((i + 1, j)),
    }
}

/// Node of `G(T)` for triangle `t ∈ {0, 1}` of cell `(i, j)`.
fn node(m: usize, i: usize, j: usize, t: usize) -> usize {
    2 * (j * m + i) + t
}

/// Adjacency lists of `G(T)`; node `2(j·m + i) + t` is triangle `t` of
/// cell `(i, j)` as numbered by [`triangle_of`].
pub fn triangle_graph(code: &GridCode) -> Vec<Vec<usize>> {
    let m = code.m();
    let mut adj = vec![Vec::with_capacity(2); 2 * m * m];
    for j in 0..m {
        for i in 0..m {
            let s = code.is_slash(i, j);
            for side in [Side::Right, Side::Top] {
                if let Some((ni, nj)) = neighbour(m, i, j, side) {
                    let a = node(m, i, j, triangle_of(s, side));
                    let b = node(m, ni, nj, triangle_of(code.is_slash(ni, nj), side.opposite()));
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
    }
    adj
}

/// Components of `G(T)`.
#[allow(non_snake_case)]
pub fn count_components_G(code: &GridCode) -> usize {
    let m = code.m();
    let mut dsu = DisjointSets::new(2 * m * m);
    for (a, nbrs) in triangle_graph(code).iter().enumerate() {
        for &b in nbrs {
            dsu.union(a, b);
        }
    }
    dsu.components()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridModel {
    /// Delaunay triangulation of the perturbed grid.
    DtPerturbed,
    /// Independent fair coin per cell.
    UniformDiagonals,
}

/// Per-model census over independent grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusStats {
    pub model: GridModel,
    pub m: usize,
    pub iterations: u64,
    pub discards: u64,
    pub mean_components: f64,
    pub sd_components: f64,
    pub standard_error: f64,
    /// Mean over grids of `(m+1)² / CC(Ĝ)`: every grid vertex, isolated ones
    /// included, divided by the number of components.
    pub mean_component_size: f64,
    pub component_size_definition: String,
}

pub const COMPONENT_SIZE_DEFINITION: &str = "grid vertices (including isolated) / CC(G-hat)";

fn model_code(
    m: usize,
    model: GridModel,
    grid: &PointSet,
    params: &PerturbationParams,
    seed: SeedSpec,
) -> Result<GridCode> {
    match model {
        GridModel::DtPerturbed => grid_dt(&perturb(grid, params, seed)?),
        GridModel::UniformDiagonals => sample_uniform_grid(m, seed),
    }
}

/// Mean number of components of `Ĝ` and mean component size over
/// `iterations` independent `m × m` grids.
pub fn component_census(m: usize, iterations: u64, model: GridModel, master_seed: u64) -> Result<CensusStats> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("census needs at least one iteration".into()));
    }
    let grid = make_grid(m)?;
    let params = PerturbationParams::for_set(&grid)?;
    let results: Vec<Option<usize>> = (0..iterations)
        .into_par_iter()
        .map(
            |i| match model_code(m, model, &grid, &params, SeedSpec::new(master_seed, i)) {
                Ok(code) => Ok(Some(count_components_hat(&code))),
                Err(Error::Degenerate(_)) => Ok(None),
                Err(e) => Err(e),
            },
        )
        .collect::<Result<_>>()?;
    let counts: Vec<f64> = results.iter().flatten().map(|&c| c as f64).collect();
    let discards = iterations - counts.len() as u64;
    let (mean, sd) = mean_sd(&counts);
    let vertices = ((m + 1) * (m + 1)) as f64;
    let sizes: Vec<f64> = counts.iter().map(|c| vertices / c).collect();
    Ok(CensusStats {
        model,
        m,
        iterations,
        discards,
        mean_components: mean,
        sd_components: sd,
        standard_error: sd / (counts.len().max(1) as f64).sqrt(),
        mean_component_size: mean_sd(&sizes).0,
        component_size_definition: COMPONENT_SIZE_DEFINITION.into(),
    })
}

/// Diagonal assignment consulted by a walk; may reveal cells on demand.
pub trait DiagonalSource {
    fn m(&self) -> usize;
    fn is_slash(&mut self, i: usize, j: usize) -> Result<bool>;
}

impl DiagonalSource for GridCode {
    fn m(&self) -> usize {
        GridCode::m(self)
    }

    fn is_slash(&mut self, i: usize, j: usize) -> Result<bool> {
        Ok(GridCode::is_slash(self, i, j))
    }
}

/// Fair coins drawn in order of first visit.
pub struct LazyCoins {
    m: usize,
    rng: ChaCha8Rng,
    revealed: Vec<Option<bool>>,
}

impl LazyCoins {
    pub fn new(m: usize, seed: SeedSpec) -> Self {
        Self {
            m,
            rng: seed.rng(),
            revealed: vec![None; m * m],
        }
    }

    /// Revealed cells, row-major; `None` where never visited.
    pub fn revealed(&self) -> &[Option<bool>] {
        &self.revealed
    }
}

impl DiagonalSource for LazyCoins {
    fn m(&self) -> usize {
        self.m
    }

    fn is_slash(&mut self, i: usize, j: usize) -> Result<bool> {
        let slot = &mut self.revealed[j * self.m + i];
        Ok(*slot.get_or_insert_with(|| self.rng.random::<bool>()))
    }
}

/// A fully perturbed grid whose cells are decided by the incircle test when
/// first visited.
pub struct LazyDelaunay {
    m: usize,
    points: PointSet,
    revealed: Vec<Option<bool>>,
}

impl LazyDelaunay {
    pub fn new(m: usize, seed: SeedSpec) -> Result<Self> {
        let grid = make_grid(m)?;
        let params = PerturbationParams::for_set(&grid)?;
        Ok(Self {
            m,
            points: perturb(&grid, &params, seed)?,
            revealed: vec![None; m * m],
        })
    }

    pub fn revealed(&self) -> &[Option<bool>] {
        &self.revealed
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }
}

impl DiagonalSource for LazyDelaunay {
    fn m(&self) -> usize {
        self.m
    }

    fn is_slash(&mut self, i: usize, j: usize) -> Result<bool> {
        let idx = j * self.m + i;
        if let Some(s) = self.revealed[idx] {
            return Ok(s);
        }
        let p = |a, b| self.points.label(grid_label(self.m, a, b));
        let s = match incircle_unchecked(p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)) {
            Sign::Negative => true,
            Sign::Positive => false,
            Sign::Zero => return Err(Error::Degenerate(format!("cocircular corners in cell ({i}, {j})"))),
        };
        self.revealed[idx] = Some(s);
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkOutcome {
    /// Returned to the start triangle after this many steps.
    Cycle(usize),
    /// Still away from the start after `cap` steps.
    Overflow,
    /// Left the grid; the start lies on a path, not a cycle.
    BoundaryEscape,
}

/// Follows `G(T)` from the triangle of cell `start` that owns `start_side`,
/// leaving through its other grid edge, until it returns to that triangle.
pub fn cycle_walk<S: DiagonalSource>(
    source: &mut S,
    start: (usize, usize),
    start_side: Side,
    cap: usize,
) -> Result<WalkOutcome> {
    let m = source.m();
    if start.0 >= m || start.1 >= m {
        return Err(Error::InvalidArgument(format!(
            "start cell {start:?} outside the {m}x{m} grid"
        )));
    }
    let start_tri = triangle_of(source.is_slash(start.0, start.1)?, start_side);
    let (mut i, mut j) = start;
    let mut entered = start_side;
    for step in 1..=cap {
        let exit = other_side(source.is_slash(i, j)?, entered);
        let Some((ni, nj)) = neighbour(m, i, j, exit) else {
            return Ok(WalkOutcome::BoundaryEscape);
        };
        (i, j) = (ni, nj);
        entered = exit.opposite();
        if (i, j) == start && triangle_of(source.is_slash(i, j)?, entered) == start_tri {
            return Ok(WalkOutcome::Cycle(step));
        }
    }
    Ok(WalkOutcome::Overflow)
}

pub const DEFAULT_CAP: usize = 40;

/// Smallest grid on which a walk of `cap` steps from the central cell cannot
/// leave the grid and return: `cap + 1`.
pub fn walk_grid_size(cap: usize) -> usize {
    cap + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub model: GridModel,
    pub cap: usize,
    pub grid_m: usize,
    pub walks: u64,
    /// Cycle length to count, lengths `≤ cap` only.
    pub histogram: BTreeMap<usize, u64>,
    /// Walks not back at the start within `cap` steps, escapes included.
    pub overflow_count: u64,
    pub boundary_escapes: u64,
    pub discards: u64,
    /// Mean of `min(t, cap)`, overflowing walks counted as `cap`.
    pub mean_capped: f64,
    pub standard_error: f64,
    /// Mean length of the cycles no longer than `cap`.
    pub mean_closed: f64,
}

impl WalkStats {
    pub fn closed_walks(&self) -> u64 {
        self.histogram.values().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,count\n");
        for (l, c) in &self.histogram {
            out.push_str(&format!("{l},{c}\n"));
        }
        out.push_str(&format!(">{},{}\n", self.cap, self.overflow_count));
        out
    }

    /// One-sided p-value for `self.mean_capped > other.mean_capped`.
    pub fn p_value_greater(&self, other: &WalkStats) -> f64 {
        one_sided_p_value(
            self.mean_capped,
            self.standard_error,
            other.mean_capped,
            other.standard_error,
        )
    }
}

/// Runs `walks` independent capped walks from the central cell of a grid
/// with `cap + 1` cells per side. Walk `w` uses its own grid drawn from
/// `SeedSpec::new(master_seed, w)`.
pub fn walk_statistics(model: GridModel, walks: u64, cap: usize, master_seed: u64) -> Result<WalkStats> {
    if cap < 4 {
        return Err(Error::InvalidArgument(format!("cap must be >= 4, got {cap}")));
    }
    let m = walk_grid_size(cap);
    let centre = (m / 2, m / 2);
    let outcomes: Vec<Option<WalkOutcome>> = (0..walks)
        .into_par_iter()
        .map(|w| {
            let seed = SeedSpec::new(master_seed, w);
            let r = match model {
                GridModel::UniformDiagonals => cycle_walk(&mut LazyCoins::new(m, seed), centre, Side::Bottom, cap),
                GridModel::DtPerturbed => {
                    LazyDelaunay::new(m, seed).and_then(|mut s| cycle_walk(&mut s, centre, Side::Bottom, cap))
                }
            };
            match r {
                Ok(o) => Ok(Some(o)),
                Err(Error::Degenerate(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut histogram = BTreeMap::new();
    let (mut overflow, mut escapes, mut discards) = (0u64, 0u64, 0u64);
    let mut capped = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        match o {
            Some(WalkOutcome::Cycle(t)) => {
                *histogram.entry(t).or_insert(0) += 1;
                capped.push(t as f64);
            }
            Some(WalkOutcome::Overflow) => {
                overflow += 1;
                capped.push(cap as f64);
            }
            Some(WalkOutcome::BoundaryEscape) => {
                overflow += 1;
                escapes += 1;
                capped.push(cap as f64);
            }
            None => discards += 1,
        }
    }
    let (mean, sd) = mean_sd(&capped);
    let closed: u64 = histogram.values().sum();
    let closed_sum: u64 = histogram.iter().map(|(l, c)| *l as u64 * c).sum();
    Ok(WalkStats {
        model,
        cap,
        grid_m: m,
        walks,
        histogram,
        overflow_count: overflow,
        boundary_escapes: escapes,
        discards,
        mean_capped: mean,
        standard_error: sd / (capped.len().max(1) as f64).sqrt(),
        mean_closed: if closed > 0 {
            closed_sum as f64 / closed as f64
        } else {
            f64::NAN
        },
    })
}
