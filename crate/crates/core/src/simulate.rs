//! Monte Carlo estimation of triangulation distributions and of triangle
//! appearance frequencies.
//!
//! Iteration `i` of a run draws its perturbation from `SeedSpec::new(seed, i)`.
//! Iterations are split into fixed index ranges and the per-range tallies are
//! merged by addition, so a report depends only on its inputs and not on the
//! number of worker threads.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{grid2_distribution, polygon_distribution, DEFAULT_TARGET_SE};
use crate::baselines::{arcs, to_f64, uniform_prob_for_arcs};
use crate::error::{Error, Result};
use crate::pointsets::{make_grid, make_polygon, perturb, PerturbationParams, PointSet, SeedSpec};
use crate::stats::compensated_sum;
use crate::triangulate::{
    canonical_class, convex_polygon_dt, dihedral_images, enumerate_polygon_codes, grid_dt, GridCode, PolygonCode,
};

const CHUNK: u64 = 1 << 12;

/// Grids above this size and polygons from this size on report only the
/// most frequent codes unless told otherwise.
pub const FULL_TABLE_MAX_GRID: usize = 4;
pub const TOP_K_MIN_POLYGON: usize = 10;
pub const DEFAULT_TOP_K: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReportKind {
    Grid { m: usize },
    Polygon { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub code: String,
    pub count: u64,
    pub frequency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
}

/// Tally of one isomorphism class of polygon triangulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    /// Lexicographically least member.
    pub class: String,
    /// Number of triangulations in the class.
    pub size: usize,
    pub count: u64,
    pub frequency: f64,
    /// `frequency / size`.
    pub frequency_per_code: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability_per_code: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub kind: ReportKind,
    pub master_seed: u64,
    pub scale_factor: f64,
    pub iterations: u64,
    /// Iterations dropped because the perturbed set was degenerate or, for
    /// polygons, not in convex position.
    pub discards: u64,
    pub distinct_codes: usize,
    /// Set when only the most frequent codes are listed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    /// Total count of the codes left out by `top_k`.
    pub other_count: u64,
    /// Sorted by decreasing count, ties by code.
    pub entries: Vec<DistributionEntry>,
    /// Polygon reports only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassEntry>,
}

impl DistributionReport {
    pub fn valid_iterations(&self) -> u64 {
        self.iterations - self.discards
    }

    pub fn count_sum(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum::<u64>() + self.other_count
    }

    pub fn frequency_sum(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.frequency))
            + self.other_count as f64 / self.valid_iterations().max(1) as f64
    }

    pub fn most_common(&self) -> Option<&DistributionEntry> {
        self.entries.first()
    }

    pub fn entry(&self, code: &str) -> Option<&DistributionEntry> {
        self.entries.iter().find(|e| e.code == code)
    }

    /// Half the L1 distance to the attached analytic distribution; `None`
    /// unless every code has one.
    pub fn total_variation(&self) -> Option<f64> {
        if self.top_k.is_some() {
            return None;
        }
        let terms: Option<Vec<f64>> = self
            .entries
            .iter()
            .map(|e| e.probability.map(|p| (e.frequency - p).abs()))
            .collect();
        Some(0.5 * compensated_sum(terms?))
    }

    /// Largest over smallest frequency among the listed codes.
    pub fn max_min_ratio(&self) -> Option<f64> {
        let max = self.entries.first()?.frequency;
        let min = self.entries.last()?.frequency;
        (min > 0.0).then(|| max / min)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("code,count,frequency,probability\n");
        for e in &self.entries {
            let p = e.probability.map(|p| p.to_string()).unwrap_or_default();
            out.push_str(&format!("\"{}\",{},{},{}\n", e.code, e.count, e.frequency, p));
        }
        out
    }

    pub fn classes_csv(&self) -> String {
        let mut out = String::from("class,size,count,frequency,frequency_per_code,probability_per_code\n");
        for c in &self.classes {
            let p = c.probability_per_code.map(|p| p.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "\"{}\",{},{},{},{},{}\n",
                c.class, c.size, c.count, c.frequency, c.frequency_per_code, p
            ));
        }
        out
    }
}

fn is_discard(e: &Error) -> bool {
    matches!(e, Error::Degenerate(_) | Error::NotConvex)
}

/// Runs `f` for every iteration index and merges the tallies. `f` returns
/// `Ok(false)` for a discarded iteration.
fn tally<K, F>(iterations: u64, f: F) -> Result<(HashMap<K, u64>, u64)>
where
    K: Eq + Hash + Send,
    F: Fn(u64, &mut HashMap<K, u64>) -> Result<bool> + Sync,
{
    let chunks = iterations.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut map = HashMap::new();
            let mut discards = 0u64;
            for i in c * CHUNK..((c + 1) * CHUNK).min(iterations) {
                if !f(i, &mut map)? {
                    discards += 1;
                }
            }
            Ok((map, discards))
        })
        .try_reduce(
            || (HashMap::new(), 0),
            |(a, da), (b, db)| {
                if a.len() < b.len() {
                    return Ok(merge(b, a, da + db));
                }
                Ok(merge(a, b, da + db))
            },
        )
}

fn merge<K: Eq + Hash>(mut into: HashMap<K, u64>, from: HashMap<K, u64>, d: u64) -> (HashMap<K, u64>, u64) {
    for (k, v) in from {
        *into.entry(k).or_insert(0) += v;
    }
    (into, d)
}

fn perturbed(set: &PointSet, params: &PerturbationParams, seed: u64, i: u64) -> Result<PointSet> {
    perturb(set, params, SeedSpec::new(seed, i))
}

/// Builds the sorted entry list; codes with an analytic value but no
/// observations are included with count zero.
fn build_entries<K: Ord + Clone>(
    counts: BTreeMap<K, u64>,
    valid: u64,
    analytic: Option<BTreeMap<K, f64>>,
    top_k: Option<usize>,
    name: impl Fn(&K) -> String,
) -> (Vec<DistributionEntry>, u64) {
    let mut keys: BTreeSet<K> = counts.keys().cloned().collect();
    if let Some(a) = &analytic {
        keys.extend(a.keys().cloned());
    }
    let mut rows: Vec<(u64, K)> = keys
        .into_iter()
        .map(|k| (counts.get(&k).copied().unwrap_or(0), k))
        .collect();
    rows.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let mut other = 0;
    if let Some(k) = top_k {
        other = rows.iter().skip(k).map(|r| r.0).sum();
        rows.truncate(k);
    }
    let denom = valid.max(1) as f64;
    let entries = rows
        .into_iter()
        .map(|(count, k)| DistributionEntry {
            code: name(&k),
            count,
            frequency: count as f64 / denom,
            probability: analytic.as_ref().and_then(|a| a.get(&k).copied()),
        })
        .collect();
    (entries, other)
}

fn grid_analytic(m: usize) -> Option<BTreeMap<GridCode, f64>> {
    match m {
        1 => Some((0..2).map(|i| (GridCode::from_index(1, i), 0.5)).collect()),
        2 => grid2_distribution(DEFAULT_TARGET_SE)
            .ok()
            .map(|d| d.into_iter().map(|e| (e.code, e.probability)).collect()),
        _ => None,
    }
}

/// Empirical distribution of the Delaunay diagonals of a perturbed
/// `(m+1) × (m+1)` grid. Up to `m = 4` every observed code is listed;
/// larger grids list the [`DEFAULT_TOP_K`] most frequent.
pub fn estimate_grid_distribution(m: usize, iterations: u64, master_seed: u64) -> Result<DistributionReport> {
    let top_k = (m > FULL_TABLE_MAX_GRID).then_some(DEFAULT_TOP_K);
    estimate_grid_distribution_with(m, iterations, master_seed, top_k)
}

pub fn estimate_grid_distribution_with(
    m: usize,
    iterations: u64,
    master_seed: u64,
    top_k: Option<usize>,
) -> Result<DistributionReport> {
    let set = make_grid(m)?;
    let params = PerturbationParams::for_set(&set)?;
    let (counts, discards) = tally(iterations, |i, map| {
        match perturbed(&set, &params, master_seed, i).and_then(|p| grid_dt(&p)) {
            Ok(code) => {
                *map.entry(code).or_insert(0) += 1;
                Ok(true)
            }
            Err(e) if is_discard(&e) => Ok(false),
            Err(e) => Err(e),
        }
    })?;
    let counts: BTreeMap<GridCode, u64> = counts.into_iter().collect();
    let distinct_codes = counts.len();
    let analytic = if top_k.is_none() { grid_analytic(m) } else { None };
    let (entries, other_count) = build_entries(counts, iterations - discards, analytic, top_k, |c| c.to_string());
    Ok(DistributionReport {
        kind: ReportKind::Grid { m },
        master_seed,
        scale_factor: params.scale_factor,
        iterations,
        discards,
        distinct_codes,
        top_k,
        other_count,
        entries,
        classes: Vec::new(),
    })
}

/// Empirical distribution of the Delaunay triangulation of a perturbed
/// regular `n`-gon, `3 ≤ n ≤ 16`, with per-class totals.
///
/// `top_k = None` lists every observed code below [`TOP_K_MIN_POLYGON`]
/// vertices and the [`DEFAULT_TOP_K`] most frequent from there on.
/// Analytic probabilities are attached up to seven vertices.
pub fn estimate_polygon_distribution(
    n: usize,
    iterations: u64,
    master_seed: u64,
    top_k: Option<usize>,
) -> Result<DistributionReport> {
    if !(3..=16).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "polygon distribution supports 3 <= n <= 16, got {n}"
        )));
    }
    let top_k = top_k.or((n >= TOP_K_MIN_POLYGON).then_some(DEFAULT_TOP_K));
    let set = make_polygon(n)?;
    let params = PerturbationParams::for_set(&set)?;
    let (counts, discards) = tally(iterations, |i, map| {
        match perturbed(&set, &params, master_seed, i).and_then(|p| convex_polygon_dt(&p)) {
            Ok((code, _)) => {
                *map.entry(code).or_insert(0) += 1;
                Ok(true)
            }
            Err(e) if is_discard(&e) => Ok(false),
            Err(e) => Err(e),
        }
    })?;
    let counts: BTreeMap<PolygonCode, u64> = counts.into_iter().collect();
    let valid = iterations - discards;
    let analytic: Option<BTreeMap<PolygonCode, f64>> = (n <= 7)
        .then(|| polygon_distribution(n, DEFAULT_TARGET_SE).ok())
        .flatten()
        .map(|d| d.into_iter().map(|e| (e.code, e.probability)).collect());
    let classes = class_entries(n, &counts, valid, analytic.as_ref());
    let distinct_codes = counts.len();
    let analytic = if top_k.is_none() { analytic } else { None };
    let (entries, other_count) = build_entries(counts, valid, analytic, top_k, |c| c.to_string());
    Ok(DistributionReport {
        kind: ReportKind::Polygon { n },
        master_seed,
        scale_factor: params.scale_factor,
        iterations,
        discards,
        distinct_codes,
        top_k,
        other_count,
        entries,
        classes,
    })
}

fn class_entries(
    n: usize,
    counts: &BTreeMap<PolygonCode, u64>,
    valid: u64,
    analytic: Option<&BTreeMap<PolygonCode, f64>>,
) -> Vec<ClassEntry> {
    let mut totals: BTreeMap<PolygonCode, u64> = BTreeMap::new();
    for (code, c) in counts {
        *totals.entry(canonical_class(code)).or_insert(0) += c;
    }
    if analytic.is_some() {
        for code in enumerate_polygon_codes(n) {
            totals.entry(canonical_class(&code)).or_insert(0);
        }
    }
    let denom = valid.max(1) as f64;
    let mut out: Vec<ClassEntry> = totals
        .into_iter()
        .map(|(class, count)| {
            let size = dihedral_images(&class).into_iter().collect::<BTreeSet<_>>().len();
            let frequency = count as f64 / denom;
            ClassEntry {
                class: class.to_string(),
                size,
                count,
                frequency,
                frequency_per_code: frequency / size as f64,
                probability_per_code: analytic.and_then(|a| a.get(&class).copied()),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.frequency_per_code
            .total_cmp(&a.frequency_per_code)
            .then_with(|| a.class.cmp(&b.class))
    });
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleEntry {
    /// Vertex labels in increasing order.
    pub triangle: [usize; 3],
    /// Polygon edges on the three boundary arcs cut off by the triangle.
    pub arcs: [usize; 3],
    pub count: u64,
    pub frequency: f64,
    /// Probability in a uniformly random triangulation.
    pub uniform_probability: f64,
    pub uniform_exact: String,
}

/// Pooled frequencies of all triangles with the same arc lengths, which
/// form one orbit of the polygon's symmetry group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcClassEntry {
    /// Sorted arc lengths.
    pub arcs: [usize; 3],
    pub orbit_size: usize,
    pub count: u64,
    /// Mean frequency of one member.
    pub frequency: f64,
    /// Binomial standard error of `frequency`, treating members as independent.
    pub standard_error: f64,
    pub uniform_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub n: usize,
    pub master_seed: u64,
    pub scale_factor: f64,
    pub iterations: u64,
    pub discards: u64,
    /// Observed triangles in lexicographic order.
    pub entries: Vec<TriangleEntry>,
    pub arc_classes: Vec<ArcClassEntry>,
}

impl TriangleReport {
    pub fn valid_iterations(&self) -> u64 {
        self.iterations - self.discards
    }

    pub fn count_sum(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn frequency_sum(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.frequency))
    }

    pub fn frequency_of(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut t = [i, j, k];
        t.sort_unstable();
        self.entries
            .binary_search_by(|e| e.triangle.cmp(&t))
            .map(|idx| self.entries[idx].frequency)
            .unwrap_or(0.0)
    }

    pub fn arc_class(&self, a: usize, b: usize, c: usize) -> Option<&ArcClassEntry> {
        let mut key = [a, b, c];
        key.sort_unstable();
        self.arc_classes.iter().find(|e| e.arcs == key)
    }

    /// Pooled frequency of the triangles on three consecutive vertices.
    pub fn corner(&self) -> Option<&ArcClassEntry> {
        self.arc_class(1, 1, self.n - 2)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,k,arc_a,arc_b,arc_c,count,frequency,uniform_probability\n");
        for e in &self.entries {
            let [i, j, k] = e.triangle;
            let [a, b, c] = e.arcs;
            out.push_str(&format!(
                "{i},{j},{k},{a},{b},{c},{},{},{}\n",
                e.count, e.frequency, e.uniform_probability
            ));
        }
        out
    }
}

fn orbit_size(n: usize, key: [usize; 3]) -> usize {
    // Both cyclic orders of three distinct arcs occur; an equilateral
    // triangle is fixed by a third of the rotations.
    let [a, b, c] = key;
    if a == b && b == c {
        n / 3
    } else if a == b || b == c {
        n
    } else {
        2 * n
    }
}

/// Frequency with which each vertex triple is a triangle of the Delaunay
/// triangulation of a perturbed regular `n`-gon.
pub fn estimate_triangle_frequencies(n: usize, iterations: u64, master_seed: u64) -> Result<TriangleReport> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("polygon needs n >= 3, got {n}")));
    }
    let set = make_polygon(n)?;
    let params = PerturbationParams::for_set(&set)?;
    let (counts, discards) = tally(iterations, |i, map| {
        match perturbed(&set, &params, master_seed, i).and_then(|p| convex_polygon_dt(&p)) {
            Ok((_, tri)) => {
                for t in &tri.triangles {
                    let mut t = *t;
                    t.sort_unstable();
                    *map.entry(t).or_insert(0) += 1;
                }
                Ok(true)
            }
            Err(e) if is_discard(&e) => Ok(false),
            Err(e) => Err(e),
        }
    })?;
    let counts: BTreeMap<[usize; 3], u64> = counts.into_iter().collect();
    let valid = iterations - discards;
    let denom = valid.max(1) as f64;
    let mut by_arcs: BTreeMap<[usize; 3], u64> = BTreeMap::new();
    let mut entries = Vec::with_capacity(counts.len());
    for (t, count) in counts {
        let (a, b, c) = arcs(n, t[0], t[1], t[2])?;
        let mut key = [a, b, c];
        key.sort_unstable();
        *by_arcs.entry(key).or_insert(0) += count;
        let exact = uniform_prob_for_arcs(a, b, c);
        entries.push(TriangleEntry {
            triangle: t,
            arcs: [a, b, c],
            count,
            frequency: count as f64 / denom,
            uniform_probability: to_f64(&exact),
            uniform_exact: exact.to_string(),
        });
    }
    let arc_classes = by_arcs
        .into_iter()
        .map(|(key, count)| {
            let size = orbit_size(n, key);
            let trials = (size as u64 * valid).max(1) as f64;
            let p = count as f64 / trials;
            ArcClassEntry {
                arcs: key,
                orbit_size: size,
                count,
                frequency: p,
                standard_error: (p * (1.0 - p) / trials).sqrt(),
                uniform_probability: to_f64(&uniform_prob_for_arcs(key[0], key[1], key[2])),
            }
        })
        .collect();
    Ok(TriangleReport {
        n,
        master_seed,
        scale_factor: params.scale_factor,
        iterations,
        discards,
        entries,
        arc_classes,
    })
}
