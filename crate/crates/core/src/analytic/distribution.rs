use serde::{Deserialize, Serialize};

use crate::baselines::{catalan, to_f64};
use crate::error::{Error, Result};
use crate::triangulate::{enumerate_polygon_codes, GridCode, PolygonCode};
use num_bigint::BigInt;
use num_rational::BigRational;

use super::orthant::{orthant_prob, OrthantMethod, OrthantResult};
use super::systems::{grid2_halfspaces, polygon_halfspaces, triangle_halfspaces};

/// One row of an exported probability table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEntry<C> {
    pub code: C,
    pub probability: f64,
    pub standard_error: f64,
    pub method: OrthantMethod,
}

impl<C> ProbabilityEntry<C> {
    fn new(code: C, r: OrthantResult) -> Self {
        Self {
            code,
            probability: r.probability,
            standard_error: r.standard_error,
            method: r.method,
        }
    }
}

pub const DEFAULT_TARGET_SE: f64 = 5e-5;

/// First-order probability of each of the 16 triangulations of the 3×3 grid,
/// ordered by [`GridCode::index`].
pub fn grid2_distribution(target_se: f64) -> Result<Vec<ProbabilityEntry<GridCode>>> {
    (0..16u64)
        .map(|idx| {
            let code = GridCode::from_index(2, idx);
            let r = orthant_prob(&grid2_halfspaces(&code)?, target_se)?;
            Ok(ProbabilityEntry::new(code, r))
        })
        .collect()
}

/// First-order probability of every triangulation of the regular `n`-gon.
///
/// Up to five vertices all triangulations are congruent and the value is
/// `1/C(n-2)`; hexagons use the spherical triangle area and heptagons the
/// four-constraint orthant formula.
pub fn polygon_distribution(n: usize, target_se: f64) -> Result<Vec<ProbabilityEntry<PolygonCode>>> {
    if !(3..=7).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "analytic polygon distribution covers 3 <= n <= 7, got {n}"
        )));
    }
    let codes = enumerate_polygon_codes(n);
    if n <= 5 {
        let p = 1.0 / to_f64(&BigRational::from_integer(BigInt::from(catalan(n - 2))));
        return Ok(codes
            .into_iter()
            .map(|code| ProbabilityEntry {
                code,
                probability: p,
                standard_error: 0.0,
                method: OrthantMethod::Exact,
            })
            .collect());
    }
    codes
        .into_iter()
        .map(|code| {
            let r = orthant_prob(&polygon_halfspaces(&code)?, target_se)?;
            Ok(ProbabilityEntry::new(code, r))
        })
        .collect()
}

/// First-order probability that triangle `ijk` belongs to the Delaunay
/// triangulation of the perturbed `n`-gon.
pub fn triangle_probability(n: usize, i: usize, j: usize, k: usize, target_se: f64) -> Result<OrthantResult> {
    orthant_prob(&triangle_halfspaces(n, i, j, k)?, target_se)
}

/// Codes sharing one probability value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityLevel {
    pub probability: f64,
    pub codes: Vec<String>,
}

/// Groups entries whose probabilities differ by at most `tol`, highest
/// level first.
pub fn probability_levels<C: std::fmt::Display>(entries: &[ProbabilityEntry<C>], tol: f64) -> Vec<ProbabilityLevel> {
    let mut sorted: Vec<&ProbabilityEntry<C>> = entries.iter().collect();
    sorted.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    let mut levels: Vec<(f64, Vec<String>, f64)> = Vec::new();
    for e in sorted {
        match levels.last_mut() {
            Some((first, codes, sum)) if (*first - e.probability).abs() <= tol => {
                codes.push(e.code.to_string());
                *sum += e.probability;
            }
            _ => levels.push((e.probability, vec![e.code.to_string()], e.probability)),
        }
    }
    levels
        .into_iter()
        .map(|(_, codes, sum)| ProbabilityLevel {
            probability: sum / codes.len() as f64,
            codes,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_polygons_are_uniform() {
        assert_eq!(polygon_distribution(3, 1e-4).unwrap()[0].probability, 1.0);
        for e in polygon_distribution(4, 1e-4).unwrap() {
            assert_eq!(e.probability, 0.5);
        }
        let five = polygon_distribution(5, 1e-4).unwrap();
        assert_eq!(five.len(), 5);
        for e in five {
            assert!((e.probability - 0.2).abs() < 1e-15);
        }
        assert!(polygon_distribution(8, 1e-4).is_err());
    }

    #[test]
    fn square_triangle_is_half() {
        let r = triangle_probability(4, 1, 2, 3, 1e-4).unwrap();
        assert_eq!(r.probability, 0.5);
    }

    #[test]
    fn pentagon_triangles_sum_to_three() {
        let mut total = 0.0;
        for i in 1..=5 {
            for j in i + 1..=5 {
                for k in j + 1..=5 {
                    total += triangle_probability(5, i, j, k, 1e-6).unwrap().probability;
                }
            }
        }
        assert!((total - 3.0).abs() < 1e-5, "{total}");
    }

    #[test]
    fn grid2_levels() {
        let d = grid2_distribution(DEFAULT_TARGET_SE).unwrap();
        let levels = probability_levels(&d, 1e-9);
        assert_eq!(levels.iter().map(|l| l.codes.len()).collect::<Vec<_>>(), vec![4, 8, 4]);
        for (l, expect) in levels.iter().zip([0.08422, 0.06088, 0.04401]) {
            assert!((l.probability - expect).abs() < 2e-5, "{l:?}");
        }
        // Alternating columns (or rows) are the most likely codes.
        assert!(levels[0].codes.contains(&"10/10".to_string()));
        assert!(levels[0].codes.contains(&"11/00".to_string()));
    }

    #[test]
    fn hexagon_distribution_sums_to_one() {
        let d = polygon_distribution(6, 1e-4).unwrap();
        assert_eq!(d.len(), 14);
        let total: f64 = d.iter().map(|e| e.probability).sum();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }
}
