//! Probability that a given triangle of a large perturbed regular polygon
//! belongs to its Delaunay triangulation.
//!
//! To first order only the radial component `z` of each vertex shift
//! matters, and `D` stays outside the circle through `A, B, C` iff
//! `z_D > (z_A·S(BCD) − z_B·S(ACD) + z_C·S(ABD)) / S(ABC)`, with signed
//! areas of the unperturbed triangles. The `z`s are independent standard
//! normals, so
//!
//! `p = E[∏_D Φ(−(z_A·S(BCD) − z_B·S(ACD) + z_C·S(ABD)) / S(ABC))]`.
//!
//! With `u = z_B − z_A`, `v = z_B − z_C` each factor becomes
//! `Φ(u·S(BCD)/S(ABC) + v·S(ABD)/S(ABC) − z_B)`. Far from the triangle these
//! coefficients grow like `n²`, so the factors are steep walls through the
//! origin of the `(u, v)` plane. The integral is therefore taken in polar
//! coordinates: angle outermost with breakpoints at the walls, then the
//! logarithm of the radius, then `z_B` given `(u, v)` by Gauss–Hermite.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::baselines::{corner_uniform_prob, to_f64, uniform_triangle_prob};
use crate::error::{Error, Result};
use crate::geom::{signed_area, triangle_area};
use crate::pointsets::polygon_vertex;
use crate::quadrature::{integrate, normal_expectation_rule};
use crate::simulate::estimate_triangle_frequencies;
use crate::stats::{log_normal_cdf, normal_pdf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerIntegralSpec {
    pub n: usize,
    /// 1-based labels, counter-clockwise.
    pub triangle: [usize; 3],
    /// Gauss–Hermite nodes for the inner variable; the adaptive tolerances of
    /// the outer integrals shrink with it.
    pub nodes: usize,
    /// Radial cut-off of the outer integral, in standard deviations of the
    /// widest direction.
    pub half_width: f64,
    /// Largest accepted change under node doubling.
    pub tolerance: f64,
}

impl CornerIntegralSpec {
    pub const DEFAULT_NODES: usize = 16;
    pub const DEFAULT_HALF_WIDTH: f64 = 9.0;
    pub const DEFAULT_TOLERANCE: f64 = 1e-3;

    /// The corner triangle `1, 2, 3` of the regular `n`-gon.
    pub fn corner(n: usize) -> Self {
        Self {
            n,
            triangle: [1, 2, 3],
            nodes: Self::DEFAULT_NODES,
            half_width: Self::DEFAULT_HALF_WIDTH,
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidArgument(format!(
                "corner integral needs n >= 4, got {}",
                self.n
            )));
        }
        if self.nodes < 8 {
            return Err(Error::InvalidArgument(format!(
                "need at least 8 nodes, got {}",
                self.nodes
            )));
        }
        let [a, b, c] = self.triangle;
        if !(1 <= a && a < b && b < c && c <= self.n) {
            return Err(Error::InvalidArgument(format!(
                "triangle must be increasing labels in 1..={}, got {:?}",
                self.n, self.triangle
            )));
        }
        if !(self.half_width > 0.0 && self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(
                "half_width and tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn vertex(n: usize, label: usize) -> crate::geom::Point2 {
    polygon_vertex(n, label - 1)
}

/// Unsigned areas `(S(BCD), S(ACD), S(ABD), S(ABC))` of the unperturbed
/// regular `n`-gon.
pub fn sub_areas(n: usize, a: usize, b: usize, c: usize, d: usize) -> Result<(f64, f64, f64, f64)> {
    let labels = [a, b, c, d];
    if labels.iter().any(|&l| l == 0 || l > n) {
        return Err(Error::InvalidArgument(format!("labels {labels:?} outside 1..={n}")));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if labels[i] == labels[j] {
                return Err(Error::InvalidArgument(format!("labels {labels:?} not distinct")));
            }
        }
    }
    let [pa, pb, pc, pd] = labels.map(|l| vertex(n, l));
    Ok((
        triangle_area(pb, pc, pd)?,
        triangle_area(pa, pc, pd)?,
        triangle_area(pa, pb, pd)?,
        triangle_area(pa, pb, pc)?,
    ))
}

/// Per-vertex coefficients `(S(BCD), S(ACD), S(ABD)) / S(ABC)` with signed
/// areas, for every `D` outside the triangle.
fn coefficients(spec: &CornerIntegralSpec) -> Vec<[f64; 3]> {
    let [a, b, c] = spec.triangle.map(|l| vertex(spec.n, l));
    let abc = signed_area(a, b, c);
    (1..=spec.n)
        .filter(|l| !spec.triangle.contains(l))
        .map(|l| {
            let d = vertex(spec.n, l);
            [
                signed_area(b, c, d) / abc,
                signed_area(a, c, d) / abc,
                signed_area(a, b, d) / abc,
            ]
        })
        .collect()
}

/// `∏_D Φ(−(z_A·S(BCD) − z_B·S(ACD) + z_C·S(ABD)) / S(ABC)) · φ(z_A)φ(z_B)φ(z_C)`.
pub fn corner_integrand(z_a: f64, z_b: f64, z_c: f64, spec: &CornerIntegralSpec) -> Result<f64> {
    spec.validate()?;
    let log_prod: f64 = coefficients(spec)
        .iter()
        .map(|[bcd, acd, abd]| log_normal_cdf(-(z_a * bcd - z_b * acd + z_c * abd)))
        .sum();
    Ok(log_prod.exp() * normal_pdf(z_a) * normal_pdf(z_b) * normal_pdf(z_c))
}

/// Outcome of [`corner_probability`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerResult {
    pub n: usize,
    pub probability: f64,
    /// `|fine − coarse|` between `nodes` and `2·nodes`.
    pub error_estimate: f64,
    pub coarse: f64,
    pub fine: f64,
    pub nodes: usize,
}

struct Evaluator {
    /// `(S(BCD), S(ABD)) / S(ABC)` per outside vertex.
    walls: Vec<(f64, f64)>,
    w_nodes: Vec<f64>,
    w_weights: Vec<f64>,
}

const INNER_SD: f64 = 0.577_350_269_189_625_8; // sqrt(1/3)
/// Beyond this many standard deviations a factor is 0 or 1 to double precision.
const SATURATED: f64 = 9.0;

impl Evaluator {
    fn new(spec: &CornerIntegralSpec, nodes: usize) -> Self {
        let walls = coefficients(spec).iter().map(|c| (c[0], c[2])).collect();
        let (w_nodes, w_weights) = normal_expectation_rule(nodes);
        Self {
            walls,
            w_nodes,
            w_weights,
        }
    }

    /// `E[∏_D Φ(a_D − w)]` with `w ~ N((u + v)/3, 1/3)`.
    fn inner(&self, u: f64, v: f64, active: &mut Vec<f64>) -> f64 {
        let mean = (u + v) / 3.0;
        let lo = mean - SATURATED * INNER_SD;
        let hi = mean + SATURATED * INNER_SD;
        active.clear();
        for &(r1, r2) in &self.walls {
            let a = u * r1 + v * r2;
            if a - hi > SATURATED {
                continue;
            }
            if a - lo < -SATURATED {
                return 0.0;
            }
            active.push(a);
        }
        let mut total = 0.0;
        for (x, wt) in self.w_nodes.iter().zip(&self.w_weights) {
            let w = mean + INNER_SD * x;
            let log_prod: f64 = active.iter().map(|a| log_normal_cdf(a - w)).sum();
            total += wt * log_prod.exp();
        }
        total
    }

    /// Integral over the ray at angle `phi`, in `s = ln ρ`.
    fn ray(&self, phi: f64, rho_max: f64, tol: f64) -> Result<f64> {
        let (cs, sn) = (phi.cos(), phi.sin());
        // Density of (u, v) ~ N(0, [[2, 1], [1, 2]]) along the ray.
        let q = (2.0 * cs * cs - 2.0 * cs * sn + 2.0 * sn * sn) / 3.0;
        let norm = 1.0 / (2.0 * PI * 3f64.sqrt());
        let mut active = Vec::new();
        let f = |s: f64| {
            let rho = s.exp();
            rho * rho * norm * (-0.5 * q * rho * rho).exp() * self.inner(rho * cs, rho * sn, &mut active)
        };
        // The disc of radius 1e-6 carries probability below 1e-12.
        let s_lo = (1e-6f64).ln();
        let s_hi = rho_max.ln();
        integrate(f, s_lo, s_hi, tol, 40).map(|r| r.0)
    }

    fn integral(&self, rho_max: f64, tol: f64) -> Result<f64> {
        // Wall angles: a_D(φ) = 0 where R1 cos φ + R2 sin φ = 0.
        let mut breaks: Vec<f64> = vec![0.0, 2.0 * PI];
        for &(r1, r2) in &self.walls {
            let phi = (-r1).atan2(r2).rem_euclid(PI);
            breaks.push(phi);
            breaks.push(phi + PI);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi - lo < 1e-15 {
                continue;
            }
            let share = tol * (hi - lo) / (2.0 * PI);
            let mut err = None;
            let (v, _) = integrate(
                |phi| match self.ray(phi, rho_max, tol / (4.0 * PI)) {
                    Ok(x) => x,
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                },
                lo,
                hi,
                share,
                30,
            )?;
            if let Some(e) = err {
                return Err(e);
            }
            total += v;
        }
        Ok(total)
    }
}

fn evaluate(spec: &CornerIntegralSpec, nodes: usize) -> Result<f64> {
    let tol = 1e-5 * (CornerIntegralSpec::DEFAULT_NODES as f64 / nodes as f64).powi(2);
    let rho_max = spec.half_width * 3f64.sqrt();
    Evaluator::new(spec, nodes).integral(rho_max, tol)
}

/// First-order probability that `spec.triangle` is a Delaunay triangle of
/// the perturbed regular `spec.n`-gon. Evaluated with `nodes` and
/// `2·nodes`; fails with [`Error::AccuracyFailure`] if the two differ by
/// more than `spec.tolerance`.
pub fn corner_probability(spec: &CornerIntegralSpec) -> Result<CornerResult> {
    spec.validate()?;
    let coarse = evaluate(spec, spec.nodes)?;
    let fine = evaluate(spec, 2 * spec.nodes)?;
    let error_estimate = (fine - coarse).abs();
    if !(error_estimate <= spec.tolerance) {
        return Err(Error::AccuracyFailure { coarse, fine });
    }
    Ok(CornerResult {
        n: spec.n,
        probability: fine.clamp(0.0, 1.0),
        error_estimate,
        coarse,
        fine,
        nodes: spec.nodes,
    })
}

/// Estimates at increasing node counts, for convergence checks.
pub fn corner_convergence(spec: &CornerIntegralSpec, node_counts: &[usize]) -> Result<Vec<f64>> {
    spec.validate()?;
    node_counts.iter().map(|&k| evaluate(spec, k)).collect()
}

/// One line of the corner-probability table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerRow {
    pub n: usize,
    /// Quadrature value; absent when it failed.
    pub p: Option<f64>,
    pub p_error: Option<f64>,
    /// Monte Carlo frequency pooled over the `n` corner triangles.
    pub q: Option<f64>,
    pub q_standard_error: Option<f64>,
    pub q_discards: Option<u64>,
    /// Uniform baseline `C_{n−3} / C_{n−2}`.
    pub r: f64,
    pub r_exact: String,
}

/// Rows for each `n`; Monte Carlo columns only when `mc_iterations > 0`.
/// A quadrature that misses `tolerance` leaves `p` empty instead of failing
/// the whole table.
pub fn corner_table(
    ns: &[usize],
    nodes: usize,
    tolerance: f64,
    mc_iterations: u64,
    master_seed: u64,
) -> Result<Vec<CornerRow>> {
    ns.iter()
        .map(|&n| {
            let spec = CornerIntegralSpec {
                nodes,
                tolerance,
                ..CornerIntegralSpec::corner(n)
            };
            let p = match corner_probability(&spec) {
                Ok(r) => Some(r),
                Err(Error::AccuracyFailure { .. }) => None,
                Err(e) => return Err(e),
            };
            let mc = if mc_iterations > 0 {
                let rep = estimate_triangle_frequencies(n, mc_iterations, master_seed)?;
                let c = rep.corner().cloned();
                Some((c, rep.discards))
            } else {
                None
            };
            let r = corner_uniform_prob(n);
            Ok(CornerRow {
                n,
                p: p.map(|r| r.probability),
                p_error: p.map(|r| r.error_estimate),
                q: mc.as_ref().and_then(|(c, _)| c.as_ref().map(|c| c.frequency)),
                q_standard_error: mc.as_ref().and_then(|(c, _)| c.as_ref().map(|c| c.standard_error)),
                q_discards: mc.as_ref().map(|(_, d)| *d),
                r: to_f64(&r),
                r_exact: r.to_string(),
            })
        })
        .collect()
}

pub fn corner_table_csv(rows: &[CornerRow]) -> String {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut out = String::from("n,p_n,p_error,q_n,q_standard_error,r_n,r_exact\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            opt(r.p),
            opt(r.p_error),
            opt(r.q),
            opt(r.q_standard_error),
            r.r,
            r.r_exact
        ));
    }
    out
}

/// Uniform baseline for an arbitrary triangle of the `n`-gon.
pub fn uniform_baseline(spec: &CornerIntegralSpec) -> Result<f64> {
    let [a, b, c] = spec.triangle;
    Ok(to_f64(&uniform_triangle_prob(spec.n, a, b, c)?))
}
