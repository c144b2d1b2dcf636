use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointsets::SeedSpec;
use crate::quadrature;
use crate::stats::{mean_sd, normal_cdf, normal_quantile};

use super::systems::{dot, HalfspaceSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrthantMethod {
    /// Spherical excess of the three-constraint triangle.
    Girard,
    /// Randomized quasi-Monte Carlo in the span of the normals.
    QuasiMonteCarlo,
    /// Four constraints: Plackett's reduction to a smooth one-dimensional
    /// integral, evaluated by adaptive quadrature.
    ClosedForm4D,
    /// Plain Monte Carlo in the full shift space.
    MonteCarloAmbient,
    /// Exact closed form for one or two constraints.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthantResult {
    pub probability: f64,
    pub standard_error: f64,
    pub method: OrthantMethod,
}

const RANK_TOL: f64 = 1e-10;

/// Lower-triangular `L` with `L Lᵀ = g`; fails unless `g` is positive definite.
pub fn cholesky(g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let k = g.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let s: f64 = (0..j).map(|p| l[i][p] * l[j][p]).sum();
            if i == j {
                let d = g[i][i] - s;
                if d <= RANK_TOL {
                    return Err(Error::DegenerateSystem(format!(
                        "normals are linearly dependent (pivot {d:e} at {i})"
                    )));
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (g[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Dihedral angles `π − arccos(Nᵢ·Nⱼ)` between the bounding hyperplanes.
/// The diagonal is left at zero.
pub fn gram_angles(h: &HalfspaceSystem) -> Vec<Vec<f64>> {
    let g = h.gram();
    let k = h.len();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                out[i][j] = PI - g[i][j].clamp(-1.0, 1.0).acos();
            }
        }
    }
    out
}

/// Area of the spherical triangle cut out by three halfspaces, as a
/// fraction of the sphere: `(α + β + γ − π) / 4π`.
pub fn spherical_triangle_prob(h: &HalfspaceSystem) -> Result<OrthantResult> {
    if h.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "spherical triangle needs 3 halfspaces, got {}",
            h.len()
        )));
    }
    cholesky(&h.gram())?;
    let a = gram_angles(h);
    let excess = a[0][1] + a[0][2] + a[1][2] - PI;
    Ok(OrthantResult {
        probability: excess / (4.0 * PI),
        standard_error: 0.0,
        method: OrthantMethod::Girard,
    })
}

/// Sampling settings for [`orthant_prob`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QmcConfig {
    /// Randomly shifted copies of the point set; the spread of their means
    /// gives the standard error.
    pub replicates: usize,
    /// Points per replicate in the first round; doubled until the target is met.
    pub initial_points: usize,
    /// Upper bound on points per replicate.
    pub max_points: usize,
    pub seed: u64,
}

impl Default for QmcConfig {
    fn default() -> Self {
        Self {
            replicates: 16,
            initial_points: 1 << 14,
            max_points: 1 << 22,
            seed: 0x005e_ed0f_0a7a,
        }
    }
}

/// Additive recurrence `frac(i·α)` with the generalized golden ratio
/// directions, which has low discrepancy in any dimension.
struct Kronecker {
    alpha: Vec<f64>,
}

impl Kronecker {
    fn new(dim: usize) -> Self {
        // Unique positive root of x^(d+1) = x + 1.
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let alpha = (1..=dim).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect();
        Self { alpha }
    }

    fn point(&self, index: u64, shift: &[f64], out: &mut [f64]) {
        for ((o, a), s) in out.iter_mut().zip(&self.alpha).zip(shift) {
            // Splitting index·α keeps the product accurate for large indices.
            let hi = (index >> 20) as f64;
            let lo = (index & 0xf_ffff) as f64;
            let x = (hi * (a * (1u64 << 20) as f64).fract() + lo * a + s).fract();
            *o = x;
        }
    }
}

/// Genz's separation-of-variables integrand: the orthant probability of
/// `N(0, L Lᵀ)` equals `E_u[∏ eᵢ(u)]` over the unit cube of dimension `k−1`.
fn sov_integrand(l: &[Vec<f64>], u: &[f64], w: &mut [f64]) -> f64 {
    let k = l.len();
    let mut prod = 1.0;
    for i in 0..k {
        let s: f64 = (0..i).map(|j| l[i][j] * w[j]).sum();
        // Constraint i holds iff w_i > -s / L_ii.
        let lower = -s / l[i][i];
        let e = normal_cdf(-lower);
        prod *= e;
        if prod == 0.0 {
            return 0.0;
        }
        if i + 1 < k {
            // Draw w_i from N(0,1) truncated to (lower, ∞) via its upper tail.
            let v = ((1.0 - u[i]) * e).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16);
            w[i] = -normal_quantile(v);
        }
    }
    prod
}

/// Probability that a standard normal shift satisfies every constraint of
/// `h`. The normals' Gram matrix is the covariance of the projections, so the
/// computation runs in `k` dimensions whatever the ambient dimension. Up to
/// four constraints the result is deterministic; beyond that it falls back to
/// [`orthant_prob_with`] using the default sampling settings.
pub fn orthant_prob(h: &HalfspaceSystem, target_se: f64) -> Result<OrthantResult> {
    let exact = |p: f64, method| OrthantResult {
        probability: p,
        standard_error: 0.0,
        method,
    };
    match h.len() {
        1 => Ok(exact(0.5, OrthantMethod::Exact)),
        2 => {
            let g = h.gram();
            cholesky(&g)?;
            Ok(exact(0.25 + g[0][1].asin() / (2.0 * PI), OrthantMethod::Exact))
        }
        3 => spherical_triangle_prob(h),
        4 => Ok(exact(orthant_prob_4d(&h.gram())?, OrthantMethod::ClosedForm4D)),
        _ => orthant_prob_with(h, target_se, &QmcConfig::default()),
    }
}

/// Orthant probability of a 4-variate normal with correlation matrix `r`.
///
/// Along `R(t) = I + t(R − I)` the derivative of the orthant probability with
/// respect to `ρᵢⱼ` is the bivariate density at the origin times the orthant
/// probability of the remaining pair conditioned on `Xᵢ = Xⱼ = 0`, which is
/// `1/4 + asin(ρ_kl·ij)/2π`. Integrating over `t ∈ [0, 1]` gives the result.
pub fn orthant_prob_4d(r: &[Vec<f64>]) -> Result<f64> {
    if r.len() != 4 || r.iter().any(|row| row.len() != 4) {
        return Err(Error::InvalidArgument("orthant_prob_4d needs a 4x4 matrix".into()));
    }
    cholesky(r)?;
    const PAIRS: [(usize, usize, usize, usize); 6] = [
        (0, 1, 2, 3),
        (0, 2, 1, 3),
        (0, 3, 1, 2),
        (1, 2, 0, 3),
        (1, 3, 0, 2),
        (2, 3, 0, 1),
    ];
    let integrand = |t: f64| -> f64 {
        let c = |a: usize, b: usize| if a == b { 1.0 } else { t * r[a][b] };
        let mut sum = 0.0;
        for &(i, j, k, l) in &PAIRS {
            let rho = c(i, j);
            if rho == 0.0 {
                continue;
            }
            // Conditional covariance of (k, l) given (i, j).
            let det = 1.0 - rho * rho;
            let cond = |a: usize, b: usize| {
                let (ai, aj, bi, bj) = (c(a, i), c(a, j), c(b, i), c(b, j));
                c(a, b) - (ai * bi - rho * (ai * bj + aj * bi) + aj * bj) / det
            };
            let partial = (cond(k, l) / (cond(k, k) * cond(l, l)).sqrt()).clamp(-1.0, 1.0);
            let density = r[i][j] / (2.0 * PI * det.sqrt());
            sum += density * (0.25 + partial.asin() / (2.0 * PI));
        }
        sum
    };
    let (v, _) = quadrature::integrate(integrand, 0.0, 1.0, 1e-14, 48)?;
    Ok((1.0 / 16.0 + v).clamp(0.0, 1.0))
}

/// Randomized quasi-Monte Carlo estimate for any number of constraints.
/// Points are doubled until the replicate standard error meets `target_se`
/// on two consecutive rounds, which guards against stopping on a round whose
/// replicates happen to agree by chance.
pub fn orthant_prob_with(h: &HalfspaceSystem, target_se: f64, config: &QmcConfig) -> Result<OrthantResult> {
    let l = cholesky(&h.gram())?;
    let k = l.len();
    if k == 1 {
        return Ok(OrthantResult {
            probability: 0.5,
            standard_error: 0.0,
            method: OrthantMethod::Exact,
        });
    }
    let mut met_once = false;
    let seq = Kronecker::new(k - 1);
    let shifts: Vec<Vec<f64>> = (0..config.replicates)
        .map(|r| {
            let mut rng = SeedSpec::new(config.seed, r as u64).rng();
            (0..k - 1).map(|_| rng.random::<f64>()).collect()
        })
        .collect();
    // Per replicate running sums; rounds add the next block of points.
    let mut sums = vec![0.0f64; config.replicates];
    let mut done = 0usize;
    let mut target_points = config.initial_points.max(1);
    loop {
        let range = done as u64..target_points as u64;
        let block: Vec<f64> = shifts
            .par_iter()
            .map(|shift| {
                let mut u = vec![0.0; k - 1];
                let mut w = vec![0.0; k];
                let mut acc = 0.0;
                for i in range.clone() {
                    seq.point(i, shift, &mut u);
                    acc += sov_integrand(&l, &u, &mut w);
                }
                acc
            })
            .collect();
        for (s, b) in sums.iter_mut().zip(block) {
            *s += b;
        }
        done = target_points;
        let means: Vec<f64> = sums.iter().map(|s| s / done as f64).collect();
        let (mean, sd) = mean_sd(&means);
        let se = sd / (config.replicates as f64).sqrt();
        if se <= target_se && met_once {
            return Ok(OrthantResult {
                probability: mean,
                standard_error: se,
                method: OrthantMethod::QuasiMonteCarlo,
            });
        }
        met_once = se <= target_se;
        if done >= config.max_points {
            return Err(Error::BudgetExceeded {
                estimate: mean,
                standard_error: se,
                target: target_se,
            });
        }
        target_points = (done * 2).min(config.max_points);
    }
}

/// Plain Monte Carlo over standard normal vectors in the full ambient space.
/// Independent of the reduction used by [`orthant_prob`].
pub fn orthant_prob_ambient(h: &HalfspaceSystem, samples: u64, seed: u64) -> OrthantResult {
    const CHUNK: u64 = 1 << 14;
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = SeedSpec::new(seed, c).rng();
            let mut v = vec![0.0; h.dim];
            let count = CHUNK.min(samples - c * CHUNK);
            let mut hits = 0u64;
            for _ in 0..count {
                for x in v.iter_mut() {
                    *x = StandardNormal.sample(&mut rng);
                }
                if h.normals.iter().all(|n| dot(n, &v) > 0.0) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    OrthantResult {
        probability: p,
        standard_error: (p * (1.0 - p) / samples as f64).sqrt(),
        method: OrthantMethod::MonteCarloAmbient,
    }
}
