//! Catalan numbers and the uniform-random reference models.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};
use crate::pointsets::SeedSpec;
use crate::triangulate::GridCode;

/// Exact Catalan numbers `C_0..=C_k`.
#[derive(Debug, Clone)]
pub struct CatalanTable {
    values: Vec<BigUint>,
}

impl CatalanTable {
    /// Builds the table with the convolution recurrence.
    pub fn new(k: usize) -> Self {
        let mut values: Vec<BigUint> = Vec::with_capacity(k + 1);
        values.push(BigUint::one());
        for i in 0..k {
            let next = (0..=i).map(|j| &values[j] * &values[i - j]).sum();
            values.push(next);
        }
        Self { values }
    }

    pub fn get(&self, k: usize) -> &BigUint {
        &self.values[k]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `C_k = binom(2k, k) / (k + 1)`, computed by the product recurrence
/// `C_{i+1} = C_i · 2(2i + 1) / (i + 2)`.
pub fn catalan(k: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}

/// Arc lengths `(j - i, k - j, n - k + i)` of a vertex triple.
pub fn arcs(n: usize, i: usize, j: usize, k: usize) -> Result<(usize, usize, usize)> {
    if !(1 <= i && i < j && j < k && k <= n) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= i < j < k <= {n}, got ({i}, {j}, {k})"
        )));
    }
    Ok((j - i, k - j, n - k + i))
}

/// Probability that triangle `ijk` appears in a uniformly random
/// triangulation of the convex `n`-gon.
pub fn uniform_triangle_prob(n: usize, i: usize, j: usize, k: usize) -> Result<BigRational> {
    let (a, b, c) = arcs(n, i, j, k)?;
    Ok(uniform_prob_for_arcs(a, b, c))
}

/// `C_{a-1} C_{b-1} C_{c-1} / C_{a+b+c-2}`.
pub fn uniform_prob_for_arcs(a: usize, b: usize, c: usize) -> BigRational {
    let num = catalan(a - 1) * catalan(b - 1) * catalan(c - 1);
    let den = catalan(a + b + c - 2);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Uniform probability of the corner triangle `(1, 2, 3)`: `C_{n-3} / C_{n-2}`.
pub fn corner_uniform_prob(n: usize) -> BigRational {
    uniform_prob_for_arcs(1, 1, n - 2)
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Each cell's diagonal an independent fair coin.
pub fn sample_uniform_grid(m: usize, seed: SeedSpec) -> Result<GridCode> {
    if m < 1 {
        return Err(Error::InvalidArgument("grid needs m >= 1".into()));
    }
    let mut rng = seed.rng();
    let bits = (0..m * m).map(|_| rng.random::<bool>() as u8).collect();
    GridCode::new(m, bits)
}
