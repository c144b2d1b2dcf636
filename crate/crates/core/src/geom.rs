//! Exact-sign planar predicates.
//!
//! Both predicates first evaluate the determinant in floating point together
//! with a forward error bound. When the bound does not separate the value
//! from zero, the determinant is recomputed exactly on big integers obtained
//! by scaling every input coordinate to a common binary exponent.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    fn of_big(v: &BigInt) -> Sign {
        if v.is_positive() {
            Sign::Positive
        } else if v.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn reversed(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

const EPSILON: f64 = f64::EPSILON * 0.5;
const CCW_ERRBOUND: f64 = (3.0 + 16.0 * EPSILON) * EPSILON;
const ICC_ERRBOUND: f64 = (10.0 + 96.0 * EPSILON) * EPSILON;

fn check_finite(points: &[Point2]) -> Result<()> {
    if points.iter().all(Point2::is_finite) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite coordinate".into()))
    }
}

/// Orientation of the triple: `Positive` for counter-clockwise order.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> Result<Sign> {
    check_finite(&[a, b, c])?;
    Ok(orient2d_unchecked(a, b, c))
}

/// [`orient2d`] without the finiteness check.
pub fn orient2d_unchecked(a: Point2, b: Point2, c: Point2) -> Sign {
    let detleft = (a.x - c.x) * (b.y - c.y);
    let detright = (a.y - c.y) * (b.x - c.x);
    let det = detleft - detright;
    let detsum = detleft.abs() + detright.abs();
    if det.abs() > CCW_ERRBOUND * detsum {
        return Sign::of(det);
    }
    orient2d_exact(a, b, c)
}

/// Incircle test on a counter-clockwise triangle `abc`: `Positive` iff `d`
/// lies strictly inside the circumcircle.
pub fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> Result<Sign> {
    check_finite(&[a, b, c, d])?;
    if orient2d_unchecked(a, b, c) != Sign::Positive {
        return Err(Error::Precondition(
            "incircle requires a counter-clockwise triangle".into(),
        ));
    }
    Ok(incircle_unchecked(a, b, c, d))
}

/// Sign of the incircle determinant with no orientation or finiteness check.
///
/// For a clockwise triangle the meaning of the sign is reversed.
pub fn incircle_unchecked(a: Point2, b: Point2, c: Point2, d: Point2) -> Sign {
    let adx = a.x - d.x;
    let bdx = b.x - d.x;
    let cdx = c.x - d.x;
    let ady = a.y - d.y;
    let bdy = b.y - d.y;
    let cdy = c.y - d.y;

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;

    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;

    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    if det.abs() > ICC_ERRBOUND * permanent {
        return Sign::of(det);
    }
    incircle_exact(a, b, c, d)
}

/// Splits a finite double into an integer mantissa and a binary exponent.
fn decompose(v: f64) -> (i64, i32) {
    if v == 0.0 {
        return (0, 0);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & 0x000f_ffff_ffff_ffff) as i64;
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp_bits - 1075)
    };
    (sign * mant, exp)
}

/// Scales the coordinates to integers sharing one exponent.
fn to_integers(values: &[f64]) -> Vec<BigInt> {
    let parts: Vec<(i64, i32)> = values.iter().map(|&v| decompose(v)).collect();
    let min_exp = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    parts
        .into_iter()
        .map(|(m, e)| BigInt::from(m) << ((e - min_exp) as usize))
        .collect()
}

fn orient2d_exact(a: Point2, b: Point2, c: Point2) -> Sign {
    let v = to_integers(&[a.x, a.y, b.x, b.y, c.x, c.y]);
    let (ax, ay, bx, by, cx, cy) = (&v[0], &v[1], &v[2], &v[3], &v[4], &v[5]);
    let det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
    Sign::of_big(&det)
}

fn incircle_exact(a: Point2, b: Point2, c: Point2, d: Point2) -> Sign {
    let v = to_integers(&[a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y]);
    let adx = &v[0] - &v[6];
    let ady = &v[1] - &v[7];
    let bdx = &v[2] - &v[6];
    let bdy = &v[3] - &v[7];
    let cdx = &v[4] - &v[6];
    let cdy = &v[5] - &v[7];
    let alift = &adx * &adx + &ady * &ady;
    let blift = &bdx * &bdx + &bdy * &bdy;
    let clift = &cdx * &cdx + &cdy * &cdy;
    let det =
        alift * (&bdx * &cdy - &cdx * &bdy) + blift * (&cdx * &ady - &adx * &cdy) + clift * (&adx * &bdy - &bdx * &ady);
    Sign::of_big(&det)
}

/// Unsigned area of the triangle (shoelace formula).
pub fn triangle_area(a: Point2, b: Point2, c: Point2) -> Result<f64> {
    check_finite(&[a, b, c])?;
    if orient2d_unchecked(a, b, c) == Sign::Zero {
        return Ok(0.0);
    }
    Ok(signed_area(a, b, c).abs())
}

/// Signed area, positive for counter-clockwise triangles.
pub fn signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))
}
