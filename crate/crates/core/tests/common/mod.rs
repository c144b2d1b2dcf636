//! Shared helpers for the integration tests: an exact rational oracle for
//! the planar predicates and generators of near-degenerate inputs.
#![allow(dead_code)]

use degen_dt::geom::{Point2, Sign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coordinate")
}

fn sign_of(v: &BigRational) -> Sign {
    if v.is_zero() {
        Sign::Zero
    } else if v.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Orientation determinant evaluated in exact rational arithmetic.
pub fn orient_oracle(a: Point2, b: Point2, c: Point2) -> Sign {
    let (ax, ay, bx, by, cx, cy) = (rat(a.x), rat(a.y), rat(b.x), rat(b.y), rat(c.x), rat(c.y));
    let det = (&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx);
    sign_of(&det)
}

/// Incircle determinant evaluated in exact rational arithmetic.
pub fn incircle_oracle(a: Point2, b: Point2, c: Point2, d: Point2) -> Sign {
    let (dx, dy) = (rat(d.x), rat(d.y));
    let rel = |p: Point2| {
        let x = rat(p.x) - &dx;
        let y = rat(p.y) - &dy;
        let l = &x * &x + &y * &y;
        (x, y, l)
    };
    let (adx, ady, al) = rel(a);
    let (bdx, bdy, bl) = rel(b);
    let (cdx, cdy, cl) = rel(c);
    let det = &al * (&bdx * &cdy - &cdx * &bdy) + &bl * (&cdx * &ady - &adx * &cdy) + &cl * (&adx * &bdy - &bdx * &ady);
    sign_of(&det)
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo..hi))
}

/// A perturbation magnitude between 1e-16 and 1, or exactly zero.
fn tiny<R: Rng>(rng: &mut R) -> f64 {
    if rng.random_bool(0.1) {
        0.0
    } else {
        let m = log_uniform(rng, -16.0, 0.0);
        if rng.random_bool(0.5) {
            m
        } else {
            -m
        }
    }
}

/// Four points close to a common circle, the first three counter-clockwise.
pub fn near_cocircular<R: Rng>(rng: &mut R) -> [Point2; 4] {
    match rng.random_range(0..3) {
        0 => {
            let scale = log_uniform(rng, -3.0, 3.0);
            let c = Point2::new(rng.random_range(-1.0..1.0) * scale, rng.random_range(-1.0..1.0) * scale);
            let r = scale * rng.random_range(0.1..2.0);
            let mut t: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..std::f64::consts::TAU));
            t[..3].sort_by(f64::total_cmp);
            let e = tiny(rng);
            let at = |th: f64, rr: f64| Point2::new(c.x + rr * th.cos(), c.y + rr * th.sin());
            [at(t[0], r), at(t[1], r), at(t[2], r), at(t[3], r * (1.0 + e))]
        }
        1 => {
            // Corners of a grid cell, the fourth nudged.
            let i = rng.random_range(-50i32..50) as f64;
            let j = rng.random_range(-50i32..50) as f64;
            let mut p = [
                Point2::new(i, j),
                Point2::new(i + 1.0, j),
                Point2::new(i + 1.0, j + 1.0),
                Point2::new(i, j + 1.0),
            ];
            p[3].x += tiny(rng) * 1e-3;
            p[3].y += tiny(rng) * 1e-3;
            p
        }
        _ => {
            // Four vertices of a regular polygon, in order, with a nudge.
            let n = rng.random_range(5..200);
            let mut k: Vec<usize> = (0..n).collect();
            for s in 0..4 {
                let pick = rng.random_range(s..n);
                k.swap(s, pick);
            }
            let mut k = [k[0], k[1], k[2], k[3]];
            k[..3].sort_unstable();
            let th = |i: usize| std::f64::consts::TAU * i as f64 / n as f64;
            let mut p = k.map(|i| Point2::new(th(i).cos(), th(i).sin()));
            p[3].x += tiny(rng) * 1e-3;
            p[3].y += tiny(rng) * 1e-3;
            p
        }
    }
}

/// Three points close to a common line.
pub fn near_collinear<R: Rng>(rng: &mut R) -> [Point2; 3] {
    let scale = log_uniform(rng, -3.0, 3.0);
    let a = Point2::new(rng.random_range(-1.0..1.0) * scale, rng.random_range(-1.0..1.0) * scale);
    let b = Point2::new(rng.random_range(-1.0..1.0) * scale, rng.random_range(-1.0..1.0) * scale);
    let t = rng.random_range(-2.0..3.0);
    let e = tiny(rng) * scale;
    let c = Point2::new(
        a.x + t * (b.x - a.x) - e * (b.y - a.y),
        a.y + t * (b.y - a.y) + e * (b.x - a.x),
    );
    [a, b, c]
}
