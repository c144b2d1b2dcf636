//! End-to-end acceptance checks, one test per criterion. Each test prints a
//! single `PASS`/`FAIL` line with the measured values before asserting.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{incircle_oracle, near_cocircular, near_collinear, orient_oracle};
use degen_dt::analytic::{grid2_distribution, polygon_distribution, probability_levels};
use degen_dt::baselines::{catalan, corner_uniform_prob, to_f64, uniform_prob_for_arcs};
use degen_dt::corner::{corner_probability, corner_table, CornerIntegralSpec};
use degen_dt::geom::{incircle_unchecked, orient2d_unchecked};
use degen_dt::largegrid::{
    component_census, count_components_G, count_components_hat, walk_statistics, GridModel, DEFAULT_CAP,
};
use degen_dt::simulate::{estimate_grid_distribution, estimate_polygon_distribution, estimate_triangle_frequencies};
use degen_dt::stats::one_sided_p_value;
use degen_dt::triangulate::{canonical_class, GridCode};

const SEED: u64 = 20_240_601;
const ITERS: u64 = 1_000_000;

fn verdict(id: u32, title: &str, ok: bool, detail: String) {
    println!(
        "[criterion {id:2}] {} {title}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} failed: {detail}");
}

fn ratio(num: usize, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[test]
fn criterion_01_unit_grid_diagonals_are_fair() {
    let t = Instant::now();
    let r = estimate_grid_distribution(1, ITERS, SEED).unwrap();
    let elapsed = t.elapsed();
    let freqs: Vec<f64> = r.entries.iter().map(|e| e.frequency).collect();
    let ok = freqs.len() == 2
        && freqs.iter().all(|f| (f - 0.5).abs() <= 0.002)
        && r.count_sum() == ITERS - r.discards
        && elapsed <= Duration::from_secs(60);
    verdict(1, "grid m=1", ok, format!("frequencies {freqs:?}, {elapsed:.2?}"));
}

#[test]
fn criterion_02_grid2_analytic_levels() {
    let t = Instant::now();
    let entries = grid2_distribution(5e-5).unwrap();
    let levels = probability_levels(&entries, 1e-6);
    let sizes: Vec<usize> = levels.iter().map(|l| l.codes.len()).collect();
    let values: Vec<f64> = levels.iter().map(|l| l.probability).collect();
    let expected = [0.08422, 0.06088, 0.04401];
    let total = levels.iter().map(|l| l.probability * l.codes.len() as f64).sum::<f64>();
    let ok = entries.len() == 16
        && sizes == [4, 8, 4]
        && values.iter().zip(expected).all(|(v, e)| (v - e).abs() <= 1e-3)
        && (total - 1.0).abs() <= 2e-3
        && t.elapsed() <= Duration::from_secs(300);
    verdict(
        2,
        "grid m=2 analytic",
        ok,
        format!("sizes {sizes:?}, values {values:.6?}, 4L+8M+4S = {total:.9}"),
    );
}

#[test]
fn criterion_03_grid2_empirical_matches_analytic() {
    let r = estimate_grid_distribution(2, ITERS, SEED).unwrap();
    let tv = r.total_variation().unwrap();
    let max_min = r.max_min_ratio().unwrap();
    let ok = r.entries.len() == 16 && tv < 0.01 && (max_min - 1.91).abs() <= 0.1;
    verdict(
        3,
        "grid m=2 empirical",
        ok,
        format!("TV {tv:.5}, max/min {max_min:.4}, discards {}", r.discards),
    );
}

#[test]
fn criterion_04_small_polygons() {
    let mut detail = Vec::new();
    let mut ok = true;
    for (n, expected, tol) in [(3usize, 1.0, 0.0), (4, 0.5, 0.005), (5, 0.2, 0.005)] {
        let r = estimate_polygon_distribution(n, ITERS, SEED, None).unwrap();
        let freqs: Vec<f64> = r.entries.iter().map(|e| e.frequency).collect();
        ok &= freqs.len() == catalan(n - 2).to_string().parse::<usize>().unwrap();
        ok &= freqs.iter().all(|f| (f - expected).abs() <= tol);
        let (lo, hi) = freqs.iter().fold((1.0f64, 0.0f64), |(a, b), f| (a.min(*f), b.max(*f)));
        detail.push(format!("n={n}: {} codes in [{lo:.4}, {hi:.4}]", freqs.len()));
    }
    verdict(4, "polygons n=3,4,5", ok, detail.join("; "));
}

#[test]
fn criterion_05_hexagon() {
    let analytic = polygon_distribution(6, 1e-6).unwrap();
    let sum: f64 = analytic.iter().map(|e| e.probability).sum();
    let r = estimate_polygon_distribution(6, ITERS, SEED, None).unwrap();
    let worst = r
        .entries
        .iter()
        .map(|e| (e.frequency - e.probability.unwrap()).abs())
        .fold(0.0, f64::max);
    let uniform = ratio(1, catalan(4));
    let ok = analytic.len() == 14
        && r.entries.len() == 14
        && (sum - 1.0).abs() <= 1e-6
        && worst <= 0.005
        && uniform == BigRational::new(1.into(), 14.into());
    verdict(
        5,
        "hexagon",
        ok,
        format!("sum {sum:.12}, max |freq - p| {worst:.5}, uniform {uniform}"),
    );
}

#[test]
fn criterion_06_heptagon() {
    let analytic = polygon_distribution(7, 1e-5).unwrap();
    let sum: f64 = analytic.iter().map(|e| e.probability).sum();
    let mut classes: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for e in &analytic {
        classes
            .entry(canonical_class(&e.code).to_string())
            .or_default()
            .push((e.probability, e.standard_error));
    }
    let constant = classes.values().all(|members| {
        let (p0, s0) = members[0];
        members
            .iter()
            .all(|&(p, s)| (p - p0).abs() <= (2.0 * (s * s + s0 * s0).sqrt()).max(1e-12))
    });
    let r = estimate_polygon_distribution(7, ITERS, SEED, None).unwrap();
    let worst = r
        .entries
        .iter()
        .map(|e| (e.frequency - e.probability.unwrap()).abs())
        .fold(0.0, f64::max);
    let ok = analytic.len() == 42 && classes.len() == 4 && (sum - 1.0).abs() <= 5e-3 && constant && worst <= 0.005;
    verdict(
        6,
        "heptagon",
        ok,
        format!(
            "sum {sum:.12}, {} classes, constant {constant}, max |freq - p| {worst:.5}",
            classes.len()
        ),
    );
}

#[test]
fn criterion_07_octagon_bias() {
    let r = estimate_polygon_distribution(8, ITERS, SEED, None).unwrap();
    let top = r.entries.first().unwrap().frequency;
    let min = r
        .entries
        .iter()
        .filter(|e| e.count > 0)
        .map(|e| e.frequency)
        .fold(1.0, f64::min);
    let uniform = 1.0 / 132.0;
    let ok = top >= 3.5 * uniform && top >= 10.0 * min;
    verdict(
        7,
        "octagon bias",
        ok,
        format!("top {top:.5} = {:.2} x 1/132, top/min {:.2}", top / uniform, top / min),
    );
}

#[test]
fn criterion_08_triangle_frequency_identity() {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 4..=10usize {
        let r = estimate_triangle_frequencies(n, 100_000, SEED + n as u64).unwrap();
        let exact = r.count_sum() == (n as u64 - 2) * (r.iterations - r.discards);
        ok &= exact;
        detail.push(format!("n={n}: sum {:.12}", r.frequency_sum()));
    }
    let r223 = uniform_prob_for_arcs(2, 2, 3);
    let r133 = uniform_prob_for_arcs(1, 3, 3);
    ok &= r223 == BigRational::new(2.into(), 42.into()) && r133 == BigRational::new(4.into(), 42.into());
    verdict(
        8,
        "triangle identity",
        ok,
        format!("{}; r(2,2,3) = {r223}, r(1,3,3) = {r133}", detail.join(", ")),
    );
}

#[test]
fn criterion_09_large_grid_dt_vs_uniform() {
    let t = Instant::now();
    let dt = component_census(40, 100, GridModel::DtPerturbed, SEED).unwrap();
    let ut = component_census(40, 100, GridModel::UniformDiagonals, SEED).unwrap();
    let p_cc = one_sided_p_value(
        ut.mean_components,
        ut.standard_error,
        dt.mean_components,
        dt.standard_error,
    );
    let dt_walk = walk_statistics(GridModel::DtPerturbed, 100_000, DEFAULT_CAP, SEED).unwrap();
    let ut_walk = walk_statistics(GridModel::UniformDiagonals, 100_000, DEFAULT_CAP, SEED).unwrap();
    let p_walk = dt_walk.p_value_greater(&ut_walk);
    let elapsed = t.elapsed();
    let ok = dt.mean_components < ut.mean_components
        && p_cc < 0.01
        && dt_walk.mean_capped > ut_walk.mean_capped
        && p_walk < 0.01
        && elapsed <= Duration::from_secs(1800);
    verdict(
        9,
        "large grid",
        ok,
        format!(
            "CC DT {:.2}±{:.2} vs UT {:.2}±{:.2} (p {p_cc:.2e}); walk DT {:.3}±{:.3} vs UT {:.3}±{:.3} (p {p_walk:.2e}); {elapsed:.1?}",
            dt.mean_components,
            dt.standard_error,
            ut.mean_components,
            ut.standard_error,
            dt_walk.mean_capped,
            dt_walk.standard_error,
            ut_walk.mean_capped,
            ut_walk.standard_error
        ),
    );
}

#[test]
fn criterion_10_component_identity() {
    let exhaustive = (0..512u64).all(|i| {
        let c = GridCode::from_index(3, i);
        count_components_hat(&c) == count_components_G(&c) + 1
    });
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let random = (0..10_000).all(|_| {
        let bits = (0..100).map(|_| rng.random::<bool>() as u8).collect();
        let c = GridCode::new(10, bits).unwrap();
        count_components_hat(&c) == count_components_G(&c) + 1
    });
    verdict(
        10,
        "CC identity",
        exhaustive && random,
        format!("all 512 at m=3: {exhaustive}; 10^4 random at m=10: {random}"),
    );
}

#[test]
fn criterion_11_corner_integral() {
    let p4 = corner_probability(&CornerIntegralSpec::corner(4)).unwrap().probability;
    let mut ok = (p4 - 0.5).abs() <= 1e-6;
    let mut detail = vec![format!("p4 {p4:.9}")];

    let checked = corner_table(&[8, 12, 16], CornerIntegralSpec::DEFAULT_NODES, 1e-3, 200_000, SEED).unwrap();
    for row in &checked {
        let (p, q) = (row.p.unwrap_or(f64::NAN), row.q.unwrap_or(f64::NAN));
        ok &= (p - q).abs() <= 0.01;
        detail.push(format!("n={} p {p:.5} q {q:.5}", row.n));
    }

    let large = corner_table(&[10, 20, 50, 100], CornerIntegralSpec::DEFAULT_NODES, 1e-3, 0, SEED).unwrap();
    let ps: Vec<f64> = large.iter().map(|r| r.p.unwrap_or(f64::NAN)).collect();
    let (lo, hi) = ps
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(*p), b.max(*p)));
    ok &= lo > 0.25 && hi - lo < 0.05;
    detail.push(format!("p over n=10,20,50,100 {ps:.5?}"));

    for row in checked.iter().chain(&large) {
        let n = row.n;
        ok &= corner_uniform_prob(n) == BigRational::new(BigInt::from(catalan(n - 3)), BigInt::from(catalan(n - 2)));
    }
    let r = |n: usize| to_f64(&corner_uniform_prob(n));
    ok &= (r(50) - 0.25).abs() < 0.01 && (r(50) - 0.25).abs() < (r(10) - 0.25).abs();
    detail.push(format!("r10 {:.4} r50 {:.4} r100 {:.4}", r(10), r(50), r(100)));
    verdict(11, "corner integral", ok, detail.join("; "));
}

#[test]
fn criterion_12_predicate_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = 0u32;
    for _ in 0..100_000 {
        let [a, b, c, d] = near_cocircular(&mut rng);
        mismatches += (incircle_unchecked(a, b, c, d) != incircle_oracle(a, b, c, d)) as u32;
        let [p, q, s] = near_collinear(&mut rng);
        mismatches += (orient2d_unchecked(p, q, s) != orient_oracle(p, q, s)) as u32;
    }
    verdict(
        12,
        "predicate exactness",
        mismatches == 0,
        format!("{mismatches} mismatches in 10^5 incircle + 10^5 orient2d"),
    );
}
