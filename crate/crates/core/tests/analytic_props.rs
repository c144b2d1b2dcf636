use degen_dt::analytic::{
    build_tree, grid2_halfspaces, orthant_prob, orthant_prob_ambient, polygon_halfspaces, HalfspaceSystem,
};
use degen_dt::geom::{incircle, Sign};
use degen_dt::pointsets::{make_polygon, perturb, PerturbationParams, PointSet, SeedSpec};
use degen_dt::triangulate::{convex_polygon_dt, enumerate_polygon_codes, GridCode, PolygonCode};
use proptest::prelude::*;

fn some_system(pick: usize) -> HalfspaceSystem {
    if pick < 16 {
        grid2_halfspaces(&GridCode::from_index(2, pick as u64)).unwrap()
    } else {
        let codes = enumerate_polygon_codes(7);
        polygon_halfspaces(&codes[(pick - 16) % codes.len()]).unwrap()
    }
}

fn shift(original: &PointSet, moved: &PointSet) -> Vec<f64> {
    original
        .points
        .iter()
        .zip(&moved.points)
        .flat_map(|(p, q)| [q.x - p.x, q.y - p.y])
        .collect()
}

/// Exact check of every tree constraint of `code` on the perturbed points.
fn tree_holds(code: &PolygonCode, p: &PointSet) -> bool {
    let tree = build_tree(code);
    tree.edges.iter().all(|&(u, v)| {
        let parent = tree.nodes[u];
        let apex = *tree.nodes[v].iter().find(|x| !parent.contains(x)).unwrap();
        let [a, b, c] = parent.map(|l| p.label(l));
        incircle(a, b, c, p.label(apex)).unwrap() == Sign::Negative
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn probabilities_ignore_gradient_scaling(pick in 0usize..58, scales in prop::collection::vec(0.01..100.0f64, 4)) {
        let h = some_system(pick);
        let scaled = HalfspaceSystem::from_gradients(
            h.dim,
            h.normals.iter().zip(&scales).map(|(n, s)| n.iter().map(|v| v * s).collect()).collect(),
        ).unwrap();
        let a = orthant_prob(&h, 1e-4).unwrap().probability;
        let b = orthant_prob(&scaled, 1e-4).unwrap().probability;
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn adding_a_halfspace_never_increases_probability(pick in 0usize..58, extra in prop::collection::vec(-1.0..1.0f64, 18)) {
        let h = some_system(pick);
        let normal: Vec<f64> = extra.into_iter().take(h.dim).collect();
        prop_assume!(normal.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let base = orthant_prob(&h, 1e-4).unwrap();
        let more = orthant_prob(&h.with_extra(normal).unwrap(), 2e-4).unwrap();
        prop_assert!((0.0..=1.0).contains(&base.probability));
        prop_assert!((0.0..=1.0).contains(&more.probability));
        let slack = 3.0 * (base.standard_error + more.standard_error) + 1e-12;
        prop_assert!(more.probability <= base.probability + slack, "{} > {}", more.probability, base.probability);
    }
}

#[test]
fn reduced_probabilities_match_ambient_sampling() {
    let codes = enumerate_polygon_codes(7);
    let mut systems: Vec<HalfspaceSystem> = (0..16)
        .map(|i| grid2_halfspaces(&GridCode::from_index(2, i)).unwrap())
        .collect();
    systems.extend(codes.iter().step_by(3).map(|c| polygon_halfspaces(c).unwrap()));
    for (k, h) in systems.iter().enumerate() {
        let reduced = orthant_prob(h, 1e-5).unwrap();
        let ambient = orthant_prob_ambient(h, 200_000, 40 + k as u64);
        let se = (reduced.standard_error.powi(2) + ambient.standard_error.powi(2)).sqrt();
        assert!(
            (reduced.probability - ambient.probability).abs() <= 3.0 * se.max(1e-6),
            "system {k}: {} vs {} (se {se})",
            reduced.probability,
            ambient.probability
        );
    }
}

#[test]
fn heptagon_tree_constraints_characterize_the_triangulation() {
    let poly = make_polygon(7).unwrap();
    let params = PerturbationParams::for_set(&poly).unwrap();
    let codes = enumerate_polygon_codes(7);
    for i in 0..10_000 {
        let p = perturb(&poly, &params, SeedSpec::new(3, i)).unwrap();
        let (dt, _) = convex_polygon_dt(&p).unwrap();
        for code in &codes {
            assert_eq!(tree_holds(code, &p), *code == dt, "iteration {i}, code {code}");
        }
    }
}

#[test]
fn first_order_constraints_agree_with_exact_predicates() {
    let poly = make_polygon(7).unwrap();
    let params = PerturbationParams::for_set(&poly).unwrap();
    let codes = enumerate_polygon_codes(7);
    let systems: Vec<HalfspaceSystem> = codes.iter().map(|c| polygon_halfspaces(c).unwrap()).collect();
    let samples = 100_000u64;
    let mut sign_total = 0u64;
    let mut sign_agree = 0u64;
    let mut code_agree = vec![0u64; codes.len()];
    for i in 0..samples {
        let p = perturb(&poly, &params, SeedSpec::new(9, i)).unwrap();
        let s = shift(&poly, &p);
        let (dt, _) = convex_polygon_dt(&p).unwrap();
        let dt_index = codes.iter().position(|c| *c == dt).unwrap();
        // Every tree constraint of every triangulation, linear vs exact.
        for (code, h) in codes.iter().zip(&systems) {
            let tree = build_tree(code);
            for (&(u, v), normal) in tree.edges.iter().zip(&h.normals) {
                let parent = tree.nodes[u];
                let apex = *tree.nodes[v].iter().find(|x| !parent.contains(x)).unwrap();
                let [a, b, c] = parent.map(|l| p.label(l));
                let exact = incircle(a, b, c, p.label(apex)).unwrap() == Sign::Negative;
                let linear = normal.iter().zip(&s).map(|(x, y)| x * y).sum::<f64>() > 0.0;
                sign_total += 1;
                sign_agree += (exact == linear) as u64;
            }
        }
        // For each fixed T: all of T's linear constraints hold <=> the DT is T.
        for (k, h) in systems.iter().enumerate() {
            code_agree[k] += (h.contains(&s) == (k == dt_index)) as u64;
        }
    }
    let sign_rate = sign_agree as f64 / sign_total as f64;
    let worst = *code_agree.iter().min().unwrap() as f64 / samples as f64;
    assert!(sign_rate >= 0.999, "constraint agreement {sign_rate}");
    assert!(worst >= 0.999, "worst per-triangulation agreement {worst}");
}
