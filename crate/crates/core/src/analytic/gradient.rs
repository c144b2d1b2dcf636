use crate::geom::Point2;

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Gradient of the incircle determinant
/// `det[x, y, x² + y², 1]` (rows `a, b, c, d`) with respect to
/// `(x_a, y_a, x_b, y_b, x_c, y_c, x_d, y_d)`.
///
/// Row `p` enters only through its own entries, so
/// `∂/∂x_p = cof(p, 0) + 2 x_p cof(p, 2)` and
/// `∂/∂y_p = cof(p, 1) + 2 y_p cof(p, 2)`.
pub fn incircle_gradient(a: Point2, b: Point2, c: Point2, d: Point2) -> [f64; 8] {
    let pts = [a, b, c, d];
    let rows: [[f64; 4]; 4] = pts.map(|p| [p.x, p.y, p.x * p.x + p.y * p.y, 1.0]);
    let cofactor = |r: usize, col: usize| {
        let mut minor = [[0.0; 3]; 3];
        for (mi, ri) in (0..4).filter(|&i| i != r).enumerate() {
            for (mj, cj) in (0..4).filter(|&j| j != col).enumerate() {
                minor[mi][mj] = rows[ri][cj];
            }
        }
        let sign = if (r + col).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * det3(minor)
    };
    let mut grad = [0.0; 8];
    for (r, p) in pts.iter().enumerate() {
        let c2 = cofactor(r, 2);
        grad[2 * r] = cofactor(r, 0) + 2.0 * p.x * c2;
        grad[2 * r + 1] = cofactor(r, 1) + 2.0 * p.y * c2;
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det4(pts: [Point2; 4]) -> f64 {
        // Direct Laplace expansion along the last column.
        let rows = pts.map(|p| [p.x, p.y, p.x * p.x + p.y * p.y]);
        let mut total = 0.0;
        for r in 0..4 {
            let mut minor = [[0.0; 3]; 3];
            for (mi, ri) in (0..4).filter(|&i| i != r).enumerate() {
                minor[mi] = rows[ri];
            }
            let sign = if (r + 3) % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * det3(minor);
        }
        total
    }

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn matches_central_differences() {
        let pts = [p(0.3, -0.2), p(1.1, 0.4), p(0.2, 1.3), p(-0.7, 0.5)];
        let grad = incircle_gradient(pts[0], pts[1], pts[2], pts[3]);
        let h = 1e-6;
        for k in 0..8 {
            let mut plus = pts;
            let mut minus = pts;
            if k % 2 == 0 {
                plus[k / 2].x += h;
                minus[k / 2].x -= h;
            } else {
                plus[k / 2].y += h;
                minus[k / 2].y -= h;
            }
            let fd = (det4(plus) - det4(minus)) / (2.0 * h);
            assert!((fd - grad[k]).abs() < 1e-7, "coordinate {k}: {fd} vs {}", grad[k]);
        }
    }

    #[test]
    fn grid_cells_match_linearized_system() {
        // Cell I: labels 1, 2, 5, 4 at (0,0), (1,0), (1,1), (0,1).
        let g = incircle_gradient(p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.));
        let expected = [-1., -1., -1., 1., 1., 1., 1., -1.];
        let scale = g[0] / expected[0];
        assert!(scale > 0.0);
        for k in 0..8 {
            assert!((g[k] - scale * expected[k]).abs() < 1e-12);
        }
        // Cell II: labels 2, 3, 6, 5 translate cell I by (1, 0).
        let g2 = incircle_gradient(p(1., 0.), p(2., 0.), p(2., 1.), p(1., 1.));
        for k in 0..8 {
            assert!((g2[k] - scale * expected[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_invariant() {
        let base = [p(0.1, 0.2), p(0.9, -0.3), p(1.4, 0.8), p(0.2, 1.1)];
        let g0 = incircle_gradient(base[0], base[1], base[2], base[3]);
        for (dx, dy) in [(3.0, -2.0), (-0.25, 7.5)] {
            let t = base.map(|q| p(q.x + dx, q.y + dy));
            let g1 = incircle_gradient(t[0], t[1], t[2], t[3]);
            for k in 0..8 {
                assert!((g0[k] - g1[k]).abs() < 1e-9);
            }
        }
    }
}
