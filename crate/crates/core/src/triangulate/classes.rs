use std::collections::BTreeMap;

use super::polygon::PolygonCode;

/// Images of `code` under the `2n` rotations and reflections of the polygon.
pub fn dihedral_images(code: &PolygonCode) -> Vec<PolygonCode> {
    let n = code.n;
    let mut out = Vec::with_capacity(2 * n);
    for reflect in [false, true] {
        for r in 0..n {
            let map = |v: usize| {
                let z = v - 1;
                let z = if reflect { (n - z) % n } else { z };
                (z + r) % n + 1
            };
            let mut diagonals: Vec<(usize, usize)> = code
                .diagonals
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (map(a), map(b));
                    (x.min(y), x.max(y))
                })
                .collect();
            diagonals.sort_unstable();
            out.push(PolygonCode::from_sorted_unchecked(n, diagonals));
        }
    }
    out
}

/// Lexicographically smallest diagonal list in the dihedral orbit.
pub fn canonical_class(code: &PolygonCode) -> PolygonCode {
    dihedral_images(code)
        .into_iter()
        .min_by(|a, b| a.diagonals.cmp(&b.diagonals))
        .expect("orbit is non-empty")
}

/// All `C(n-2)` triangulations of the convex `n`-gon, sorted.
pub fn enumerate_polygon_codes(n: usize) -> Vec<PolygonCode> {
    assert!(n >= 3, "polygon needs n >= 3");
    let mut out: Vec<PolygonCode> = sub_triangulations(1, n)
        .into_iter()
        .map(|mut d| {
            d.sort_unstable();
            PolygonCode::from_sorted_unchecked(n, d)
        })
        .collect();
    out.sort();
    out
}

/// Diagonal sets triangulating the sub-polygon `lo..=hi` (chord `lo–hi` excluded).
fn sub_triangulations(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    if hi - lo < 2 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for apex in lo + 1..hi {
        let left = sub_triangulations(lo, apex);
        let right = sub_triangulations(apex, hi);
        for l in &left {
            for r in &right {
                let mut d = Vec::with_capacity(l.len() + r.len() + 2);
                d.extend_from_slice(l);
                d.extend_from_slice(r);
                if apex - lo >= 2 {
                    d.push((lo, apex));
                }
                if hi - apex >= 2 {
                    d.push((apex, hi));
                }
                out.push(d);
            }
        }
    }
    out
}

/// Groups all triangulations of the `n`-gon by canonical class, in
/// increasing order of the representative.
pub fn isomorphism_classes(n: usize) -> BTreeMap<PolygonCode, Vec<PolygonCode>> {
    let mut classes: BTreeMap<PolygonCode, Vec<PolygonCode>> = BTreeMap::new();
    for code in enumerate_polygon_codes(n) {
        classes.entry(canonical_class(&code)).or_default().push(code);
    }
    classes
}
