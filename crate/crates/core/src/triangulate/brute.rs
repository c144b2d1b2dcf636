use crate::error::{Error, Result};
use crate::geom::{incircle_unchecked, orient2d_unchecked, Sign};
use crate::pointsets::PointSet;

use super::Triangulation;

pub const BRUTE_FORCE_MAX_POINTS: usize = 32;

/// Every triangle whose circumcircle is empty of the other points.
///
/// Cubic in the number of triples; intended as a test oracle.
pub fn brute_force_dt(set: &PointSet) -> Result<Triangulation> {
    let pts = &set.points;
    let n = pts.len();
    if !(3..=BRUTE_FORCE_MAX_POINTS).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "brute force handles 3..={BRUTE_FORCE_MAX_POINTS} points, got {n}"
        )));
    }
    let mut tris = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let tri = match orient2d_unchecked(pts[i], pts[j], pts[k]) {
                    Sign::Positive => [i, j, k],
                    Sign::Negative => [i, k, j],
                    Sign::Zero => continue,
                };
                let mut empty = true;
                for q in 0..n {
                    if tri.contains(&q) {
                        continue;
                    }
                    match incircle_unchecked(pts[tri[0]], pts[tri[1]], pts[tri[2]], pts[q]) {
                        Sign::Negative => {}
                        Sign::Positive => {
                            empty = false;
                            break;
                        }
                        Sign::Zero => {
                            return Err(Error::Degenerate(format!(
                                "vertices {}, {}, {}, {} are cocircular",
                                tri[0] + 1,
                                tri[1] + 1,
                                tri[2] + 1,
                                q + 1
                            )))
                        }
                    }
                }
                if empty {
                    tris.push(tri.map(|v| v + 1));
                }
            }
        }
    }
    Ok(Triangulation::from_ccw(tris))
}
