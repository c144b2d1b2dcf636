use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{incircle_unchecked, Sign};
use crate::pointsets::{grid_label, PointSet, PointSetKind};

use super::Triangulation;

/// Diagonal choice of every cell of an `m × m` grid.
///
/// `bits[j * m + i]` belongs to the cell whose bottom-left corner is `(i, j)`.
/// A set bit is the positive-slope diagonal `(i, j)–(i+1, j+1)`; a clear bit
/// is the negative-slope diagonal `(i+1, j)–(i, j+1)`.
///
/// The text form lists rows top to bottom, one string of `0`/`1` per row
/// separated by `/`, so that it reads like the drawn grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCode {
    m: usize,
    bits: Vec<u8>,
}

/// Cell position, bottom-left corner at `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridCell {
    pub i: usize,
    pub j: usize,
}

impl GridCell {
    /// Corner labels `[bottom-left, bottom-right, top-right, top-left]`.
    pub fn corners(&self, m: usize) -> [usize; 4] {
        let (i, j) = (self.i, self.j);
        [
            grid_label(m, i, j),
            grid_label(m, i + 1, j),
            grid_label(m, i + 1, j + 1),
            grid_label(m, i, j + 1),
        ]
    }
}

impl GridCode {
    pub fn new(m: usize, bits: Vec<u8>) -> Result<Self> {
        if m == 0 || bits.len() != m * m || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "grid code needs {} binary entries",
                m * m
            )));
        }
        Ok(Self { m, bits })
    }

    /// Code whose bits are the low `m²` bits of `index`, cell `(0,0)` first.
    pub fn from_index(m: usize, index: u64) -> Self {
        let bits = (0..m * m).map(|k| ((index >> k) & 1) as u8).collect();
        Self { m, bits }
    }

    pub fn index(&self) -> u64 {
        self.bits.iter().enumerate().map(|(k, &b)| (b as u64) << k).sum()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// `true` for the positive-slope diagonal.
    pub fn is_slash(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.m + i] == 1
    }

    pub fn set(&mut self, i: usize, j: usize, slash: bool) {
        self.bits[j * self.m + i] = slash as u8;
    }

    pub fn flipped(&self, i: usize, j: usize) -> Self {
        let mut c = self.clone();
        c.set(i, j, !self.is_slash(i, j));
        c
    }

    pub fn cells(m: usize) -> impl Iterator<Item = GridCell> {
        (0..m).flat_map(move |j| (0..m).map(move |i| GridCell { i, j }))
    }
}

impl fmt::Display for GridCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in (0..self.m).rev() {
            for i in 0..self.m {
                write!(f, "{}", self.bits[j * self.m + i])?;
            }
            if j > 0 {
                f.write_str("/")?;
            }
        }
        Ok(())
    }
}

impl FromStr for GridCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.split('/').collect();
        let m = rows.len();
        let mut bits = vec![0u8; m * m];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidArgument(format!("bad grid code row {row:?}")));
            }
            let j = m - 1 - r;
            for (i, ch) in row.chars().enumerate() {
                bits[j * m + i] = match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::InvalidArgument(format!("bad grid code {s:?}"))),
                };
            }
        }
        GridCode::new(m, bits)
    }
}

impl Serialize for GridCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Delaunay diagonals of a slightly perturbed grid.
///
/// Each cell is decided by `incircle(bl, br, tr, tl)`: the top-left corner
/// outside the circle through the other three keeps triangle `bl, br, tr`,
/// which is the positive-slope diagonal.
pub fn grid_dt(perturbed: &PointSet) -> Result<GridCode> {
    let PointSetKind::Grid(m) = perturbed.kind else {
        return Err(Error::InvalidArgument("grid_dt needs a grid point set".into()));
    };
    let mut bits = Vec::with_capacity(m * m);
    for cell in GridCode::cells(m) {
        let [bl, br, tr, tl] = cell.corners(m).map(|l| perturbed.label(l));
        match incircle_unchecked(bl, br, tr, tl) {
            Sign::Negative => bits.push(1),
            Sign::Positive => bits.push(0),
            Sign::Zero => {
                return Err(Error::Degenerate(format!(
                    "cocircular corners in cell ({}, {})",
                    cell.i, cell.j
                )))
            }
        }
    }
    Ok(GridCode { m, bits })
}

/// Reads the cell diagonals off a full triangulation of a grid.
pub fn grid_code_of(m: usize, tri: &Triangulation) -> Result<GridCode> {
    let mut bits = Vec::with_capacity(m * m);
    for cell in GridCode::cells(m) {
        let [bl, br, tr, tl] = cell.corners(m);
        match (tri.has_edge(bl, tr), tri.has_edge(br, tl)) {
            (true, false) => bits.push(1),
            (false, true) => bits.push(0),
            _ => {
                return Err(Error::Internal(format!(
                    "cell ({}, {}) is not split by exactly one diagonal",
                    cell.i, cell.j
                )))
            }
        }
    }
    Ok(GridCode { m, bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2;
    use crate::pointsets::make_grid;

    #[test]
    fn unperturbed_grid_is_degenerate() {
        let g = make_grid(2).unwrap();
        assert!(matches!(grid_dt(&g), Err(Error::Degenerate(_))));
    }

    #[test]
    fn single_cell_mapping() {
        // Top-left pulled toward the center lies inside the circle of the
        // other three corners, so the negative-slope diagonal wins.
        let mut g = make_grid(1).unwrap();
        g.points[2] = Point2::new(0.001, 0.999);
        assert_eq!(grid_dt(&g).unwrap().bits(), &[0]);
        // Pushed outward it lies outside, leaving the positive slope.
        g.points[2] = Point2::new(-0.001, 1.001);
        assert_eq!(grid_dt(&g).unwrap().bits(), &[1]);
    }

    #[test]
    fn text_form() {
        let c = GridCode::new(2, vec![1, 0, 0, 1]).unwrap();
        assert_eq!(c.to_string(), "01/10");
        assert_eq!("01/10".parse::<GridCode>().unwrap(), c);
        assert!("01/1".parse::<GridCode>().is_err());
        assert!("0x/10".parse::<GridCode>().is_err());
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, "\"01/10\"");
        assert_eq!(GridCode::from_index(2, c.index()), c);
    }
}
