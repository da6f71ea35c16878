//! Addresses of Sierpiński triangle cells.
//!
//! A cell at level `l` is stored as integer coordinates `(i, j)` of its A-type
//! corner on the grid of spacing `2^-l`; its vertices are `(i, j)`,
//! `(i + 1, j)`, `(i, j + 1)`. Digit `d` selects the child containing the
//! parent's corner `d` (0 = A, 1 = B, 2 = C), which sets bit 0 of `i` for
//! digit 1 and of `j` for digit 2.

use std::fmt;
use std::str::FromStr;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{BaryPoint, Triangle};

pub const MAX_LEVEL: u8 = 31;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriCell {
    pub i: u32,
    pub j: u32,
    pub level: u8,
}

impl TriCell {
    pub const ROOT: TriCell = TriCell { i: 0, j: 0, level: 0 };

    pub fn child(self, digit: u8) -> TriCell {
        debug_assert!(digit < 3 && self.level < MAX_LEVEL);
        TriCell {
            i: (self.i << 1) | (digit == 1) as u32,
            j: (self.j << 1) | (digit == 2) as u32,
            level: self.level + 1,
        }
    }

    pub fn children(self) -> [TriCell; 3] {
        [self.child(0), self.child(1), self.child(2)]
    }

    pub fn parent(self) -> Option<TriCell> {
        (self.level > 0).then(|| TriCell { i: self.i >> 1, j: self.j >> 1, level: self.level - 1 })
    }

    pub fn ancestor(self, level: u8) -> TriCell {
        assert!(level <= self.level);
        let s = self.level - level;
        TriCell { i: self.i >> s, j: self.j >> s, level }
    }

    pub fn last_digit(self) -> Option<u8> {
        if self.level == 0 {
            None
        } else if self.i & 1 == 1 {
            Some(1)
        } else if self.j & 1 == 1 {
            Some(2)
        } else {
            Some(0)
        }
    }

    /// Digit at position `k` (1-based, `k <= level`).
    pub fn digit(self, k: u8) -> u8 {
        let shift = self.level - k;
        if (self.i >> shift) & 1 == 1 {
            1
        } else if (self.j >> shift) & 1 == 1 {
            2
        } else {
            0
        }
    }

    pub fn digits(self) -> Vec<u8> {
        (1..=self.level).map(|k| self.digit(k)).collect()
    }

    pub fn from_digits(digits: &[u8]) -> Result<TriCell> {
        if digits.len() > MAX_LEVEL as usize {
            return Err(Error::Budget(format!("address longer than {MAX_LEVEL} digits")));
        }
        let mut c = TriCell::ROOT;
        for &d in digits {
            if d > 2 {
                return Err(Error::Parse(format!("digit {d} is not in {{0,1,2}}")));
            }
            c = c.child(d);
        }
        Ok(c)
    }

    /// Vertices as grid coordinates at this cell's own level.
    pub fn grid_vertices(self) -> [(u64, u64); 3] {
        let (i, j) = (self.i as u64, self.j as u64);
        [(i, j), (i + 1, j), (i, j + 1)]
    }

    /// Vertices as grid coordinates at a finer level `scale >= level`.
    pub fn grid_vertices_at(self, scale: u8) -> [(u64, u64); 3] {
        let s = scale - self.level;
        self.grid_vertices().map(|(a, b)| (a << s, b << s))
    }

    pub fn triangle(self) -> Triangle {
        let k = self.level as u32;
        Triangle {
            vertices: self
                .grid_vertices()
                .map(|(a, b)| BaryPoint::new(Dyadic::new(a as i64, k), Dyadic::new(b as i64, k))),
        }
    }

    pub fn meets_ab(self) -> bool {
        self.j == 0
    }

    /// Base-3 rank of the address among cells of the same level.
    pub fn ternary_index(self) -> u64 {
        (1..=self.level).fold(0u64, |acc, k| acc * 3 + self.digit(k) as u64)
    }

    pub fn is_ancestor_or_self_of(self, other: TriCell) -> bool {
        self.level <= other.level && other.ancestor(self.level) == self
    }
}

/// Comma-separated digits, e.g. `0,2,1`; the root prints as the empty string.
impl fmt::Display for TriCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<String> = self.digits().iter().map(u8::to_string).collect();
        write!(f, "{}", digits.join(","))
    }
}

impl fmt::Debug for TriCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriCell[{self}]")
    }
}

impl FromStr for TriCell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(TriCell::ROOT);
        }
        let digits = s
            .split(',')
            .map(|t| t.trim().parse::<u8>().map_err(|_| Error::Parse(format!("bad digit {t:?}"))))
            .collect::<Result<Vec<u8>>>()?;
        TriCell::from_digits(&digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let c = TriCell::from_digits(&[0, 2, 1, 1, 0]).unwrap();
        assert_eq!(c.digits(), vec![0, 2, 1, 1, 0]);
        assert_eq!(c.to_string().parse::<TriCell>().unwrap(), c);
        assert_eq!(c.last_digit(), Some(0));
        assert_eq!(c.parent().unwrap().last_digit(), Some(1));
        assert_eq!(c.i & c.j, 0);
    }

    #[test]
    fn corner_children_contain_corners() {
        for d in 0..3u8 {
            let child = TriCell::ROOT.child(d).triangle();
            assert!(child.vertices.contains(&BaryPoint::corner(d as usize)));
        }
        let t = TriCell::from_digits(&[1]).unwrap().triangle();
        assert_eq!(
            t.vertices,
            [
                BaryPoint::from_parts(1, 1, 0, 0),
                BaryPoint::b(),
                BaryPoint::from_parts(1, 1, 1, 1)
            ]
        );
    }

    #[test]
    fn ternary_index_orders_siblings() {
        let cells: Vec<u64> = TriCell::ROOT.children().iter().map(|c| c.ternary_index()).collect();
        assert_eq!(cells, vec![0, 1, 2]);
        assert_eq!(TriCell::from_digits(&[2, 1]).unwrap().ternary_index(), 7);
    }
}
