//! The level-1 squares of the cross fractal and their classification.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported grid exponent; local indices fit in a `u32` and the
/// level-1 table stays below 2^24 entries.
pub const MAX_M: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Thin {
    Vertical,
    Horizontal,
}

/// Which squares count as neighbours of a corner square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub enum Adjacency {
    /// Sharing an edge.
    Edge,
    /// Sharing an edge or a corner.
    #[default]
    EdgeOrCorner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SquareType {
    Type1,
    Type2,
    Type3,
    Type4,
}

impl SquareType {
    pub fn index(self) -> usize {
        match self {
            SquareType::Type1 => 0,
            SquareType::Type2 => 1,
            SquareType::Type3 => 2,
            SquareType::Type4 => 3,
        }
    }

    /// Denominator of the conductivity factor.
    pub fn factor_den(self, l: u32) -> u32 {
        match self {
            SquareType::Type1 => 1,
            SquareType::Type2 => 2,
            SquareType::Type3 => 3,
            SquareType::Type4 => l,
        }
    }
}

impl fmt::Display for SquareType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type{}", self.index() + 1)
    }
}

/// Position of a retained square inside its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SquareClass {
    pub thin: Option<Thin>,
    /// Depth inside its thick square; `None` for thin squares.
    pub depth: Option<u32>,
    pub kind: SquareType,
}

impl SquareClass {
    /// Short label for tables: thinV, thinH or thick(l), then the type.
    pub fn label(&self) -> String {
        let shape = match (self.thin, self.depth) {
            (Some(Thin::Vertical), _) => "thinV".to_string(),
            (Some(Thin::Horizontal), _) => "thinH".to_string(),
            (None, Some(d)) => format!("thick({d})"),
            (None, None) => "thick".to_string(),
        };
        format!("{shape}/{}", self.kind)
    }
}

#[derive(Clone, Debug)]
pub struct CrossModel {
    m: u32,
    /// Retained squares `(column, row)`, sorted by row then column.
    squares: Vec<(u32, u32)>,
    /// Index into `squares` for every grid cell, or `u32::MAX` if omitted.
    lookup: Vec<u32>,
}

impl CrossModel {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::Parameter(format!("m = {m}: the cross needs m >= 2")));
        }
        if m > MAX_M {
            return Err(Error::Budget(format!("m = {m} exceeds {MAX_M}")));
        }
        let side = 1u32 << m;
        let mut squares = Vec::new();
        let mut lookup = vec![u32::MAX; (side * side) as usize];
        for j in 0..side {
            for i in 0..side {
                if retained(m, i, j) {
                    lookup[(j * side + i) as usize] = squares.len() as u32;
                    squares.push((i, j));
                }
            }
        }
        let model = CrossModel { m, squares, lookup };
        if !model.is_connected() {
            return Err(Error::Construction(format!("the level-1 squares for m = {m} are not connected")));
        }
        Ok(model)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn side(&self) -> u32 {
        1 << self.m
    }

    pub fn p(&self) -> usize {
        self.squares.len()
    }

    pub fn squares(&self) -> &[(u32, u32)] {
        &self.squares
    }

    pub fn index_of(&self, i: u32, j: u32) -> Option<u32> {
        if i >= self.side() || j >= self.side() {
            return None;
        }
        let k = self.lookup[(j * self.side() + i) as usize];
        (k != u32::MAX).then_some(k)
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        self.index_of(i, j).is_some()
    }

    /// Edge-connectivity of the retained squares.
    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.squares.len()];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(k) = queue.pop_front() {
            let (i, j) = self.squares[k as usize];
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a < 0 || b < 0 {
                    continue;
                }
                if let Some(n) = self.index_of(a as u32, b as u32) {
                    if !seen[n as usize] {
                        seen[n as usize] = true;
                        count += 1;
                        queue.push_back(n);
                    }
                }
            }
        }
        count == self.squares.len()
    }

    /// Whether the square is thin: a vertical (horizontal) line through it
    /// meets exactly two retained squares.
    pub fn thin(&self, i: u32, j: u32) -> Option<Thin> {
        let side = self.side();
        if (0..side).filter(|&r| self.contains(i, r)).count() == 2 {
            Some(Thin::Vertical)
        } else if (0..side).filter(|&c| self.contains(c, j)).count() == 2 {
            Some(Thin::Horizontal)
        } else {
            None
        }
    }

    /// `1 + ` the number of squares between this thick square and the
    /// boundary of its quadrant block.
    pub fn depth(&self, i: u32, j: u32) -> Option<u32> {
        if self.thin(i, j).is_some() || !self.contains(i, j) {
            return None;
        }
        let block = (1u32 << (self.m - 1)) - 1;
        let li = if i < block { i } else { i - (self.side() - block) };
        let lj = if j < block { j } else { j - (self.side() - block) };
        Some(1 + li.min(lj).min(block - 1 - li).min(block - 1 - lj))
    }

    fn is_corner(&self, i: u32, j: u32) -> bool {
        let last = self.side() - 1;
        (i == 0 || i == last) && (j == 0 || j == last)
    }

    fn touches_corner(&self, i: u32, j: u32, adj: Adjacency) -> bool {
        let last = self.side() - 1;
        [(0, 0), (last, 0), (0, last), (last, last)].iter().any(|&(a, b)| {
            let (di, dj) = (i.abs_diff(a), j.abs_diff(b));
            match adj {
                Adjacency::Edge => di + dj == 1,
                Adjacency::EdgeOrCorner => di.max(dj) == 1,
            }
        })
    }

    /// Type of a retained level-1 square. Depth at least `L/2` wins over the
    /// depth-below-`L` rule, so the four types partition the squares.
    pub fn classify(&self, i: u32, j: u32, l: u32, adj: Adjacency) -> Result<SquareClass> {
        if !self.contains(i, j) {
            return Err(Error::Parameter(format!("square ({i}, {j}) is not retained for m = {}", self.m)));
        }
        let thin = self.thin(i, j);
        let depth = self.depth(i, j);
        let kind = if self.is_corner(i, j) {
            SquareType::Type1
        } else if thin.is_some() || self.touches_corner(i, j, adj) {
            SquareType::Type2
        } else if 2 * depth.expect("thick square") >= l {
            SquareType::Type4
        } else {
            SquareType::Type3
        };
        Ok(SquareClass { thin, depth, kind })
    }
}

fn retained(m: u32, i: u32, j: u32) -> bool {
    let c0 = 1u32 << (m - 1);
    let last = (1u32 << m) - 1;
    let on_mid = i + 1 == c0 || i == c0 || j + 1 == c0 || j == c0;
    let on_side = i == 0 || j == 0 || i == last || j == last;
    !on_mid || on_side
}

/// `p(m) = 4^m - 2^{m+2} + 12`.
pub fn p_closed_form(m: u32) -> u64 {
    (1u64 << (2 * m)) - (1u64 << (m + 2)) + 12
}

/// Classification of all level-1 squares for one `(m, L)`, shared by the
/// audits.
#[derive(Clone, Debug)]
pub struct ClassTable {
    model: CrossModel,
    l: u32,
    adjacency: Adjacency,
    classes: Vec<SquareClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TypeCounts {
    pub t1: usize,
    pub t2: usize,
    pub t3: usize,
    pub t4: usize,
    pub thin: usize,
}

impl TypeCounts {
    pub fn total(&self) -> usize {
        self.t1 + self.t2 + self.t3 + self.t4
    }
}

impl ClassTable {
    pub fn new(model: CrossModel, l: u32, adjacency: Adjacency) -> Result<Self> {
        if l < 2 {
            return Err(Error::Parameter(format!("L = {l} must be at least 2")));
        }
        let classes = model
            .squares()
            .iter()
            .map(|&(i, j)| model.classify(i, j, l, adjacency))
            .collect::<Result<_>>()?;
        Ok(ClassTable { model, l, adjacency, classes })
    }

    pub fn model(&self) -> &CrossModel {
        &self.model
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn adjacency(&self) -> Adjacency {
        self.adjacency
    }

    pub fn class(&self, index: u32) -> SquareClass {
        self.classes[index as usize]
    }

    pub fn class_at(&self, i: u32, j: u32) -> Option<SquareClass> {
        self.model.index_of(i, j).map(|k| self.class(k))
    }

    pub fn counts(&self) -> TypeCounts {
        let mut t = [0usize; 4];
        for c in &self.classes {
            t[c.kind.index()] += 1;
        }
        let thin = self.classes.iter().filter(|c| c.thin.is_some()).count();
        TypeCounts { t1: t[0], t2: t[1], t3: t[2], t4: t[3], thin }
    }

    /// Conductivity of a square given by its path of level-1 indices.
    pub fn kappa(&self, path: &[u32]) -> BigRational {
        let den = path.iter().fold(BigInt::one(), |acc, &k| acc * self.class(k).kind.factor_den(self.l));
        BigRational::new(BigInt::one(), den)
    }
}
