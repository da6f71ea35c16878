use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::complex::{cells_at_level, CellComplex};
use super::field::{range_of, NumericMode, VertexField, DEFAULT_GUARD};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelQuery {
    pub r: f64,
    /// Minimum separation from vertex values in floating mode.
    pub guard: f64,
}

impl LevelQuery {
    pub fn new(r: f64) -> Self {
        LevelQuery { r, guard: DEFAULT_GUARD }
    }

    pub fn with_guard(r: f64, guard: f64) -> Self {
        LevelQuery { r, guard }
    }

    /// Rejects `r` when it is (too close to) a vertex value of the field.
    pub fn check(&self, field: &VertexField) -> Result<()> {
        if !self.r.is_finite() {
            return Err(Error::Guard(format!("level {} is not finite", self.r)));
        }
        for (v, &x) in field.values() {
            let bad = match field.mode() {
                NumericMode::Exact => x == self.r,
                NumericMode::Float => (x - self.r).abs() < self.guard,
            };
            if bad {
                return Err(Error::Guard(format!("level {} is within the guard of f{v:?} = {x}", self.r)));
            }
        }
        Ok(())
    }
}

pub fn straddles(vals: &[f64], r: f64) -> bool {
    vals.iter().any(|&x| x < r) && vals.iter().any(|&x| x > r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellFront<Cell> {
    pub level: u32,
    pub cells: Vec<Cell>,
}

impl<Cell> CellFront<Cell> {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

fn check_level(field: &VertexField, n: u32) -> Result<()> {
    if n > field.depth() {
        return Err(Error::Parameter(format!("level {n} is deeper than the field depth {}", field.depth())));
    }
    Ok(())
}

/// Cells at level `n` whose vertex values strictly straddle `r`.
pub fn build_front<C: CellComplex>(
    cx: &C,
    field: &VertexField,
    n: u32,
    query: &LevelQuery,
) -> Result<CellFront<C::Cell>> {
    check_level(field, n)?;
    query.check(field)?;
    let cells = cells_at_level(cx, n)
        .into_iter()
        .filter(|&c| straddles(&field.cell_values(cx, c), query.r))
        .collect();
    Ok(CellFront { level: n, cells })
}

/// Whether the union of the intervals covers `[lo, hi]`.
pub fn intervals_cover(target: (f64, f64), intervals: &[(f64, f64)]) -> bool {
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = target.0;
    for (a, b) in sorted {
        if a > reach {
            break;
        }
        reach = reach.max(b);
    }
    reach >= target.1
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellCoverReport {
    pub parent: (f64, f64),
    pub children: Vec<(f64, f64)>,
    pub covered: bool,
}

/// The value range of a cell's vertices is covered by the union of the
/// ranges of its children.
pub fn cover_audit<C: CellComplex>(cx: &C, field: &VertexField, cell: C::Cell) -> Result<CellCoverReport> {
    if cx.level(cell) >= field.depth() {
        return Err(Error::Parameter("cell has no sampled children".into()));
    }
    let parent = field.cell_range(cx, cell);
    let children: Vec<(f64, f64)> = cx.children(cell).into_iter().map(|c| field.cell_range(cx, c)).collect();
    let covered = intervals_cover(parent, &children);
    Ok(CellCoverReport { parent, children, covered })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeNode<Cell> {
    pub cell: Cell,
    /// Index of the parent in the previous level.
    pub parent: Option<u32>,
    pub first_child: u32,
    pub child_count: u32,
}

/// All chains of front cells below a root front cell, level by level.
#[derive(Clone, Debug)]
pub struct DescendantTree<Cell> {
    pub root_level: u32,
    pub levels: Vec<Vec<TreeNode<Cell>>>,
}

impl<Cell: Copy> DescendantTree<Cell> {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level_cells(&self, k: usize) -> impl Iterator<Item = Cell> + '_ {
        self.levels[k].iter().map(|n| n.cell)
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }
}

pub fn descend<C: CellComplex>(
    cx: &C,
    field: &VertexField,
    root: C::Cell,
    query: &LevelQuery,
    k: u32,
) -> Result<DescendantTree<C::Cell>> {
    let root_level = cx.level(root);
    check_level(field, root_level + k)?;
    query.check(field)?;
    if !straddles(&field.cell_values(cx, root), query.r) {
        return Err(Error::Contract(format!("cell {root} is not in the front of level {}", query.r)));
    }
    let mut levels = vec![vec![TreeNode { cell: root, parent: None, first_child: 0, child_count: 0 }]];
    for _ in 0..k {
        let prev = levels.last_mut().unwrap();
        let mut next = Vec::new();
        for (pi, node) in prev.iter_mut().enumerate() {
            node.first_child = next.len() as u32;
            for child in cx.children(node.cell) {
                if straddles(&field.cell_values(cx, child), query.r) {
                    next.push(TreeNode { cell: child, parent: Some(pi as u32), first_child: 0, child_count: 0 });
                }
            }
            node.child_count = next.len() as u32 - node.first_child;
        }
        levels.push(next);
    }
    Ok(DescendantTree { root_level, levels })
}

/// Node masses of a descendant tree, each stored as the unit fraction
/// `1 / denominators[k][i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMeasure {
    pub denominators: Vec<Vec<u128>>,
}

pub fn build_measure<Cell: Copy>(tree: &DescendantTree<Cell>) -> Result<LevelMeasure> {
    let mut denominators = vec![vec![1u128]];
    for k in 1..tree.levels.len() {
        if tree.levels[k].is_empty() {
            return Err(Error::Parameter(format!("descendant tree is empty at depth {k}")));
        }
        let prev_nodes = &tree.levels[k - 1];
        let prev_den = &denominators[k - 1];
        let mut row = Vec::with_capacity(tree.levels[k].len());
        for node in &tree.levels[k] {
            let p = node.parent.expect("non-root nodes have parents") as usize;
            let d = prev_den[p]
                .checked_mul(prev_nodes[p].child_count as u128)
                .ok_or_else(|| Error::Budget("measure denominator overflows 128 bits".into()))?;
            row.push(d);
        }
        denominators.push(row);
    }
    Ok(LevelMeasure { denominators })
}

impl LevelMeasure {
    pub fn mu_f64(&self, k: usize, i: usize) -> f64 {
        1.0 / self.denominators[k][i] as f64
    }

    /// Exact total mass of depth `k`.
    pub fn level_total(&self, k: usize) -> BigRational {
        self.denominators[k].iter().fold(BigRational::zero(), |acc, &d| {
            acc + BigRational::new(BigInt::one(), BigInt::from(d))
        })
    }
}

pub fn write_tree_jsonl<Cell: Copy + std::fmt::Display, W: Write>(
    tree: &DescendantTree<Cell>,
    measure: Option<&LevelMeasure>,
    out: &mut W,
) -> io::Result<()> {
    for (k, level) in tree.levels.iter().enumerate() {
        for (i, node) in level.iter().enumerate() {
            let lvl = tree.root_level as usize + k;
            match measure {
                Some(m) => writeln!(
                    out,
                    "{{\"level\":{lvl},\"cell\":\"{}\",\"mu\":\"1/{}\"}}",
                    node.cell, m.denominators[k][i]
                )?,
                None => writeln!(out, "{{\"level\":{lvl},\"cell\":\"{}\"}}", node.cell)?,
            }
        }
    }
    Ok(())
}

/// Range of the vertex values inside each cell down to the field depth,
/// computed bottom-up.
pub fn subtree_ranges<C: CellComplex>(
    cx: &C,
    field: &VertexField,
) -> rustc_hash::FxHashMap<C::Cell, (f64, f64)> {
    let mut out = rustc_hash::FxHashMap::default();
    fn walk<C: CellComplex>(
        cx: &C,
        field: &VertexField,
        cell: C::Cell,
        out: &mut rustc_hash::FxHashMap<C::Cell, (f64, f64)>,
    ) -> (f64, f64) {
        let own = range_of(&field.cell_values(cx, cell));
        let r = if cx.level(cell) >= field.depth() {
            own
        } else {
            cx.children(cell).into_iter().fold(own, |(lo, hi), c| {
                let (a, b) = walk(cx, field, c, out);
                (lo.min(a), hi.max(b))
            })
        };
        out.insert(cell, r);
        r
    }
    for root in cx.roots() {
        walk(cx, field, root, &mut out);
    }
    out
}
