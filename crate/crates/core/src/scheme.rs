//! The conductivity scheme on the Sierpiński triangle.
//!
//! Level-`n` members are produced from level-`n - 1` members `T`: the child of
//! `T` that repeats `T`'s last digit keeps `T`'s conductivity, and the six
//! grandchildren through the other two children get half of it.
//! Conductivities are stored as exponents: `kappa = 2^-k_exp`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::tri::TriCell;

/// Largest scheme index stored node by node by default.
pub const DEFAULT_EXHAUSTIVE_DEPTH: u32 = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchemeNode {
    pub cell: TriCell,
    pub n: u32,
    pub k_exp: u32,
}

#[derive(Clone, Debug)]
pub struct ConductivityAtlas {
    /// `levels[n - 1]` holds the members of the level-`n` scheme.
    levels: Vec<Vec<SchemeNode>>,
    complete: bool,
}

/// Exponent and role of an arbitrary cell under the scheme recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellRole {
    /// Member of the scheme with the given index.
    Member { n: u32, k_exp: u32 },
    /// A child of a member that is not itself a member (its children are).
    Intermediate { k_exp: u32 },
}

impl CellRole {
    pub fn k_exp(self) -> u32 {
        match self {
            CellRole::Member { k_exp, .. } | CellRole::Intermediate { k_exp } => k_exp,
        }
    }
}

/// Replays the recursion along the digits of `cell` (level >= 1).
pub fn cell_role(cell: TriCell) -> Option<CellRole> {
    if cell.level == 0 {
        return None;
    }
    let mut role = CellRole::Member { n: 1, k_exp: 0 };
    let mut last = cell.digit(1);
    let mut n = 1;
    for k in 2..=cell.level {
        let d = cell.digit(k);
        role = match role {
            CellRole::Member { k_exp, .. } if d == last => {
                n += 1;
                CellRole::Member { n, k_exp }
            }
            CellRole::Member { k_exp, .. } => CellRole::Intermediate { k_exp: k_exp + 1 },
            CellRole::Intermediate { k_exp } => {
                n += 1;
                CellRole::Member { n, k_exp }
            }
        };
        last = d;
    }
    Some(role)
}

impl ConductivityAtlas {
    /// Expands the scheme up to index `max_n`, stopping once more than
    /// `node_budget` nodes would be stored.
    pub fn expand(max_n: u32, node_budget: usize) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::Parameter("scheme depth must be at least 1".into()));
        }
        if 2 * max_n as u64 - 1 > crate::tri::MAX_LEVEL as u64 {
            return Err(Error::Budget(format!("scheme depth {max_n} exceeds the address width")));
        }
        let roots: Vec<SchemeNode> = TriCell::ROOT
            .children()
            .iter()
            .map(|&cell| SchemeNode { cell, n: 1, k_exp: 0 })
            .collect();
        let mut stored = roots.len();
        let mut levels = vec![roots];
        let mut complete = true;
        for n in 1..max_n {
            let prev = &levels[n as usize - 1];
            if stored + prev.len() * 7 > node_budget {
                complete = false;
                break;
            }
            let mut next = Vec::with_capacity(prev.len() * 7);
            for node in prev {
                let t = node.cell.last_digit().expect("members have level >= 1");
                for d in 0..3u8 {
                    let child = node.cell.child(d);
                    if d == t {
                        next.push(SchemeNode { cell: child, n: n + 1, k_exp: node.k_exp });
                    } else {
                        for g in child.children() {
                            next.push(SchemeNode { cell: g, n: n + 1, k_exp: node.k_exp + 1 });
                        }
                    }
                }
            }
            stored += next.len();
            levels.push(next);
        }
        Ok(ConductivityAtlas { levels, complete })
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn nodes(&self, n: u32) -> Result<&[SchemeNode]> {
        if n == 0 || n > self.depth() {
            return Err(Error::Parameter(format!("scheme index {n} outside 1..={}", self.depth())));
        }
        Ok(&self.levels[n as usize - 1])
    }

    /// Every node whose stored exponent differs from `level - n`.
    pub fn kappa_formula_violations(&self) -> Vec<SchemeNode> {
        self.levels
            .iter()
            .flatten()
            .filter(|node| node.k_exp as i64 != node.cell.level as i64 - node.n as i64)
            .copied()
            .collect()
    }

    pub fn histogram(&self, n: u32) -> Result<Histogram> {
        let mut total = BTreeMap::new();
        let mut per_root = [BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
        for node in self.nodes(n)? {
            *total.entry(node.k_exp).or_insert(0u128) += 1;
            *per_root[node.cell.digit(1) as usize].entry(node.k_exp).or_insert(0u128) += 1;
        }
        Ok(Histogram { n, total, per_root })
    }

    /// Checks that the members of level `n` form an antichain tiling the
    /// triangle: their ternary intervals at the deepest member level partition
    /// `[0, 3^D)`.
    pub fn cover_audit(&self, n: u32) -> Result<CoverReport> {
        let nodes = self.nodes(n)?;
        let depth = nodes.iter().map(|x| x.cell.level).max().unwrap_or(0);
        let mut intervals: Vec<(u64, u64)> = nodes
            .iter()
            .map(|x| {
                let w = 3u64.pow((depth - x.cell.level) as u32);
                let start = x.cell.ternary_index() * w;
                (start, start + w)
            })
            .collect();
        intervals.sort_unstable();
        let mut overlaps = 0usize;
        let mut gaps = 0usize;
        let mut cursor = 0u64;
        for &(a, b) in &intervals {
            if a < cursor {
                overlaps += 1;
            } else if a > cursor {
                gaps += 1;
            }
            cursor = cursor.max(b);
        }
        let full = 3u64.pow(depth as u32);
        if cursor < full {
            gaps += 1;
        }
        Ok(CoverReport { n, members: nodes.len(), depth, overlaps, gaps })
    }

    /// Writes one JSON object per node.
    pub fn write_jsonl<W: Write>(&self, n_max: u32, out: &mut W) -> io::Result<()> {
        for level in self.levels.iter().take(n_max as usize) {
            for node in level {
                writeln!(
                    out,
                    "{{\"address\":\"{}\",\"n\":{},\"kExp\":{}}}",
                    node.cell, node.n, node.k_exp
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub n: u32,
    pub total: BTreeMap<u32, u128>,
    pub per_root: [BTreeMap<u32, u128>; 3],
}

impl Histogram {
    pub fn total_count(&self) -> u128 {
        self.total.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub n: u32,
    pub members: usize,
    pub depth: u8,
    pub overlaps: usize,
    pub gaps: usize,
}

impl CoverReport {
    pub fn ok(&self) -> bool {
        self.overlaps == 0 && self.gaps == 0
    }
}

pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Per-root count predicted in closed form: `binom(n - 1, k) 6^k`.
pub fn closed_form_per_root(n: u32, k: u32) -> u128 {
    binomial(n - 1, k) * 6u128.pow(k)
}

pub fn closed_form_total(n: u32) -> u128 {
    3 * 7u128.pow(n - 1)
}

/// Per-root histograms for `1..=max_n` from the count recursion
/// `h_{n+1}[k] = h_n[k] + 6 h_n[k - 1]`, without enumerating cells.
pub fn recursive_histograms(max_n: u32) -> Vec<Vec<u128>> {
    let mut out = vec![vec![1u128]];
    for _ in 1..max_n {
        let prev = out.last().unwrap();
        let mut next = vec![0u128; prev.len() + 1];
        for (k, &c) in prev.iter().enumerate() {
            next[k] += c;
            next[k + 1] += 6 * c;
        }
        out.push(next);
    }
    out
}

/// Counts are per root triangle; the three roots have equal histograms.
pub fn write_histogram_csv<W: Write>(hists: &[Histogram], out: &mut W) -> io::Result<()> {
    writeln!(out, "n,kExp,count")?;
    for h in hists {
        for (k, c) in &h.per_root[0] {
            writeln!(out, "{},{},{}", h.n, k, c)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_level_is_three_roots() {
        let atlas = ConductivityAtlas::expand(1, 100).unwrap();
        let nodes = atlas.nodes(1).unwrap();
        assert_eq!(nodes.len(), 3);
        assert!(nodes.iter().all(|x| x.k_exp == 0 && x.cell.level == 1));
    }

    #[test]
    fn second_level_per_root() {
        let atlas = ConductivityAtlas::expand(2, 1000).unwrap();
        let h = atlas.histogram(2).unwrap();
        for root in &h.per_root {
            assert_eq!(root.get(&0), Some(&1));
            assert_eq!(root.get(&1), Some(&6));
        }
        assert_eq!(h.total_count(), 21);
        let levels: Vec<u8> = atlas.nodes(2).unwrap().iter().map(|x| x.cell.level).collect();
        assert_eq!(levels.iter().filter(|&&l| l == 2).count(), 3);
        assert_eq!(levels.iter().filter(|&&l| l == 3).count(), 18);
    }

    #[test]
    fn budget_marks_atlas_incomplete() {
        let atlas = ConductivityAtlas::expand(5, 50).unwrap();
        assert!(!atlas.is_complete());
        assert_eq!(atlas.depth(), 2);
    }

    #[test]
    fn role_replay_matches_stored_nodes() {
        let atlas = ConductivityAtlas::expand(5, 1 << 20).unwrap();
        for n in 1..=5 {
            for node in atlas.nodes(n).unwrap() {
                assert_eq!(cell_role(node.cell), Some(CellRole::Member { n, k_exp: node.k_exp }));
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(40, 20), 137846528820);
        assert_eq!(binomial(3, 4), 0);
    }
}
