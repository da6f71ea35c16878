//! Conductivity audits on the Sierpiński triangle complex.

use std::io::{self, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::complex::{cells_at_level, TriangleComplex};
use super::field::VertexField;
use super::front::{build_measure, descend, straddles, subtree_ranges, LevelQuery};
use crate::error::{Error, Result};
use crate::scheme::{cell_role, ConductivityAtlas};
use crate::tri::TriCell;

#[derive(Clone, Debug, PartialEq)]
pub struct MuKappaReport {
    pub nodes_checked: usize,
    /// `(cell, mass denominator, conductivity exponent)` of failing nodes.
    pub violations: Vec<(TriCell, u128, u32)>,
    pub max_ratio: f64,
}

impl MuKappaReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `mu(T) <= kappa(T)` for every cell `T` of the descendant tree of
/// the whole triangle; cells outside the tree carry no mass.
pub fn mu_kappa_audit(
    cx: &TriangleComplex,
    field: &VertexField,
    query: &LevelQuery,
    depth: u32,
) -> Result<MuKappaReport> {
    let tree = descend(cx, field, TriCell::ROOT, query, depth)?;
    let measure = build_measure(&tree)?;
    let mut report = MuKappaReport { nodes_checked: 0, violations: Vec::new(), max_ratio: 0.0 };
    for (k, level) in tree.levels.iter().enumerate().skip(1) {
        for (i, node) in level.iter().enumerate() {
            let k_exp = cell_role(node.cell).expect("level >= 1").k_exp();
            let den = measure.denominators[k][i];
            report.nodes_checked += 1;
            // 1/den <= 2^-k_exp  iff  2^k_exp <= den
            let ok = k_exp < 128 && (1u128 << k_exp) <= den;
            if !ok {
                report.violations.push((node.cell, den, k_exp));
            }
            let ratio = (k_exp as f64).exp2() / den as f64;
            report.max_ratio = report.max_ratio.max(ratio);
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The high-conductivity mass is below 1/2 and the front is large enough.
    Pass,
    /// The high-conductivity mass is below 1/2 but the front is too small.
    Fail,
    /// The hypothesis does not hold at this level.
    NotApplicable,
}

impl Certificate {
    pub fn as_str(self) -> &'static str {
        match self {
            Certificate::Pass => "pass",
            Certificate::Fail => "fail",
            Certificate::NotApplicable => "na",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontStatsRow {
    pub n: u32,
    pub front_size: usize,
    /// Largest conductivity among scheme members of index `n` meeting the
    /// level set, 0 if none.
    pub max_kappa: f64,
    /// Sum of conductivities over front cells with `kappa >= 2^(-n d1)`.
    pub highcond_mass: f64,
    /// Sum of image ranges over scheme members with `kappa >= 2^(-n d1)`.
    pub image_mass_bound: f64,
    /// Sum of conductivities over the whole front.
    pub front_kappa: f64,
    pub cert_lowbox: Certificate,
}

/// Per-level front statistics for levels `1..=max_n`.
///
/// Members deeper than the field are judged by their ancestor at the field
/// depth, which over-approximates both "meets the level set" and the image
/// range.
pub fn front_stats(
    cx: &TriangleComplex,
    field: &VertexField,
    query: &LevelQuery,
    atlas: &ConductivityAtlas,
    d1: f64,
    max_n: u32,
) -> Result<Vec<FrontStatsRow>> {
    query.check(field)?;
    if max_n > field.depth() || max_n > atlas.depth() {
        return Err(Error::Parameter(format!(
            "levels up to {max_n} need field depth and atlas depth at least {max_n}"
        )));
    }
    let ranges = subtree_ranges(cx, field);
    let depth = field.depth() as u8;
    let range_of = |c: TriCell| ranges[&c.ancestor(c.level.min(depth))];
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let threshold = n as f64 * d1;
        let mut front_size = 0usize;
        let mut highcond = 0.0;
        let mut front_kappa = 0.0;
        for cell in cells_at_level(cx, n) {
            if !straddles(&field.cell_values(cx, cell), query.r) {
                continue;
            }
            front_size += 1;
            let e = cell_role(cell).unwrap().k_exp();
            let kappa = (-(e as f64)).exp2();
            front_kappa += kappa;
            if e as f64 <= threshold {
                highcond += kappa;
            }
        }
        let mut max_kappa = 0.0f64;
        let mut image_mass = 0.0;
        for node in atlas.nodes(n)? {
            let (lo, hi) = range_of(node.cell);
            let kappa = (-(node.k_exp as f64)).exp2();
            if lo < query.r && query.r < hi {
                max_kappa = max_kappa.max(kappa);
            }
            if node.k_exp as f64 <= threshold {
                image_mass += hi - lo;
            }
        }
        let cert = if highcond < 0.5 {
            if front_size as f64 >= (threshold - 1.0).exp2() {
                Certificate::Pass
            } else {
                Certificate::Fail
            }
        } else {
            Certificate::NotApplicable
        };
        rows.push(FrontStatsRow {
            n,
            front_size,
            max_kappa,
            highcond_mass: highcond,
            image_mass_bound: image_mass,
            front_kappa,
            cert_lowbox: cert,
        });
    }
    Ok(rows)
}

pub fn write_front_stats_csv<W: Write>(rows: &[FrontStatsRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "n,front_size,max_kappa,highcond_mass,image_mass_bound,cert_lowbox")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{}",
            r.n,
            r.front_size,
            r.max_kappa,
            r.highcond_mass,
            r.image_mass_bound,
            r.cert_lowbox.as_str()
        )?;
    }
    Ok(())
}

/// Level values for almost-every-`r` audits: `grid` equally spaced interior
/// points plus `random` uniform draws in the open range of the root vertex
/// values, skipping values within the guard of any vertex value.
pub fn sample_levels(
    field: &VertexField,
    root_range: (f64, f64),
    grid: usize,
    random: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<LevelQuery> {
    let (lo, hi) = root_range;
    let mut out = Vec::with_capacity(grid + random);
    let width = hi - lo;
    if !(width > 0.0) {
        return out;
    }
    for g in 0..grid {
        let q = LevelQuery::new(lo + width * (g as f64 + 0.5) / grid as f64);
        if q.check(field).is_ok() {
            out.push(q);
        }
    }
    let mut attempts = 0;
    let mut drawn = 0;
    while drawn < random && attempts < 100 * (random + 1) {
        attempts += 1;
        let r = lo + width * rng.gen::<f64>();
        if r <= lo || r >= hi {
            continue;
        }
        let q = LevelQuery::new(r);
        if q.check(field).is_ok() {
            out.push(q);
            drawn += 1;
        }
    }
    out
}
