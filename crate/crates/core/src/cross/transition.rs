//! Where the cross switches from level sets of dimension `1/m` to larger
//! ones: the admissible `beta` for a given `(m, L, alpha)` and the geometric
//! ratio of the counting bound.

use serde::Serialize;

use crate::error::{Error, Result};

use super::model::TypeCounts;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TransitionBounds {
    pub m: u32,
    pub l: f64,
    pub alpha: f64,
    /// `log 2 / log 3 - log 4 / log L`.
    pub gap: f64,
    /// `L > 9`, equivalently `gap > 0`.
    pub feasible: bool,
    /// `1 - (log 3 / log 2) gap`.
    pub alpha1: f64,
    /// Open interval of admissible `beta`, if any.
    pub beta_range: Option<(f64, f64)>,
    /// `sup beta / m` when `beta_range` is nonempty, else the baseline `1/m`.
    pub d_star_lower: f64,
    /// Box dimension of the vertical-corridor projection, `1/m`.
    pub baseline: f64,
}

pub fn transition_bounds(m: u32, l: f64, alpha: f64) -> Result<TransitionBounds> {
    if m < 2 {
        return Err(Error::Parameter(format!("m = {m} must be at least 2")));
    }
    if !(l >= 2.0) || !l.is_finite() {
        return Err(Error::Domain { value: l, domain: "[2, inf)" });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain { value: alpha, domain: "(0, 1]" });
    }
    let (ln2, ln3) = (std::f64::consts::LN_2, 3f64.ln());
    let gap = ln2 / ln3 - 2.0 * ln2 / l.ln();
    // log2/log3 > log4/logL  <=>  log L > 2 log 3  <=>  L > 9, decided
    // without the rounding of the two quotients
    let feasible = l > 9.0;
    let alpha1 = 1.0 - ln3 / ln2 * gap;
    let beta_hi = 3f64.log2();
    let beta_range = if feasible {
        let lo = ((1.0 - alpha) / gap).max(1.0);
        (lo < beta_hi).then_some((lo, beta_hi))
    } else {
        None
    };
    let baseline = 1.0 / m as f64;
    let d_star_lower = match beta_range {
        Some((_, hi)) => hi / m as f64,
        None => baseline,
    };
    Ok(TransitionBounds { m, l, alpha, gap, feasible, alpha1, beta_range, d_star_lower, baseline })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CBound {
    pub beta: f64,
    pub eps: f64,
    /// Measured `t2`.
    pub k: usize,
    /// `t3 / 2^m`.
    pub a_l: f64,
    pub log2_c: f64,
    pub c: f64,
}

/// `log2` of the ratio `c` in the bound `2^{-n m alpha} A12 A3 A4 <= c^n`,
/// with `A12 <= (K + 4)^n`, `t3 <= a_L 2^m` and `t4 <= 4^m`.
pub fn c_exponent(counts: &TypeCounts, m: u32, l: f64, alpha: f64, beta: f64, eps: f64) -> Result<CBound> {
    let (ln2, ln3) = (std::f64::consts::LN_2, 3f64.ln());
    let r3 = ln2 / ln3;
    let rl = ln2 / l.ln();
    if !(beta > 0.0 && beta * r3 < 1.0) || !(l > 1.0) {
        return Err(Error::Parameter(format!("beta = {beta} must lie in (0, log2 3)")));
    }
    if counts.t3 == 0 {
        return Err(Error::Parameter("no type-3 squares; a_L is undefined".into()));
    }
    let mf = m as f64;
    let e = std::f64::consts::E;
    let a_l = counts.t3 as f64 / mf.exp2();
    let log2_c = -mf * alpha
        + (e / (1.0 - beta * r3)).log2()
        + (1.0 - (beta - eps) * r3) * (a_l.log2() + mf)
        + (e / (beta * rl)).log2()
        + 2.0 * mf * (beta + eps) * rl
        + ((counts.t2 + 4) as f64).log2();
    Ok(CBound { beta, eps, k: counts.t2, a_l, log2_c, c: log2_c.exp2() })
}
