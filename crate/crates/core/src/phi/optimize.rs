//! Choice of `(k*, w)` for a target exponent: enough admissible blocks for
//! the Hölder bound, and a small ratio `w / (k* + w)` for the level sets.

use num_bigint::BigUint;
use serde::Serialize;

use crate::bounds::{ln_factorials, BoundFn, DEFAULT_TOL};
use crate::error::{Error, Result};

use super::admissible::admissible_count;

/// Largest block length searched.
pub const MAX_K_STAR: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizedParams {
    pub alpha: f64,
    pub eps: f64,
    pub k_star: usize,
    pub w: usize,
    /// `log2 #I`.
    pub log2_size: f64,
    /// `w / (k* + w)`.
    pub ratio: f64,
    /// `t / (1 + t)` with `t = h_u^{-1}(alpha)`.
    pub target: f64,
}

/// `log2` of a big integer, good to about 1e-15 relative.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    (top.iter_u64_digits().next().unwrap_or(0) as f64).log2() + shift as f64
}

fn ln_admissible_count(k: usize, w: usize, ln_fact: &[f64]) -> f64 {
    let terms: Vec<f64> = (0..=w.min(k))
        .map(|j| ln_fact[k] - ln_fact[j] - ln_fact[k - j] + j as f64 * std::f64::consts::LN_2)
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// Smallest `k*` (then smallest `w`) meeting both constraints. Float log
/// counts prefilter; the returned pair is confirmed with the exact count.
pub fn optimize_params(alpha: f64, eps: f64) -> Result<OptimizedParams> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { value: alpha, domain: "(0, 1)" });
    }
    if !(eps > 0.0) {
        return Err(Error::Parameter("eps must be positive".into()));
    }
    let t = BoundFn::UpperWitness.invert(alpha, DEFAULT_TOL)?;
    let target = t / (1.0 + t);
    let ln_fact = ln_factorials(MAX_K_STAR as u32);
    for k in 1..=MAX_K_STAR {
        for w in 1..=k {
            let ratio = w as f64 / (k + w) as f64;
            if ratio > target + eps {
                break;
            }
            let need = (k + w) as f64 * alpha;
            if ln_admissible_count(k, w, &ln_fact) / std::f64::consts::LN_2 < need - 1e-6 {
                continue;
            }
            let log2_size = log2_biguint(&admissible_count(k, w));
            if log2_size >= need {
                return Ok(OptimizedParams { alpha, eps, k_star: k, w, log2_size, ratio, target });
            }
        }
    }
    Err(Error::Budget(format!("no (k*, w) with k* <= {MAX_K_STAR} for alpha = {alpha}, eps = {eps}")))
}
