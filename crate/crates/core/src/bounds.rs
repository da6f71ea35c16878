//! Lower and upper bound functions for level-set dimensions on the
//! Sierpiński triangle, their inverses, and the associated series.

use std::f64::consts::LN_2;
use std::io::{self, Write};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;

/// Series terms are summed from exact integers up to this `n`, in log space
/// beyond it.
pub const EXACT_SERIES_LIMIT: u32 = 300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum BoundFn {
    LowerHausdorff,
    LowerBox,
    UpperWitness,
}

/// `x ln x`, extended by 0 at 0.
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `(1 - x) ln(1 - x)` without cancellation for small `x`.
fn one_minus_xlnx(x: f64) -> f64 {
    if x == 1.0 {
        0.0
    } else {
        (1.0 - x) * (-x).ln_1p()
    }
}

impl BoundFn {
    pub const ALL: [BoundFn; 3] = [BoundFn::LowerHausdorff, BoundFn::LowerBox, BoundFn::UpperWitness];

    /// Right end of the domain `(0, sup]`.
    pub fn domain_sup(self) -> f64 {
        match self {
            BoundFn::LowerHausdorff | BoundFn::UpperWitness => 0.5,
            BoundFn::LowerBox => 1.0 / 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundFn::LowerHausdorff => "lower-hausdorff",
            BoundFn::LowerBox => "lower-box",
            BoundFn::UpperWitness => "upper-witness",
        }
    }

    fn raw(self, t: f64) -> f64 {
        match self {
            BoundFn::LowerHausdorff => {
                (-xlnx(t) - one_minus_xlnx(t) + t * 6f64.ln()) / ((1.0 + t) * LN_2)
            }
            BoundFn::LowerBox => {
                (one_minus_xlnx(t) - xlnx(t) - one_minus_xlnx(2.0 * t) + t * 3f64.ln()) / LN_2
            }
            BoundFn::UpperWitness => ((-one_minus_xlnx(t) - xlnx(t)) / LN_2 + t) / (1.0 + t),
        }
    }

    pub fn eval(self, t: f64) -> Result<f64> {
        let sup = self.domain_sup();
        if !(t > 0.0 && t <= sup) {
            return Err(Error::Domain { value: t, domain: self.domain_text() });
        }
        Ok(self.raw(t))
    }

    /// Value used for plotting, with the continuous extension 0 at 0.
    pub fn eval_closed(self, t: f64) -> Result<f64> {
        if t == 0.0 {
            Ok(0.0)
        } else {
            self.eval(t)
        }
    }

    fn domain_text(self) -> &'static str {
        match self {
            BoundFn::LowerHausdorff | BoundFn::UpperWitness => "(0, 1/2]",
            BoundFn::LowerBox => "(0, 1/3]",
        }
    }

    /// Inverse by bisection. Returns the smallest float `t` found with
    /// `f(t) >= alpha`, which makes the inverse monotone in `alpha`.
    pub fn invert(self, alpha: f64, tol: f64) -> Result<f64> {
        let sup = self.domain_sup();
        let max = self.raw(sup);
        if !(alpha > 0.0 && alpha <= max) {
            return Err(Error::Range { value: alpha, max });
        }
        if !(tol > 0.0) {
            return Err(Error::Parameter("tolerance must be positive".into()));
        }
        let (mut lo, mut hi) = (0.0f64, sup);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.raw(mid) >= alpha {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let residual = (self.raw(hi) - alpha).abs();
        if residual > tol {
            return Err(Error::Parameter(format!(
                "bisection residual {residual:e} exceeds tolerance {tol:e} at alpha = {alpha}"
            )));
        }
        Ok(hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SeriesKind {
    Hausdorff,
    Box,
}

/// Growth exponent of the series terms: `ln 2 (1 + d1) (h_l(d1) - alpha)` for
/// the Hausdorff series, `ln 2 (h_B(d1) - alpha)` for the box series.
pub fn exponent_c(d1: f64, alpha: f64, kind: SeriesKind) -> Result<f64> {
    match kind {
        SeriesKind::Hausdorff => {
            BoundFn::LowerHausdorff.eval(d1)?;
            Ok(-(xlnx(d1) + one_minus_xlnx(d1)) + d1 * 6f64.ln() - alpha * (1.0 + d1) * LN_2)
        }
        SeriesKind::Box => {
            BoundFn::LowerBox.eval(d1)?;
            Ok(one_minus_xlnx(d1) - (xlnx(d1) + one_minus_xlnx(2.0 * d1)) + d1 * 3f64.ln() - alpha * LN_2)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesProbe {
    pub n: u32,
    pub d1: f64,
    pub alpha: f64,
    pub kind: SeriesKind,
    /// Natural log of the `n`-th series value.
    pub ln_value: f64,
    /// The `n`-th series value (may be infinite when it overflows).
    pub value: f64,
    /// Sum of the values for `1..=n`.
    pub partial_sum: f64,
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift as usize).to_f64().unwrap().ln() + shift as f64 * LN_2
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn exact_binomial(n: u32, k: u32) -> BigUint {
    let mut b = BigUint::one();
    for i in 0..k {
        b = b * (n - i) / (i + 1);
    }
    b
}

/// Natural log of the `n`-th series value.
pub fn series_ln_value(n: u32, d1: f64, alpha: f64, kind: SeriesKind, ln_fact: &[f64]) -> f64 {
    let kmax = (n as f64 * d1).floor() as u32;
    let mut logs = Vec::with_capacity(kmax as usize + 1);
    let exact = n <= EXACT_SERIES_LIMIT;
    match kind {
        SeriesKind::Hausdorff => {
            for k in 0..=kmax.min(n) {
                let lb = if exact {
                    ln_biguint(&(exact_binomial(n, k) * BigUint::from(6u32).pow(k)))
                } else {
                    ln_binomials_single(n, k, ln_fact) + k as f64 * 6f64.ln()
                };
                logs.push(lb - (n + k) as f64 * alpha * LN_2);
            }
        }
        SeriesKind::Box => {
            for k in 0..=kmax {
                if 2 * k > n {
                    break;
                }
                let lb = if exact {
                    ln_biguint(&(exact_binomial(n - k, k) * BigUint::from(3u32).pow(k)))
                } else {
                    ln_binomials_single(n - k, k, ln_fact) + k as f64 * 3f64.ln()
                };
                logs.push(lb);
            }
            return 6f64.ln() + log_sum_exp(&logs) - n as f64 * alpha * LN_2;
        }
    }
    log_sum_exp(&logs)
}

fn ln_binomials_single(n: u32, k: u32, ln_fact: &[f64]) -> f64 {
    ln_fact[n as usize] - ln_fact[k as usize] - ln_fact[(n - k) as usize]
}

/// `ln(i!)` for `i = 0..=n`.
pub fn ln_factorials(n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// Probes for every `n` in `1..=n_max`.
pub fn series_probes(n_max: u32, d1: f64, alpha: f64, kind: SeriesKind) -> Result<Vec<SeriesProbe>> {
    match kind {
        SeriesKind::Hausdorff => BoundFn::LowerHausdorff.eval(d1)?,
        SeriesKind::Box => BoundFn::LowerBox.eval(d1)?,
    };
    if n_max == 0 {
        return Err(Error::Parameter("series index must be at least 1".into()));
    }
    let ln_fact = ln_factorials(n_max);
    let mut partial = 0.0;
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let ln_value = series_ln_value(n, d1, alpha, kind, &ln_fact);
        let value = ln_value.exp();
        partial += value;
        out.push(SeriesProbe { n, d1, alpha, kind, ln_value, value, partial_sum: partial });
    }
    Ok(out)
}

pub fn series_term(n: u32, d1: f64, alpha: f64, kind: SeriesKind) -> Result<SeriesProbe> {
    Ok(series_probes(n, d1, alpha, kind)?.pop().expect("n >= 1"))
}

/// Least-squares slope of `ln M_n` against `n` over `n_lo..=n_hi`.
pub fn series_log_slope(probes: &[SeriesProbe], n_lo: u32, n_hi: u32) -> f64 {
    let pts: Vec<(f64, f64)> = probes
        .iter()
        .filter(|p| p.n >= n_lo && p.n <= n_hi)
        .map(|p| (p.n as f64, p.ln_value))
        .collect();
    least_squares_slope(&pts)
}

/// Slope of `ln M_n` restricted to the indices where `floor(n d1)` steps up,
/// which removes the sawtooth caused by the truncation of the sum.
pub fn series_growth_rate(probes: &[SeriesProbe], n_lo: u32, n_hi: u32) -> f64 {
    let pts: Vec<(f64, f64)> = probes
        .iter()
        .filter(|p| p.n >= n_lo && p.n <= n_hi)
        .filter(|p| (p.n as f64 * p.d1).floor() > ((p.n - 1) as f64 * p.d1).floor())
        .map(|p| (p.n as f64, p.ln_value))
        .collect();
    least_squares_slope(&pts)
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub alpha: f64,
    /// `h_l^-1(alpha)`
    pub lower_raw: f64,
    /// `h_l^-1 / (1 + h_l^-1)`
    pub lower_hausdorff: f64,
    /// `h_B^-1(alpha)`
    pub lower_box: f64,
    /// `h_u^-1(alpha)`
    pub upper_raw: f64,
    /// `h_u^-1 / (1 + h_u^-1)`
    pub upper: f64,
}

impl CurveRow {
    pub fn new(alpha: f64, tol: f64) -> Result<Self> {
        let lower_raw = BoundFn::LowerHausdorff.invert(alpha, tol)?;
        let lower_box = BoundFn::LowerBox.invert(alpha, tol)?;
        let upper_raw = BoundFn::UpperWitness.invert(alpha, tol)?;
        Ok(CurveRow {
            alpha,
            lower_raw,
            lower_hausdorff: lower_raw / (1.0 + lower_raw),
            lower_box,
            upper_raw,
            upper: upper_raw / (1.0 + upper_raw),
        })
    }

    /// Names of the ordering invariants this row breaks.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.lower_hausdorff > self.upper {
            v.push("lower_hausdorff <= upper");
        }
        if self.lower_box < self.lower_hausdorff {
            v.push("lower_box >= lower_hausdorff");
        }
        if self.lower_raw > self.upper_raw {
            v.push("lower_raw <= upper_raw");
        }
        v
    }

    pub fn gap(&self) -> f64 {
        (self.upper_raw - self.lower_raw) / self.upper_raw
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

/// `steps` grid points from `lo` to `hi` inclusive, linear or geometric.
pub fn alpha_grid(lo: f64, hi: f64, steps: usize, log: bool) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(Error::Parameter(format!("need 0 < alpha-min < alpha-max < 1, got {lo}, {hi}")));
    }
    if steps < 2 {
        return Err(Error::Parameter("need at least 2 grid steps".into()));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let s = i as f64 / last;
            if i == steps - 1 {
                hi
            } else if log {
                (lo.ln() + s * (hi.ln() - lo.ln())).exp()
            } else {
                lo + s * (hi - lo)
            }
        })
        .collect())
}

pub fn curve_table(alphas: &[f64], tol: f64) -> Result<CurveTable> {
    use rayon::prelude::*;
    let rows = alphas.par_iter().map(|&a| CurveRow::new(a, tol)).collect::<Result<Vec<_>>>()?;
    Ok(CurveTable { rows })
}

pub fn asymptotic_gap(alpha: f64, tol: f64) -> Result<f64> {
    let lo = BoundFn::LowerHausdorff.invert(alpha, tol)?;
    let up = BoundFn::UpperWitness.invert(alpha, tol)?;
    Ok((up - lo) / up)
}

impl CurveTable {
    /// First row index breaking an ordering invariant.
    pub fn first_violation(&self) -> Option<(usize, Vec<&'static str>)> {
        self.rows.iter().enumerate().find_map(|(i, r)| {
            let v = r.violations();
            (!v.is_empty()).then_some((i, v))
        })
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "alpha,lower_raw,lower_hausdorff,lower_box,upper_raw,upper")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.alpha, r.lower_raw, r.lower_hausdorff, r.lower_box, r.upper_raw, r.upper
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_binomials(n: u32, ln_fact: &[f64]) -> Vec<f64> {
        (0..=n).map(|k| ln_binomials_single(n, k, ln_fact)).collect()
    }

    #[test]
    fn endpoint_values() {
        assert!((BoundFn::UpperWitness.eval(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(BoundFn::LowerHausdorff.eval(0.5).unwrap() > 1.0);
        assert!(BoundFn::LowerBox.eval(1.0 / 3.0).unwrap() > 1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(BoundFn::LowerBox.eval(0.4), Err(Error::Domain { .. })));
        assert!(BoundFn::UpperWitness.eval(0.0).is_err());
        assert_eq!(BoundFn::UpperWitness.eval_closed(0.0).unwrap(), 0.0);
        assert!(matches!(BoundFn::UpperWitness.invert(1.5, 1e-12), Err(Error::Range { .. })));
    }

    #[test]
    fn exact_small_series() {
        // n = 1, d1 < 1: only k = 0 contributes 2^-alpha
        let p = series_term(1, 0.3, 0.7, SeriesKind::Hausdorff).unwrap();
        assert!((p.value - 2f64.powf(-0.7)).abs() < 1e-15);
        // n = 4, d1 = 0.5: k = 0, 1, 2
        let a = 0.3f64;
        let want: f64 = [(1.0, 0), (24.0, 1), (216.0, 2)]
            .iter()
            .map(|&(c, k)| c * 2f64.powf(-((4 + k) as f64) * a))
            .sum();
        let p = series_term(4, 0.5, a, SeriesKind::Hausdorff).unwrap();
        assert!((p.value - want).abs() < 1e-12 * want);
        // box, n = 4, d1 = 1/3: k = 0, 1 -> 6 (1 + 3 * 3) 2^-4a
        let p = series_term(4, 1.0 / 3.0, a, SeriesKind::Box).unwrap();
        let want = 6.0 * 10.0 * 2f64.powf(-4.0 * a);
        assert!((p.value - want).abs() < 1e-12 * want);
    }

    #[test]
    fn log_space_agrees_with_exact_at_the_switch() {
        let lf = ln_factorials(400);
        let exact = series_ln_value(300, 0.3, 0.5, SeriesKind::Hausdorff, &lf);
        // recompute the same n through the log-gamma path
        let kmax = 90;
        let logs: Vec<f64> = (0..=kmax)
            .map(|k| ln_binomials(300, &lf)[k as usize] + k as f64 * 6f64.ln() - (300 + k) as f64 * 0.5 * LN_2)
            .collect();
        assert!((exact - log_sum_exp(&logs)).abs() < 1e-10 * exact.abs());
    }
}
