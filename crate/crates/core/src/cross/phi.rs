//! The monotone function on `[0, 1]` built from the two middle base-`2^m`
//! digits, and the level sections of `(x, y) -> phi(x)` on the cross.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::holder::max_holder_ratio;

use super::model::CrossModel;

/// A base-`2^m` expansion `0.prefix (period)^∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub prefix: Vec<u32>,
    pub period: Vec<u32>,
}

impl Expansion {
    pub fn finite(prefix: Vec<u32>) -> Self {
        Expansion { prefix, period: Vec::new() }
    }

    pub fn check(&self, m: u32) -> Result<()> {
        let base = 1u32 << m;
        match self.prefix.iter().chain(&self.period).find(|&&d| d >= base) {
            Some(d) => Err(Error::Parameter(format!("digit {d} is not below 2^{m} = {base}"))),
            None => Ok(()),
        }
    }

    /// The number it denotes.
    pub fn value(&self, m: u32) -> BigRational {
        let base = BigInt::from(1u64 << m);
        let mut scale = BigRational::one();
        let mut x = BigRational::zero();
        for &d in &self.prefix {
            scale /= BigRational::from_integer(base.clone());
            x += &scale * BigRational::from_integer(d.into());
        }
        if !self.period.is_empty() {
            let mut block = BigRational::zero();
            let mut s = BigRational::one();
            for &d in &self.period {
                s /= BigRational::from_integer(base.clone());
                block += &s * BigRational::from_integer(d.into());
            }
            // the tail is block / (1 - s), scaled by the prefix
            x += scale * block / (BigRational::one() - s);
        }
        x
    }
}

/// Digits separated by spaces or commas, or written as single characters
/// (hex allowed); a parenthesised group repeats forever, e.g. `1(2)` or
/// `3 4 (3 4)`.
impl FromStr for Expansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("0.");
        let (head, tail) = match s.find('(') {
            Some(at) => {
                let rest = s[at + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unclosed period in {s:?}")))?;
                (&s[..at], Some(rest))
            }
            None => (s, None),
        };
        let digits = |part: &str| -> Result<Vec<u32>> {
            if part.contains(|c: char| c.is_whitespace() || c == ',') {
                part.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("digit {t:?}: {e}"))))
                    .collect()
            } else {
                part.chars()
                    .map(|c| c.to_digit(16).ok_or_else(|| Error::Parse(format!("digit {c:?}"))))
                    .collect()
            }
        };
        let e = Expansion { prefix: digits(head)?, period: tail.map(digits).transpose()?.unwrap_or_default() };
        if tail.is_some() && e.period.is_empty() {
            return Err(Error::Parse("empty period".into()));
        }
        Ok(e)
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ds: &[u32]| ds.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        write!(f, "{}", join(&self.prefix))?;
        if !self.period.is_empty() {
            write!(f, " ({})", join(&self.period))?;
        }
        Ok(())
    }
}

/// Effect of one digit: a bit for the two middle digits, otherwise the
/// constant the rest of the expansion collapses to.
enum Step {
    Bit(u32),
    Stop(u32),
}

fn step(m: u32, d: u32) -> Step {
    let low = (1u32 << (m - 1)) - 1;
    if d < low {
        Step::Stop(0)
    } else if d > low + 1 {
        Step::Stop(1)
    } else {
        Step::Bit(d - low)
    }
}

/// `phi(x)` for an expansion, exactly.
pub fn phi_expansion(m: u32, x: &Expansion) -> Result<BigRational> {
    x.check(m)?;
    let mut acc = BigRational::zero();
    let mut scale = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    for &d in &x.prefix {
        scale *= &half;
        match step(m, d) {
            Step::Bit(b) => acc += &scale * BigRational::from_integer(b.into()),
            Step::Stop(c) => return Ok(acc + (&scale + &scale) * BigRational::from_integer(c.into())),
        }
    }
    if x.period.is_empty() {
        return Ok(acc);
    }
    // one pass over the period either stops or yields a geometric series
    let mut block = BigRational::zero();
    let mut s = BigRational::one();
    for &d in &x.period {
        s *= &half;
        match step(m, d) {
            Step::Bit(b) => block += &s * BigRational::from_integer(b.into()),
            Step::Stop(c) => {
                return Ok(acc + &scale * (block + (&s + &s) * BigRational::from_integer(c.into())));
            }
        }
    }
    Ok(acc + scale * block / (BigRational::one() - s))
}

/// `phi(k / 2^{m digits})`; exact with denominator at most `2^digits`.
pub fn phi_grid(m: u32, k: u64, digits: u32) -> Dyadic {
    if k >> (m * digits) != 0 {
        return Dyadic::one();
    }
    let mask = (1u64 << m) - 1;
    let mut num = 0u64;
    for t in 0..digits {
        let d = ((k >> (m * (digits - 1 - t))) & mask) as u32;
        match step(m, d) {
            Step::Bit(b) => num = 2 * num + b as u64,
            Step::Stop(c) => {
                // remaining value c is one unit of the current scale
                return Dyadic::new(2 * num + 2 * c as u64, t + 1);
            }
        }
    }
    // past the last digit the expansion is all zeros, worth nothing
    Dyadic::new(num, digits)
}

pub fn phi_at_f64(m: u32, x: f64, digits: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { value: x, domain: "[0, 1]" });
    }
    let scale = (m * digits) as i32;
    let k = (x * 2f64.powi(scale)).floor() as u64;
    Ok(phi_grid(m, k, digits).to_f64())
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhiHolder {
    pub m: u32,
    pub digits: u32,
    pub points: usize,
    pub exponent: f64,
    pub max_ratio: f64,
    pub monotone: bool,
}

/// Largest `|phi(x) - phi(y)| / |x - y|^{1/m}` over the grid `k / 2^{m digits}`,
/// with the number of digits chosen so the grid has at most `budget` points.
pub fn phi_holder(m: u32, budget: usize) -> Result<PhiHolder> {
    let mut digits = 0u32;
    while m * (digits + 1) < 40 && (1usize << (m * (digits + 1))) < budget {
        digits += 1;
    }
    if digits == 0 {
        return Err(Error::Parameter(format!("a sample budget of {budget} does not cover one digit")));
    }
    let n = 1u64 << (m * digits);
    let xs: Vec<(f64, f64)> = (0..=n).map(|k| (k as f64 / n as f64, 0.0)).collect();
    let vals: Vec<f64> = (0..=n).map(|k| phi_grid(m, k, digits).to_f64()).collect();
    let exponent = 1.0 / m as f64;
    let rep = max_holder_ratio(&xs, &vals, exponent);
    Ok(PhiHolder {
        m,
        digits,
        points: xs.len(),
        exponent,
        max_ratio: rep.max_ratio,
        monotone: vals.windows(2).all(|w| w[0] <= w[1]),
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelSection {
    pub r: f64,
    pub n: u32,
    pub count: u64,
    /// First `n` digits of the unique `x` with `phi(x) = r`.
    pub x_digits: Vec<u32>,
}

/// Rejects `r` within `guard` of a dyadic `j / 2^J` with `J <= max_bits`:
/// those are the values `phi` takes on whole gap intervals.
pub fn section_guard(r: f64, max_bits: u32, guard: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Guard(format!("r = {r} is not inside (0, 1)")));
    }
    for bits in 1..=max_bits.min(52) {
        let t = r * (1u64 << bits) as f64;
        if (t - t.round()).abs() / (1u64 << bits) as f64 <= guard {
            return Err(Error::Guard(format!("r = {r} is within {guard:e} of a multiple of 2^-{bits}")));
        }
    }
    Ok(())
}

/// Number of level-`n` squares of the cross meeting `{x : phi(x) = r} x [0, 1]`,
/// found by walking the whole construction with exact values of `phi` at the
/// column edges.
pub fn level_section_count(model: &CrossModel, r: f64, n: u32, guard: f64) -> Result<LevelSection> {
    let m = model.m();
    if m * n > 62 {
        return Err(Error::Budget(format!("n = {n} needs {} grid bits", m * n)));
    }
    section_guard(r, n + 1, guard)?;
    let target = Dyadic::from_f64(r).expect("finite after guard");
    let mut cols: Vec<(u64, u64)> = vec![(0, 0)];
    for level in 1..=n {
        let mut next = Vec::new();
        for &(i, j) in &cols {
            for &(a, b) in model.squares() {
                let (ci, cj) = ((i << m) | a as u64, (j << m) | b as u64);
                let lo = phi_grid(m, ci, level);
                let hi = phi_grid(m, ci + 1, level);
                if lo < target && target < hi {
                    next.push((ci, cj));
                }
            }
        }
        cols = next;
    }
    let low = (1u32 << (m - 1)) - 1;
    let mut x_digits = Vec::with_capacity(n as usize);
    let mut t = r;
    for _ in 0..n {
        t *= 2.0;
        let b = t.floor();
        x_digits.push(low + b as u32);
        t -= b;
    }
    Ok(LevelSection { r, n, count: cols.len() as u64, x_digits })
}

/// Least-squares slope of `log count` against `log` of the inverse square
/// side `2^{m n}`.
pub fn section_slope(m: u32, sections: &[LevelSection]) -> f64 {
    let pts: Vec<(f64, f64)> = sections
        .iter()
        .map(|s| ((m * s.n) as f64 * std::f64::consts::LN_2, (s.count as f64).ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
