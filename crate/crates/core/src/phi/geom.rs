//! Geometric side of the witness: the sets `Δ_ι` as unions of exact
//! triangles, their sections on AB, and the `<4` order read off from them.
//! Nothing here uses the key maps of [`super::admissible`]; the two are
//! compared in the tests.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{ab_order_key, AffineMap2, Triangle};

use super::gens::GenSystem;

/// Branch labels worth enumerating for a digit; `S31 = S32`, so digit 3
/// contributes one map.
fn branches(d: u8) -> &'static [u8] {
    if d == 3 {
        &[1]
    } else {
        &[1, 2]
    }
}

fn check_digits(digits: &[u8]) -> Result<()> {
    match digits.iter().find(|&&d| d > 3) {
        Some(d) => Err(Error::Contract(format!("digit {d} outside 0..=3"))),
        None => Ok(()),
    }
}

/// Composed maps `S_{ι,λ}` for every branch sequence, deduplicated by image.
pub fn branch_maps(gens: &GenSystem, digits: &[u8], budget: usize) -> Result<Vec<AffineMap2>> {
    check_digits(digits)?;
    let non3 = digits.iter().filter(|&&d| d != 3).count();
    if non3 >= usize::BITS as usize || (1usize << non3) > budget {
        return Err(Error::Budget(format!("{non3} branching digits exceed the triangle budget {budget}")));
    }
    let mut maps = vec![AffineMap2::identity()];
    for &d in digits {
        let mut next = Vec::with_capacity(maps.len() * 2);
        for m in &maps {
            for &l in branches(d) {
                next.push(m.compose(gens.digit_map(d, l)));
            }
        }
        maps = next;
    }
    let mut seen = HashSet::new();
    maps.retain(|m| seen.insert(Triangle::image(m)));
    Ok(maps)
}

/// `Δ_ι` as a list of distinct triangles.
pub fn delta_iota(gens: &GenSystem, digits: &[u8], budget: usize) -> Result<Vec<Triangle>> {
    Ok(branch_maps(gens, digits, budget)?.iter().map(Triangle::image).collect())
}

/// Key interval `[lo, hi]` (key `1 - u`) of `AB ∩ Δ_ι`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySegment {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl KeySegment {
    pub fn length(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    fn doubled_mid(&self) -> Dyadic {
        &self.lo + &self.hi
    }
}

/// Exact AB section of `Δ_ι` for a {0,2,3}-address: all branch sequences are
/// followed, discarding partial images that already miss AB.
pub fn ab_section(gens: &GenSystem, digits: &[u8]) -> Result<KeySegment> {
    check_digits(digits)?;
    if digits.contains(&1) {
        return Err(Error::Contract("a digit 1 cylinder does not reach AB".into()));
    }
    let mut live = vec![AffineMap2::identity()];
    for &d in digits {
        let mut next = Vec::new();
        for m in &live {
            for &l in branches(d) {
                let c = m.compose(gens.digit_map(d, l));
                if !Triangle::image(&c).ab_section().is_empty() {
                    next.push(c);
                }
            }
        }
        live = next;
    }
    let mut keys = Vec::new();
    for m in &live {
        for p in Triangle::image(m).ab_section() {
            keys.push(ab_order_key(&p)?);
        }
    }
    let lo = keys.iter().min().cloned();
    let hi = keys.iter().max().cloned();
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok(KeySegment { lo, hi }),
        _ => Err(Error::Construction(format!("Δ for {digits:?} misses AB"))),
    }
}

/// `ι <4 ι'` iff the AB section of `Δ_ι` is closer to B; sections are
/// compared by their midpoints.
pub fn compare_lt4(gens: &GenSystem, a: &[u8], b: &[u8]) -> Result<Ordering> {
    let sa = ab_section(gens, a)?;
    let sb = ab_section(gens, b)?;
    Ok(sa.doubled_mid().cmp(&sb.doubled_mid()))
}
