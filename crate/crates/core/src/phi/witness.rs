//! The witness function on the gasket: evaluation on block cylinders, at
//! exact points, and on the triangles of the nine-map system.

use std::collections::BTreeSet;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, BaryPoint, Triangle};
use crate::tri::{TriCell, MAX_LEVEL};

use super::admissible::{AdmissibleSet, Block, PhiInterval, RankCounter};
use super::gens::{GenLabel, GenSystem};

/// The seven distinct pieces of the gasket with their digits.
const PIECES: [(GenLabel, u8); 7] = [
    (GenLabel::S01, 0),
    (GenLabel::S02, 0),
    (GenLabel::S11, 1),
    (GenLabel::S12, 1),
    (GenLabel::S21, 2),
    (GenLabel::S22, 2),
    (GenLabel::S3, 3),
];

/// One triangle `S_{ι,λ}(Δ)` of the system, with its digit address.
#[derive(Clone, Debug)]
pub struct Piece {
    pub digits: Vec<u8>,
    pub map: AffineMap2,
}

impl Piece {
    pub fn root() -> Self {
        Piece { digits: Vec::new(), map: AffineMap2::identity() }
    }

    pub fn triangle(&self) -> Triangle {
        Triangle::image(&self.map)
    }
}

#[derive(Clone, Debug)]
pub struct PhiWitness {
    gens: GenSystem,
    counter: RankCounter,
}

impl PhiWitness {
    pub fn new(k_star: usize, w: usize) -> Result<Self> {
        let set = AdmissibleSet::new(k_star, w)?;
        Ok(PhiWitness { gens: GenSystem::new()?, counter: RankCounter::new(set)? })
    }

    pub fn gens(&self) -> &GenSystem {
        &self.gens
    }

    pub fn counter(&self) -> &RankCounter {
        &self.counter
    }

    pub fn set(&self) -> &AdmissibleSet {
        self.counter.set()
    }

    pub fn k_star(&self) -> usize {
        self.set().k_star()
    }

    pub fn w(&self) -> usize {
        self.set().w()
    }

    pub fn eval_blocks(&self, blocks: &[Block]) -> Result<PhiInterval> {
        self.counter.eval_blocks(blocks)
    }

    pub fn children(&self, piece: &Piece) -> Vec<Piece> {
        let mut out = Vec::with_capacity(7);
        for (label, digit) in PIECES {
            let mut digits = piece.digits.clone();
            digits.push(digit);
            out.push(Piece { digits, map: piece.map.compose(self.gens.map(label)) });
        }
        out
    }

    /// Values at the images of A and of B, C (the latter two coincide).
    pub fn vertex_values(&self, piece: &Piece) -> Result<(BigRational, BigRational)> {
        let at_a = self.counter.value_of_digits(&piece.digits)?;
        let mut ext = piece.digits.clone();
        ext.push(0);
        Ok((at_a, self.counter.value_of_digits(&ext)?))
    }

    /// A digit address of a gasket point, found by pulling it back through
    /// the first piece that contains it. Stops at a corner or at a digit 1.
    pub fn address_of_point(&self, p: &BaryPoint) -> Result<Vec<u8>> {
        let limit = pullback_limit(p);
        let mut digits = Vec::new();
        let mut cur = p.clone();
        for _ in 0..limit {
            if let Some(tail) = corner_tail(&cur) {
                digits.extend(tail);
                return Ok(digits);
            }
            let hit = PIECES.iter().find_map(|&(label, digit)| {
                let q = self.gens.inverse(label).apply(&cur);
                q.in_reference_triangle().then_some((digit, q))
            });
            let Some((digit, q)) = hit else {
                return Err(Error::Contract(format!("{p} is not a gasket point")));
            };
            digits.push(digit);
            if digit == 1 {
                return Ok(digits);
            }
            cur = q;
        }
        Err(Error::Budget(format!("pullback of {p} did not reach a corner in {limit} steps")))
    }

    pub fn value_at_point(&self, p: &BaryPoint) -> Result<BigRational> {
        self.counter.value_of_digits(&self.address_of_point(p)?)
    }

    /// Values over every address of `p`; a consistent witness gives one.
    pub fn values_at_point_all(&self, p: &BaryPoint) -> Result<BTreeSet<BigRational>> {
        let limit = pullback_limit(p);
        let mut out = BTreeSet::new();
        let mut stack = vec![(p.clone(), Vec::new())];
        while let Some((cur, digits)) = stack.pop() {
            if digits.len() > limit {
                return Err(Error::Budget(format!("pullback of {p} exceeded {limit} steps")));
            }
            if let Some(tail) = corner_tail(&cur) {
                let mut d = digits.clone();
                d.extend(tail);
                out.insert(self.counter.value_of_digits(&d)?);
                continue;
            }
            let mut found = false;
            for (label, digit) in PIECES {
                let q = self.gens.inverse(label).apply(&cur);
                if !q.in_reference_triangle() {
                    continue;
                }
                found = true;
                let mut d = digits.clone();
                d.push(digit);
                if digit == 1 {
                    out.insert(self.counter.value_of_digits(&d)?);
                } else {
                    stack.push((q, d));
                }
            }
            if !found {
                return Err(Error::Contract(format!("{p} is not a gasket point")));
            }
        }
        Ok(out)
    }
}

/// Inverse maps scale by 2 or 4, so each pullback of a non-corner point
/// lowers its dyadic exponent by at least one.
fn pullback_limit(p: &BaryPoint) -> usize {
    p.u.exponent().max(p.v.exponent()) as usize + 2
}

fn corner_tail(p: &BaryPoint) -> Option<&'static [u8]> {
    if *p == BaryPoint::a() {
        Some(&[])
    } else if *p == BaryPoint::b() || *p == BaryPoint::c() {
        Some(&[0])
    } else {
        None
    }
}

/// The τ cell occupied by a piece of the system.
pub fn cell_of(tri: &Triangle) -> Result<TriCell> {
    let side_sq = tri.sq_diameter();
    // side 2^-s  <=>  squared side 4^-s
    let s = side_sq.exponent() / 2;
    if side_sq.numerator() != &1.into() || side_sq.exponent() % 2 != 0 || s > MAX_LEVEL as u32 {
        return Err(Error::Contract(format!("{tri:?} is not a grid cell")));
    }
    let umin = tri.vertices.iter().map(|p| &p.u).min().expect("three vertices");
    let vmin = tri.vertices.iter().map(|p| &p.v).min().expect("three vertices");
    let to_index = |x: &crate::dyadic::Dyadic| {
        x.to_integer_at_scale(s)
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| Error::Contract(format!("{tri:?} is off the level-{s} grid")))
    };
    let cell = TriCell { i: to_index(umin)?, j: to_index(vmin)?, level: s as u8 };
    let mut want = cell.triangle().vertices.to_vec();
    let mut have = tri.vertices.to_vec();
    want.sort();
    have.sort();
    if want != have {
        return Err(Error::Contract(format!("{tri:?} is not an upward grid cell")));
    }
    Ok(cell)
}
