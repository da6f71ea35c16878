//! Audits of the witness: Hölder quotient over cylinder vertices, the
//! diameter floor of admissible cylinders, and level-set cell counts.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{BaryPoint, Triangle};
use crate::holder::max_holder_ratio;
use crate::levelset::field::DEFAULT_GUARD;
use crate::tri::MAX_LEVEL;

use super::admissible::{flatten, Block};
use super::geom::branch_maps;
use super::witness::{cell_of, Piece, PhiWitness};

/// `(6 N / sqrt 3)^alpha`.
pub fn holder_constant(size: usize, alpha: f64) -> f64 {
    (6.0 * size as f64 / 3f64.sqrt()).powf(alpha)
}

/// `#I >= 2^{(k* + w) alpha}`, the hypothesis of the Hölder bound.
pub fn holder_hypothesis(witness: &PhiWitness, alpha: f64) -> Result<()> {
    let size = witness.set().size() as f64;
    let need = (witness.k_star() + witness.w()) as f64 * alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { value: alpha, domain: "(0, 1)" });
    }
    if size.log2() < need {
        return Err(Error::Parameter(format!(
            "#I = {size} < 2^{need:.6}; alpha must be at most log2(#I)/(k*+w) = {:.6}",
            size.log2() / (witness.k_star() + witness.w()) as f64
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiHolderReport {
    pub alpha: f64,
    pub depth: usize,
    pub triangles: usize,
    pub vertices: usize,
    /// Vertices reached from two triangles with different values.
    pub conflicts: usize,
    pub max_ratio: f64,
    pub bound: f64,
    pub argmax: Option<(String, String)>,
}

impl PhiHolderReport {
    pub fn ok(&self) -> bool {
        self.conflicts == 0 && self.max_ratio <= self.bound
    }
}

/// Vertices of every triangle reached by refining non-constant triangles up
/// to `depth` blocks, with their exact values. Constant triangles are kept
/// but not refined: every point inside carries the same value.
pub fn cylinder_vertices(
    witness: &PhiWitness,
    depth: usize,
) -> Result<(Vec<(BaryPoint, BigRational)>, usize, usize)> {
    let max_len = depth * witness.k_star();
    let mut values: HashMap<BaryPoint, BigRational> = HashMap::new();
    let mut order = Vec::new();
    let mut conflicts = 0;
    let mut triangles = 0;
    let mut stack = vec![Piece::root()];
    while let Some(piece) = stack.pop() {
        triangles += 1;
        let (at_a, at_bc) = witness.vertex_values(&piece)?;
        let tri = piece.triangle();
        for (p, v) in tri.vertices.iter().zip([&at_a, &at_bc, &at_bc]) {
            match values.get(p) {
                Some(old) => conflicts += (old != v) as usize,
                None => {
                    values.insert(p.clone(), v.clone());
                    order.push(p.clone());
                }
            }
        }
        if piece.digits.len() < max_len && at_a != at_bc {
            stack.extend(witness.children(&piece));
        }
    }
    let out = order
        .into_iter()
        .map(|p| {
            let v = values.remove(&p).expect("recorded vertex");
            (p, v)
        })
        .collect();
    Ok((out, triangles, conflicts))
}

pub fn holder_audit(witness: &PhiWitness, alpha: f64, depth: usize) -> Result<PhiHolderReport> {
    holder_hypothesis(witness, alpha)?;
    let (verts, triangles, conflicts) = cylinder_vertices(witness, depth)?;
    let points: Vec<(f64, f64)> = verts.iter().map(|(p, _)| p.to_cartesian()).collect();
    let vals: Vec<f64> = verts.iter().map(|(_, v)| v.to_f64().unwrap_or(f64::NAN)).collect();
    let rep = max_holder_ratio(&points, &vals, alpha);
    Ok(PhiHolderReport {
        alpha,
        depth,
        triangles,
        vertices: verts.len(),
        conflicts,
        max_ratio: rep.max_ratio,
        bound: holder_constant(witness.set().size(), alpha),
        argmax: rep.argmax.map(|(i, j)| (verts[i].0.to_string(), verts[j].0.to_string())),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiameterFloor {
    pub m: usize,
    /// Smallest squared side over the triangles of all admissible cylinders.
    pub min_sq_diameter: String,
    /// `(3/4) 4^{-m(k*+w)}`.
    pub floor_sq: String,
    pub ok: bool,
}

pub fn diameter_floor(witness: &PhiWitness, m: usize) -> Result<DiameterFloor> {
    let blocks = witness.set().blocks();
    let mut min_sq: Option<Dyadic> = None;
    let mut idx = vec![0usize; m];
    loop {
        let addr: Vec<Block> = idx.iter().map(|&i| blocks[i].clone()).collect();
        for map in branch_maps(witness.gens(), &flatten(&addr), usize::MAX)? {
            let d = Triangle::image(&map).sq_diameter();
            if min_sq.as_ref().is_none_or(|x| &d < x) {
                min_sq = Some(d);
            }
        }
        if !advance(&mut idx, blocks.len()) {
            break;
        }
    }
    let shift = 2 * (m * (witness.k_star() + witness.w())) as i64;
    let floor = Dyadic::new(3, 2).scale_pow2(-shift);
    let min_sq = min_sq.ok_or_else(|| Error::Parameter("m must be at least 1".into()))?;
    Ok(DiameterFloor { m, ok: min_sq >= floor, min_sq_diameter: min_sq.to_string(), floor_sq: floor.to_string() })
}

/// Odometer over `base^len` index vectors; false once it wraps.
pub(crate) fn advance(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelCount {
    pub r: f64,
    pub n: usize,
    pub level: u8,
    pub count: usize,
    pub bound: u64,
    /// Admissible blocks whose cylinder value interval contains `r`.
    pub chain: Vec<String>,
}

impl LevelCount {
    pub fn ok(&self) -> bool {
        self.count as u64 <= self.bound
    }
}

/// Rejects `r` within `guard` of a value `j / N^J` for `J <= max_blocks`;
/// those values are where the witness is constant on whole triangles.
pub fn level_guard(size: usize, r: f64, max_blocks: usize, guard: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Guard(format!("r = {r} is not inside (0, 1)")));
    }
    let exact = BigRational::from_f64(r).ok_or_else(|| Error::Guard(format!("r = {r} is not finite")))?;
    let n = BigInt::from(size);
    let mut scale = BigInt::from(1);
    for blocks in 1..=max_blocks {
        scale *= &n;
        let t = &exact * BigRational::from_integer(scale.clone());
        let off = (&t - t.round()).abs() / BigRational::from_integer(scale.clone());
        if off.to_f64().unwrap_or(0.0) < guard {
            return Err(Error::Guard(format!(
                "r = {r} lies within {guard:e} of a cylinder endpoint with denominator {size}^{blocks}"
            )));
        }
    }
    Ok(())
}

/// Number of level-`n(k*+w)` grid cells meeting the level set of `r`.
pub fn level_cell_count(witness: &PhiWitness, r: f64, n: usize) -> Result<LevelCount> {
    let (k, w) = (witness.k_star(), witness.w());
    let level = n * (k + w);
    if n == 0 || level > MAX_LEVEL as usize {
        return Err(Error::Parameter(format!("n = {n} gives grid level {level} outside 1..={}", MAX_LEVEL)));
    }
    let size = witness.set().size();
    // pieces are refined to at most `level + 1` digits, plus the 0 of the extreme chain
    let max_blocks = (level + 2).div_ceil(k) + 1;
    level_guard(size, r, max_blocks, DEFAULT_GUARD)?;
    let target = BigRational::from_f64(r).expect("finite after guard");
    let level = level as u8;
    let mut cells = BTreeSet::new();
    let mut stack = vec![Piece::root()];
    while let Some(piece) = stack.pop() {
        let (lo, hi) = witness.counter().range_of_digits(&piece.digits)?;
        if !(lo < target && target < hi) {
            continue;
        }
        let cell = cell_of(&piece.triangle())?;
        if cell.level >= level {
            cells.insert(cell.ancestor(level));
        } else {
            stack.extend(witness.children(&piece));
        }
    }
    Ok(LevelCount {
        r,
        n,
        level,
        count: cells.len(),
        bound: 1u64 << (n * w).min(63),
        chain: level_chain(witness, r, n).iter().map(Block::to_string).collect(),
    })
}

/// The admissible blocks `ι_1, ..., ι_n` with `r` in the value interval of
/// their cylinder.
pub fn level_chain(witness: &PhiWitness, r: f64, n: usize) -> Vec<Block> {
    let set = witness.set();
    let size = set.size();
    let scale = BigRational::from_integer(BigInt::from(size));
    let mut x = BigRational::from_f64(r.clamp(0.0, 1.0)).unwrap_or_default();
    let mut reversed = false;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let t = &x * &scale;
        let c = t.floor().to_integer().to_usize().unwrap_or(0).min(size - 1);
        x = t - BigRational::from_integer(BigInt::from(c));
        let b = if reversed { &set.blocks()[size - 1 - c] } else { &set.blocks()[c] };
        reversed ^= b.digits().iter().filter(|&&d| d == 0).count() % 2 == 1;
        out.push(b.clone());
    }
    out
}
