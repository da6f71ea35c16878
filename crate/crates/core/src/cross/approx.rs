//! Piecewise-affine approximation one level down: constant on each thick
//! square at the value of the corner it shares with its parent, linear
//! across the thin corridors.

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::holder::max_holder_ratio;
use crate::levelset::complex::{cells_at_level, CellComplex, VertexId};
use crate::levelset::field::{vertex_ids, NumericMode, VertexField};

use super::complex::CrossComplex;
use super::model::Thin;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApproxReport {
    pub m: u32,
    pub n: u32,
    pub anchors: usize,
    pub anchor_mismatches: usize,
    /// Vertices given two different values by neighbouring squares.
    pub conflicts: usize,
    /// Level-`n+1` squares where the approximation is not standard affine.
    pub nonstandard: usize,
    pub lipschitz_in: f64,
    pub lipschitz_out: f64,
    /// `2^{m-1} M`.
    pub lipschitz_bound: f64,
}

impl ApproxReport {
    pub fn ok(&self) -> bool {
        self.anchor_mismatches == 0
            && self.conflicts == 0
            && self.nonstandard == 0
            && self.lipschitz_out <= self.lipschitz_bound * (1.0 + 1e-12)
    }
}

/// Builds the approximation of `f` at level `n + 1` and audits it. `lipschitz`
/// is the Lipschitz constant `M` assumed for `f`.
pub fn piecewise_affine_approx(
    cx: &CrossComplex,
    f: &VertexField,
    n: u32,
    lipschitz: f64,
) -> Result<(VertexField, ApproxReport)> {
    if n + 1 > cx.resolution() {
        return Err(Error::Parameter(format!("level {} is beyond the complex resolution {}", n + 1, cx.resolution())));
    }
    if f.depth() < n {
        return Err(Error::Parameter(format!("field depth {} does not reach level {n}", f.depth())));
    }
    let model = cx.model();
    let m = model.m();
    let block = (1u32 << (m - 1)) - 1;
    let exact = |v: VertexId| -> Result<Dyadic> {
        let x = f.value(v).ok_or_else(|| Error::Contract(format!("no field value at {v:?}")))?;
        Dyadic::from_f64(x).ok_or_else(|| Error::Parameter(format!("value {x} is not finite")))
    };
    let mut values: FxHashMap<VertexId, Dyadic> = FxHashMap::default();
    let mut conflicts = 0;
    for q in cells_at_level(cx, n) {
        let c = cx.corners(q).map(exact);
        let [ll, lr, ul, ur] = [c[0].clone()?, c[1].clone()?, c[2].clone()?, c[3].clone()?];
        for child in cx.children(q) {
            let (a, b) = cx.local_digit(child, child.level);
            let corners = cx.corners(child);
            let local = [(a, b), (a + 1, b), (a, b + 1), (a + 1, b + 1)];
            for (v, (x, y)) in corners.into_iter().zip(local) {
                let val = match model.thin(a, b) {
                    Some(Thin::Vertical) => {
                        let (lo, hi) = if b == 0 { (&ll, &lr) } else { (&ul, &ur) };
                        interpolate(lo, hi, x - block)
                    }
                    Some(Thin::Horizontal) => {
                        let (lo, hi) = if a == 0 { (&ll, &ul) } else { (&lr, &ur) };
                        interpolate(lo, hi, y - block)
                    }
                    None => match (a < block, b < block) {
                        (true, true) => ll.clone(),
                        (false, true) => lr.clone(),
                        (true, false) => ul.clone(),
                        (false, false) => ur.clone(),
                    },
                };
                match values.get(&v) {
                    Some(old) => conflicts += (*old != val) as usize,
                    None => {
                        values.insert(v, val);
                    }
                }
            }
        }
    }

    let mut mode = NumericMode::Exact;
    let mut floats = FxHashMap::default();
    for (v, d) in &values {
        let x = d.to_f64();
        if Dyadic::from_f64(x).as_ref() != Some(d) {
            mode = NumericMode::Float;
        }
        floats.insert(*v, x);
    }

    let mut nonstandard = 0;
    for cell in cells_at_level(cx, n + 1) {
        let [ll, lr, ul, ur] = cx.corners(cell).map(|v| &values[&v]);
        let affine = ll + ur == lr + ul;
        let flat_pair = ll == lr || ll == ul || lr == ur || ul == ur;
        nonstandard += (!(affine && flat_pair)) as usize;
    }

    let anchor_ids = vertex_ids(cx, n);
    let anchor_mismatches = anchor_ids.iter().filter(|v| f.value(**v) != floats.get(v).copied()).count();
    let lipschitz_in = lipschitz_of(cx, &anchor_ids, |v| f.value(v).expect("anchor value"));
    let out_ids = vertex_ids(cx, n + 1);
    let lipschitz_out = lipschitz_of(cx, &out_ids, |v| floats[&v]);

    let field = VertexField::from_values(n + 1, mode, floats, None)?;
    let report = ApproxReport {
        m,
        n,
        anchors: anchor_ids.len(),
        anchor_mismatches,
        conflicts,
        nonstandard,
        lipschitz_in,
        lipschitz_out,
        lipschitz_bound: (1u64 << (m - 1)) as f64 * lipschitz,
    };
    Ok((field, report))
}

/// `lo + (hi - lo) t / 2` for `t` in `{0, 1, 2}` steps across the corridor.
fn interpolate(lo: &Dyadic, hi: &Dyadic, t: u32) -> Dyadic {
    lo + &(&(hi - lo).scale_pow2(-1) * &Dyadic::from_int(t as i64))
}

fn lipschitz_of(cx: &CrossComplex, ids: &[VertexId], value: impl Fn(VertexId) -> f64) -> f64 {
    let pts: Vec<(f64, f64)> = ids.iter().map(|&v| cx.vertex_point(v)).collect();
    let vals: Vec<f64> = ids.iter().map(|&v| value(v)).collect();
    max_holder_ratio(&pts, &vals, 1.0).max_ratio
}
