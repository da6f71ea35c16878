use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use super::complex::{cells_at_level, CellComplex, TriangleComplex, VertexId};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::holder::{max_holder_ratio, HolderReport};

/// Default separation between a query value and every vertex value in
/// floating mode.
pub const DEFAULT_GUARD: f64 = 9.094947017729282e-13; // 2^-40

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumericMode {
    /// Every stored value is the exact value of the sampled function.
    Exact,
    /// Values carry rounding error; queries need a positive guard.
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderMeta {
    pub c: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug)]
pub struct VertexField {
    depth: u32,
    mode: NumericMode,
    values: FxHashMap<VertexId, f64>,
    holder: Option<HolderMeta>,
}

/// All vertex ids of cells at `depth`, sorted.
pub fn vertex_ids<C: CellComplex>(cx: &C, depth: u32) -> Vec<VertexId> {
    let mut set = FxHashSet::default();
    for cell in cells_at_level(cx, depth) {
        set.extend(cx.vertices(cell));
    }
    let mut ids: Vec<VertexId> = set.into_iter().collect();
    ids.sort_unstable();
    ids
}

impl VertexField {
    pub fn from_values(
        depth: u32,
        mode: NumericMode,
        values: FxHashMap<VertexId, f64>,
        holder: Option<HolderMeta>,
    ) -> Result<Self> {
        if values.values().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("field values must be finite".into()));
        }
        Ok(VertexField { depth, mode, values, holder })
    }

    /// Samples a floating-point function of the Cartesian position.
    pub fn from_fn<C: CellComplex>(cx: &C, depth: u32, f: impl Fn((f64, f64)) -> f64) -> Result<Self> {
        Self::check_depth(cx, depth)?;
        let values = vertex_ids(cx, depth).into_iter().map(|v| (v, f(cx.vertex_point(v)))).collect();
        Self::from_values(depth, NumericMode::Float, values, None)
    }

    /// Samples a function given exactly on vertex ids; every value must be
    /// representable as binary64 without rounding.
    pub fn from_exact_fn<C: CellComplex>(
        cx: &C,
        depth: u32,
        f: impl Fn(VertexId) -> Dyadic,
    ) -> Result<Self> {
        Self::check_depth(cx, depth)?;
        let mut values = FxHashMap::default();
        for v in vertex_ids(cx, depth) {
            let exact = f(v);
            let x = exact.to_f64();
            if Dyadic::from_f64(x).as_ref() != Some(&exact) {
                return Err(Error::Parameter(format!("value {exact} is not representable exactly")));
            }
            values.insert(v, x);
        }
        Self::from_values(depth, NumericMode::Exact, values, None)
    }

    fn check_depth<C: CellComplex>(cx: &C, depth: u32) -> Result<()> {
        if depth > cx.resolution() {
            return Err(Error::Parameter(format!(
                "field depth {depth} exceeds complex resolution {}",
                cx.resolution()
            )));
        }
        Ok(())
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn holder_meta(&self) -> Option<HolderMeta> {
        self.holder
    }

    pub fn with_holder_meta(mut self, meta: HolderMeta) -> Self {
        self.holder = Some(meta);
        self
    }

    pub fn value(&self, v: VertexId) -> Option<f64> {
        self.values.get(&v).copied()
    }

    pub fn values(&self) -> impl Iterator<Item = (&VertexId, &f64)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_values<C: CellComplex>(&self, cx: &C, cell: C::Cell) -> Vec<f64> {
        cx.vertices(cell)
            .into_iter()
            .map(|v| self.values.get(&v).copied().unwrap_or_else(|| panic!("no value at vertex {v:?}")))
            .collect()
    }

    pub fn cell_range<C: CellComplex>(&self, cx: &C, cell: C::Cell) -> (f64, f64) {
        range_of(&self.cell_values(cx, cell))
    }

    /// Maximum Hölder quotient over all vertex pairs.
    pub fn holder_audit<C: CellComplex>(&self, cx: &C, alpha: f64) -> HolderReport {
        let mut ids: Vec<&VertexId> = self.values.keys().collect();
        ids.sort_unstable();
        let points: Vec<(f64, f64)> = ids.iter().map(|v| cx.vertex_point(**v)).collect();
        let vals: Vec<f64> = ids.iter().map(|v| self.values[*v]).collect();
        max_holder_ratio(&points, &vals, alpha)
    }

    /// Minimum and maximum over all stored values.
    pub fn value_range(&self) -> (f64, f64) {
        let vals: Vec<f64> = self.values.values().copied().collect();
        range_of(&vals)
    }
}

pub fn range_of(vals: &[f64]) -> (f64, f64) {
    vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// The embedded Cartesian x-coordinate `u + v/2`, exact on the triangle.
pub fn xcoord_field(cx: &TriangleComplex, depth: u32) -> Result<VertexField> {
    let r = cx.resolution();
    VertexField::from_exact_fn(cx, depth, |(a, b)| {
        Dyadic::new((2 * a + b) as i64, r + 1)
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomHolderSpec {
    pub seed: u64,
    /// Work-item counter; distinct streams never overlap.
    pub stream: u64,
    pub c: f64,
    pub alpha: f64,
    pub depth: u32,
    /// Multiplier on the perturbation amplitude (1 = standard, 0 = none).
    pub perturbation: f64,
    pub max_retries: u32,
}

impl RandomHolderSpec {
    pub fn new(seed: u64, c: f64, alpha: f64, depth: u32) -> Self {
        RandomHolderSpec { seed, stream: 0, c, alpha, depth, perturbation: 1.0, max_retries: 64 }
    }

    pub fn stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn perturbation(mut self, p: f64) -> Self {
        self.perturbation = p;
        self
    }
}

/// Random field on the Sierpiński vertices by midpoint displacement, audited
/// to be `c`-Hölder-`alpha` and redrawn when the audit fails.
pub fn random_holder_field(spec: &RandomHolderSpec) -> Result<(TriangleComplex, VertexField, HolderReport)> {
    if !(spec.c > 0.0) || !(spec.alpha > 0.0 && spec.alpha <= 1.0) {
        return Err(Error::Parameter(format!("need c > 0 and 0 < alpha <= 1, got c={} alpha={}", spec.c, spec.alpha)));
    }
    let cx = TriangleComplex::new(spec.depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(spec.stream);
    let levels: Vec<Vec<crate::tri::TriCell>> = (0..spec.depth).map(|l| cells_at_level(&cx, l)).collect();
    for _ in 0..=spec.max_retries {
        let mut values: FxHashMap<VertexId, f64> = FxHashMap::default();
        for v in cx.vertices(crate::tri::TriCell::ROOT) {
            // root spread c/2 leaves room for the finer perturbations
            values.insert(v, spec.c * 0.5 * (rng.gen::<f64>() - 0.5));
        }
        for (l, cells) in levels.iter().enumerate() {
            let amp = spec.perturbation * spec.c / 4.0 * (-((l + 1) as f64) * spec.alpha).exp2();
            for &cell in cells {
                let vs = cx.vertices(cell);
                for (p, q) in [(0, 1), (1, 2), (0, 2)] {
                    let mid = ((vs[p].0 + vs[q].0) / 2, (vs[p].1 + vs[q].1) / 2);
                    if values.contains_key(&mid) {
                        continue;
                    }
                    let avg = 0.5 * (values[&vs[p]] + values[&vs[q]]);
                    let noise = if amp > 0.0 { amp * (2.0 * rng.gen::<f64>() - 1.0) } else { 0.0 };
                    values.insert(mid, avg + noise);
                }
            }
        }
        let field = VertexField::from_values(
            spec.depth,
            NumericMode::Float,
            values,
            Some(HolderMeta { c: spec.c, alpha: spec.alpha }),
        )?;
        let audit = field.holder_audit(&cx, spec.alpha);
        if audit.max_ratio <= spec.c {
            return Ok((cx, field, audit));
        }
    }
    Err(Error::Budget(format!(
        "no c-Hölder sample after {} redraws (seed {}, stream {})",
        spec.max_retries, spec.seed, spec.stream
    )))
}
