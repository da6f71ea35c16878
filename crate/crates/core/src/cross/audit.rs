//! Standard piecewise-affine test fields on the cross and the conductivity
//! audit of their level-set fronts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::levelset::audit::sample_levels;
use crate::levelset::complex::{CellComplex, VertexId};
use crate::levelset::field::VertexField;
use crate::levelset::front::{build_front, descend, LevelQuery};

use super::complex::{CrossCell, CrossComplex};
use super::model::ClassTable;
use super::phi::phi_grid;

/// Bits of the random node values.
const VALUE_BITS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
}

/// A field `g_i + (g_{i+1} - g_i) phi(local coordinate)` on each level-1
/// column (or row), with `g` a random function on the level-1 grid lines.
#[derive(Clone, Debug, PartialEq)]
pub struct StepField {
    pub axis: Axis,
    /// `2^m + 1` node values, in units of `2^-20`.
    pub nodes: Vec<i64>,
}

impl StepField {
    pub fn random(m: u32, rng: &mut ChaCha8Rng) -> Self {
        let axis = if rng.gen::<bool>() { Axis::X } else { Axis::Y };
        let span = 1i64 << VALUE_BITS;
        let nodes = (0..=(1u64 << m)).map(|_| rng.gen_range(-span..=span)).collect();
        StepField { axis, nodes }
    }

    /// Exact value at a vertex of the `2^{m res}` grid.
    pub fn value(&self, m: u32, res: u32, v: VertexId) -> Dyadic {
        let t = match self.axis {
            Axis::X => v.0,
            Axis::Y => v.1,
        };
        let col_bits = m * (res - 1);
        let col = ((t >> col_bits) as usize).min(self.nodes.len() - 2);
        let local = t - ((col as u64) << col_bits);
        let phi = phi_grid(m, local, res - 1);
        let (a, b) = (self.nodes[col], self.nodes[col + 1]);
        let v = &Dyadic::from_int(a) + &(&Dyadic::from_int(b - a) * &phi);
        v.scale_pow2(-(VALUE_BITS as i64))
    }

    pub fn sample(&self, cx: &CrossComplex, depth: u32) -> Result<VertexField> {
        if depth == 0 {
            return Err(Error::Parameter("step fields need depth >= 1".into()));
        }
        let (m, res) = (cx.model().m(), cx.resolution());
        if depth != res {
            return Err(Error::Parameter(format!("sample depth {depth} must equal the complex resolution {res}")));
        }
        VertexField::from_exact_fn(cx, depth, |v| self.value(m, res, v))
    }
}

/// The x-coordinate, exact on the grid.
pub fn xcoord_field(cx: &CrossComplex, depth: u32) -> Result<VertexField> {
    let bits = cx.model().m() * cx.resolution();
    VertexField::from_exact_fn(cx, depth, |v| Dyadic::new(v.0, bits))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConductivityReport {
    pub front_cells: usize,
    /// `(cell, k)` pairs checked.
    pub checks: usize,
    /// Smallest `sum kappa(descendants) / kappa(cell)` seen.
    pub min_ratio: f64,
    pub violations: Vec<String>,
}

impl ConductivityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: ConductivityReport) {
        self.front_cells += other.front_cells;
        self.checks += other.checks;
        self.min_ratio = self.min_ratio.min(other.min_ratio);
        self.violations.extend(other.violations);
    }
}

/// For every front cell `Q` at every level below the field depth, and every
/// `k` down to that depth: the conductivities of the `r`-descendants of `Q`
/// at level `+k` sum to at least `kappa(Q)`. Ratios to `kappa(Q)` are exact.
pub fn conductivity_audit(
    cx: &CrossComplex,
    table: &ClassTable,
    field: &VertexField,
    query: &LevelQuery,
) -> Result<ConductivityReport> {
    if table.model().m() != cx.model().m() {
        return Err(Error::Parameter("class table and complex use different m".into()));
    }
    let depth = field.depth();
    let mut rep = ConductivityReport { min_ratio: f64::INFINITY, ..Default::default() };
    for n in 0..depth {
        let front = build_front(cx, field, n, query)?;
        for &q in &front.cells {
            rep.front_cells += 1;
            let tree = descend(cx, field, q, query, depth - n)?;
            // conductivity of each node relative to q, as a denominator
            let mut dens: Vec<BigInt> = vec![BigInt::one()];
            for k in 1..tree.levels.len() {
                let level = &tree.levels[k];
                let next: Vec<BigInt> = level
                    .iter()
                    .map(|node| {
                        let parent = node.parent.expect("non-root node") as usize;
                        &dens[parent] * factor_den(cx, table, node.cell)
                    })
                    .collect();
                let sum = next
                    .iter()
                    .fold(BigRational::zero(), |acc, d| acc + BigRational::new(BigInt::one(), d.clone()));
                rep.checks += 1;
                let ratio = sum.to_f64().unwrap_or(0.0);
                rep.min_ratio = rep.min_ratio.min(ratio);
                if sum < BigRational::one() {
                    rep.violations.push(format!("cell {q} at +{k}: ratio {sum}"));
                }
                dens = next;
            }
        }
    }
    Ok(rep)
}

fn factor_den(cx: &CrossComplex, table: &ClassTable, cell: CrossCell) -> u32 {
    let (a, b) = cx.local_digit(cell, cell.level);
    table.class_at(a, b).expect("retained square").kind.factor_den(table.l())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialSpec {
    pub seed: u64,
    pub trials: u64,
    pub depth: u32,
    pub levels_per_field: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialSummary {
    pub m: u32,
    pub l: u32,
    pub trials: u64,
    pub queries: usize,
    pub report: ConductivityReport,
}

/// Random step fields, one ChaCha stream per trial, audited in parallel and
/// merged in trial order.
pub fn conductivity_trials(table: &ClassTable, spec: &TrialSpec) -> Result<TrialSummary> {
    let model = std::sync::Arc::new(table.model().clone());
    let cx = CrossComplex::new(model, spec.depth)?;
    let m = cx.model().m();
    let per_trial: Vec<Result<(usize, ConductivityReport)>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(t);
            let f = StepField::random(m, &mut rng);
            let field = f.sample(&cx, spec.depth)?;
            let queries = sample_levels(&field, field.value_range(), 0, spec.levels_per_field, &mut rng);
            let mut rep = ConductivityReport { min_ratio: f64::INFINITY, ..Default::default() };
            for q in &queries {
                let mut one = conductivity_audit(&cx, table, &field, q)?;
                for v in &mut one.violations {
                    *v = format!("trial {t}, r = {}: {v}", q.r);
                }
                rep.merge(one);
            }
            Ok((queries.len(), rep))
        })
        .collect();
    let mut report = ConductivityReport { min_ratio: f64::INFINITY, ..Default::default() };
    let mut queries = 0;
    for item in per_trial {
        let (n, rep) = item?;
        queries += n;
        report.merge(rep);
    }
    Ok(TrialSummary { m, l: table.l(), trials: spec.trials, queries, report })
}
