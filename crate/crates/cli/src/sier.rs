use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Subcommand, ValueEnum};
use hthick::levelset::audit::{front_stats, mu_kappa_audit, sample_levels, write_front_stats_csv};
use hthick::levelset::field::vertex_ids;
use hthick::levelset::front::straddles;
use hthick::levelset::{
    build_front, build_measure, cover_audit, descend, random_holder_field, xcoord_field, LevelQuery, NumericMode,
    RandomHolderSpec, TriangleComplex, VertexField, VertexId,
};
use hthick::scheme::{write_histogram_csv, ConductivityAtlas};
use hthick::tri::TriCell;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::out::Sink;

#[derive(Subcommand)]
pub enum SierCmd {
    /// Expand the conductivity scheme; JSON lines per node by default.
    Scheme {
        #[arg(long)]
        depth: u32,
        /// Per-root histogram CSV instead of the node list.
        #[arg(long)]
        histogram: bool,
        /// Check the conductivity formula and the tiling of every level.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1 << 24)]
        budget: usize,
    },
    /// Fronts of one level set of a field on the triangle.
    Levelset {
        /// `xcoord`, `random`, or a CSV file `u,v,value` of vertex ids at
        /// the given depth.
        #[arg(long = "fn", default_value = "xcoord")]
        field: String,
        #[arg(long)]
        depth: u32,
        /// A level, or `sweep` for nine levels across the root range.
        #[arg(long)]
        r: String,
        /// Per-level statistics CSV for this `d1` instead of the fronts.
        #[arg(long)]
        d1: Option<f64>,
        /// Hölder exponent of the random field.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Randomized audits; exit code 1 on any violation.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Field depth for the mu and front suites.
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Suite {
    Cover,
    Mu,
    Front,
}

pub fn run(cmd: SierCmd, seed: u64, sink: &mut Sink) -> Result<bool> {
    match cmd {
        SierCmd::Scheme { depth, histogram, verify, budget } => scheme(depth, histogram, verify, budget, sink),
        SierCmd::Levelset { field, depth, r, d1, alpha } => levelset(&field, depth, &r, d1, alpha, seed, sink),
        SierCmd::Verify { suite, trials, depth } => {
            let report = match suite {
                Suite::Cover => cover_suite(trials, seed)?,
                Suite::Mu => mu_suite(trials, depth, seed)?,
                Suite::Front => front_suite(trials, depth, seed)?,
            };
            sink.json(&report)?;
            Ok(report.violations.is_empty())
        }
    }
}

fn scheme(depth: u32, histogram: bool, verify: bool, budget: usize, sink: &mut Sink) -> Result<bool> {
    let atlas = ConductivityAtlas::expand(depth, budget)?;
    if !atlas.is_complete() {
        bail!("node budget {budget} reached at depth {}; raise --budget", atlas.depth());
    }
    let mut ok = true;
    if verify {
        let bad = atlas.kappa_formula_violations();
        for node in bad.iter().take(10) {
            eprintln!("conductivity exception: {} (n = {}, kExp = {})", node.cell, node.n, node.k_exp);
        }
        ok &= bad.is_empty();
        for n in 1..=depth {
            let rep = atlas.cover_audit(n)?;
            if !rep.ok() {
                eprintln!("level {n}: {} overlaps, {} gaps", rep.overlaps, rep.gaps);
                ok = false;
            }
        }
    }
    if histogram {
        let hists = (1..=depth).map(|n| atlas.histogram(n)).collect::<hthick::Result<Vec<_>>>()?;
        ok &= hists.iter().all(|h| h.per_root[1] == h.per_root[0] && h.per_root[2] == h.per_root[0]);
        write_histogram_csv(&hists, sink)?;
    } else if !verify {
        atlas.write_jsonl(depth, sink)?;
    }
    Ok(ok)
}

fn load_field(name: &str, depth: u32, alpha: f64, seed: u64) -> Result<(TriangleComplex, VertexField)> {
    match name {
        "xcoord" => {
            let cx = TriangleComplex::new(depth)?;
            let f = xcoord_field(&cx, depth)?;
            Ok((cx, f))
        }
        "random" => {
            let (cx, f, _) = random_holder_field(&RandomHolderSpec::new(seed, 1.0, alpha, depth))?;
            Ok((cx, f))
        }
        path => {
            let text = fs::read_to_string(PathBuf::from(path)).with_context(|| format!("reading {path}"))?;
            let cx = TriangleComplex::new(depth)?;
            let mut values: FxHashMap<VertexId, f64> = FxHashMap::default();
            for (i, line) in text.lines().enumerate() {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols.len() != 3 || (i == 0 && cols[0] == "u") {
                    continue;
                }
                let v = (cols[0].parse()?, cols[1].parse()?);
                values.insert(v, cols[2].parse()?);
            }
            let missing = vertex_ids(&cx, depth).into_iter().filter(|v| !values.contains_key(v)).count();
            if missing > 0 {
                bail!("{path}: {missing} vertices of depth {depth} have no value");
            }
            Ok((cx, VertexField::from_values(depth, NumericMode::Float, values, None)?))
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FrontLine {
    r: f64,
    level: u32,
    front_size: usize,
    cells: Vec<String>,
}

fn levelset(name: &str, depth: u32, r: &str, d1: Option<f64>, alpha: f64, seed: u64, sink: &mut Sink) -> Result<bool> {
    let (cx, field) = load_field(name, depth, alpha, seed)?;
    let levels: Vec<f64> = if r == "sweep" {
        let (lo, hi) = field.cell_range(&cx, TriCell::ROOT);
        (1..=9).map(|i| lo + (hi - lo) * i as f64 / 10.0).collect()
    } else {
        vec![r.parse().with_context(|| format!("--r {r}"))?]
    };
    let atlas = match d1 {
        Some(_) => Some(ConductivityAtlas::expand(depth.max(1), 1 << 26)?),
        None => None,
    };
    for r in levels {
        let q = LevelQuery::new(r);
        if let Err(e) = q.check(&field) {
            eprintln!("skipping r = {r}: {e}");
            continue;
        }
        match (&atlas, d1) {
            (Some(atlas), Some(d1)) => {
                let rows = front_stats(&cx, &field, &q, atlas, d1, depth)?;
                write_front_stats_csv(&rows, sink)?;
            }
            _ => {
                for level in 0..=depth {
                    let front = build_front(&cx, &field, level, &q)?;
                    let cells = front.cells.iter().map(ToString::to_string).collect();
                    sink.line(&FrontLine { r, level, front_size: front.len(), cells })?;
                }
            }
        }
    }
    Ok(true)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SuiteReport {
    suite: &'static str,
    seed: u64,
    trials: u64,
    checks: usize,
    max_ratio: Option<f64>,
    violations: Vec<String>,
}

fn cover_suite(trials: u64, seed: u64) -> Result<SuiteReport> {
    let cx = TriangleComplex::new(1)?;
    let ids = vertex_ids(&cx, 1);
    let per = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            // half the draws come from three values, so ties are common
            let coarse = rng.gen::<bool>();
            let values = ids
                .iter()
                .map(|&v| (v, if coarse { rng.gen_range(0..3) as f64 } else { rng.gen::<f64>() }))
                .collect();
            let f = VertexField::from_values(1, NumericMode::Float, values, None)?;
            let rep = cover_audit(&cx, &f, TriCell::ROOT)?;
            Ok((!rep.covered).then(|| format!("trial {t}: {:?} not covered by {:?}", rep.parent, rep.children)))
        })
        .collect::<hthick::Result<Vec<_>>>()?;
    Ok(SuiteReport {
        suite: "cover",
        seed,
        trials,
        checks: trials as usize,
        max_ratio: None,
        violations: per.into_iter().flatten().collect(),
    })
}

fn mu_suite(trials: u64, depth: u32, seed: u64) -> Result<SuiteReport> {
    let per = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (cx, f, _) = random_holder_field(&RandomHolderSpec::new(seed, 1.0, 0.5, depth).stream(t))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let mut out = (0usize, 0f64, Vec::new());
            for q in sample_levels(&f, f.cell_range(&cx, TriCell::ROOT), 0, 10, &mut rng) {
                let rep = mu_kappa_audit(&cx, &f, &q, depth)?;
                out.0 += rep.nodes_checked;
                out.1 = out.1.max(rep.max_ratio);
                out.2.extend(rep.violations.iter().map(|(c, d, e)| format!("trial {t}, r = {}: {c} has 1/{d} > 2^-{e}", q.r)));
            }
            Ok(out)
        })
        .collect::<hthick::Result<Vec<_>>>()?;
    let mut rep = SuiteReport { suite: "mu", seed, trials, checks: 0, max_ratio: Some(0.0), violations: Vec::new() };
    for (n, max, bad) in per {
        rep.checks += n;
        rep.max_ratio = rep.max_ratio.map(|m| m.max(max));
        rep.violations.extend(bad);
    }
    Ok(rep)
}

/// Every front cell has a front child, and the measure on each level of the
/// descendant tree has total mass one.
fn front_suite(trials: u64, depth: u32, seed: u64) -> Result<SuiteReport> {
    let per = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (cx, f, _) = random_holder_field(&RandomHolderSpec::new(seed, 1.0, 0.5, depth).stream(t))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let (mut checks, mut bad) = (0usize, Vec::new());
            for q in sample_levels(&f, f.cell_range(&cx, TriCell::ROOT), 0, 5, &mut rng) {
                for n in 0..depth {
                    for c in build_front(&cx, &f, n, &q)?.cells {
                        checks += 1;
                        if !c.children().iter().any(|&ch| straddles(&f.cell_values(&cx, ch), q.r)) {
                            bad.push(format!("trial {t}, r = {}: {c} has no front child", q.r));
                        }
                    }
                }
                let tree = descend(&cx, &f, TriCell::ROOT, &q, depth)?;
                let measure = build_measure(&tree)?;
                for k in 0..=depth as usize {
                    checks += 1;
                    if measure.level_total(k) != BigRational::one() {
                        bad.push(format!("trial {t}, r = {}: level {k} mass {}", q.r, measure.level_total(k)));
                    }
                }
            }
            Ok((checks, bad))
        })
        .collect::<hthick::Result<Vec<_>>>()?;
    let mut rep = SuiteReport { suite: "front", seed, trials, checks: 0, max_ratio: None, violations: Vec::new() };
    for (n, bad) in per {
        rep.checks += n;
        rep.violations.extend(bad);
    }
    Ok(rep)
}
