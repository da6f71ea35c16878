use std::io::Write;

use anyhow::{bail, Result};
use clap::{Subcommand, ValueEnum};
use hthick::cross::audit::{conductivity_trials, TrialSpec};
use hthick::cross::phi::phi_expansion;
use hthick::cross::{transition_bounds, Adjacency, ClassTable, CrossModel, Expansion};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::out::Sink;

#[derive(Subcommand)]
pub enum CrossCmd {
    /// Retained squares of the generator, as JSON.
    Build {
        #[arg(long)]
        m: u32,
    },
    /// Classification CSV of the squares down to `--levels`.
    Classify {
        #[arg(long)]
        m: u32,
        #[arg(long = "L")]
        l: u32,
        #[arg(long, default_value_t = 1)]
        levels: u32,
        #[arg(long, value_enum, default_value_t = Adj::EdgeOrCorner)]
        adjacency: Adj,
    },
    /// The monotone digit function at a base-2^m expansion, e.g. `3 4 (4)`.
    Phi {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        x: String,
    },
    /// Conductivity audit over random piecewise-affine fields.
    Audit {
        #[arg(long)]
        m: u32,
        #[arg(long = "L")]
        l: u32,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Random levels per field.
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = Adj::EdgeOrCorner)]
        adjacency: Adj,
    },
    /// Phase-transition bounds, as JSON.
    Transition {
        #[arg(long)]
        m: u32,
        #[arg(long = "L")]
        l: f64,
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Adj {
    Edge,
    EdgeOrCorner,
}

impl From<Adj> for Adjacency {
    fn from(a: Adj) -> Adjacency {
        match a {
            Adj::Edge => Adjacency::Edge,
            Adj::EdgeOrCorner => Adjacency::EdgeOrCorner,
        }
    }
}

#[derive(Serialize)]
struct ModelJson {
    m: u32,
    p: usize,
    squares: Vec<[u32; 2]>,
}

#[derive(Serialize)]
struct PhiJson {
    m: u32,
    x: String,
    value: String,
    approx: f64,
}

/// Level-`--levels` paths are `side^2m`-fold; keep the table printable.
const MAX_ROWS: u64 = 1 << 22;

pub fn run(cmd: CrossCmd, seed: u64, sink: &mut Sink) -> Result<bool> {
    match cmd {
        CrossCmd::Build { m } => {
            let model = CrossModel::new(m)?;
            let squares = model.squares().iter().map(|&(i, j)| [i, j]).collect();
            sink.json(&ModelJson { m, p: model.p(), squares })?;
            Ok(true)
        }
        CrossCmd::Classify { m, l, levels, adjacency } => {
            let table = ClassTable::new(CrossModel::new(m)?, l, adjacency.into())?;
            let p = table.model().p() as u64;
            if levels == 0 || p.checked_pow(levels).map_or(true, |n| n > MAX_ROWS) {
                bail!("{levels} levels of {p} squares exceed {MAX_ROWS} rows");
            }
            writeln!(sink, "level,square,path,class,depth,kappa")?;
            let mut paths: Vec<Vec<u32>> = vec![Vec::new()];
            for level in 1..=levels {
                paths = paths
                    .into_iter()
                    .flat_map(|path| {
                        (0..p as u32).map(move |k| {
                            let mut next = path.clone();
                            next.push(k);
                            next
                        })
                    })
                    .collect();
                for path in &paths {
                    let last = *path.last().expect("nonempty path");
                    let (i, j) = table.model().squares()[last as usize];
                    let class = table.class(last);
                    let depth = class.depth.map(|d| d.to_string()).unwrap_or_default();
                    let path_str = path.iter().map(u32::to_string).collect::<Vec<_>>().join(".");
                    writeln!(sink, "{level},{i}:{j},{path_str},{},{depth},{}", class.label(), table.kappa(path))?;
                }
            }
            Ok(true)
        }
        CrossCmd::Phi { m, x } => {
            let e: Expansion = x.parse()?;
            let v = phi_expansion(m, &e)?;
            sink.json(&PhiJson { m, x: e.to_string(), value: v.to_string(), approx: v.to_f64().unwrap_or(f64::NAN) })?;
            Ok(true)
        }
        CrossCmd::Audit { m, l, trials, depth, levels, adjacency } => {
            let table = ClassTable::new(CrossModel::new(m)?, l, adjacency.into())?;
            let summary = conductivity_trials(&table, &TrialSpec { seed, trials, depth, levels_per_field: levels })?;
            sink.json(&summary)?;
            Ok(summary.report.ok())
        }
        CrossCmd::Transition { m, l, alpha } => {
            sink.json(&transition_bounds(m, l, alpha)?)?;
            Ok(true)
        }
    }
}
