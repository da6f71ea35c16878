use anyhow::{bail, Result};
use clap::Subcommand;
use hthick::phi::audit::{holder_audit, level_cell_count};
use hthick::phi::optimize::{log2_biguint, optimize_params};
use hthick::phi::admissible::admissible_count;
use hthick::phi::{parse_address, Block, PhiWitness};
use hthick::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::out::Sink;

#[derive(Subcommand)]
pub enum PhiCmd {
    /// Choose or check the block parameters.
    Build {
        /// Target Hölder exponent; alone it asks the optimizer for `(k*, w)`.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long)]
        kstar: Option<usize>,
        #[arg(long)]
        w: Option<usize>,
    },
    /// Value interval of a cylinder given as `b1|b2|...`.
    Eval {
        #[arg(long)]
        blocks: String,
        #[arg(long, default_value_t = 3)]
        kstar: usize,
        #[arg(long, default_value_t = 1)]
        w: usize,
    },
    /// Hölder or level-count audit; exit code 1 on a breach.
    Audit {
        #[arg(long, conflicts_with = "levels", required_unless_present = "levels")]
        holder: bool,
        #[arg(long)]
        levels: bool,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        kstar: usize,
        #[arg(long, default_value_t = 1)]
        w: usize,
        /// Defaults to just below `log2 #I / (k* + w)`.
        #[arg(long)]
        alpha: Option<f64>,
        /// Random levels for `--levels`.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BuildReport {
    k_star: usize,
    w: usize,
    size: String,
    log2_size: f64,
    /// `log2 #I / (k* + w)`, the largest exponent the blocks support.
    alpha_max: f64,
    ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocks: Option<Vec<String>>,
}

#[derive(Serialize)]
struct EvalReport {
    interval: [String; 2],
    rank: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LevelRow {
    n: usize,
    samples: usize,
    max_count: usize,
    bound: u64,
}

pub fn run(cmd: PhiCmd, seed: u64, sink: &mut Sink) -> Result<bool> {
    match cmd {
        PhiCmd::Build { alpha, eps, kstar, w } => {
            let (k, wd) = match (kstar, w, alpha) {
                (Some(k), Some(w), _) => (k, w),
                (None, None, Some(a)) => {
                    let p = optimize_params(a, eps)?;
                    (p.k_star, p.w)
                }
                _ => bail!("give either --kstar and --w, or --alpha"),
            };
            if wd == 0 || wd > k {
                bail!("need 1 <= w <= k*, got k* = {k}, w = {wd}");
            }
            let size = admissible_count(k, wd);
            let log2_size = log2_biguint(&size);
            let blocks = (k <= 10).then(|| -> Result<Vec<String>> {
                let w = PhiWitness::new(k, wd)?;
                Ok(w.set().blocks().iter().map(Block::to_string).collect())
            });
            let report = BuildReport {
                k_star: k,
                w: wd,
                size: size.to_string(),
                log2_size,
                alpha_max: log2_size / (k + wd) as f64,
                ratio: wd as f64 / (k + wd) as f64,
                blocks: blocks.transpose()?,
            };
            sink.json(&report)?;
            if let Some(a) = alpha {
                let need = (k + wd) as f64 * a;
                if log2_size < need {
                    eprintln!("#I = {size} < 2^((k*+w) alpha) = 2^{need:.6}");
                    return Ok(false);
                }
            }
            Ok(true)
        }
        PhiCmd::Eval { blocks, kstar, w } => {
            let witness = PhiWitness::new(kstar, w)?;
            let iv = witness.eval_blocks(&parse_address(&blocks)?)?;
            sink.json(&EvalReport { interval: iv.endpoint_strings(), rank: iv.rank.to_string() })?;
            Ok(true)
        }
        PhiCmd::Audit { holder, depth, kstar, w, alpha, samples, .. } => {
            let witness = PhiWitness::new(kstar, w)?;
            if holder {
                let a = alpha.unwrap_or((witness.set().size() as f64).log2() / (kstar + w) as f64 - 0.01);
                let rep = holder_audit(&witness, a, depth)?;
                sink.json(&rep)?;
                return Ok(rep.ok());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            let mut ok = true;
            for n in 1..=depth {
                let mut row = LevelRow { n, samples: 0, max_count: 0, bound: 0 };
                let mut attempts = 0;
                while row.samples < samples && attempts < 100 * samples {
                    attempts += 1;
                    let c = match level_cell_count(&witness, rng.gen(), n) {
                        Err(Error::Guard(_)) => continue,
                        other => other?,
                    };
                    row.samples += 1;
                    row.max_count = row.max_count.max(c.count);
                    row.bound = c.bound;
                    ok &= c.ok();
                }
                rows.push(row);
            }
            sink.json(&rows)?;
            Ok(ok)
        }
    }
}
