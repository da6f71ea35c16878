use anyhow::{bail, Result};
use clap::Subcommand;
use hthick::bounds::{alpha_grid, curve_table, DEFAULT_TOL};

use crate::out::Sink;

#[derive(Subcommand)]
pub enum BoundsCmd {
    /// CSV of the lower and upper curves on an alpha grid.
    Curve {
        #[arg(long, default_value_t = 0.01)]
        alpha_min: f64,
        #[arg(long, default_value_t = 0.99)]
        alpha_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Geometric instead of uniform spacing.
        #[arg(long)]
        log_grid: bool,
    },
}

pub fn run(cmd: BoundsCmd, sink: &mut Sink) -> Result<bool> {
    match cmd {
        BoundsCmd::Curve { alpha_min, alpha_max, steps, log_grid } => {
            if !(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max < 1.0) {
                bail!("need 0 < alpha-min < alpha-max < 1, got {alpha_min} and {alpha_max}");
            }
            let table = curve_table(&alpha_grid(alpha_min, alpha_max, steps, log_grid)?, DEFAULT_TOL)?;
            table.write_csv(sink)?;
            if let Some((row, what)) = table.first_violation() {
                eprintln!("invariant breach at row {row}: {}", what.join(", "));
                return Ok(false);
            }
            Ok(true)
        }
    }
}
