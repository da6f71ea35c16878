mod bounds;
mod cross;
mod out;
mod phi;
mod sier;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "hthick", version, about = "Level-set thickness tools for the Sierpiński triangle and the cross fractal")]
struct Cli {
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized command.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension bound curves.
    Bounds {
        #[command(subcommand)]
        cmd: bounds::BoundsCmd,
    },
    /// Sierpiński triangle: conductivity scheme and level-set fronts.
    Sier {
        #[command(subcommand)]
        cmd: sier::SierCmd,
    },
    /// The triangle witness function.
    Phi {
        #[command(subcommand)]
        cmd: phi::PhiCmd,
    },
    /// The cross fractal.
    Cross {
        #[command(subcommand)]
        cmd: cross::CrossCmd,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut sink = match out::Sink::open(cli.output.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let res = match cli.command {
        Command::Bounds { cmd } => bounds::run(cmd, &mut sink),
        Command::Sier { cmd } => sier::run(cmd, cli.seed, &mut sink),
        Command::Phi { cmd } => phi::run(cmd, cli.seed, &mut sink),
        Command::Cross { cmd } => cross::run(cmd, cli.seed, &mut sink),
    };
    let res = res.and_then(|ok| sink.finish().map(|_| ok));
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
