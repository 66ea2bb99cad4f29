use std::process::ExitCode;

use clap::{Parser, Subcommand};

use regimekit_cli::{cmd_pipeline, cmd_qeval, cmd_qtrain, cmd_sweep, cmd_synth, ConfigArgs, RunConfig};

#[derive(Parser)]
#[command(name = "regimekit", version, about = "Hurst-gated strategy selection and tabular Q-learning on daily closes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic `<SYMBOL>.csv` series.
    Synth(ConfigArgs),
    /// Classify, backtest and summarize a universe.
    Pipeline(ConfigArgs),
    /// Gated-return statistics over a grid of Hurst boundaries.
    Sweep(ConfigArgs),
    /// Train a Q-table on the training date range.
    Qtrain(ConfigArgs),
    /// Evaluate forced and restricted policies on the evaluation date range.
    Qeval(ConfigArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Synth(a) => {
            let paths = cmd_synth(&RunConfig::resolve(&a)?)?;
            println!("wrote {} series", paths.len());
        }
        Command::Pipeline(a) => {
            let cfg = RunConfig::resolve(&a)?;
            let r = cmd_pipeline(&cfg)?;
            println!(
                "{} symbols ({} skipped); mean momentum {:.6}, mean-reversion {:.6}, gated {:.6}",
                r.symbols, r.skipped, r.momentum.mean, r.meanrev.mean, r.gated.mean
            );
        }
        Command::Sweep(a) => {
            let r = cmd_sweep(&RunConfig::resolve(&a)?)?;
            println!("{} boundaries over {} symbols", r.points.len(), r.symbols);
        }
        Command::Qtrain(a) => {
            let (_, r) = cmd_qtrain(&RunConfig::resolve(&a)?)?;
            println!("{} training steps over {} symbols, {} cells", r.training_steps, r.symbols, r.cells);
        }
        Command::Qeval(a) => {
            let r = cmd_qeval(&RunConfig::resolve(&a)?)?;
            for m in &r.modes {
                println!("{:?}: median sharpe {:?} over {} symbols", m.mode, m.median_sharpe, m.symbols.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("regimekit: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
