//! `lotto`: equilibrium queries, sweeps, verification batches and Monte
//! Carlo simulation for General Lotto games with a binary threshold sensor.

use std::process;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod simulate;

#[derive(Parser)]
#[command(
    name = "lotto",
    version,
    about = "Equilibria of General Lotto games with a binary threshold sensor",
    long_about = "Computes equilibrium payoffs, regions and budget decompositions for the \
                  General Lotto game in which the Breaker observes whether the Attacker's \
                  realized allocation exceeded a threshold. Ties go to the Breaker. \
                  Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form solution of a single instance.
    Payoff(PayoffArgs),
    /// Sweep the threshold and tabulate the payoff curve (CSV).
    SweepTau(SweepArgs),
    /// Tabulate payoff and region over a budget grid (CSV).
    Heatmap(HeatmapArgs),
    /// Check closed forms against the numeric oracle on random instances.
    Verify(VerifyArgs),
    /// Estimate the Breaker payoff by simulating the sensor protocol.
    ///
    /// Uses the closed-form optimal strategies. Draws that signal BELOW the
    /// threshold play out the below-threshold profile bid against bid. Draws
    /// that signal ABOVE credit the analytic above-threshold value instead of
    /// sampling: that sub-game is a head-start contest whose strategy
    /// distributions this tool does not construct, only its value. The
    /// estimator is unbiased for the closed-form payoff either way. With
    /// --tau 0 the sensor never fires and the classic equilibrium profile is
    /// simulated directly.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct PayoffArgs {
    /// Attacker budget.
    #[arg(long)]
    xa: f64,
    /// Breaker budget.
    #[arg(long)]
    xb: f64,
    /// Sensor threshold (0 = classic game, no sensor).
    #[arg(long)]
    tau: f64,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    xa: f64,
    #[arg(long)]
    xb: f64,
    /// Lower end of the threshold range.
    #[arg(long, default_value_t = 0.0)]
    tau_min: f64,
    /// Upper end of the threshold range.
    #[arg(long)]
    tau_max: f64,
    /// Number of grid points (at least 2), endpoints included.
    #[arg(long)]
    steps: usize,
    /// Output CSV path (columns: tau,u_b,region,u_b_classic).
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct HeatmapArgs {
    /// Sensor threshold for the whole grid.
    #[arg(long)]
    tau: f64,
    /// Attacker budgets run over [0, xa-max].
    #[arg(long)]
    xa_max: f64,
    /// Breaker budgets run over [0, xb-max].
    #[arg(long)]
    xb_max: f64,
    /// Grid points per axis (at least 2), endpoints included.
    #[arg(long)]
    steps: usize,
    /// Output CSV path (columns: xa,xb,region,u_b).
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random instances to check.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Seed for the instance generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Oracle grid resolution; the accepted closed-form vs. oracle
    /// disagreement is 5x this.
    #[arg(long, default_value_t = 1e-3)]
    resolution: f64,
    /// Output CSV path (one verification report per row).
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Attacker budget.
    #[arg(long)]
    xa: f64,
    /// Breaker budget.
    #[arg(long)]
    xb: f64,
    /// Sensor threshold (0 falls back to the classic game).
    #[arg(long)]
    tau: f64,
    /// Number of protocol draws.
    #[arg(long)]
    n: u64,
    /// RNG seed (ChaCha12).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            process::exit(code);
        }
    };

    let result = match cli.command {
        Command::Payoff(args) => commands::run_payoff(&args),
        Command::SweepTau(args) => commands::run_sweep_tau(&args),
        Command::Heatmap(args) => commands::run_heatmap(&args),
        Command::Verify(args) => commands::run_verify(&args),
        Command::Simulate(args) => simulate::run_simulate(&args),
    };

    if let Err(err) = result {
        eprintln!("error: {err}");
        process::exit(err.exit_code());
    }
}
