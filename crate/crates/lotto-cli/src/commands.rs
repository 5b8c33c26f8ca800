//! Command implementations and CSV emission.
//!
//! All numeric CSV fields are rendered with 17 significant digits so every
//! value round-trips exactly; outputs are byte-identical across runs given
//! identical flags and seed.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};

use lotto_core::classic_lotto::gl_payoff;
use lotto_core::model::GameParams;
use lotto_core::sensor::{breaker_payoff, classify_region, solve, verify_instance};
use lotto_core::DomainError;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{HeatmapArgs, OutputFormat, PayoffArgs, SweepArgs, VerifyArgs};

pub enum CmdError {
    /// Bad flag values; exit 2.
    Usage(String),
    /// Output file could not be written; exit 3.
    Io(String, std::io::Error),
    /// A verification row violated its bound; exit 1.
    Verification(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 2,
            CmdError::Io(..) => 3,
            CmdError::Verification(_) => 1,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(msg) => write!(f, "{msg}"),
            CmdError::Io(path, err) => write!(f, "cannot write {path}: {err}"),
            CmdError::Verification(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<DomainError> for CmdError {
    fn from(err: DomainError) -> Self {
        CmdError::Usage(err.to_string())
    }
}

/// 17 significant digits: enough to reconstruct the exact f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn params_from(xa: f64, xb: f64, tau: f64) -> Result<GameParams, CmdError> {
    GameParams::new(xa, xb, tau)
        .map_err(|e| CmdError::Usage(format!("invalid parameters (xa={xa}, xb={xb}, tau={tau}): {e}")))
}

fn writer_for(path: &str) -> Result<BufWriter<File>, CmdError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CmdError::Io(path.to_string(), e))
}

fn io_err(path: &str) -> impl Fn(std::io::Error) -> CmdError + '_ {
    move |e| CmdError::Io(path.to_string(), e)
}

pub fn run_payoff(args: &PayoffArgs) -> Result<(), CmdError> {
    let params = params_from(args.xa, args.xb, args.tau)?;
    let solution = solve(&params);
    match args.format {
        OutputFormat::Json => {
            let json = serde_json::to_string(&solution).expect("solution serializes");
            println!("{json}");
        }
        OutputFormat::Csv => {
            println!("u_b,u_a,region,alpha,x0,x1");
            let (alpha, x0, x1) = match &solution.decomposition {
                Some(d) => (
                    fmt17(d.alpha),
                    d.x0.map(fmt17).unwrap_or_default(),
                    d.x1.map(fmt17).unwrap_or_default(),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            println!(
                "{},{},{},{alpha},{x0},{x1}",
                fmt17(solution.u_b),
                fmt17(solution.u_a),
                solution.region
            );
        }
    }
    Ok(())
}

pub fn run_sweep_tau(args: &SweepArgs) -> Result<(), CmdError> {
    if !(args.tau_min >= 0.0 && args.tau_max > args.tau_min) {
        return Err(CmdError::Usage(
            "needs 0 <= tau-min < tau-max".to_string(),
        ));
    }
    if args.steps < 2 {
        return Err(CmdError::Usage("needs at least 2 steps".to_string()));
    }
    let classic = gl_payoff(args.xa, args.xb)?;

    let mut out = writer_for(&args.out)?;
    let err = io_err(&args.out);
    writeln!(out, "tau,u_b,region,u_b_classic").map_err(&err)?;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..args.steps {
        let frac = i as f64 / (args.steps - 1) as f64;
        let tau = args.tau_min + (args.tau_max - args.tau_min) * frac;
        let params = params_from(args.xa, args.xb, tau)?;
        let u_b = breaker_payoff(&params);
        if u_b > best.0 {
            best = (u_b, tau);
        }
        writeln!(
            out,
            "{},{},{},{}",
            fmt17(tau),
            fmt17(u_b),
            classify_region(&params),
            fmt17(classic)
        )
        .map_err(&err)?;
    }
    out.flush().map_err(&err)?;
    println!("argmax tau={} u_b={}", fmt17(best.1), fmt17(best.0));
    Ok(())
}

pub fn run_heatmap(args: &HeatmapArgs) -> Result<(), CmdError> {
    if !(args.xa_max > 0.0 && args.xb_max > 0.0) {
        return Err(CmdError::Usage("needs positive xa-max and xb-max".to_string()));
    }
    if args.steps < 2 {
        return Err(CmdError::Usage("needs at least 2 steps".to_string()));
    }
    let mut out = writer_for(&args.out)?;
    let err = io_err(&args.out);
    writeln!(out, "xa,xb,region,u_b").map_err(&err)?;
    for i in 0..args.steps {
        let xa = args.xa_max * i as f64 / (args.steps - 1) as f64;
        for j in 0..args.steps {
            let xb = args.xb_max * j as f64 / (args.steps - 1) as f64;
            let params = params_from(xa, xb, args.tau)?;
            writeln!(
                out,
                "{},{},{},{}",
                fmt17(xa),
                fmt17(xb),
                classify_region(&params),
                fmt17(breaker_payoff(&params))
            )
            .map_err(&err)?;
        }
    }
    out.flush().map_err(&err)?;
    Ok(())
}

// Instance generator for verification batches: budgets on (0, 20], thresholds
// on (0, 30]: spans all nine regions with comfortable margins.
pub fn random_instance(rng: &mut ChaCha12Rng) -> (f64, f64, f64) {
    let mut open_unit = |scale: f64| scale * (1.0 - uniform53(rng));
    let xa = open_unit(20.0);
    let xb = open_unit(20.0);
    let tau = open_unit(30.0);
    (xa, xb, tau)
}

fn uniform53(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn run_verify(args: &VerifyArgs) -> Result<(), CmdError> {
    if args.instances < 1 {
        return Err(CmdError::Usage("needs at least 1 instance".to_string()));
    }
    if !(args.resolution.is_finite() && args.resolution > 0.0) {
        return Err(CmdError::Usage("resolution must be positive".to_string()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let mut out = writer_for(&args.out)?;
    let err = io_err(&args.out);
    writeln!(
        out,
        "xa,xb,tau,closed_form,oracle,abs_diff,info_gain,br_slack_g0,bound"
    )
    .map_err(&err)?;

    let mut violations = 0usize;
    let mut max_abs_diff = 0.0f64;
    let mut min_info_gain = f64::INFINITY;
    for _ in 0..args.instances {
        let (xa, xb, tau) = random_instance(&mut rng);
        let params = params_from(xa, xb, tau)?;
        let report = verify_instance(&params, args.resolution)?;
        if report.abs_diff > report.bound || report.info_gain < -1e-12 {
            violations += 1;
        }
        max_abs_diff = max_abs_diff.max(report.abs_diff);
        min_info_gain = min_info_gain.min(report.info_gain);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt17(xa),
            fmt17(xb),
            fmt17(tau),
            fmt17(report.closed_form),
            fmt17(report.oracle),
            fmt17(report.abs_diff),
            fmt17(report.info_gain),
            fmt17(report.br_slack_g0),
            fmt17(report.bound)
        )
        .map_err(&err)?;
    }
    out.flush().map_err(&err)?;
    println!(
        "{} instances: max abs_diff={}, min info_gain={}, violations={}",
        args.instances,
        fmt17(max_abs_diff),
        fmt17(min_info_gain),
        violations
    );
    if violations > 0 {
        return Err(CmdError::Verification(format!(
            "{violations} of {} instances violated their bounds",
            args.instances
        )));
    }
    Ok(())
}
