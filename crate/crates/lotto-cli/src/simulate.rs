//! Hybrid Monte Carlo simulation of the sensor protocol.
//!
//! Each draw realizes the Attacker's signal with probability `alpha*`. A
//! below-threshold draw samples both sides of the below-threshold profile and
//! scores by the tie rule. An above-threshold draw credits the analytic
//! above-threshold Breaker value: the head-start sub-game's strategy
//! distributions are out of scope, only its value is known. The estimator is
//! unbiased for the closed-form Breaker payoff either way.

use lotto_core::classic_lotto::{gl_payoff, gl_strategies};
use lotto_core::model::{GameParams, MixedStrategy, Signal};
use lotto_core::sensor::{breaker_payoff, optimal_decomposition};
use lotto_core::strategy_eval::sample;
use lotto_core::subgames::{lower_bounded_value, upper_bounded_strategies};
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::commands::CmdError;
use crate::SimulateArgs;

#[derive(Serialize)]
struct SimulationOutput {
    xa: f64,
    xb: f64,
    tau: f64,
    n: u64,
    seed: u64,
    estimate: f64,
    std_error: f64,
    closed_form: f64,
}

enum DrawScheme {
    Classic {
        f_a: MixedStrategy,
        f_b: MixedStrategy,
    },
    Hybrid {
        alpha: f64,
        above_value: f64,
        below: Option<(MixedStrategy, MixedStrategy)>,
    },
}

pub fn run_simulate(args: &SimulateArgs) -> Result<(), CmdError> {
    if args.n < 1 {
        return Err(CmdError::Usage("needs at least 1 draw".to_string()));
    }
    let params = GameParams::new(args.xa, args.xb, args.tau)
        .map_err(|e| CmdError::Usage(e.to_string()))?;

    let scheme = if args.tau == 0.0 {
        let (f_a, f_b) = gl_strategies(args.xa, args.xb)?;
        DrawScheme::Classic { f_a, f_b }
    } else {
        let d = optimal_decomposition(&params)?;
        let above_value = match d.x1 {
            // Breaker's share of the above-threshold sub-game.
            Some(x1) if d.alpha > 0.0 => 1.0 - lower_bounded_value(x1, args.xb, args.tau)?,
            _ => 0.0,
        };
        let below = match d.x0 {
            Some(x0) if d.alpha < 1.0 => {
                Some(upper_bounded_strategies(x0, args.xb, args.tau)?)
            }
            _ => None,
        };
        DrawScheme::Hybrid {
            alpha: d.alpha,
            above_value,
            below,
        }
    };

    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for i in 0..args.n {
        let score = match &scheme {
            DrawScheme::Classic { f_a, f_b } => {
                let bid_a = sample(f_a, &mut rng);
                let bid_b = sample(f_b, &mut rng);
                if bid_b >= bid_a {
                    1.0
                } else {
                    0.0
                }
            }
            DrawScheme::Hybrid {
                alpha,
                above_value,
                below,
            } => {
                if uniform53(&mut rng) < *alpha {
                    *above_value
                } else {
                    let (f_a, f_b) = below
                        .as_ref()
                        .expect("below-threshold profile exists when alpha < 1");
                    let bid_a = sample(f_a, &mut rng);
                    debug_assert_eq!(
                        Signal::from_allocation(bid_a, args.tau),
                        Signal::AtOrBelow
                    );
                    let bid_b = sample(f_b, &mut rng);
                    if bid_b >= bid_a {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        };
        // Welford update.
        let delta = score - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (score - mean);
    }
    let std_error = if args.n > 1 {
        (m2 / (args.n - 1) as f64 / args.n as f64).sqrt()
    } else {
        0.0
    };

    let closed_form = if args.tau == 0.0 {
        gl_payoff(args.xa, args.xb)?
    } else {
        breaker_payoff(&params)
    };
    let output = SimulationOutput {
        xa: args.xa,
        xb: args.xb,
        tau: args.tau,
        n: args.n,
        seed: args.seed,
        estimate: mean,
        std_error,
        closed_form,
    };
    println!(
        "{}",
        serde_json::to_string(&output).expect("simulation output serializes")
    );
    Ok(())
}

fn uniform53(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
