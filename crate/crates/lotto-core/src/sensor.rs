//! The full sensor game: region classification, the closed-form Breaker
//! payoff, the optimal split of the Attacker budget across the two induced
//! sub-games, and numerical verification of the closed forms.
//!
//! Equilibrium here is equivalent to the Attacker maximizing
//! `(1-alpha)·v0(x0) + alpha·v1(x1)` over splits `(alpha, x0, x1)` meeting
//! the budget identity, where `v0`/`v1` are the sub-game values from
//! [`crate::subgames`]. [`breaker_payoff`] evaluates the closed-form solution
//! of that program; [`grid_oracle`] solves it numerically so every closed
//! form can be checked against an independent route.

use serde::Serialize;

use crate::classic_lotto::{gl_payoff, gl_strategies};
use crate::model::{Decomposition, GameParams, MixedStrategy, Region};
use crate::strategy_eval::{
    best_response_value, Perspective, DEFAULT_ORACLE_POINTS,
};
use crate::subgames::{
    lower_bounded_value, upper_bounded_slack, upper_bounded_strategies, upper_bounded_value,
};
use crate::DomainError;

use alloc::vec::Vec;

/// Which closed-form branch applies to the given parameters.
///
/// On boundaries the lowest-numbered applicable tag wins, except that the
/// `x_a = 5·tau/4` boundary belongs to the higher-numbered branch (IV resp.
/// VII); the adjacent formulas agree there, so the payoff does not depend on
/// the choice.
pub fn classify_region(params: &GameParams) -> Region {
    let (x_a, x_b, tau) = (params.x_a(), params.x_b(), params.tau());
    if tau == 0.0 {
        return Region::Classic;
    }
    if x_b <= 0.5 * tau {
        if x_a <= x_b {
            Region::I
        } else if x_a <= 0.5 * tau {
            Region::II
        } else if x_a < 1.25 * tau {
            Region::III
        } else {
            Region::IV
        }
    } else if x_b <= 0.75 * tau {
        if x_a <= 0.5 * tau {
            Region::V
        } else if x_a < 1.25 * tau {
            Region::VI
        } else {
            Region::VII
        }
    } else {
        let root = libm::sqrt(x_b * x_b + tau * tau);
        if x_a <= root {
            Region::VIII
        } else {
            Region::IX
        }
    }
}

/// Evaluates the stated branch formula at the given parameters, whether or
/// not the branch conditions hold there. Used to check that adjacent
/// formulas agree on their shared boundaries.
pub fn region_payoff(region: Region, params: &GameParams) -> f64 {
    let (x_a, x_b, tau) = (params.x_a(), params.x_b(), params.tau());
    match region {
        Region::Classic => gl_payoff(x_a, x_b).expect("params are validated"),
        Region::I => 1.0 - x_a / (2.0 * x_b),
        Region::II => x_b / (2.0 * x_a),
        Region::III => x_b / tau * (1.0 - (2.0 * x_a - tau) / (3.0 * tau)),
        Region::IV | Region::VII | Region::IX => {
            x_b / (x_a + sqrt_clamped(x_a * x_a - tau * tau))
        }
        Region::V => 1.0 - 2.0 * x_a / tau * (1.0 - x_b / tau),
        Region::VI => 2.0 * x_b * (2.0 * tau - x_a) / (3.0 * tau * tau),
        Region::VIII => 1.0 - x_a / (x_b + libm::sqrt(x_b * x_b + tau * tau)),
    }
}

/// Breaker's equilibrium payoff with the sensor in place.
///
/// `tau = 0` collapses to the classic payoff. An Attacker without budget is
/// pinned at zero and loses the tie there, so the Breaker wins outright.
pub fn breaker_payoff(params: &GameParams) -> f64 {
    if params.x_a() == 0.0 {
        return 1.0;
    }
    region_payoff(classify_region(params), params)
}

/// The maximizing split `(alpha*, x0*, x1*)` of the Attacker budget.
///
/// Three closed-form cases cover the whole parameter space:
/// - a strong Breaker (`x_b >= 3·tau/4`) pushes the Attacker fully above the
///   threshold in expectation: `x1* = max(sqrt(x_b² + tau²), x_a)`,
///   `alpha* = x_a/x1*`, `x0* = 0`;
/// - otherwise, with `x_a >= tau/2`, the Attacker pins the below-threshold
///   spend at `tau/2`: `x1* = max(5·tau/4, x_a)`,
///   `alpha* = (x_a - tau/2)/(x1* - tau/2)`;
/// - otherwise the whole budget stays below: `alpha* = 0`, `x0* = x_a`.
///
/// Fails with a classic sentinel error when `tau = 0` (no decomposition
/// exists without a sensor).
pub fn optimal_decomposition(params: &GameParams) -> Result<Decomposition, DomainError> {
    let (x_a, x_b, tau) = (params.x_a(), params.x_b(), params.tau());
    if tau == 0.0 {
        return Err(DomainError::ThresholdRequired);
    }
    if x_b >= 0.75 * tau {
        let x1 = libm::sqrt(x_b * x_b + tau * tau).max(x_a);
        return Ok(Decomposition {
            alpha: x_a / x1,
            x0: Some(0.0),
            x1: Some(x1),
        });
    }
    if x_a >= 0.5 * tau {
        let x1 = (1.25 * tau).max(x_a);
        let alpha = (x_a - 0.5 * tau) / (x1 - 0.5 * tau);
        if alpha >= 1.0 {
            return Ok(Decomposition {
                alpha: 1.0,
                x0: None,
                x1: Some(x1),
            });
        }
        return Ok(Decomposition {
            alpha,
            x0: Some(0.5 * tau),
            x1: Some(x1),
        });
    }
    Ok(Decomposition {
        alpha: 0.0,
        x0: Some(x_a),
        x1: None,
    })
}

/// Objective value `(1-alpha)·v0(x0) + alpha·v1(x1)` of a split; parts with
/// zero weight are skipped (they may be absent).
pub fn decomposition_value(
    decomposition: &Decomposition,
    x_b: f64,
    tau: f64,
) -> Result<f64, DomainError> {
    let alpha = decomposition.alpha;
    if !alpha.is_finite() {
        return Err(DomainError::NonFinite);
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(DomainError::OutsideInterval);
    }
    let mut value = 0.0;
    if alpha < 1.0 {
        let x0 = decomposition
            .x0
            .ok_or(DomainError::IncompleteDecomposition)?;
        value += (1.0 - alpha) * upper_bounded_value(x0, x_b, tau)?;
    }
    if alpha > 0.0 {
        let x1 = decomposition
            .x1
            .ok_or(DomainError::IncompleteDecomposition)?;
        value += alpha * lower_bounded_value(x1, x_b, tau)?;
    }
    Ok(value)
}

/// Maximum found by [`grid_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    /// Attacker value at the best grid point (a lower bound on the true
    /// optimum; within a resolution-scaled gap of it).
    pub u_a: f64,
    /// The best grid point itself.
    pub argmax: Decomposition,
}

/// Numerically maximizes the split objective on a grid, independently of the
/// closed forms.
///
/// `x1` ranges over `[max(tau, x_a), 3·max(tau, x_a, sqrt(x_b² + tau²))]`
/// (both closed-form optimizers lie strictly below the cap, and the
/// per-unit value of the above-threshold game decays past
/// `sqrt(x_b² + tau²)`); `alpha` over `[0, min(1, x_a/x1)]`, with
/// `x0 = (x_a - alpha·x1)/(1 - alpha)` required to land in `[0, tau]`.
/// `alpha = 1` forces `x1 = x_a` through the budget identity and is handled
/// as its own candidate. Both axes take `ceil(1/resolution)` uniform steps;
/// the exact feasibility and kink values of `alpha` join the grid so the
/// boundary optima are hit exactly. Ties keep the lexicographically smallest
/// `(x1, alpha)`.
pub fn grid_oracle(params: &GameParams, resolution: f64) -> Result<GridSolution, DomainError> {
    if !resolution.is_finite() {
        return Err(DomainError::NonFinite);
    }
    if resolution <= 0.0 {
        return Err(DomainError::NonPositiveResolution);
    }
    let (x_a, x_b, tau) = (params.x_a(), params.x_b(), params.tau());
    if tau == 0.0 {
        return Err(DomainError::ThresholdRequired);
    }

    let root = libm::sqrt(x_b * x_b + tau * tau);
    let lo = tau.max(x_a);
    let cap = 3.0 * tau.max(x_a).max(root);
    let steps = libm::ceil(1.0 / resolution).max(1.0) as usize;

    let mut best_value = f64::NEG_INFINITY;
    let mut best = Decomposition {
        alpha: 0.0,
        x0: Some(x_a.min(tau)),
        x1: None,
    };
    let mut alphas: Vec<f64> = Vec::with_capacity(steps + 4);

    for i in 0..=steps {
        let x1 = lo + (cap - lo) * i as f64 / steps as f64;
        let alpha_hi = (x_a / x1).min(1.0);

        alphas.clear();
        for j in 0..=steps {
            alphas.push(alpha_hi * j as f64 / steps as f64);
        }
        // Exact feasibility bound and the alphas at which x0 crosses a kink
        // of the below-threshold value (x0 = tau, tau/2, x_b).
        if x_a > tau && x1 > tau {
            alphas.push((x_a - tau) / (x1 - tau));
        }
        if x_a >= 0.5 * tau && x1 > 0.5 * tau {
            alphas.push((x_a - 0.5 * tau) / (x1 - 0.5 * tau));
        }
        if x_a >= x_b && x1 > x_b {
            alphas.push((x_a - x_b) / (x1 - x_b));
        }
        alphas.retain(|a| a.is_finite() && (0.0..=alpha_hi).contains(a));
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();

        for &alpha in alphas.iter() {
            if alpha >= 1.0 {
                continue;
            }
            let raw_x0 = (x_a - alpha * x1) / (1.0 - alpha);
            let slack = 1e-9 * tau.max(1.0);
            if raw_x0 < -slack || raw_x0 > tau + slack {
                continue;
            }
            let x0 = raw_x0.clamp(0.0, tau);
            let value = (1.0 - alpha) * upper_bounded_value(x0, x_b, tau)?
                + if alpha > 0.0 {
                    alpha * lower_bounded_value(x1, x_b, tau)?
                } else {
                    0.0
                };
            if value > best_value {
                best_value = value;
                best = Decomposition {
                    alpha,
                    x0: Some(x0),
                    x1: (alpha > 0.0).then_some(x1),
                };
            }
        }

        // alpha = 1 pairs only with x1 = x_a, the lower end of the range.
        if i == 0 && x_a >= tau {
            let value = lower_bounded_value(x_a, x_b, tau)?;
            if value > best_value {
                best_value = value;
                best = Decomposition {
                    alpha: 1.0,
                    x0: None,
                    x1: Some(x_a),
                };
            }
        }
    }

    Ok(GridSolution {
        u_a: best_value,
        argmax: best,
    })
}

/// Closed form vs. oracle vs. best-response slack for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationReport {
    /// Attacker value from the closed form, `1 - breaker_payoff`.
    pub closed_form: f64,
    /// Attacker value found by [`grid_oracle`].
    pub oracle: f64,
    /// `|closed_form - oracle|`.
    pub abs_diff: f64,
    /// What the sensor buys the Breaker: `breaker_payoff - gl_payoff`.
    pub info_gain: f64,
    /// Largest best-response improvement either side finds against the
    /// below-threshold profile at `x0*` (0 when that part has no weight).
    pub br_slack_g0: f64,
    /// Grid resolution the oracle ran at.
    pub resolution: f64,
    /// Resolution-scaled agreement bound on `abs_diff`.
    pub bound: f64,
}

/// Factor mapping the oracle resolution to the accepted closed-form vs.
/// oracle disagreement.
pub const VERIFY_BOUND_FACTOR: f64 = 5.0;

/// Runs the full verification battery on one instance.
///
/// With `tau = 0` there is nothing to decompose: the report carries the
/// classic value on both routes (zero disagreement and zero gain) and the
/// slack of the classic profile instead.
pub fn verify_instance(
    params: &GameParams,
    resolution: f64,
) -> Result<VerificationReport, DomainError> {
    if !resolution.is_finite() {
        return Err(DomainError::NonFinite);
    }
    if resolution <= 0.0 {
        return Err(DomainError::NonPositiveResolution);
    }
    let (x_a, x_b, tau) = (params.x_a(), params.x_b(), params.tau());
    let u_b = breaker_payoff(params);
    let closed_form = 1.0 - u_b;
    let bound = VERIFY_BOUND_FACTOR * resolution;

    if tau == 0.0 {
        return Ok(VerificationReport {
            closed_form,
            oracle: closed_form,
            abs_diff: 0.0,
            info_gain: 0.0,
            br_slack_g0: classic_profile_slack(x_a, x_b)?,
            resolution,
            bound,
        });
    }

    let oracle = grid_oracle(params, resolution)?.u_a;
    let info_gain = u_b - gl_payoff(x_a, x_b)?;
    let decomposition = optimal_decomposition(params)?;
    let br_slack_g0 = if decomposition.alpha < 1.0 {
        let x0 = decomposition
            .x0
            .ok_or(DomainError::IncompleteDecomposition)?;
        upper_bounded_slack(x0, x_b, tau)?
    } else {
        0.0
    };

    Ok(VerificationReport {
        closed_form,
        oracle,
        abs_diff: libm::fabs(closed_form - oracle),
        info_gain,
        br_slack_g0,
        resolution,
        bound,
    })
}

// Best-response slack of the classic equilibrium profile.
fn classic_profile_slack(x_a: f64, x_b: f64) -> Result<f64, DomainError> {
    let (f_a, f_b) = gl_strategies(x_a, x_b)?;
    let top = f_a.support_top().max(f_b.support_top());
    if top == 0.0 {
        return Ok(0.0);
    }
    let grid_max = 1.25 * top;
    let step = grid_max / DEFAULT_ORACLE_POINTS as f64;
    let u_b = gl_payoff(x_a, x_b)?;
    let a_reply = best_response_value(&f_b, x_a, Perspective::Attacker, step, grid_max)?;
    let b_reply = best_response_value(&f_a, x_b, Perspective::Breaker, step, grid_max)?;
    Ok((a_reply.value - (1.0 - u_b)).max(b_reply.value - u_b))
}

/// Everything known about one instance: payoffs, region, the optimal split,
/// and (when the below-threshold part carries weight) its strategy profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub u_b: f64,
    pub u_a: f64,
    pub region: Region,
    /// Absent exactly in the `tau = 0` classic sentinel.
    pub decomposition: Option<Decomposition>,
    /// Below-threshold equilibrium profile at `x0*`, when `alpha* < 1`.
    pub g0_profile: Option<(MixedStrategy, MixedStrategy)>,
}

/// Solves one instance end to end.
pub fn solve(params: &GameParams) -> Solution {
    let u_b = breaker_payoff(params);
    let decomposition = optimal_decomposition(params).ok();
    let g0_profile = decomposition.as_ref().and_then(|d| {
        if d.alpha < 1.0 {
            d.x0
                .and_then(|x0| upper_bounded_strategies(x0, params.x_b(), params.tau()).ok())
        } else {
            None
        }
    });
    Solution {
        u_b,
        u_a: 1.0 - u_b,
        region: classify_region(params),
        decomposition,
        g0_profile,
    }
}

fn sqrt_clamped(v: f64) -> f64 {
    libm::sqrt(v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(x_a: f64, x_b: f64, tau: f64) -> GameParams {
        GameParams::new(x_a, x_b, tau).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_region(&params(7.0, 10.0, 13.0)), Region::VIII);
        assert_eq!(classify_region(&params(10.0, 3.0, 8.0)), Region::IV);
        assert_eq!(classify_region(&params(1.0, 1.0, 4.0)), Region::I);
        assert_eq!(classify_region(&params(5.0, 3.0, 8.0)), Region::III);
        assert_eq!(classify_region(&params(7.0, 10.0, 0.0)), Region::Classic);
    }

    #[test]
    fn payoff_examples() {
        assert!((breaker_payoff(&params(7.0, 10.0, 13.0)) - 0.73486).abs() < 5e-5);
        assert_eq!(breaker_payoff(&params(7.0, 10.0, 0.0)), 0.65);
        assert_eq!(breaker_payoff(&params(5.0, 3.0, 8.0)), 0.34375);
        assert_eq!(breaker_payoff(&params(10.0, 3.0, 8.0)), 0.1875);
    }

    #[test]
    fn zero_attacker_budget_loses_outright() {
        assert_eq!(breaker_payoff(&params(0.0, 3.0, 8.0)), 1.0);
        assert_eq!(breaker_payoff(&params(0.0, 0.0, 8.0)), 1.0);
        assert_eq!(breaker_payoff(&params(3.0, 0.0, 8.0)), 0.0);
    }

    #[test]
    fn decomposition_examples() {
        let d = optimal_decomposition(&params(10.0, 3.0, 8.0)).unwrap();
        assert_eq!(d.alpha, 1.0);
        assert_eq!(d.x1, Some(10.0));
        assert_eq!(d.x0, None);

        let d = optimal_decomposition(&params(5.0, 3.0, 8.0)).unwrap();
        assert!((d.alpha - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(d.x0, Some(4.0));
        assert_eq!(d.x1, Some(10.0));
        assert!((d.spend() - 5.0).abs() < 1e-12);

        let d = optimal_decomposition(&params(2.0, 3.0, 10.0)).unwrap();
        assert_eq!(d.alpha, 0.0);
        assert_eq!(d.x0, Some(2.0));
        assert_eq!(d.x1, None);

        let d = optimal_decomposition(&params(3.0, 10.0, 8.0)).unwrap();
        let root = 164f64.sqrt();
        assert!((d.x1.unwrap() - root).abs() < 1e-12);
        assert!((d.alpha - 3.0 / root).abs() < 1e-15);
        assert_eq!(d.x0, Some(0.0));

        assert_eq!(
            optimal_decomposition(&params(1.0, 1.0, 0.0)).unwrap_err(),
            DomainError::ThresholdRequired
        );
    }

    #[test]
    fn decomposition_reproduces_the_closed_form() {
        let cases = [
            (7.0, 10.0, 13.0),
            (10.0, 3.0, 8.0),
            (5.0, 3.0, 8.0),
            (2.0, 3.0, 10.0),
            (3.0, 10.0, 8.0),
            (12.0, 5.0, 8.0),
            (1.0, 1.0, 4.0),
        ];
        for (x_a, x_b, tau) in cases {
            let p = params(x_a, x_b, tau);
            let d = optimal_decomposition(&p).unwrap();
            let v = decomposition_value(&d, x_b, tau).unwrap();
            let u_a = 1.0 - breaker_payoff(&p);
            assert!(
                (v - u_a).abs() < 1e-12,
                "({x_a},{x_b},{tau}): split value {v} vs closed {u_a}"
            );
            assert!((d.spend() - x_a).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_oracle_brackets_the_closed_form() {
        let p = params(10.0, 3.0, 8.0);
        let sol = grid_oracle(&p, 1e-3).unwrap();
        assert!((sol.u_a - 0.8125).abs() < 2e-3, "u_a {}", sol.u_a);

        let p = params(7.0, 10.0, 13.0);
        let sol = grid_oracle(&p, 1e-3).unwrap();
        assert!((sol.u_a - 0.26514).abs() < 2e-3, "u_a {}", sol.u_a);

        let p = params(7.0, 10.0, 40.0);
        let sol = grid_oracle(&p, 1e-3).unwrap();
        assert!((sol.u_a - 0.35).abs() < 2e-3, "u_a {}", sol.u_a);

        assert_eq!(
            grid_oracle(&params(1.0, 1.0, 2.0), 0.0).unwrap_err(),
            DomainError::NonPositiveResolution
        );
    }

    #[test]
    fn verify_examples() {
        let r = verify_instance(&params(7.0, 10.0, 13.0), 1e-3).unwrap();
        assert!(r.abs_diff <= 2e-3);
        assert!((r.info_gain - 0.0849).abs() < 5e-4, "gain {}", r.info_gain);
        assert!(r.br_slack_g0 <= 1e-3);

        let r = verify_instance(&params(7.0, 10.0, 0.0), 1e-3).unwrap();
        assert_eq!(r.info_gain, 0.0);
        assert_eq!(r.abs_diff, 0.0);
        assert!(r.br_slack_g0 <= 1e-3);

        let r = verify_instance(&params(5.0, 3.0, 8.0), 1e-3).unwrap();
        assert!(r.abs_diff <= 2e-3);
    }

    #[test]
    fn limits_recover_the_classic_payoff() {
        for (x_a, x_b) in [(7.0, 10.0), (10.0, 7.0), (3.0, 3.0), (0.5, 19.0)] {
            let classic = gl_payoff(x_a, x_b).unwrap();
            assert_eq!(breaker_payoff(&params(x_a, x_b, 0.0)), classic);
            let tau = 2.0 * x_a.max(x_b) * 1.01;
            assert_eq!(breaker_payoff(&params(x_a, x_b, tau)), classic);
        }
    }

    #[test]
    fn region_vi_matches_the_split_route() {
        // The split route for region VI composes the two sub-game values; it
        // must agree with the closed-form branch algebraically.
        let cases = [(4.0, 3.9, 6.0), (5.0, 4.0, 7.0), (3.8, 3.7, 6.2)];
        for (x_a, x_b, tau) in cases {
            let p = params(x_a, x_b, tau);
            assert_eq!(classify_region(&p), Region::VI);
            let direct = region_payoff(Region::VI, &p);
            let composed = 1.0
                - (2.0 * x_a / tau * (1.0 - x_b / tau)
                    + (2.0 * x_a - tau) * (4.0 * x_b - 3.0 * tau) / (3.0 * tau * tau));
            assert!((direct - composed).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_bundles_the_pieces() {
        let s = solve(&params(5.0, 3.0, 8.0));
        assert_eq!(s.u_a + s.u_b, 1.0);
        assert_eq!(s.region, Region::III);
        let d = s.decomposition.unwrap();
        assert_eq!(d.x0, Some(4.0));
        assert!(s.g0_profile.is_some());

        let s = solve(&params(7.0, 10.0, 0.0));
        assert_eq!(s.region, Region::Classic);
        assert!(s.decomposition.is_none());
        assert!(s.g0_profile.is_none());

        let s = solve(&params(10.0, 3.0, 8.0));
        assert_eq!(s.decomposition.unwrap().alpha, 1.0);
        assert!(s.g0_profile.is_none());
    }
}
