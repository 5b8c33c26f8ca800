//! Equilibrium payoffs of the two sub-games the sensor induces, plus explicit
//! strategy constructions for the upper-bounded one.
//!
//! When the signal says "at or below", the Attacker is effectively confined
//! to supports inside `[0, tau]` (upper-bounded game); when it says "above",
//! the Attacker's support starts at `tau`, which acts like a head start of
//! `tau` backed by the remaining budget (lower-bounded game). Both values are
//! Attacker payoffs. Only the payoff of the lower-bounded game is provided -
//! its strategy distributions are not constructed here.

use alloc::vec;

use crate::classic_lotto::gl_strategies;
use crate::model::{Atom, MixedStrategy, Segment};
use crate::strategy_eval::{
    best_response_value, best_response_value_capped, Perspective, DEFAULT_ORACLE_POINTS,
};
use crate::DomainError;

/// Attacker's equilibrium payoff in the lower-bounded sub-game: support in
/// `[tau, ∞)` with expected spend `x1 >= tau`, against an unconstrained
/// Breaker with budget `x_b`.
pub fn lower_bounded_value(x1: f64, x_b: f64, tau: f64) -> Result<f64, DomainError> {
    check_common(x_b, tau)?;
    if !x1.is_finite() {
        return Err(DomainError::NonFinite);
    }
    if x1 < tau {
        return Err(DomainError::BelowThreshold);
    }
    if x1 == tau {
        // Spending exactly the threshold pins the whole mass at tau; the
        // Breaker either overbids it or cannot afford to.
        return Ok(1.0 - (x_b / tau).min(1.0));
    }
    if x_b <= tau {
        return Ok(1.0 - x_b / (x1 + sqrt_clamped(x1 * x1 - tau * tau)));
    }
    // Breaker strictly stronger than the head start: below a critical surplus
    // the Attacker is reduced to a linear share, above it the head-start
    // formula takes over (the two meet continuously at the boundary).
    let surplus = x1 - tau;
    let critical = 2.0 * (x_b - tau) * (x_b - tau) / (tau + 2.0 * (x_b - tau));
    if surplus >= critical {
        Ok(1.0 - x_b / (x1 + sqrt_clamped(x1 * x1 - tau * tau)))
    } else {
        Ok(surplus / (2.0 * (x_b - tau)))
    }
}

/// Attacker's equilibrium payoff in the upper-bounded sub-game: support in
/// `[0, tau]` with expected spend `x0 in [0, tau]`, against an unconstrained
/// Breaker with budget `x_b`.
pub fn upper_bounded_value(x0: f64, x_b: f64, tau: f64) -> Result<f64, DomainError> {
    check_upper_inputs(x0, x_b, tau)?;
    if x_b > tau {
        // The Breaker can overbid the whole admissible range outright.
        return Ok(0.0);
    }
    if x_b >= 0.5 * tau {
        if x0 <= 0.5 * tau {
            return Ok(2.0 * x0 / tau * (1.0 - x_b / tau));
        }
        return Ok(1.0 - x_b / tau);
    }
    // x_b < tau/2: the cap stops binding once both effective spends fit in
    // [0, tau]; the first two branches coincide with the classic payoff.
    if x_b == 0.0 {
        return Ok(if x0 > 0.0 { 1.0 } else { 0.0 });
    }
    if x0 <= x_b {
        Ok(x0 / (2.0 * x_b))
    } else if x0 <= 0.5 * tau {
        Ok(1.0 - x_b / (2.0 * x0))
    } else {
        Ok(1.0 - x_b / tau)
    }
}

/// Candidate equilibrium profile `(F_A, F_B)` of the upper-bounded sub-game,
/// whose integrated payoff equals [`upper_bounded_value`].
///
/// Case structure:
/// - `x_b >= tau`: the Breaker parks everything at the threshold and wins
///   outright.
/// - `x0 > tau/2`: the Attacker mixes uniformly on `[0, tau]`, spending only
///   `tau/2` (expected value at most the budget is the invariant, not
///   equality). Because its budget constraint is slack, the Breaker must hold
///   it to a flat win curve: two atoms, mass `1 - x_b/tau` at zero and
///   `x_b/tau` at the threshold. Any mixed mass strictly inside `(0, tau)`
///   would hand the under-spending Attacker a profitable mass-point
///   deviation.
/// - `x_b >= tau/2` (and `x0 <= tau/2`): the Breaker mixes a uniform of mass
///   `gamma = 2(tau - x_b)/tau` with an atom at the threshold; the Attacker
///   dilutes the uniform with an atom at zero so its budget binds.
/// - otherwise both classic supports fit inside `[0, tau]` and the cap is
///   slack.
///
/// The Breaker's mass point sits exactly at `tau`: ties go to the Breaker and
/// the Attacker's support carries no atom there, so the limit of bids just
/// above the threshold is realized without one.
pub fn upper_bounded_strategies(
    x0: f64,
    x_b: f64,
    tau: f64,
) -> Result<(MixedStrategy, MixedStrategy), DomainError> {
    check_upper_inputs(x0, x_b, tau)?;
    if x_b >= tau {
        return Ok((MixedStrategy::point(0.0), MixedStrategy::point(tau)));
    }
    if x0 > 0.5 * tau {
        let f_a = MixedStrategy::uniform(0.0, tau);
        let f_b = MixedStrategy::new(
            vec![
                Atom {
                    location: 0.0,
                    mass: 1.0 - x_b / tau,
                },
                Atom {
                    location: tau,
                    mass: x_b / tau,
                },
            ],
            vec![],
        )
        .expect("two atom masses sum to one");
        return Ok((f_a, f_b));
    }
    if x_b >= 0.5 * tau {
        let gamma = 2.0 * (tau - x_b) / tau;
        let f_b = MixedStrategy::new(
            vec![Atom {
                location: tau,
                mass: 1.0 - gamma,
            }],
            vec![Segment {
                lo: 0.0,
                hi: tau,
                mass: gamma,
            }],
        )
        .expect("threshold atom and uniform masses sum to one");
        let uniform_mass = 2.0 * x0 / tau;
        let f_a = MixedStrategy::new(
            vec![Atom {
                location: 0.0,
                mass: 1.0 - uniform_mass,
            }],
            vec![Segment {
                lo: 0.0,
                hi: tau,
                mass: uniform_mass,
            }],
        )
        .expect("diluted uniform masses sum to one");
        return Ok((f_a, f_b));
    }
    // Both classic supports fit inside [0, tau]; the cap is slack.
    gl_strategies(x0, x_b)
}

/// Largest best-response improvement either player finds against the
/// profile from [`upper_bounded_strategies`], at the default oracle grid.
///
/// The Attacker's reply is restricted to bids in `[0, tau]` (the sub-game's
/// support constraint); the Breaker replies freely on a grid reaching above
/// the threshold. Values at or below ~0 certify the profile as a grid-level
/// equilibrium; the oracle only evaluates feasible mixtures, so the slack
/// cannot exceed zero by more than the oracle's own grid error.
pub fn upper_bounded_slack(x0: f64, x_b: f64, tau: f64) -> Result<f64, DomainError> {
    let (f_a, f_b) = upper_bounded_strategies(x0, x_b, tau)?;
    let value = upper_bounded_value(x0, x_b, tau)?;
    let a_step = tau / DEFAULT_ORACLE_POINTS as f64;
    let a_reply = best_response_value_capped(&f_b, x0, Perspective::Attacker, a_step, tau)?;
    let b_max = 1.25 * tau;
    let b_step = b_max / DEFAULT_ORACLE_POINTS as f64;
    let b_reply = best_response_value(&f_a, x_b, Perspective::Breaker, b_step, b_max)?;
    Ok((a_reply.value - value).max(b_reply.value - (1.0 - value)))
}

fn check_common(x_b: f64, tau: f64) -> Result<(), DomainError> {
    if !(x_b.is_finite() && tau.is_finite()) {
        return Err(DomainError::NonFinite);
    }
    if x_b < 0.0 {
        return Err(DomainError::NegativeBudget);
    }
    if tau <= 0.0 {
        return Err(DomainError::ThresholdRequired);
    }
    Ok(())
}

fn check_upper_inputs(x0: f64, x_b: f64, tau: f64) -> Result<(), DomainError> {
    check_common(x_b, tau)?;
    if !x0.is_finite() {
        return Err(DomainError::NonFinite);
    }
    if !(0.0..=tau).contains(&x0) {
        return Err(DomainError::OutsideInterval);
    }
    Ok(())
}

// The closed forms imply nonnegative radicands; only rounding can push them
// a few ulps below zero.
fn sqrt_clamped(v: f64) -> f64 {
    libm::sqrt(v.max(0.0))
}
