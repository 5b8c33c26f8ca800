//! Closed-form equilibrium payoff and strategy profile for the classic game
//! without a sensor.

use alloc::vec;

use crate::model::{Atom, MixedStrategy, Segment};
use crate::DomainError;

/// Breaker's equilibrium payoff in the classic game.
///
/// `x_b/(2 x_a)` when the Breaker is the weaker player, `1 - x_a/(2 x_b)`
/// otherwise (the boundary `x_a = x_b` belongs to the second branch; both
/// give 1/2). Zero-budget conventions follow the formula limits and the tie
/// rule: `x_a = 0` means the Breaker wins ties at zero and gets 1, while
/// `x_b = 0 < x_a` yields 0.
pub fn gl_payoff(x_a: f64, x_b: f64) -> Result<f64, DomainError> {
    check_budgets(x_a, x_b)?;
    if x_a == 0.0 && x_b == 0.0 {
        return Ok(1.0);
    }
    if x_b >= x_a {
        Ok(1.0 - x_a / (2.0 * x_b))
    } else {
        Ok(x_b / (2.0 * x_a))
    }
}

/// Equilibrium profile `(F_A, F_B)` of the classic game.
///
/// The stronger player mixes uniformly on `[0, 2·max]`; the weaker one mixes
/// an atom at zero of mass `1 - min/max` with the same uniform piece scaled
/// down, so both expected values match the budgets exactly. With both budgets
/// zero the profile degenerates to two point masses at zero.
pub fn gl_strategies(x_a: f64, x_b: f64) -> Result<(MixedStrategy, MixedStrategy), DomainError> {
    check_budgets(x_a, x_b)?;
    if x_a == 0.0 && x_b == 0.0 {
        return Ok((MixedStrategy::point(0.0), MixedStrategy::point(0.0)));
    }
    let strong = x_a.max(x_b);
    let weak = x_a.min(x_b);
    let stronger = MixedStrategy::uniform(0.0, 2.0 * strong);
    let weaker = MixedStrategy::new(
        vec![Atom {
            location: 0.0,
            mass: 1.0 - weak / strong,
        }],
        vec![Segment {
            lo: 0.0,
            hi: 2.0 * strong,
            mass: weak / strong,
        }],
    )
    .expect("atom and scaled uniform masses sum to one");
    if x_a >= x_b {
        Ok((stronger, weaker))
    } else {
        Ok((weaker, stronger))
    }
}

fn check_budgets(x_a: f64, x_b: f64) -> Result<(), DomainError> {
    if !(x_a.is_finite() && x_b.is_finite()) {
        return Err(DomainError::NonFinite);
    }
    if x_a < 0.0 || x_b < 0.0 {
        return Err(DomainError::NegativeBudget);
    }
    Ok(())
}
