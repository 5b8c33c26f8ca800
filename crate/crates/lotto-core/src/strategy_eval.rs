//! Exact payoff integration between piecewise strategies, seeded sampling,
//! and an independent best-response oracle used to certify equilibrium
//! claims.
//!
//! The tie rule (the Breaker wins exact ties) enters in exactly one place:
//! [`win_prob_pure`] resolves it through the atom-inclusion choice between
//! [`MixedStrategy::cdf`] and [`MixedStrategy::cdf_left`], and the piecewise
//! integration in [`payoff_breaker`] applies the same convention per piece
//! pair.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::model::MixedStrategy;
use crate::DomainError;

/// Number of grid points the default best-response grid uses: the step is
/// the bid-domain top divided by this.
pub const DEFAULT_ORACLE_POINTS: u32 = 10_000;

/// Whose reply value is being computed. Ties go to the Breaker, so the two
/// perspectives see different pure-bid win curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perspective {
    Attacker,
    Breaker,
}

/// Result of the concave-envelope best-response oracle.
///
/// `value` approximates the optimal reply value from below: only mixtures of
/// grid bids are considered, and any such mixture is a feasible strategy. The
/// gap to the true optimum is at most `C·envelope_grid_step` where `C` bounds
/// the slope of the pure-bid win curve near the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseReport {
    /// Optimal reply value achievable with the evaluated grid bids.
    pub value: f64,
    /// The at most two grid bids whose mixture attains `value`.
    pub support_bids: Vec<f64>,
    /// Spacing of the evaluation grid actually used.
    pub envelope_grid_step: f64,
}

/// Exact `P[x_B >= x_A]` for independent draws from the two strategies.
///
/// Ties count for the Breaker. Every piece pair has a closed form, so the
/// result is exact up to rounding.
pub fn payoff_breaker(f_a: &MixedStrategy, f_b: &MixedStrategy) -> f64 {
    let mut p = 0.0;

    for a in f_a.atoms() {
        for b in f_b.atoms() {
            if b.location >= a.location {
                p += a.mass * b.mass;
            }
        }
        for sb in f_b.segments() {
            p += a.mass * sb.mass * uniform_at_least(sb.lo, sb.hi, a.location);
        }
    }
    for sa in f_a.segments() {
        for b in f_b.atoms() {
            p += sa.mass * b.mass * uniform_at_most(sa.lo, sa.hi, b.location);
        }
        for sb in f_b.segments() {
            p += sa.mass * sb.mass * uniform_beats_uniform(sa.lo, sa.hi, sb.lo, sb.hi);
        }
    }
    // Piece masses may carry an ulp of drift; the result is a probability.
    p.clamp(0.0, 1.0)
}

/// Complement of [`payoff_breaker`]; the game is constant-sum with unit value.
pub fn payoff_attacker(f_a: &MixedStrategy, f_b: &MixedStrategy) -> f64 {
    1.0 - payoff_breaker(f_a, f_b)
}

// P[U >= t] for U uniform on [lo, hi].
fn uniform_at_least(lo: f64, hi: f64, t: f64) -> f64 {
    if t <= lo {
        1.0
    } else if t >= hi {
        0.0
    } else {
        (hi - t) / (hi - lo)
    }
}

// P[U <= t] for U uniform on [lo, hi].
fn uniform_at_most(lo: f64, hi: f64, t: f64) -> f64 {
    if t >= hi {
        1.0
    } else if t <= lo {
        0.0
    } else {
        (t - lo) / (hi - lo)
    }
}

// P[Y >= X] for X uniform on [a1, a2], Y uniform on [b1, b2], independent.
fn uniform_beats_uniform(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
    let c1 = b1.clamp(a1, a2);
    let c2 = b2.clamp(a1, a2);
    let mut acc = c1 - a1; // x below the opponent's support always loses to Y
    if c2 > c1 {
        acc += (c2 - c1) * (b2 - 0.5 * (c1 + c2)) / (b2 - b1);
    }
    acc / (a2 - a1)
}

/// Win probability of a single pure bid against `f_opp`.
///
/// The Breaker wins ties, so its bid beats any opponent atom it matches,
/// while an Attacker bid does not.
pub fn win_prob_pure(f_opp: &MixedStrategy, bid: f64, perspective: Perspective) -> f64 {
    match perspective {
        Perspective::Breaker => f_opp.cdf(bid),
        Perspective::Attacker => f_opp.cdf_left(bid),
    }
}

/// Optimal reply value against `f_opp` under an expected-budget constraint.
///
/// Under `E[x] <= budget`, the best achievable value is the upper concave
/// envelope of the pure-bid win curve evaluated at the budget, attained by
/// mixing at most two bids; once the budget reaches the cheapest maximizer of
/// the curve, the value saturates at the curve's maximum. The curve is
/// evaluated on a uniform grid over `[0, grid_max]`, which must reach
/// strictly above the top of `f_opp`'s support.
pub fn best_response_value(
    f_opp: &MixedStrategy,
    budget: f64,
    perspective: Perspective,
    grid_step: f64,
    grid_max: f64,
) -> Result<BestResponseReport, DomainError> {
    if !(budget.is_finite() && grid_step.is_finite() && grid_max.is_finite()) {
        return Err(DomainError::NonFinite);
    }
    if budget < 0.0 {
        return Err(DomainError::NegativeBudget);
    }
    if grid_max <= f_opp.support_top() {
        return Err(DomainError::GridBelowSupport);
    }
    envelope_value(f_opp, budget, perspective, grid_step, grid_max)
}

/// Like [`best_response_value`], but with bids restricted to `[0, bid_cap]`.
///
/// Used for replies that carry a support constraint, e.g. the below-threshold
/// sub-game where the capped player may not outbid the threshold; `bid_cap`
/// may sit at or below the top of the opponent's support.
pub fn best_response_value_capped(
    f_opp: &MixedStrategy,
    budget: f64,
    perspective: Perspective,
    grid_step: f64,
    bid_cap: f64,
) -> Result<BestResponseReport, DomainError> {
    if !(budget.is_finite() && grid_step.is_finite() && bid_cap.is_finite()) {
        return Err(DomainError::NonFinite);
    }
    if budget < 0.0 {
        return Err(DomainError::NegativeBudget);
    }
    if bid_cap <= 0.0 {
        return Err(DomainError::NonPositiveResolution);
    }
    envelope_value(f_opp, budget, perspective, grid_step, bid_cap)
}

fn envelope_value(
    f_opp: &MixedStrategy,
    budget: f64,
    perspective: Perspective,
    grid_step: f64,
    top: f64,
) -> Result<BestResponseReport, DomainError> {
    if grid_step <= 0.0 {
        return Err(DomainError::NonPositiveResolution);
    }
    let n = libm::ceil(top / grid_step).max(1.0) as usize;
    let step = top / n as f64;

    // Pure-bid win curve on the grid; nondecreasing since it is a CDF.
    let mut curve: Vec<(f64, f64)> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        // i/n first so the last bid is exactly `top` (a capped bidder may
        // sit on the cap but never beyond it).
        let x = top * (i as f64 / n as f64);
        curve.push((x, win_prob_pure(f_opp, x, perspective)));
    }

    // Cheapest bid attaining the maximum; beyond it the budget saturates.
    let mut peak = 0;
    for (i, p) in curve.iter().enumerate() {
        if p.1 > curve[peak].1 {
            peak = i;
        }
    }
    if budget >= curve[peak].0 {
        return Ok(BestResponseReport {
            value: curve[peak].1,
            support_bids: vec![curve[peak].0],
            envelope_grid_step: step,
        });
    }

    let hull = upper_hull(&curve[..=peak]);
    // budget < curve[peak].0, and hull spans [0, curve[peak].0].
    let k = hull.partition_point(|p| p.0 <= budget) - 1;
    let (x0, y0) = hull[k];
    if x0 == budget || k + 1 == hull.len() {
        return Ok(BestResponseReport {
            value: y0,
            support_bids: vec![x0],
            envelope_grid_step: step,
        });
    }
    let (x1, y1) = hull[k + 1];
    let value = y0 + (y1 - y0) * (budget - x0) / (x1 - x0);
    Ok(BestResponseReport {
        value,
        support_bids: vec![x0, x1],
        envelope_grid_step: step,
    })
}

// Upper hull of points sorted by strictly increasing x (monotone chain).
fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len().min(64));
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when p lies on or above the line through a and b.
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// One draw from the strategy: pick a piece from the mass table, then invert
/// the piece CDF. Atoms return their location; segments return a uniform
/// point. Deterministic given the generator state.
pub fn sample<R: RngCore + ?Sized>(strategy: &MixedStrategy, rng: &mut R) -> f64 {
    let mut u = uniform53(rng);
    for a in strategy.atoms() {
        if u < a.mass {
            return a.location;
        }
        u -= a.mass;
    }
    for s in strategy.segments() {
        if u < s.mass {
            return s.lo + uniform53(rng) * (s.hi - s.lo);
        }
        u -= s.mass;
    }
    // Mass drift of a few ulps can push u past the table; the last piece owns
    // the remainder.
    if let Some(s) = strategy.segments().last() {
        s.lo + uniform53(rng) * (s.hi - s.lo)
    } else {
        strategy.atoms().last().map_or(0.0, |a| a.location)
    }
}

// Uniform on [0, 1) with 53 random bits.
fn uniform53<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
