//! Equilibrium computation for General Lotto games with a binary threshold
//! sensor.
//!
//! Two players spread resources over a single contest: the Attacker commits a
//! randomized allocation first, and the Breaker observes a one-bit sensor
//! reading (was the realized allocation above the threshold `tau` or not?)
//! before responding. Ties go to the Breaker. This crate provides
//!
//! - a canonical piecewise representation for the mixed strategies that arise
//!   in these games (point masses plus uniform segments), with exact payoff
//!   integration between any two of them ([`model`], [`strategy_eval`]),
//! - closed-form equilibrium payoffs and strategy profiles for the classic
//!   game without a sensor ([`classic_lotto`]),
//! - equilibrium payoffs of the two sub-games induced by the sensor signal
//!   (the support-capped game below the threshold and the head-start game
//!   above it), plus explicit strategy constructions for the capped one
//!   ([`subgames`]),
//! - the full sensor game: region classification, closed-form Breaker payoff,
//!   the optimal split of the Attacker budget across the two sub-games, and
//!   independent numerical oracles that verify every closed form
//!   ([`sensor`]).
//!
//! The crate is `no_std` (with `alloc`); all types are immutable values and
//! every operation is a pure function, so everything is safe to share across
//! threads. IO, file formats and the command-line front end live in the
//! companion `lotto-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classic_lotto;
pub mod model;
pub mod sensor;
pub mod strategy_eval;
pub mod subgames;

pub use model::{Atom, Decomposition, GameParams, MixedStrategy, ModelError, Region, Segment, Signal};
pub use strategy_eval::{BestResponseReport, Perspective};

use core::fmt;

/// Rejected input to one of the numeric operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainError {
    /// A budget, threshold or resolution was NaN or infinite.
    NonFinite,
    /// A resource budget was negative.
    NegativeBudget,
    /// The operation needs a strictly positive threshold.
    ThresholdRequired,
    /// A lower-bounded sub-game budget fell below the threshold.
    BelowThreshold,
    /// An upper-bounded sub-game budget fell outside `[0, tau]`.
    OutsideInterval,
    /// A grid resolution or step was not strictly positive.
    NonPositiveResolution,
    /// The best-response grid must extend strictly above the opponent's
    /// support.
    GridBelowSupport,
    /// A decomposition part with positive weight was absent.
    IncompleteDecomposition,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            DomainError::NonFinite => "input must be finite",
            DomainError::NegativeBudget => "budgets must be nonnegative",
            DomainError::ThresholdRequired => "threshold must be strictly positive",
            DomainError::BelowThreshold => "budget must be at least the threshold",
            DomainError::OutsideInterval => "budget must lie in [0, tau]",
            DomainError::NonPositiveResolution => "resolution must be strictly positive",
            DomainError::GridBelowSupport => {
                "grid must extend strictly above the opponent's support"
            }
            DomainError::IncompleteDecomposition => {
                "decomposition part with positive weight is absent"
            }
        };
        f.write_str(msg)
    }
}

impl core::error::Error for DomainError {}
