//! Domain types shared by every other module: game parameters, the canonical
//! piecewise strategy representation, the region tags of the closed-form
//! payoff, and the budget decomposition.
//!
//! A [`MixedStrategy`] is a finite mix of point masses ([`Atom`]) and uniform
//! pieces ([`Segment`]). Every strategy that shows up in these games has this
//! shape, so no general CDF callbacks are needed. Construction via
//! [`MixedStrategy::new`] canonicalizes: duplicate atoms merge, zero-mass
//! pieces drop, pieces sort, and the total mass must be 1 within `1e-9`
//! (rescaled onto 1 when it is off by more than `1e-12`). The canonical form
//! is unique, so strategy equality is testable, and canonicalization is
//! exactly idempotent.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::DomainError;

/// Accepted deviation of the total mass from 1 on input.
pub const MASS_INPUT_TOL: f64 = 1e-9;
/// Deviation beyond which internal identities are considered broken.
pub const MASS_IDENTITY_TOL: f64 = 1e-12;

/// The triple `(x_a, x_b, tau)` defining one sensor-game instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams {
    x_a: f64,
    x_b: f64,
    tau: f64,
}

impl GameParams {
    /// Validates that all fields are finite and nonnegative.
    pub fn new(x_a: f64, x_b: f64, tau: f64) -> Result<Self, DomainError> {
        if !(x_a.is_finite() && x_b.is_finite() && tau.is_finite()) {
            return Err(DomainError::NonFinite);
        }
        if x_a < 0.0 || x_b < 0.0 {
            return Err(DomainError::NegativeBudget);
        }
        if tau < 0.0 {
            return Err(DomainError::ThresholdRequired);
        }
        Ok(GameParams { x_a, x_b, tau })
    }

    /// Attacker budget.
    pub fn x_a(&self) -> f64 {
        self.x_a
    }

    /// Breaker budget.
    pub fn x_b(&self) -> f64 {
        self.x_b
    }

    /// Sensor threshold. Zero means "no sensor" (classic game).
    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    /// Allocation at which the mass sits.
    #[serde(rename = "x")]
    pub location: f64,
    /// Probability mass, in `[0, 1]`.
    #[serde(rename = "m")]
    pub mass: f64,
}

/// A uniform piece on `[lo, hi]` carrying total mass `mass`
/// (density `mass / (hi - lo)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    #[serde(rename = "m")]
    pub mass: f64,
}

/// Malformed raw input to [`MixedStrategy::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelError {
    /// An atom had a negative or non-finite location, or a mass outside
    /// `[0, 1]`.
    InvalidAtom,
    /// A segment had non-finite bounds, `lo < 0`, `lo >= hi`, or a mass
    /// outside `[0, 1]`.
    InvalidSegment,
    /// Two segments overlap on an interval of positive length.
    OverlappingSegments,
    /// Total mass deviates from 1 beyond the input tolerance; the payload is
    /// the offending total.
    MassDeviation(f64),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidAtom => f.write_str("atom location or mass out of range"),
            ModelError::InvalidSegment => f.write_str("segment bounds or mass out of range"),
            ModelError::OverlappingSegments => f.write_str("segments overlap"),
            ModelError::MassDeviation(total) => {
                write!(f, "total mass {total} deviates from 1 beyond 1e-9")
            }
        }
    }
}

impl core::error::Error for ModelError {}

/// A mixed allocation strategy in canonical piecewise form.
///
/// Serializes as `{"atoms":[{"x":…,"m":…}],"segments":[{"lo":…,"hi":…,"m":…}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixedStrategy")]
pub struct MixedStrategy {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

#[derive(Deserialize)]
struct RawMixedStrategy {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

impl TryFrom<RawMixedStrategy> for MixedStrategy {
    type Error = ModelError;

    fn try_from(raw: RawMixedStrategy) -> Result<Self, ModelError> {
        MixedStrategy::new(raw.atoms, raw.segments)
    }
}

impl MixedStrategy {
    /// Builds the canonical form of the given raw pieces.
    ///
    /// Duplicate atom locations are merged, exactly coincident segments are
    /// merged, zero-mass pieces are pruned and pieces are sorted. Fails if a
    /// piece is malformed, if segment interiors overlap, or if the total mass
    /// is off 1 by more than [`MASS_INPUT_TOL`]. A total within the input
    /// tolerance but off by more than [`MASS_IDENTITY_TOL`] is rescaled onto
    /// 1, which makes construction exactly idempotent.
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self, ModelError> {
        for a in &atoms {
            if !(a.location.is_finite() && a.mass.is_finite())
                || a.location < 0.0
                || a.mass < 0.0
                || a.mass > 1.0 + MASS_INPUT_TOL
            {
                return Err(ModelError::InvalidAtom);
            }
        }
        for s in &segments {
            if !(s.lo.is_finite() && s.hi.is_finite() && s.mass.is_finite())
                || s.lo < 0.0
                || s.lo >= s.hi
                || s.mass < 0.0
                || s.mass > 1.0 + MASS_INPUT_TOL
            {
                return Err(ModelError::InvalidSegment);
            }
        }

        let mut atoms: Vec<Atom> = atoms.into_iter().filter(|a| a.mass > 0.0).collect();
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut merged_atoms: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged_atoms.last_mut() {
                Some(prev) if prev.location == a.location => prev.mass += a.mass,
                _ => merged_atoms.push(a),
            }
        }

        let mut segments: Vec<Segment> = segments.into_iter().filter(|s| s.mass > 0.0).collect();
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged_segments: Vec<Segment> = Vec::with_capacity(segments.len());
        for s in segments {
            match merged_segments.last_mut() {
                Some(prev) if prev.lo == s.lo && prev.hi == s.hi => prev.mass += s.mass,
                _ => merged_segments.push(s),
            }
        }
        for w in merged_segments.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(ModelError::OverlappingSegments);
            }
        }

        let total: f64 = merged_atoms.iter().map(|a| a.mass).sum::<f64>()
            + merged_segments.iter().map(|s| s.mass).sum::<f64>();
        if libm::fabs(total - 1.0) > MASS_INPUT_TOL {
            return Err(ModelError::MassDeviation(total));
        }
        if libm::fabs(total - 1.0) > MASS_IDENTITY_TOL {
            for a in &mut merged_atoms {
                a.mass /= total;
            }
            for s in &mut merged_segments {
                s.mass /= total;
            }
        }

        Ok(MixedStrategy {
            atoms: merged_atoms,
            segments: merged_segments,
        })
    }

    /// The pure strategy that always allocates `location`.
    pub fn point(location: f64) -> Self {
        MixedStrategy::new(
            alloc::vec![Atom {
                location,
                mass: 1.0
            }],
            Vec::new(),
        )
        .expect("point mass is canonical")
    }

    /// Uniform on `[lo, hi]` with full mass.
    pub fn uniform(lo: f64, hi: f64) -> Self {
        MixedStrategy::new(alloc::vec![], alloc::vec![Segment { lo, hi, mass: 1.0 }])
            .expect("uniform piece is canonical")
    }

    /// Point masses, sorted by location.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Uniform pieces, sorted by lower endpoint.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `E[x]` in closed form: `Σ mass·location + Σ mass·(lo+hi)/2`.
    pub fn expected_value(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * a.location).sum();
        let segments: f64 = self
            .segments
            .iter()
            .map(|s| s.mass * 0.5 * (s.lo + s.hi))
            .sum();
        atoms + segments
    }

    /// `P[X <= x]`, counting any atom exactly at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_impl(x, true)
    }

    /// Left limit `P[X < x]`, excluding any atom exactly at `x`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.cdf_impl(x, false)
    }

    fn cdf_impl(&self, x: f64, include_atom_at_x: bool) -> f64 {
        let mut p = 0.0;
        for a in &self.atoms {
            if a.location < x || (include_atom_at_x && a.location == x) {
                p += a.mass;
            }
        }
        for s in &self.segments {
            if x >= s.hi {
                p += s.mass;
            } else if x > s.lo {
                p += s.mass * (x - s.lo) / (s.hi - s.lo);
            }
        }
        // Piece masses may carry an ulp of drift; keep the range contract.
        p.clamp(0.0, 1.0)
    }

    /// Largest point of the support.
    pub fn support_top(&self) -> f64 {
        let a = self.atoms.last().map_or(0.0, |a| a.location);
        let s = self.segments.iter().map(|s| s.hi).fold(0.0, f64::max);
        a.max(s)
    }

    /// Sum of all piece masses (1 up to rounding, by construction).
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>()
            + self.segments.iter().map(|s| s.mass).sum::<f64>()
    }
}

/// Which branch of the closed-form Breaker payoff applies.
///
/// `Classic` is the `tau = 0` sentinel: the sensor never fires and the game
/// collapses to the classic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Classic,
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            Region::Classic => "Classic",
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::V => "V",
            Region::VI => "VI",
            Region::VII => "VII",
            Region::VIII => "VIII",
            Region::IX => "IX",
        };
        f.write_str(tag)
    }
}

/// The split `(alpha, x0, x1)` of the Attacker budget across the two
/// sub-games: with probability `alpha` the realized allocation exceeds the
/// threshold and carries conditional expected spend `x1 >= tau`; otherwise it
/// stays at or below with conditional expected spend `x0 in [0, tau]`.
///
/// A part whose weight is zero may be absent. Present parts satisfy the
/// budget identity `(1 - alpha)·x0 + alpha·x1 = x_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub alpha: f64,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
}

impl Decomposition {
    /// Total expected spend `(1 - alpha)·x0 + alpha·x1`, with absent parts
    /// contributing zero.
    pub fn spend(&self) -> f64 {
        let mut s = 0.0;
        let w0 = 1.0 - self.alpha;
        if w0 > 0.0 {
            if let Some(x0) = self.x0 {
                s += w0 * x0;
            }
        }
        if self.alpha > 0.0 {
            if let Some(x1) = self.x1 {
                s += self.alpha * x1;
            }
        }
        s
    }
}

/// What the sensor reports about a realized allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signal {
    /// The allocation was at or below the threshold.
    AtOrBelow,
    /// The allocation was strictly above the threshold.
    Above,
}

impl Signal {
    /// Signal generated by allocation `x_a` under threshold `tau`.
    pub fn from_allocation(x_a: f64, tau: f64) -> Signal {
        if x_a <= tau {
            Signal::AtOrBelow
        } else {
            Signal::Above
        }
    }

    /// 0 for at-or-below, 1 for above.
    pub fn bit(self) -> u8 {
        match self {
            Signal::AtOrBelow => 0,
            Signal::Above => 1,
        }
    }
}
