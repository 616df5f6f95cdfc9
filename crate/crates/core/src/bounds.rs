//! Assumption-free bounds.
//!
//! The only unrecoverable piece of `p(D_e = 1)` is
//! `p(D_e = 1 | E = 1 - e, R = 1)`, an average of the stratum outcome
//! probabilities `p(D = 1 | E = e, U = u, R = 0)` under unknown weights. It is
//! therefore bracketed by the smallest and largest stratum probability.

use crate::error::Result;
use crate::estimands::{contrast, ContrastKind};
use crate::interval::Interval;
use crate::law::ObservedLaw;
use crate::model::Exposure;
use crate::tol;

/// `m(e)` and `M(e)`: extremes of `p(D = 1 | E = e, U = u, R = 0)` over `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StratumExtremes {
    pub min: f64,
    pub max: f64,
}

/// Bounds on `p(D_e = 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialOutcomeBounds {
    pub e: Exposure,
    pub interval: Interval,
}

impl PotentialOutcomeBounds {
    pub fn lb(&self) -> f64 {
        self.interval.lb
    }

    pub fn ub(&self) -> f64 {
        self.interval.ub
    }
}

pub fn stratum_extremes(law: &ObservedLaw, e: Exposure) -> StratumExtremes {
    (0..law.u_card())
        .map(|u| law.outcome_given_stratum(e, u))
        .fold(StratumExtremes { min: f64::INFINITY, max: f64::NEG_INFINITY }, |acc, p| {
            StratumExtremes { min: acc.min.min(p), max: acc.max.max(p) }
        })
}

/// Brackets `p(D_e = 1)` given lower and upper stand-ins for the missing-case
/// term. The upper end is capped at one; the lower end is a sum of
/// nonnegative terms and is left as is. The ends may cross if the stand-ins
/// do.
pub(crate) fn bracket(law: &ObservedLaw, e: Exposure, low_term: f64, high_term: f64) -> PotentialOutcomeBounds {
    let lb = law.potential_outcome_with(e, low_term);
    let ub = law.potential_outcome_with(e, high_term).min(1.0);
    debug_assert!(lb >= -tol::STRUCTURAL, "negative lower bound {lb}");
    PotentialOutcomeBounds { e, interval: Interval { lb, ub } }
}

/// `LB(e)` and `UB(e)`.
pub fn po_bounds(law: &ObservedLaw, e: Exposure) -> PotentialOutcomeBounds {
    let StratumExtremes { min, max } = stratum_extremes(law, e);
    let bounds = bracket(law, e, min, max);
    debug_assert!(bounds.lb() <= bounds.ub() + tol::DERIVED, "crossed bounds {bounds:?}");
    bounds
}

/// Combines potential-outcome bounds into contrast bounds:
/// `[g(LB(1), UB(0)), g(UB(1), LB(0))]`.
pub fn compose(
    kind: ContrastKind,
    exposed: &PotentialOutcomeBounds,
    unexposed: &PotentialOutcomeBounds,
) -> Result<Interval> {
    let lb = contrast(kind, exposed.lb(), unexposed.ub())?;
    let ub = contrast(kind, exposed.ub(), unexposed.lb())?;
    Ok(Interval { lb, ub })
}

pub fn contrast_bounds(law: &ObservedLaw, kind: ContrastKind) -> Result<Interval> {
    compose(
        kind,
        &po_bounds(law, Exposure::Exposed),
        &po_bounds(law, Exposure::Unexposed),
    )
}
