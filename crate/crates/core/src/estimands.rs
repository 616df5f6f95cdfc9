//! Point quantities: the adjusted causal estimand, contrasts, and the
//! complete-case, multiple-imputation and data-fusion estimates.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::law::ObservedLaw;
use crate::model::{CausalModel, Exposure};
use crate::tol;

/// A contrast `g(p1, p0)` between `p(D_1 = 1)` and `p(D_0 = 1)`.
///
/// Every variant is strictly increasing in `p1` and strictly decreasing in
/// `p0` on the open unit square, which is what makes interval composition by
/// pairing opposite ends valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ContrastKind {
    #[default]
    RiskRatio,
    RiskDifference,
    OddsRatio,
    OddsDifference,
}

impl ContrastKind {
    pub const ALL: [ContrastKind; 4] = [
        ContrastKind::RiskRatio,
        ContrastKind::RiskDifference,
        ContrastKind::OddsRatio,
        ContrastKind::OddsDifference,
    ];

    pub fn apply(self, p1: f64, p0: f64) -> Result<f64> {
        contrast(self, p1, p0)
    }

    /// Value of the contrast when there is no effect (`p1 == p0`).
    pub fn null_value(self) -> f64 {
        match self {
            ContrastKind::RiskRatio | ContrastKind::OddsRatio => 1.0,
            ContrastKind::RiskDifference | ContrastKind::OddsDifference => 0.0,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ContrastKind::RiskRatio => "rr",
            ContrastKind::RiskDifference => "rd",
            ContrastKind::OddsRatio => "or",
            ContrastKind::OddsDifference => "od",
        }
    }
}

impl fmt::Display for ContrastKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContrastKind::RiskRatio => "risk ratio",
            ContrastKind::RiskDifference => "risk difference",
            ContrastKind::OddsRatio => "odds ratio",
            ContrastKind::OddsDifference => "odds difference",
        })
    }
}

impl FromStr for ContrastKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rr" | "risk-ratio" | "riskratio" => Ok(ContrastKind::RiskRatio),
            "rd" | "risk-difference" | "riskdifference" => Ok(ContrastKind::RiskDifference),
            "or" | "odds-ratio" | "oddsratio" => Ok(ContrastKind::OddsRatio),
            "od" | "odds-difference" | "oddsdifference" => Ok(ContrastKind::OddsDifference),
            _ => Err(Error::InvalidArgument("unknown contrast, expected one of rr, rd, or, od")),
        }
    }
}

fn odds(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (1.0 - p)
    }
}

/// Evaluates `g(p1, p0)` on the extended reals.
///
/// Boundary values with a one-sided limit map to `±inf`; `0/0`, `inf/inf`
/// and `inf - inf` are reported as [`Error::UndefinedContrast`].
pub fn contrast(kind: ContrastKind, p1: f64, p0: f64) -> Result<f64> {
    for p in [p1, p0] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability { field: "contrast argument", value: p });
        }
    }
    let undefined = Err(Error::UndefinedContrast { p1, p0 });
    match kind {
        ContrastKind::RiskDifference => Ok(p1 - p0),
        ContrastKind::RiskRatio => {
            if p0 == 0.0 {
                return if p1 == 0.0 { undefined } else { Ok(f64::INFINITY) };
            }
            Ok(p1 / p0)
        }
        ContrastKind::OddsRatio => {
            let (o1, o0) = (odds(p1), odds(p0));
            if (o1 == 0.0 && o0 == 0.0) || (o1.is_infinite() && o0.is_infinite()) {
                return undefined;
            }
            if o0 == 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok(o1 / o0)
        }
        ContrastKind::OddsDifference => {
            let (o1, o0) = (odds(p1), odds(p0));
            if o1.is_infinite() && o0.is_infinite() {
                return undefined;
            }
            Ok(o1 - o0)
        }
    }
}

/// `p(D_e = 1) = sum_u p(D = 1 | E = e, U = u) p(U = u)`.
pub fn true_potential(model: &CausalModel, e: Exposure) -> f64 {
    model
        .p_d1_given_eu(e)
        .iter()
        .zip(model.p_u())
        .map(|(pd, pu)| pd * pu)
        .sum()
}

fn adjust(law: &ObservedLaw, e: Exposure, weights: impl Iterator<Item = f64>) -> f64 {
    weights
        .enumerate()
        .map(|(u, w)| law.outcome_given_stratum(e, u) * w)
        .sum()
}

/// Complete-case analysis: adjustment with `p(U | R = 0)` in place of `p(U)`.
pub fn complete_case(law: &ObservedLaw, e: Exposure) -> f64 {
    adjust(law, e, (0..law.u_card()).map(|u| law.confounder_observed(u)))
}

/// Distribution of `U` in the multiply-imputed population:
///
/// `q(u) = p(U=u | R=0) p(R=0) + p(R=1) sum_{d,e} p(U=u | D=d, E=e, R=0) p(D=d, E=e | R=1)`.
pub fn imputation_weights(law: &ObservedLaw) -> Result<Vec<f64>> {
    let (p_r0, p_r1) = (law.p_r0(), law.p_r1());
    let mut q: Vec<f64> = (0..law.u_card()).map(|u| law.confounder_observed(u) * p_r0).collect();
    if p_r1 <= tol::STRUCTURAL {
        return Ok(q);
    }
    for d in 0..2 {
        for e in Exposure::BOTH {
            let share = law.cell_given_missing(d, e)?;
            if share == 0.0 {
                continue;
            }
            for (u, qu) in q.iter_mut().enumerate() {
                *qu += p_r1 * law.confounder_given_cell_observed(d, e, u)? * share;
            }
        }
    }
    Ok(q)
}

/// Multiple imputation at the distribution level: adjustment with
/// [`imputation_weights`] in place of `p(U)`.
pub fn multiple_imputation(law: &ObservedLaw, e: Exposure) -> Result<f64> {
    Ok(adjust(law, e, imputation_weights(law)?.into_iter()))
}

/// Data-fusion estimate of `p(D_e = 1)`.
///
/// `p_u_given_e[e'][u]` is an auxiliary estimate of `p(U = u | E = e')`, used
/// in place of `p(U | E = 1 - e, R = 1)` when averaging the stratum outcome
/// probabilities over the incomplete cases.
pub fn fusion_estimate(law: &ObservedLaw, p_u_given_e: &[Vec<f64>; 2], e: Exposure) -> Result<f64> {
    for row in p_u_given_e {
        if row.len() != law.u_card() {
            return Err(Error::ShapeMismatch {
                field: "p_u_given_e",
                expected: law.u_card(),
                found: row.len(),
            });
        }
        if let Some(&value) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability { field: "p_u_given_e", value });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::NotNormalized { field: "p_u_given_e", sum });
        }
    }
    let missing_term = adjust(law, e, p_u_given_e[e.other().index()].iter().copied());
    Ok(law.potential_outcome_with(e, missing_term))
}
