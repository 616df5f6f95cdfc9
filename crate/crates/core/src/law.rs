//! The observed law `{p(D, E, U, R = 0), p(D, E, R = 1)}` and the conditionals
//! derived from it.
//!
//! Only joint masses are stored so both tables share one normalization; every
//! conditional is computed on demand.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::Exposure;
use crate::tol;

/// Unvalidated observed-law tables, as read from or written to a law file.
///
/// `p_deu_r0` is indexed `[d][e][u]`, `p_de_r1` is indexed `[d][e]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LawTables {
    pub u_card: usize,
    pub p_deu_r0: [[Vec<f64>; 2]; 2],
    pub p_de_r1: [[f64; 2]; 2],
}

/// A validated observed law.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "LawTables", into = "LawTables")
)]
pub struct ObservedLaw {
    tables: LawTables,
}

/// The conditionals and marginals exposed by [`ObservedLaw::query`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Query {
    /// `p(D = 1 | E = e, U = u, R = 0)`
    OutcomeGivenStratum { e: Exposure, u: usize },
    /// `p(U = u | E = e, R = 0)`
    ConfounderGivenExposureObserved { e: Exposure, u: usize },
    /// `p(U = u | R = 0)`
    ConfounderObserved { u: usize },
    /// `p(D = 1, E = e)`
    OutcomeAndExposure { e: Exposure },
    /// `p(R = r, E = e)`
    MissingnessAndExposure { r: usize, e: Exposure },
    /// `p(D = 1 | E = e, R = 1)`
    OutcomeGivenExposureMissing { e: Exposure },
    /// `p(D = d, E = e | R = 1)`
    CellGivenMissing { d: usize, e: Exposure },
    /// `p(U = u | D = d, E = e, R = 0)`
    ConfounderGivenCellObserved { d: usize, e: Exposure, u: usize },
    /// `p(D_e = 1 | E = 1 - e, R = 0)`
    CounterfactualObserved { e: Exposure },
}

pub fn validate_law(tables: &LawTables) -> Result<()> {
    let k = tables.u_card;
    if k == 0 {
        return Err(Error::InvalidArgument("u_card must be at least 1"));
    }
    let mut total = 0.0;
    for d in 0..2 {
        for e in 0..2 {
            let row = &tables.p_deu_r0[d][e];
            if row.len() != k {
                return Err(Error::ShapeMismatch { field: "p_deu_r0", expected: k, found: row.len() });
            }
            for (u, &mass) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&mass) {
                    return Err(Error::InvalidProbability { field: "p_deu_r0", value: mass });
                }
                if mass <= tol::STRUCTURAL {
                    return Err(Error::PositivityViolation { d, e, u, mass });
                }
                total += mass;
            }
            let mass = tables.p_de_r1[d][e];
            if !(0.0..=1.0).contains(&mass) {
                return Err(Error::InvalidProbability { field: "p_de_r1", value: mass });
            }
            total += mass;
        }
    }
    if (total - 1.0).abs() > tol::STRUCTURAL {
        return Err(Error::NotNormalized { field: "observed law", sum: total });
    }
    Ok(())
}

impl TryFrom<LawTables> for ObservedLaw {
    type Error = Error;

    fn try_from(tables: LawTables) -> Result<Self> {
        validate_law(&tables)?;
        Ok(ObservedLaw { tables })
    }
}

impl From<ObservedLaw> for LawTables {
    fn from(law: ObservedLaw) -> Self {
        law.tables
    }
}

fn conditional(num: f64, den: f64, event: &'static str) -> Result<f64> {
    if den <= tol::STRUCTURAL {
        return Err(Error::ZeroConditioningEvent { event, mass: den });
    }
    Ok(num / den)
}

impl ObservedLaw {
    /// Builds a law from tables that are valid by construction (e.g. the
    /// marginals of a validated model).
    pub(crate) fn from_validated_parts(
        u_card: usize,
        p_deu_r0: [[Vec<f64>; 2]; 2],
        p_de_r1: [[f64; 2]; 2],
    ) -> Self {
        let tables = LawTables { u_card, p_deu_r0, p_de_r1 };
        debug_assert_eq!(validate_law(&tables), Ok(()));
        ObservedLaw { tables }
    }

    pub fn u_card(&self) -> usize {
        self.tables.u_card
    }

    pub fn tables(&self) -> &LawTables {
        &self.tables
    }

    /// `p(D = d, E = e, U = u, R = 0)`.
    #[inline]
    pub fn mass_r0(&self, d: usize, e: Exposure, u: usize) -> f64 {
        self.tables.p_deu_r0[d][e.index()][u]
    }

    /// `p(D = d, E = e, R = 1)`.
    #[inline]
    pub fn mass_r1(&self, d: usize, e: Exposure) -> f64 {
        self.tables.p_de_r1[d][e.index()]
    }

    /// `p(D = d, E = e, R = 0)`.
    pub fn cell_mass_r0(&self, d: usize, e: Exposure) -> f64 {
        self.tables.p_deu_r0[d][e.index()].iter().sum()
    }

    /// `p(E = e, U = u, R = 0)`.
    pub fn stratum_mass_r0(&self, e: Exposure, u: usize) -> f64 {
        self.mass_r0(0, e, u) + self.mass_r0(1, e, u)
    }

    /// `p(R = 0)`.
    pub fn p_r0(&self) -> f64 {
        self.tables.p_deu_r0.iter().flatten().flatten().sum()
    }

    /// `p(R = 1)`.
    pub fn p_r1(&self) -> f64 {
        self.tables.p_de_r1.iter().flatten().sum()
    }

    /// `p(D = 1 | E = e, U = u, R = 0)`; always defined by positivity.
    #[inline]
    pub fn outcome_given_stratum(&self, e: Exposure, u: usize) -> f64 {
        self.mass_r0(1, e, u) / self.stratum_mass_r0(e, u)
    }

    /// `p(D = 1 | E = e, U = u, R = 0)` for every `u`.
    pub fn outcome_given_strata(&self, e: Exposure) -> Vec<f64> {
        (0..self.u_card()).map(|u| self.outcome_given_stratum(e, u)).collect()
    }

    /// `S(e) = sum_u p(D = 1 | E = e, U = u, R = 0)`.
    pub fn stratum_outcome_sum(&self, e: Exposure) -> f64 {
        (0..self.u_card()).map(|u| self.outcome_given_stratum(e, u)).sum()
    }

    /// `p(U = u | E = e, R = 0)`.
    pub fn confounder_given_exposure_observed(&self, e: Exposure, u: usize) -> f64 {
        self.stratum_mass_r0(e, u) / self.missingness_and_exposure(0, e)
    }

    /// `p(U = u | R = 0)`.
    pub fn confounder_observed(&self, u: usize) -> f64 {
        let mass: f64 = Exposure::BOTH.iter().map(|&e| self.stratum_mass_r0(e, u)).sum();
        mass / self.p_r0()
    }

    /// `p(D = 1, E = e)`, summing the observed and missing parts.
    pub fn outcome_and_exposure(&self, e: Exposure) -> f64 {
        self.cell_mass_r0(1, e) + self.mass_r1(1, e)
    }

    /// `p(R = r, E = e)`.
    pub fn missingness_and_exposure(&self, r: usize, e: Exposure) -> f64 {
        match r {
            0 => self.cell_mass_r0(0, e) + self.cell_mass_r0(1, e),
            _ => self.mass_r1(0, e) + self.mass_r1(1, e),
        }
    }

    /// `p(D = 1 | E = e, R = 1)`.
    pub fn outcome_given_exposure_missing(&self, e: Exposure) -> Result<f64> {
        conditional(self.mass_r1(1, e), self.missingness_and_exposure(1, e), "E=e, R=1")
    }

    /// `p(D = d, E = e | R = 1)`.
    pub fn cell_given_missing(&self, d: usize, e: Exposure) -> Result<f64> {
        conditional(self.mass_r1(d, e), self.p_r1(), "R=1")
    }

    /// `p(U = u | D = d, E = e, R = 0)`.
    pub fn confounder_given_cell_observed(&self, d: usize, e: Exposure, u: usize) -> Result<f64> {
        conditional(self.mass_r0(d, e, u), self.cell_mass_r0(d, e), "D=d, E=e, R=0")
    }

    /// `A(e) = p(D_e = 1 | E = 1 - e, R = 0)
    ///       = sum_u p(D = 1 | E = e, U = u, R = 0) p(U = u | E = 1 - e, R = 0)`.
    pub fn counterfactual_observed(&self, e: Exposure) -> f64 {
        let other = e.other();
        (0..self.u_card())
            .map(|u| self.outcome_given_stratum(e, u) * self.confounder_given_exposure_observed(other, u))
            .sum()
    }

    /// `p(D = 1, E = e) + A(e) p(R = 0, E = 1 - e) + p(R = 1, E = 1 - e) x`,
    /// i.e. `p(D_e = 1)` with `x` standing in for the unrecoverable
    /// `p(D_e = 1 | E = 1 - e, R = 1)`.
    pub fn potential_outcome_with(&self, e: Exposure, missing_term: f64) -> f64 {
        let other = e.other();
        self.outcome_and_exposure(e)
            + self.counterfactual_observed(e) * self.missingness_and_exposure(0, other)
            + self.missingness_and_exposure(1, other) * missing_term
    }

    pub fn query(&self, query: Query) -> Result<f64> {
        let k = self.u_card();
        let check_u = |u: usize| {
            if u < k {
                Ok(())
            } else {
                Err(Error::InvalidArgument("confounder level out of range"))
            }
        };
        let check_binary = |v: usize| {
            if v < 2 {
                Ok(())
            } else {
                Err(Error::InvalidArgument("binary index out of range"))
            }
        };
        match query {
            Query::OutcomeGivenStratum { e, u } => {
                check_u(u)?;
                Ok(self.outcome_given_stratum(e, u))
            }
            Query::ConfounderGivenExposureObserved { e, u } => {
                check_u(u)?;
                Ok(self.confounder_given_exposure_observed(e, u))
            }
            Query::ConfounderObserved { u } => {
                check_u(u)?;
                Ok(self.confounder_observed(u))
            }
            Query::OutcomeAndExposure { e } => Ok(self.outcome_and_exposure(e)),
            Query::MissingnessAndExposure { r, e } => {
                check_binary(r)?;
                Ok(self.missingness_and_exposure(r, e))
            }
            Query::OutcomeGivenExposureMissing { e } => self.outcome_given_exposure_missing(e),
            Query::CellGivenMissing { d, e } => {
                check_binary(d)?;
                self.cell_given_missing(d, e)
            }
            Query::ConfounderGivenCellObserved { d, e, u } => {
                check_binary(d)?;
                check_u(u)?;
                self.confounder_given_cell_observed(d, e, u)
            }
            Query::CounterfactualObserved { e } => Ok(self.counterfactual_observed(e)),
        }
    }
}
