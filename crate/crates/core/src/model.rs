//! The generative model `p(U) p(E|U) p(D|E,U) p(R|E,U)` and its full joint.
//!
//! Missingness is modelled through `p(R = 1 | E, U)` only, so the type cannot
//! express a dependence of `R` on the outcome.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::law::ObservedLaw;
use crate::tol;

/// Binary exposure level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exposure {
    Unexposed = 0,
    Exposed = 1,
}

impl Exposure {
    pub const BOTH: [Exposure; 2] = [Exposure::Unexposed, Exposure::Exposed];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    /// The opposite level, `1 - e`.
    #[inline]
    pub const fn other(self) -> Exposure {
        match self {
            Exposure::Unexposed => Exposure::Exposed,
            Exposure::Exposed => Exposure::Unexposed,
        }
    }

    pub fn from_index(e: usize) -> Option<Exposure> {
        match e {
            0 => Some(Exposure::Unexposed),
            1 => Some(Exposure::Exposed),
            _ => None,
        }
    }
}

/// Unvalidated model parameters, as read from or written to a model file.
///
/// Two-row tables are indexed by exposure level first.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub u_card: usize,
    pub p_u: Vec<f64>,
    pub p_e1_given_u: Vec<f64>,
    pub p_d1_given_eu: [Vec<f64>; 2],
    pub p_r1_given_eu: [Vec<f64>; 2],
}

/// A validated generative model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "ModelParams", into = "ModelParams")
)]
pub struct CausalModel {
    params: ModelParams,
}

fn check_probabilities(field: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(&value) => Err(Error::InvalidProbability { field, value }),
        None => Ok(()),
    }
}

fn check_len(field: &'static str, values: &[f64], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::ShapeMismatch { field, expected, found: values.len() });
    }
    Ok(())
}

/// Checks shapes, probability ranges, normalization of `p(U)` and positivity of
/// every cell of the implied `p(D, E, U, R = 0)`.
pub fn validate_model(params: &ModelParams) -> Result<()> {
    let k = params.u_card;
    if k == 0 {
        return Err(Error::InvalidArgument("u_card must be at least 1"));
    }
    check_len("p_u", &params.p_u, k)?;
    check_len("p_e1_given_u", &params.p_e1_given_u, k)?;
    for row in &params.p_d1_given_eu {
        check_len("p_d1_given_eu", row, k)?;
    }
    for row in &params.p_r1_given_eu {
        check_len("p_r1_given_eu", row, k)?;
    }

    check_probabilities("p_u", &params.p_u)?;
    check_probabilities("p_e1_given_u", &params.p_e1_given_u)?;
    for row in &params.p_d1_given_eu {
        check_probabilities("p_d1_given_eu", row)?;
    }
    for row in &params.p_r1_given_eu {
        check_probabilities("p_r1_given_eu", row)?;
    }

    let sum: f64 = params.p_u.iter().sum();
    if (sum - 1.0).abs() > tol::STRUCTURAL {
        return Err(Error::NotNormalized { field: "p_u", sum });
    }

    for e in 0..2 {
        for d in 0..2 {
            for u in 0..k {
                let mass = cell(params, d, e, u, 0);
                if mass <= tol::STRUCTURAL {
                    return Err(Error::PositivityViolation { d, e, u, mass });
                }
            }
        }
    }
    Ok(())
}

#[inline]
fn bernoulli(p1: f64, value: usize) -> f64 {
    if value == 1 {
        p1
    } else {
        1.0 - p1
    }
}

#[inline]
fn cell(params: &ModelParams, d: usize, e: usize, u: usize, r: usize) -> f64 {
    params.p_u[u]
        * bernoulli(params.p_e1_given_u[u], e)
        * bernoulli(params.p_d1_given_eu[e][u], d)
        * bernoulli(params.p_r1_given_eu[e][u], r)
}

impl TryFrom<ModelParams> for CausalModel {
    type Error = Error;

    fn try_from(params: ModelParams) -> Result<Self> {
        validate_model(&params)?;
        Ok(CausalModel { params })
    }
}

impl From<CausalModel> for ModelParams {
    fn from(model: CausalModel) -> Self {
        model.params
    }
}

impl CausalModel {
    pub fn new(
        p_u: Vec<f64>,
        p_e1_given_u: Vec<f64>,
        p_d1_given_eu: [Vec<f64>; 2],
        p_r1_given_eu: [Vec<f64>; 2],
    ) -> Result<Self> {
        ModelParams { u_card: p_u.len(), p_u, p_e1_given_u, p_d1_given_eu, p_r1_given_eu }.try_into()
    }

    /// The ternary-confounder model used as the running illustration: low
    /// income (`U = 0`) benefits from exposure and mostly reports its income.
    pub fn income_example() -> Self {
        CausalModel::new(
            vec![0.4, 0.5, 0.1],
            vec![0.3, 0.1, 0.2],
            [vec![0.1, 0.9, 0.7], vec![0.8, 0.3, 0.2]],
            [vec![0.1, 0.95, 0.85], vec![0.2, 0.8, 0.9]],
        )
        .expect("built-in example is valid")
    }

    pub fn u_card(&self) -> usize {
        self.params.u_card
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn p_u(&self) -> &[f64] {
        &self.params.p_u
    }

    pub fn p_e1_given_u(&self) -> &[f64] {
        &self.params.p_e1_given_u
    }

    /// `p(D = 1 | E = e, U = u)` for every `u`.
    pub fn p_d1_given_eu(&self, e: Exposure) -> &[f64] {
        &self.params.p_d1_given_eu[e.index()]
    }

    /// `p(R = 1 | E = e, U = u)` for every `u`.
    pub fn p_r1_given_eu(&self, e: Exposure) -> &[f64] {
        &self.params.p_r1_given_eu[e.index()]
    }

    /// Returns a copy with a different missingness mechanism.
    pub fn with_missingness(&self, p_r1_given_eu: [Vec<f64>; 2]) -> Result<Self> {
        let mut params = self.params.clone();
        params.p_r1_given_eu = p_r1_given_eu;
        params.try_into()
    }

    pub fn full_joint(&self) -> JointTable {
        full_joint(self)
    }

    pub fn observed_law(&self) -> ObservedLaw {
        observed_law(self)
    }
}

/// Dense `p(D, E, U, R)` table.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    u_card: usize,
    cells: Vec<f64>,
}

impl JointTable {
    #[inline]
    fn offset(&self, d: usize, e: usize, u: usize, r: usize) -> usize {
        debug_assert!(d < 2 && e < 2 && r < 2 && u < self.u_card);
        ((d * 2 + e) * self.u_card + u) * 2 + r
    }

    pub fn u_card(&self) -> usize {
        self.u_card
    }

    /// `p(D = d, E = e, U = u, R = r)`.
    #[inline]
    pub fn get(&self, d: usize, e: usize, u: usize, r: usize) -> f64 {
        self.cells[self.offset(d, e, u, r)]
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }
}

/// Product of the four factors of the generative model, cell by cell.
pub fn full_joint(model: &CausalModel) -> JointTable {
    let k = model.u_card();
    let mut cells = vec![0.0; 8 * k];
    for d in 0..2 {
        for e in 0..2 {
            for u in 0..k {
                for r in 0..2 {
                    cells[((d * 2 + e) * k + u) * 2 + r] = cell(&model.params, d, e, u, r);
                }
            }
        }
    }
    JointTable { u_card: k, cells }
}

/// The identifiable pair `{p(D, E, U, R = 0), p(D, E, R = 1)}`.
pub fn observed_law(model: &CausalModel) -> ObservedLaw {
    let joint = full_joint(model);
    let k = model.u_card();
    let r0 = |d: usize, e: usize| (0..k).map(|u| joint.get(d, e, u, 0)).collect::<Vec<_>>();
    let r1 = |d: usize, e: usize| (0..k).map(|u| joint.get(d, e, u, 1)).sum::<f64>();
    ObservedLaw::from_validated_parts(
        k,
        [[r0(0, 0), r0(0, 1)], [r0(1, 0), r0(1, 1)]],
        [[r1(0, 0), r1(0, 1)], [r1(1, 0), r1(1, 1)]],
    )
}
