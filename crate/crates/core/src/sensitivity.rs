//! Sensitivity analysis.
//!
//! The analyst supplies `alpha(e)` and `beta(e)`, stand-ins for the smallest
//! and largest entry of the unrecoverable `p(U | E = e, R = 1)`. Since
//! `p(D_e = 1 | E = 1 - e, R = 1)` averages the stratum outcome probabilities
//! of exposure level `e` under `p(U | E = 1 - e, R = 1)`, it lies between
//! `alpha(1 - e) S(e)` and `beta(1 - e) S(e)` with
//! `S(e) = sum_u p(D = 1 | E = e, U = u, R = 0)`, provided the parameters
//! bracket the true extremes.
//!
//! The lower contrast bound depends only on `alpha(0)` and `beta(1)`; the
//! upper one only on `alpha(1)` and `beta(0)`.

use alloc::vec::Vec;

use crate::bounds::{bracket, compose, PotentialOutcomeBounds};
use crate::error::{Error, Result};
use crate::estimands::ContrastKind;
use crate::interval::Interval;
use crate::law::ObservedLaw;
use crate::model::{full_joint, CausalModel, Exposure};
use crate::tol;

/// `(alpha(0), alpha(1))` and `(beta(0), beta(1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SensitivityParams {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl SensitivityParams {
    /// Checks `0 <= alpha(e) <= beta(e) <= 1` for both exposure levels.
    pub fn new(alpha: [f64; 2], beta: [f64; 2]) -> Result<Self> {
        let params = SensitivityParams { alpha, beta };
        params.validate()?;
        Ok(params)
    }

    /// Two-parameter variant: one `alpha` and one `beta` shared by both
    /// exposure levels (the extremes of `p(U | E, R = 1)` over `e` and `u`).
    pub fn shared(alpha: f64, beta: f64) -> Result<Self> {
        SensitivityParams::new([alpha; 2], [beta; 2])
    }

    /// The widest parameters: `alpha = 0`, `beta = 1`.
    pub fn extreme() -> Self {
        SensitivityParams { alpha: [0.0; 2], beta: [1.0; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        for e in 0..2 {
            let (alpha, beta) = (self.alpha[e], self.beta[e]);
            if !(0.0 <= alpha && alpha <= beta && beta <= 1.0) {
                return Err(Error::InvalidSensitivityParams { e, alpha, beta });
            }
        }
        Ok(())
    }

    pub fn alpha(&self, e: Exposure) -> f64 {
        self.alpha[e.index()]
    }

    pub fn beta(&self, e: Exposure) -> f64 {
        self.beta[e.index()]
    }
}

/// Data-implied constraint on the parameters of one exposure level:
/// `alpha(e) <= c(e) <= beta(e)` with
/// `c(e) = min(1, p(D = 1 | E = e, R = 1) / S(e))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleRegion {
    pub e: Exposure,
    pub alpha_max: f64,
    pub beta_min: f64,
    /// No incomplete cases at this exposure level, so nothing constrains the
    /// parameters (and they do not affect any bound).
    pub unconstrained: bool,
}

impl FeasibleRegion {
    pub fn admits_alpha(&self, alpha: f64) -> bool {
        (0.0..=self.alpha_max).contains(&alpha)
    }

    pub fn admits_beta(&self, beta: f64) -> bool {
        (self.beta_min..=1.0).contains(&beta)
    }
}

pub fn feasible_region(law: &ObservedLaw, e: Exposure) -> FeasibleRegion {
    match law.outcome_given_exposure_missing(e) {
        Ok(p_missing) => {
            let c = (p_missing / law.stratum_outcome_sum(e)).min(1.0);
            FeasibleRegion { e, alpha_max: c, beta_min: c, unconstrained: false }
        }
        Err(_) => FeasibleRegion { e, alpha_max: 1.0, beta_min: 0.0, unconstrained: true },
    }
}

/// Extremes of `p(U | E = e, R = 1)`, computed from the full joint.
pub fn true_sensitivity_params(model: &CausalModel) -> Result<SensitivityParams> {
    let joint = full_joint(model);
    let k = model.u_card();
    let mut alpha = [0.0; 2];
    let mut beta = [0.0; 2];
    for e in 0..2 {
        let masses: Vec<f64> = (0..k).map(|u| joint.get(0, e, u, 1) + joint.get(1, e, u, 1)).collect();
        let total: f64 = masses.iter().sum();
        if total <= tol::STRUCTURAL {
            return Err(Error::ZeroConditioningEvent { event: "E=e, R=1", mass: total });
        }
        alpha[e] = masses.iter().fold(f64::INFINITY, |m, &x| m.min(x)) / total;
        beta[e] = masses.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)) / total;
    }
    Ok(SensitivityParams { alpha, beta })
}

/// Perturbs true parameters by an analyst factor `f`:
/// `alpha(e) = min(1, alpha*(e) / f)`, `beta(e) = min(1, beta*(e) f)`.
///
/// With `f < 1` the result may have `alpha(e) > beta(e)`; it is returned as
/// computed since each end of the interval uses only one of the two.
pub fn analyst_params(true_params: &SensitivityParams, f: f64) -> Result<SensitivityParams> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::InvalidArgument("analyst factor must be positive and finite"));
    }
    Ok(SensitivityParams {
        alpha: true_params.alpha.map(|a| (a / f).min(1.0)),
        beta: true_params.beta.map(|b| (b * f).min(1.0)),
    })
}

/// Bounds on `p(D_e = 1)` using `alpha(1 - e) S(e)` and `beta(1 - e) S(e)` for
/// the missing-case term.
///
/// Both ends are capped at one. The lower end can pass one when `alpha(1 - e)`
/// is large relative to `1 / S(e)`; the feasible region limits `alpha(1 - e)`
/// through `S(1 - e)`, not `S(e)`.
pub fn sa_po_bounds(law: &ObservedLaw, e: Exposure, params: &SensitivityParams) -> PotentialOutcomeBounds {
    let s = law.stratum_outcome_sum(e);
    let other = e.other();
    let mut bounds = bracket(law, e, params.alpha(other) * s, params.beta(other) * s);
    bounds.interval.lb = bounds.interval.lb.min(1.0);
    bounds
}

pub fn sa_contrast_bounds(law: &ObservedLaw, kind: ContrastKind, params: &SensitivityParams) -> Result<Interval> {
    compose(
        kind,
        &sa_po_bounds(law, Exposure::Exposed, params),
        &sa_po_bounds(law, Exposure::Unexposed, params),
    )
}

/// One bound evaluated over a rectangle of two sensitivity parameters.
///
/// `values` is row-major: `values[i * axis2.len() + j]` belongs to
/// `(axis1[i], axis2[j])`. Cells where the contrast is indeterminate hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityGrid {
    pub axis1_name: &'static str,
    pub axis2_name: &'static str,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    pub values: Vec<f64>,
}

impl SensitivityGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis2.len() + j]
    }

    /// Iterates `(axis1, axis2, value)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.axis1.iter().enumerate().flat_map(move |(i, &a)| {
            self.axis2.iter().enumerate().map(move |(j, &b)| (a, b, self.get(i, j)))
        })
    }

    /// Indices of the grid point closest to `(x1, x2)`, axis by axis.
    pub fn nearest(&self, x1: f64, x2: f64) -> (usize, usize) {
        (nearest_index(&self.axis1, x1), nearest_index(&self.axis2, x2))
    }
}

fn nearest_index(axis: &[f64], x: f64) -> usize {
    axis.iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (*a - x).abs().total_cmp(&(*b - x).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Lower-bound grid over `(alpha(0), beta(1))` and upper-bound grid over
/// `(alpha(1), beta(0))`, each spanning the feasible regions.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityGrids {
    pub kind: ContrastKind,
    pub lower: SensitivityGrid,
    pub upper: SensitivityGrid,
    pub regions: [FeasibleRegion; 2],
    /// Set when some exposure level has no incomplete cases; the axes of that
    /// level collapse to a single point.
    pub degenerate: bool,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

fn alpha_axis(region: &FeasibleRegion, n: usize) -> Vec<f64> {
    if region.unconstrained {
        alloc::vec![0.0]
    } else {
        linspace(0.0, region.alpha_max, n)
    }
}

fn beta_axis(region: &FeasibleRegion, n: usize) -> Vec<f64> {
    if region.unconstrained {
        alloc::vec![1.0]
    } else {
        linspace(region.beta_min, 1.0, n)
    }
}

pub const DEFAULT_GRID_RESOLUTION: usize = 101;

pub fn sensitivity_grid(law: &ObservedLaw, kind: ContrastKind, resolution: usize) -> Result<SensitivityGrids> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2"));
    }
    let regions = Exposure::BOTH.map(|e| feasible_region(law, e));
    let [r0, r1] = &regions;

    // The lower bound pairs LB(1), which uses alpha(0), with UB(0), which uses beta(1).
    let lower_cell = |alpha0: f64, beta1: f64| {
        let params = SensitivityParams { alpha: [alpha0, 0.0], beta: [1.0, beta1] };
        let b1 = sa_po_bounds(law, Exposure::Exposed, &params);
        let b0 = sa_po_bounds(law, Exposure::Unexposed, &params);
        kind.apply(b1.lb(), b0.ub()).unwrap_or(f64::NAN)
    };
    let upper_cell = |alpha1: f64, beta0: f64| {
        let params = SensitivityParams { alpha: [0.0, alpha1], beta: [beta0, 1.0] };
        let b1 = sa_po_bounds(law, Exposure::Exposed, &params);
        let b0 = sa_po_bounds(law, Exposure::Unexposed, &params);
        kind.apply(b1.ub(), b0.lb()).unwrap_or(f64::NAN)
    };

    let build = |name1, name2, axis1: Vec<f64>, axis2: Vec<f64>, f: &dyn Fn(f64, f64) -> f64| {
        let values = axis1.iter().flat_map(|&a| axis2.iter().map(move |&b| (a, b))).map(|(a, b)| f(a, b)).collect();
        SensitivityGrid { axis1_name: name1, axis2_name: name2, axis1, axis2, values }
    };

    let lower = build("alpha0", "beta1", alpha_axis(r0, resolution), beta_axis(r1, resolution), &lower_cell);
    let upper = build("alpha1", "beta0", alpha_axis(r1, resolution), beta_axis(r0, resolution), &upper_cell);
    Ok(SensitivityGrids {
        kind,
        lower,
        upper,
        regions,
        degenerate: r0.unconstrained || r1.unconstrained,
    })
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use super::*;
    use crate::bounds::{contrast_bounds, po_bounds};

    fn round2(x: f64) -> f64 {
        (x * 100.0).round() / 100.0
    }

    fn example_law() -> ObservedLaw {
        CausalModel::income_example().observed_law()
    }

    #[test]
    fn params_validation() {
        assert!(SensitivityParams::new([0.1, 0.2], [0.5, 0.6]).is_ok());
        assert!(matches!(
            SensitivityParams::new([0.6, 0.2], [0.5, 0.6]),
            Err(Error::InvalidSensitivityParams { e: 0, .. })
        ));
        assert!(SensitivityParams::new([0.1, -0.1], [0.5, 0.6]).is_err());
        assert!(SensitivityParams::new([0.1, 0.1], [0.5, 1.1]).is_err());
        let shared = SensitivityParams::shared(0.1, 0.7).unwrap();
        assert_eq!(shared.alpha, [0.1, 0.1]);
        assert_eq!(shared.beta, [0.7, 0.7]);
    }

    #[test]
    fn example_true_params() {
        let p = true_sensitivity_params(&CausalModel::income_example()).unwrap();
        let got = [p.alpha[0], p.alpha[1], p.beta[0], p.beta[1]].map(round2);
        assert_eq!(got, [0.05, 0.22, 0.82, 0.49]);
        assert!((p.alpha[0] - 0.053_486_150_907_354_34).abs() < 1e-12);
        assert!((p.alpha[1] - 0.219_512_195_121_951_25).abs() < 1e-12);
        assert!((p.beta[0] - 0.816_618_911_174_784_9).abs() < 1e-12);
        assert!((p.beta[1] - 0.487_804_878_048_780_37).abs() < 1e-12);
    }

    #[test]
    fn true_params_of_degenerate_models() {
        let single = CausalModel::new(vec![1.0], vec![0.4], [vec![0.3], vec![0.6]], [vec![0.5], vec![0.2]]).unwrap();
        let p = true_sensitivity_params(&single).unwrap();
        assert_eq!((p.alpha, p.beta), ([1.0; 2], [1.0; 2]));

        let third = 1.0 / 3.0;
        let uniform = CausalModel::new(
            vec![third; 3],
            vec![0.5; 3],
            [vec![0.5; 3], vec![0.5; 3]],
            [vec![0.5; 3], vec![0.5; 3]],
        )
        .unwrap();
        let p = true_sensitivity_params(&uniform).unwrap();
        for v in p.alpha.iter().chain(&p.beta) {
            assert!((v - third).abs() < 1e-15);
        }

        let complete = CausalModel::income_example()
            .with_missingness([vec![0.0; 3], vec![0.0; 3]])
            .unwrap();
        assert!(matches!(true_sensitivity_params(&complete), Err(Error::ZeroConditioningEvent { .. })));
    }

    #[test]
    fn analyst_factor() {
        let truth = SensitivityParams { alpha: [0.05, 0.22], beta: [0.82, 0.49] };
        assert_eq!(analyst_params(&truth, 1.0).unwrap(), truth);
        let conservative = analyst_params(&truth, 1.2).unwrap();
        assert_eq!((conservative.alpha[0] * 1e4).round() / 1e4, 0.0417);
        assert_eq!(analyst_params(&truth, 1.3).unwrap().beta[0], 1.0);
        assert!(analyst_params(&truth, 0.0).is_err());
        assert!(analyst_params(&truth, f64::NAN).is_err());
    }

    #[test]
    fn example_feasible_regions() {
        let law = example_law();
        let r1 = feasible_region(&law, Exposure::Exposed);
        // p(D=1 | E=1, R=1) = 0.0348 / 0.082 and S(1) = 0.8 + 0.3 + 0.2
        assert!((r1.alpha_max - (0.0348 / 0.082) / 1.3).abs() < 1e-12);
        assert_eq!(r1.alpha_max, r1.beta_min);
        assert!(!r1.unconstrained);
        let r0 = feasible_region(&law, Exposure::Unexposed);
        assert!((r0.alpha_max - 0.488_960_053_935_614_26).abs() < 1e-12);
    }

    #[test]
    fn certain_outcome_strata_divide_by_k() {
        // p(D=1 | E=1, U) is close to one in every stratum, so S(1) is close to K.
        let model = CausalModel::new(
            vec![0.2, 0.3, 0.5],
            vec![0.3, 0.5, 0.7],
            [vec![0.4, 0.5, 0.6], vec![1.0 - 1e-9; 3]],
            [vec![0.3, 0.4, 0.5], vec![0.2, 0.6, 0.4]],
        )
        .unwrap();
        let law = model.observed_law();
        let region = feasible_region(&law, Exposure::Exposed);
        let p_missing = law.outcome_given_exposure_missing(Exposure::Exposed).unwrap();
        assert!((region.alpha_max - p_missing / 3.0).abs() < 1e-8);
    }

    #[test]
    fn vacuous_region_without_missingness() {
        let law = CausalModel::income_example()
            .with_missingness([vec![0.0; 3], vec![0.0; 3]])
            .unwrap()
            .observed_law();
        let region = feasible_region(&law, Exposure::Exposed);
        assert!(region.unconstrained);
        assert_eq!((region.alpha_max, region.beta_min), (1.0, 0.0));
        let grids = sensitivity_grid(&law, ContrastKind::RiskRatio, 11).unwrap();
        assert!(grids.degenerate);
        assert_eq!((grids.lower.axis1.len(), grids.lower.axis2.len()), (1, 1));
        let exact = contrast_bounds(&law, ContrastKind::RiskRatio).unwrap();
        assert!((grids.lower.values[0] - exact.lb).abs() < 1e-12);
        assert!((grids.upper.values[0] - exact.ub).abs() < 1e-12);
    }

    #[test]
    fn zero_alpha_loosens_lower_bound() {
        let law = example_law();
        let params = SensitivityParams::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        for e in Exposure::BOTH {
            assert!(sa_po_bounds(&law, e, &params).lb() <= po_bounds(&law, e).lb());
        }
    }

    #[test]
    fn example_sensitivity_interval_at_true_params() {
        let law = example_law();
        let truth = true_sensitivity_params(&CausalModel::income_example()).unwrap();
        let iv = sa_contrast_bounds(&law, ContrastKind::RiskRatio, &truth).unwrap();
        assert!(iv.contains(0.875));
        assert!((iv.lb - 0.627_642_980_935_875_3).abs() < 1e-12);
        assert!((iv.ub - 1.633_617_494_440_326_1).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_uses_only_alpha0_and_beta1() {
        let law = example_law();
        let a = SensitivityParams::new([0.3, 0.0], [1.0, 0.5]).unwrap();
        let b = SensitivityParams::new([0.3, 0.2], [0.9, 0.5]).unwrap();
        let (ia, ib) = (
            sa_contrast_bounds(&law, ContrastKind::RiskRatio, &a).unwrap(),
            sa_contrast_bounds(&law, ContrastKind::RiskRatio, &b).unwrap(),
        );
        assert_eq!(ia.lb, ib.lb);
        assert_ne!(ia.ub, ib.ub);
    }

    #[test]
    fn grid_corners_match_direct_evaluation() {
        let law = example_law();
        let grids = sensitivity_grid(&law, ContrastKind::RiskRatio, 2).unwrap();
        assert!(!grids.degenerate);
        let [r0, r1] = grids.regions;
        for (i, alpha0) in [0.0, r0.alpha_max].into_iter().enumerate() {
            for (j, beta1) in [r1.beta_min, 1.0].into_iter().enumerate() {
                let params = SensitivityParams { alpha: [alpha0, 0.0], beta: [1.0, beta1] };
                let direct = sa_contrast_bounds(&law, ContrastKind::RiskRatio, &params).unwrap();
                assert_eq!(grids.lower.get(i, j), direct.lb);
            }
        }
        for (i, alpha1) in [0.0, r1.alpha_max].into_iter().enumerate() {
            for (j, beta0) in [r0.beta_min, 1.0].into_iter().enumerate() {
                let params = SensitivityParams { alpha: [0.0, alpha1], beta: [beta0, 1.0] };
                let direct = sa_contrast_bounds(&law, ContrastKind::RiskRatio, &params).unwrap();
                assert_eq!(grids.upper.get(i, j), direct.ub);
            }
        }
    }

    #[test]
    fn grid_rejects_low_resolution() {
        assert!(sensitivity_grid(&example_law(), ContrastKind::RiskRatio, 1).is_err());
    }

    #[test]
    fn linspace_hits_endpoints() {
        let xs = linspace(0.2, 0.7, 6);
        assert_eq!(xs.first(), Some(&0.2));
        assert_eq!(xs.last(), Some(&0.7));
        assert_eq!(xs.len(), 6);
    }
}
