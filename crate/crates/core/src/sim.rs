//! Random models and per-draw evaluation for simulation studies.
//!
//! Every draw owns an RNG derived only from `(master_seed, draw index)`, and
//! the per-draw results are folded into integer tallies whose merge is
//! commutative. Any partition of the draw range over workers therefore yields
//! identical totals.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::contrast_bounds;
use crate::error::{Error, Result};
use crate::estimands::{complete_case, multiple_imputation, true_potential, ContrastKind};
use crate::interval::Interval;
use crate::law::ObservedLaw;
use crate::model::{CausalModel, Exposure, ModelParams};
use crate::sensitivity::{analyst_params, sa_contrast_bounds, true_sensitivity_params};
use crate::tol;

/// Missingness mechanism used when sampling `p(R = 1 | E, U)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Mechanism {
    /// One probability shared by every `(e, u)`.
    Mcar,
    /// One probability per exposure level.
    Mar,
    /// One probability per `(e, u)`.
    Mnar,
    /// The fixed ternary table of [`CausalModel::income_example`].
    MnarEx,
}

impl Mechanism {
    pub const ALL: [Mechanism; 4] = [Mechanism::Mcar, Mechanism::Mar, Mechanism::Mnar, Mechanism::MnarEx];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Mcar => "MCAR",
            Mechanism::Mar => "MAR",
            Mechanism::Mnar => "MNAR",
            Mechanism::MnarEx => "MNARex",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidArgument("unknown mechanism, expected MCAR, MAR, MNAR or MNARex"))
    }
}

const EXAMPLE_MISSINGNESS: [[f64; 3]; 2] = [[0.1, 0.95, 0.85], [0.2, 0.8, 0.9]];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_draws: u64,
    pub u_card: usize,
    pub mechanism: Mechanism,
    pub master_seed: u64,
    pub contrast: ContrastKind,
    /// Relative tolerance for declaring a naive estimate biased.
    pub bias_tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_draws: 100_000,
            u_card: 3,
            mechanism: Mechanism::Mnar,
            master_seed: 1,
            contrast: ContrastKind::RiskRatio,
            bias_tol: 1e-9,
        }
    }
}

impl SimConfig {
    pub fn with_mechanism(self, mechanism: Mechanism) -> Self {
        SimConfig { mechanism, ..self }
    }

    pub fn seed(&self, draw: u64) -> DrawSeed {
        DrawSeed { master: self.master_seed, draw }
    }
}

/// Identifies the RNG substream of one draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DrawSeed {
    pub master: u64,
    pub draw: u64,
}

impl DrawSeed {
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.draw);
        rng
    }
}

const MAX_RESAMPLES: usize = 1000;

/// Draws a model with every free parameter uniform on `[0, 1]`; `p(U)` is `K`
/// uniforms normalized by their sum. Draws that violate positivity are
/// rejected and redrawn from the same stream.
pub fn sample_model(seed: DrawSeed, u_card: usize, mechanism: Mechanism) -> Result<CausalModel> {
    if u_card < 2 || (mechanism == Mechanism::MnarEx && u_card != 3) {
        return Err(Error::UnsupportedCardinality { mechanism, u_card });
    }
    let mut rng = seed.rng();
    for _ in 0..MAX_RESAMPLES {
        if let Ok(model) = sample_params(&mut rng, u_card, mechanism).try_into() {
            return Ok(model);
        }
    }
    Err(Error::InvariantViolation("could not sample a model satisfying positivity"))
}

fn sample_params(rng: &mut ChaCha8Rng, k: usize, mechanism: Mechanism) -> ModelParams {
    let mut uniforms = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random::<f64>()).collect() };
    let mut p_u = uniforms(k);
    let total: f64 = p_u.iter().sum();
    p_u.iter_mut().for_each(|p| *p /= total);
    let p_e1_given_u = uniforms(k);
    let p_d1_given_eu = [uniforms(k), uniforms(k)];
    let p_r1_given_eu = match mechanism {
        Mechanism::Mnar => [uniforms(k), uniforms(k)],
        Mechanism::Mar => {
            let r = uniforms(2);
            [vec![r[0]; k], vec![r[1]; k]]
        }
        Mechanism::Mcar => {
            let r = uniforms(1)[0];
            [vec![r; k], vec![r; k]]
        }
        Mechanism::MnarEx => EXAMPLE_MISSINGNESS.map(|row| row.to_vec()),
    };
    ModelParams { u_card: k, p_u, p_e1_given_u, p_d1_given_eu, p_r1_given_eu }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    CompleteCase,
    MultipleImputation,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::CompleteCase, Method::MultipleImputation];

    pub fn name(self) -> &'static str {
        match self {
            Method::CompleteCase => "CC",
            Method::MultipleImputation => "MI",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MethodFlags {
    pub biased: bool,
    pub wrong_log_sign: bool,
    pub out_of_bounds: bool,
    pub both: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassificationFlags {
    pub cc: MethodFlags,
    pub mi: MethodFlags,
}

impl ClassificationFlags {
    pub fn get(&self, method: Method) -> &MethodFlags {
        match method {
            Method::CompleteCase => &self.cc,
            Method::MultipleImputation => &self.mi,
        }
    }
}

fn potentials(f: impl Fn(Exposure) -> Result<f64>) -> Result<(f64, f64)> {
    Ok((f(Exposure::Exposed)?, f(Exposure::Unexposed)?))
}

/// The true contrast of a model.
pub fn true_contrast(model: &CausalModel, kind: ContrastKind) -> Result<f64> {
    let (p1, p0) = potentials(|e| Ok(true_potential(model, e)))?;
    kind.apply(p1, p0)
}

fn check_coverage(bounds: &Interval, truth: f64) -> Result<()> {
    if bounds.contains_within(truth, tol::DERIVED) {
        Ok(())
    } else {
        Err(Error::InvariantViolation("assumption-free bounds exclude the true contrast"))
    }
}

/// Compares the complete-case and multiple-imputation contrasts with the
/// truth and with the assumption-free bounds.
pub fn classify(model: &CausalModel, config: &SimConfig) -> Result<ClassificationFlags> {
    let kind = config.contrast;
    let law = model.observed_law();
    let truth = true_contrast(model, kind)?;
    let bounds = contrast_bounds(&law, kind)?;
    check_coverage(&bounds, truth)?;

    let null = kind.null_value();
    let flags_for = |estimate: f64| {
        let biased = (estimate - truth).abs() > config.bias_tol * truth.abs().max(1.0);
        let wrong_log_sign = (estimate - null) * (truth - null) < 0.0;
        let out_of_bounds = estimate < bounds.lb - tol::STRUCTURAL || estimate > bounds.ub + tol::STRUCTURAL;
        MethodFlags { biased, wrong_log_sign, out_of_bounds, both: wrong_log_sign && out_of_bounds }
    };

    let (cc1, cc0) = potentials(|e| Ok(complete_case(&law, e)))?;
    let (mi1, mi0) = potentials(|e| multiple_imputation(&law, e))?;
    Ok(ClassificationFlags {
        cc: flags_for(kind.apply(cc1, cc0)?),
        mi: flags_for(kind.apply(mi1, mi0)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FlagCounts {
    pub biased: u64,
    pub wrong_log_sign: u64,
    pub out_of_bounds: u64,
    pub both: u64,
}

impl FlagCounts {
    fn record(&mut self, flags: &MethodFlags) {
        self.biased += u64::from(flags.biased);
        self.wrong_log_sign += u64::from(flags.wrong_log_sign);
        self.out_of_bounds += u64::from(flags.out_of_bounds);
        self.both += u64::from(flags.both);
    }

    fn merge(&mut self, other: &FlagCounts) {
        self.biased += other.biased;
        self.wrong_log_sign += other.wrong_log_sign;
        self.out_of_bounds += other.out_of_bounds;
        self.both += other.both;
    }
}

/// Counts of naive-estimator failures over a set of draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Table1Tally {
    pub draws: u64,
    pub cc: FlagCounts,
    pub mi: FlagCounts,
}

impl Table1Tally {
    pub fn record(&mut self, flags: &ClassificationFlags) {
        self.draws += 1;
        self.cc.record(&flags.cc);
        self.mi.record(&flags.mi);
    }

    pub fn merge(mut self, other: Table1Tally) -> Table1Tally {
        self.draws += other.draws;
        self.cc.merge(&other.cc);
        self.mi.merge(&other.mi);
        self
    }

    /// Samples and classifies the draws with indices in `draws`.
    pub fn run(config: &SimConfig, draws: Range<u64>) -> Result<Table1Tally> {
        let mut tally = Table1Tally::default();
        for draw in draws {
            let model = sample_model(config.seed(draw), config.u_card, config.mechanism)?;
            tally.record(&classify(&model, config)?);
        }
        Ok(tally)
    }

    pub fn rows(&self, mechanism: Mechanism) -> [Table1Row; 2] {
        let pct = |n: u64| percentage(n, self.draws);
        Method::ALL.map(|method| {
            let c = match method {
                Method::CompleteCase => &self.cc,
                Method::MultipleImputation => &self.mi,
            };
            Table1Row {
                mechanism,
                method,
                biased: pct(c.biased),
                wrong_log_sign: pct(c.wrong_log_sign),
                out_bounds: pct(c.out_of_bounds),
                both: pct(c.both),
            }
        })
    }
}

fn percentage(n: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * n as f64 / total as f64
    }
}

/// One row of the naive-estimator table, in percent of draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub mechanism: Mechanism,
    pub method: Method,
    pub biased: f64,
    pub wrong_log_sign: f64,
    pub out_bounds: f64,
    pub both: f64,
}

/// Sequential reference run over `0..n_draws` for each mechanism.
pub fn run_table1(config: &SimConfig, mechanisms: &[Mechanism]) -> Result<Vec<Table1Row>> {
    let mut rows = Vec::with_capacity(2 * mechanisms.len());
    for &mechanism in mechanisms {
        let cfg = config.with_mechanism(mechanism);
        rows.extend(Table1Tally::run(&cfg, 0..cfg.n_draws)?.rows(mechanism));
    }
    Ok(rows)
}

/// Sensitivity-analysis outcome of one draw for one analyst factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaOutcome {
    pub included: bool,
    pub lb_narrower: bool,
    pub ub_narrower: bool,
}

/// Evaluates sensitivity bounds at `analyst_params(true params, f)` for each
/// factor. Returns `None` when some exposure level has no incomplete cases,
/// since the true parameters are then undefined.
pub fn evaluate_sensitivity(
    model: &CausalModel,
    kind: ContrastKind,
    factors: &[f64],
) -> Result<Option<Vec<SaOutcome>>> {
    let law: ObservedLaw = model.observed_law();
    if Exposure::BOTH
        .iter()
        .any(|&e| law.missingness_and_exposure(1, e) <= tol::STRUCTURAL)
    {
        return Ok(None);
    }
    let truth = true_contrast(model, kind)?;
    let af = contrast_bounds(&law, kind)?;
    check_coverage(&af, truth)?;
    let true_params = true_sensitivity_params(model)?;

    factors
        .iter()
        .map(|&f| {
            let sa = sa_contrast_bounds(&law, kind, &analyst_params(&true_params, f)?)?;
            let included = sa.contains_within(truth, tol::DERIVED);
            if f >= 1.0 && !included {
                return Err(Error::InvariantViolation(
                    "sensitivity bounds at conservative parameters exclude the true contrast",
                ));
            }
            Ok(SaOutcome {
                included,
                lb_narrower: sa.lb > af.lb + tol::STRUCTURAL,
                ub_narrower: sa.ub < af.ub - tol::STRUCTURAL,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaCounts {
    pub included: u64,
    pub lb_narrower: u64,
    pub ub_narrower: u64,
    pub both_narrower: u64,
}

/// Counts of sensitivity-analysis outcomes per analyst factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table2Tally {
    pub draws: u64,
    /// Draws skipped because some `p(E = e, R = 1)` vanished.
    pub degenerate: u64,
    pub counts: Vec<SaCounts>,
}

impl Table2Tally {
    pub fn new(n_factors: usize) -> Self {
        Table2Tally { draws: 0, degenerate: 0, counts: vec![SaCounts::default(); n_factors] }
    }

    pub fn record(&mut self, outcomes: Option<&[SaOutcome]>) {
        self.draws += 1;
        let Some(outcomes) = outcomes else {
            self.degenerate += 1;
            return;
        };
        for (c, o) in self.counts.iter_mut().zip(outcomes) {
            c.included += u64::from(o.included);
            c.lb_narrower += u64::from(o.lb_narrower);
            c.ub_narrower += u64::from(o.ub_narrower);
            c.both_narrower += u64::from(o.lb_narrower && o.ub_narrower);
        }
    }

    pub fn merge(mut self, other: Table2Tally) -> Table2Tally {
        self.draws += other.draws;
        self.degenerate += other.degenerate;
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            c.included += o.included;
            c.lb_narrower += o.lb_narrower;
            c.ub_narrower += o.ub_narrower;
            c.both_narrower += o.both_narrower;
        }
        self
    }

    pub fn run(config: &SimConfig, factors: &[f64], draws: Range<u64>) -> Result<Table2Tally> {
        let mut tally = Table2Tally::new(factors.len());
        for draw in draws {
            let model = sample_model(config.seed(draw), config.u_card, config.mechanism)?;
            tally.record(evaluate_sensitivity(&model, config.contrast, factors)?.as_deref());
        }
        Ok(tally)
    }

    /// Percentages over the non-degenerate draws.
    pub fn rows(&self, factors: &[f64]) -> Vec<Table2Row> {
        let evaluated = self.draws - self.degenerate;
        factors
            .iter()
            .zip(&self.counts)
            .map(|(&factor, c)| Table2Row {
                factor,
                included: percentage(c.included, evaluated),
                lb_narrower: percentage(c.lb_narrower, evaluated),
                ub_narrower: percentage(c.ub_narrower, evaluated),
                both_narrower: percentage(c.both_narrower, evaluated),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Row {
    pub factor: f64,
    pub included: f64,
    pub lb_narrower: f64,
    pub ub_narrower: f64,
    pub both_narrower: f64,
}

pub const DEFAULT_FACTORS: [f64; 4] = [0.9, 1.0, 1.1, 1.2];

/// Sequential reference run of the sensitivity experiment.
pub fn run_table2(config: &SimConfig, factors: &[f64]) -> Result<Vec<Table2Row>> {
    validate_factors(factors)?;
    Ok(Table2Tally::run(config, factors, 0..config.n_draws)?.rows(factors))
}

pub fn validate_factors(factors: &[f64]) -> Result<()> {
    if factors.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
        return Err(Error::InvalidArgument("analyst factors must be positive and finite"));
    }
    Ok(())
}
