//! One function per subcommand. Each returns a report that prints as text and
//! serializes to JSON at full precision.

use std::fmt;
use std::path::{Path, PathBuf};

use mnar_bounds::sim::{Table1Row, Table2Row};
use mnar_bounds::{
    complete_case, contrast, contrast_bounds, feasible_region, fusion_estimate, multiple_imputation, po_bounds,
    sa_contrast_bounds, sensitivity_grid, tol, true_potential, true_sensitivity_params, CausalModel, ContrastKind,
    Exposure, FeasibleRegion, Interval, Mechanism, ObservedLaw, SensitivityParams, SimConfig,
};
use serde::Serialize;

use crate::error::CliResult;
use crate::formats::{self, AuxiliaryConfounder, Input};
use crate::parallel;

/// Rounds to the two decimals used for display.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

struct Value(f64);

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8.2} ({})", self.0, self.0)
    }
}

struct Range(Interval);

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Interval { lb, ub } = self.0;
        write!(f, "[{lb:.2}, {ub:.2}]  ([{lb}, {ub}])")
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegionReport {
    pub e: usize,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub unconstrained: bool,
}

impl From<FeasibleRegion> for RegionReport {
    fn from(r: FeasibleRegion) -> Self {
        RegionReport { e: r.e.index(), alpha_max: r.alpha_max, beta_min: r.beta_min, unconstrained: r.unconstrained }
    }
}

impl fmt::Display for RegionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unconstrained {
            write!(f, "e={}: unconstrained (no incomplete cases)", self.e)
        } else {
            write!(f, "e={}: alpha in [0, {:.4}], beta in [{:.4}, 1]", self.e, self.alpha_max, self.beta_min)
        }
    }
}

fn regions(law: &ObservedLaw) -> [RegionReport; 2] {
    Exposure::BOTH.map(|e| feasible_region(law, e).into())
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialReport {
    pub e: usize,
    pub truth: Option<f64>,
    pub complete_case: f64,
    pub multiple_imputation: f64,
    pub bounds: Interval,
}

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityReport {
    pub params: SensitivityParams,
    pub bounds: Interval,
    pub regions: [RegionReport; 2],
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub source: &'static str,
    pub contrast: ContrastKind,
    pub truth: Option<f64>,
    pub complete_case: f64,
    pub multiple_imputation: f64,
    pub bounds: Interval,
    pub potentials: [PotentialReport; 2],
    pub sensitivity: Option<SensitivityReport>,
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.contrast.short_name().to_uppercase();
        writeln!(f, "input: {}, contrast: {}", self.source, self.contrast)?;
        if let Some(t) = self.truth {
            writeln!(f, "{:<22}{}", format!("{name}_true"), Value(t))?;
        }
        writeln!(f, "{:<22}{}", format!("{name}_CC"), Value(self.complete_case))?;
        writeln!(f, "{:<22}{}", format!("{name}_MI"), Value(self.multiple_imputation))?;
        writeln!(f, "{:<22}{}", "bounds", Range(self.bounds))?;
        for p in &self.potentials {
            writeln!(f, "{:<22}{}", format!("p(D_{}=1) bounds", p.e), Range(p.bounds))?;
        }
        if let Some(sa) = &self.sensitivity {
            let SensitivityParams { alpha, beta } = sa.params;
            writeln!(f, "sensitivity params      alpha = ({}, {}), beta = ({}, {})", alpha[0], alpha[1], beta[0], beta[1])?;
            writeln!(f, "{:<22}{}", "sensitivity bounds", Range(sa.bounds))?;
            for w in &sa.warnings {
                writeln!(f, "warning: {w}")?;
            }
        }
        Ok(())
    }
}

/// Warnings for parameters outside the data-implied feasible region.
pub fn feasibility_warnings(law: &ObservedLaw, params: &SensitivityParams) -> Vec<String> {
    let mut warnings = Vec::new();
    for e in Exposure::BOTH {
        let region = feasible_region(law, e);
        if region.unconstrained {
            continue;
        }
        let (alpha, beta) = (params.alpha(e), params.beta(e));
        if alpha > region.alpha_max + tol::DERIVED || beta < region.beta_min - tol::DERIVED {
            warnings.push(format!(
                "alpha({0}) = {alpha}, beta({0}) = {beta} outside feasible region: alpha({0}) <= {1} <= beta({0})",
                e.index(),
                region.alpha_max
            ));
        }
    }
    warnings
}

pub fn evaluate(input: &Input, kind: ContrastKind, params: Option<&SensitivityParams>) -> CliResult<EvalReport> {
    let law = input.law();
    let model = input.model();
    let mut potentials = Vec::with_capacity(2);
    for e in Exposure::BOTH {
        potentials.push(PotentialReport {
            e: e.index(),
            truth: model.map(|m| true_potential(m, e)),
            complete_case: complete_case(&law, e),
            multiple_imputation: multiple_imputation(&law, e)?,
            bounds: po_bounds(&law, e).interval,
        });
    }
    let [p0, p1]: [PotentialReport; 2] = potentials.try_into().expect("two exposure levels");
    let truth = match (p1.truth, p0.truth) {
        (Some(t1), Some(t0)) => Some(contrast(kind, t1, t0)?),
        _ => None,
    };
    let sensitivity = match params {
        Some(p) => Some(SensitivityReport {
            params: *p,
            bounds: sa_contrast_bounds(&law, kind, p)?,
            regions: regions(&law),
            warnings: feasibility_warnings(&law, p),
        }),
        None => None,
    };
    Ok(EvalReport {
        source: input.kind(),
        contrast: kind,
        truth,
        complete_case: contrast(kind, p1.complete_case, p0.complete_case)?,
        multiple_imputation: contrast(kind, p1.multiple_imputation, p0.multiple_imputation)?,
        bounds: contrast_bounds(&law, kind)?,
        potentials: [p0, p1],
        sensitivity,
    })
}

/// The built-in income example.
pub fn example(kind: ContrastKind) -> CliResult<EvalReport> {
    evaluate(&Input::Model(CausalModel::income_example()), kind, None)
}

pub fn eval_file(path: &Path, kind: ContrastKind, params: Option<&Path>) -> CliResult<EvalReport> {
    let input = formats::read_input(path)?;
    let params = params.map(formats::read_params).transpose()?;
    evaluate(&input, kind, params.as_ref())
}

/// Sensitivity parameters at which the lower bound is probed.
pub const PROBE: (f64, f64) = (0.4, 0.4);

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub alpha0: f64,
    pub beta1: f64,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaExampleReport {
    pub contrast: ContrastKind,
    pub truth: f64,
    pub true_params: SensitivityParams,
    pub regions: [RegionReport; 2],
    pub bounds_at_true_params: Interval,
    pub assumption_free_bounds: Interval,
    pub probe: ProbeReport,
}

impl fmt::Display for SaExampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let SensitivityParams { alpha, beta } = self.true_params;
        writeln!(f, "contrast: {}", self.contrast)?;
        writeln!(f, "{:<24}{}", "truth", Value(self.truth))?;
        writeln!(f, "{:<24}{}", "alpha(0)", Value(alpha[0]))?;
        writeln!(f, "{:<24}{}", "alpha(1)", Value(alpha[1]))?;
        writeln!(f, "{:<24}{}", "beta(0)", Value(beta[0]))?;
        writeln!(f, "{:<24}{}", "beta(1)", Value(beta[1]))?;
        for r in &self.regions {
            writeln!(f, "feasible region {r}")?;
        }
        writeln!(f, "{:<24}{}", "bounds at true params", Range(self.bounds_at_true_params))?;
        writeln!(f, "{:<24}{}", "assumption-free bounds", Range(self.assumption_free_bounds))?;
        let label = format!("lb at ({}, {})", self.probe.alpha0, self.probe.beta1);
        writeln!(f, "{label:<24}{}", Value(self.probe.lower_bound))
    }
}

/// Lower contrast bound at `alpha(0) = alpha0`, `beta(1) = beta1`; the other
/// two parameters do not enter it.
pub fn lower_bound_at(law: &ObservedLaw, kind: ContrastKind, alpha0: f64, beta1: f64) -> CliResult<f64> {
    let params = SensitivityParams { alpha: [alpha0, 0.0], beta: [1.0, beta1] };
    Ok(sa_contrast_bounds(law, kind, &params)?.lb)
}

pub fn sa_example(kind: ContrastKind) -> CliResult<SaExampleReport> {
    let model = CausalModel::income_example();
    let law = model.observed_law();
    let true_params = true_sensitivity_params(&model)?;
    let truth = contrast(
        kind,
        true_potential(&model, Exposure::Exposed),
        true_potential(&model, Exposure::Unexposed),
    )?;
    Ok(SaExampleReport {
        contrast: kind,
        truth,
        true_params,
        regions: regions(&law),
        bounds_at_true_params: sa_contrast_bounds(&law, kind, &true_params)?,
        assumption_free_bounds: contrast_bounds(&law, kind)?,
        probe: ProbeReport {
            alpha0: PROBE.0,
            beta1: PROBE.1,
            lower_bound: lower_bound_at(&law, kind, PROBE.0, PROBE.1)?,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub contrast: ContrastKind,
    pub resolution: usize,
    pub regions: [RegionReport; 2],
    pub degenerate: bool,
    pub lower_path: PathBuf,
    pub lower_shape: [usize; 2],
    pub upper_path: PathBuf,
    pub upper_shape: [usize; 2],
}

impl fmt::Display for GridReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "contrast: {}, resolution: {}", self.contrast, self.resolution)?;
        for r in &self.regions {
            writeln!(f, "feasible region {r}")?;
        }
        let [a, b] = self.lower_shape;
        writeln!(f, "lower bounds over (alpha0, beta1): {a}x{b} -> {}", self.lower_path.display())?;
        let [a, b] = self.upper_shape;
        writeln!(f, "upper bounds over (alpha1, beta0): {a}x{b} -> {}", self.upper_path.display())?;
        if self.degenerate {
            writeln!(f, "note: some exposure level has no incomplete cases; its axes are a single point")?;
        }
        Ok(())
    }
}

/// Writes the lower and upper sensitivity grids. Without an input file the
/// income example is used.
pub fn grid(
    input: Option<&Path>,
    kind: ContrastKind,
    resolution: usize,
    lower_path: &Path,
    upper_path: &Path,
) -> CliResult<GridReport> {
    let law = match input {
        Some(path) => formats::read_input(path)?.law(),
        None => CausalModel::income_example().observed_law(),
    };
    let grids = sensitivity_grid(&law, kind, resolution)?;
    formats::write_grid_csv(formats::create_file(lower_path)?, &grids.lower)?;
    formats::write_grid_csv(formats::create_file(upper_path)?, &grids.upper)?;
    Ok(GridReport {
        contrast: kind,
        resolution,
        regions: grids.regions.map(Into::into),
        degenerate: grids.degenerate,
        lower_path: lower_path.to_owned(),
        lower_shape: [grids.lower.axis1.len(), grids.lower.axis2.len()],
        upper_path: upper_path.to_owned(),
        upper_shape: [grids.upper.axis1.len(), grids.upper.axis2.len()],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1RowReport {
    pub mechanism: Mechanism,
    pub method: &'static str,
    pub biased: f64,
    pub wrong_log_sign: f64,
    pub out_bounds: f64,
    pub both: f64,
}

impl From<&Table1Row> for Table1RowReport {
    fn from(r: &Table1Row) -> Self {
        Table1RowReport {
            mechanism: r.mechanism,
            method: r.method.name(),
            biased: r.biased,
            wrong_log_sign: r.wrong_log_sign,
            out_bounds: r.out_bounds,
            both: r.both,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub n_draws: u64,
    pub seed: u64,
    pub u_card: usize,
    pub contrast: ContrastKind,
    pub rows: Vec<Table1RowReport>,
    #[serde(skip)]
    pub table: Vec<Table1Row>,
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} draws per mechanism, seed {}, K = {}, percentages", self.n_draws, self.seed, self.u_card)?;
        f.write_str(&formats::format_table1(&self.table))
    }
}

/// Naive-estimator classification table; the CSV goes to `out` if given.
pub fn simulate(config: &SimConfig, mechanisms: &[Mechanism], threads: usize, out: Option<&Path>) -> CliResult<SimulateReport> {
    let table = parallel::table1(config, mechanisms, threads)?;
    if let Some(path) = out {
        formats::write_table1_csv(formats::create_file(path)?, &table)?;
    }
    Ok(SimulateReport {
        n_draws: config.n_draws,
        seed: config.master_seed,
        u_card: config.u_card,
        contrast: config.contrast,
        rows: table.iter().map(Into::into).collect(),
        table,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2RowReport {
    pub factor: f64,
    pub included: f64,
    pub lb_narrower: f64,
    pub ub_narrower: f64,
    pub both_narrower: f64,
}

impl From<&Table2Row> for Table2RowReport {
    fn from(r: &Table2Row) -> Self {
        Table2RowReport {
            factor: r.factor,
            included: r.included,
            lb_narrower: r.lb_narrower,
            ub_narrower: r.ub_narrower,
            both_narrower: r.both_narrower,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SaSimulateReport {
    pub n_draws: u64,
    pub seed: u64,
    pub u_card: usize,
    pub contrast: ContrastKind,
    /// Draws without incomplete cases at some exposure level, left out of the
    /// percentages.
    pub degenerate: u64,
    pub rows: Vec<Table2RowReport>,
    #[serde(skip)]
    pub table: Vec<Table2Row>,
}

impl fmt::Display for SaSimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} draws, seed {}, K = {}, percentages", self.n_draws, self.seed, self.u_card)?;
        if self.degenerate > 0 {
            writeln!(f, "{} degenerate draws excluded", self.degenerate)?;
        }
        f.write_str(&formats::format_table2(&self.table))
    }
}

/// Sensitivity-analysis table under MNAR sampling.
pub fn sa_simulate(config: &SimConfig, factors: &[f64], threads: usize, out: Option<&Path>) -> CliResult<SaSimulateReport> {
    let config = config.with_mechanism(Mechanism::Mnar);
    let (table, tally) = parallel::table2(&config, factors, threads)?;
    if let Some(path) = out {
        formats::write_table2_csv(formats::create_file(path)?, &table)?;
    }
    Ok(SaSimulateReport {
        n_draws: config.n_draws,
        seed: config.master_seed,
        u_card: config.u_card,
        contrast: config.contrast,
        degenerate: tally.degenerate,
        rows: table.iter().map(Into::into).collect(),
        table,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FuseReport {
    pub contrast: ContrastKind,
    pub potentials: [f64; 2],
    pub estimate: f64,
    pub bounds: Interval,
}

impl fmt::Display for FuseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "contrast: {}", self.contrast)?;
        writeln!(f, "{:<22}{}", "p(D_0=1)", Value(self.potentials[0]))?;
        writeln!(f, "{:<22}{}", "p(D_1=1)", Value(self.potentials[1]))?;
        writeln!(f, "{:<22}{}", "fused estimate", Value(self.estimate))?;
        writeln!(f, "{:<22}{}", "bounds", Range(self.bounds))
    }
}

pub fn fuse_law(law: &ObservedLaw, aux: &AuxiliaryConfounder, kind: ContrastKind) -> CliResult<FuseReport> {
    let p0 = fusion_estimate(law, &aux.p_u_given_e, Exposure::Unexposed)?;
    let p1 = fusion_estimate(law, &aux.p_u_given_e, Exposure::Exposed)?;
    Ok(FuseReport {
        contrast: kind,
        potentials: [p0, p1],
        estimate: contrast(kind, p1, p0)?,
        bounds: contrast_bounds(law, kind)?,
    })
}

pub fn fuse(input: &Path, auxiliary: &Path, kind: ContrastKind) -> CliResult<FuseReport> {
    let law = formats::read_input(input)?.law();
    fuse_law(&law, &formats::read_auxiliary(auxiliary)?, kind)
}
