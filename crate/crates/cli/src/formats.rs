//! JSON inputs and CSV / plain-text outputs.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use mnar_bounds::sim::{Table1Row, Table2Row};
use mnar_bounds::{CausalModel, LawTables, ModelParams, ObservedLaw, SensitivityGrid, SensitivityParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// A full causal model or only its observed law.
#[derive(Debug, Clone)]
pub enum Input {
    Model(CausalModel),
    Law(ObservedLaw),
}

impl Input {
    pub fn law(&self) -> ObservedLaw {
        match self {
            Input::Model(model) => model.observed_law(),
            Input::Law(law) => law.clone(),
        }
    }

    pub fn model(&self) -> Option<&CausalModel> {
        match self {
            Input::Model(model) => Some(model),
            Input::Law(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Input::Model(_) => "model",
            Input::Law(_) => "law",
        }
    }
}

/// Auxiliary `p(U | E)` from another source, `p_u_given_e[e][u]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryConfounder {
    pub p_u_given_e: [Vec<f64>; 2],
}

fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn parse_err(path: &Path, err: impl ToString) -> CliError {
    CliError::Parse { path: path.to_owned(), message: err.to_string() }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| parse_err(path, e))
}

/// Parses a model or law document, telling them apart by their keys.
pub fn parse_input(text: &str, path: &Path) -> CliResult<Input> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_err(path, e))?;
    let has = |key: &str| value.get(key).is_some();
    if has("p_deu_r0") || has("p_de_r1") {
        let tables: LawTables = serde_json::from_value(value).map_err(|e| parse_err(path, e))?;
        Ok(Input::Law(ObservedLaw::try_from(tables)?))
    } else if has("p_u") {
        let params: ModelParams = serde_json::from_value(value).map_err(|e| parse_err(path, e))?;
        Ok(Input::Model(CausalModel::try_from(params)?))
    } else {
        Err(parse_err(path, "expected a model (`p_u`, ...) or a law (`p_deu_r0`, `p_de_r1`)"))
    }
}

pub fn read_input(path: &Path) -> CliResult<Input> {
    parse_input(&read_to_string(path)?, path)
}

/// Reads `{"alpha": [a0, a1], "beta": [b0, b1]}` and checks the ordering.
pub fn read_params(path: &Path) -> CliResult<SensitivityParams> {
    let params: SensitivityParams = read_json(path)?;
    params.validate()?;
    Ok(params)
}

pub fn read_auxiliary(path: &Path) -> CliResult<AuxiliaryConfounder> {
    read_json(path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse { path: path.to_owned(), message: e.to_string() })?;
    fs::write(path, text + "\n").map_err(|source| CliError::Write { path: path.to_owned(), source })
}

pub fn write_model(path: &Path, model: &CausalModel) -> CliResult<()> {
    write_json(path, model.params())
}

pub fn write_law(path: &Path, law: &ObservedLaw) -> CliResult<()> {
    write_json(path, law.tables())
}

/// Opens `path` for buffered writing, replacing any existing file.
pub fn create_file(path: &Path) -> CliResult<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Write { path: path.to_owned(), source })
}

/// `axis1,axis2,value` rows in row-major order. Undefined cells are written
/// as `NaN`.
pub fn write_grid_csv<W: Write>(out: W, grid: &SensitivityGrid) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis1", "axis2", "value"])?;
    for (a, b, v) in grid.cells() {
        w.write_record([a.to_string(), b.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table1_csv<W: Write>(out: W, rows: &[Table1Row]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mechanism", "method", "biased", "wrong_log_sign", "out_bounds", "both"])?;
    for r in rows {
        w.write_record([
            r.mechanism.name().to_string(),
            r.method.name().to_string(),
            r.biased.to_string(),
            r.wrong_log_sign.to_string(),
            r.out_bounds.to_string(),
            r.both.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table2_csv<W: Write>(out: W, rows: &[Table2Row]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["factor", "included", "lb_narrower", "ub_narrower", "both_narrower"])?;
    for r in rows {
        w.write_record([
            r.factor.to_string(),
            r.included.to_string(),
            r.lb_narrower.to_string(),
            r.ub_narrower.to_string(),
            r.both_narrower.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Right-aligns every column after the first `left` ones.
fn aligned(header: &[&str], rows: &[Vec<String>], left: usize) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i < left { format!("{c:<w$}", w = widths[i]) } else { format!("{c:>w$}", w = widths[i]) })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    for r in rows {
        line(r);
    }
    out
}

fn pct(x: f64) -> String {
    if x == 0.0 || x == 100.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.1}")
    }
}

pub fn format_table1(rows: &[Table1Row]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.mechanism.name().to_string(),
                r.method.name().to_string(),
                pct(r.biased),
                pct(r.wrong_log_sign),
                pct(r.out_bounds),
                pct(r.both),
            ]
        })
        .collect();
    aligned(&["Mechanism", "Method", "Biased", "Wrong log-sign", "Out of bounds", "Both"], &body, 2)
}

pub fn format_table2(rows: &[Table2Row]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.factor.to_string(),
                pct(r.included),
                pct(r.lb_narrower),
                pct(r.ub_narrower),
                pct(r.both_narrower),
            ]
        })
        .collect();
    aligned(&["f", "Included", "LB narrower", "UB narrower", "Both narrower"], &body, 0)
}
