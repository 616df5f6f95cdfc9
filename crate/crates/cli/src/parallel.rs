//! Simulation tables computed on a rayon pool.
//!
//! The draw range is cut into fixed-size chunks independent of the thread
//! count. Each chunk is tallied on its own and the integer tallies are summed,
//! so the tables do not depend on how many workers ran.

use std::ops::Range;

use mnar_bounds::sim::{validate_factors, Table1Row, Table1Tally, Table2Row, Table2Tally};
use mnar_bounds::{Mechanism, SimConfig};
use rayon::prelude::*;

use crate::error::CliResult;

pub const CHUNK_DRAWS: u64 = 2048;

/// Environment variable read for the default worker count.
pub const THREADS_ENV: &str = "MNAR_BOUNDS_THREADS";

fn chunks(n_draws: u64) -> Vec<Range<u64>> {
    (0..n_draws.div_ceil(CHUNK_DRAWS))
        .map(|i| i * CHUNK_DRAWS..((i + 1) * CHUNK_DRAWS).min(n_draws))
        .collect()
}

/// `threads == 0` lets rayon pick.
fn pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

pub fn table1(config: &SimConfig, mechanisms: &[Mechanism], threads: usize) -> CliResult<Vec<Table1Row>> {
    let pool = pool(threads)?;
    let mut rows = Vec::with_capacity(2 * mechanisms.len());
    for &mechanism in mechanisms {
        let cfg = config.with_mechanism(mechanism);
        let tallies = pool.install(|| {
            chunks(cfg.n_draws)
                .into_par_iter()
                .map(|range| Table1Tally::run(&cfg, range))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let total = tallies.into_iter().fold(Table1Tally::default(), Table1Tally::merge);
        rows.extend(total.rows(mechanism));
    }
    Ok(rows)
}

pub fn table2(config: &SimConfig, factors: &[f64], threads: usize) -> CliResult<(Vec<Table2Row>, Table2Tally)> {
    validate_factors(factors)?;
    let pool = pool(threads)?;
    let tallies = pool.install(|| {
        chunks(config.n_draws)
            .into_par_iter()
            .map(|range| Table2Tally::run(config, factors, range))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let total = tallies.into_iter().fold(Table2Tally::new(factors.len()), Table2Tally::merge);
    Ok((total.rows(factors), total))
}
