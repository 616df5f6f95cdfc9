//! Bounds on causal contrasts when a categorical confounder is missing not at
//! random.
//!
//! The setting is a binary exposure `E`, a binary outcome `D` and a categorical
//! confounder `U` that is only observed when the missingness indicator `R` is
//! zero. Missingness may depend on `E` and `U` but not on `D`. Under that
//! restriction the crate computes:
//!
//! * assumption-free bounds for `p(D_e = 1)` and for any monotone contrast
//!   between the two potential outcomes ([`bounds`]),
//! * sensitivity-analysis bounds driven by analyst-supplied extremes of the
//!   unrecoverable `p(U | E, R = 1)` ([`sensitivity`]),
//! * the true adjusted estimand and the naive complete-case and
//!   multiple-imputation pseudo-estimands ([`estimands`]),
//! * a seeded random-model sampler and per-draw classifiers for simulation
//!   studies ([`sim`]).
//!
//! Everything operates on population-level probability tables. The crate is
//! `no_std` and only needs `alloc`.
#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod estimands;
pub mod interval;
pub mod law;
pub mod model;
pub mod sensitivity;
pub mod sim;
pub mod tol;

pub use bounds::{contrast_bounds, po_bounds, stratum_extremes, PotentialOutcomeBounds, StratumExtremes};
pub use error::{Error, Result};
pub use estimands::{
    complete_case, contrast, fusion_estimate, imputation_weights, multiple_imputation,
    true_potential, ContrastKind,
};
pub use interval::Interval;
pub use law::{LawTables, ObservedLaw, Query};
pub use model::{full_joint, observed_law, validate_model, CausalModel, Exposure, JointTable, ModelParams};
pub use sensitivity::{
    analyst_params, feasible_region, sa_contrast_bounds, sa_po_bounds, sensitivity_grid,
    true_sensitivity_params, FeasibleRegion, SensitivityGrid, SensitivityGrids, SensitivityParams,
};
pub use sim::{classify, sample_model, ClassificationFlags, DrawSeed, Mechanism, SimConfig};
