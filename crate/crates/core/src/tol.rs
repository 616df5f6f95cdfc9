//! Numeric tolerances shared by every module.

/// Structural tolerance: normalization checks, positivity floor and the
/// mass below which a conditioning event is treated as empty.
pub const STRUCTURAL: f64 = 1e-12;

/// Tolerance for identities that hold exactly in real arithmetic but are
/// reached through several floating-point operations.
pub const DERIVED: f64 = 1e-10;
