//! Tolerance ladder shared by the numerical routines.

/// Absolute tolerance for the "real", "unit" and "same class" predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Singular values below `RANK_RTOL·σ_max` count as zero.
pub const RANK_RTOL: f64 = 1e-10;

/// Distance from the unit sphere below which nodes and spectra are rejected.
pub const STABILITY_MARGIN: f64 = 1e-8;

/// Eigenvalues at or above `−PSD_TOL` count as nonnegative.
pub const PSD_TOL: f64 = 1e-9;

/// Condition numbers above this raise `IllConditioned`.
pub const ILL_COND: f64 = 1e12;

/// Moduli at or below this count as exactly zero.
pub const NEAR_ZERO: f64 = 1e-300;

/// Inverted factors at or below this modulus raise `PoleHit`.
pub const POLE_TOL: f64 = 1e-12;

/// Floor of the zero test inside product evaluation.
pub const ZERO_EVAL_FLOOR: f64 = 1e-9;

/// Per-coefficient residual accepted when stripping spherical factors.
pub const SPHERICAL_STRIP_TOL: f64 = 1e-8;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;
