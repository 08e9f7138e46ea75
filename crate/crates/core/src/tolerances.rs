//! Thresholds shared by the library checks, the CLI and the acceptance suite.
//!
//! Values marked "regression" were measured on this implementation and frozen;
//! the walk has no published numeric tables to compare against.

/// Σ F_k = 1 after every step of a unitary run.
pub const UNITARITY: f64 = 1e-12;

/// Agreement of the Ω = 0, 1, 2 amplitude sequences.
pub const INTEGER_OMEGA: f64 = 1e-12;

/// Accumulated error of σ²(t) = t for the Markov chain.
pub const MARKOV_VARIANCE: f64 = 1e-10;

/// σ²(2000) / σ²(1000) below this counts as saturated.
pub const SATURATION_RATIO: f64 = 1.15;

/// Accepted band for the log-log growth exponent of resonant runs.
pub const RESONANT_GAMMA: (f64, f64) = (1.8, 2.05);

/// Growth exponent of the Markov chain and its tolerance.
pub const MARKOV_GAMMA: (f64, f64) = (1.0, 0.02);

/// Growth exponent ceiling on the late window of a localized run.
pub const LOCALIZED_GAMMA_MAX: f64 = 0.2;

/// Minimum r² of an exponential localization fit.
pub const LOCALIZATION_R2: f64 = 0.9;

/// Regression: ℓ for 2πΩ = 0.1 at t = 2000, symmetric start.
pub const LOCALIZATION_LENGTH_TWO_PI_0_1: f64 = 2.0528741628;

/// Relative tolerance on [`LOCALIZATION_LENGTH_TWO_PI_0_1`].
pub const LOCALIZATION_LENGTH_REL: f64 = 0.05;

/// Floquet relations along the recursion.
pub const FLOQUET_RECURSION: f64 = 1e-10;

/// Regression: worst three-term residual of transformed Floquet states.
pub const SECOND_ORDER_CHAIN: f64 = 1e-12;

/// Regression: worst relative residual of the five-diagonal form.
pub const ANDERSON_CHAIN: f64 = 1e-12;

/// Residual of sequences generated by the three-term recursion itself.
pub const SECOND_ORDER_CONSTRUCTION: f64 = 1e-12;
