//! Numerics for the Riemann–Siegel Z function through a cosh-kernel integral
//! representation along the line `Re s = 4`, its staged approximations, the
//! Dirichlet-type series `H(t)`, and phase-based zero counting.

// negated comparisons reject NaN arguments along with out-of-range ones
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod dd;
pub mod error;
pub mod integral;
pub mod phase;
pub mod scan;
pub mod series;
pub mod special;
pub mod table;

pub use error::{Error, Result};

/// The scalar used throughout the crate.
pub type ComplexValue = num_complex::Complex64;

pub use integral::{f_integral, f_staged, z_from_integral, QuadratureConfig};
pub use phase::{h_auto, h_exact, PhaseFactor, PhasePolar};
pub use scan::{c_statistic, count_zeros, phase_count_check, xray_grid, PhaseTrack, ZeroScanReport};
pub use series::{g_series, h_series, z_approx, SeriesTolerance};
pub use special::{z_oracle, ZOracleConfig, ZOracleValue};
pub use table::{table, TableRow, TABLE_T};
