//! Rows of Z(t) against its series approximation at powers of ten.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{z_approx, SeriesTolerance};
use crate::special::{z_oracle, ZOracleConfig};

/// The row set t = 10, 10², …, 10⁸.
pub const TABLE_T: [f64; 8] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8];

/// One row: Z(t), the approximation, and their absolute difference, each
/// value with its own error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub t: f64,
    pub z: f64,
    pub z_err: f64,
    pub approx: f64,
    pub approx_err: f64,
    pub absdiff: f64,
}

impl TableRow {
    /// The larger of the two error estimates.
    pub fn max_error(&self) -> f64 {
        self.z_err.max(self.approx_err)
    }
}

/// Evaluates one row at `t ≥ 10`.
pub fn table_row(t: f64) -> Result<TableRow> {
    let z = z_oracle(t, &ZOracleConfig::default())?;
    let approx = z_approx(t, &SeriesTolerance::default())?;
    Ok(TableRow {
        t,
        z: z.value,
        z_err: z.est_error,
        approx: approx.value,
        approx_err: approx.est_error,
        absdiff: (z.value - approx.value).abs(),
    })
}

/// Evaluates rows for a subset of [`TABLE_T`], keeping the input order.
pub fn table(rows: &[f64]) -> Result<Vec<TableRow>> {
    if let Some(t) = rows.iter().find(|t| !TABLE_T.contains(t)) {
        return Err(Error::domain(
            "table",
            format!("row t = {t} is not a power of ten in [10, 1e8]"),
        ));
    }
    rows.par_iter().map(|&t| table_row(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row() {
        let rows = table(&[10.0]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].z + 1.5491945461810224).abs() < 1e-9);
        assert!((rows[0].approx + 0.998326058632).abs() < 1e-10);
        // reference values to 7 decimals
        assert!((rows[0].z + 1.5491945).abs() < 5e-6);
        assert!((rows[0].approx + 0.9983260).abs() < 5e-6);
        assert!(rows[0].max_error() < 1e-5);
        assert!(table(&[20.0]).is_err());
    }
}
