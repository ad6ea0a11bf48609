//! Numeric tolerances shared across the crate.

use std::sync::OnceLock;

/// Base comparison tolerance for points, residuals and lengths.
pub const TOL: f64 = 1e-9;

/// Tolerance for determinant renormalization of isometries.
pub const DET_TOL: f64 = 1e-12;

/// Slack used when checking foliation interval endpoints.
pub const FOLIATION_SLACK: f64 = 1e-12;

/// Environment variable that overrides [`TOL`] at run time.
pub const TOL_ENV: &str = "HYPSTRETCH_TOL";

/// Effective base tolerance: [`TOL`] unless `HYPSTRETCH_TOL` holds a positive float.
pub fn base_tol() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| parse_tol(std::env::var(TOL_ENV).ok().as_deref()))
}

pub(crate) fn parse_tol(raw: Option<&str>) -> f64 {
    raw.and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
        .unwrap_or(TOL)
}
