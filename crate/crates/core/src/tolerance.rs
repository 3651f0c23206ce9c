use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative cut for eigenvalue multiplicities and ranks.
    pub rank: f64,
    /// Snap distance for exact integer claims (admissibility).
    pub int_snap: f64,
    /// Snap distance when comparing integers produced by different routes.
    pub route: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-8,
            int_snap: 1e-9,
            route: 1e-6,
        }
    }
}

/// `Some(n)` if `x` lies within `tol` of the integer `n`.
pub fn snap(x: f64, tol: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= tol).then_some(r as i64)
}
