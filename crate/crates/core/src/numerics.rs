//! Numerical thresholds shared across modules.

use serde::{Deserialize, Serialize};

/// Tolerances used by the decision procedures. All thresholds are absolute
/// unless noted otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// A form counts as zero when its norm is below `zero_form * |φ|` (|φ| = √7).
    pub zero_form: f64,
    /// Imaginary parts below this are treated as real eigenvalues.
    pub real_eigenvalue: f64,
    /// Singular values below `rank_relative * σ_max` are dropped.
    pub rank_relative: f64,
    /// Entries of integer-sized matrices that must commute (relative to their norm).
    pub commute: f64,
    /// ERP residual counts as vanishing below this.
    pub erp: f64,
    /// Soliton residual counts as vanishing below this.
    pub soliton: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero_form: 1e-10,
            real_eigenvalue: 1e-9,
            rank_relative: 1e-9,
            commute: 1e-9,
            erp: 1e-9,
            soliton: 1e-9,
        }
    }
}

impl Tolerances {
    /// Absolute norm below which a form is considered zero.
    pub fn zero_norm(&self) -> f64 {
        self.zero_form * 7f64.sqrt()
    }
}

/// Number of singular values above `rel * σ_max`, plus the smallest singular value.
pub fn numerical_rank(singular_values: &[f64], rel: f64) -> (usize, f64) {
    let max = singular_values.iter().cloned().fold(0.0, f64::max);
    let min = singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return (0, 0.0);
    }
    let rank = singular_values.iter().filter(|&&s| s > rel * max).count();
    (rank, if min.is_finite() { min } else { 0.0 })
}
