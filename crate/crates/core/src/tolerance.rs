//! Numerical thresholds shared by the pipeline.
//!
//! Every verdict in this crate depends on one of these values, so they are
//! carried explicitly and echoed back in reports.

use serde::{Deserialize, Serialize};

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
pub const DEFAULT_GAP_TOL: f64 = 1e-9;
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;
pub const DEFAULT_TAU: f64 = 1e-10;

/// Relative rank threshold used when none is configured: `eps * max(rows, cols)`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Eigenpair residual bound, relative to the Frobenius norm of `A`.
    pub residual_tol: f64,
    /// Minimum eigenvalue separation, relative to `1 + max |lambda|`.
    pub gap_tol: f64,
    /// Singular values at or below `rank_tol * sigma_max` count as zero.
    /// `None` selects [`default_rank_tol`] for each matrix.
    pub rank_tol: Option<f64>,
    /// Entries at or below `zero_tol * max |v_i|` are structural zeros.
    pub zero_tol: f64,
    /// Orthogonality threshold for `|v . b| <= tau * |v| |b|`.
    pub tau: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual_tol: DEFAULT_RESIDUAL_TOL,
            gap_tol: DEFAULT_GAP_TOL,
            rank_tol: None,
            zero_tol: DEFAULT_ZERO_TOL,
            tau: DEFAULT_TAU,
        }
    }
}

impl Tolerances {
    pub fn rank_tol_for(&self, rows: usize, cols: usize) -> f64 {
        self.rank_tol.unwrap_or_else(|| default_rank_tol(rows, cols))
    }

    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("residual_tol", self.residual_tol),
            ("gap_tol", self.gap_tol),
            ("tau", self.tau),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(crate::Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.zero_tol.is_finite() && self.zero_tol >= 0.0) {
            return Err(crate::Error::InvalidConfig(format!(
                "zero_tol must be nonnegative, got {}",
                self.zero_tol
            )));
        }
        if let Some(r) = self.rank_tol {
            if !(r.is_finite() && r > 0.0) {
                return Err(crate::Error::InvalidConfig(format!("rank_tol must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// Partial tolerance settings, as read from a problem file or environment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl ToleranceOverrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    /// Values set here win over `base`.
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            residual_tol: self.residual_tol.unwrap_or(base.residual_tol),
            gap_tol: self.gap_tol.unwrap_or(base.gap_tol),
            rank_tol: self.rank_tol.or(base.rank_tol),
            zero_tol: self.zero_tol.unwrap_or(base.zero_tol),
            tau: self.tau.unwrap_or(base.tau),
        }
    }
}
