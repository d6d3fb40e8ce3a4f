//! Residual records produced by the identity checks and consumed by the
//! verification CLI, serialized as JSON objects
//! `{identity, params, lhs, rhs, residual, threshold, status}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Outcome class of a single identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    /// Asserted check whose residual met its threshold.
    Pass,
    /// Asserted check whose residual exceeded its threshold, or whose
    /// evaluation errored.
    Fail,
    /// Report-only check: recorded, never asserted. Used for the displayed
    /// relations whose printed form does not hold as stated.
    Reported,
}

/// One evaluated identity: both sides, the residual, and the verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub identity: String,
    pub params: String,
    /// Left-hand side as `[re, im]`.
    pub lhs: [f64; 2],
    /// Right-hand side as `[re, im]`.
    pub rhs: [f64; 2],
    pub residual: f64,
    /// Assertion threshold; absent for report-only entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub status: CheckStatus,
    /// Failure detail (evaluation errors), when any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn parts(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl CheckRecord {
    /// Asserted check: `status` is decided by `residual <= threshold`.
    pub fn asserted(
        identity: impl Into<String>,
        params: impl Into<String>,
        lhs: Complex64,
        rhs: Complex64,
        residual: f64,
        threshold: f64,
    ) -> Self {
        CheckRecord {
            identity: identity.into(),
            params: params.into(),
            lhs: parts(lhs),
            rhs: parts(rhs),
            residual,
            threshold: Some(threshold),
            status: if residual.is_finite() && residual <= threshold {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        }
    }

    /// Report-only check: never fails a run.
    pub fn reported(
        identity: impl Into<String>,
        params: impl Into<String>,
        lhs: Complex64,
        rhs: Complex64,
        residual: f64,
    ) -> Self {
        CheckRecord {
            identity: identity.into(),
            params: params.into(),
            lhs: parts(lhs),
            rhs: parts(rhs),
            residual,
            threshold: None,
            status: CheckStatus::Reported,
            note: None,
        }
    }

    /// A check whose evaluation errored out (always a failure).
    pub fn errored(
        identity: impl Into<String>,
        params: impl Into<String>,
        error: impl std::fmt::Display,
    ) -> Self {
        CheckRecord {
            identity: identity.into(),
            params: params.into(),
            lhs: [f64::NAN, f64::NAN],
            rhs: [f64::NAN, f64::NAN],
            residual: f64::NAN,
            threshold: None,
            status: CheckStatus::Fail,
            note: Some(error.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// `|lhs - rhs| / max(|lhs|, |rhs|, floor)`: the relative residual used by
/// checks whose natural scale is the magnitude of the sides.
pub fn rel_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300)
}

/// Plain `|lhs - rhs|`, for identities asserted near machine zero.
pub fn abs_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_threshold() {
        let one = Complex64::new(1.0, 0.0);
        let r = CheckRecord::asserted("x", "p=1", one, one, 1e-12, 1e-9);
        assert_eq!(r.status, CheckStatus::Pass);
        let r = CheckRecord::asserted("x", "p=1", one, 2.0 * one, 1.0, 1e-9);
        assert_eq!(r.status, CheckStatus::Fail);
        assert!(CheckRecord::reported("x", "", one, one, 1.0).passed());
    }

    #[test]
    fn json_shape() {
        let r = CheckRecord::asserted(
            "period2",
            "p=1 tau=2i",
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            0.0,
            1e-13,
        );
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["identity"], "period2");
        assert_eq!(json["status"], "pass");
        assert_eq!(json["lhs"][0], 0.5);
    }
}
