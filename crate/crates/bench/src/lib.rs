//! Shared fixtures for the criterion benchmarks: representative points that
//! keep the representations honest (strip-interior, near-boundary, and a
//! fast-nome case).

use num_complex::Complex64;
use thetakit::{EvalConfig, HalfPlanePoint};

pub fn config() -> EvalConfig {
    EvalConfig::default()
}

pub fn tau_moderate() -> HalfPlanePoint {
    HalfPlanePoint::from_parts(0.0, 1.0).expect("upper half-plane")
}

pub fn tau_fast() -> HalfPlanePoint {
    HalfPlanePoint::from_parts(0.3, 2.0).expect("upper half-plane")
}

/// Strip-interior point with a mild imaginary part.
pub fn v_interior() -> Complex64 {
    Complex64::new(0.23, 0.08)
}

/// Point close to the expansion strip boundary at `tau = i`, where the
/// p-series earns its keep slowly.
pub fn v_near_boundary() -> Complex64 {
    Complex64::new(0.25, 0.42)
}
