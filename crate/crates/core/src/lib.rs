//! Jacobi theta functions and friends, each computable by several independent
//! representations that are cross-checked against one another.
//!
//! The crate is organised around the trigonometric expansion
//!
//! ```text
//! log( theta4(v,tau) / theta4(0,tau) ) = sum_{p>=1} c_{2p}(tau) (sin pi v)^{2p}
//! ```
//!
//! whose coefficient family `c_{2p}` admits several closed forms (a k-sum over
//! reciprocal powers of `sin (k+1/2) pi tau`, a factorial-weighted Lambert
//! series, a divisor-sum q-series, and a nonlinear recursion). Everything else
//! in the crate is built on top of that family:
//!
//! * [`theta`] — numeric evaluation of `theta1..theta4` by defining Fourier
//!   series, infinite products, and the trigonometric expansion, plus the
//!   `c_{2p}` family itself (numeric and as exact q-series).
//! * [`qseries`] — truncated formal power series in the nome `q` with exact
//!   `BigRational` coefficients: the oracle layer for all formal identity
//!   checks, plus Lambert-series and divisor-sum machinery.
//! * [`modular`] — executable checks of the transformation laws of `c_{2p}`
//!   under `tau -> tau+1`, `tau -> tau+2`, the Landen map `tau -> 2tau`, and
//!   higher-order modular equations.
//! * [`elliptic`] — the Weierstrass `wp` function through its
//!   `sin^{2p}(pi z/2)` expansion with a theta-based oracle, the Jacobi zeta
//!   function, and the complete elliptic integral `K` by the AGM.
//! * [`rr`] — the Rogers functions G and H and the Rogers-Ramanujan continued
//!   fraction by continued-fraction, product, exponential, and theta-quotient
//!   routes.
//! * [`verify`] — a task list of residual checks consumed by the CLI and the
//!   acceptance suite.
//!
//! # Nome convention
//!
//! Throughout the crate the nome is `q = exp(i pi tau)` with `Im tau > 0`,
//! i.e. **half** the `exp(2 pi i tau)` convention used by much of the modular
//! forms literature. Classical references (Whittaker & Watson ch. 21) use the
//! same convention. All fractional powers of `q` (`q^{1/4}`, `q^{1/12}`,
//! `q^{2/5}`, ...) are evaluated as `exp(i pi tau * exponent)`, which is
//! single-valued in `tau` and never touches a branch cut.

pub mod elliptic;
pub mod eval;
pub mod modular;
pub mod qseries;
pub mod report;
pub mod rr;
pub mod theta;
pub mod verify;

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors from numeric evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// A series or product hit the term cap before meeting the tail criterion.
    #[error("no convergence after {terms} terms")]
    NoConvergence { terms: usize },
    /// The argument lies outside the validity strip of the representation.
    /// `ratio` is the strip quantity that must be < 1.
    #[error("argument outside validity strip (ratio {ratio:.6})")]
    OutsideStrip { ratio: f64 },
    /// The evaluation point sits on a pole of the representation
    /// (cot/tan prefactors of the log-derivative forms).
    #[error("evaluation point is a pole of the representation")]
    PoleAtV,
    /// The point is a lattice point, where `wp` has a double pole.
    #[error("evaluation point is a lattice point")]
    PoleAtLatticePoint,
    /// Null-value evaluation for schedule seeds failed.
    #[error("seed evaluation from theta null values failed")]
    SeedFailure,
    /// A quotient form hit a (near-)zero denominator.
    #[error("division by zero in quotient form")]
    DivisionByZero,
    /// An intermediate magnitude left the representable range.
    #[error("intermediate overflow")]
    Overflow,
    /// Invalid input (domain violation).
    #[error("domain error: {0}")]
    Domain(&'static str),
}

/// What to do when an argument violates a representation's validity strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StripPolicy {
    /// Return [`EvalError::OutsideStrip`].
    #[default]
    Enforce,
    /// Evaluate anyway; divergence surfaces as [`EvalError::NoConvergence`].
    /// This is the recommended policy for the log-derivative forms, whose
    /// stated strips are sufficient but not necessary.
    Warn,
    /// Skip the strip check entirely.
    Ignore,
}

/// Truncation and tolerance knobs shared by all numeric evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Series tail threshold: summation stops once two consecutive terms fall
    /// below `tol * (1 + |partial sum|)`. Two consecutive terms because the
    /// defining series interleave signs.
    pub tol: f64,
    /// Hard cap on the number of terms before [`EvalError::NoConvergence`].
    pub max_terms: usize,
    /// Strip handling for expansion-type representations.
    pub strip_policy: StripPolicy,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tol: 1e-14,
            max_terms: 2000,
            strip_policy: StripPolicy::Enforce,
        }
    }
}

impl EvalConfig {
    /// Validating constructor: `tol > 0`, `max_terms >= 8`.
    pub fn new(tol: f64, max_terms: usize, strip_policy: StripPolicy) -> Result<Self, EvalError> {
        if !(tol > 0.0) {
            return Err(EvalError::Domain("tol must be positive"));
        }
        if max_terms < 8 {
            return Err(EvalError::Domain("max_terms must be at least 8"));
        }
        Ok(EvalConfig {
            tol,
            max_terms,
            strip_policy,
        })
    }

    /// Same tolerances with a different strip policy.
    pub fn with_strip_policy(self, strip_policy: StripPolicy) -> Self {
        EvalConfig {
            strip_policy,
            ..self
        }
    }
}

/// A point `tau` in the open upper half-plane; the source of the nome
/// `q = exp(i pi tau)`, which then satisfies `|q| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    tau: Complex64,
}

impl HalfPlanePoint {
    pub fn new(tau: Complex64) -> Result<Self, EvalError> {
        if tau.im > 0.0 && tau.is_finite() {
            Ok(HalfPlanePoint { tau })
        } else {
            Err(EvalError::Domain("tau must have positive imaginary part"))
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self, EvalError> {
        Self::new(Complex64::new(re, im))
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// The nome `q = exp(i pi tau)`.
    pub fn nome(&self) -> Complex64 {
        (Complex64::i() * std::f64::consts::PI * self.tau).exp()
    }

    /// `q^e` for real `e`, evaluated as `exp(i pi tau e)`: single-valued in
    /// `tau`, no branch-cut ambiguity.
    pub fn nome_power(&self, e: f64) -> Complex64 {
        (Complex64::i() * std::f64::consts::PI * self.tau * e).exp()
    }

    /// `tau + n` (translation preserves the half-plane).
    pub fn translate(&self, n: i64) -> Self {
        HalfPlanePoint {
            tau: self.tau + n as f64,
        }
    }

    /// `m tau` for a positive integer `m`.
    pub fn scale(&self, m: u32) -> Self {
        debug_assert!(m > 0);
        HalfPlanePoint {
            tau: self.tau * m as f64,
        }
    }

    /// `-1/tau` (the modular inversion maps the half-plane to itself).
    pub fn neg_inverse(&self) -> Self {
        HalfPlanePoint {
            tau: -self.tau.inv(),
        }
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tau.re == 0.0 {
            write!(f, "{}i", self.tau.im)
        } else {
            write!(f, "{}{:+}i", self.tau.re, self.tau.im)
        }
    }
}

/// Accepts `a+bi`, the pure-imaginary shorthand `bi` (e.g. `2i`, `1.5i`),
/// and bare `i`. `b > 0` is enforced at parse time.
impl FromStr for HalfPlanePoint {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = s
            .strip_suffix('i')
            .ok_or(EvalError::Domain("tau must end in 'i' (e.g. 2i, 0.3+1.2i)"))?;
        // Split the imaginary part off at the last sign that is not an
        // exponent sign and not the leading sign of the real part.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(idx, ch)| {
                (ch == '+' || ch == '-')
                    && !matches!(body.as_bytes()[idx - 1], b'e' | b'E')
            })
            .map(|(idx, _)| idx)
            .last();
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let re: f64 = if re_str.is_empty() {
            0.0
        } else {
            re_str
                .parse()
                .map_err(|_| EvalError::Domain("could not parse real part of tau"))?
        };
        let im: f64 = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => im_str
                .parse()
                .map_err(|_| EvalError::Domain("could not parse imaginary part of tau"))?,
        };
        HalfPlanePoint::from_parts(re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_must_be_in_upper_half_plane() {
        assert!(HalfPlanePoint::from_parts(0.0, 1.0).is_ok());
        assert!(HalfPlanePoint::from_parts(0.3, -1.0).is_err());
        assert!(HalfPlanePoint::from_parts(0.3, 0.0).is_err());
    }

    #[test]
    fn nome_magnitude_below_one() {
        let t = HalfPlanePoint::from_parts(0.7, 0.4).unwrap();
        assert!(t.nome().norm() < 1.0);
    }

    #[test]
    fn parses_tau_shorthand() {
        let t: HalfPlanePoint = "2i".parse().unwrap();
        assert_eq!(t.tau(), Complex64::new(0.0, 2.0));
        let t: HalfPlanePoint = "i".parse().unwrap();
        assert_eq!(t.tau(), Complex64::new(0.0, 1.0));
        let t: HalfPlanePoint = "0.3+1.2i".parse().unwrap();
        assert_eq!(t.tau(), Complex64::new(0.3, 1.2));
        let t: HalfPlanePoint = "-0.5+2i".parse().unwrap();
        assert_eq!(t.tau(), Complex64::new(-0.5, 2.0));
        let t: HalfPlanePoint = "1+i".parse().unwrap();
        assert_eq!(t.tau(), Complex64::new(1.0, 1.0));
        assert!("1-2i".parse::<HalfPlanePoint>().is_err());
        assert!("2".parse::<HalfPlanePoint>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(EvalConfig::new(0.0, 100, StripPolicy::Enforce).is_err());
        assert!(EvalConfig::new(1e-12, 4, StripPolicy::Enforce).is_err());
        assert!(EvalConfig::new(1e-12, 64, StripPolicy::Warn).is_ok());
    }
}
