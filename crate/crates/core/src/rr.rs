//! The Rogers functions G and H and the Rogers-Ramanujan continued fraction
//! `R(q)` by four independent routes, with coefficient-exact verification of
//! the Rogers identity.
//!
//! ```text
//! R(q) = q^{2/5} / (1 + q^2/(1 + q^4/(1 + ...)))          (continued fraction)
//!      = q^{2/5} H(q)/G(q)                                 (Rogers functions)
//!      = q^{2/5} prod (1-q^{10k-2})(1-q^{10k-8}) / ((1-q^{10k-4})(1-q^{10k-6}))
//!      = q^{2/5} exp[ sum_{p,k} ... ]                      (exponential form)
//!      = q^{2/5} theta4(3tau/2, 5tau) / theta4(tau/2, 5tau)
//! ```
//!
//! The fractional prefactor `q^{2/5}` never enters the formal q-series ring:
//! an [`RRValue`] carries it symbolically next to an integral-power body with
//! constant term 1. Numerically the prefactor is `exp(2 i pi tau/5)`, which
//! is single-valued in `tau`.

use crate::qseries::{one_minus_qk, qs_product, QSeries, QSeriesError, Rat};
use crate::report::{abs_residual, CheckRecord};
use crate::theta::{self, ThetaKind};
use crate::{EvalConfig, EvalError, HalfPlanePoint};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A value of the form `q^{prefactor_exponent} * body`, the prefactor kept
/// exact and outside the body.
#[derive(Debug, Clone, PartialEq)]
pub struct RRValue<B> {
    /// Exact exponent of the `q`-prefactor (`2/5` for `R`).
    pub prefactor_exponent: Rational64,
    /// Integral-power part; as a q-series it has constant term 1.
    pub body: B,
}

impl RRValue<Complex64> {
    /// `q^{prefactor} * body` with the prefactor evaluated as
    /// `exp(i pi tau * prefactor)`.
    pub fn value(&self, tau: HalfPlanePoint) -> Complex64 {
        let e = *self.prefactor_exponent.numer() as f64 / *self.prefactor_exponent.denom() as f64;
        tau.nome_power(e) * self.body
    }
}

fn rr_prefactor() -> Rational64 {
    Rational64::new(2, 5)
}

/// Rogers function `G(q) = sum_{n>=0} q^{2n^2} / (q^2; q^2)_n` as an exact
/// q-series.
pub fn rogers_g(order: usize) -> QSeries {
    rogers_sum(order, |n| 2 * n * n)
}

/// Rogers function `H(q) = sum_{n>=0} q^{2n(n+1)} / (q^2; q^2)_n`.
pub fn rogers_h(order: usize) -> QSeries {
    rogers_sum(order, |n| 2 * n * (n + 1))
}

fn rogers_sum(order: usize, exponent: impl Fn(usize) -> usize) -> QSeries {
    let mut sum = QSeries::zero(order);
    let mut denom = QSeries::one(order); // (q^2; q^2)_n, grown incrementally
    for n in 0.. {
        if exponent(n) > order {
            break;
        }
        if n > 0 {
            denom = denom.mul(&one_minus_qk(2 * n, order));
        }
        let term = QSeries::monomial(Rat::one(), exponent(n), order)
            .mul(&denom.inv().expect("denominator has constant term 1"));
        sum = sum.add(&term);
    }
    sum
}

/// Product form of `G`: `1 / ((q^2; q^{10}) (q^8; q^{10}))`. Together with
/// [`rogers_g`] this *is* the first Rogers-Ramanujan identity, verified
/// coefficient-exactly rather than assumed.
pub fn rogers_g_product(order: usize) -> Result<QSeries, QSeriesError> {
    modulus_ten_product(order, [2, 8])
}

/// Product form of `H`: `1 / ((q^4; q^{10}) (q^6; q^{10}))`.
pub fn rogers_h_product(order: usize) -> Result<QSeries, QSeriesError> {
    modulus_ten_product(order, [4, 6])
}

fn modulus_ten_product(order: usize, residues: [usize; 2]) -> Result<QSeries, QSeriesError> {
    let factors = (0..).flat_map(move |j| {
        residues
            .into_iter()
            .map(move |r| one_minus_qk(10 * j + r, order))
    });
    qs_product(factors, order)?.inv()
}

/// Depth-`depth` convergent of the continued fraction, as an exact rational
/// function expanded to `order`:
/// `body = 1/(1 + q^2/(1 + q^4/(... + q^{2 depth})))`.
///
/// Successive convergents agree to ever-higher order (depth `D` pins at
/// least the first `D` coefficients), so `depth = max(2 * order, 40)` is a
/// comfortable default for order-`order` comparisons.
pub fn rr_cf_formal(depth: usize, order: usize) -> Result<RRValue<QSeries>, QSeriesError> {
    assert!(depth >= 1);
    let mut s = QSeries::one(order);
    for j in (1..=depth).rev() {
        s = QSeries::one(order).add(&QSeries::monomial(Rat::one(), 2 * j, order).mul(&s.inv()?));
    }
    Ok(RRValue {
        prefactor_exponent: rr_prefactor(),
        body: s.inv()?,
    })
}

/// Depth-`depth` convergent evaluated bottom-up at the nome of `tau`.
/// The guard never fires for `|q| < 1` on the positive-measure set the crate
/// targets, but division by a vanishing partial denominator is an error, not
/// a panic.
pub fn rr_cf(
    tau: HalfPlanePoint,
    depth: usize,
) -> Result<RRValue<Complex64>, EvalError> {
    assert!(depth >= 1);
    let q2 = tau.nome() * tau.nome();
    let mut s = Complex64::one();
    // q^{2j} is recomputed per level: carrying a running power down from
    // q^{2 depth} underflows to an unrecoverable 0 for small |q|, whereas an
    // underflowing *single* level is exactly the harmless "level contributes
    // nothing" case.
    for j in (1..=depth).rev() {
        if s.norm() < 1e-280 {
            return Err(EvalError::DivisionByZero);
        }
        s = Complex64::one() + q2.powi(j as i32) / s;
    }
    if s.norm() < 1e-280 {
        return Err(EvalError::DivisionByZero);
    }
    Ok(RRValue {
        prefactor_exponent: rr_prefactor(),
        body: s.inv(),
    })
}

/// The Rogers product, exact:
/// `body = prod_{k>=1} (1-q^{10k-2})(1-q^{10k-8}) / ((1-q^{10k-4})(1-q^{10k-6}))`.
pub fn rr_product_formal(order: usize) -> Result<RRValue<QSeries>, QSeriesError> {
    let num = qs_product(
        (0..).flat_map(|j| [one_minus_qk(10 * j + 2, order), one_minus_qk(10 * j + 8, order)]),
        order,
    )?;
    let den = qs_product(
        (0..).flat_map(|j| [one_minus_qk(10 * j + 4, order), one_minus_qk(10 * j + 6, order)]),
        order,
    )?;
    Ok(RRValue {
        prefactor_exponent: rr_prefactor(),
        body: num.mul(&den.inv()?),
    })
}

/// The Rogers product evaluated numerically.
pub fn rr_product(
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<RRValue<Complex64>, EvalError> {
    let q = tau.nome();
    let q10 = q.powi(10);
    let mut body = Complex64::one();
    let mut base = Complex64::one();
    let mut gate = theta::TailGate::new();
    for _ in 0..cfg.max_terms {
        // factors for k = j+1: exponents 10j + {8, 2, 6, 4}
        let f = (Complex64::one() - base * q.powi(8)) * (Complex64::one() - base * q.powi(2))
            / ((Complex64::one() - base * q.powi(6)) * (Complex64::one() - base * q.powi(4)));
        body *= f;
        if gate.done((f - Complex64::one()).norm(), 1.0, cfg.tol) {
            return Ok(RRValue {
                prefactor_exponent: rr_prefactor(),
                body,
            });
        }
        base *= q10;
    }
    Err(EvalError::NoConvergence {
        terms: cfg.max_terms,
    })
}

/// Which trigonometric family the exponential form uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrExpVariant {
    /// `sum_{p,k} (1/p) [sin^{2p}(pi tau/2) - sin^{2p}(3 pi tau/2)] / sin^{2p}((k+1/2) 5 pi tau)`
    Sin,
    /// The same with every `sin` replaced by `cos` (the `5tau + 1` shift of
    /// the underlying expansion).
    Cos,
}

/// Exponential form of `R`:
/// `R = exp[ 2 i pi tau/5 + sum ... ]`, the double sum resummed over `k` as
/// `sum_k log((1 - x2 y_k)/(1 - x1 y_k))` with `x1 = sin^2(pi tau/2)`,
/// `x2 = sin^2(3 pi tau/2)`, `y_k = 1/sin^2((k+1/2) 5 pi tau)` (sin variant;
/// the cos variant swaps every `sin` for `cos`).
pub fn rr_exp(
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
    variant: RrExpVariant,
) -> Result<RRValue<Complex64>, EvalError> {
    let t = tau.tau();
    let five = tau.scale(5);
    // strip of the underlying theta4(., 5tau) expansion at both arguments
    let r1 = theta::strip_ratio(ThetaKind::Four, t / 2.0, five);
    let r2 = theta::strip_ratio(ThetaKind::Four, 3.0 * t / 2.0, five);
    theta::enforce_strip(r1.max(r2), cfg.strip_policy)?;

    let q = tau.nome();
    let q5 = q.powi(5);
    let q10 = q5 * q5;
    let (x1, x2) = match variant {
        RrExpVariant::Sin => ((PI * t / 2.0).sin().powi(2), (3.0 * PI * t / 2.0).sin().powi(2)),
        RrExpVariant::Cos => ((PI * t / 2.0).cos().powi(2), (3.0 * PI * t / 2.0).cos().powi(2)),
    };
    let mut qodd = q5;
    let mut sum = Complex64::zero();
    let mut gate = theta::TailGate::new();
    let mut converged = false;
    for _ in 0..cfg.max_terms {
        let y = match variant {
            RrExpVariant::Sin => {
                let d = Complex64::one() - qodd;
                -4.0 * qodd / (d * d)
            }
            RrExpVariant::Cos => {
                let d = Complex64::one() + qodd;
                4.0 * qodd / (d * d)
            }
        };
        let term = ((Complex64::one() - x2 * y) / (Complex64::one() - x1 * y)).ln();
        sum += term;
        if gate.done(term.norm(), sum.norm(), cfg.tol) {
            converged = true;
            break;
        }
        qodd *= q10;
    }
    if !converged {
        return Err(EvalError::NoConvergence {
            terms: cfg.max_terms,
        });
    }
    Ok(RRValue {
        prefactor_exponent: rr_prefactor(),
        body: sum.exp(),
    })
}

/// Exact q-series of the exponential form. In terms of the nome the
/// sin-variant summand is
///
/// ```text
/// (1/p) [ q^{(10k+4)p} (1-q)^{2p} - q^{(10k+2)p} (1-q^3)^{2p} ] / (1-q^{10k+5})^{2p}
/// ```
///
/// (the cos variant flips the inner signs). The `q^{(10k+4)p}`/`q^{(10k+2)p}`
/// weights are forced by `sin^2(m pi tau/2) = -(1-q^m)^2/(4 q^m)`; a flat
/// `q^{2p(k+1)}` weight reproduces only the `k = 0` slice and fails against
/// the product form at order 14, so the trigonometric derivation wins.
pub fn rr_exp_formal(
    order: usize,
    variant: RrExpVariant,
) -> Result<RRValue<QSeries>, QSeriesError> {
    let sign = match variant {
        RrExpVariant::Sin => -1i64,
        RrExpVariant::Cos => 1i64,
    };
    let sgn = |k: usize| {
        let mut s = QSeries::one(order);
        if k <= order {
            s = s.add(&QSeries::monomial(Rat::from(num_bigint::BigInt::from(sign)), k, order));
        }
        s
    };
    let mut exponent = QSeries::zero(order);
    let mut k = 0usize;
    while 10 * k + 2 <= order {
        // a_k = q^{10k+4} (1 -+ q)^2 / (1 -+ q^{10k+5})^2
        // b_k = q^{10k+2} (1 -+ q^3)^2 / (1 -+ q^{10k+5})^2
        let den_sq = sgn(10 * k + 5).pow(2).inv()?;
        let a = QSeries::monomial(Rat::one(), 10 * k + 4, order)
            .mul(&sgn(1).pow(2))
            .mul(&den_sq);
        let b = QSeries::monomial(Rat::one(), 10 * k + 2, order)
            .mul(&sgn(3).pow(2))
            .mul(&den_sq);
        // sum_p (a^p - b^p)/p = log(1 - b) - log(1 - a)
        let one = QSeries::one(order);
        exponent = exponent
            .add(&one.sub(&b).log()?)
            .sub(&one.sub(&a).log()?);
        k += 1;
    }
    Ok(RRValue {
        prefactor_exponent: rr_prefactor(),
        body: exponent.exp()?,
    })
}

/// Which theta-quotient expresses `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrQuotientRoute {
    /// `R = q^{2/5} theta4(3 tau/2, 5 tau) / theta4(tau/2, 5 tau)`.
    Theta4,
    /// `R = q^{-3/5} theta1(tau, 5 tau) / theta1(2 tau, 5 tau)`
    /// (body normalized as `q^{-1}` times the quotient).
    LiuTheta1,
}

/// `R` through theta quotients evaluated by the Fourier representation
/// (strip-free); both routes must agree with each other and with the
/// product.
pub fn rr_theta_quotient(
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
    route: RrQuotientRoute,
) -> Result<RRValue<Complex64>, EvalError> {
    let t = tau.tau();
    let five = tau.scale(5);
    let body = match route {
        RrQuotientRoute::Theta4 => {
            theta::theta_fourier(ThetaKind::Four, 1.5 * t, five, cfg)?
                / theta::theta_fourier(ThetaKind::Four, 0.5 * t, five, cfg)?
        }
        RrQuotientRoute::LiuTheta1 => {
            tau.nome_power(-1.0)
                * theta::theta_fourier(ThetaKind::One, t, five, cfg)?
                / theta::theta_fourier(ThetaKind::One, 2.0 * t, five, cfg)?
        }
    };
    Ok(RRValue {
        prefactor_exponent: rr_prefactor(),
        body,
    })
}

/// Modular behaviour of `R`:
///
/// * asserted: `R(tau+1) = e^{2 i pi/5} R(tau)` (the body is a series in
///   `q^2`, so only the prefactor rotates), and its five-fold composition
///   `R(tau+5) = R(tau)`;
/// * report-only: the `-1/tau` display
///   `R(-1/tau) = e^{i pi/5} theta4((tau-2)/10, tau/5) / theta4((tau-4)/10, tau/5)`
///   (arguments read with the stray factor dropped from the printed
///   subscript).
pub fn rr_modular_checks(
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Vec<CheckRecord>, EvalError> {
    let params = format!("tau={tau}");
    let r = |at: HalfPlanePoint| -> Result<Complex64, EvalError> {
        Ok(rr_theta_quotient(at, cfg, RrQuotientRoute::Theta4)?.value(at))
    };
    let base = r(tau)?;
    let shifted = r(tau.translate(1))?;
    let phase = (2.0 * I * PI / 5.0).exp();
    let mut records = vec![CheckRecord::asserted(
        "rr.shift-phase",
        params.clone(),
        shifted,
        phase * base,
        abs_residual(shifted, phase * base),
        1e-9,
    )];

    let five_fold = r(tau.translate(5))?;
    records.push(CheckRecord::asserted(
        "rr.shift-five-fold",
        params.clone(),
        five_fold,
        base,
        abs_residual(five_fold, base),
        1e-8,
    ));

    let t = tau.tau();
    let inv = r(tau.neg_inverse())?;
    let fifth = HalfPlanePoint::new(t / 5.0).expect("tau/5 stays in the half-plane");
    let display = (I * PI / 5.0).exp()
        * theta::theta_fourier(ThetaKind::Four, (t - 2.0) / 10.0, fifth, cfg)?
        / theta::theta_fourier(ThetaKind::Four, (t - 4.0) / 10.0, fifth, cfg)?;
    records.push(CheckRecord::reported(
        "rr.inv-tau-display",
        params,
        inv,
        display,
        abs_residual(inv, display),
    ));
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rat_i64;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn tau(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::from_parts(re, im).unwrap()
    }

    #[test]
    fn rogers_sum_forms_leading_terms() {
        let g = rogers_g(8);
        assert_eq!(g.coeff(0), &Rat::one());
        // H = 1 + q^4 + q^6 + q^8 + ... (n=1 term q^4/(1-q^2))
        let h = rogers_h(8);
        assert_eq!(
            h.coeffs()[..9],
            [1i64, 0, 0, 0, 1, 0, 1, 0, 1].map(rat_i64)
        );
    }

    #[test]
    fn rogers_identities_sum_vs_product() {
        assert_eq!(rogers_g(40), rogers_g_product(40).unwrap());
        assert_eq!(rogers_h(40), rogers_h_product(40).unwrap());
    }

    #[test]
    fn cf_formal_examples() {
        // depth 1: body = 1/(1+q^2)
        let d1 = rr_cf_formal(1, 8).unwrap();
        assert_eq!(
            d1.body.coeffs()[..8],
            [1i64, 0, -1, 0, 1, 0, -1, 0].map(rat_i64)
        );
        // depth 20 and 21 agree through order 20
        let a = rr_cf_formal(20, 24).unwrap().body;
        let b = rr_cf_formal(21, 24).unwrap().body;
        assert_eq!(a.truncated(20), b.truncated(20));
    }

    #[test]
    fn cf_convergent_order_growth() {
        for d in (4..=30).step_by(13) {
            let a = rr_cf_formal(d, d + 4).unwrap().body;
            let b = rr_cf_formal(d + 1, d + 4).unwrap().body;
            assert_eq!(a.truncated(d), b.truncated(d), "depth {d}");
        }
    }

    #[test]
    fn cf_numeric_limit() {
        // q -> 0: body -> 1
        let far = tau(0.0, 30.0);
        let v = rr_cf(far, 8).unwrap();
        assert!((v.body - Complex64::one()).norm() < 1e-20);
    }

    #[test]
    fn product_body_matches_h_over_g_and_cf() {
        let product = rr_product_formal(40).unwrap().body;
        assert_eq!(product.coeff(0), &Rat::one());
        let hg = rogers_h(40).mul(&rogers_g(40).inv().unwrap());
        assert_eq!(product, hg);
        let cf = rr_cf_formal(45, 40).unwrap().body;
        assert_eq!(product, cf);
    }

    #[test]
    fn exp_formal_matches_product() {
        let product = rr_product_formal(30).unwrap().body;
        for variant in [RrExpVariant::Sin, RrExpVariant::Cos] {
            let e = rr_exp_formal(30, variant).unwrap().body;
            assert_eq!(e, product, "{variant:?}");
        }
    }

    #[test]
    fn exp_numeric_matches_product() {
        let t = tau(0.0, 1.2);
        let p = rr_product(t, &cfg()).unwrap().value(t);
        for variant in [RrExpVariant::Sin, RrExpVariant::Cos] {
            let e = rr_exp(t, &cfg(), variant).unwrap().value(t);
            assert!((e - p).norm() <= 1e-9 * p.norm(), "{variant:?}");
        }
        // q -> 0: body -> 1
        let far = rr_exp(tau(0.0, 20.0), &cfg(), RrExpVariant::Sin).unwrap();
        assert!((far.body - Complex64::one()).norm() < 1e-12);
    }

    #[test]
    fn theta_quotient_routes() {
        let t = tau(0.0, 1.5);
        let p = rr_product(t, &cfg()).unwrap().value(t);
        let t4 = rr_theta_quotient(t, &cfg(), RrQuotientRoute::Theta4)
            .unwrap()
            .value(t);
        assert!((t4 - p).norm() <= 1e-10 * p.norm());
        let ti = tau(0.0, 1.0);
        let a = rr_theta_quotient(ti, &cfg(), RrQuotientRoute::Theta4)
            .unwrap()
            .value(ti);
        let b = rr_theta_quotient(ti, &cfg(), RrQuotientRoute::LiuTheta1)
            .unwrap()
            .value(ti);
        assert!((a - b).norm() <= 1e-10 * a.norm());
        // q -> 0: value ~ q^{2/5}
        let far = tau(0.0, 15.0);
        let v = rr_theta_quotient(far, &cfg(), RrQuotientRoute::Theta4)
            .unwrap()
            .value(far);
        assert!((v - far.nome_power(0.4)).norm() <= 1e-10 * far.nome_power(0.4).norm());
    }

    #[test]
    fn cf_numeric_matches_product_deeply() {
        let t = tau(0.0, 1.2);
        let p = rr_product(t, &cfg()).unwrap().value(t);
        let cf = rr_cf(t, 60).unwrap().value(t);
        assert!((cf - p).norm() <= 1e-12 * p.norm());
    }

    #[test]
    fn modular_checks() {
        let recs = rr_modular_checks(tau(0.0, 1.3), &cfg()).unwrap();
        for r in &recs {
            assert!(r.passed(), "{}: {:.3e}", r.identity, r.residual);
        }
        assert_eq!(recs[2].status, crate::report::CheckStatus::Reported);
        // the -1/tau display, read without the stray subscript factor,
        // agrees to rounding; keep it reported but confirm the finding
        assert!(recs[2].residual < 1e-9);
    }
}
