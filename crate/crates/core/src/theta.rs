//! Numeric evaluation of the four Jacobi theta functions by three independent
//! representations, and the coefficient family `c_{2p}` by three independent
//! formulas.
//!
//! Representations:
//!
//! * **Fourier** ([`theta_fourier`]) — the defining series, e.g.
//!   `theta4(v,tau) = 1 + 2 sum (-1)^n q^{n^2} cos(2 n pi v)`. Converges for
//!   every `v`; this is the reference oracle for the whole crate.
//! * **Product** ([`theta_product`]) — the infinite products, e.g.
//!   `theta4 = prod (1-q^{2k+2})(1 - 2 q^{2k+1} cos 2 pi v + q^{4k+2})`,
//!   valid in the entire `v`-plane.
//! * **Trigonometric expansion** ([`theta_expansion`]) —
//!   `theta4(v,tau) = theta4(0,tau) exp[sum_p c_{2p}(tau) (sin pi v)^{2p}]`
//!   and its three companions, valid inside a strip of the `v`-plane.
//!
//! The coefficients are
//!
//! ```text
//! c_{2p}(tau) = -(1/p) sum_{k>=0} (sin (k+1/2) pi tau)^{-2p}
//!             = -(1/p) sum_{k>=0} [ -4 q^{2k+1} / (1 - q^{2k+1})^2 ]^p
//! ```
//!
//! ([`c2p_closed`]), with an equivalent factorial-weighted Lambert series
//! ([`c2p_binomial`]) and a nonlinear recursion seeded by theta null values
//! ([`c2p_recursive`]). The closed form is the production path; the recursion
//! is a verification target whose rounding error grows geometrically in `p`.

use crate::qseries::{self, QSeries, Rat};
use crate::{EvalConfig, EvalError, HalfPlanePoint, StripPolicy};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Selector among the four classical theta functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    One,
    Two,
    Three,
    Four,
}

impl ThetaKind {
    pub const ALL: [ThetaKind; 4] = [
        ThetaKind::One,
        ThetaKind::Two,
        ThetaKind::Three,
        ThetaKind::Four,
    ];

    pub fn index(self) -> u8 {
        match self {
            ThetaKind::One => 1,
            ThetaKind::Two => 2,
            ThetaKind::Three => 3,
            ThetaKind::Four => 4,
        }
    }

    /// Period in `v`: 2 for `theta1`/`theta2`, 1 for `theta3`/`theta4`.
    pub fn period(self) -> u8 {
        match self {
            ThetaKind::One | ThetaKind::Two => 2,
            ThetaKind::Three | ThetaKind::Four => 1,
        }
    }

    /// Base point `(a, b)` of the zero lattice: the zeros are
    /// `a + b*tau + m + n*tau` over integers `m, n`.
    pub fn zero_base(self) -> (f64, f64) {
        match self {
            ThetaKind::One => (0.0, 0.0),
            ThetaKind::Two => (0.5, 0.0),
            ThetaKind::Three => (0.5, 0.5),
            ThetaKind::Four => (0.0, 0.5),
        }
    }

    /// Offset added to `v` inside the trigonometric expansion:
    /// `tau/2` for `theta1`/`theta2`, 0 for `theta3`/`theta4`.
    fn strip_shift(self, tau: Complex64) -> Complex64 {
        match self {
            ThetaKind::One | ThetaKind::Two => tau * 0.5,
            ThetaKind::Three | ThetaKind::Four => Complex64::zero(),
        }
    }
}

/// Tail criterion: done once two consecutive terms fall below
/// `tol * (1 + |partial|)`. Two consecutive because the defining series
/// interleave signs and a single small term can be accidental.
pub(crate) struct TailGate {
    below: u8,
}

impl TailGate {
    pub(crate) fn new() -> Self {
        TailGate { below: 0 }
    }

    pub(crate) fn done(&mut self, term: f64, partial: f64, tol: f64) -> bool {
        if term <= tol * (1.0 + partial) {
            self.below += 1;
        } else {
            self.below = 0;
        }
        self.below >= 2
    }
}

/// Scale-relative variant for sums whose value can be far below 1 (the
/// `c_{2p}` family at larger `p`): the cut is measured against the largest
/// magnitude seen, so tiny sums still resolve full relative precision.
pub(crate) struct RelTailGate {
    below: u8,
    scale: f64,
}

impl RelTailGate {
    pub(crate) fn new() -> Self {
        RelTailGate {
            below: 0,
            scale: 0.0,
        }
    }

    pub(crate) fn done(&mut self, term: f64, partial: f64, tol: f64) -> bool {
        self.scale = self.scale.max(term).max(partial);
        if term <= tol * self.scale {
            self.below += 1;
        } else {
            self.below = 0;
        }
        self.below >= 2
    }
}

fn sin_c(z: Complex64) -> Complex64 {
    z.sin()
}

fn cos_c(z: Complex64) -> Complex64 {
    z.cos()
}

// ---------------------------------------------------------------------------
// Fourier representation
// ---------------------------------------------------------------------------

/// Defining Fourier series of `theta_kind(v, tau)`, summed until the tail
/// criterion of `cfg` is met. The reference oracle for everything else.
pub fn theta_fourier(
    kind: ThetaKind,
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    theta_fourier_deriv(kind, 0, v, tau, cfg)
}

/// `d^m/dv^m` of the defining series, term by term. The angular factors
/// `(2n pi)^m` (or `((2n+1) pi)^m`) rotate cos/sin by `m pi/2`; absolute
/// convergence is untouched because `q^{n^2}` dominates any power of `n`.
pub fn theta_fourier_deriv(
    kind: ThetaKind,
    m: u32,
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    Ok(theta_fourier_counted(kind, m, v, tau, cfg)?.0)
}

pub(crate) fn theta_fourier_counted(
    kind: ThetaKind,
    m: u32,
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<(Complex64, usize), EvalError> {
    let t = tau.tau();
    let phase = m as f64 * PI / 2.0; // d^m cos(wv) = w^m cos(wv + m pi/2), same for sin
    let mut sum = Complex64::zero();
    let mut gate = TailGate::new();
    let mut terms;

    if matches!(kind, ThetaKind::Three | ThetaKind::Four) && m == 0 {
        sum = Complex64::one();
    }
    for n in 1.. {
        // theta3/theta4 use q^{n^2} starting at n=1; theta1/theta2 use
        // q^{(n-1/2)^2} starting at n=1 (i.e. the usual n-1 index).
        let term = match kind {
            ThetaKind::Three | ThetaKind::Four => {
                let nf = n as f64;
                let w = 2.0 * nf * PI;
                let qp = (I * PI * t * nf * nf).exp();
                let sign = if kind == ThetaKind::Four && n % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                2.0 * sign * qp * w.powi(m as i32) * cos_c(w * v + phase)
            }
            ThetaKind::One | ThetaKind::Two => {
                let half = n as f64 - 0.5;
                let w = 2.0 * half * PI;
                let qp = (I * PI * t * half * half).exp();
                let sign = if kind == ThetaKind::One && n % 2 == 0 {
                    -1.0
                } else {
                    1.0
                };
                let osc = match kind {
                    ThetaKind::One => sin_c(w * v + phase),
                    _ => cos_c(w * v + phase),
                };
                2.0 * sign * qp * w.powi(m as i32) * osc
            }
        };
        sum += term;
        terms = n;
        if gate.done(term.norm(), sum.norm(), cfg.tol) {
            return Ok((sum, terms));
        }
        if n >= cfg.max_terms {
            return Err(EvalError::NoConvergence { terms });
        }
    }
    unreachable!()
}

/// Theta null value `theta_kind(0, tau)`.
pub fn theta_null(
    kind: ThetaKind,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    theta_fourier(kind, Complex64::zero(), tau, cfg)
}

// ---------------------------------------------------------------------------
// Product representation
// ---------------------------------------------------------------------------

/// Infinite-product representation, valid in the entire `v`-plane:
///
/// ```text
/// theta1 = 2 q^{1/4} sin(pi v) prod (1-q^{2k+2}) (1 - 2 q^{2k+2} cos 2 pi v + q^{4k+4})
/// theta2 = 2 q^{1/4} cos(pi v) prod (1-q^{2k+2}) (1 + 2 q^{2k+2} cos 2 pi v + q^{4k+4})
/// theta3 =                     prod (1-q^{2k+2}) (1 + 2 q^{2k+1} cos 2 pi v + q^{4k+2})
/// theta4 =                     prod (1-q^{2k+2}) (1 - 2 q^{2k+1} cos 2 pi v + q^{4k+2})
/// ```
pub fn theta_product(
    kind: ThetaKind,
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    Ok(theta_product_counted(kind, v, tau, cfg)?.0)
}

pub(crate) fn theta_product_counted(
    kind: ThetaKind,
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<(Complex64, usize), EvalError> {
    let q = tau.nome();
    let q2 = q * q;
    let c2v = cos_c(2.0 * PI * v);
    let (sign, mut qodd): (f64, Complex64) = match kind {
        ThetaKind::One => (-1.0, q2),
        ThetaKind::Two => (1.0, q2),
        ThetaKind::Three => (1.0, q),
        ThetaKind::Four => (-1.0, q),
    };
    let mut qeven = q2; // q^{2k+2}
    let mut prod = match kind {
        ThetaKind::One => 2.0 * tau.nome_power(0.25) * sin_c(PI * v),
        ThetaKind::Two => 2.0 * tau.nome_power(0.25) * cos_c(PI * v),
        _ => Complex64::one(),
    };
    let mut gate = TailGate::new();
    for k in 0..cfg.max_terms {
        let quad = Complex64::one() + sign * 2.0 * qodd * c2v + qodd * qodd;
        let factor = (Complex64::one() - qeven) * quad;
        prod *= factor;
        let dist = (factor - Complex64::one()).norm();
        if gate.done(dist, 1.0, cfg.tol) {
            return Ok((prod, k + 1));
        }
        qodd *= q2;
        qeven *= q2;
    }
    Err(EvalError::NoConvergence {
        terms: cfg.max_terms,
    })
}

// ---------------------------------------------------------------------------
// The c_{2p} family
// ---------------------------------------------------------------------------

/// `y_k = 1 / sin^2((k+1/2) pi tau) = -4 q^{2k+1} / (1 - q^{2k+1})^2`,
/// the building block of every k-sum below. `qodd` must be `q^{2k+1}`.
#[inline]
fn y_from_qodd(qodd: Complex64) -> Complex64 {
    let d = Complex64::one() - qodd;
    -4.0 * qodd / (d * d)
}

/// Closed form
/// `c_{2p}(tau) = -(1/p) sum_{k>=0} [ -4 q^{2k+1}/(1-q^{2k+1})^2 ]^p`.
///
/// The equal reciprocal-sine-power form is asserted against this one in the
/// tests; the q-form is the implementation because it needs no trigonometry
/// of large imaginary arguments.
pub fn c2p_closed(
    p: usize,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    Ok(ksum_y_pow(p, tau, cfg)?.0 * (-1.0 / p as f64))
}

/// `sum_{k>=0} y_k^p` with the tail criterion; also returns the k count.
pub(crate) fn ksum_y_pow(
    p: usize,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<(Complex64, usize), EvalError> {
    debug_assert!(p >= 1);
    let q = tau.nome();
    let q2 = q * q;
    let mut qodd = q;
    let mut sum = Complex64::zero();
    let mut gate = RelTailGate::new();
    for k in 0..cfg.max_terms {
        let term = y_from_qodd(qodd).powi(p as i32);
        sum += term;
        if gate.done(term.norm(), sum.norm(), cfg.tol) {
            return Ok((sum, k + 1));
        }
        qodd *= q2;
    }
    Err(EvalError::NoConvergence {
        terms: cfg.max_terms,
    })
}

/// Exact q-series of `c_{2p}` to the given truncation order:
///
/// ```text
/// c_{2p} = (-1)^{p+1} (4^p / p) sum_{k>=0} q^{(2k+1)p} / (1 - q^{2k+1})^{2p}
/// ```
///
/// expanded with `(1-x)^{-2p} = sum_m C(m+2p-1, 2p-1) x^m`.
pub fn c2p_closed_formal(p: usize, order: usize) -> QSeries {
    assert!(p >= 1);
    let mut coeffs = vec![Rat::zero(); order + 1];
    let lead = Rat::new(
        BigInt::from(4).pow(p as u32) * if p % 2 == 1 { 1 } else { -1 },
        BigInt::from(p),
    );
    let mut k = 0usize;
    loop {
        let base = 2 * k + 1;
        if base * p > order {
            break;
        }
        // q^{base*p} * sum_m C(m+2p-1, 2p-1) q^{base*m}
        let mut m = 0usize;
        loop {
            let e = base * (p + m);
            if e > order {
                break;
            }
            coeffs[e] += &lead * Rat::from(big_binomial(m + 2 * p - 1, 2 * p - 1));
            m += 1;
        }
        k += 1;
    }
    QSeries::new(coeffs)
}

/// Factorial-weighted Lambert form
///
/// ```text
/// c_{2p} = (-1)^{p+1} (2^{2p+1}/(2p)!) sum_{n>=p} ((n+p-1)!/(n-p)!) q^n/(1-q^{2n})
/// ```
///
/// The weight is carried incrementally (`w_p = 4^p/p`,
/// `w_{n+1} = w_n (n+p)/(n-p+1)`), so no factorial ever materializes.
pub fn c2p_binomial(
    p: usize,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    if p < 1 {
        return Err(EvalError::Domain("p must be >= 1"));
    }
    let q = tau.nome();
    let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
    let mut w = 4f64.powi(p as i32) / p as f64;
    let mut qn = q.powi(p as i32);
    let mut q2n = qn * qn;
    let mut sum = Complex64::zero();
    let mut gate = RelTailGate::new();
    for n in p..p + cfg.max_terms {
        if !w.is_finite() {
            return Err(EvalError::Overflow);
        }
        let term = w * qn / (Complex64::one() - q2n);
        sum += term;
        if gate.done(term.norm(), sum.norm(), cfg.tol) {
            return Ok(sign * sum);
        }
        w *= (n + p) as f64 / (n - p + 1) as f64;
        qn *= q;
        q2n *= q * q;
    }
    Err(EvalError::NoConvergence {
        terms: cfg.max_terms,
    })
}

/// Exact q-series counterpart of [`c2p_binomial`], using
/// `q^n/(1-q^{2n}) = sum_{j>=0} q^{n(2j+1)}`.
pub fn c2p_binomial_formal(p: usize, order: usize) -> QSeries {
    assert!(p >= 1);
    let mut coeffs = vec![Rat::zero(); order + 1];
    let sign = BigInt::from(if p % 2 == 1 { 1 } else { -1 });
    // w_n = 2^{2p+1} (n+p-1)! / ((2p)! (n-p)!), started at w_p = 4^p/p
    let mut w = Rat::new(sign * BigInt::from(4).pow(p as u32), BigInt::from(p));
    for n in p..=order {
        let mut e = n;
        while e <= order {
            coeffs[e] += &w;
            e += 2 * n;
        }
        w = w * Rat::new(BigInt::from(n + p), BigInt::from(n - p + 1));
    }
    QSeries::new(coeffs)
}

/// `theta4(0)` as an exact q-series: `1 + 2 sum (-1)^n q^{n^2}`.
pub fn theta4_null_series(order: usize) -> QSeries {
    let mut coeffs = vec![Rat::zero(); order + 1];
    coeffs[0] = Rat::one();
    let mut n = 1usize;
    while n * n <= order {
        coeffs[n * n] = qseries::rat_i64(if n % 2 == 1 { -2 } else { 2 });
        n += 1;
    }
    QSeries::new(coeffs)
}

/// `c_2` as a quotient of theta-null series:
/// `-4 sum (-1)^n n^2 q^{n^2} / (1 + 2 sum (-1)^n q^{n^2})`, i.e. the
/// `theta4''(0) / (2 pi^2 theta4(0))` form with the angular factors
/// cancelled exactly.
pub fn c2_from_theta_nulls_formal(order: usize) -> QSeries {
    let mut num = vec![Rat::zero(); order + 1];
    let mut n = 1usize;
    while n * n <= order {
        let w = -4i64 * (n * n) as i64 * if n % 2 == 1 { -1 } else { 1 };
        num[n * n] = qseries::rat_i64(w);
        n += 1;
    }
    QSeries::new(num)
        .mul(&theta4_null_series(order).inv().expect("constant term is 1"))
}

fn big_binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

/// Which coefficient family a [`CoeffTable`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffFamily {
    /// `c_{2p}`: log-theta expansion coefficients.
    C,
    /// `a_{2p}`: Weierstrass-wp expansion coefficients.
    A,
}

/// The family `{c_{2p}}` (or `{a_{2p}}`) for `p = 1..max_p`, as complex
/// values or as exact q-series.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    pub family: CoeffFamily,
    pub values: CoeffValues,
}

#[derive(Debug, Clone)]
pub enum CoeffValues {
    Numeric {
        tau: HalfPlanePoint,
        per_p: Vec<Complex64>,
    },
    Formal {
        order: usize,
        per_p: Vec<QSeries>,
    },
}

impl CoeffTable {
    pub fn max_p(&self) -> usize {
        match &self.values {
            CoeffValues::Numeric { per_p, .. } => per_p.len(),
            CoeffValues::Formal { per_p, .. } => per_p.len(),
        }
    }

    /// Numeric entry for `1 <= p <= max_p`.
    pub fn numeric(&self, p: usize) -> Option<Complex64> {
        match &self.values {
            CoeffValues::Numeric { per_p, .. } => per_p.get(p - 1).copied(),
            CoeffValues::Formal { .. } => None,
        }
    }

    pub fn formal(&self, p: usize) -> Option<&QSeries> {
        match &self.values {
            CoeffValues::Formal { per_p, .. } => per_p.get(p - 1),
            CoeffValues::Numeric { .. } => None,
        }
    }

    /// `c_{2p}` table through the closed form (the production path).
    pub fn c_closed(
        tau: HalfPlanePoint,
        max_p: usize,
        cfg: &EvalConfig,
    ) -> Result<Self, EvalError> {
        let per_p = (1..=max_p)
            .map(|p| c2p_closed(p, tau, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoeffTable {
            family: CoeffFamily::C,
            values: CoeffValues::Numeric { tau, per_p },
        })
    }

    /// Exact `c_{2p}` table, all entries sharing one truncation order.
    pub fn c_formal(max_p: usize, order: usize) -> Self {
        let per_p = (1..=max_p).map(|p| c2p_closed_formal(p, order)).collect();
        CoeffTable {
            family: CoeffFamily::C,
            values: CoeffValues::Formal { order, per_p },
        }
    }
}

/// `c_{2p}` by marching the nonlinear recursion that the expansion
/// coefficients satisfy, seeded from theta null values:
///
/// ```text
/// b_p       = (2p+2)(2p+1) c_{2p+2} - 4 p^2 c_{2p}
/// (2p+2)(2p+1) b_{p+1} = (4p^2 + c_0) b_p - 6 sum_{0<r<p} b_r b_{p-r}
/// ```
///
/// with seeds
///
/// ```text
/// c_0 = -4 [theta2^4(0) + theta3^4(0)]
/// c_2 = theta4''(0) / (2 pi^2 theta4(0))     (termwise-differentiated series)
/// c_4 = c_2/3 - theta2^4(0) theta3^4(0)/12
/// ```
///
/// Each marching step divides a near-cancelling combination by `(2p+2)(2p+1)`,
/// so relative error grows roughly like `(c/|q|)^p`; treat the output as a
/// verification target for [`c2p_closed`], not as a production path. For
/// `|q|` below about `5e-3` the march loses all significant digits by
/// `p ~ 6` in double precision.
pub fn c2p_recursive(
    tau: HalfPlanePoint,
    max_p: usize,
    cfg: &EvalConfig,
) -> Result<CoeffTable, EvalError> {
    if max_p < 2 {
        return Err(EvalError::Domain("max_p must be >= 2"));
    }
    let seeds = recursion_seeds(tau, cfg).map_err(|_| EvalError::SeedFailure)?;
    let (c0, c2, c4) = (seeds.c0, seeds.c2, seeds.c4);

    let mut c = vec![Complex64::zero(); max_p + 2]; // c[p] = c_{2p}, 1-based
    c[1] = c2;
    c[2] = c4;
    let b = |c: &[Complex64], p: usize| {
        ((2 * p + 2) * (2 * p + 1)) as f64 * c[p + 1] - (4 * p * p) as f64 * c[p]
    };
    for p in 1..max_p {
        let conv: Complex64 = (1..p).map(|r| b(&c, r) * b(&c, p - r)).sum();
        let b_next = (((4 * p * p) as f64 + c0) * b(&c, p) - 6.0 * conv)
            / ((2 * p + 2) * (2 * p + 1)) as f64;
        c[p + 2] =
            (b_next + ((2 * p + 2) * (2 * p + 2)) as f64 * c[p + 1]) / ((2 * p + 4) * (2 * p + 3)) as f64;
    }
    c.truncate(max_p + 1);
    Ok(CoeffTable {
        family: CoeffFamily::C,
        values: CoeffValues::Numeric {
            tau,
            per_p: c[1..].to_vec(),
        },
    })
}

pub(crate) struct RecursionSeeds {
    pub c0: Complex64,
    pub c2: Complex64,
    pub c4: Complex64,
}

pub(crate) fn recursion_seeds(
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<RecursionSeeds, EvalError> {
    let t2 = theta_null(ThetaKind::Two, tau, cfg)?;
    let t3 = theta_null(ThetaKind::Three, tau, cfg)?;
    let t4 = theta_null(ThetaKind::Four, tau, cfg)?;
    let t4dd = theta_fourier_deriv(ThetaKind::Four, 2, Complex64::zero(), tau, cfg)?;
    let c2 = t4dd / (2.0 * PI * PI * t4);
    let t23 = t2.powi(4) * t3.powi(4);
    Ok(RecursionSeeds {
        c0: -4.0 * (t2.powi(4) + t3.powi(4)),
        c2,
        c4: c2 / 3.0 - t23 / 12.0,
    })
}

// ---------------------------------------------------------------------------
// Generating sums  E(x) = sum_{p>=1} c_{2p}(tau) x^p
// ---------------------------------------------------------------------------

/// `sum_{p>=1} c_{2p}(tau) x^p` by the double sum, p outermost: the inner
/// k-sum is evaluated per p until its tail passes the criterion, then the
/// p-series until its own tail does. Converges only for
/// `|x| < |sin(pi tau / 2)|^2`; outside that disk use
/// [`c2p_exponent_logsum`].
pub fn c2p_exponent_psum(
    x: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    Ok(c2p_exponent_psum_counted(x, tau, cfg)?.0)
}

pub(crate) fn c2p_exponent_psum_counted(
    x: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<(Complex64, usize), EvalError> {
    let q = tau.nome();
    let q2 = q * q;
    // Divergence is decided by the k = 0 term of the inner sum.
    if (x * y_from_qodd(q)).norm() >= 1.0 {
        return Err(EvalError::NoConvergence { terms: 0 });
    }
    let mut sum = Complex64::zero();
    let mut gate = TailGate::new();
    let mut total_terms = 0usize;
    for p in 1..=cfg.max_terms {
        let mut inner = Complex64::zero();
        let mut inner_gate = TailGate::new();
        let mut qodd = q;
        let mut converged = false;
        for _ in 0..cfg.max_terms {
            let term = (x * y_from_qodd(qodd)).powi(p as i32);
            inner += term;
            total_terms += 1;
            if inner_gate.done(term.norm(), inner.norm(), cfg.tol) {
                converged = true;
                break;
            }
            qodd *= q2;
        }
        if !converged {
            return Err(EvalError::NoConvergence { terms: total_terms });
        }
        let term_p = -inner / p as f64;
        sum += term_p;
        if gate.done(term_p.norm(), sum.norm(), cfg.tol) {
            return Ok((sum, total_terms));
        }
    }
    Err(EvalError::NoConvergence { terms: total_terms })
}

/// `sum_{p>=1} c_{2p}(tau) x^p = sum_{k>=0} log(1 - x y_k)` with
/// `y_k = 1/sin^2((k+1/2) pi tau)`.
///
/// Swapping the p- and k-sums turns the strip-limited power series into a
/// k-sum that converges for every `x` away from the poles `1/y_k`, which is
/// what the ratio and null-value corollaries need: their arguments
/// (`cos^2(pi tau/2)` and the like) lie outside the power-series disk, where
/// the p-sum is an alternating divergent series but this form still carries
/// the analytic value.
pub fn c2p_exponent_logsum(
    x: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    let q = tau.nome();
    let q2 = q * q;
    let mut qodd = q;
    let mut sum = Complex64::zero();
    let mut gate = TailGate::new();
    for _ in 0..cfg.max_terms {
        let arg = Complex64::one() - x * y_from_qodd(qodd);
        if arg.norm() == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let term = arg.ln();
        sum += term;
        if gate.done(term.norm(), sum.norm(), cfg.tol) {
            return Ok(sum);
        }
        qodd *= q2;
    }
    Err(EvalError::NoConvergence {
        terms: cfg.max_terms,
    })
}

// ---------------------------------------------------------------------------
// Trigonometric expansion
// ---------------------------------------------------------------------------

/// Strip quantity of the expansion: `|sin(pi(v + shift)) / sin(pi tau/2)|`,
/// which must be `< 1` (shift is `tau/2` for `theta1`/`theta2`, 0 for
/// `theta3`/`theta4`).
pub fn strip_ratio(kind: ThetaKind, v: Complex64, tau: HalfPlanePoint) -> f64 {
    let t = tau.tau();
    let w = v + kind.strip_shift(t);
    (sin_c(PI * w) / sin_c(PI * t / 2.0)).norm()
}

pub(crate) fn enforce_strip(ratio: f64, policy: StripPolicy) -> Result<(), EvalError> {
    if policy == StripPolicy::Enforce && ratio >= 1.0 {
        Err(EvalError::OutsideStrip { ratio })
    } else {
        Ok(())
    }
}

/// Trigonometric expansion of the theta functions:
///
/// ```text
/// theta4(v) = theta4(0) exp[ E(sin^2 pi v) ]
/// theta3(v) = theta4(0) exp[ E(cos^2 pi v) ]
/// theta2(v) = theta4(0) e^{i pi (v + tau/4)}       exp[ E(cos^2 pi (v + tau/2)) ]
/// theta1(v) = theta4(0) e^{i pi (v - 1/2 + tau/4)} exp[ E(sin^2 pi (v + tau/2)) ]
/// ```
///
/// with `E(x) = sum_p c_{2p}(tau) x^p` summed per [`c2p_exponent_psum`].
/// Valid in the strips measured by [`strip_ratio`]; the stated strips are
/// sufficient for `theta4`/`theta1` and slightly understate the condition
/// for `theta3`/`theta2` (whose series carry `cos` rather than `sin`), where
/// genuine divergence still surfaces as `NoConvergence`.
pub fn theta_expansion(
    kind: ThetaKind,
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    Ok(theta_expansion_counted(kind, v, tau, cfg)?.0)
}

pub(crate) fn theta_expansion_counted(
    kind: ThetaKind,
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<(Complex64, usize), EvalError> {
    let t = tau.tau();
    enforce_strip(strip_ratio(kind, v, tau), cfg.strip_policy)?;
    let w = v + kind.strip_shift(t);
    let x = match kind {
        ThetaKind::Four | ThetaKind::One => sin_c(PI * w).powi(2),
        ThetaKind::Three | ThetaKind::Two => cos_c(PI * w).powi(2),
    };
    let (exponent, terms) = c2p_exponent_psum_counted(x, tau, cfg)?;
    let prefactor = match kind {
        ThetaKind::Four | ThetaKind::Three => Complex64::one(),
        ThetaKind::Two => (I * PI * (v + t / 4.0)).exp(),
        ThetaKind::One => (I * PI * (v - 0.5 + t / 4.0)).exp(),
    };
    let null = theta_null(ThetaKind::Four, tau, cfg)?;
    Ok((null * prefactor * exponent.exp(), terms))
}

/// The exponent of the Fourier form of `log theta4`:
///
/// ```text
/// log(theta4(v)/theta4(0)) = 4 sum_{n>=1} q^n (sin n pi v)^2 / (n (1 - q^{2n}))
/// ```
///
/// valid for `|Im v| < Im tau / 2`.
pub fn log_theta4_fourier(
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    let ratio = if tau.tau().im > 0.0 {
        2.0 * v.im.abs() / tau.tau().im
    } else {
        f64::INFINITY
    };
    enforce_strip(ratio, cfg.strip_policy)?;
    let q = tau.nome();
    let mut qn = Complex64::one();
    let mut q2n = Complex64::one();
    let q2 = q * q;
    let mut sum = Complex64::zero();
    let mut gate = TailGate::new();
    for n in 1..=cfg.max_terms {
        qn *= q;
        q2n *= q2;
        let s = sin_c(n as f64 * PI * v);
        let term = 4.0 * qn * s * s / (n as f64 * (Complex64::one() - q2n));
        sum += term;
        if gate.done(term.norm(), sum.norm(), cfg.tol) {
            return Ok(sum);
        }
    }
    Err(EvalError::NoConvergence {
        terms: cfg.max_terms,
    })
}

/// Logarithmic derivative `theta'/theta` through the k-sums
///
/// ```text
/// theta4'/theta4 =  4 pi sin 2 pi v sum q^{2k+1}/(1 - 2 q^{2k+1} cos 2 pi v + q^{4k+2})
/// theta3'/theta3 = -4 pi sin 2 pi v sum q^{2k+1}/(1 + 2 q^{2k+1} cos 2 pi v + q^{4k+2})
/// theta2'/theta2 = -pi tan(pi v) - 4 pi sin 2 pi v sum q^{2k+2}/(1 + 2 q^{2k+2} cos 2 pi v + q^{4k+4})
/// theta1'/theta1 =  pi cot(pi v) + 4 pi sin 2 pi v sum q^{2k+2}/(1 - 2 q^{2k+2} cos 2 pi v + q^{4k+4})
/// ```
///
/// The stated strips (`|Im v| < Im tau` for `theta1`/`theta2`,
/// `|Im v| < Im tau/2` for `theta3`/`theta4`) are sufficient conditions;
/// `StripPolicy::Warn` lets callers explore outside them.
pub fn theta_log_derivative(
    kind: ThetaKind,
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Complex64, EvalError> {
    let t = tau.tau();
    let half = match kind {
        ThetaKind::One | ThetaKind::Two => 1.0,
        ThetaKind::Three | ThetaKind::Four => 0.5,
    };
    enforce_strip(v.im.abs() / (half * t.im), cfg.strip_policy)?;

    let prefactor = match kind {
        ThetaKind::One => {
            let s = sin_c(PI * v);
            if s.norm() < 1e-12 {
                return Err(EvalError::PoleAtV);
            }
            PI * cos_c(PI * v) / s
        }
        ThetaKind::Two => {
            let c = cos_c(PI * v);
            if c.norm() < 1e-12 {
                return Err(EvalError::PoleAtV);
            }
            -PI * sin_c(PI * v) / c
        }
        _ => Complex64::zero(),
    };
    let q = tau.nome();
    let q2 = q * q;
    let (sign, mut qk): (f64, Complex64) = match kind {
        ThetaKind::Four => (-1.0, q),
        ThetaKind::Three => (1.0, q),
        ThetaKind::Two => (1.0, q2),
        ThetaKind::One => (-1.0, q2),
    };
    let outer = match kind {
        ThetaKind::Four | ThetaKind::One => 4.0 * PI,
        _ => -4.0 * PI,
    };
    let c2v = cos_c(2.0 * PI * v);
    let s2v = sin_c(2.0 * PI * v);
    let mut sum = Complex64::zero();
    let mut gate = TailGate::new();
    for _ in 0..cfg.max_terms {
        let den = Complex64::one() + sign * 2.0 * qk * c2v + qk * qk;
        if den.norm() == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let term = qk / den;
        sum += term;
        if gate.done(term.norm(), sum.norm(), cfg.tol) {
            return Ok(prefactor + outer * s2v * sum);
        }
        qk *= q2;
    }
    Err(EvalError::NoConvergence {
        terms: cfg.max_terms,
    })
}

/// Theta ratios through the difference-of-powers exponentials, with
/// `w = v + tau/2`:
///
/// ```text
/// theta1/theta2 = -i exp[ E(sin^2 pi w) - E(cos^2 pi w) ]
/// theta3/theta4 =    exp[ E(cos^2 pi v) - E(sin^2 pi v) ]
/// ```
///
/// Returns `(theta1/theta2, theta3/theta4)`, cross-checked against Fourier
/// quotients in the tests. The `-i` comes from the quotient of the
/// `e^{i pi (v - 1/2 + tau/4)}` and `e^{i pi (v + tau/4)}` prefactors.
///
/// The strip check gates on the sufficient conditions of the constituent
/// expansions; the sums themselves run through [`c2p_exponent_logsum`], whose
/// resummed form stays finite right up to (and past) the strip boundary, so
/// `StripPolicy::Ignore` extends the ratios to wherever no pole interferes.
pub fn theta_ratio(
    v: Complex64,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<(Complex64, Complex64), EvalError> {
    let t = tau.tau();
    let sin_half = sin_c(PI * t / 2.0).norm();
    let w = v + t / 2.0;
    let r12 = sin_c(PI * w).norm().max(cos_c(PI * w).norm()) / sin_half;
    let r34 = sin_c(PI * v).norm().max(cos_c(PI * v).norm()) / sin_half;
    enforce_strip(r12, cfg.strip_policy)?;
    enforce_strip(r34, cfg.strip_policy)?;

    let e12 = c2p_exponent_logsum(sin_c(PI * w).powi(2), tau, cfg)?
        - c2p_exponent_logsum(cos_c(PI * w).powi(2), tau, cfg)?;
    let e34 = c2p_exponent_logsum(cos_c(PI * v).powi(2), tau, cfg)?
        - c2p_exponent_logsum(sin_c(PI * v).powi(2), tau, cfg)?;
    Ok((-I * e12.exp(), e34.exp()))
}

/// All independent evaluations of `theta1'(0, tau)`.
#[derive(Debug, Clone, Copy)]
pub struct Theta1PrimeZero {
    /// Termwise-differentiated defining series at `v = 0`.
    pub series: Complex64,
    /// `pi theta2(0) theta3(0) theta4(0)`.
    pub null_product: Complex64,
    /// `pi theta4^3(0) q^{1/4} exp[ sum_p c_{2p} (1 + cos^{2p}(pi tau/2)) ]`,
    /// evaluated by [`c2p_exponent_logsum`] (the p-sum does not converge at
    /// this argument).
    pub exponential: Complex64,
}

impl Theta1PrimeZero {
    /// Largest pairwise discrepancy between the three evaluations.
    pub fn max_discrepancy(&self) -> f64 {
        let ab = (self.series - self.null_product).norm();
        let ac = (self.series - self.exponential).norm();
        let bc = (self.null_product - self.exponential).norm();
        ab.max(ac).max(bc)
    }
}

/// `theta1'(0)` three independent ways; the caller inspects the
/// discrepancies. The sign of the exponential form is fixed so that all
/// three agree (positive for purely imaginary `tau`).
pub fn theta1_prime_zero(
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Theta1PrimeZero, EvalError> {
    let series = theta_fourier_deriv(ThetaKind::One, 1, Complex64::zero(), tau, cfg)?;
    let t2 = theta_null(ThetaKind::Two, tau, cfg)?;
    let t3 = theta_null(ThetaKind::Three, tau, cfg)?;
    let t4 = theta_null(ThetaKind::Four, tau, cfg)?;
    let null_product = PI * t2 * t3 * t4;
    let x = cos_c(PI * tau.tau() / 2.0).powi(2);
    let exponent = c2p_exponent_logsum(Complex64::one(), tau, cfg)?
        + c2p_exponent_logsum(x, tau, cfg)?;
    let exponential = PI * t4.powi(3) * tau.nome_power(0.25) * exponent.exp();
    Ok(Theta1PrimeZero {
        series,
        null_product,
        exponential,
    })
}

/// Which evaluation route [`dedekind_eta`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaRoute {
    /// `eta(tau) = e^{i pi tau/12} prod (1 - q^{2n})` — note `q^2 = e^{2 pi i tau}`
    /// is the standard nome, so this is the classical product.
    Product,
    /// `eta(tau) = 2^{-1/3} e^{i pi tau/12} theta4(0,tau)
    ///             exp[ (1/3) sum_p c_{2p} (1 + cos^{2p}(pi tau/2)) ]`,
    /// evaluated by [`c2p_exponent_logsum`].
    Expansion,
}

/// Dedekind eta by either route; the two must agree.
pub fn dedekind_eta(
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
    route: EtaRoute,
) -> Result<Complex64, EvalError> {
    let lead = tau.nome_power(1.0 / 12.0);
    match route {
        EtaRoute::Product => {
            let q2 = tau.nome() * tau.nome();
            let mut qk = Complex64::one();
            let mut prod = Complex64::one();
            let mut gate = TailGate::new();
            for _ in 0..cfg.max_terms {
                qk *= q2;
                prod *= Complex64::one() - qk;
                if gate.done(qk.norm(), 1.0, cfg.tol) {
                    return Ok(lead * prod);
                }
            }
            Err(EvalError::NoConvergence {
                terms: cfg.max_terms,
            })
        }
        EtaRoute::Expansion => {
            let t4 = theta_null(ThetaKind::Four, tau, cfg)?;
            let x = cos_c(PI * tau.tau() / 2.0).powi(2);
            let exponent = (c2p_exponent_logsum(Complex64::one(), tau, cfg)?
                + c2p_exponent_logsum(x, tau, cfg)?)
                / 3.0;
            Ok(2f64.powf(-1.0 / 3.0) * lead * t4 * exponent.exp())
        }
    }
}
