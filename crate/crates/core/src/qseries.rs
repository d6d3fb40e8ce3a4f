//! Truncated formal power series in the nome `q` with exact big-rational
//! coefficients, plus Lambert-series and divisor-sum machinery.
//!
//! This is the oracle layer for every formal identity check in the crate:
//! all arithmetic here is exact, so equality of two series is decisive, not
//! a tolerance judgement. A [`QSeries`] carries its truncation order `N`
//! explicitly and represents the coefficients of `q^0 .. q^N`; arithmetic on
//! operands of different orders truncates to the minimum order.
//!
//! Fractional powers of `q` (the `q^{1/4}`, `q^{1/12}`, `q^{2/5}` prefactors
//! of theta products, the Dedekind eta function, and the Rogers-Ramanujan
//! fraction) never enter this ring: callers factor the prefactor out and
//! compare the integral-power remainder.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

/// Exact coefficient type.
pub type Rat = BigRational;

/// Errors from formal power series operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSeriesError {
    /// Inversion requires a nonzero constant term.
    #[error("cannot invert a series with zero constant term")]
    ZeroConstantTerm,
    /// `exp` requires constant term 0; `log` requires constant term 1.
    #[error("bad constant term {0} (exp needs 0, log needs 1)")]
    BadConstantTerm(String),
    /// Product factors must have constant term 1.
    #[error("product factor does not have constant term 1")]
    NonUnitFactor,
    /// Deserialization met a string that is not an exact rational.
    #[error("malformed rational coefficient: {0}")]
    MalformedCoefficient(String),
}

/// A truncated formal power series `sum_{k=0}^{N} a_k q^k` with exact
/// rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rat>,
}

impl QSeries {
    /// Builds a series from its coefficient list (`coeffs[k]` multiplies
    /// `q^k`); the truncation order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a QSeries holds at least the q^0 term");
        QSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        QSeries {
            coeffs: vec![Rat::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rat::one();
        s
    }

    /// `c * q^k`, truncated at `order` (the monomial vanishes if `k > order`).
    pub fn monomial(c: Rat, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Convenience constructor from small integers, mostly for tests.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        QSeries::new(coeffs.iter().map(|&c| Rat::from(BigInt::from(c))).collect())
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `q^k` (must satisfy `k <= order`).
    pub fn coeff(&self, k: usize) -> &Rat {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the lowest nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Restriction to a smaller (or equal) truncation order.
    pub fn truncated(&self, order: usize) -> Self {
        let n = order.min(self.order());
        QSeries {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    fn min_order(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    /// Coefficientwise sum, truncated at the minimum of the two orders.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.min_order(other);
        QSeries {
            coeffs: (0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.min_order(other);
        QSeries {
            coeffs: (0..=n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product, truncated at the minimum of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.min_order(other);
        let mut out = vec![Rat::zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs: out }
    }

    /// Multiplicative inverse `b` with `self * b = 1` up to the order.
    pub fn inv(&self) -> Result<Self, QSeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(QSeriesError::ZeroConstantTerm);
        }
        let n = self.order();
        let mut out = vec![Rat::zero(); n + 1];
        out[0] = a0.recip();
        for k in 1..=n {
            let mut acc = Rat::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out[k - j];
                }
            }
            out[k] = -acc / a0;
        }
        Ok(QSeries { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self, QSeriesError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Formal exponential; requires constant term 0.
    ///
    /// Uses the derivative recurrence `n b_n = sum_{k=1}^{n} k a_k b_{n-k}`.
    pub fn exp(&self) -> Result<Self, QSeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(QSeriesError::BadConstantTerm(self.coeffs[0].to_string()));
        }
        let n = self.order();
        let mut out = vec![Rat::zero(); n + 1];
        out[0] = Rat::one();
        for m in 1..=n {
            let mut acc = Rat::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += Rat::from(BigInt::from(k)) * &self.coeffs[k] * &out[m - k];
                }
            }
            out[m] = acc / Rat::from(BigInt::from(m));
        }
        Ok(QSeries { coeffs: out })
    }

    /// Formal logarithm; requires constant term 1.
    ///
    /// Inverse recurrence of [`QSeries::exp`]:
    /// `b_n = a_n - (1/n) sum_{k=1}^{n-1} k b_k a_{n-k}`.
    pub fn log(&self) -> Result<Self, QSeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(QSeriesError::BadConstantTerm(self.coeffs[0].to_string()));
        }
        let n = self.order();
        let mut out = vec![Rat::zero(); n + 1];
        for m in 1..=n {
            let mut acc = Rat::zero();
            for k in 1..m {
                if !out[k].is_zero() && !self.coeffs[m - k].is_zero() {
                    acc += Rat::from(BigInt::from(k)) * &out[k] * &self.coeffs[m - k];
                }
            }
            out[m] = &self.coeffs[m] - acc / Rat::from(BigInt::from(m));
        }
        Ok(QSeries { coeffs: out })
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QSeries::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Coefficients rendered as exact rational strings in lowest terms
    /// (`"3/2"`, integers without the `/1`), index = exponent. This is the
    /// JSON wire format used by golden-file tests and the CLI.
    pub fn to_rational_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_rational_strings(strings: &[String]) -> Result<Self, QSeriesError> {
        if strings.is_empty() {
            return Err(QSeriesError::MalformedCoefficient("<empty>".into()));
        }
        let coeffs = strings
            .iter()
            .map(|s| {
                s.parse::<Rat>()
                    .map_err(|_| QSeriesError::MalformedCoefficient(s.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QSeries::new(coeffs))
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_rational_strings().join(", "))
    }
}

impl serde::Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rational_strings().serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        QSeries::from_rational_strings(&strings).map_err(serde::de::Error::custom)
    }
}

/// Product of a stream of factors of increasing valuation, truncated at
/// `order`.
///
/// Each factor must have constant term 1; the stream is consumed until a
/// factor's valuation exceeds `order` (such a factor, and by the increasing-
/// valuation contract all later ones, cannot alter coefficients up to
/// `order`). A factor with no nonconstant term (valuation `None`) also stops
/// consumption.
pub fn qs_product<I>(factors: I, order: usize) -> Result<QSeries, QSeriesError>
where
    I: IntoIterator<Item = QSeries>,
{
    let mut acc = QSeries::one(order);
    for factor in factors {
        if !factor.coeff(0).is_one() {
            return Err(QSeriesError::NonUnitFactor);
        }
        let tail = factor.sub(&QSeries::one(factor.order()));
        match tail.valuation() {
            Some(v) if v <= order => acc = acc.mul(&factor.truncated(order)),
            _ => break,
        }
    }
    Ok(acc)
}

/// `1 - c q^k`, truncated at `order`.
pub fn one_minus_cqk(c: Rat, k: usize, order: usize) -> QSeries {
    QSeries::one(order).sub(&QSeries::monomial(c, k, order))
}

/// `1 - q^k`, truncated at `order`.
pub fn one_minus_qk(k: usize, order: usize) -> QSeries {
    one_minus_cqk(Rat::one(), k, order)
}

/// The divisors of `n`, found by trial division up to `sqrt(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTable {
    n: u64,
    entries: Vec<(u64, u64)>,
}

impl DivisorTable {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "divisors are defined for positive integers");
        let mut entries = Vec::new();
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                entries.push((d, n / d));
                if d != n / d {
                    entries.push((n / d, d));
                }
            }
            d += 1;
        }
        entries.sort_unstable();
        DivisorTable { n, entries }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Pairs `(d, n/d)` over all divisors `d` of `n`, each exactly once,
    /// sorted by `d`.
    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn divisors(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(d, _)| d)
    }
}

/// Which denominator the Lambert series uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambertMode {
    /// `sum a_n q^n / (1 - q^n) = sum A_n q^n` with `A_n = sum_{d|n} a_d`.
    Minus,
    /// `sum a_n q^n / (1 + q^n) = sum B_n q^n` with
    /// `B_n = sum_{d|n} (-1)^{n/d - 1} a_d`.
    Plus,
}

/// Expands `sum_{n>=1} a_n q^n / (1 -+ q^n)` into an ordinary q-series via
/// divisor sums. `a(n)` supplies the coefficient sequence for `1 <= n <= N`.
pub fn lambert_expand<F>(a: F, mode: LambertMode, order: usize) -> QSeries
where
    F: Fn(u64) -> Rat,
{
    let mut out = QSeries::zero(order);
    for n in 1..=order as u64 {
        let mut acc = Rat::zero();
        for &(d, quot) in DivisorTable::new(n).entries() {
            let term = a(d);
            if term.is_zero() {
                continue;
            }
            match mode {
                LambertMode::Minus => acc += term,
                LambertMode::Plus => {
                    if quot % 2 == 1 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
            }
        }
        out.coeffs[n as usize] = acc;
    }
    out
}

/// The Moebius function `mu(n)` by trial factorization.
pub fn mobius(n: u64) -> i32 {
    assert!(n >= 1);
    let mut m = n;
    let mut factors = 0;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            factors += 1;
        }
        p += 1;
    }
    if m > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Moebius inversion: recovers `a_n` from the divisor sums
/// `A_n = sum_{d|n} a_d` via `a_n = sum_{d|n} mu(n/d) A_d`.
///
/// `sums(n)` supplies `A_n`; the result vector has `a_n` at index `n`
/// (index 0 is zero). Round-trips with [`lambert_expand`] in
/// [`LambertMode::Minus`].
pub fn lambert_invert<F>(sums: F, order: usize) -> Vec<Rat>
where
    F: Fn(u64) -> Rat,
{
    let mut out = vec![Rat::zero(); order + 1];
    for n in 1..=order as u64 {
        let mut acc = Rat::zero();
        for &(d, quot) in DivisorTable::new(n).entries() {
            let mu = mobius(quot);
            if mu == 0 {
                continue;
            }
            let term = sums(d);
            if mu > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        out[n as usize] = acc;
    }
    out
}

/// `sigma(n)`: sum of divisors. Handy oracle for tests and the divisor-sum
/// coefficient forms.
pub fn sigma(n: u64) -> u64 {
    DivisorTable::new(n).divisors().sum()
}

pub(crate) fn rat_i64(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

#[cfg(test)]
pub(crate) fn rat_ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `|a|` as f64, for diagnostics only (never feeds back into arithmetic).
pub fn rat_to_f64(a: &Rat) -> f64 {
    let num = a.numer();
    let den = a.denom();
    // Exact for everything the tests print; falls back to a quotient of
    // lossy conversions for huge values.
    let nf = num.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = den.to_string().parse::<f64>().unwrap_or(f64::NAN);
    if a.is_negative() {
        -(nf.abs() / df.abs())
    } else {
        nf.abs() / df.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(coeffs: &[i64]) -> QSeries {
        QSeries::from_i64(coeffs)
    }

    #[test]
    fn add_cancels_and_respects_identity() {
        let one_plus_q = qs(&[1, 1, 0, 0]);
        let one_minus_q = qs(&[1, -1, 0, 0]);
        assert_eq!(one_plus_q.add(&one_minus_q), qs(&[2, 0, 0, 0]));
        let a = qs(&[3, 0, -2, 7]);
        assert_eq!(a.add(&QSeries::zero(3)), a);
        assert_eq!(qs(&[0, 1, 1]).add(&qs(&[0, 0, 1])), qs(&[0, 1, 2]));
    }

    #[test]
    fn mul_truncates_to_min_order() {
        let a = qs(&[1, 1, 0, 0, 0]);
        let b = qs(&[1, -1, 0]);
        assert_eq!(a.mul(&b), qs(&[1, 0, -1]));
        let c = qs(&[4, -1, 2, 9]);
        assert_eq!(c.mul(&QSeries::one(3)), c);
    }

    #[test]
    fn inv_of_one_minus_q_is_geometric() {
        let g = one_minus_qk(1, 6).inv().unwrap();
        assert_eq!(g, qs(&[1, 1, 1, 1, 1, 1, 1]));
        assert_eq!(QSeries::one(4).inv().unwrap(), QSeries::one(4));
        let g2 = one_minus_qk(2, 7).inv().unwrap();
        assert_eq!(g2, qs(&[1, 0, 1, 0, 1, 0, 1, 0]));
        // inverse consistency
        let a = one_minus_qk(1, 8);
        assert_eq!(a.inv().unwrap().mul(&a), QSeries::one(8));
        assert_eq!(QSeries::zero(3).inv(), Err(QSeriesError::ZeroConstantTerm));
    }

    #[test]
    fn exp_and_log_basics() {
        assert_eq!(QSeries::zero(5).exp().unwrap(), QSeries::one(5));
        assert_eq!(QSeries::one(5).log().unwrap(), QSeries::zero(5));
        // exp(q) = sum q^k / k!
        let e = QSeries::monomial(Rat::one(), 1, 5).exp().unwrap();
        let expect = QSeries::new(
            [1i64, 1, 2, 6, 24, 120]
                .iter()
                .map(|&d| rat_ratio(1, d))
                .collect(),
        );
        assert_eq!(e, expect);
        assert!(matches!(
            QSeries::one(3).exp(),
            Err(QSeriesError::BadConstantTerm(_))
        ));
        assert!(matches!(
            QSeries::zero(3).log(),
            Err(QSeriesError::BadConstantTerm(_))
        ));
    }

    #[test]
    fn euler_product_matches_pentagonal_expansion() {
        // prod_{k>=1} (1 - q^k) to order 5, frozen from direct expansion
        let p = qs_product((1..).map(|k| one_minus_qk(k, 5)), 5).unwrap();
        assert_eq!(p, qs(&[1, -1, -1, 0, 0, 1]));
        // empty product and the all-trivial-factors product are both 1
        assert_eq!(qs_product(std::iter::empty(), 4).unwrap(), QSeries::one(4));
        let trivial = qs_product((1..).map(|k| one_minus_cqk(Rat::zero(), k, 4)), 4).unwrap();
        assert_eq!(trivial, QSeries::one(4));
        // non-unit factor is rejected
        assert_eq!(
            qs_product(std::iter::once(qs(&[2, 1])), 1),
            Err(QSeriesError::NonUnitFactor)
        );
    }

    #[test]
    fn lambert_expand_divisor_sums() {
        // a_n = n, minus mode: A_n = sigma(n) -> q + 3q^2 + 4q^3 + 7q^4
        let s = lambert_expand(|n| rat_i64(n as i64), LambertMode::Minus, 4);
        assert_eq!(s, qs(&[0, 1, 3, 4, 7]));
        // a_n = 0 -> 0
        let z = lambert_expand(|_| Rat::zero(), LambertMode::Minus, 6);
        assert!(z.is_zero());
        // a_n = 1: A_n = number of divisors, brute-force oracle
        let d = lambert_expand(|_| Rat::one(), LambertMode::Minus, 12);
        for n in 1..=12u64 {
            let count = (1..=n).filter(|k| n % k == 0).count();
            assert_eq!(d.coeff(n as usize), &rat_i64(count as i64), "d({n})");
        }
    }

    #[test]
    fn lambert_plus_mode_matches_direct_expansion() {
        // sum a_n q^n/(1+q^n) expanded brute force as a_n q^n (1 - q^n + q^2n - ...)
        let order = 24;
        let a = |n: u64| rat_i64((n * n % 7) as i64 - 3);
        let by_divisors = lambert_expand(a, LambertMode::Plus, order);
        let mut direct = QSeries::zero(order);
        for n in 1..=order {
            let num = QSeries::monomial(a(n as u64), n, order);
            let den = QSeries::one(order).add(&QSeries::monomial(Rat::one(), n, order));
            direct = direct.add(&num.mul(&den.inv().unwrap()));
        }
        assert_eq!(by_divisors, direct);
    }

    #[test]
    fn mobius_small_values() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1); // two distinct primes, squarefree
        assert_eq!(mobius(12), 0); // divisible by 4
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(49), 0);
    }

    #[test]
    fn lambert_invert_recovers_weights() {
        // A = sigma -> a_n = n
        let a = lambert_invert(|n| rat_i64(sigma(n) as i64), 32);
        for n in 1..=32 {
            assert_eq!(a[n], rat_i64(n as i64));
        }
        // A = 0 -> 0
        let z = lambert_invert(|_| Rat::zero(), 8);
        assert!(z.iter().all(|c| c.is_zero()));
        // A = d(n) -> a_n = 1
        let d = lambert_invert(
            |n| rat_i64((1..=n).filter(|k| n % k == 0).count() as i64),
            24,
        );
        for n in 1..=24 {
            assert_eq!(d[n], Rat::one(), "n = {n}");
        }
    }

    #[test]
    fn divisor_table_enumerates_each_divisor_once() {
        let t = DivisorTable::new(36);
        let ds: Vec<u64> = t.divisors().collect();
        assert_eq!(ds, vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        for &(d, q) in t.entries() {
            assert_eq!(d * q, 36);
        }
    }

    #[test]
    fn serialization_round_trip_and_format() {
        let s = QSeries::new(vec![rat_i64(0), rat_i64(4), rat_ratio(-3, 2)]);
        let strings = s.to_rational_strings();
        assert_eq!(strings, vec!["0", "4", "-3/2"]);
        let back = QSeries::from_rational_strings(&strings).unwrap();
        assert_eq!(back, s);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"["0","4","-3/2"]"#);
        let de: QSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(de, s);
    }
}
