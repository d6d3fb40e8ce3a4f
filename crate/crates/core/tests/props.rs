//! Property tests for the exact q-series layer and the structural invariants
//! that hold for *all* inputs, not just the spec'd examples.

use num_bigint::BigInt;
use proptest::prelude::*;
use thetakit::qseries::{lambert_expand, lambert_invert, LambertMode, QSeries, Rat};

fn small_series(order: usize) -> impl Strategy<Value = QSeries> {
    prop::collection::vec(-9i64..=9, order + 1)
        .prop_map(|coeffs| QSeries::new(coeffs.into_iter().map(|c| Rat::from(BigInt::from(c))).collect()))
}

proptest! {
    #[test]
    fn ring_laws(a in small_series(10), b in small_series(10), c in small_series(10)) {
        // commutativity
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        // associativity
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        // distributivity
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn exp_log_round_trip(a in small_series(8)) {
        // force the admissible constant terms
        let mut coeffs = a.coeffs().to_vec();
        coeffs[0] = Rat::from(BigInt::from(0));
        let zero_const = QSeries::new(coeffs);
        let e = zero_const.exp().unwrap();
        prop_assert_eq!(e.log().unwrap(), zero_const.clone());

        let mut coeffs = a.coeffs().to_vec();
        coeffs[0] = Rat::from(BigInt::from(1));
        let unit_const = QSeries::new(coeffs);
        let l = unit_const.log().unwrap();
        prop_assert_eq!(l.exp().unwrap(), unit_const);
    }

    #[test]
    fn inverse_is_two_sided(a in small_series(10), lead in 1i64..=9) {
        let mut coeffs = a.coeffs().to_vec();
        coeffs[0] = Rat::from(BigInt::from(lead));
        let unit = QSeries::new(coeffs);
        let inv = unit.inv().unwrap();
        prop_assert_eq!(unit.mul(&inv), QSeries::one(10));
        prop_assert_eq!(inv.mul(&unit), QSeries::one(10));
    }

    #[test]
    fn lambert_round_trip(weights in prop::collection::vec(-20i64..=20, 64)) {
        let a = move |n: u64| Rat::from(BigInt::from(weights[(n - 1) as usize]));
        let sums = lambert_expand(a.clone(), LambertMode::Minus, 64);
        let recovered = lambert_invert(|n| sums.coeff(n as usize).clone(), 64);
        for n in 1..=64u64 {
            prop_assert_eq!(&recovered[n as usize], &a(n), "n = {}", n);
        }
    }

    #[test]
    fn serialization_round_trips(a in small_series(12), den in 1i64..=7) {
        let scaled = a.scale(&Rat::new(BigInt::from(1), BigInt::from(den)));
        let json = serde_json::to_string(&scaled).unwrap();
        let back: QSeries = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, scaled);
    }
}

/// Depth-`d` and depth-`d+1` convergents of the Rogers-Ramanujan fraction
/// share at least their first `d` coefficients, for every depth up to 30.
#[test]
fn cf_convergents_gain_at_least_one_order_per_level() {
    for d in 1..=30 {
        let a = thetakit::rr::rr_cf_formal(d, d + 2).unwrap().body;
        let b = thetakit::rr::rr_cf_formal(d + 1, d + 2).unwrap().body;
        assert_eq!(a.truncated(d), b.truncated(d), "depth {d}");
    }
}
