//! Golden-file contract for the QSeries JSON wire format: an exact rational
//! string per coefficient, index = exponent. The frozen file holds the
//! coefficient family c_2 to order 12, derived independently by the divisor
//! rule (coefficient of q^m is 4 * sum of divisors d of m with m/d odd).

use thetakit::qseries::QSeries;
use thetakit::theta;

const GOLDEN: &str = include_str!("golden/c2_order12.json");

#[test]
fn c2_series_matches_golden_file() {
    let expected: QSeries = serde_json::from_str(GOLDEN).unwrap();
    assert_eq!(theta::c2p_closed_formal(1, 12), expected);
    assert_eq!(theta::c2p_binomial_formal(1, 12), expected);
}

#[test]
fn golden_file_round_trips_byte_identically() {
    let parsed: QSeries = serde_json::from_str(GOLDEN).unwrap();
    let emitted = serde_json::to_string(&parsed).unwrap();
    assert_eq!(emitted, GOLDEN.trim());
}
