//! The identity-verification suites: named, self-contained check tasks that
//! the CLI fans out over a worker pool and the integration tests run
//! directly. Every task evaluates one identity (or one small family) and
//! returns [`CheckRecord`]s; report-only relations come back with status
//! `reported` and never fail a run.

use crate::elliptic::{self, ZnRoute};
use crate::modular;
use crate::qseries::{one_minus_qk, qs_product, QSeries};
use crate::report::{abs_residual, rel_residual, CheckRecord};
use crate::rr::{self, RrExpVariant, RrQuotientRoute};
use crate::theta::{self, EtaRoute, ThetaKind};
use crate::{EvalConfig, EvalError, HalfPlanePoint, StripPolicy};
use num_complex::Complex64;
use num_traits::Zero;
use std::f64::consts::PI;

/// Which family of checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Theta,
    Modular,
    Elliptic,
    Rr,
    Formal,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "all" => Suite::All,
            "theta" => Suite::Theta,
            "modular" => Suite::Modular,
            "elliptic" => Suite::Elliptic,
            "rr" => Suite::Rr,
            "formal" => Suite::Formal,
            _ => return None,
        })
    }
}

/// One schedulable unit of verification. `key` orders the report
/// deterministically regardless of completion order.
pub struct CheckTask {
    pub key: String,
    runner: Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync>,
}

impl CheckTask {
    fn new(
        key: impl Into<String>,
        runner: impl Fn() -> Vec<CheckRecord> + Send + Sync + 'static,
    ) -> Self {
        CheckTask {
            key: key.into(),
            runner: Box::new(runner),
        }
    }

    pub fn run(&self) -> Vec<CheckRecord> {
        (self.runner)()
    }
}

fn record_or_error(
    identity: &str,
    params: String,
    result: Result<Vec<CheckRecord>, EvalError>,
) -> Vec<CheckRecord> {
    match result {
        Ok(records) => records,
        Err(e) => vec![CheckRecord::errored(identity, params, e)],
    }
}

/// The default `tau` grid: moderate nomes where every truncated binomial sum
/// converges comfortably (`|q| <= e^{-1.2 pi} ~ 0.023`).
pub fn default_tau_grid() -> Vec<HalfPlanePoint> {
    [
        (0.0, 1.2),
        (0.0, 1.6),
        (0.0, 2.0),
        (0.3, 1.4),
        (1.0, 1.8),
    ]
    .into_iter()
    .map(|(re, im)| HalfPlanePoint::from_parts(re, im).expect("grid lies in the half-plane"))
    .collect()
}

/// Builds the task list for a suite. `formal_order` controls the truncation
/// order of the exact-series checks (the `formal` suite).
pub fn tasks(
    suite: Suite,
    cfg: EvalConfig,
    grid: &[HalfPlanePoint],
    formal_order: usize,
) -> Vec<CheckTask> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Theta) {
        theta_tasks(&mut out, cfg, grid);
    }
    if matches!(suite, Suite::All | Suite::Modular) {
        modular_tasks(&mut out, cfg, grid);
    }
    if matches!(suite, Suite::All | Suite::Elliptic) {
        elliptic_tasks(&mut out, cfg, grid);
    }
    if matches!(suite, Suite::All | Suite::Rr) {
        rr_tasks(&mut out, cfg, grid);
    }
    if matches!(suite, Suite::All | Suite::Formal) {
        formal_tasks(&mut out, formal_order);
    }
    out
}

/// Strip-interior sample points for the expansion of `kind` at `tau`:
/// a small rectangle of `v` values, recentred on the strip axis for
/// `theta1`/`theta2` and filtered by the strip quantity.
pub fn strip_interior_points(kind: ThetaKind, tau: HalfPlanePoint) -> Vec<Complex64> {
    let shift = match kind {
        ThetaKind::One | ThetaKind::Two => -tau.tau() / 2.0,
        _ => Complex64::zero(),
    };
    let mut points = Vec::new();
    for ix in 0..5 {
        for iy in -1..=1 {
            let v = Complex64::new(0.05 + 0.1 * ix as f64, 0.2 * iy as f64) + shift;
            if theta::strip_ratio(kind, v, tau) < 0.9 {
                points.push(v);
            }
        }
    }
    points
}

fn theta_tasks(out: &mut Vec<CheckTask>, cfg: EvalConfig, grid: &[HalfPlanePoint]) {
    for &tau in grid {
        out.push(CheckTask::new(format!("theta.representation {tau}"), move || {
            let mut records = Vec::new();
            for kind in ThetaKind::ALL {
                for v in strip_interior_points(kind, tau) {
                    let params = format!("theta{} v={v} tau={tau}", kind.index());
                    let rec = (|| -> Result<CheckRecord, EvalError> {
                        let reference = theta::theta_fourier(kind, v, tau, &cfg)?;
                        let expansion = theta::theta_expansion(kind, v, tau, &cfg)?;
                        Ok(CheckRecord::asserted(
                            "theta.expansion-vs-fourier",
                            params.clone(),
                            expansion,
                            reference,
                            rel_residual(expansion, reference),
                            1e-9,
                        ))
                    })();
                    records.push(rec.unwrap_or_else(|e| {
                        CheckRecord::errored("theta.expansion-vs-fourier", params, e)
                    }));
                }
            }
            records
        }));

        out.push(CheckTask::new(format!("theta.product {tau}"), move || {
            let mut records = Vec::new();
            for kind in ThetaKind::ALL {
                // products converge everywhere: include points outside strips
                let mut points = strip_interior_points(kind, tau);
                points.push(Complex64::new(0.3, 0.6));
                points.push(Complex64::new(0.7, -0.6));
                for v in points {
                    let params = format!("theta{} v={v} tau={tau}", kind.index());
                    let rec = (|| -> Result<CheckRecord, EvalError> {
                        let reference = theta::theta_fourier(kind, v, tau, &cfg)?;
                        let product = theta::theta_product(kind, v, tau, &cfg)?;
                        Ok(CheckRecord::asserted(
                            "theta.product-vs-fourier",
                            params.clone(),
                            product,
                            reference,
                            rel_residual(product, reference),
                            1e-9,
                        ))
                    })();
                    records.push(rec.unwrap_or_else(|e| {
                        CheckRecord::errored("theta.product-vs-fourier", params, e)
                    }));
                }
            }
            records
        }));

        out.push(CheckTask::new(format!("theta.quasiperiod {tau}"), move || {
            quasi_periodicity_records(tau, &cfg)
        }));

        out.push(CheckTask::new(format!("theta.zeros {tau}"), move || {
            zero_records(tau, &cfg)
        }));

        out.push(CheckTask::new(format!("theta.logderiv {tau}"), move || {
            log_derivative_records(tau, &cfg)
        }));

        out.push(CheckTask::new(format!("theta.theta1-prime {tau}"), move || {
            let params = format!("tau={tau}");
            match theta::theta1_prime_zero(tau, &cfg) {
                Ok(r) => vec![CheckRecord::asserted(
                    "theta.theta1-prime-routes",
                    params,
                    r.series,
                    r.exponential,
                    r.max_discrepancy() / r.series.norm().max(1e-300),
                    1e-11,
                )],
                Err(e) => vec![CheckRecord::errored("theta.theta1-prime-routes", params, e)],
            }
        }));

        out.push(CheckTask::new(format!("theta.eta-routes {tau}"), move || {
            let params = format!("tau={tau}");
            let run = || -> Result<Vec<CheckRecord>, EvalError> {
                let a = theta::dedekind_eta(tau, &cfg, EtaRoute::Product)?;
                let b = theta::dedekind_eta(tau, &cfg, EtaRoute::Expansion)?;
                Ok(vec![CheckRecord::asserted(
                    "theta.eta-product-vs-expansion",
                    params.clone(),
                    a,
                    b,
                    rel_residual(a, b),
                    1e-9,
                )])
            };
            let result = run();
            record_or_error("theta.eta-product-vs-expansion", params, result)
        }));
    }
}

fn quasi_periodicity_records(tau: HalfPlanePoint, cfg: &EvalConfig) -> Vec<CheckRecord> {
    // theta(v + tau) = +-(q e^{2 i pi v})^{-1} theta(v): minus for
    // theta1/theta4, plus for theta2/theta3.
    let mut records = Vec::new();
    let t = tau.tau();
    let q = tau.nome();
    // deterministic low-discrepancy sample of 20 points
    for j in 0..20 {
        let x = (j as f64 * 0.618_033_988_749_895) % 1.0;
        let y = 0.4 * (((j as f64 * 0.414_213_562_373_095) % 1.0) - 0.5);
        let v = Complex64::new(x, y);
        for kind in ThetaKind::ALL {
            let sign = match kind {
                ThetaKind::One | ThetaKind::Four => -1.0,
                _ => 1.0,
            };
            let params = format!("theta{} v={v} tau={tau}", kind.index());
            let rec = (|| -> Result<CheckRecord, EvalError> {
                let lhs = theta::theta_fourier(kind, v + t, tau, cfg)?;
                let factor = sign * (q * (2.0 * Complex64::i() * PI * v).exp()).inv();
                let rhs = factor * theta::theta_fourier(kind, v, tau, cfg)?;
                Ok(CheckRecord::asserted(
                    "theta.quasi-periodicity",
                    params.clone(),
                    lhs,
                    rhs,
                    rel_residual(lhs, rhs),
                    1e-9,
                ))
            })();
            records
                .push(rec.unwrap_or_else(|e| CheckRecord::errored("theta.quasi-periodicity", params, e)));
        }
    }
    records
}

fn zero_records(tau: HalfPlanePoint, cfg: &EvalConfig) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let t = tau.tau();
    // |m| <= 2, n in {0, +-1}: larger |n| loses digits to quasi-period growth
    for kind in ThetaKind::ALL {
        let (a, b) = kind.zero_base();
        for m in -2i32..=2 {
            for n in -1i32..=1 {
                let v = Complex64::new(a + m as f64, 0.0) + (b + n as f64) * t;
                let params = format!("theta{} m={m} n={n} tau={tau}", kind.index());
                let rec = match theta::theta_fourier(kind, v, tau, cfg) {
                    Ok(z) => CheckRecord::asserted(
                        "theta.zero-lattice",
                        params,
                        z,
                        Complex64::zero(),
                        z.norm(),
                        1e-9,
                    ),
                    Err(e) => CheckRecord::errored("theta.zero-lattice", params, e),
                };
                records.push(rec);
            }
        }
    }
    records
}

fn log_derivative_records(tau: HalfPlanePoint, cfg: &EvalConfig) -> Vec<CheckRecord> {
    // log-derivative k-sums against a central finite difference of
    // log theta_fourier; the stated strips are sufficient only, so run the
    // sums under Warn.
    let relaxed = cfg.with_strip_policy(StripPolicy::Warn);
    let h = 1e-5;
    let mut records = Vec::new();
    for kind in ThetaKind::ALL {
        for v in [Complex64::new(0.2, 0.0), Complex64::new(0.3, 0.1)] {
            let params = format!("theta{} v={v} tau={tau}", kind.index());
            let rec = (|| -> Result<CheckRecord, EvalError> {
                let ld = theta::theta_log_derivative(kind, v, tau, &relaxed)?;
                let plus = theta::theta_fourier(kind, v + h, tau, cfg)?;
                let minus = theta::theta_fourier(kind, v - h, tau, cfg)?;
                let fd = (plus.ln() - minus.ln()) / (2.0 * h);
                Ok(CheckRecord::asserted(
                    "theta.logderiv-vs-fd",
                    params.clone(),
                    ld,
                    fd,
                    abs_residual(ld, fd),
                    1e-6,
                ))
            })();
            records.push(rec.unwrap_or_else(|e| CheckRecord::errored("theta.logderiv-vs-fd", params, e)));
        }
    }
    records
}

fn modular_tasks(out: &mut Vec<CheckTask>, cfg: EvalConfig, grid: &[HalfPlanePoint]) {
    for &tau in grid {
        out.push(CheckTask::new(format!("modular.period2 {tau}"), move || {
            (1..=10)
                .map(|p| {
                    let params = format!("p={p} tau={tau}");
                    match modular::check_period2(p, tau, &cfg) {
                        Ok(r) => CheckRecord::asserted(
                            "modular.period2",
                            params,
                            Complex64::new(r, 0.0),
                            Complex64::zero(),
                            r,
                            1e-13,
                        ),
                        Err(e) => CheckRecord::errored("modular.period2", params, e),
                    }
                })
                .collect()
        }));

        out.push(CheckTask::new(format!("modular.shift1 {tau}"), move || {
            let params = format!("p<=3 tau={tau}");
            match modular::check_shift1(3, tau, &cfg) {
                Ok(residuals) => residuals
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| {
                        CheckRecord::asserted(
                            "modular.shift1",
                            format!("p={} tau={tau}", i + 1),
                            Complex64::new(r, 0.0),
                            Complex64::zero(),
                            r,
                            1e-8,
                        )
                    })
                    .collect(),
                Err(e) => vec![CheckRecord::errored("modular.shift1", params, e)],
            }
        }));

        out.push(CheckTask::new(format!("modular.cor31 {tau}"), move || {
            let mut records = record_or_error(
                "modular.cor31",
                format!("p=1 tau={tau}"),
                modular::cor31_forms(1, tau, &cfg),
            );
            records.extend(record_or_error(
                "modular.cor31",
                format!("p=2 tau={tau}"),
                modular::cor31_forms(2, tau, &cfg),
            ));
            records
        }));

        out.push(CheckTask::new(format!("modular.landen {tau}"), move || {
            let params = format!("p<=2 tau={tau}");
            match modular::landen_c2p(2, tau, &cfg) {
                Ok((shifted, plain)) => {
                    let mut records = Vec::new();
                    for (i, r) in shifted.into_iter().enumerate() {
                        records.push(CheckRecord::asserted(
                            "modular.landen-shifted",
                            format!("p={} tau={tau}", i + 1),
                            Complex64::new(r, 0.0),
                            Complex64::zero(),
                            r,
                            1e-8,
                        ));
                    }
                    for (i, r) in plain.into_iter().enumerate() {
                        records.push(CheckRecord::asserted(
                            "modular.landen-plain",
                            format!("p={} tau={tau}", i + 1),
                            Complex64::new(r, 0.0),
                            Complex64::zero(),
                            r,
                            1e-8,
                        ));
                    }
                    records
                }
                Err(e) => vec![CheckRecord::errored("modular.landen", params, e)],
            }
        }));

        out.push(CheckTask::new(
            format!("modular.landen-theta {tau}"),
            move || {
                record_or_error(
                    "modular.landen-theta",
                    format!("tau={tau}"),
                    modular::landen_theta_identity(Complex64::new(0.05, 0.0), tau, &cfg),
                )
            },
        ));

        out.push(CheckTask::new(format!("modular.eta-quotient {tau}"), move || {
            let params = format!("tau={tau}");
            match modular::eta_quotient_landen(tau, &cfg) {
                Ok((lhs, rhs)) => vec![CheckRecord::asserted(
                    "modular.eta-quotient",
                    params,
                    lhs,
                    rhs,
                    rel_residual(lhs, rhs),
                    1e-8,
                )],
                Err(e) => vec![CheckRecord::errored("modular.eta-quotient", params, e)],
            }
        }));

        out.push(CheckTask::new(
            format!("modular.higher-order {tau}"),
            move || {
                let mut records = Vec::new();
                for (n, k) in [(1, 1), (1, 2), (2, 3)] {
                    records.extend(record_or_error(
                        "modular.higher-order",
                        format!("n={n} k={k} tau={tau}"),
                        modular::higher_order_identity(n, k, tau, &cfg),
                    ));
                }
                records
            },
        ));
    }
}

fn elliptic_tasks(out: &mut Vec<CheckTask>, cfg: EvalConfig, grid: &[HalfPlanePoint]) {
    for &tau in grid {
        out.push(CheckTask::new(format!("elliptic.a2-seed {tau}"), move || {
            let params = format!("tau={tau}");
            let run = || -> Result<Vec<CheckRecord>, EvalError> {
                let params_wp = elliptic::WpParams::new(tau, &cfg)?;
                let a2 = elliptic::a2p_closed(1, tau, &cfg)?;
                let seed = params_wp.a2_from_invariants();
                Ok(vec![CheckRecord::asserted(
                    "elliptic.a2-vs-invariants",
                    params.clone(),
                    a2,
                    seed,
                    rel_residual(a2, seed),
                    1e-9,
                )])
            };
            let result = run();
            record_or_error("elliptic.a2-vs-invariants", params, result)
        }));

        out.push(CheckTask::new(format!("elliptic.wp {tau}"), move || {
            let mut records = Vec::new();
            for z in [
                Complex64::new(0.3, 0.0),
                Complex64::new(0.5, 0.2),
                Complex64::new(0.2, -0.15),
            ] {
                let params = format!("z={z} tau={tau}");
                let rec = (|| -> Result<CheckRecord, EvalError> {
                    let ex = elliptic::wp_expansion(z, tau, &cfg)?;
                    let or = elliptic::wp_oracle(z + tau.tau(), tau, &cfg)?;
                    Ok(CheckRecord::asserted(
                        "elliptic.wp-expansion-vs-oracle",
                        params.clone(),
                        ex,
                        or,
                        rel_residual(ex, or),
                        1e-7,
                    ))
                })();
                records.push(
                    rec.unwrap_or_else(|e| CheckRecord::errored("elliptic.wp-expansion-vs-oracle", params, e)),
                );
            }
            // report-only: the printed addition-theorem quotient
            let z = Complex64::new(0.4, 0.0);
            let params = format!("z={z} tau={tau}");
            match (
                elliptic::wp_addition_form(z, tau, &cfg),
                elliptic::wp_oracle(z, tau, &cfg),
            ) {
                (Ok(quot), Ok(or)) => {
                    records.push(CheckRecord::reported(
                        "elliptic.wp-addition-as-printed",
                        params.clone(),
                        quot,
                        or,
                        rel_residual(quot, or),
                    ));
                }
                (Err(e), _) | (_, Err(e)) => {
                    records.push(CheckRecord::errored("elliptic.wp-addition-as-printed", params.clone(), e))
                }
            }
            // the rebalanced quotient, asserted
            let rec = (|| -> Result<CheckRecord, EvalError> {
                let p = elliptic::WpParams::new(tau, &cfg)?;
                let shifted = elliptic::wp_expansion(z, tau, &cfg)?;
                let rebalanced = p.e3 + (p.g2 - 12.0 * p.e3 * p.e3) / (4.0 * (p.e3 - shifted));
                let direct = elliptic::wp_oracle(z, tau, &cfg)?;
                Ok(CheckRecord::asserted(
                    "elliptic.wp-addition-rebalanced",
                    params.clone(),
                    rebalanced,
                    direct,
                    rel_residual(rebalanced, direct),
                    1e-7,
                ))
            })();
            records.push(
                rec.unwrap_or_else(|e| CheckRecord::errored("elliptic.wp-addition-rebalanced", params, e)),
            );
            records
        }));

        out.push(CheckTask::new(format!("elliptic.recursion {tau}"), move || {
            let params = format!("p<=5 tau={tau}");
            let run = || -> Result<Vec<CheckRecord>, EvalError> {
                let wp = elliptic::WpParams::new(tau, &cfg)?;
                let a: Vec<Complex64> = (1..=6)
                    .map(|p| elliptic::a2p_closed(p, tau, &cfg))
                    .collect::<Result<_, _>>()?;
                let mut records = Vec::new();
                for p in 1..=5usize {
                    let conv: Complex64 = (1..p).map(|r| a[r - 1] * a[p - r - 1]).sum();
                    let lin = (PI / 2.0).powi(2)
                        * (((2 * p + 2) * (2 * p + 1)) as f64 * a[p] - (4 * p * p) as f64 * a[p - 1]);
                    let rhs = 12.0 * wp.e3 * a[p - 1] - 6.0 * conv;
                    let scale = lin.norm().max(rhs.norm()).max(1e-300);
                    records.push(CheckRecord::asserted(
                        "elliptic.a2p-recursion",
                        format!("p={p} tau={tau}"),
                        lin,
                        rhs,
                        abs_residual(lin, rhs) / scale,
                        1e-7,
                    ));
                }
                Ok(records)
            };
            record_or_error("elliptic.a2p-recursion", params, run())
        }));

        out.push(CheckTask::new(format!("elliptic.bridge {tau}"), move || {
            // [(2p+2)(2p+1) c_{2p+2} - 4 p^2 c_{2p}] / a_{2p} is constant in
            // p; its value is 4/pi^2 under this normalization of a_{2p}.
            let params = format!("tau={tau}");
            let run = || -> Result<Vec<CheckRecord>, EvalError> {
                let mut ratios = Vec::new();
                for p in 1..=5usize {
                    let c_next = theta::c2p_closed(p + 1, tau, &cfg)?;
                    let c_cur = theta::c2p_closed(p, tau, &cfg)?;
                    let bracket =
                        ((2 * p + 2) * (2 * p + 1)) as f64 * c_next - (4 * p * p) as f64 * c_cur;
                    ratios.push(bracket / elliptic::a2p_closed(p, tau, &cfg)?);
                }
                let first = ratios[0];
                let worst = ratios
                    .iter()
                    .map(|r| (r - first).norm() / first.norm())
                    .fold(0.0f64, f64::max);
                Ok(vec![CheckRecord::asserted(
                    "elliptic.bridge-ratio-constant",
                    format!("tau={tau} ratio={:.12}", first.re),
                    first,
                    Complex64::new(4.0 / (PI * PI), 0.0),
                    worst,
                    1e-6,
                )])
            };
            record_or_error("elliptic.bridge-ratio-constant", params, run())
        }));

        out.push(CheckTask::new(format!("elliptic.zn {tau}"), move || {
            let params = format!("tau={tau}");
            let run = || -> Result<Vec<CheckRecord>, EvalError> {
                let (_, big_k) = elliptic::modulus_from_tau(tau, &cfg)?;
                let mut records = Vec::new();
                for j in 1..=10 {
                    let z = big_k * (0.035 * j as f64);
                    let a = elliptic::jacobi_zn(z, tau, &cfg, ZnRoute::Closed)?;
                    let b = elliptic::jacobi_zn(z, tau, &cfg, ZnRoute::Fourier)?;
                    records.push(CheckRecord::asserted(
                        "elliptic.zn-route-agreement",
                        format!("z={:.3}K tau={tau}", 0.035 * j as f64),
                        a,
                        b,
                        abs_residual(a, b) / a.norm().max(1e-9),
                        1e-9,
                    ));
                }
                Ok(records)
            };
            record_or_error("elliptic.zn-route-agreement", params, run())
        }));
    }

    out.push(CheckTask::new("elliptic.agm", move || {
        let mut records = Vec::new();
        // lemniscatic point, frozen from 30-digit AGM
        match elliptic::agm_k(1.0 / 2f64.sqrt()) {
            Ok(k) => {
                let expect = 1.854_074_677_301_371_9;
                records.push(CheckRecord::asserted(
                    "elliptic.agm-lemniscatic",
                    "k=1/sqrt(2)",
                    Complex64::new(k, 0.0),
                    Complex64::new(expect, 0.0),
                    (k - expect).abs() / expect,
                    1e-12,
                ));
            }
            Err(e) => records.push(CheckRecord::errored("elliptic.agm-lemniscatic", "k=1/sqrt(2)", e)),
        }
        records
    }));
}

fn rr_tasks(out: &mut Vec<CheckTask>, cfg: EvalConfig, grid: &[HalfPlanePoint]) {
    for &tau in grid {
        out.push(CheckTask::new(format!("rr.routes {tau}"), move || {
            let params = format!("tau={tau}");
            let run = || -> Result<Vec<CheckRecord>, EvalError> {
                let product = rr::rr_product(tau, &cfg)?.value(tau);
                let entries: Vec<(&str, Complex64)> = vec![
                    ("rr.cf-vs-product", rr::rr_cf(tau, 80)?.value(tau)),
                    (
                        "rr.exp-sin-vs-product",
                        rr::rr_exp(tau, &cfg, RrExpVariant::Sin)?.value(tau),
                    ),
                    (
                        "rr.exp-cos-vs-product",
                        rr::rr_exp(tau, &cfg, RrExpVariant::Cos)?.value(tau),
                    ),
                    (
                        "rr.theta4-vs-product",
                        rr::rr_theta_quotient(tau, &cfg, RrQuotientRoute::Theta4)?.value(tau),
                    ),
                    (
                        "rr.liu-vs-product",
                        rr::rr_theta_quotient(tau, &cfg, RrQuotientRoute::LiuTheta1)?.value(tau),
                    ),
                ];
                Ok(entries
                    .into_iter()
                    .map(|(name, value)| {
                        CheckRecord::asserted(
                            name,
                            params.clone(),
                            value,
                            product,
                            rel_residual(value, product),
                            1e-9,
                        )
                    })
                    .collect())
            };
            let result = run();
            record_or_error("rr.routes", params, result)
        }));

        out.push(CheckTask::new(format!("rr.modular {tau}"), move || {
            record_or_error(
                "rr.modular",
                format!("tau={tau}"),
                rr::rr_modular_checks(tau, &cfg),
            )
        }));
    }
}

/// Exact (zero-tolerance) q-series identities. Equality is coefficientwise
/// over the rationals; a failing record carries the first mismatching
/// exponent in its note.
fn formal_tasks(out: &mut Vec<CheckTask>, order: usize) {
    fn exact(identity: &str, params: String, lhs: &QSeries, rhs: &QSeries) -> CheckRecord {
        let mismatch = (0..=lhs.order().min(rhs.order())).find(|&k| lhs.coeff(k) != rhs.coeff(k));
        let mut rec = CheckRecord::asserted(
            identity,
            params,
            Complex64::zero(),
            Complex64::zero(),
            if mismatch.is_some() { 1.0 } else { 0.0 },
            0.0,
        );
        if let Some(k) = mismatch {
            rec.note = Some(format!(
                "first mismatch at q^{k}: {} vs {}",
                lhs.coeff(k),
                rhs.coeff(k)
            ));
        }
        rec
    }

    let big = order.max(64);
    out.push(CheckTask::new("formal.c2-three-forms", move || {
        let a = theta::c2_from_theta_nulls_formal(big);
        let b = theta::c2p_closed_formal(1, big);
        let c = theta::c2p_binomial_formal(1, big);
        vec![
            exact("formal.c2-null-quotient-vs-closed", format!("order={big}"), &a, &b),
            exact("formal.c2-closed-vs-lambert", format!("order={big}"), &b, &c),
        ]
    }));

    out.push(CheckTask::new("formal.c2p-divisor", move || {
        (1..=6)
            .map(|p| {
                exact(
                    "formal.c2p-closed-vs-divisor",
                    format!("p={p} order={big}"),
                    &theta::c2p_closed_formal(p, big),
                    &modular::divisor_form_c2p(p, big),
                )
            })
            .collect()
    }));

    out.push(CheckTask::new("formal.c2p-binomial", move || {
        (1..=8)
            .map(|p| {
                exact(
                    "formal.c2p-closed-vs-binomial",
                    format!("p={p} order={big}"),
                    &theta::c2p_closed_formal(p, big),
                    &theta::c2p_binomial_formal(p, big),
                )
            })
            .collect()
    }));

    out.push(CheckTask::new("formal.triple-product", move || {
        // theta4(0) = prod (1-q^{2n})(1-q^{2n-1})^2 against the defining
        // alternating-square series
        let product = qs_product(
            (1..).flat_map(|n| {
                [
                    one_minus_qk(2 * n, big),
                    one_minus_qk(2 * n - 1, big),
                    one_minus_qk(2 * n - 1, big),
                ]
            }),
            big,
        )
        .expect("unit factors");
        vec![exact(
            "formal.theta4-triple-product",
            format!("order={big}"),
            &product,
            &theta::theta4_null_series(big),
        )]
    }));

    out.push(CheckTask::new("formal.euler-product", move || {
        // prod (1 - q^k): pentagonal-number oracle — coefficient (-1)^j at
        // j(3j -+ 1)/2, zero elsewhere
        let product = qs_product((1..).map(|k| one_minus_qk(k, big)), big).expect("unit factors");
        let mut pentagonal = QSeries::zero(big);
        let mut set = |e: i64, s: i64| {
            if e >= 0 && e as usize <= big {
                pentagonal = QSeries::new(
                    (0..=big)
                        .map(|k| {
                            if k == e as usize {
                                crate::qseries::rat_i64(s)
                            } else {
                                pentagonal.coeff(k).clone()
                            }
                        })
                        .collect(),
                );
            }
        };
        set(0, 1);
        for j in 1i64.. {
            let e1 = j * (3 * j - 1) / 2;
            let e2 = j * (3 * j + 1) / 2;
            if e1 as usize > big {
                break;
            }
            let sign = if j % 2 == 0 { 1 } else { -1 };
            set(e1, sign);
            set(e2, sign);
        }
        vec![exact(
            "formal.euler-pentagonal",
            format!("order={big}"),
            &product,
            &pentagonal,
        )]
    }));

    let rr_order = order.min(40).max(30);
    out.push(CheckTask::new("formal.rogers", move || {
        let g_order = rr_order.max(60);
        let mut records = vec![
            exact(
                "formal.rogers-g-sum-vs-product",
                format!("order={g_order}"),
                &rr::rogers_g(g_order),
                &rr::rogers_g_product(g_order).expect("unit factors"),
            ),
            exact(
                "formal.rogers-h-sum-vs-product",
                format!("order={g_order}"),
                &rr::rogers_h(g_order),
                &rr::rogers_h_product(g_order).expect("unit factors"),
            ),
        ];
        let product = rr::rr_product_formal(rr_order).expect("unit factors").body;
        let cf = rr::rr_cf_formal(2 * rr_order, rr_order).expect("formal cf").body;
        records.push(exact(
            "formal.rr-cf-vs-product",
            format!("order={rr_order}"),
            &cf,
            &product,
        ));
        let hg = rr::rogers_h(rr_order).mul(
            &rr::rogers_g(rr_order)
                .inv()
                .expect("G has constant term 1"),
        );
        records.push(exact(
            "formal.rr-hg-vs-product",
            format!("order={rr_order}"),
            &hg,
            &product,
        ));
        for variant in [RrExpVariant::Sin, RrExpVariant::Cos] {
            let e = rr::rr_exp_formal(rr_order, variant).expect("formal exponent").body;
            records.push(exact(
                "formal.rr-exp-vs-product",
                format!("variant={variant:?} order={rr_order}"),
                &e,
                &product,
            ));
        }
        records
    }));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::CheckStatus;

    #[test]
    fn suite_parsing() {
        assert_eq!(Suite::parse("all"), Some(Suite::All));
        assert_eq!(Suite::parse("formal"), Some(Suite::Formal));
        assert_eq!(Suite::parse("bogus"), None);
    }

    #[test]
    fn formal_suite_is_exact() {
        let tasks = tasks(Suite::Formal, EvalConfig::default(), &[], 40);
        for task in tasks {
            for rec in task.run() {
                assert_eq!(rec.status, CheckStatus::Pass, "{}: {:?}", rec.identity, rec.note);
                assert_eq!(rec.residual, 0.0, "{}", rec.identity);
            }
        }
    }

    #[test]
    fn default_grid_is_in_half_plane() {
        for t in default_tau_grid() {
            assert!(t.tau().im > 1.0);
        }
    }
}
