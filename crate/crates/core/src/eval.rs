//! Uniform, instrumented entry point over every numeric evaluation the
//! crate offers: one request in, value plus diagnostics (terms consumed,
//! strip status, representation label) out. This is what the CLI's `eval`
//! and `bench` commands drive; library callers who only want the value use
//! the per-module functions directly.

use crate::elliptic::{self, ZnRoute};
use crate::rr::{self, RrExpVariant, RrQuotientRoute};
use crate::theta::{self, EtaRoute, ThetaKind};
use crate::{EvalConfig, EvalError, HalfPlanePoint};
use num_complex::Complex64;
use serde::Serialize;

/// Theta representation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaRep {
    Fourier,
    Product,
    Expansion,
}

/// Weierstrass-wp representation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpRep {
    /// `e3 - sum a_{2p} sin^{2p}(pi z/2)`, evaluated at `z` (value of
    /// `wp(z + tau)`).
    Expansion,
    /// Theta-based oracle at the same point `z + tau`.
    Oracle,
    /// The printed quotient form (report-only identity; see
    /// [`elliptic::wp_addition_form`]).
    Addition,
}

/// Rogers-Ramanujan route selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrRoute {
    Product,
    /// Continued-fraction convergent of the given depth.
    Cf { depth: usize },
    ExpSin,
    ExpCos,
    Theta4,
    Liu,
}

/// One evaluation request.
#[derive(Debug, Clone, Copy)]
pub enum EvalSpec {
    Theta {
        kind: ThetaKind,
        rep: ThetaRep,
        v: Complex64,
    },
    Wp {
        rep: WpRep,
        z: Complex64,
    },
    Zn {
        route: ZnRoute,
        z: Complex64,
    },
    Eta {
        route: EtaRoute,
    },
    Rr {
        route: RrRoute,
    },
}

/// Where the argument sits relative to the representation's validity strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum StripStatus {
    Inside { ratio: f64 },
    Outside { ratio: f64 },
    /// The representation converges in the whole plane (Fourier, products).
    Unrestricted,
}

impl StripStatus {
    fn from_ratio(ratio: f64) -> Self {
        if ratio < 1.0 {
            StripStatus::Inside { ratio }
        } else {
            StripStatus::Outside { ratio }
        }
    }
}

/// Value plus evaluation diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    /// `[re, im]`.
    pub value: [f64; 2],
    pub representation: String,
    /// Terms consumed before the tail criterion fired, where the
    /// representation tracks them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    pub strip: StripStatus,
}

impl Evaluation {
    pub fn value_complex(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

pub fn evaluate(
    spec: &EvalSpec,
    tau: HalfPlanePoint,
    cfg: &EvalConfig,
) -> Result<Evaluation, EvalError> {
    match *spec {
        EvalSpec::Theta { kind, rep, v } => {
            let label = format!("theta{}/{}", kind.index(), theta_rep_name(rep));
            let (value, terms, strip) = match rep {
                ThetaRep::Fourier => {
                    let (value, terms) = theta::theta_fourier_counted(kind, 0, v, tau, cfg)?;
                    (value, terms, StripStatus::Unrestricted)
                }
                ThetaRep::Product => {
                    let (value, terms) = theta::theta_product_counted(kind, v, tau, cfg)?;
                    (value, terms, StripStatus::Unrestricted)
                }
                ThetaRep::Expansion => {
                    let ratio = theta::strip_ratio(kind, v, tau);
                    let (value, terms) = theta::theta_expansion_counted(kind, v, tau, cfg)?;
                    (value, terms, StripStatus::from_ratio(ratio))
                }
            };
            Ok(Evaluation {
                value: [value.re, value.im],
                representation: label,
                terms: Some(terms),
                strip,
            })
        }
        EvalSpec::Wp { rep, z } => {
            let strip_arg =
                ((std::f64::consts::PI * z / 2.0).sin() / (std::f64::consts::PI * tau.tau() / 2.0).sin())
                    .norm();
            let (value, terms, strip, label) = match rep {
                WpRep::Expansion => {
                    let (value, terms) = elliptic::wp_expansion_counted(z, tau, cfg)?;
                    (
                        value,
                        Some(terms),
                        StripStatus::from_ratio(strip_arg),
                        "wp/expansion",
                    )
                }
                WpRep::Oracle => (
                    elliptic::wp_oracle(z + tau.tau(), tau, cfg)?,
                    None,
                    StripStatus::Unrestricted,
                    "wp/oracle",
                ),
                WpRep::Addition => (
                    elliptic::wp_addition_form(z, tau, cfg)?,
                    None,
                    StripStatus::from_ratio(strip_arg),
                    "wp/addition",
                ),
            };
            Ok(Evaluation {
                value: [value.re, value.im],
                representation: label.to_string(),
                terms,
                strip,
            })
        }
        EvalSpec::Zn { route, z } => {
            let (value, terms) = elliptic::jacobi_zn_counted(z, tau, cfg, route)?;
            let strip = match route {
                ZnRoute::Closed => {
                    let (_, big_k) = elliptic::modulus_from_tau(tau, cfg)?;
                    let v = z / (2.0 * big_k);
                    StripStatus::from_ratio(
                        ((std::f64::consts::PI * v).sin()
                            / (std::f64::consts::PI * tau.tau() / 2.0).sin())
                        .norm(),
                    )
                }
                ZnRoute::Fourier => StripStatus::Unrestricted,
            };
            Ok(Evaluation {
                value: [value.re, value.im],
                representation: format!("zn/{}", zn_route_name(route)),
                terms: Some(terms),
                strip,
            })
        }
        EvalSpec::Eta { route } => {
            let value = theta::dedekind_eta(tau, cfg, route)?;
            Ok(Evaluation {
                value: [value.re, value.im],
                representation: format!("eta/{}", eta_route_name(route)),
                terms: None,
                strip: StripStatus::Unrestricted,
            })
        }
        EvalSpec::Rr { route } => {
            let value = match route {
                RrRoute::Product => rr::rr_product(tau, cfg)?.value(tau),
                RrRoute::Cf { depth } => rr::rr_cf(tau, depth)?.value(tau),
                RrRoute::ExpSin => rr::rr_exp(tau, cfg, RrExpVariant::Sin)?.value(tau),
                RrRoute::ExpCos => rr::rr_exp(tau, cfg, RrExpVariant::Cos)?.value(tau),
                RrRoute::Theta4 => {
                    rr::rr_theta_quotient(tau, cfg, RrQuotientRoute::Theta4)?.value(tau)
                }
                RrRoute::Liu => {
                    rr::rr_theta_quotient(tau, cfg, RrQuotientRoute::LiuTheta1)?.value(tau)
                }
            };
            Ok(Evaluation {
                value: [value.re, value.im],
                representation: format!("rr/{}", rr_route_name(route)),
                terms: None,
                strip: StripStatus::Unrestricted,
            })
        }
    }
}

fn theta_rep_name(rep: ThetaRep) -> &'static str {
    match rep {
        ThetaRep::Fourier => "fourier",
        ThetaRep::Product => "product",
        ThetaRep::Expansion => "expansion",
    }
}

fn zn_route_name(route: ZnRoute) -> &'static str {
    match route {
        ZnRoute::Closed => "closed",
        ZnRoute::Fourier => "fourier",
    }
}

fn eta_route_name(route: EtaRoute) -> &'static str {
    match route {
        EtaRoute::Product => "product",
        EtaRoute::Expansion => "expansion",
    }
}

fn rr_route_name(route: RrRoute) -> &'static str {
    match route {
        RrRoute::Product => "product",
        RrRoute::Cf { .. } => "cf",
        RrRoute::ExpSin => "exp-sin",
        RrRoute::ExpCos => "exp-cos",
        RrRoute::Theta4 => "theta4",
        RrRoute::Liu => "liu",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instrumented_theta_matches_direct_call() {
        let tau = HalfPlanePoint::from_parts(0.0, 2.0).unwrap();
        let cfg = EvalConfig::default();
        let v = Complex64::new(0.1, 0.0);
        let spec = EvalSpec::Theta {
            kind: ThetaKind::Four,
            rep: ThetaRep::Expansion,
            v,
        };
        let e = evaluate(&spec, tau, &cfg).unwrap();
        let direct = theta::theta_expansion(ThetaKind::Four, v, tau, &cfg).unwrap();
        assert_eq!(e.value_complex(), direct);
        assert!(matches!(e.strip, StripStatus::Inside { ratio } if ratio < 0.1));
        assert!(e.terms.unwrap() > 0);
    }

    #[test]
    fn rr_routes_agree_through_eval() {
        let tau = HalfPlanePoint::from_parts(0.0, 1.5).unwrap();
        let cfg = EvalConfig::default();
        let product = evaluate(&EvalSpec::Rr { route: RrRoute::Product }, tau, &cfg)
            .unwrap()
            .value_complex();
        let cf = evaluate(
            &EvalSpec::Rr {
                route: RrRoute::Cf { depth: 60 },
            },
            tau,
            &cfg,
        )
        .unwrap()
        .value_complex();
        assert!((product - cf).norm() <= 1e-10 * product.norm());
    }
}
