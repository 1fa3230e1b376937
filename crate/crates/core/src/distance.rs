//! The Carnot-Caratheodory distance d_B, computed two ways: through the
//! geodesic coordinate map F_x (when the top block of x is nonzero) and by
//! maximizing the variational functional phi(g; .) over the closed ball
//! Omega*. The second path serves as the oracle for the first. Also the
//! homogeneous norm d_G generalizing the Koranyi norm.

use crate::config::QuadConfig;
use crate::error::{Error, Result};
use crate::group::{GroupPoint, GroupSpec};
use crate::scalar::{a_profile_prime, a_profile_unchecked, lambda_big_unchecked, norm};
use crate::solve;
use crate::special::{inv_sinc_sq, x_cot_x};

const PI: f64 = std::f64::consts::PI;

/// Geodesic parameter theta in Omega* = B(0, pi/a_l).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCoord(pub Vec<f64>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMethod {
    GeodesicCoordinates,
    SupFormula,
}

impl DistanceMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceMethod::GeodesicCoordinates => "geodesic-coordinates",
            DistanceMethod::SupFormula => "sup-formula",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub d: f64,
    pub theta: Option<ThetaCoord>,
    pub method: DistanceMethod,
}

/// phi(g; lambda) = sum_j (a_j |lam|) cot(a_j |lam|) |x_(j)|^2
///                + 4 t . lambda - 4 lambda^T A lambda.
///
/// Defined for |lam| < pi/a_l; the boundary |lam| = pi/a_l is allowed when
/// the top block of x vanishes (its singular term drops out).
pub fn phi_point(spec: &GroupSpec, g: &GroupPoint, lam: &[f64]) -> Result<f64> {
    let norms = spec.block_norms(&g.x);
    phi_point_radial(spec, &norms, &g.t, lam)
}

pub(crate) fn phi_point_radial(
    spec: &GroupSpec,
    norms: &[f64],
    t: &[f64],
    lam: &[f64],
) -> Result<f64> {
    let rho = norm(lam);
    let mut acc = 0.0;
    for (blk, &xn) in spec.blocks().iter().zip(norms) {
        if xn == 0.0 {
            continue;
        }
        let s = blk.a * rho;
        if s >= PI {
            return Err(Error::DomainError(format!(
                "phi singular: a_j |lambda| = {s} >= pi with nonzero block"
            )));
        }
        acc += x_cot_x(s) * xn * xn;
    }
    for (l, &tl) in t.iter().enumerate() {
        acc += 4.0 * tl * lam[l];
    }
    acc -= 4.0 * crate::scalar::quad_form(spec, lam);
    Ok(acc)
}

/// Forward geodesic coordinate map: t_l = theta_l (A(|theta|) + 2 b_l).
pub fn f_x_forward(spec: &GroupSpec, x: &[f64], theta: &ThetaCoord) -> Result<Vec<f64>> {
    let norms = spec.block_norms(x);
    f_x_forward_radial(spec, &norms, theta)
}

pub(crate) fn f_x_forward_radial(
    spec: &GroupSpec,
    norms: &[f64],
    theta: &ThetaCoord,
) -> Result<Vec<f64>> {
    if *norms.last().unwrap() == 0.0 {
        return Err(Error::DegenerateX);
    }
    let rho = norm(&theta.0);
    if spec.a_top() * rho >= PI {
        return Err(Error::DomainError(
            "theta outside Omega* = B(0, pi/a_l)".into(),
        ));
    }
    let a = a_profile_unchecked(spec, norms, rho);
    Ok(theta
        .0
        .iter()
        .zip(spec.b())
        .map(|(&th, &b)| th * (a + 2.0 * b))
        .collect())
}

/// Inverse of the geodesic coordinate map.
///
/// For fixed rho = |theta| the components are forced: theta_l = t_l/(A(rho)
/// + 2 b_l); rho then solves rho^2 = sum_l t_l^2/(A(rho) + 2 b_l)^2, whose
/// right side is nonincreasing while the left increases, so the root is
/// unique and bracketed on (0, pi/a_l).
pub fn f_x_inverse(spec: &GroupSpec, x: &[f64], t: &[f64]) -> Result<ThetaCoord> {
    let norms = spec.block_norms(x);
    f_x_inverse_radial(spec, &norms, t)
}

pub(crate) fn f_x_inverse_radial(spec: &GroupSpec, norms: &[f64], t: &[f64]) -> Result<ThetaCoord> {
    if *norms.last().unwrap() == 0.0 {
        return Err(Error::DegenerateX);
    }
    if t.iter().all(|&v| v == 0.0) {
        return Ok(ThetaCoord(vec![0.0; spec.m()]));
    }
    let residual = |rho: f64| {
        let a = a_profile_unchecked(spec, norms, rho);
        let rhs: f64 = t
            .iter()
            .zip(spec.b())
            .map(|(&tl, &b)| {
                let d = a + 2.0 * b;
                tl * tl / (d * d)
            })
            .sum();
        rho * rho - rhs
    };
    let residual_prime = |rho: f64| {
        let a = a_profile_unchecked(spec, norms, rho);
        let ap = a_profile_prime(spec, norms, rho);
        let mut d_rhs = 0.0;
        for (&tl, &b) in t.iter().zip(spec.b()) {
            let d = a + 2.0 * b;
            d_rhs += -2.0 * tl * tl / (d * d * d) * ap;
        }
        2.0 * rho - d_rhs
    };
    let hi = PI / spec.a_top() * (1.0 - 1e-14);
    let rho = solve::bisect_newton(residual, residual_prime, 1e-300, hi, 1e-14);
    let a = a_profile_unchecked(spec, norms, rho);
    Ok(ThetaCoord(
        t.iter()
            .zip(spec.b())
            .map(|(&tl, &b)| tl / (a + 2.0 * b))
            .collect(),
    ))
}

/// d_B(g, o): geodesic coordinates when the top block of x is nonzero, the
/// sup formula otherwise.
pub fn distance(spec: &GroupSpec, g: &GroupPoint) -> DistanceResult {
    let norms = spec.block_norms(&g.x);
    distance_radial(spec, &norms, &g.t)
}

pub(crate) fn distance_radial(spec: &GroupSpec, norms: &[f64], t: &[f64]) -> DistanceResult {
    if *norms.last().unwrap() != 0.0 {
        let theta = f_x_inverse_radial(spec, norms, t).expect("top block nonzero");
        let d2 = distance_sq_at_theta(spec, norms, &theta);
        DistanceResult {
            d: d2.max(0.0).sqrt(),
            theta: Some(theta),
            method: DistanceMethod::GeodesicCoordinates,
        }
    } else {
        let d = distance_sup_radial(spec, norms, t, &QuadConfig::default());
        DistanceResult {
            d,
            theta: None,
            method: DistanceMethod::SupFormula,
        }
    }
}

/// d_B(x, F_x(theta))^2 = sum_j (a_j |theta| / sin(a_j |theta|))^2 |x_(j)|^2
///                      + 4 sum_l b_l theta_l^2.
pub(crate) fn distance_sq_at_theta(spec: &GroupSpec, norms: &[f64], theta: &ThetaCoord) -> f64 {
    let rho = norm(&theta.0);
    let mut acc = 0.0;
    for (blk, &xn) in spec.blocks().iter().zip(norms) {
        acc += inv_sinc_sq(blk.a * rho) * xn * xn;
    }
    for (&b, &th) in spec.b().iter().zip(&theta.0) {
        acc += 4.0 * b * th * th;
    }
    acc
}

/// d_B by maximizing phi over the closed ball; the oracle path.
///
/// phi depends on lambda only through (|lambda|, t.lambda, lambda^T A
/// lambda), so for each radius r the spherical maximum of the quadratic part
/// is solved exactly (a diagonal trust-region subproblem) and the remaining
/// 1-d profile in r is maximized by a dense grid plus golden refinement.
pub fn distance_sup(spec: &GroupSpec, g: &GroupPoint, cfg: &QuadConfig) -> f64 {
    let norms = spec.block_norms(&g.x);
    distance_sup_radial(spec, &norms, &g.t, cfg)
}

pub(crate) fn distance_sup_radial(
    spec: &GroupSpec,
    norms: &[f64],
    t: &[f64],
    cfg: &QuadConfig,
) -> f64 {
    let top_zero = *norms.last().unwrap() == 0.0;
    let r_edge = if top_zero {
        PI / spec.a_top()
    } else {
        PI / spec.a_top() * (1.0 - 1e-12)
    };
    let cot_part = |r: f64| -> f64 {
        let mut acc = 0.0;
        for (blk, &xn) in spec.blocks().iter().zip(norms) {
            if xn == 0.0 {
                continue;
            }
            let s = blk.a * r;
            // with the top block zero, s < pi holds for every nonzero block
            acc += x_cot_x(s.min(PI * (1.0 - 1e-15))) * xn * xn;
        }
        acc
    };
    let profile = |r: f64| cot_part(r) + sphere_max_quadratic(t, spec.b(), r).0;
    let grid = (cfg.max_evals.min(4000) / 2).max(400);
    let (_, best) = solve::grid_golden_max(profile, 0.0, r_edge, grid, 1e-12);
    best.max(0.0).sqrt()
}

/// Maximum of q(lam) = 4 t.lam - 4 lam^T A lam over the sphere |lam| = r,
/// A = diag(b). Returns (max value, a maximizer).
///
/// KKT gives lam_l = 2 t_l/(kappa + 4 b_l) with the multiplier kappa >=
/// -4 min(b) fixed by |lam| = r; when every t_l on the minimal eigenspace
/// vanishes and the norm equation cannot be met, the leftover norm goes into
/// that eigenspace at no cost to the objective (the hard case).
pub fn sphere_max_quadratic(t: &[f64], b: &[f64], r: f64) -> (f64, Vec<f64>) {
    let m = t.len();
    if r == 0.0 {
        return (0.0, vec![0.0; m]);
    }
    let b_min = b.iter().cloned().fold(f64::INFINITY, f64::min);
    let q = |lam: &[f64]| -> f64 {
        lam.iter()
            .zip(t.iter().zip(b))
            .map(|(&l, (&tl, &bl))| 4.0 * tl * l - 4.0 * bl * l * l)
            .sum()
    };
    let norm_sq_at = |kappa: f64| -> f64 {
        t.iter()
            .zip(b)
            .map(|(&tl, &bl)| {
                if tl == 0.0 {
                    0.0
                } else {
                    let d = kappa + 4.0 * bl;
                    4.0 * tl * tl / (d * d)
                }
            })
            .sum()
    };
    let kappa0 = -4.0 * b_min;
    let min_set_has_t = t
        .iter()
        .zip(b)
        .any(|(&tl, &bl)| bl == b_min && tl != 0.0);
    let h0 = if min_set_has_t {
        f64::INFINITY
    } else {
        norm_sq_at(kappa0)
    };
    if h0 < r * r {
        // hard case: residual norm parked on the minimal eigenspace
        let mut lam: Vec<f64> = t
            .iter()
            .zip(b)
            .map(|(&tl, &bl)| {
                if bl == b_min {
                    0.0
                } else {
                    2.0 * tl / (kappa0 + 4.0 * bl)
                }
            })
            .collect();
        let res = (r * r - h0).max(0.0).sqrt();
        let slot = b.iter().position(|&bl| bl == b_min).unwrap();
        lam[slot] = res;
        return (q(&lam), lam);
    }
    // standard case: root of the (strictly decreasing) norm equation
    let t_norm = norm(t);
    let mut lo = kappa0;
    let mut hi = (2.0 * t_norm / r - 4.0 * b_min).max(kappa0 + 1.0);
    while norm_sq_at(hi) > r * r {
        hi = kappa0 + 2.0 * (hi - kappa0);
    }
    // bisection on a monotone function of kappa
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if norm_sq_at(mid) > r * r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let kappa = 0.5 * (lo + hi);
    let mut lam: Vec<f64> = t
        .iter()
        .zip(b)
        .map(|(&tl, &bl)| 2.0 * tl / (kappa + 4.0 * bl))
        .collect();
    // exact norm by rescaling (guards kappa round-off)
    let n = norm(&lam);
    if n > 0.0 {
        for v in lam.iter_mut() {
            *v *= r / n;
        }
    }
    (q(&lam), lam)
}

/// The homogeneous norm d_G: a 1-d maximization after the angular reduction
/// lambda = r t/|t| (any direction when t = 0). Homogeneous of degree one
/// under (x, t) -> (s x, s^2 t).
pub fn homogeneous_norm(spec: &GroupSpec, g: &GroupPoint) -> f64 {
    let norms = spec.block_norms(&g.x);
    homogeneous_norm_radial(spec, &norms, norm(&g.t))
}

pub(crate) fn homogeneous_norm_radial(spec: &GroupSpec, norms: &[f64], t_norm: f64) -> f64 {
    // substituted variable r' = |lambda|/a_l in [0, pi/a_l)
    let r_edge = PI / spec.a_top() * (1.0 - 1e-12);
    let profile = |r: f64| -> f64 {
        let mut acc = 4.0 * t_norm * r;
        for (blk, &xn) in spec.blocks().iter().zip(norms) {
            if xn == 0.0 {
                continue;
            }
            acc += x_cot_x(blk.a * r) * xn * xn;
        }
        lambda_big_unchecked(spec, r) * acc
    };
    let (_, best) = solve::grid_golden_max(profile, 0.0, r_edge, 2000, 1e-12);
    best.max(0.0).sqrt()
}
