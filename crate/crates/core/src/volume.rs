//! Ball volumes, doubling ratios and the moment integrals.
//!
//! The ball volume is computed in (x, theta) coordinates: the x-integral
//! reduces to the block norms (the integrand is block-radial), and for each
//! x the center slice {t : d_B(x, t) < R} is measured exactly through the
//! geodesic coordinate map, whose Jacobian has rank-one structure
//! DF_x = diag(A + 2 b_l) + (A'/rho) theta theta^T. For m = 1 and m = 2 the
//! radial part of the slice integral has a closed antiderivative, so the
//! slice costs one boundary root per angular node. A stratified Monte Carlo
//! estimator over x provides the independent second route.

use crate::config::QuadConfig;
use crate::distance::{distance_radial, ThetaCoord};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::quad::{self, EvalCounter};
use crate::rng;
use crate::scalar::{a_profile_prime_over_rho, a_profile_unchecked, norm};
use crate::solve;
use crate::special::{
    euclid_ball_volume, inv_sinc_sq, ln_gamma, sum_psi, unit_sphere_area, x_cot_x,
};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    ThetaQuadrature,
    MonteCarlo,
}

impl VolumeMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            VolumeMethod::ThetaQuadrature => "theta-quadrature",
            VolumeMethod::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VolumeResult {
    pub value: f64,
    pub abs_error: f64,
    pub method: VolumeMethod,
}

#[derive(Debug, Clone)]
pub struct DoublingResult {
    pub ratio: f64,
    pub abs_error: f64,
}

/// det DF_x(theta) from the rank-one structure:
/// det = (1 + (A'(rho)/rho) sum_l theta_l^2/(A + 2 b_l)) prod_l (A + 2 b_l).
pub fn jacobian_det_fx(spec: &GroupSpec, x: &[f64], theta: &ThetaCoord) -> Result<f64> {
    let norms = spec.block_norms(x);
    jacobian_det_radial(spec, &norms, &theta.0)
}

pub(crate) fn jacobian_det_radial(spec: &GroupSpec, norms: &[f64], theta: &[f64]) -> Result<f64> {
    if *norms.last().unwrap() == 0.0 {
        return Err(Error::DegenerateX);
    }
    let rho = norm(theta);
    if spec.a_top() * rho >= PI {
        return Err(Error::DomainError("theta outside Omega*".into()));
    }
    let a = a_profile_unchecked(spec, norms, rho);
    let ap_over_rho = a_profile_prime_over_rho(spec, norms, rho);
    let mut prod = 1.0;
    let mut corr = 0.0;
    for (&b, &th) in spec.b().iter().zip(theta) {
        let psi = a + 2.0 * b;
        prod *= psi;
        corr += th * th / psi;
    }
    Ok(prod * (1.0 + ap_over_rho * corr))
}

/// Squared radial distance profile D(rho)^2 = sum_j (a_j rho/sin)^2 |x_(j)|^2.
fn dist_profile_sq(spec: &GroupSpec, norms: &[f64], rho: f64) -> f64 {
    spec.blocks()
        .iter()
        .zip(norms)
        .map(|(blk, &xn)| inv_sinc_sq(blk.a * rho) * xn * xn)
        .sum()
}

fn dist_profile_sq_prime(spec: &GroupSpec, norms: &[f64], rho: f64) -> f64 {
    // d/drho (a rho / sin)^2 = (2/rho) (..)^2 (1 - s cot s); only steers
    // Newton, so the cancelling small-s form is fine
    if rho == 0.0 {
        return 0.0;
    }
    spec.blocks()
        .iter()
        .zip(norms)
        .map(|(blk, &xn)| {
            let s = blk.a * rho;
            2.0 / rho * inv_sinc_sq(s) * (1.0 - x_cot_x(s)) * xn * xn
        })
        .sum()
}

/// Boundary root of D(rho)^2 + 4 c rho^2 = R^2 on (0, pi/a_l); requires
/// R > |x| and a nonzero top block so the left side sweeps (|x|^2, inf).
fn boundary_root(spec: &GroupSpec, norms: &[f64], c: f64, r_ball: f64) -> f64 {
    let target = r_ball * r_ball;
    let hi = PI / spec.a_top() * (1.0 - 1e-14);
    solve::bisect_newton(
        |rho| dist_profile_sq(spec, norms, rho) + 4.0 * c * rho * rho - target,
        |rho| dist_profile_sq_prime(spec, norms, rho) + 8.0 * c * rho,
        1e-300,
        hi,
        1e-14,
    )
}

/// W(rho) = int_0^rho s^2 A'(s) ds, in closed form:
/// rho^2 A(rho) - sum_j |x_(j)|^2 (a_j rho)^2 sum_psi(a_j rho).
fn w_antiderivative(spec: &GroupSpec, norms: &[f64], rho: f64) -> f64 {
    let mut acc = rho * rho * a_profile_unchecked(spec, norms, rho);
    for (blk, &xn) in spec.blocks().iter().zip(norms) {
        let s = blk.a * rho;
        acc -= xn * xn * s * s * sum_psi(s);
    }
    acc
}

/// Measure of the center slice {t in R^m : d_B(x, t) < R}; zero when
/// R <= |x|. Exact radial antiderivatives for m <= 2, polar quadrature for
/// m = 3.
pub fn slice_volume(spec: &GroupSpec, x: &[f64], r_ball: f64) -> Result<f64> {
    let norms = spec.block_norms(x);
    slice_volume_blocks(spec, &norms, r_ball)
}

/// Same, from precomputed block norms.
pub fn slice_volume_blocks(spec: &GroupSpec, norms: &[f64], r_ball: f64) -> Result<f64> {
    if *norms.last().unwrap() == 0.0 {
        return Err(Error::DegenerateX);
    }
    let x_sq: f64 = norms.iter().map(|v| v * v).sum();
    if r_ball * r_ball <= x_sq {
        return Ok(0.0);
    }
    let b = spec.b();
    match spec.m() {
        1 => {
            let theta = boundary_root(spec, norms, b[0], r_ball);
            let a = a_profile_unchecked(spec, norms, theta);
            Ok(2.0 * theta * (a + 2.0 * b[0]))
        }
        2 => Ok(slice_m2(spec, norms, r_ball)),
        3 => Ok(slice_m3(spec, norms, r_ball)),
        m => Err(Error::Unsupported(format!(
            "slice volume implemented for m <= 3 (got m = {m})"
        ))),
    }
}

/// m = 2: after the polar split theta = rho omega, the radial integral has
/// the closed form rho^2 Psi_1 Psi_2 / 2 + 2(u - 1/2)(b_2 - b_1) W(rho) with
/// u = omega_1^2, and the angular average is a Gauss-Chebyshev sum in u.
fn slice_m2(spec: &GroupSpec, norms: &[f64], r_ball: f64) -> f64 {
    let b = spec.b();
    let inner = |u: f64| -> f64 {
        let c = b[0] * u + b[1] * (1.0 - u);
        let rho = boundary_root(spec, norms, c, r_ball);
        let a = a_profile_unchecked(spec, norms, rho);
        rho * rho * (a + 2.0 * b[0]) * (a + 2.0 * b[1]) / 2.0
            + 2.0 * (u - 0.5) * (b[1] - b[0]) * w_antiderivative(spec, norms, rho)
    };
    if b[0] == b[1] {
        // isotropic slice: the angular average collapses
        return 2.0 * PI * inner(0.5);
    }
    // doubling Gauss-Chebyshev until stable
    let mut k = 16usize;
    let mut prev = f64::NAN;
    loop {
        let mut acc = 0.0;
        for i in 1..=k {
            let u = 0.5 * (1.0 + ((2 * i - 1) as f64 * PI / (2 * k) as f64).cos());
            acc += inner(u);
        }
        let val = 2.0 * (PI / k as f64) * acc;
        if (val - prev).abs() <= 1e-10 * val.abs() + 1e-300 || k >= 512 {
            return val;
        }
        prev = val;
        k *= 2;
    }
}

/// m = 3: product quadrature over the sphere, radial main term in closed
/// form plus two short Gauss integrals for the anisotropy correction.
fn slice_m3(spec: &GroupSpec, norms: &[f64], r_ball: f64) -> f64 {
    let b = spec.b();
    if b[0] == b[1] && b[1] == b[2] {
        // isotropic: anisotropy corrections vanish, one radial root serves
        let rho = boundary_root(spec, norms, b[0], r_ball);
        let a = a_profile_unchecked(spec, norms, rho);
        return 4.0 * PI * rho.powi(3) / 3.0
            * (a + 2.0 * b[0])
            * (a + 2.0 * b[1])
            * (a + 2.0 * b[2]);
    }
    let s_sum: Vec<f64> = (0..3)
        .map(|l| {
            b.iter()
                .enumerate()
                .filter(|&(i, _)| i != l)
                .map(|(_, &v)| v)
                .sum()
        })
        .collect();
    let p_prod: Vec<f64> = (0..3)
        .map(|l| {
            b.iter()
                .enumerate()
                .filter(|&(i, _)| i != l)
                .map(|(_, &v)| v)
                .product()
        })
        .collect();
    let inner = |omega_sq: [f64; 3]| -> f64 {
        let c: f64 = b.iter().zip(&omega_sq).map(|(&bl, &w)| bl * w).sum();
        let rho = boundary_root(spec, norms, c, r_ball);
        let a = a_profile_unchecked(spec, norms, rho);
        let main = rho.powi(3) / 3.0 * (a + 2.0 * b[0]) * (a + 2.0 * b[1]) * (a + 2.0 * b[2]);
        let c_s: f64 = (0..3).map(|l| (omega_sq[l] - 1.0 / 3.0) * s_sum[l]).sum();
        let c_p: f64 = (0..3).map(|l| (omega_sq[l] - 1.0 / 3.0) * p_prod[l]).sum();
        if c_s == 0.0 && c_p == 0.0 {
            return main;
        }
        // I1 = int rho^3 A' A, I0 = int rho^3 A' over [0, rho]
        let mut f1 = |s: f64| {
            let ap = s * a_profile_prime_over_rho(spec, norms, s);
            s * s * s * ap * a_profile_unchecked(spec, norms, s)
        };
        let mut f0 = |s: f64| {
            let ap = s * a_profile_prime_over_rho(spec, norms, s);
            s * s * s * ap
        };
        let i1 = quad::gl16(&mut f1, 0.0, rho);
        let i0 = quad::gl16(&mut f0, 0.0, rho);
        main + 2.0 * c_s * i1 + 4.0 * c_p * i0
    };
    // Gauss-Legendre in cos(phi), trapezoid in azimuth
    let n_a = 24usize;
    let mut acc = 0.0;
    for i in 0..8 {
        for &sign in &[-1.0f64, 1.0] {
            let c = sign * quad::GL16_X[i];
            let w_c = quad::GL16_W[i];
            let s_phi = (1.0 - c * c).max(0.0).sqrt();
            let mut ring = 0.0;
            for j in 0..n_a {
                let alpha = 2.0 * PI * j as f64 / n_a as f64;
                let w1 = s_phi * alpha.cos();
                let w2 = s_phi * alpha.sin();
                ring += inner([w1 * w1, w2 * w2, c * c]);
            }
            acc += w_c * ring * (2.0 * PI / n_a as f64);
        }
    }
    acc
}

/// Monte Carlo estimate of the slice through the theta-box: Theta sits in
/// the product of the per-axis boundary roots, and the integrand is the
/// Jacobian determinant. Works for every m; used as an independent check.
pub fn slice_volume_mc_box(
    spec: &GroupSpec,
    norms: &[f64],
    r_ball: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if *norms.last().unwrap() == 0.0 {
        return Err(Error::DegenerateX);
    }
    let x_sq: f64 = norms.iter().map(|v| v * v).sum();
    if r_ball * r_ball <= x_sq {
        return Ok(0.0);
    }
    let b = spec.b();
    let m = spec.m();
    let theta_max: Vec<f64> = b
        .iter()
        .map(|&bl| boundary_root(spec, norms, bl, r_ball))
        .collect();
    let theta0 = boundary_root(spec, norms, 0.0, r_ball);
    let mut rng = rng::stream(seed, 0);
    let box_vol: f64 = theta_max.iter().map(|&t| 2.0 * t).product();
    let mut acc = 0.0;
    let mut theta = vec![0.0; m];
    for _ in 0..samples {
        for th in theta.iter_mut().zip(&theta_max) {
            *th.0 = th.1 * (2.0 * rng.gen::<f64>() - 1.0);
        }
        let rho = norm(&theta);
        if rho >= theta0 {
            continue;
        }
        let d_sq = dist_profile_sq(spec, norms, rho)
            + 4.0
                * b.iter()
                    .zip(&theta)
                    .map(|(&bl, &th)| bl * th * th)
                    .sum::<f64>();
        if d_sq < r_ball * r_ball {
            acc += jacobian_det_radial(spec, norms, &theta)?;
        }
    }
    Ok(box_vol * acc / samples as f64)
}

/// |B_B(o, R)| by reduction to the block norms plus the exact slice measure.
pub fn ball_volume(spec: &GroupSpec, r_ball: f64, cfg: &QuadConfig) -> Result<VolumeResult> {
    if !(r_ball > 0.0) {
        return Err(Error::DomainError("ball radius must be positive".into()));
    }
    let counter = EvalCounter::new(cfg.max_evals);
    let sphere_factor: f64 = spec
        .blocks()
        .iter()
        .map(|blk| unit_sphere_area(2 * blk.k))
        .product();
    let slice = |block_norms: &[f64]| -> f64 {
        slice_volume_blocks(spec, block_norms, r_ball).expect("top block nonzero in interior")
    };
    let (integral, err) =
        block_radial_integral(spec, r_ball, &slice, cfg.rel_tol, cfg.abs_tol, &counter)?;
    let value = sphere_factor * integral;
    Ok(VolumeResult {
        value,
        abs_error: sphere_factor * err + 2.0 * cfg.rel_tol * value.abs(),
        method: VolumeMethod::ThetaQuadrature,
    })
}

/// Integral of f(block norms) over the ball {|x| < R} of R^{2n}, divided by
/// the product of the block sphere areas: hyperspherical coordinates with
/// the substitution |x| = R sin(psi), which smooths the (R^2 - |x|^2)^{m/2}
/// edge behavior of slice integrands.
fn block_radial_integral<F: Fn(&[f64]) -> f64>(
    spec: &GroupSpec,
    r_ball: f64,
    f: &F,
    rel: f64,
    abs: f64,
    counter: &EvalCounter,
) -> Result<(f64, f64)> {
    let two_n = 2 * spec.n() as i32;
    match spec.ell() {
        1 => quad::adaptive(
            &mut |psi: f64| {
                let xi = r_ball * psi.sin();
                xi.powi(two_n - 1) * f(&[xi]) * r_ball * psi.cos()
            },
            0.0,
            PI / 2.0,
            rel,
            abs,
            counter,
        ),
        2 => {
            let k1 = 2 * spec.blocks()[0].k as i32 - 1;
            let k2 = 2 * spec.blocks()[1].k as i32 - 1;
            quad::adaptive(
                &mut |psi: f64| {
                    let xi = r_ball * psi.sin();
                    let (inner, _) = quad::adaptive(
                        &mut |alpha: f64| {
                            let (s, c) = alpha.sin_cos();
                            f(&[xi * c, xi * s]) * c.powi(k1) * s.powi(k2)
                        },
                        0.0,
                        PI / 2.0,
                        rel * 0.25,
                        abs,
                        counter,
                    )
                    .unwrap_or((0.0, 0.0));
                    xi.powi(two_n - 1) * inner * r_ball * psi.cos()
                },
                0.0,
                PI / 2.0,
                rel,
                abs,
                counter,
            )
        }
        3 => {
            let k1 = 2 * spec.blocks()[0].k as i32 - 1;
            let k2 = 2 * spec.blocks()[1].k as i32 - 1;
            let k3 = 2 * spec.blocks()[2].k as i32 - 1;
            quad::adaptive(
                &mut |psi: f64| {
                    let xi = r_ball * psi.sin();
                    let (inner, _) = quad::adaptive(
                        &mut |phi: f64| {
                            let (sp, cp) = phi.sin_cos();
                            let (ring, _) = quad::adaptive(
                                &mut |alpha: f64| {
                                    let (sa, ca) = alpha.sin_cos();
                                    f(&[xi * sp * ca, xi * sp * sa, xi * cp])
                                        * (sp * ca).powi(k1)
                                        * (sp * sa).powi(k2)
                                        * cp.powi(k3)
                                },
                                0.0,
                                PI / 2.0,
                                rel * 0.25,
                                abs,
                                counter,
                            )
                            .unwrap_or((0.0, 0.0));
                            ring * sp
                        },
                        0.0,
                        PI / 2.0,
                        rel * 0.25,
                        abs,
                        counter,
                    )
                    .unwrap_or((0.0, 0.0));
                    xi.powi(two_n - 1) * inner * r_ball * psi.cos()
                },
                0.0,
                PI / 2.0,
                rel,
                abs,
                counter,
            )
        }
        l => Err(Error::Unsupported(format!(
            "block-radial reduction implemented for l <= 3 (got l = {l})"
        ))),
    }
}

/// Stratified Monte Carlo over x (strata in |x|, Dirichlet split across
/// blocks), reporting a 3-sigma error bar. Deterministic: stratum i draws
/// from its own stream keyed by (seed, i); the reduction runs in stratum
/// order regardless of the parallel schedule.
pub fn ball_volume_mc(spec: &GroupSpec, r_ball: f64, cfg: &QuadConfig) -> Result<VolumeResult> {
    if !(r_ball > 0.0) {
        return Err(Error::DomainError("ball radius must be positive".into()));
    }
    if cfg.mc_samples < 1000 {
        return Err(Error::BudgetExceeded(format!(
            "mc_samples = {} below the minimum 1000",
            cfg.mc_samples
        )));
    }
    let n_strata = 32usize.min(cfg.mc_samples / 100).max(1);
    let per = cfg.mc_samples / n_strata;
    let two_n = 2.0 * spec.n() as f64;
    let shapes: Vec<f64> = spec.blocks().iter().map(|blk| blk.k as f64).collect();
    let results: Vec<(f64, f64)> = (0..n_strata)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(cfg.seed, i as u64);
            let gammas: Vec<Gamma<f64>> =
                shapes.iter().map(|&k| Gamma::new(k, 1.0).unwrap()).collect();
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let mut norms = vec![0.0; shapes.len()];
            for _ in 0..per {
                // |x| within the equal-volume shell i
                let u: f64 = rng.gen();
                let xi = r_ball * ((i as f64 + u) / n_strata as f64).powf(1.0 / two_n);
                // block split of |x|^2 ~ Dirichlet(k_1, ..., k_l)
                let mut total = 0.0;
                for (j, g) in gammas.iter().enumerate() {
                    norms[j] = g.sample(&mut rng);
                    total += norms[j];
                }
                for v in norms.iter_mut() {
                    *v = xi * (*v / total).sqrt();
                }
                let s = if *norms.last().unwrap() > 0.0 {
                    slice_volume_blocks(spec, &norms, r_ball).unwrap_or(0.0)
                } else {
                    0.0
                };
                sum += s;
                sum_sq += s * s;
            }
            let mean = sum / per as f64;
            let var = (sum_sq / per as f64 - mean * mean).max(0.0) / per as f64;
            (mean, var)
        })
        .collect();
    let ball_x = euclid_ball_volume(2 * spec.n(), r_ball);
    let w = 1.0 / n_strata as f64;
    let mean: f64 = results.iter().map(|(m, _)| w * m).sum();
    let var: f64 = results.iter().map(|(_, v)| w * w * v).sum();
    Ok(VolumeResult {
        value: ball_x * mean,
        abs_error: 3.0 * ball_x * var.sqrt(),
        method: VolumeMethod::MonteCarlo,
    })
}

/// The closed-form volume estimate:
/// |B_{R^{2n+m}}(0, R)| prod_l (R^2 C_H/12 + b_l)^{1/2}.
pub fn closed_form_estimate(spec: &GroupSpec, r_ball: f64) -> f64 {
    let mut v = euclid_ball_volume(2 * spec.n() + spec.m(), r_ball);
    for &b in spec.b() {
        v *= (r_ball * r_ball * spec.c_h() / 12.0 + b).sqrt();
    }
    v
}

/// |B(o, 2R)| / |B(o, R)| with propagated error.
pub fn doubling_ratio(spec: &GroupSpec, r_ball: f64, cfg: &QuadConfig) -> Result<DoublingResult> {
    let v2 = ball_volume(spec, 2.0 * r_ball, cfg)?;
    let v1 = ball_volume(spec, r_ball, cfg)?;
    let ratio = v2.value / v1.value;
    let rel = (v2.abs_error / v2.value).hypot(v1.abs_error / v1.value);
    Ok(DoublingResult {
        ratio,
        abs_error: ratio * rel,
    })
}

/// D_nu = average of |Wx|^nu over the unit ball of R^{2n}.
///
/// Factorizes as E[s^{nu/2}] E[(sum a_j^2 p_j)^{nu/2}] with s = |x|^2 and
/// p ~ Dirichlet(k_1, ..., k_l); the radial part is 2n/(2n + nu) exactly
/// and the Dirichlet part is an (l-1)-dimensional integral.
pub fn moment_dnu(spec: &GroupSpec, nu: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::DomainError("moment order nu must be >= 0".into()));
    }
    let two_n = 2.0 * spec.n() as f64;
    let radial = two_n / (two_n + nu);
    Ok(radial * dirichlet_moment(spec, |w| w.powf(nu / 2.0))?)
}

/// E[f(sum_j a_j^2 p_j)] under p ~ Dirichlet(k_1, ..., k_l).
fn dirichlet_moment<F: Fn(f64) -> f64>(spec: &GroupSpec, f: F) -> Result<f64> {
    let a_sq: Vec<f64> = spec.blocks().iter().map(|b| b.a * b.a).collect();
    let k: Vec<f64> = spec.blocks().iter().map(|b| b.k as f64).collect();
    let counter = EvalCounter::new(4_000_000);
    match spec.ell() {
        1 => Ok(f(a_sq[0])),
        2 => {
            let ln_norm = ln_gamma(k[0] + k[1]) - ln_gamma(k[0]) - ln_gamma(k[1]);
            let (v, _) = quad::adaptive(
                &mut |p: f64| {
                    f(a_sq[0] * p + a_sq[1] * (1.0 - p))
                        * p.powf(k[0] - 1.0)
                        * (1.0 - p).powf(k[1] - 1.0)
                },
                0.0,
                1.0,
                1e-12,
                1e-15,
                &counter,
            )?;
            Ok(v * ln_norm.exp())
        }
        3 => {
            let ln_norm =
                ln_gamma(k[0] + k[1] + k[2]) - ln_gamma(k[0]) - ln_gamma(k[1]) - ln_gamma(k[2]);
            let (v, _) = quad::adaptive(
                &mut |p1: f64| {
                    let (inner, _) = quad::adaptive(
                        &mut |p2: f64| {
                            let p3 = 1.0 - p1 - p2;
                            f(a_sq[0] * p1 + a_sq[1] * p2 + a_sq[2] * p3)
                                * p2.powf(k[1] - 1.0)
                                * p3.powf(k[2] - 1.0)
                        },
                        0.0,
                        1.0 - p1,
                        1e-11,
                        1e-15,
                        &counter,
                    )
                    .unwrap_or((0.0, 0.0));
                    inner * p1.powf(k[0] - 1.0)
                },
                0.0,
                1.0,
                1e-11,
                1e-15,
                &counter,
            )?;
            Ok(v * ln_norm.exp())
        }
        l => Err(Error::Unsupported(format!(
            "moment reduction implemented for l <= 3 (got l = {l})"
        ))),
    }
}

/// Average of prod_l (|Wx|^2 + beta_l)^alpha over the unit ball: the
/// quantity whose two-sided comparison against prod (C_H + beta_l)^alpha
/// the moment bounds assert.
pub fn moment_product(spec: &GroupSpec, alpha: f64, beta: &[f64]) -> Result<f64> {
    if beta.len() != spec.m() {
        return Err(Error::DomainError("beta must have length m".into()));
    }
    let n = spec.n() as f64;
    let counter = EvalCounter::new(4_000_000);
    // |x|^2 = s has density n s^{n-1} on (0,1); |Wx|^2 = s * W(p)
    let (v, _) = quad::adaptive(
        &mut |s: f64| {
            let inner = dirichlet_moment(spec, |w| {
                beta.iter().map(|&bl| (s * w + bl).powf(alpha)).product()
            })
            .unwrap_or(0.0);
            n * s.powf(n - 1.0) * inner
        },
        0.0,
        1.0,
        1e-10,
        1e-14,
        &counter,
    )?;
    Ok(v)
}

/// int_0^1 (1 - r^2)^{m/2} r^{2n+v-1} dr = B(n + v/2, m/2 + 1)/2, via
/// log-gamma.
pub fn beta_integral(n: usize, m: usize, v: f64) -> Result<f64> {
    if n < 1 || m < 1 || !(0.0..=10.0 * m as f64).contains(&v) {
        return Err(Error::DomainError(format!(
            "beta_integral requires n >= 1, m >= 1, 0 <= v <= 10m (got n={n}, m={m}, v={v})"
        )));
    }
    let a = n as f64 + v / 2.0;
    let b = m as f64 / 2.0 + 1.0;
    Ok(0.5 * (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

/// Volume of the homogeneous-norm ball {g : d_G(g) < R}.
///
/// The t-slice of the d_G ball is a Euclidean m-ball whose radius T(x)
/// solves d_G(x, T) = R; since the defining sup is affine in |t|, the
/// boundary value is T = min_r (R^2 - Lambda(r) c(r)) / (4 r Lambda(r)).
/// Degree-one homogeneity is exact, so the volume is computed at R = 1 and
/// rescaled.
pub fn ball_volume_dg(spec: &GroupSpec, r_ball: f64, cfg: &QuadConfig) -> Result<VolumeResult> {
    if !(r_ball > 0.0) {
        return Err(Error::DomainError("ball radius must be positive".into()));
    }
    // normalized spec (a_l = 1): vol_spec(R) = a_l^m R^{2n+2m} vol_norm(1)
    let ns = spec.normalize();
    let counter = EvalCounter::new(cfg.max_evals);
    let sphere_factor: f64 = ns
        .blocks()
        .iter()
        .map(|blk| unit_sphere_area(2 * blk.k))
        .product();
    let t_ball = euclid_ball_volume(ns.m(), 1.0);
    let m = ns.m() as i32;
    let t_radius_pow_m = |norms: &[f64]| -> f64 {
        let profile = |r: f64| -> f64 {
            let lam = crate::scalar::lambda_big_unchecked(&ns, r);
            let c: f64 = ns
                .blocks()
                .iter()
                .zip(norms)
                .map(|(blk, &xn)| x_cot_x((blk.a * r).min(PI * (1.0 - 1e-15))) * xn * xn)
                .sum();
            -((1.0 - lam * c) / (4.0 * r * lam))
        };
        let (_, neg_min) = solve::grid_golden_max(profile, 1e-6, PI * (1.0 - 1e-9), 600, 1e-10);
        (-neg_min).max(0.0).powi(m)
    };
    let (integral, err) =
        block_radial_integral(&ns, 1.0, &t_radius_pow_m, cfg.rel_tol, cfg.abs_tol, &counter)?;
    let unit = sphere_factor * t_ball * integral;
    let scale = spec.a_top().powi(m) * r_ball.powi(2 * spec.n() as i32 + 2 * m);
    Ok(VolumeResult {
        value: unit * scale,
        abs_error: (sphere_factor * t_ball * err + 2.0 * cfg.rel_tol * unit.abs()) * scale,
        method: VolumeMethod::ThetaQuadrature,
    })
}

/// Closed-form comparison value |B_{R^{2n+m}}(0, R)| (C_H/8)^{m/2} R^m.
pub fn dg_closed_form(spec: &GroupSpec, r_ball: f64) -> f64 {
    euclid_ball_volume(2 * spec.n() + spec.m(), r_ball)
        * (spec.c_h() / 8.0).powf(spec.m() as f64 / 2.0)
        * r_ball.powi(spec.m() as i32)
}

/// Direct measure of the m = 1 slice through the distance function itself:
/// the slice is the interval (-t*, t*) with d(x, (0..t*)) = R. Independent
/// oracle for `slice_volume`.
pub fn slice_measure_via_distance(spec: &GroupSpec, norms: &[f64], r_ball: f64) -> Result<f64> {
    if spec.m() != 1 {
        return Err(Error::Unsupported(
            "distance-based slice oracle is m = 1 only".into(),
        ));
    }
    if *norms.last().unwrap() == 0.0 {
        return Err(Error::DegenerateX);
    }
    let x_sq: f64 = norms.iter().map(|v| v * v).sum();
    if r_ball * r_ball <= x_sq {
        return Ok(0.0);
    }
    // bracket t*: expand until d > R
    let mut hi = 1.0;
    while distance_radial(spec, norms, &[hi]).d < r_ball {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoConvergence("slice bracket expansion failed".into()));
        }
    }
    let t_star = solve::bisect(
        |t| distance_radial(spec, norms, &[t]).d - r_ball,
        0.0,
        hi,
        1e-13 * hi.max(1.0),
    );
    Ok(2.0 * t_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::new_spec;
    use approx::assert_relative_eq;

    fn h21() -> GroupSpec {
        new_spec(&[(1.0, 1)], 1, &[0.0], None).unwrap()
    }

    fn g2(b: f64) -> GroupSpec {
        new_spec(&[(0.5, 1), (1.0, 1)], 1, &[b], None).unwrap()
    }

    #[test]
    fn jacobian_at_zero_matches_identity() {
        // det DF_x(0) = 6^{-m} prod (|Wx|^2 + 12 b_l)
        let s = new_spec(&[(0.5, 2), (1.0, 2)], 2, &[0.3, 2.0], None).unwrap();
        let x = [0.4, -0.2, 0.9, 0.1, 0.5, -0.6, 0.2, 0.3];
        let det = jacobian_det_fx(&s, &x, &ThetaCoord(vec![0.0, 0.0])).unwrap();
        let wx2 = s.wx_norm(&x).powi(2);
        let expect = (wx2 + 12.0 * 0.3) * (wx2 + 12.0 * 2.0) / 36.0;
        assert_relative_eq!(det, expect, max_relative = 1e-12);
    }

    #[test]
    fn jacobian_matches_fd_m1() {
        // m = 1, b = 0: det = d/dtheta [theta A(theta)]
        let s = g2(0.0);
        let x = [0.3, -0.4, 0.8, 0.1];
        let th = 0.9;
        let det = jacobian_det_fx(&s, &x, &ThetaCoord(vec![th])).unwrap();
        let h = 1e-6;
        let tp = crate::distance::f_x_forward(&s, &x, &ThetaCoord(vec![th + h])).unwrap()[0];
        let tm = crate::distance::f_x_forward(&s, &x, &ThetaCoord(vec![th - h])).unwrap()[0];
        assert_relative_eq!(det, (tp - tm) / (2.0 * h), max_relative = 1e-7);
    }

    #[test]
    fn jacobian_matches_fd_m2() {
        let s = new_spec(&[(0.5, 2), (1.0, 2)], 2, &[0.3, 2.0], None).unwrap();
        let x = [0.4, -0.2, 0.9, 0.1, 0.5, -0.6, 0.2, 0.3];
        let th = [0.7, -0.4];
        let det = jacobian_det_fx(&s, &x, &ThetaCoord(th.to_vec())).unwrap();
        let h = 1e-6;
        let mut j = [[0.0; 2]; 2];
        for col in 0..2 {
            let mut tp = th;
            tp[col] += h;
            let mut tm = th;
            tm[col] -= h;
            let fp = crate::distance::f_x_forward(&s, &x, &ThetaCoord(tp.to_vec())).unwrap();
            let fm = crate::distance::f_x_forward(&s, &x, &ThetaCoord(tm.to_vec())).unwrap();
            for row in 0..2 {
                j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        let fd_det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        assert_relative_eq!(det, fd_det, max_relative = 1e-6);
    }

    #[test]
    fn jacobian_positive_on_grid() {
        let s = new_spec(&[(0.5, 2), (1.0, 2)], 2, &[0.0, 1.0], None).unwrap();
        let norms = [0.8, 1.1];
        for i in 0..40 {
            for j in 0..40 {
                let th1 = -3.0 + 6.0 * i as f64 / 39.0;
                let th2 = -3.0 + 6.0 * j as f64 / 39.0;
                let rho = (th1 * th1 + th2 * th2).sqrt();
                if rho < PI * 0.999 {
                    let det = jacobian_det_radial(&s, &norms, &[th1, th2]).unwrap();
                    assert!(det > 0.0, "nonpositive Jacobian at ({th1},{th2})");
                }
            }
        }
    }

    #[test]
    fn slice_examples_m1() {
        let s = h21();
        // R <= |x| -> 0
        assert_eq!(slice_volume(&s, &[1.0, 0.0], 1.0).unwrap(), 0.0);
        assert_eq!(slice_volume(&s, &[1.0, 0.0], 0.5).unwrap(), 0.0);
        // |x| = 1, R = pi/2: theta* = pi/2, slice = 2 (pi/2)(1/4) = pi/4
        let v = slice_volume(&s, &[1.0, 0.0], PI / 2.0).unwrap();
        assert_relative_eq!(v, PI / 4.0, max_relative = 1e-10);
        // degenerate
        assert!(matches!(
            slice_volume(&s, &[0.0, 0.0], 1.0),
            Err(Error::DegenerateX)
        ));
    }

    #[test]
    fn slice_matches_distance_oracle_m1() {
        for &b in &[0.0, 0.4, 3.0] {
            let s = g2(b);
            let norms = [0.5, 0.9];
            for &r in &[1.2, 2.0, 4.0] {
                let v = slice_volume_blocks(&s, &norms, r).unwrap();
                let oracle = slice_measure_via_distance(&s, &norms, r).unwrap();
                assert_relative_eq!(v, oracle, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn slice_monotone_in_radius() {
        let s = g2(0.7);
        let norms = [0.5, 0.9];
        let mut prev = 0.0;
        for i in 0..40 {
            let r = 1.04 + 0.2 * i as f64;
            let v = slice_volume_blocks(&s, &norms, r).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn slice_m2_matches_box_mc() {
        let s = new_spec(&[(0.5, 2), (1.0, 2)], 2, &[0.3, 2.0], None).unwrap();
        let norms = [0.8, 1.1];
        let r = 2.2;
        let exact = slice_volume_blocks(&s, &norms, r).unwrap();
        let mc = slice_volume_mc_box(&s, &norms, r, 400_000, 11).unwrap();
        assert_relative_eq!(exact, mc, max_relative = 0.02);
    }

    #[test]
    fn slice_m3_matches_box_mc() {
        let s = new_spec(&[(1.0, 2)], 3, &[0.1, 0.5, 1.5], None).unwrap();
        let norms = [1.0];
        let r = 2.0;
        let exact = slice_volume_blocks(&s, &norms, r).unwrap();
        let mc = slice_volume_mc_box(&s, &norms, r, 400_000, 7).unwrap();
        assert_relative_eq!(exact, mc, max_relative = 0.03);
    }

    #[test]
    fn ball_volume_scaling_b_zero() {
        let cfg = QuadConfig::default().rel_tol(1e-8);
        let s = g2(0.0);
        let v1 = ball_volume(&s, 1.0, &cfg).unwrap();
        let v2 = ball_volume(&s, 2.0, &cfg).unwrap();
        // homogeneity: vol(2R) = 2^{2n+2m} vol(R); n = 2, m = 1 -> 64
        assert_relative_eq!(v2.value / v1.value, 64.0, max_relative = 1e-6);
    }

    #[test]
    fn ball_volume_quad_vs_mc() {
        let cfg = QuadConfig::with_seed(42);
        let s = h21();
        let q = ball_volume(&s, 1.0, &cfg).unwrap();
        let mc = ball_volume_mc(&s, 1.0, &cfg).unwrap();
        let tol = mc.abs_error + q.abs_error;
        assert!(
            (q.value - mc.value).abs() <= tol,
            "quad {} vs mc {} +- {}",
            q.value,
            mc.value,
            tol
        );
    }

    #[test]
    fn closed_form_reference() {
        // frozen: |B_R5| sqrt(0.625/12) = 1.2012899920286459
        let s = g2(0.0);
        assert_relative_eq!(
            closed_form_estimate(&s, 1.0),
            1.2012899920286459,
            max_relative = 1e-12
        );
        // R-scaling with b = 0: 2^{2n+2m}
        assert_relative_eq!(
            closed_form_estimate(&s, 2.0) / closed_form_estimate(&s, 1.0),
            64.0,
            max_relative = 1e-12
        );
        // large b: estimate ~ |B| prod sqrt(b_l)
        let sb = new_spec(&[(1.0, 1)], 1, &[1e12], None).unwrap();
        assert_relative_eq!(
            closed_form_estimate(&sb, 1.0),
            euclid_ball_volume(3, 1.0) * 1e6,
            max_relative = 1e-10
        );
    }

    #[test]
    fn doubling_exact_for_b_zero() {
        let cfg = QuadConfig::default().rel_tol(1e-8);
        let s = g2(0.0);
        let d = doubling_ratio(&s, 0.7, &cfg).unwrap();
        assert_relative_eq!(d.ratio, 64.0, max_relative = 1e-6);
    }

    #[test]
    fn moment_identities() {
        // D_0 = 1
        let s = g2(0.0);
        assert_relative_eq!(moment_dnu(&s, 0.0).unwrap(), 1.0, max_relative = 1e-12);
        // D_2 = n/(n+1) C_H = (2/3)(0.625) = 5/12
        assert_relative_eq!(
            moment_dnu(&s, 2.0).unwrap(),
            5.0 / 12.0,
            max_relative = 1e-11
        );
        // l = 1, n = 3: D_4 = 6/10
        let s1 = new_spec(&[(1.0, 3)], 1, &[0.0], None).unwrap();
        assert_relative_eq!(moment_dnu(&s1, 4.0).unwrap(), 0.6, max_relative = 1e-13);
    }

    #[test]
    fn moment_holder_monotone() {
        // D_nu^{1/nu} nondecreasing in nu
        let s = new_spec(&[(0.25, 1), (0.5, 2), (1.0, 1)], 1, &[0.0], None).unwrap();
        let mut prev = 0.0;
        for &nu in &[1.0, 2.0, 4.0, 8.0] {
            let v = moment_dnu(&s, nu).unwrap().powf(1.0 / nu);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn moment_product_reduces_to_dnu() {
        // beta = 0, alpha = 1, m = 1: integral = D_2
        let s = g2(0.0);
        let v = moment_product(&s, 1.0, &[0.0]).unwrap();
        assert_relative_eq!(v, moment_dnu(&s, 2.0).unwrap(), max_relative = 1e-9);
    }

    #[test]
    fn beta_integral_values() {
        assert_relative_eq!(beta_integral(1, 2, 0.0).unwrap(), 0.25, max_relative = 1e-13);
        assert_relative_eq!(
            beta_integral(10, 2, 0.0).unwrap(),
            1.0 / 220.0,
            max_relative = 1e-12
        );
        assert!(beta_integral(1, 1, 20.0).is_err());
    }

    #[test]
    fn dg_ball_volume_koranyi_oracle() {
        // H(2,1): Koranyi unit ball volume = pi^2/8
        let cfg = QuadConfig::default();
        let s = h21();
        let v = ball_volume_dg(&s, 1.0, &cfg).unwrap();
        assert_relative_eq!(v.value, PI * PI / 8.0, max_relative = 1e-4);
        // scaling
        let v2 = ball_volume_dg(&s, 2.0, &cfg).unwrap();
        assert_relative_eq!(v2.value / v.value, 16.0, max_relative = 1e-9);
    }

    #[test]
    fn dg_closed_form_value() {
        let s = h21();
        // |B_R3| (1/8)^{1/2}
        assert_relative_eq!(
            dg_closed_form(&s, 1.0),
            euclid_ball_volume(3, 1.0) / 8f64.sqrt(),
            max_relative = 1e-13
        );
    }
}
