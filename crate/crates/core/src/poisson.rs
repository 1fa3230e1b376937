//! The saddle point of S(lambda) = Lambda(|lambda|)(phi(g; lambda) + h^2),
//! its Hessian in closed form, and the Poisson and heat kernels by saddle
//! approximation and by quadrature (direct and contour-shifted).

use crate::config::QuadConfig;
use crate::distance;
use crate::error::{Error, Result};
use crate::group::{GroupPoint, GroupSpec};
use crate::quad::{self, EvalCounter};
use crate::scalar::{
    self, g_fun_unchecked, lambda_big_unchecked, norm, phi_over_neg_r, quad_form, RadialProfile,
};
use crate::solve;
use crate::special::{csinch_inv, cx_coth_x, ln_gamma, mu, sinc};
use nalgebra::DMatrix;
use num_complex::Complex64;

const PI: f64 = std::f64::consts::PI;

/// The saddle point of S together with its value and curvature.
#[derive(Debug, Clone)]
pub struct SaddleResult {
    /// The maximizer tau_h of S.
    pub tau: Vec<f64>,
    /// rho_h = |tau_h|, always in (0, r_*).
    pub rho: f64,
    /// S(tau_h).
    pub s_value: f64,
    /// -Hess S(tau_h), symmetric positive definite.
    pub neg_hessian: DMatrix<f64>,
    /// Residual |grad S(tau_h)| of the solve.
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    Saddle,
    DirectQuadrature,
    ShiftedQuadrature,
}

impl KernelMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelMethod::Saddle => "saddle",
            KernelMethod::DirectQuadrature => "direct-quadrature",
            KernelMethod::ShiftedQuadrature => "shifted-quadrature",
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelValue {
    pub value: f64,
    pub method: KernelMethod,
    /// Quadrature error estimate; zero for the saddle asymptotic, whose
    /// accuracy is the uniform band of the approximation itself.
    pub est_error: f64,
    /// Integrand evaluations spent (zero for the saddle path).
    pub n_evals: usize,
    /// Set when h exceeds the regime n^{-1/2} d_B(g) of the asymptotic.
    pub regime_warning: bool,
}

/// S(lambda) = Lambda(|lambda|)(phi(g; lambda) + h^2).
pub fn s_value(spec: &GroupSpec, g: &GroupPoint, h: f64, lam: &[f64]) -> Result<f64> {
    let norms = spec.block_norms(&g.x);
    s_value_radial(spec, &norms, &g.t, h, lam)
}

pub(crate) fn s_value_radial(
    spec: &GroupSpec,
    norms: &[f64],
    t: &[f64],
    h: f64,
    lam: &[f64],
) -> Result<f64> {
    let rho = norm(lam);
    if spec.a_top() * rho >= PI {
        return Err(Error::DomainError("lambda outside B(0, pi/a_l)".into()));
    }
    let phi = distance::phi_point_radial(spec, norms, t, lam)?;
    Ok(lambda_big_unchecked(spec, rho) * (phi + h * h))
}

/// grad S(lambda), assembled from the closed forms.
pub fn s_gradient(spec: &GroupSpec, g: &GroupPoint, h: f64, lam: &[f64]) -> Result<Vec<f64>> {
    let norms = spec.block_norms(&g.x);
    s_gradient_radial(spec, &norms, &g.t, h, lam)
}

pub(crate) fn s_gradient_radial(
    spec: &GroupSpec,
    norms: &[f64],
    t: &[f64],
    h: f64,
    lam: &[f64],
) -> Result<Vec<f64>> {
    let rho = norm(lam);
    if rho == 0.0 || spec.a_top() * rho >= PI {
        return Err(Error::DomainError(
            "gradient needs 0 < |lambda| < pi/a_l".into(),
        ));
    }
    let lambda = lambda_big_unchecked(spec, rho);
    let phi_pt = distance::phi_point_radial(spec, norms, t, lam)?;
    let phi_ld = -rho * phi_over_neg_r(spec, rho);
    let mut radial = phi_ld * (phi_pt + h * h);
    for (blk, &xn) in spec.blocks().iter().zip(norms) {
        radial -= blk.a * mu(blk.a * rho) * xn * xn;
    }
    Ok((0..spec.m())
        .map(|l| lambda * (radial * lam[l] / rho + 4.0 * t[l] - 8.0 * spec.b()[l] * lam[l]))
        .collect())
}

/// The affine-in-lambda center map C_{x,h}(lambda) = (W(lambda) I + 8A)
/// lambda / 4, whose fixed point characterizes the saddle.
pub fn c_map(spec: &GroupSpec, profile: &RadialProfile, lam: &[f64]) -> Result<Vec<f64>> {
    let w = scalar::w_frak(spec, profile, lam)?;
    Ok(lam
        .iter()
        .zip(spec.b())
        .map(|(&l, &b)| 0.25 * (w + 8.0 * b) * l)
        .collect())
}

/// Solve t = C_{x,h}(tau) for the unique saddle point.
///
/// With rho = |tau| and s = tau^T A tau the components are forced:
/// tau_l = 4 t_l/(T(rho) + 4 u(rho) s + 8 b_l). The inner fixed point in s
/// has a strictly decreasing right side, and the outer equation
/// sum tau_l^2 = rho^2 brackets on (0, r_*); both are plain bisections, so
/// convergence rides on the monotonicity lemmas alone.
pub fn saddle_solve(spec: &GroupSpec, g: &GroupPoint, h: f64) -> Result<SaddleResult> {
    if g.x.iter().any(|&v| v == 0.0) || g.t.iter().any(|&v| v == 0.0) {
        return Err(Error::OutsideDomainG);
    }
    if !(h > 0.0) {
        return Err(Error::DomainError("saddle analysis requires h > 0".into()));
    }
    let norms = spec.block_norms(&g.x);
    let profile = RadialProfile::new(norms.clone(), h);
    let r_star = scalar::r_star(spec);
    let b = spec.b();
    let all_b_zero = b.iter().all(|&v| v == 0.0);

    // tau components and the inner fixed point, for T = T(rho), u = u(rho)
    let tau_at = |t_coef: f64, u_coef: f64, s: f64| -> Vec<f64> {
        g.t.iter()
            .zip(b)
            .map(|(&tl, &bl)| 4.0 * tl / (t_coef + 4.0 * u_coef * s + 8.0 * bl))
            .collect()
    };
    let s_fixed_point = |t_coef: f64, u_coef: f64| -> f64 {
        if all_b_zero {
            return 0.0;
        }
        let quad_of = |s: f64| -> f64 {
            tau_at(t_coef, u_coef, s)
                .iter()
                .zip(b)
                .map(|(&tl, &bl)| bl * tl * tl)
                .sum()
        };
        let mut lo = 0.0;
        let mut hi = quad_of(0.0) + 1e-300;
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if quad_of(mid) > mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let residual = |rho: f64| -> f64 {
        // G can round to <= 0 right at the r_* edge; treat that as beyond
        // the root (tau = 0 there, so the residual is surely negative)
        match scalar::u_fun(spec, rho) {
            Ok(u) => {
                let t_coef = scalar::t_frak_unchecked(spec, &profile, rho, u);
                let s = s_fixed_point(t_coef, u);
                let tau = tau_at(t_coef, u, s);
                tau.iter().map(|v| v * v).sum::<f64>() - rho * rho
            }
            Err(_) => -rho * rho,
        }
    };
    let mut lo = r_star * 1e-300;
    let mut hi = r_star * (1.0 - 1e-12);
    if residual(hi) > 0.0 {
        return Err(Error::NoConvergence(
            "saddle bracket failed at r_*; T did not dominate".into(),
        ));
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = 0.5 * (lo + hi);
    let u = scalar::u_fun(spec, rho)?;
    let t_coef = scalar::t_frak_unchecked(spec, &profile, rho, u);
    let s = s_fixed_point(t_coef, u);
    let tau = tau_at(t_coef, u, s);
    let s_val = s_value_radial(spec, &norms, &g.t, h, &tau)?;
    let grad = s_gradient_radial(spec, &norms, &g.t, h, &tau)?;
    let neg_hessian = hessian_at(spec, &profile, &tau, rho)?;
    Ok(SaddleResult {
        tau,
        rho,
        s_value: s_val,
        neg_hessian,
        grad_norm: norm(&grad),
    })
}

/// S(tau_h) by the closed form
/// Lambda(rho)/(1 + rho phi(rho)) (h^2 + 4 tau^T A tau + sum (a_j rho /
/// sin)^2 |x_(j)|^2); equal to the direct evaluation at the saddle.
pub fn s_value_closed_form(spec: &GroupSpec, g: &GroupPoint, h: f64, saddle: &SaddleResult) -> f64 {
    let norms = spec.block_norms(&g.x);
    let rho = saddle.rho;
    let mut bracket = h * h + 4.0 * quad_form(spec, &saddle.tau);
    for (blk, &xn) in spec.blocks().iter().zip(&norms) {
        bracket += crate::special::inv_sinc_sq(blk.a * rho) * xn * xn;
    }
    lambda_big_unchecked(spec, rho) / g_fun_unchecked(spec, rho) * bracket
}

/// -Hess S(tau) = F1 I + 8 Lambda A + F2 tau tau^T with F1 = Lambda W and
/// F2 = Lambda (G V + (phi/rho) W).
pub fn hessian_s(
    spec: &GroupSpec,
    g: &GroupPoint,
    h: f64,
    saddle: &SaddleResult,
) -> Result<DMatrix<f64>> {
    let profile = RadialProfile::from_x(spec, &g.x, h);
    hessian_at(spec, &profile, &saddle.tau, saddle.rho)
}

fn hessian_at(
    spec: &GroupSpec,
    profile: &RadialProfile,
    tau: &[f64],
    rho: f64,
) -> Result<DMatrix<f64>> {
    let m = spec.m();
    let lambda = lambda_big_unchecked(spec, rho);
    let w = scalar::w_frak(spec, profile, tau)?;
    let v = scalar::v_frak(spec, profile, tau)?;
    let g = g_fun_unchecked(spec, rho);
    let phi_ld = -rho * phi_over_neg_r(spec, rho);
    let f1 = lambda * w;
    let f2 = lambda * (g * v + phi_ld / rho * w);
    let mut hess = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for l in 0..m {
            let mut val = f2 * tau[i] * tau[l];
            if i == l {
                val += f1 + 8.0 * lambda * spec.b()[i];
            }
            hess[(i, l)] = val;
        }
    }
    Ok(hess)
}

fn det_pd(mat: &DMatrix<f64>) -> Result<f64> {
    match mat.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let mut det = 1.0;
            for i in 0..l.nrows() {
                det *= l[(i, i)] * l[(i, i)];
            }
            Ok(det)
        }
        None => Err(Error::NoConvergence(
            "negative Hessian not positive definite".into(),
        )),
    }
}

/// Saddle asymptotic of the Poisson kernel:
/// P_h(g) ~ Gamma(N)/pi^N h (8 pi S/N)^{m/2} Q(i tau) / sqrt(det -Hess S)
/// with Q(i tau) = (sin rho/rho)^{m+1/2} S^{-N}.
///
/// The spectral formulas assume a_l = 1, so the spec is normalized
/// internally and the kernel rescaled by a_l^{-m} (the t-Jacobian).
pub fn poisson_saddle(spec: &GroupSpec, g: &GroupPoint, h: f64) -> Result<KernelValue> {
    let ns = spec.normalize();
    let ng = spec.normalize_point(g);
    let saddle = saddle_solve(&ns, &ng, h)?;
    let m = ns.m() as f64;
    let big_n = ns.big_n();
    let det = det_pd(&saddle.neg_hessian)?;
    let ln_p = ln_gamma(big_n) - big_n * PI.ln()
        + h.ln()
        + 0.5 * m * ((8.0 * PI / big_n).ln() + saddle.s_value.ln())
        + (m + 0.5) * sinc(saddle.rho).ln()
        - big_n * saddle.s_value.ln()
        - 0.5 * det.ln();
    let value = ln_p.exp() * spec.a_top().powi(-(spec.m() as i32));
    let d = distance::distance(spec, g).d;
    let regime_warning = h > d / (spec.n() as f64).sqrt();
    Ok(KernelValue {
        value,
        method: KernelMethod::Saddle,
        est_error: 0.0,
        n_evals: 0,
        regime_warning,
    })
}

/// V(lambda) = prod (a_j |lambda| / sinh(a_j |lambda|))^{k_j}.
fn v_big(spec: &GroupSpec, rho: f64) -> f64 {
    let mut acc = 1.0;
    for blk in spec.blocks() {
        let s = blk.a * rho;
        let f = if s < 1e-8 { 1.0 } else { s / s.sinh() };
        acc *= f.powi(blk.k as i32);
    }
    acc
}

/// Truncation radius where V drops below 1e-16 (relative to its maximum 1
/// at the origin); the heat/Poisson integrands are dominated by V times a
/// bounded factor, so this caps the tail at the floor.
fn v_truncation_radius(spec: &GroupSpec) -> f64 {
    let target = (1e-16f64).ln();
    let ln_v = |r: f64| -> f64 {
        spec.blocks()
            .iter()
            .map(|blk| {
                let s = blk.a * r;
                blk.k as f64 * (s.ln() - s.sinh().ln())
            })
            .sum()
    };
    let mut hi = 8.0 / spec.blocks()[0].a;
    while ln_v(hi) > target {
        hi *= 2.0;
    }
    solve::bisect(|r| ln_v(r) - target, 1e-6, hi, 1e-6)
}

/// Complex Phi(g; w) for a (complexified) frequency vector w, through the
/// even functions of z = w.w; valid on the shifted contour.
fn phi_big_complex(spec: &GroupSpec, norms: &[f64], t: &[f64], w: &[Complex64]) -> Complex64 {
    let z: Complex64 = w.iter().map(|v| v * v).sum();
    let sq = z.sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (blk, &xn) in spec.blocks().iter().zip(norms) {
        acc += cx_coth_x(sq * blk.a) * (xn * xn);
    }
    let mut t_dot = Complex64::new(0.0, 0.0);
    let mut quad = Complex64::new(0.0, 0.0);
    for (l, &wl) in w.iter().enumerate() {
        t_dot += t[l] * wl;
        quad += spec.b()[l] * wl * wl;
    }
    acc - Complex64::i() * 4.0 * t_dot + 4.0 * quad
}

fn v_big_complex(spec: &GroupSpec, w: &[Complex64]) -> Complex64 {
    let z: Complex64 = w.iter().map(|v| v * v).sum();
    let sq = z.sqrt();
    let mut acc = Complex64::new(1.0, 0.0);
    for blk in spec.blocks() {
        acc *= csinch_inv(sq * blk.a).powi(blk.k as i32);
    }
    acc
}

/// Integral of f over R^m (m <= 3) via the radial/angular product rules,
/// with the given truncation radius.
fn integrate_rm(
    m: usize,
    radius: f64,
    f: &dyn Fn(&[f64]) -> Complex64,
    rel: f64,
    counter: &EvalCounter,
) -> Result<(Complex64, f64)> {
    match m {
        1 => quad::adaptive(&mut |l: f64| f(&[l]), -radius, radius, rel, 1e-300, counter),
        2 => quad::adaptive(
            &mut |r: f64| {
                let (ring, _) = quad::periodic_trapezoid(
                    &mut |alpha: f64| f(&[r * alpha.cos(), r * alpha.sin()]),
                    2.0 * PI,
                    16,
                    rel * 0.25,
                    1e-300,
                    counter,
                )
                .unwrap_or((Complex64::new(0.0, 0.0), 0.0));
                ring * r
            },
            0.0,
            radius,
            rel,
            1e-300,
            counter,
        ),
        3 => quad::adaptive(
            &mut |r: f64| {
                let (shell, _) = quad::adaptive(
                    &mut |c: f64| {
                        let s_phi = (1.0 - c * c).max(0.0).sqrt();
                        let (ring, _) = quad::periodic_trapezoid(
                            &mut |alpha: f64| {
                                f(&[r * s_phi * alpha.cos(), r * s_phi * alpha.sin(), r * c])
                            },
                            2.0 * PI,
                            16,
                            rel * 0.25,
                            1e-300,
                            counter,
                        )
                        .unwrap_or((Complex64::new(0.0, 0.0), 0.0));
                        ring
                    },
                    -1.0,
                    1.0,
                    rel * 0.25,
                    1e-300,
                    counter,
                )
                .unwrap_or((Complex64::new(0.0, 0.0), 0.0));
                shell * (r * r)
            },
            0.0,
            radius,
            rel,
            1e-300,
            counter,
        ),
        _ => Err(Error::Unsupported(format!(
            "quadrature kernels implemented for m <= 3 (got m = {m})"
        ))),
    }
}

/// P_h(g) = 2^m Gamma(N)/pi^N h int_{R^m} V(lambda)(Phi + h^2)^{-N} dlambda
/// by adaptive quadrature over the real frequency space.
pub fn poisson_direct(
    spec: &GroupSpec,
    g: &GroupPoint,
    h: f64,
    cfg: &QuadConfig,
) -> Result<KernelValue> {
    if !(h > 0.0) {
        return Err(Error::DomainError("Poisson kernel requires h > 0".into()));
    }
    let norms = spec.block_norms(&g.x);
    let big_n = spec.big_n();
    let radius = v_truncation_radius(spec);
    let counter = EvalCounter::new(cfg.max_evals);
    let integrand = |lam: &[f64]| -> Complex64 {
        let rho = norm(lam);
        let v = v_big(spec, rho);
        let mut phi_re = 0.0;
        for (blk, &xn) in spec.blocks().iter().zip(&norms) {
            let s = blk.a * rho;
            let coth_term = if s < 1e-8 { 1.0 } else { s * s.cosh() / s.sinh() };
            phi_re += coth_term * xn * xn;
        }
        let mut t_dot = 0.0;
        let mut qf = 0.0;
        for (l, &ll) in lam.iter().enumerate() {
            t_dot += g.t[l] * ll;
            qf += spec.b()[l] * ll * ll;
        }
        let phi = Complex64::new(phi_re + 4.0 * qf + h * h, -4.0 * t_dot);
        v * (-big_n * phi.ln()).exp()
    };
    let (integral, err) = integrate_rm(spec.m(), radius, &integrand, cfg.rel_tol, &counter)?;
    if integral.im.abs() > 1e-8 * integral.re.abs() {
        return Err(Error::QuadratureFailure(format!(
            "imaginary residual {} exceeds 1e-8 of real part {}",
            integral.im, integral.re
        )));
    }
    let pref = (spec.m() as f64 * 2f64.ln() + ln_gamma(big_n) - big_n * PI.ln()).exp() * h;
    Ok(KernelValue {
        value: pref * integral.re,
        method: KernelMethod::DirectQuadrature,
        est_error: pref * err,
        n_evals: counter.count(),
        regime_warning: false,
    })
}

/// Contour-shifted Poisson kernel: the same integral along lambda + i tau_h.
/// The integrand peaks at lambda = 0 (the saddle) with Gaussian width set by
/// -Hess S, so the adaptive rule needs far fewer nodes than the direct path;
/// equality with `poisson_direct` is the Cauchy-theorem consistency check.
pub fn poisson_shifted(
    spec: &GroupSpec,
    g: &GroupPoint,
    h: f64,
    saddle: &SaddleResult,
) -> Result<KernelValue> {
    poisson_shifted_tol(spec, g, h, saddle, 1e-9)
}

/// Shifted-contour kernel at an explicit quadrature tolerance; band checks
/// that only need a few digits use a loose one.
pub fn poisson_shifted_tol(
    spec: &GroupSpec,
    g: &GroupPoint,
    h: f64,
    saddle: &SaddleResult,
    rel_tol: f64,
) -> Result<KernelValue> {
    let norms = spec.block_norms(&g.x);
    let big_n = spec.big_n();
    let m = spec.m();
    let counter = EvalCounter::new(100_000_000);
    let integrand = |lam: &[f64]| -> Complex64 {
        let w: Vec<Complex64> = lam
            .iter()
            .zip(&saddle.tau)
            .map(|(&l, &tl)| Complex64::new(l, tl))
            .collect();
        let v = v_big_complex(spec, &w);
        let phi = phi_big_complex(spec, &norms, &g.t, &w) + h * h;
        v * (-big_n * phi.ln()).exp()
    };
    // width of the saddle Gaussian; cap the domain at 14 sigma but never
    // beyond the V-truncation, and extend if the tail has not died yet
    let eig_min = saddle
        .neg_hessian
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let sigma = (saddle.s_value / (big_n * eig_min)).sqrt();
    let r_v = v_truncation_radius(spec);
    let mut radius = (14.0 * sigma).min(r_v);
    let peak = integrand(&vec![0.0; m]).norm();
    for _ in 0..8 {
        let mut probe = vec![0.0; m];
        probe[0] = radius;
        if integrand(&probe).norm() <= 1e-13 * peak || radius >= r_v {
            break;
        }
        radius = (2.0 * radius).min(r_v);
    }
    let (integral, err) = integrate_rm(m, radius, &integrand, rel_tol, &counter)?;
    if integral.im.abs() > 1e-8 * integral.re.abs() {
        return Err(Error::QuadratureFailure(format!(
            "imaginary residual {} exceeds 1e-8 of real part {}",
            integral.im, integral.re
        )));
    }
    let pref = (m as f64 * 2f64.ln() + ln_gamma(big_n) - big_n * PI.ln()).exp() * h;
    Ok(KernelValue {
        value: pref * integral.re,
        method: KernelMethod::ShiftedQuadrature,
        est_error: pref * err,
        n_evals: counter.count(),
        regime_warning: false,
    })
}

/// Heat kernel p_h(g) = h^{-n-m}/((2 pi)^m (4 pi)^n) int V(lambda)
/// exp(-Phi(g; lambda)/(4h)) dlambda.
pub fn heat_kernel(
    spec: &GroupSpec,
    g: &GroupPoint,
    h: f64,
    cfg: &QuadConfig,
) -> Result<KernelValue> {
    if !(h > 0.0) {
        return Err(Error::DomainError("heat kernel requires h > 0".into()));
    }
    let norms = spec.block_norms(&g.x);
    let radius = v_truncation_radius(spec);
    let counter = EvalCounter::new(cfg.max_evals);
    let integrand = |lam: &[f64]| -> Complex64 {
        let rho = norm(lam);
        let v = v_big(spec, rho);
        let mut phi_re = 0.0;
        for (blk, &xn) in spec.blocks().iter().zip(&norms) {
            let s = blk.a * rho;
            let coth_term = if s < 1e-8 { 1.0 } else { s * s.cosh() / s.sinh() };
            phi_re += coth_term * xn * xn;
        }
        let mut t_dot = 0.0;
        let mut qf = 0.0;
        for (l, &ll) in lam.iter().enumerate() {
            t_dot += g.t[l] * ll;
            qf += spec.b()[l] * ll * ll;
        }
        let phi = Complex64::new(phi_re + 4.0 * qf, -4.0 * t_dot);
        v * (-phi / (4.0 * h)).exp()
    };
    let (integral, err) = integrate_rm(spec.m(), radius, &integrand, cfg.rel_tol, &counter)?;
    if integral.im.abs() > 1e-8 * integral.re.abs() {
        return Err(Error::QuadratureFailure(format!(
            "imaginary residual {} exceeds 1e-8 of real part {}",
            integral.im, integral.re
        )));
    }
    let n = spec.n() as f64;
    let m = spec.m() as f64;
    let pref = (-(n + m) * h.ln() - m * (2.0 * PI).ln() - n * (4.0 * PI).ln()).exp();
    Ok(KernelValue {
        value: pref * integral.re,
        method: KernelMethod::DirectQuadrature,
        est_error: pref * err,
        n_evals: counter.count(),
        regime_warning: false,
    })
}

/// The pointwise maximal-function ratio
/// [|B(o,r)|^{-1} chi_{B(o,r)}(g)] / [n (3/(2 C_H))^{m/2} avg P_h(g) dh],
/// the h-average running over (0, r/sqrt(n)). The desk-scale surrogate for
/// the weak-(1,1) bound; zero when d_B(g) >= r.
pub fn maximal_bound_check(
    spec: &GroupSpec,
    g: &GroupPoint,
    r_ball: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    let d = distance::distance(spec, g).d;
    if d >= r_ball {
        return Ok(0.0);
    }
    let vol = crate::volume::ball_volume(spec, r_ball, cfg)?.value;
    maximal_bound_check_with_volume(spec, g, r_ball, vol)
}

/// Same, with the ball volume supplied (lets sweeps share one volume per
/// (spec, r) pair).
pub fn maximal_bound_check_with_volume(
    spec: &GroupSpec,
    g: &GroupPoint,
    r_ball: f64,
    ball_vol: f64,
) -> Result<f64> {
    let d = distance::distance(spec, g).d;
    if d >= r_ball {
        return Ok(0.0);
    }
    let n = spec.n() as f64;
    let h_max = r_ball / n.sqrt();
    let counter = EvalCounter::new(4_000);
    // band check at C <= 10: a loose kernel tolerance and a mild h-rule
    // are plenty (the integrand is smooth and vanishes linearly at 0)
    let (integral, _) = quad::adaptive(
        &mut |h: f64| {
            if h <= 0.0 {
                return 0.0;
            }
            match saddle_solve(spec, g, h) {
                Ok(saddle) => poisson_shifted_tol(spec, g, h, &saddle, 1e-5)
                    .map(|k| k.value)
                    .unwrap_or(0.0),
                Err(_) => 0.0,
            }
        },
        0.0,
        h_max,
        3e-4,
        1e-300,
        &counter,
    )?;
    let avg_p = integral / h_max;
    let rhs = n * (3.0 / (2.0 * spec.c_h())).powf(spec.m() as f64 / 2.0) * avg_p;
    Ok(1.0 / (ball_vol * rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::new_spec;
    use approx::assert_relative_eq;

    fn h21() -> GroupSpec {
        new_spec(&[(1.0, 1)], 1, &[0.0], None).unwrap()
    }

    /// The two-block spec with b = 0.8 used for the frozen saddle values.
    fn g2b() -> (GroupSpec, GroupPoint, f64) {
        let s = new_spec(&[(0.5, 1), (1.0, 1)], 1, &[0.8], None).unwrap();
        // block norms (0.7, 1.3), all coordinates nonzero
        let c = 0.5f64.sqrt();
        let g = GroupPoint::new(vec![0.7 * c, 0.7 * c, 1.3 * c, 1.3 * c], vec![0.9]);
        (s, g, 0.35)
    }

    #[test]
    fn s_value_examples() {
        let (s, g, h) = g2b();
        // S(0) = |x|^2 + h^2
        let x_sq = 0.7f64 * 0.7 + 1.3 * 1.3;
        assert_relative_eq!(
            s_value(&s, &g, h, &[0.0]).unwrap(),
            x_sq + h * h,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            s_value(&s, &g, 0.0, &[0.0]).unwrap(),
            x_sq,
            max_relative = 1e-14
        );
    }

    #[test]
    fn s_directional_derivative_at_zero() {
        // lim_{r->0+} d/dr S(r t-hat) = 4|t| (checked by FD)
        let (s, g, h) = g2b();
        let r = 1e-7;
        let sp = s_value(&s, &g, h, &[r]).unwrap();
        let s0 = s_value(&s, &g, h, &[0.0]).unwrap();
        assert_relative_eq!((sp - s0) / r, 4.0 * 0.9, max_relative = 1e-5);
    }

    #[test]
    fn c_map_basics() {
        let (s, g, h) = g2b();
        let profile = RadialProfile::from_x(&s, &g.x, h);
        assert_eq!(c_map(&s, &profile, &[0.0]).unwrap(), vec![0.0]);
        // b = 0, m = 1: 4t = T(|lam|) lam strictly increasing
        let s0 = new_spec(&[(0.5, 1), (1.0, 1)], 1, &[0.0], None).unwrap();
        let p0 = RadialProfile::new(vec![0.7, 1.3], 0.35);
        let rs = scalar::r_star(&s0);
        let mut prev = -1.0;
        for i in 1..200 {
            let lam = rs * i as f64 / 200.0 * 0.999;
            let t = c_map(&s0, &p0, &[lam]).unwrap()[0];
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn c_map_jacobian_matches_fd() {
        // Jacobian of c_map = (D1 + lam lam^T D2)/4 with D1 = W I + 8A,
        // D2 = V I + 8 u A (diagonal matrices).
        let s = new_spec(&[(0.5, 2), (1.0, 2)], 2, &[0.3, 2.0], None).unwrap();
        let p = RadialProfile::new(vec![0.8, 1.1], 0.4);
        let lam = [0.6f64, -0.3];
        let rho = (lam[0] * lam[0] + lam[1] * lam[1]).sqrt();
        let w = scalar::w_frak(&s, &p, &lam).unwrap();
        let v = scalar::v_frak(&s, &p, &lam).unwrap();
        let u = scalar::u_fun(&s, rho).unwrap();
        let fd = 1e-6;
        for col in 0..2 {
            let mut lp = lam;
            lp[col] += fd;
            let mut lm = lam;
            lm[col] -= fd;
            let cp = c_map(&s, &p, &lp).unwrap();
            let cm = c_map(&s, &p, &lm).unwrap();
            for row in 0..2 {
                let jac_fd = (cp[row] - cm[row]) / (2.0 * fd);
                let d1 = if row == col { w + 8.0 * s.b()[row] } else { 0.0 };
                let d2_col = v + 8.0 * u * s.b()[col];
                let expect = 0.25 * (d1 + lam[row] * lam[col] * d2_col);
                assert_relative_eq!(jac_fd, expect, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn saddle_frozen_reference() {
        // frozen from a 25-digit run of the same nested bisection
        let (s, g, h) = g2b();
        let sad = saddle_solve(&s, &g, h).unwrap();
        assert_relative_eq!(sad.rho, 0.4250521911875682, max_relative = 1e-11);
        assert_relative_eq!(sad.s_value, 3.070195573828934, max_relative = 1e-11);
        assert_relative_eq!(sad.neg_hessian[(0, 0)], 8.384821774479316, max_relative = 1e-9);
        assert!(sad.grad_norm < 1e-9 * (0.7f64 * 0.7 + 1.3 * 1.3 + h * h));
    }

    #[test]
    fn saddle_solves_c_map() {
        let (s, g, h) = g2b();
        let sad = saddle_solve(&s, &g, h).unwrap();
        let profile = RadialProfile::from_x(&s, &g.x, h);
        let t = c_map(&s, &profile, &sad.tau).unwrap();
        assert_relative_eq!(t[0], g.t[0], max_relative = 1e-10);
    }

    #[test]
    fn saddle_matches_grid_argmax_m1() {
        let (s, g, h) = g2b();
        let sad = saddle_solve(&s, &g, h).unwrap();
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 1..60_000 {
            let lam = PI * i as f64 / 60_000.0 * 0.999;
            if let Ok(v) = s_value(&s, &g, h, &[lam]) {
                if v > best.0 {
                    best = (v, lam);
                }
            }
        }
        assert_relative_eq!(sad.tau[0], best.1, max_relative = 1e-4);
        assert!(sad.s_value >= best.0 - 1e-12);
    }

    #[test]
    fn saddle_nst_identity() {
        let (s, g, h) = g2b();
        let sad = saddle_solve(&s, &g, h).unwrap();
        assert_relative_eq!(
            s_value_closed_form(&s, &g, h, &sad),
            sad.s_value,
            max_relative = 1e-10
        );
    }

    #[test]
    fn saddle_rejects_boundary_points() {
        let s = h21();
        let g = GroupPoint::new(vec![1.0, 0.0], vec![0.5]);
        assert!(matches!(
            saddle_solve(&s, &g, 0.3),
            Err(Error::OutsideDomainG)
        ));
        let g = GroupPoint::new(vec![1.0, 0.5], vec![0.0]);
        assert!(matches!(
            saddle_solve(&s, &g, 0.3),
            Err(Error::OutsideDomainG)
        ));
    }

    #[test]
    fn saddle_solve_general_scale_consistent() {
        // saddle machinery is scale-generic: solving on the normalized spec
        // must reproduce the original S value (S is scale invariant).
        let s = new_spec(&[(1.0, 1), (2.0, 1)], 1, &[1.6], None).unwrap();
        let g = GroupPoint::new(vec![0.5, 0.5, 0.9, 0.9], vec![0.9]);
        let h = 0.35;
        let sad = saddle_solve(&s, &g, h).unwrap();
        let ns = s.normalize();
        let ng = s.normalize_point(&g);
        let nsad = saddle_solve(&ns, &ng, h).unwrap();
        assert_relative_eq!(sad.s_value, nsad.s_value, max_relative = 1e-9);
        assert_relative_eq!(sad.rho * s.a_top(), nsad.rho, max_relative = 1e-9);
    }

    #[test]
    fn hessian_matches_fd_m1() {
        let (s, g, h) = g2b();
        let sad = saddle_solve(&s, &g, h).unwrap();
        let fd = 1e-5;
        let tau = sad.tau[0];
        let spp = s_value(&s, &g, h, &[tau + fd]).unwrap();
        let s0 = s_value(&s, &g, h, &[tau]).unwrap();
        let smm = s_value(&s, &g, h, &[tau - fd]).unwrap();
        let second = (spp - 2.0 * s0 + smm) / (fd * fd);
        assert_relative_eq!(sad.neg_hessian[(0, 0)], -second, max_relative = 1e-5);
    }

    #[test]
    fn hessian_matches_fd_m2() {
        let s = new_spec(&[(0.5, 2), (1.0, 2)], 2, &[0.3, 2.0], None).unwrap();
        let g = GroupPoint::new(
            vec![0.4, -0.2, 0.9, 0.1, 0.5, -0.6, 0.2, 0.3],
            vec![0.8, -0.5],
        );
        let h = 0.3;
        let sad = saddle_solve(&s, &g, h).unwrap();
        let fd = 1e-4;
        for i in 0..2 {
            for l in 0..2 {
                let mut pp = sad.tau.clone();
                pp[i] += fd;
                pp[l] += fd;
                let mut pm = sad.tau.clone();
                pm[i] += fd;
                pm[l] -= fd;
                let mut mp = sad.tau.clone();
                mp[i] -= fd;
                mp[l] += fd;
                let mut mm = sad.tau.clone();
                mm[i] -= fd;
                mm[l] -= fd;
                let second = (s_value(&s, &g, h, &pp).unwrap()
                    - s_value(&s, &g, h, &pm).unwrap()
                    - s_value(&s, &g, h, &mp).unwrap()
                    + s_value(&s, &g, h, &mm).unwrap())
                    / (4.0 * fd * fd);
                assert_relative_eq!(sad.neg_hessian[(i, l)], -second, max_relative = 2e-4);
            }
        }
    }

    #[test]
    fn hessian_rank_one_spectrum_b_zero() {
        // b = 0: eigenvalues {F1 (m-1 times), F1 + F2 rho^2}
        let s = new_spec(&[(0.5, 2), (1.0, 2)], 2, &[0.0, 0.0], None).unwrap();
        let g = GroupPoint::new(
            vec![0.4, -0.2, 0.9, 0.1, 0.5, -0.6, 0.2, 0.3],
            vec![0.8, -0.5],
        );
        let sad = saddle_solve(&s, &g, 0.3).unwrap();
        let eig = sad.neg_hessian.clone().symmetric_eigen().eigenvalues;
        let f2 = sad.neg_hessian[(0, 1)] / (sad.tau[0] * sad.tau[1]);
        let f1 = sad.neg_hessian[(0, 0)] - f2 * sad.tau[0] * sad.tau[0];
        let spiked = f1 + f2 * sad.rho * sad.rho;
        let mut ev: Vec<f64> = eig.iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expect = vec![f1, spiked];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(ev[0], expect[0], max_relative = 1e-9);
        assert_relative_eq!(ev[1], expect[1], max_relative = 1e-9);
    }

    #[test]
    fn poisson_direct_frozen_reference() {
        // frozen from a 25-digit quadrature of the same integral
        let (s, g, h) = g2b();
        let cfg = QuadConfig::default();
        let p = poisson_direct(&s, &g, h, &cfg).unwrap();
        assert_relative_eq!(p.value, 7.391107524127216e-4, max_relative = 1e-8);
    }

    #[test]
    fn poisson_saddle_frozen_reference() {
        let (s, g, h) = g2b();
        let p = poisson_saddle(&s, &g, h).unwrap();
        assert_relative_eq!(p.value, 6.467331616904009e-4, max_relative = 1e-9);
        assert!(!p.regime_warning);
        // ratio to direct lands in a tight band here
        let cfg = QuadConfig::default();
        let pd = poisson_direct(&s, &g, h, &cfg).unwrap();
        let ratio = p.value / pd.value;
        assert!(ratio > 0.5 && ratio < 2.0, "ratio {ratio}");
    }

    #[test]
    fn poisson_contour_independence() {
        let (s, g, h) = g2b();
        let cfg = QuadConfig::default();
        let sad = saddle_solve(&s, &g, h).unwrap();
        let pd = poisson_direct(&s, &g, h, &cfg).unwrap();
        let ps = poisson_shifted(&s, &g, h, &sad).unwrap();
        assert_relative_eq!(pd.value, ps.value, max_relative = 1e-6);
    }

    #[test]
    fn poisson_saddle_h_scaling() {
        // value ~ h (1 + O(h^2)) as h -> 0: log-log slope ~ 1
        let (s, g, _) = g2b();
        let p1 = poisson_saddle(&s, &g, 1e-3).unwrap().value;
        let p2 = poisson_saddle(&s, &g, 2e-3).unwrap().value;
        let slope = (p2 / p1).ln() / 2f64.ln();
        assert_relative_eq!(slope, 1.0, max_relative = 1e-4);
    }

    #[test]
    fn poisson_direct_large_h_tail() {
        // H(2,1) at the origin with b = 0: the dilation (x,t) -> (sx, s^2 t)
        // makes P_h(o) proportional to h^{-Q} with Q = 2n + 2m exactly
        // (equivalently: Phi(o) = 0, so P = c h^{1-2N} = c h^{-2n-2m}).
        let s = h21();
        let o = GroupPoint::origin(&s);
        let cfg = QuadConfig::default();
        let p1 = poisson_direct(&s, &o, 50.0, &cfg).unwrap().value;
        let p2 = poisson_direct(&s, &o, 100.0, &cfg).unwrap().value;
        let slope = (p2 / p1).ln() / 2f64.ln();
        assert_relative_eq!(slope, -4.0, max_relative = 1e-6);
    }

    #[test]
    fn heat_kernel_spot_value() {
        // H(2,1), b = 0: p_h(o) h^2 = 1/16
        let s = h21();
        let o = GroupPoint::origin(&s);
        let cfg = QuadConfig::default();
        for &h in &[0.25, 1.0, 4.0] {
            let p = heat_kernel(&s, &o, h, &cfg).unwrap();
            assert_relative_eq!(p.value * h * h, 1.0 / 16.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn heat_kernel_positive_at_random_points() {
        let (s, g, _) = g2b();
        let cfg = QuadConfig::default();
        for &h in &[0.1, 0.7, 2.0] {
            let p = heat_kernel(&s, &g, h, &cfg).unwrap();
            assert!(p.value > 0.0);
        }
    }

    #[test]
    fn maximal_check_vacuous_outside_ball() {
        let (s, g, _) = g2b();
        let cfg = QuadConfig::default();
        let d = distance::distance(&s, &g).d;
        let ratio = maximal_bound_check(&s, &g, d * 0.5, &cfg).unwrap();
        assert_eq!(ratio, 0.0);
    }

    #[test]
    fn maximal_check_finite_inside_ball() {
        let (s, g, _) = g2b();
        let cfg = QuadConfig::default();
        let d = distance::distance(&s, &g).d;
        let ratio = maximal_bound_check(&s, &g, d * 2.0, &cfg).unwrap();
        assert!(ratio.is_finite() && ratio > 0.0, "ratio {ratio}");
        assert!(ratio < 10.0, "ratio {ratio} out of band");
    }
}
