//! Scalar functions attached to a group spec: the spectral product Lambda,
//! its logarithmic derivative, the function G and its zero r_*, the radial
//! coefficient functions T, W, V of the saddle analysis, and the radial
//! profile A entering the geodesic coordinate map.
//!
//! Evaluation notes: phi and its relatives are computed from the peeled
//! partial-fraction sums, which are free of the cancellation that the naive
//! cot forms suffer near 0 and stay accurate up to the boundary. The direct
//! cot forms are kept as independent cross-check paths.

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::solve;
use crate::special::{
    inv_sinc_sq, mu, mu_over_r, mu_tilde, sinc, sum_g3, sum_psi, sum_psi2, x_cot_x,
};

const PI: f64 = std::f64::consts::PI;

/// Block norms of x together with the subordination parameter h; the pair
/// consumed by the radial functions T, W, V.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub r_norms: Vec<f64>,
    pub h: f64,
}

impl RadialProfile {
    pub fn new(r_norms: Vec<f64>, h: f64) -> Self {
        RadialProfile { r_norms, h }
    }

    pub fn from_x(spec: &GroupSpec, x: &[f64], h: f64) -> Self {
        RadialProfile {
            r_norms: spec.block_norms(x),
            h,
        }
    }
}

fn check_domain(spec: &GroupSpec, r: f64) -> Result<()> {
    if !(r >= 0.0) || spec.a_top() * r >= PI {
        return Err(Error::DomainError(format!(
            "radial argument {r} outside [0, pi/a_l) = [0, {})",
            PI / spec.a_top()
        )));
    }
    Ok(())
}

/// mu(r) with the domain check required of the public operation.
pub fn mu_checked(r: f64) -> Result<f64> {
    if !(0.0..PI).contains(&r) {
        return Err(Error::DomainError(format!("mu requires 0 <= r < pi, got {r}")));
    }
    Ok(mu(r))
}

/// mu(r)/(4r) with the domain check.
pub fn mu_tilde_checked(r: f64) -> Result<f64> {
    if !(0.0..PI).contains(&r) {
        return Err(Error::DomainError(format!(
            "mu_tilde requires 0 <= r < pi, got {r}"
        )));
    }
    Ok(mu_tilde(r))
}

/// Lambda(r) = prod_j (sin(a_j r)/(a_j r))^{c_j}; Lambda(0) = 1, strictly
/// decreasing to 0 at the domain boundary.
pub fn lambda_big(spec: &GroupSpec, r: f64) -> Result<f64> {
    check_domain(spec, r)?;
    Ok(lambda_big_unchecked(spec, r))
}

pub(crate) fn lambda_big_unchecked(spec: &GroupSpec, r: f64) -> f64 {
    let mut ln = 0.0;
    for (blk, &c) in spec.blocks().iter().zip(spec.c_frak()) {
        ln += c * sinc(blk.a * r).ln();
    }
    ln.exp()
}

/// phi(r) = d/dr ln Lambda(r), via the partial-fraction series
/// phi(r) = -r sum_j 2 a_j^2 c_j sum_psi(a_j r). phi(0) = 0, phi < 0 on (0, pi/a_l).
pub fn log_deriv(spec: &GroupSpec, r: f64) -> Result<f64> {
    check_domain(spec, r)?;
    Ok(-r * phi_over_neg_r(spec, r))
}

/// Direct cot form phi(r) = sum_j c_j (a_j cot(a_j r) - 1/r); the independent
/// evaluation path (cancels badly for small r, exact elsewhere).
pub fn log_deriv_direct(spec: &GroupSpec, r: f64) -> Result<f64> {
    check_domain(spec, r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for (blk, &c) in spec.blocks().iter().zip(spec.c_frak()) {
        acc += c * (x_cot_x(blk.a * r) - 1.0) / r;
    }
    Ok(acc)
}

/// P(r) := -phi(r)/r = sum_j 2 a_j^2 c_j sum_psi(a_j r); positive, with
/// P(0) = (1/3) sum a_j^2 c_j. All the saddle coefficients build on this.
pub(crate) fn phi_over_neg_r(spec: &GroupSpec, r: f64) -> f64 {
    let mut acc = 0.0;
    for (blk, &c) in spec.blocks().iter().zip(spec.c_frak()) {
        acc += 2.0 * blk.a * blk.a * c * sum_psi(blk.a * r);
    }
    acc
}

/// P'(r) = 4 r sum_j a_j^4 c_j sum_psi2(a_j r).
pub(crate) fn phi_over_neg_r_prime(spec: &GroupSpec, r: f64) -> f64 {
    let mut acc = 0.0;
    for (blk, &c) in spec.blocks().iter().zip(spec.c_frak()) {
        acc += blk.a.powi(4) * c * sum_psi2(blk.a * r);
    }
    4.0 * r * acc
}

/// G(r) = 1 + r phi(r) = sum_j c_j (a_j r) cot(a_j r); strictly decreasing
/// from 1, with a unique zero r_*.
pub fn g_fun(spec: &GroupSpec, r: f64) -> Result<f64> {
    check_domain(spec, r)?;
    Ok(g_fun_unchecked(spec, r))
}

pub(crate) fn g_fun_unchecked(spec: &GroupSpec, r: f64) -> f64 {
    spec.blocks()
        .iter()
        .zip(spec.c_frak())
        .map(|(blk, &c)| c * x_cot_x(blk.a * r))
        .sum()
}

fn g_fun_prime(spec: &GroupSpec, r: f64) -> f64 {
    // d/dr sum c_j (a_j r) cot(a_j r) = -sum c_j a_j mu(a_j r)
    -spec
        .blocks()
        .iter()
        .zip(spec.c_frak())
        .map(|(blk, &c)| c * blk.a * mu(blk.a * r))
        .sum::<f64>()
}

/// The unique zero of G in (0, pi/a_l); satisfies pi/2 <= a_l r_* < pi.
pub fn r_star(spec: &GroupSpec) -> f64 {
    let al = spec.a_top();
    let lo = 0.5 * PI / al;
    let hi = PI / al * (1.0 - 1e-15);
    if g_fun_unchecked(spec, lo) <= 0.0 {
        // single block at the boundary case: G(pi/(2 a_l)) = 0 exactly
        return lo;
    }
    solve::bisect_newton(
        |r| g_fun_unchecked(spec, r),
        |r| g_fun_prime(spec, r),
        lo,
        hi,
        1e-13,
    )
}

/// u(r) = -phi(r)/(r G(r)) = P(r)/G(r); positive and strictly increasing on
/// [0, r_*), u(0) = (1/3) sum a_j^2 c_j.
pub fn u_fun(spec: &GroupSpec, r: f64) -> Result<f64> {
    check_domain(spec, r)?;
    let g = g_fun_unchecked(spec, r);
    if g <= 0.0 {
        return Err(Error::BeyondRStar {
            r,
            r_star: r_star(spec),
        });
    }
    Ok(phi_over_neg_r(spec, r) / g)
}

/// u'(r) = (P'(r) + 2 r P(r)^2)/G(r)^2, the cancellation-free form of the
/// quotient-rule derivative.
pub fn u_prime(spec: &GroupSpec, r: f64) -> Result<f64> {
    check_domain(spec, r)?;
    let g = g_fun_unchecked(spec, r);
    if g <= 0.0 {
        return Err(Error::BeyondRStar {
            r,
            r_star: r_star(spec),
        });
    }
    let p = phi_over_neg_r(spec, r);
    Ok((phi_over_neg_r_prime(spec, r) + 2.0 * r * p * p) / (g * g))
}

/// T_{x,h}(r) = sum_j (u(r) (a_j r/sin a_j r)^2 + a_j mu(a_j r)/r) |x_(j)|^2
///            + u(r) h^2; positive and strictly increasing on [0, r_*).
pub fn t_frak(spec: &GroupSpec, profile: &RadialProfile, r: f64) -> Result<f64> {
    check_domain(spec, r)?;
    let g = g_fun_unchecked(spec, r);
    if g <= 0.0 {
        return Err(Error::BeyondRStar {
            r,
            r_star: r_star(spec),
        });
    }
    Ok(t_frak_unchecked(spec, profile, r, phi_over_neg_r(spec, r) / g))
}

pub(crate) fn t_frak_unchecked(spec: &GroupSpec, profile: &RadialProfile, r: f64, u: f64) -> f64 {
    let mut acc = u * profile.h * profile.h;
    for (blk, &xn) in spec.blocks().iter().zip(&profile.r_norms) {
        let s = blk.a * r;
        // a_j mu(a_j r)/r = a_j^2 * mu(s)/s
        acc += (u * inv_sinc_sq(s) + blk.a * blk.a * mu_over_r(s)) * xn * xn;
    }
    acc
}

/// T'(r), assembled from the stable derivative pieces:
/// d/dr (a_j r / sin a_j r)^2 = 4 a_j^2 r (..)^2 sum_psi(a_j r) and
/// d/dr [a_j mu(a_j r)/r] = a_j^3 (mu'(s) - mu(s)/s)/s = 16 a_j^3 s sum_g3(s).
pub fn t_frak_prime(spec: &GroupSpec, profile: &RadialProfile, r: f64) -> Result<f64> {
    check_domain(spec, r)?;
    let g = g_fun_unchecked(spec, r);
    if g <= 0.0 {
        return Err(Error::BeyondRStar {
            r,
            r_star: r_star(spec),
        });
    }
    let u = phi_over_neg_r(spec, r) / g;
    let p = phi_over_neg_r(spec, r);
    let up = (phi_over_neg_r_prime(spec, r) + 2.0 * r * p * p) / (g * g);
    let mut acc = up * profile.h * profile.h;
    for (blk, &xn) in spec.blocks().iter().zip(&profile.r_norms) {
        let s = blk.a * r;
        let q2 = inv_sinc_sq(s);
        let dq2 = 4.0 * blk.a * blk.a * r * q2 * sum_psi(s);
        let dmu_term = 16.0 * blk.a.powi(3) * s * sum_g3(s);
        acc += (up * q2 + u * dq2 + dmu_term) * xn * xn;
    }
    Ok(acc)
}

/// W_{x,h}(lambda) = T(|lambda|) + 4 u(|lambda|) lambda^T A lambda.
pub fn w_frak(spec: &GroupSpec, profile: &RadialProfile, lam: &[f64]) -> Result<f64> {
    let rho = norm(lam);
    let t = t_frak(spec, profile, rho)?;
    let u = u_fun(spec, rho)?;
    Ok(t + 4.0 * u * quad_form(spec, lam))
}

/// V_{x,h}(lambda) = (T'(|lambda|) + 4 u'(|lambda|) lambda^T A lambda)/|lambda|.
pub fn v_frak(spec: &GroupSpec, profile: &RadialProfile, lam: &[f64]) -> Result<f64> {
    let rho = norm(lam);
    if rho == 0.0 {
        return Err(Error::DomainError("V is defined for lambda != 0".into()));
    }
    let tp = t_frak_prime(spec, profile, rho)?;
    let up = u_prime(spec, rho)?;
    Ok((tp + 4.0 * up * quad_form(spec, lam)) / rho)
}

pub(crate) fn quad_form(spec: &GroupSpec, lam: &[f64]) -> f64 {
    spec.b().iter().zip(lam).map(|(&b, &l)| b * l * l).sum()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A(rho) = sum_j a_j^2 mu_tilde(a_j rho) |x_(j)|^2, the bracketed radial
/// factor of the geodesic coordinate map.
pub fn a_profile(spec: &GroupSpec, r_norms: &[f64], rho: f64) -> Result<f64> {
    check_domain(spec, rho)?;
    Ok(a_profile_unchecked(spec, r_norms, rho))
}

pub(crate) fn a_profile_unchecked(spec: &GroupSpec, r_norms: &[f64], rho: f64) -> f64 {
    spec.blocks()
        .iter()
        .zip(r_norms)
        .map(|(blk, &xn)| blk.a * blk.a * mu_tilde(blk.a * rho) * xn * xn)
        .sum()
}

/// A'(rho)/rho = 4 sum_j a_j^4 sum_g3(a_j rho) |x_(j)|^2; finite at 0.
pub(crate) fn a_profile_prime_over_rho(spec: &GroupSpec, r_norms: &[f64], rho: f64) -> f64 {
    4.0 * spec
        .blocks()
        .iter()
        .zip(r_norms)
        .map(|(blk, &xn)| blk.a.powi(4) * sum_g3(blk.a * rho) * xn * xn)
        .sum::<f64>()
}

/// A'(rho).
pub(crate) fn a_profile_prime(spec: &GroupSpec, r_norms: &[f64], rho: f64) -> f64 {
    rho * a_profile_prime_over_rho(spec, r_norms, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::new_spec;
    use approx::assert_relative_eq;

    fn spec_g2() -> GroupSpec {
        new_spec(&[(0.5, 1), (1.0, 1)], 1, &[0.0], None).unwrap()
    }

    fn spec_h1() -> GroupSpec {
        new_spec(&[(1.0, 1)], 1, &[0.0], None).unwrap()
    }

    #[test]
    fn lambda_reference_values() {
        let s = spec_h1();
        assert_relative_eq!(lambda_big(&s, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            lambda_big(&s, std::f64::consts::FRAC_PI_2).unwrap(),
            2.0 / PI,
            max_relative = 1e-14
        );
        // frozen from extended precision: (sin 0.5/0.5)^{2/7} (sin 1)^{5/7}
        let g2 = spec_g2();
        assert_relative_eq!(
            lambda_big(&g2, 1.0).unwrap(),
            0.873459109035454,
            max_relative = 1e-14
        );
        assert!(lambda_big(&g2, PI).is_err());
    }

    #[test]
    fn lambda_strictly_decreasing() {
        let s = spec_g2();
        let mut prev = 2.0;
        for i in 0..1000 {
            let r = PI * i as f64 / 1000.0 * 0.999;
            let v = lambda_big(&s, r).unwrap();
            assert!(v < prev);
            assert!(v > 0.0 && v <= 1.0);
            prev = v;
        }
    }

    #[test]
    fn log_deriv_small_r_slope() {
        // phi(r)/r -> -1/3 for the single-block unit spec.
        let s = spec_h1();
        let r = 1e-6;
        assert_relative_eq!(log_deriv(&s, r).unwrap() / r, -1.0 / 3.0, max_relative = 1e-10);
        // pi/2: cot(pi/2) - 2/pi = -2/pi
        assert_relative_eq!(
            log_deriv(&s, std::f64::consts::FRAC_PI_2).unwrap(),
            -2.0 / PI,
            max_relative = 1e-13
        );
    }

    #[test]
    fn log_deriv_series_vs_direct() {
        let s = spec_g2();
        for &r in &[0.05, 0.5, 1.0, 1.5, 2.5, 3.0] {
            let series = log_deriv(&s, r).unwrap();
            let direct = log_deriv_direct(&s, r).unwrap();
            assert_relative_eq!(series, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn g_fun_dual_paths_and_value() {
        let s = spec_g2();
        for &r in &[0.0, 0.3, 1.0, 1.9, 2.8] {
            let g = g_fun(&s, r).unwrap();
            let via_phi = 1.0 + r * log_deriv(&s, r).unwrap();
            assert_relative_eq!(g, via_phi, epsilon = 1e-12);
        }
        assert_relative_eq!(g_fun(&s, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn r_star_values() {
        // single block a = 1: r cot r zero at pi/2
        let s = spec_h1();
        assert_relative_eq!(r_star(&s), std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
        // g2 spec: frozen from extended-precision root of G
        let g2 = spec_g2();
        let rs = r_star(&g2);
        assert_relative_eq!(rs, 1.738244406014586, max_relative = 1e-11);
        assert!(g_fun(&g2, rs).unwrap().abs() < 1e-12);
        assert!(rs > std::f64::consts::FRAC_PI_2 && rs < PI);
    }

    #[test]
    fn r_star_approaches_pi_for_small_top_fraction() {
        // As c_l -> 0 (top block fraction shrinking) the root climbs to pi.
        let mut prev = r_star(&spec_g2());
        for &k1 in &[10usize, 100, 1000] {
            let s = new_spec(&[(0.5, k1), (1.0, 1)], 1, &[0.0], None).unwrap();
            let rs = r_star(&s);
            assert!(rs > prev, "r_* not increasing at k1 = {k1}");
            prev = rs;
        }
        assert!(prev > 3.0, "expected r_* near pi for k1 = 1000, got {prev}");
    }

    #[test]
    fn u_fun_limit_and_monotonicity() {
        let s = spec_h1();
        assert_relative_eq!(u_fun(&s, 0.0).unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        let g2 = spec_g2();
        let u0: f64 = g2
            .blocks()
            .iter()
            .zip(g2.c_frak())
            .map(|(b, &c)| b.a * b.a * c)
            .sum::<f64>()
            / 3.0;
        assert_relative_eq!(u_fun(&g2, 0.0).unwrap(), u0, max_relative = 1e-14);
        // strictly increasing on a grid in [0, r_*)
        let rs = r_star(&g2);
        let mut prev = -1.0;
        for i in 0..1000 {
            let r = rs * i as f64 / 1000.0 * 0.9999;
            let u = u_fun(&g2, r).unwrap();
            assert!(u > prev, "u not increasing at {r}");
            prev = u;
        }
        assert!(matches!(
            u_fun(&g2, rs + 1e-3),
            Err(Error::BeyondRStar { .. })
        ));
    }

    #[test]
    fn u_prime_matches_finite_difference() {
        let g2 = spec_g2();
        for &r in &[0.2, 0.8, 1.4] {
            let h = 1e-6;
            let fd = (u_fun(&g2, r + h).unwrap() - u_fun(&g2, r - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(u_prime(&g2, r).unwrap(), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn t_frak_limits_and_monotonicity() {
        let g2 = spec_g2();
        // x = 0, h = 1, r = 0: only the h^2 term survives -> u(0)
        let p = RadialProfile::new(vec![0.0, 0.0], 1.0);
        assert_relative_eq!(
            t_frak(&g2, &p, 0.0).unwrap(),
            u_fun(&g2, 0.0).unwrap(),
            max_relative = 1e-14
        );
        let p = RadialProfile::new(vec![0.7, 1.3], 0.35);
        let rs = r_star(&g2);
        let mut prev = 0.0;
        for i in 0..500 {
            let r = rs * i as f64 / 500.0 * 0.999;
            let t = t_frak(&g2, &p, r).unwrap();
            assert!(t > prev, "T not increasing at {r}");
            prev = t;
        }
    }

    #[test]
    fn t_frak_prime_matches_fd() {
        let g2 = spec_g2();
        let p = RadialProfile::new(vec![0.7, 1.3], 0.35);
        for &r in &[0.3, 1.0, 1.5] {
            let h = 1e-6;
            let fd = (t_frak(&g2, &p, r + h).unwrap() - t_frak(&g2, &p, r - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(t_frak_prime(&g2, &p, r).unwrap(), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn w_v_frak_consistency() {
        let spec = new_spec(&[(0.5, 1), (1.0, 1)], 1, &[0.8], None).unwrap();
        let p = RadialProfile::new(vec![0.7, 1.3], 0.35);
        // lambda = 0: W = T(0)
        assert_relative_eq!(
            w_frak(&spec, &p, &[0.0]).unwrap(),
            t_frak(&spec, &p, 0.0).unwrap(),
            max_relative = 1e-14
        );
        // b = 0: W(lam) = T(|lam|)
        let g2 = spec_g2();
        assert_relative_eq!(
            w_frak(&g2, &p, &[0.9]).unwrap(),
            t_frak(&g2, &p, 0.9).unwrap(),
            max_relative = 1e-14
        );
        // grad W = (V I + 8 u A) lambda; FD along the radial direction
        // recovers V rho + 8 u (lam^T A lam)/rho.
        let lam = [0.9];
        let h = 1e-6;
        let wp = w_frak(&spec, &p, &[lam[0] + h]).unwrap();
        let wm = w_frak(&spec, &p, &[lam[0] - h]).unwrap();
        let fd = (wp - wm) / (2.0 * h);
        let rho = lam[0];
        let expected = v_frak(&spec, &p, &lam).unwrap() * rho
            + 8.0 * u_fun(&spec, rho).unwrap() * quad_form(&spec, &lam) / rho;
        assert_relative_eq!(fd, expected, max_relative = 1e-6);
        // with b = 0 the FD is V directly
        let wp0 = w_frak(&g2, &p, &[lam[0] + h]).unwrap();
        let wm0 = w_frak(&g2, &p, &[lam[0] - h]).unwrap();
        assert_relative_eq!(
            v_frak(&g2, &p, &lam).unwrap(),
            (wp0 - wm0) / (2.0 * h) / rho,
            max_relative = 1e-6
        );
    }

    #[test]
    fn a_profile_values() {
        let s = spec_h1();
        assert_eq!(a_profile(&s, &[0.0], 1.0).unwrap(), 0.0);
        // mu_tilde(pi/2) = 1/4
        assert_relative_eq!(
            a_profile(&s, &[1.0], std::f64::consts::FRAC_PI_2).unwrap(),
            0.25,
            max_relative = 1e-14
        );
        // strict monotonicity for x != 0 on a mixed spectrum
        let g2 = spec_g2();
        let mut prev = -1.0;
        for i in 0..500 {
            let rho = PI * i as f64 / 500.0 * 0.999;
            let v = a_profile(&g2, &[0.7, 1.3], rho).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn a_profile_prime_matches_fd() {
        let g2 = spec_g2();
        let xn = [0.7, 1.3];
        for &rho in &[0.4, 1.1, 2.0] {
            let h = 1e-6;
            let fd = (a_profile(&g2, &xn, rho + h).unwrap() - a_profile(&g2, &xn, rho - h).unwrap())
                / (2.0 * h);
            assert_relative_eq!(a_profile_prime(&g2, &xn, rho), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn lambda_consistent_with_log_deriv_integral() {
        // Lambda(r) * exp(-int_0^r phi) = 1 (fundamental theorem link).
        let g2 = spec_g2();
        let counter = crate::quad::EvalCounter::new(1_000_000);
        for &r in &[0.5, 1.3, 2.4] {
            let (int_phi, _) = crate::quad::adaptive(
                &mut |s: f64| log_deriv(&g2, s).unwrap(),
                0.0,
                r,
                1e-12,
                1e-14,
                &counter,
            )
            .unwrap();
            let prod: f64 = lambda_big(&g2, r).unwrap() * (-int_phi).exp();
            assert!((prod - 1.0).abs() < 1e-10, "r = {r}: {prod}");
        }
    }
}
