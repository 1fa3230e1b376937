//! Pointwise scalar primitives: the function mu and its relatives, stable
//! trigonometric kernels on (0, pi), partial-fraction series, and small
//! gamma-function helpers.
//!
//! Everything here is a pure function of one or two floats. The partial
//! fraction sums are peeled against zeta values so that only a short exact
//! tail remains; the k = 1 term carries the singularity at pi exactly, which
//! keeps all evaluations accurate up to the domain boundary.

use num_complex::Complex64;

/// High part of pi; `PI_HI + PI_LO` is pi to ~32 digits.
const PI_HI: f64 = std::f64::consts::PI;
const PI_LO: f64 = 1.2246467991473532e-16;

/// pi - s, computed accurately for s near pi.
#[inline]
pub fn pi_minus(s: f64) -> f64 {
    (PI_HI - s) + PI_LO
}

/// sin(s) with argument reduction against pi, accurate for s near pi.
#[inline]
pub fn sin_stable(s: f64) -> f64 {
    if s > 3.0 {
        pi_minus(s).sin()
    } else {
        s.sin()
    }
}

/// cos(s) with the same reduction.
#[inline]
pub fn cos_stable(s: f64) -> f64 {
    if s > 3.0 {
        -pi_minus(s).cos()
    } else {
        s.cos()
    }
}

/// sin(s)/s with the removable singularity at 0 filled.
#[inline]
pub fn sinc(s: f64) -> f64 {
    if s.abs() < 1e-4 {
        let s2 = s * s;
        1.0 - s2 / 6.0 * (1.0 - s2 / 20.0)
    } else {
        sin_stable(s) / s
    }
}

/// s*cot(s) on [0, pi), continuous value 1 at s = 0.
#[inline]
pub fn x_cot_x(s: f64) -> f64 {
    debug_assert!((0.0..PI_HI).contains(&s));
    if s < 1e-4 {
        let s2 = s * s;
        1.0 - s2 / 3.0 - s2 * s2 / 45.0
    } else {
        s * cos_stable(s) / sin_stable(s)
    }
}

/// (s/sin(s))^2 on [0, pi).
#[inline]
pub fn inv_sinc_sq(s: f64) -> f64 {
    let c = sinc(s);
    1.0 / (c * c)
}

/// Number of exactly-summed tail terms in the peeled partial-fraction sums.
const PEEL_TERMS: usize = 40;

/// sum_{k>=1} 1/((k pi)^2 - s^2) = (1 - s cot s)/(2 s^2), for 0 <= s < pi.
///
/// Evaluated by peeling five zeta orders, so the result has full relative
/// accuracy down to s = 0 (value 1/6) and up to the pole at pi.
pub fn sum_psi(s: f64) -> f64 {
    debug_assert!((0.0..PI_HI).contains(&s));
    let s2 = s * s;
    let mut acc = 1.0 / 6.0
        + s2 * (1.0 / 90.0 + s2 * (1.0 / 945.0 + s2 * (1.0 / 9450.0 + s2 / 93555.0)));
    if s2 == 0.0 {
        return acc;
    }
    let s10 = s2 * s2 * s2 * s2 * s2;
    for k in 1..=PEEL_TERMS {
        let kp2 = kpi_sq(k);
        let denom = if k == 1 {
            pi_minus(s) * (PI_HI + s)
        } else {
            kp2 - s2
        };
        acc += s10 / (kp2 * kp2 * kp2 * kp2 * kp2 * denom);
    }
    acc
}

/// sum_{k>=1} 1/((k pi)^2 - s^2)^2, for 0 <= s < pi. Value 1/90 at s = 0.
pub fn sum_psi2(s: f64) -> f64 {
    debug_assert!((0.0..PI_HI).contains(&s));
    let s2 = s * s;
    let mut acc = 1.0 / 90.0 + s2 * (2.0 / 945.0 + s2 * (1.0 / 3150.0 + s2 * 4.0 / 93555.0));
    if s2 == 0.0 {
        return acc;
    }
    let s8 = s2 * s2 * s2 * s2;
    for k in 1..=PEEL_TERMS {
        let kp2 = kpi_sq(k);
        let denom = if k == 1 {
            pi_minus(s) * (PI_HI + s)
        } else {
            kp2 - s2
        };
        acc += s8 * (5.0 * kp2 - 4.0 * s2) / (kp2 * kp2 * kp2 * kp2 * kp2 * denom * denom);
    }
    acc
}

/// sum_{k>=1} (k pi)^2/((k pi)^2 - s^2)^3, for 0 <= s < pi. Value 1/90 at 0.
///
/// This is (mu'(s) - mu(s)/s)/(16 s^2) in series form; used where the direct
/// difference would cancel.
pub fn sum_g3(s: f64) -> f64 {
    debug_assert!((0.0..PI_HI).contains(&s));
    let s2 = s * s;
    let mut acc = 1.0 / 90.0 + s2 * (1.0 / 315.0 + s2 / 1575.0);
    if s2 == 0.0 {
        return acc;
    }
    let s6 = s2 * s2 * s2;
    for k in 1..=PEEL_TERMS {
        let kp2 = kpi_sq(k);
        let x = s2 / kp2;
        let denom = if k == 1 {
            pi_minus(s) * (PI_HI + s)
        } else {
            kp2 - s2
        };
        acc += s6 * (10.0 - x * (15.0 - 6.0 * x)) / (kp2 * kp2 * denom * denom * denom);
    }
    acc
}

#[inline]
fn kpi_sq(k: usize) -> f64 {
    let kp = k as f64 * PI_HI;
    kp * kp
}

/// mu(r) = -d/dr (r cot r) = (2r - sin 2r)/(2 sin^2 r), strictly increasing
/// on [0, pi), mu(0) = 0, divergent at pi.
pub fn mu(r: f64) -> f64 {
    debug_assert!((0.0..PI_HI).contains(&r));
    if r < 1e-2 {
        // 2r - sin 2r loses all digits for tiny r.
        let r2 = r * r;
        r * (2.0 / 3.0 + r2 * (4.0 / 45.0 + r2 * (4.0 / 315.0 + r2 * 8.0 / 4725.0)))
    } else {
        let (s, two_s) = if r > 3.0 {
            let d = pi_minus(r);
            (d.sin(), -(2.0 * d).sin())
        } else {
            (r.sin(), (2.0 * r).sin())
        };
        (2.0 * r - two_s) / (2.0 * s * s)
    }
}

/// mu(r)/(4r) with the limit 1/6 at r = 0; strictly increasing on [0, pi).
pub fn mu_tilde(r: f64) -> f64 {
    debug_assert!((0.0..PI_HI).contains(&r));
    if r < 1e-2 {
        let r2 = r * r;
        1.0 / 6.0 + r2 * (1.0 / 45.0 + r2 * (1.0 / 315.0 + r2 * 2.0 / 4725.0))
    } else {
        mu(r) / (4.0 * r)
    }
}

/// mu(r)/r with the limit 2/3 at r = 0.
#[inline]
pub fn mu_over_r(r: f64) -> f64 {
    4.0 * mu_tilde(r)
}

/// mu'(r) = 2 - 2 cot(r) mu(r).
pub fn mu_prime(r: f64) -> f64 {
    debug_assert!((0.0..PI_HI).contains(&r));
    if r < 1e-2 {
        let r2 = r * r;
        2.0 / 3.0 + r2 * (4.0 / 15.0 + r2 * (4.0 / 63.0 + r2 * 8.0 / 675.0))
    } else {
        2.0 - 2.0 * (cos_stable(r) / sin_stable(r)) * mu(r)
    }
}

/// mu'(r) - mu(r)/r = 16 r^2 sum_g3(r); nonnegative, stable for all r in [0, pi).
#[inline]
pub fn mu_prime_minus_mu_over_r(r: f64) -> f64 {
    16.0 * r * r * sum_g3(r)
}

/// Partial-fraction series for mu: 4r * sum (k pi)^2 ((k pi)^2 - r^2)^{-2}.
///
/// Mathematically identical to `mu`; kept as an independent evaluation path
/// for consistency tests. Splits as 4r (sum_psi + r^2 sum_psi2).
pub fn mu_series(r: f64) -> f64 {
    4.0 * r * (sum_psi(r) + r * r * sum_psi2(r))
}

// ---------------------------------------------------------------------------
// Complex hyperbolic kernels for contour-shifted quadrature.
// ---------------------------------------------------------------------------

/// s/sinh(s) for complex s, with a series fill for small |s|.
pub fn csinch_inv(s: Complex64) -> Complex64 {
    if s.norm_sqr() < 1e-8 {
        let s2 = s * s;
        // 1/(sinh s / s) = 1 - s^2/6 + 7 s^4/360 - ...
        Complex64::new(1.0, 0.0) - s2 / 6.0 + s2 * s2 * (7.0 / 360.0)
    } else {
        s / s.sinh()
    }
}

/// s*coth(s) for complex s, with a series fill for small |s|.
pub fn cx_coth_x(s: Complex64) -> Complex64 {
    if s.norm_sqr() < 1e-8 {
        let s2 = s * s;
        Complex64::new(1.0, 0.0) + s2 / 3.0 - s2 * s2 / 45.0
    } else {
        s * s.cosh() / s.sinh()
    }
}

// ---------------------------------------------------------------------------
// Gamma helpers.
// ---------------------------------------------------------------------------

/// ln Gamma(x) for x > 0.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Volume of the Euclidean unit ball in dimension k.
pub fn euclid_unit_ball_volume(k: usize) -> f64 {
    let kf = k as f64;
    ((kf / 2.0) * PI_HI.ln() - ln_gamma(kf / 2.0 + 1.0)).exp()
}

/// Volume of the Euclidean ball of radius r in dimension k.
pub fn euclid_ball_volume(k: usize, r: f64) -> f64 {
    euclid_unit_ball_volume(k) * r.powi(k as i32)
}

/// Surface area of the unit sphere S^{k-1} in R^k.
pub fn unit_sphere_area(k: usize) -> f64 {
    k as f64 * euclid_unit_ball_volume(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mu_reference_values() {
        // mu(0) = 0, mu(pi/2) = pi/2; mu(1) frozen from a 30-digit evaluation
        // of (2r - sin 2r)/(2 sin^2 r).
        assert_eq!(mu(0.0), 0.0);
        assert_relative_eq!(mu(std::f64::consts::FRAC_PI_2), std::f64::consts::FRAC_PI_2, max_relative = 1e-15);
        assert_relative_eq!(mu(1.0), 0.770190311503061, max_relative = 1e-14);
    }

    #[test]
    fn mu_tilde_reference_values() {
        assert_relative_eq!(mu_tilde(1e-300_f64.max(0.0)), 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(mu_tilde(std::f64::consts::FRAC_PI_2), 0.25, max_relative = 1e-14);
        assert_relative_eq!(mu_tilde(1.0), 0.192547577875765, max_relative = 1e-14);
    }

    #[test]
    fn mu_monotone_on_grid() {
        let n = 10_000;
        let mut prev = -1.0;
        for i in 0..n {
            let r = PI_HI * (i as f64) / (n as f64) * 0.9999;
            let v = mu(r);
            assert!(v > prev, "mu not increasing at r = {r}");
            prev = v;
        }
    }

    #[test]
    fn mu_series_matches_closed_form() {
        // Dual evaluation paths agree to 1e-12 relative on [0.01, 3.1].
        let mut r = 0.01;
        while r <= 3.1 {
            let closed = mu(r);
            let series = mu_series(r);
            assert_relative_eq!(closed, series, max_relative = 1e-12);
            r += 0.0097;
        }
    }

    #[test]
    fn mu_taylor_crossover_consistent() {
        // Closed form and Taylor agree near the 1e-2 crossover, to the
        // accuracy the (cancelling) closed form can deliver there.
        for &r in &[0.009, 0.01, 0.011, 0.02] {
            let taylor = {
                let r2: f64 = r * r;
                r * (2.0 / 3.0 + r2 * (4.0 / 45.0 + r2 * (4.0 / 315.0 + r2 * 8.0 / 4725.0)))
            };
            let closed = (2.0 * r - (2.0 * r).sin()) / (2.0 * r.sin() * r.sin());
            assert_relative_eq!(taylor, closed, max_relative = 1e-10);
        }
    }

    #[test]
    fn x_cot_x_identity_with_sum_psi() {
        // s cot s = 1 - 2 s^2 sum_psi(s).
        let mut s = 0.0;
        while s < 3.14 {
            assert_relative_eq!(
                x_cot_x(s),
                1.0 - 2.0 * s * s * sum_psi(s),
                max_relative = 1e-13,
                epsilon = 1e-13
            );
            s += 0.013;
        }
    }

    #[test]
    fn cot_minus_derivative_identity() {
        // r cot r - r d/dr(r cot r) = (r/sin r)^2, i.e. x_cot_x + r*mu = inv_sinc_sq.
        let mut r = 1e-3;
        while r < 3.14 {
            let lhs = x_cot_x(r) + r * mu(r);
            assert_relative_eq!(lhs, inv_sinc_sq(r), max_relative = 1e-12);
            r += 0.0117;
        }
    }

    #[test]
    fn mu_prime_matches_finite_difference() {
        for &r in &[0.3, 0.9, 1.7, 2.8] {
            let h = 1e-6;
            let fd = (mu(r + h) - mu(r - h)) / (2.0 * h);
            assert_relative_eq!(mu_prime(r), fd, max_relative = 1e-8);
        }
    }

    #[test]
    fn mu_prime_minus_ratio_series_consistent() {
        for &r in &[0.05, 0.4, 1.1, 2.2, 3.0] {
            let direct = mu_prime(r) - mu_over_r(r);
            assert_relative_eq!(mu_prime_minus_mu_over_r(r), direct, max_relative = 1e-9, epsilon = 1e-14);
        }
        // tiny r: series form stays accurate where the direct difference dies
        assert_relative_eq!(
            mu_prime_minus_mu_over_r(1e-6),
            8.0 / 45.0 * 1e-12,
            max_relative = 1e-10
        );
    }

    #[test]
    fn sum_psi2_consistent_with_mu_tilde() {
        // sum_psi2 = (mu_tilde - sum_psi)/s^2.
        for &s in &[0.2, 0.9, 1.8, 2.9] {
            assert_relative_eq!(
                sum_psi2(s),
                (mu_tilde(s) - sum_psi(s)) / (s * s),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn inequality_mu_sinc_bound() {
        // mu(r)/r (sin r/r)^2 <= 2/3 on (0, pi).
        let mut r = 1e-4;
        while r < PI_HI {
            let v = mu_over_r(r) * sinc(r) * sinc(r);
            assert!(v <= 2.0 / 3.0 + 1e-13, "bound violated at r = {r}: {v}");
            r += 0.003;
        }
    }

    #[test]
    fn inequality_inv_sinc_lower_bound() {
        // r/sin r >= 1 + r^2/6 on (0, pi).
        let mut r = 1e-4;
        while r < PI_HI {
            assert!(1.0 / sinc(r) >= 1.0 + r * r / 6.0 - 1e-13, "violated at {r}");
            r += 0.003;
        }
    }

    #[test]
    fn near_pi_accuracy() {
        // mu(r) ~ pi/(pi-r)^2 near pi; the reduced evaluation must track the
        // exact distance to pi (which is what pi_minus reconstructs).
        let r = PI_HI - 1e-9;
        let d = pi_minus(r);
        let expect = (2.0 * r + (2.0 * d).sin()) / (2.0 * d.sin() * d.sin());
        assert_relative_eq!(mu(r), expect, max_relative = 1e-12);
        assert!(mu(r) > 1e18);
    }

    #[test]
    fn complex_kernels_match_real_on_axis() {
        let s = Complex64::new(0.8, 0.0);
        assert_relative_eq!(csinch_inv(s).re, 0.8 / 0.8_f64.sinh(), max_relative = 1e-14);
        assert_relative_eq!(cx_coth_x(s).re, 0.8 * 0.8_f64.cosh() / 0.8_f64.sinh(), max_relative = 1e-14);
        // on the imaginary axis they reduce to the circular versions
        let si = Complex64::new(0.0, 0.7);
        assert_relative_eq!(csinch_inv(si).re, 0.7 / 0.7_f64.sin(), max_relative = 1e-13);
        assert_relative_eq!(cx_coth_x(si).re, x_cot_x(0.7), max_relative = 1e-13);
    }

    #[test]
    fn euclid_volumes() {
        assert_relative_eq!(euclid_unit_ball_volume(2), PI_HI, max_relative = 1e-14);
        assert_relative_eq!(euclid_unit_ball_volume(3), 4.0 * PI_HI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(
            euclid_unit_ball_volume(5),
            8.0 * PI_HI * PI_HI / 15.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(unit_sphere_area(2), 2.0 * PI_HI, max_relative = 1e-14);
    }
}
