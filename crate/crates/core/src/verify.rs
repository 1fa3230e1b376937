//! The acceptance sweep: the reference spec family F and the ten criteria
//! that turn the uniform two-sided estimates into band checks and the exact
//! identities into equality checks. Used by the `acceptance` test target and
//! by the CLI `verify` command.

use crate::config::QuadConfig;
use crate::distance;
use crate::error::Result;
use crate::group::{new_spec, GroupPoint, GroupSpec};
use crate::poisson;
use crate::rng;
use crate::scalar::{self, RadialProfile};
use crate::volume;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

const PI: f64 = std::f64::consts::PI;

/// Radii of the acceptance sweep (log-spaced).
pub const RADII: [f64; 7] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0];

/// Scalar weights b = beta 1_m of the sweep.
pub const BETAS: [f64; 5] = [0.0, 0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// The reference family F: 12 spectral bases (l in {1,2,3} with the pinned
/// a-tuples and admissible k, m) crossed with the five scalar weights.
pub fn family() -> Vec<GroupSpec> {
    let bases: Vec<(Vec<(f64, usize)>, usize)> = vec![
        (vec![(1.0, 1)], 1),
        (vec![(1.0, 2)], 1),
        (vec![(1.0, 2)], 2),
        (vec![(1.0, 4)], 1),
        (vec![(1.0, 4)], 2),
        (vec![(0.5, 1), (1.0, 1)], 1),
        (vec![(0.5, 2), (1.0, 2)], 1),
        (vec![(0.5, 2), (1.0, 2)], 2),
        (vec![(0.5, 4), (1.0, 2)], 2),
        (vec![(0.25, 1), (0.5, 1), (1.0, 1)], 1),
        (vec![(0.25, 2), (0.5, 2), (1.0, 2)], 1),
        (vec![(0.25, 2), (0.5, 2), (1.0, 2)], 2),
    ];
    let mut specs = Vec::new();
    for (blocks, m) in &bases {
        for &beta in &BETAS {
            specs.push(new_spec(blocks, *m, &vec![beta; *m], None).expect("family spec valid"));
        }
    }
    specs
}

/// Short label for a spec in reports.
pub fn label(spec: &GroupSpec) -> String {
    let blocks: Vec<String> = spec
        .blocks()
        .iter()
        .map(|b| format!("({},{})", b.a, b.k))
        .collect();
    format!("a,k=[{}] m={} b={:?}", blocks.join(""), spec.m(), spec.b())
}

fn gauss_vec(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| loop {
            let v: f64 = rng.sample(StandardNormal);
            if v != 0.0 {
                break v;
            }
        })
        .collect()
}

/// A point of the open set G (all coordinates nonzero) with d_B close to
/// `d_target`, found by iterating the parabolic dilation.
fn sample_g_point(spec: &GroupSpec, rng: &mut impl Rng, d_target: f64) -> GroupPoint {
    let x = gauss_vec(rng, 2 * spec.n());
    let t = gauss_vec(rng, spec.m());
    let mut g = GroupPoint::new(x, t);
    for _ in 0..40 {
        let d = distance::distance(spec, &g).d;
        let ratio = d_target / d;
        if (ratio - 1.0).abs() < 1e-3 {
            break;
        }
        g = GroupPoint::new(
            g.x.iter().map(|v| v * ratio).collect(),
            g.t.iter().map(|v| v * ratio * ratio).collect(),
        );
    }
    g
}

fn report(id: usize, name: &'static str, passed: bool, detail: String) -> CriterionReport {
    CriterionReport {
        id,
        name,
        passed,
        detail,
    }
}

/// Criterion 1: exact identities at 1e-9 (1e-10 relative where stated).
pub fn criterion_exact_identities(seed: u64) -> CriterionReport {
    let mut failures = Vec::new();
    let specs = family();
    for (i, spec) in specs.iter().enumerate() {
        // D_2 = n/(n+1) C_H
        let d2 = match volume::moment_dnu(spec, 2.0) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{}: D_2 failed: {e}", label(spec)));
                continue;
            }
        };
        let n = spec.n() as f64;
        let expect = n / (n + 1.0) * spec.c_h();
        if (d2 - expect).abs() > 1e-9 * expect.max(1.0) {
            failures.push(format!("{}: D_2 = {d2} vs {expect}", label(spec)));
        }
        // l = 1: D_nu = 2n/(2n + nu)
        if spec.ell() == 1 {
            for &nu in &[1.0, 2.0, 4.0, 8.0] {
                let v = volume::moment_dnu(spec, nu).unwrap();
                let e = 2.0 * n / (2.0 * n + nu);
                if (v - e).abs() > 1e-9 {
                    failures.push(format!("{}: D_{nu} = {v} vs {e}", label(spec)));
                }
            }
        }
        let mut rng = rng::stream(seed, 1000 + i as u64);
        // det DF_x(0) = 6^{-m} prod(|Wx|^2 + 12 b_l), 1e-10 relative
        for _ in 0..10 {
            let x = gauss_vec(&mut rng, 2 * spec.n());
            let det = volume::jacobian_det_fx(
                spec,
                &x,
                &distance::ThetaCoord(vec![0.0; spec.m()]),
            )
            .unwrap();
            let wx2 = spec.wx_norm(&x).powi(2);
            let mut expect = 6f64.powi(-(spec.m() as i32));
            for &b in spec.b() {
                expect *= wx2 + 12.0 * b;
            }
            if ((det - expect) / expect).abs() > 1e-10 {
                failures.push(format!("{}: det DF(0) = {det} vs {expect}", label(spec)));
                break;
            }
        }
        // S(tau_h) closed form vs direct, 1e-10 relative
        for _ in 0..3 {
            let g = sample_g_point(spec, &mut rng, 2.0);
            let h = 0.3 * distance::distance(spec, &g).d / (spec.n() as f64).sqrt();
            if let Ok(sad) = poisson::saddle_solve(spec, &g, h) {
                let closed = poisson::s_value_closed_form(spec, &g, h, &sad);
                if ((closed - sad.s_value) / sad.s_value).abs() > 1e-10 {
                    failures.push(format!(
                        "{}: NST {closed} vs direct {}",
                        label(spec),
                        sad.s_value
                    ));
                    break;
                }
            }
        }
        // d_B((x, 0)) = |x|
        let x = gauss_vec(&mut rng, 2 * spec.n());
        let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let g = GroupPoint::new(x, vec![0.0; spec.m()]);
        let d = distance::distance(spec, &g).d;
        if (d - x_norm).abs() > 1e-9 * x_norm.max(1.0) {
            failures.push(format!("{}: d(x,0) = {d} vs |x| = {x_norm}", label(spec)));
        }
        // d_B((0, t)) = 2 sqrt(pi |t|) for b = 0, m = 1 (a_l = 1 in F)
        if spec.b().iter().all(|&v| v == 0.0) && spec.m() == 1 {
            let t = 0.7;
            let g = GroupPoint::new(vec![0.0; 2 * spec.n()], vec![t]);
            let d = distance::distance(spec, &g).d;
            let e = 2.0 * (PI * t).sqrt();
            if (d - e).abs() > 1e-7 * e {
                failures.push(format!("{}: d(0,t) = {d} vs {e}", label(spec)));
            }
        }
        // d_G = Koranyi on l = 1 specs, 1e-8
        if spec.ell() == 1 {
            let x = gauss_vec(&mut rng, 2 * spec.n());
            let t = gauss_vec(&mut rng, spec.m());
            let g = GroupPoint::new(x.clone(), t.clone());
            let dg = distance::homogeneous_norm(spec, &g);
            let x2: f64 = x.iter().map(|v| v * v).sum();
            let t2: f64 = t.iter().map(|v| v * v).sum();
            let koranyi = (x2 * x2 + 16.0 * t2).powf(0.25);
            if ((dg - koranyi) / koranyi).abs() > 1e-8 {
                failures.push(format!("{}: d_G = {dg} vs Koranyi {koranyi}", label(spec)));
            }
        }
    }
    let passed = failures.is_empty();
    report(
        1,
        "exact identities",
        passed,
        if passed {
            format!("{} specs, all identities hold", specs.len())
        } else {
            failures.join("; ")
        },
    )
}

/// Criterion 2: round trips at 1e-9.
pub fn criterion_round_trips(seed: u64) -> CriterionReport {
    let specs = family();
    let failures: Vec<String> = specs
        .par_iter()
        .enumerate()
        .filter_map(|(i, spec)| {
            let mut rng = rng::stream(seed, 2000 + i as u64);
            let mut worst_theta: f64 = 0.0;
            // F_x inverse(forward) on 1000 random points
            for _ in 0..1000 {
                let x = gauss_vec(&mut rng, 2 * spec.n());
                let dir = gauss_vec(&mut rng, spec.m());
                let dn: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                let rho: f64 = rng.gen::<f64>() * 0.99 * PI / spec.a_top();
                let theta =
                    distance::ThetaCoord(dir.iter().map(|v| v / dn * rho).collect());
                let t = match distance::f_x_forward(spec, &x, &theta) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                let back = distance::f_x_inverse(spec, &x, &t).unwrap();
                for (a, b) in theta.0.iter().zip(&back.0) {
                    worst_theta = worst_theta.max((a - b).abs() / rho.max(1e-9));
                }
            }
            // c_map(saddle_solve) returns t
            let mut worst_t: f64 = 0.0;
            for _ in 0..5 {
                let g = sample_g_point(spec, &mut rng, 2.0);
                let h = 0.2 * distance::distance(spec, &g).d;
                if let Ok(sad) = poisson::saddle_solve(spec, &g, h) {
                    let profile = RadialProfile::from_x(spec, &g.x, h);
                    let t = poisson::c_map(spec, &profile, &sad.tau).unwrap();
                    for (a, b) in t.iter().zip(&g.t) {
                        worst_t = worst_t.max((a - b).abs() / b.abs().max(1e-12));
                    }
                }
            }
            // normalize preserves the distance (family specs are rescaled
            // first so the normalization is nontrivial)
            let scaled = new_spec(
                &spec
                    .blocks()
                    .iter()
                    .map(|b| (b.a * 2.0, b.k))
                    .collect::<Vec<_>>(),
                spec.m(),
                &spec.b().iter().map(|&v| v * 4.0).collect::<Vec<_>>(),
                None,
            )
            .unwrap();
            let mut worst_d: f64 = 0.0;
            for _ in 0..100 {
                let x = gauss_vec(&mut rng, 2 * spec.n());
                let t = gauss_vec(&mut rng, spec.m());
                let g = GroupPoint::new(x, t);
                let d = distance::distance(&scaled, &g).d;
                let nd = distance::distance(&scaled.normalize(), &scaled.normalize_point(&g)).d;
                worst_d = worst_d.max((d - nd).abs() / d.max(1e-12));
            }
            if worst_theta > 1e-9 || worst_t > 1e-9 || worst_d > 1e-9 {
                Some(format!(
                    "{}: theta {worst_theta:.2e}, t {worst_t:.2e}, d {worst_d:.2e}",
                    label(spec)
                ))
            } else {
                None
            }
        })
        .collect();
    let passed = failures.is_empty();
    report(
        2,
        "round trips",
        passed,
        if passed {
            format!("{} specs x 1000 points within 1e-9", specs.len())
        } else {
            failures.join("; ")
        },
    )
}

/// Criterion 3: analytic derivatives vs central finite differences, 1e-5.
pub fn criterion_derivative_checks(seed: u64) -> CriterionReport {
    let specs = family();
    let failures: Vec<String> = specs
        .par_iter()
        .enumerate()
        .filter_map(|(i, spec)| {
            let mut rng = rng::stream(seed, 3000 + i as u64);
            let r_star = scalar::r_star(spec);
            let mut worst_hess: f64 = 0.0;
            let mut worst_v: f64 = 0.0;
            for _ in 0..100 {
                let d_target = 0.5 + 4.0 * rng.gen::<f64>();
                let g = sample_g_point(spec, &mut rng, d_target);
                let h = (0.1 + 0.4 * rng.gen::<f64>()) * d_target / (spec.n() as f64).sqrt();
                let sad = match poisson::saddle_solve(spec, &g, h) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                // Hessian vs FD; entries are compared against the row/column
                // diagonal scale (a near-zero cross term has no relative
                // accuracy of its own to match). S is smooth in lambda on
                // the whole ball, so the step is absolute, capped by the
                // distance to the domain edge.
                let m = spec.m();
                let scale = 1e-3 * (PI / spec.a_top() - sad.rho).min(1.0);
                for ii in 0..m {
                    for ll in 0..m {
                        let mut pp = sad.tau.clone();
                        pp[ii] += scale;
                        pp[ll] += scale;
                        let mut pm = sad.tau.clone();
                        pm[ii] += scale;
                        pm[ll] -= scale;
                        let mut mp = sad.tau.clone();
                        mp[ii] -= scale;
                        mp[ll] += scale;
                        let mut mm = sad.tau.clone();
                        mm[ii] -= scale;
                        mm[ll] -= scale;
                        let fd = (poisson::s_value(spec, &g, h, &pp).unwrap()
                            - poisson::s_value(spec, &g, h, &pm).unwrap()
                            - poisson::s_value(spec, &g, h, &mp).unwrap()
                            + poisson::s_value(spec, &g, h, &mm).unwrap())
                            / (4.0 * scale * scale);
                        let diff = (sad.neg_hessian[(ii, ll)] + fd).abs();
                        let entry_scale = sad.neg_hessian[(ii, ii)]
                            .abs()
                            .max(sad.neg_hessian[(ll, ll)].abs());
                        worst_hess = worst_hess.max(diff / entry_scale);
                    }
                }
                // V vs FD of W along the radial direction:
                // grad W . lam-hat = V rho + 8 u (lam A lam)/rho
                let profile = RadialProfile::from_x(spec, &g.x, h);
                let lam = &sad.tau;
                let rho = sad.rho;
                // step capped by both the radius and the distance to r_*,
                // where W blows up and the FD truncation error with it
                let fd_h = 1e-3 * rho.min(r_star - rho);
                let lam_p: Vec<f64> =
                    lam.iter().map(|&v| v * (1.0 + fd_h / rho)).collect();
                let lam_m: Vec<f64> =
                    lam.iter().map(|&v| v * (1.0 - fd_h / rho)).collect();
                let wp = scalar::w_frak(spec, &profile, &lam_p).unwrap();
                let wm = scalar::w_frak(spec, &profile, &lam_m).unwrap();
                let fd = (wp - wm) / (2.0 * fd_h);
                let qf: f64 = spec.b().iter().zip(lam).map(|(&b, &l)| b * l * l).sum();
                let analytic = scalar::v_frak(spec, &profile, lam).unwrap() * rho
                    + 8.0 * scalar::u_fun(spec, rho).unwrap() * qf / rho;
                let v_scale = analytic.abs().max(wp.abs() / rho);
                worst_v = worst_v.max((fd - analytic).abs() / v_scale);
            }
            if worst_hess > 1e-5 || worst_v > 1e-5 {
                Some(format!(
                    "{}: hess {worst_hess:.2e}, V {worst_v:.2e}",
                    label(spec)
                ))
            } else {
                None
            }
        })
        .collect();
    let passed = failures.is_empty();
    report(
        3,
        "derivative checks",
        passed,
        if passed {
            "analytic Hessian and V match FD within 1e-5 on 100 points/spec".into()
        } else {
            failures.join("; ")
        },
    )
}

/// Criterion 4: the volume band (single C <= 10 across F x radii) plus
/// quadrature/Monte-Carlo agreement within combined 3-sigma bars.
pub fn criterion_volume_band(seed: u64) -> CriterionReport {
    let specs = family();
    let mut pairs = Vec::new();
    for spec in &specs {
        for &r in &RADII {
            pairs.push((spec.clone(), r));
        }
    }
    let results: Vec<std::result::Result<(f64, f64, f64, f64), String>> = pairs
        .par_iter()
        .map(|(spec, r)| {
            let cfg = QuadConfig {
                rel_tol: 1e-6,
                seed,
                ..QuadConfig::default()
            };
            let q = volume::ball_volume(spec, *r, &cfg)
                .map_err(|e| format!("{} R={r}: {e}", label(spec)))?;
            let mc = volume::ball_volume_mc(spec, *r, &cfg)
                .map_err(|e| format!("{} R={r}: {e}", label(spec)))?;
            let ratio = q.value / volume::closed_form_estimate(spec, *r);
            let disagreement = (q.value - mc.value).abs();
            let budget = mc.abs_error + q.abs_error;
            Ok((ratio, disagreement, budget, q.value))
        })
        .collect();
    let mut c_lo = f64::INFINITY;
    let mut c_hi: f64 = 0.0;
    let mut mc_fail = 0usize;
    let mut errors = Vec::new();
    for r in &results {
        match r {
            Ok((ratio, dis, budget, _)) => {
                c_lo = c_lo.min(*ratio);
                c_hi = c_hi.max(*ratio);
                if dis > budget {
                    mc_fail += 1;
                }
            }
            Err(e) => errors.push(e.clone()),
        }
    }
    let fitted_c = c_hi.max(1.0 / c_lo);
    // a few 3-sigma misses in ~420 comparisons are expected by chance
    let mc_ok = mc_fail <= pairs.len() / 100 + 2;
    let passed = errors.is_empty() && fitted_c <= 10.0 && mc_ok;
    report(
        4,
        "volume band",
        passed,
        format!(
            "ratio in [{c_lo:.4}, {c_hi:.4}], fitted C = {fitted_c:.3} (bound 10); {} of {} MC checks outside 3-sigma{}",
            mc_fail,
            pairs.len(),
            if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join("; ")) }
        ),
    )
}

/// Criterion 5: doubling ratios bounded by C 4^{n+m} with C <= 4, exactly
/// 4^{n+m} at b = 0.
pub fn criterion_doubling(_seed: u64) -> CriterionReport {
    let specs = family();
    let mut pairs = Vec::new();
    for spec in &specs {
        for &r in &RADII {
            pairs.push((spec.clone(), r));
        }
    }
    let results: Vec<std::result::Result<(f64, f64, bool), String>> = pairs
        .par_iter()
        .map(|(spec, r)| {
            let cfg = QuadConfig {
                rel_tol: 1e-7,
                ..QuadConfig::default()
            };
            let d = volume::doubling_ratio(spec, *r, &cfg)
                .map_err(|e| format!("{} R={r}: {e}", label(spec)))?;
            let reference = 4f64.powi((spec.n() + spec.m()) as i32);
            let b_zero = spec.b().iter().all(|&v| v == 0.0);
            if b_zero {
                let tol = (5.0 * d.abs_error).max(1e-4 * reference);
                if (d.ratio - reference).abs() > tol {
                    return Err(format!(
                        "{} R={r}: b=0 ratio {} vs exact {reference}",
                        label(spec),
                        d.ratio
                    ));
                }
            }
            Ok((d.ratio / reference, d.abs_error, b_zero))
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for r in &results {
        match r {
            Ok((rel, _, _)) => worst = worst.max(*rel),
            Err(e) => errors.push(e.clone()),
        }
    }
    let passed = errors.is_empty() && worst <= 4.0;
    report(
        5,
        "doubling bound",
        passed,
        format!(
            "max ratio/4^(n+m) = {worst:.4} (bound 4){}",
            if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }
        ),
    )
}

/// Criterion 6: moment bands (D_nu ~ C_H^{nu/2} and the product moments).
pub fn criterion_moment_bands(_seed: u64) -> CriterionReport {
    let specs = family();
    let mut c_lo = f64::INFINITY;
    let mut c_hi: f64 = 0.0;
    let mut p_lo = f64::INFINITY;
    let mut p_hi: f64 = 0.0;
    let mut errors = Vec::new();
    for spec in &specs {
        let m = spec.m() as f64;
        for &nu in &[1.0, 2.0, 4.0, 10.0 * m / 2.0, 10.0 * m] {
            match volume::moment_dnu(spec, nu) {
                Ok(v) => {
                    let ratio = v / spec.c_h().powf(nu / 2.0);
                    c_lo = c_lo.min(ratio);
                    c_hi = c_hi.max(ratio);
                }
                Err(e) => errors.push(format!("{} nu={nu}: {e}", label(spec))),
            }
        }
        for &alpha in &[0.5, 0.75, 1.0] {
            for &scale in &[0.0, 1.0, 10.0] {
                let beta = vec![scale * spec.c_h(); spec.m()];
                match volume::moment_product(spec, alpha, &beta) {
                    Ok(v) => {
                        let denom: f64 = beta
                            .iter()
                            .map(|&bl| (spec.c_h() + bl).powf(alpha))
                            .product();
                        let ratio = v / denom;
                        p_lo = p_lo.min(ratio);
                        p_hi = p_hi.max(ratio);
                    }
                    Err(e) => errors.push(format!("{} alpha={alpha}: {e}", label(spec))),
                }
            }
        }
    }
    let fitted = (c_hi.max(1.0 / c_lo)).max(p_hi.max(1.0 / p_lo));
    // the claim leaves its constant open; even the exact H-type values
    // 2n/(2n + nu) reach 6 at nu = 10, so the pinned bound is 16
    let passed = errors.is_empty() && fitted <= 16.0;
    report(
        6,
        "moment bands",
        passed,
        format!(
            "D_nu/C_H^(nu/2) in [{c_lo:.4}, {c_hi:.4}], product moments in [{p_lo:.4}, {p_hi:.4}], fitted C = {fitted:.3} (bound 16){}",
            if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }
        ),
    )
}

/// Criterion 7: the beta-integral asymptotic band.
///
/// The exact ratio is (1 + v/(2n))^{-(m/2+1)}/2 up to O(1/n), so the sweep
/// corner (n=4, m=6, v=60) legitimately sits near 1e-4 and the uniform
/// constant of the claim must absorb it; the pinned bound is 2e4. The
/// n-uniformity that gives the claim its content is checked structurally:
/// for each (m, v-pattern) the ratio increases in n and stays below 1.
pub fn criterion_beta_asymptotic(_seed: u64) -> CriterionReport {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut errors = Vec::new();
    for &m in &[1usize, 2, 4, 6] {
        for pattern in 0..3 {
            let mut prev = 0.0;
            for &n in &[4usize, 16, 64, 256, 1024] {
                let v = match pattern {
                    0 => 0.0,
                    1 => m as f64,
                    _ => 10.0 * m as f64,
                };
                match volume::beta_integral(n, m, v) {
                    Ok(val) => {
                        let reference = (crate::special::ln_gamma(m as f64 / 2.0 + 1.0)
                            - (m as f64 / 2.0 + 1.0) * (n as f64).ln())
                        .exp();
                        let ratio = val / reference;
                        lo = lo.min(ratio);
                        hi = hi.max(ratio);
                        if ratio < prev - 1e-12 || ratio > 1.0 {
                            errors.push(format!(
                                "(n={n},m={m},v={v}): ratio {ratio} breaks n-monotone approach"
                            ));
                        }
                        prev = ratio;
                    }
                    Err(e) => errors.push(format!("(n={n},m={m},v={v}): {e}")),
                }
            }
        }
    }
    let fitted = hi.max(1.0 / lo);
    let passed = errors.is_empty() && fitted <= 2e4;
    report(
        7,
        "beta-integral asymptotic",
        passed,
        format!(
            "ratio in [{lo:.2e}, {hi:.4}], fitted C = {fitted:.4e} (bound 2e4), n-monotone{}",
            if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }
        ),
    )
}

/// Criterion 8: saddle and Poisson bands on the family satisfying the
/// top-block assumption (k_l/n >= 1/4): Hessian eigenvalue comparison,
/// saddle/direct kernel ratio with C <= 3, contour independence at 1e-6.
pub fn criterion_saddle_poisson(seed: u64) -> CriterionReport {
    let specs: Vec<GroupSpec> = family()
        .into_iter()
        .filter(|s| s.satisfies_top_block_fraction(0.25))
        .collect();
    struct PointStats {
        eig_lo: f64,
        eig_hi: f64,
        ratio_lo: f64,
        ratio_hi: f64,
        det_c: f64,
        contour_worst: f64,
        node_advantage: f64,
        errors: Vec<String>,
    }
    let stats: Vec<PointStats> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut st = PointStats {
                eig_lo: f64::INFINITY,
                eig_hi: 0.0,
                ratio_lo: f64::INFINITY,
                ratio_hi: 0.0,
                det_c: 0.0,
                contour_worst: 0.0,
                node_advantage: f64::INFINITY,
                errors: Vec::new(),
            };
            let mut rng = rng::stream(seed, 8000 + i as u64);
            let cfg = QuadConfig {
                rel_tol: 1e-7,
                seed,
                ..QuadConfig::default()
            };
            for &d_target in &[0.5, 2.0, 8.0, 20.0] {
                let g = sample_g_point(spec, &mut rng, d_target);
                let d = distance::distance(spec, &g).d;
                for &f in &[0.1, 0.5, 1.0] {
                    let h = f * d / (spec.n() as f64).sqrt();
                    let sad = match poisson::saddle_solve(spec, &g, h) {
                        Ok(s) => s,
                        Err(e) => {
                            st.errors.push(format!("{} d={d:.2}: {e}", label(spec)));
                            continue;
                        }
                    };
                    // eigenvalues of (-Hess)(S I + A)^{-1} via the symmetric
                    // similarity D^{-1/2} H D^{-1/2}
                    let m = spec.m();
                    let mut b_mat = DMatrix::<f64>::zeros(m, m);
                    for ii in 0..m {
                        for ll in 0..m {
                            let di = (sad.s_value + spec.b()[ii]).sqrt();
                            let dl = (sad.s_value + spec.b()[ll]).sqrt();
                            b_mat[(ii, ll)] = sad.neg_hessian[(ii, ll)] / (di * dl);
                        }
                    }
                    for ev in b_mat.symmetric_eigen().eigenvalues.iter() {
                        st.eig_lo = st.eig_lo.min(*ev);
                        st.eig_hi = st.eig_hi.max(*ev);
                    }
                    // det(-Hess) <= C^m prod(d^2 + 8 b_l)
                    let mut det = 1.0;
                    match sad.neg_hessian.clone().cholesky() {
                        Some(ch) => {
                            for ii in 0..m {
                                det *= ch.l()[(ii, ii)] * ch.l()[(ii, ii)];
                            }
                        }
                        None => st.errors.push(format!("{}: Hessian not PD", label(spec))),
                    }
                    let denom: f64 =
                        spec.b().iter().map(|&bl| d * d + 8.0 * bl).product();
                    st.det_c = st.det_c.max((det / denom).powf(1.0 / m as f64));
                    // kernels
                    let ps = match poisson::poisson_saddle(spec, &g, h) {
                        Ok(p) => p,
                        Err(e) => {
                            st.errors.push(format!("{}: saddle kernel: {e}", label(spec)));
                            continue;
                        }
                    };
                    let pd = match poisson::poisson_direct(spec, &g, h, &cfg) {
                        Ok(p) => p,
                        Err(e) => {
                            st.errors.push(format!("{}: direct kernel: {e}", label(spec)));
                            continue;
                        }
                    };
                    // matched tolerance so the node-count comparison is fair
                    let psh = match poisson::poisson_shifted_tol(spec, &g, h, &sad, cfg.rel_tol) {
                        Ok(p) => p,
                        Err(e) => {
                            st.errors.push(format!("{}: shifted kernel: {e}", label(spec)));
                            continue;
                        }
                    };
                    let ratio = ps.value / pd.value;
                    st.ratio_lo = st.ratio_lo.min(ratio);
                    st.ratio_hi = st.ratio_hi.max(ratio);
                    st.contour_worst = st
                        .contour_worst
                        .max((pd.value - psh.value).abs() / pd.value.abs());
                    st.node_advantage = st
                        .node_advantage
                        .min(pd.n_evals as f64 / psh.n_evals.max(1) as f64);
                }
            }
            st
        })
        .collect();
    let mut eig_lo = f64::INFINITY;
    let mut eig_hi: f64 = 0.0;
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi: f64 = 0.0;
    let mut det_c: f64 = 0.0;
    let mut contour: f64 = 0.0;
    let mut nodes = f64::INFINITY;
    let mut errors = Vec::new();
    for st in &stats {
        eig_lo = eig_lo.min(st.eig_lo);
        eig_hi = eig_hi.max(st.eig_hi);
        ratio_lo = ratio_lo.min(st.ratio_lo);
        ratio_hi = ratio_hi.max(st.ratio_hi);
        det_c = det_c.max(st.det_c);
        contour = contour.max(st.contour_worst);
        nodes = nodes.min(st.node_advantage);
        errors.extend(st.errors.clone());
    }
    let kernel_c = ratio_hi.max(1.0 / ratio_lo);
    let eig_c = eig_hi.max(1.0 / eig_lo);
    let passed = errors.is_empty() && kernel_c <= 3.0 && contour <= 1e-6 && eig_c <= 10.0;
    report(
        8,
        "saddle/Poisson bands",
        passed,
        format!(
            "eig band [{eig_lo:.4}, {eig_hi:.4}] (C = {eig_c:.3}); kernel ratio [{ratio_lo:.4}, {ratio_hi:.4}] (C = {kernel_c:.3}, bound 3); contour diff {contour:.2e} (tol 1e-6); det C = {det_c:.3}; min node advantage {nodes:.1}x{}",
            if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }
        ),
    )
}

/// Criterion 9: the pointwise maximal-function bound with one constant <= 10
/// across 1000 (g, r) samples per spec in the assumption family.
pub fn criterion_maximal(seed: u64) -> CriterionReport {
    let specs: Vec<GroupSpec> = family()
        .into_iter()
        .filter(|s| s.satisfies_top_block_fraction(0.25))
        .collect();
    let per_spec = 1000usize;
    let results: Vec<std::result::Result<f64, String>> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut rng = rng::stream(seed, 9000 + i as u64);
            let cfg = QuadConfig {
                rel_tol: 1e-6,
                seed,
                ..QuadConfig::default()
            };
            // one quadrature volume per sweep radius, shared by the samples
            let mut vols = Vec::new();
            for &r in &RADII {
                match volume::ball_volume(spec, r, &cfg) {
                    Ok(v) => vols.push(v.value),
                    Err(e) => return Err(format!("{} R={r}: {e}", label(spec))),
                }
            }
            let mut worst: f64 = 0.0;
            for _ in 0..per_spec {
                let idx = rng.gen_range(0..RADII.len());
                let r = RADII[idx];
                let frac = 0.05 + 0.9 * rng.gen::<f64>();
                let g = sample_g_point(spec, &mut rng, frac * r);
                match poisson::maximal_bound_check_with_volume(spec, &g, r, vols[idx]) {
                    Ok(ratio) => worst = worst.max(ratio),
                    Err(e) => return Err(format!("{}: {e}", label(spec))),
                }
            }
            Ok(worst)
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for r in &results {
        match r {
            Ok(v) => worst = worst.max(*v),
            Err(e) => errors.push(e.clone()),
        }
    }
    let passed = errors.is_empty() && worst <= 10.0;
    report(
        9,
        "maximal inequality",
        passed,
        format!(
            "max ratio = {worst:.4} over {} specs x {per_spec} samples (bound 10){}",
            specs.len(),
            if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }
        ),
    )
}

/// Criterion 10: heat kernel spot value p_h(o) h^2 = 1/16 on H(2,1).
pub fn criterion_heat_spot(_seed: u64) -> CriterionReport {
    let spec = new_spec(&[(1.0, 1)], 1, &[0.0], None).unwrap();
    let o = GroupPoint::origin(&spec);
    let cfg = QuadConfig::default();
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for &h in &[0.25, 1.0, 4.0] {
        match poisson::heat_kernel(&spec, &o, h, &cfg) {
            Ok(p) => worst = worst.max((p.value * h * h - 1.0 / 16.0).abs() * 16.0),
            Err(e) => errors.push(format!("h={h}: {e}")),
        }
    }
    let passed = errors.is_empty() && worst <= 1e-6;
    report(
        10,
        "heat kernel spot value",
        passed,
        format!(
            "max |p_h(o) h^2 * 16 - 1| = {worst:.2e} (tol 1e-6){}",
            if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }
        ),
    )
}

/// Run a selection of criteria (ids from 1 to 10).
pub fn run_selected(ids: &[usize], seed: u64) -> Result<Vec<CriterionReport>> {
    let mut reports = Vec::new();
    for &id in ids {
        let rep = match id {
            1 => criterion_exact_identities(seed),
            2 => criterion_round_trips(seed),
            3 => criterion_derivative_checks(seed),
            4 => criterion_volume_band(seed),
            5 => criterion_doubling(seed),
            6 => criterion_moment_bands(seed),
            7 => criterion_beta_asymptotic(seed),
            8 => criterion_saddle_poisson(seed),
            9 => criterion_maximal(seed),
            10 => criterion_heat_spot(seed),
            _ => {
                return Err(crate::error::Error::DomainError(format!(
                    "unknown criterion id {id}"
                )))
            }
        };
        reports.push(rep);
    }
    Ok(reports)
}

/// Run the full acceptance suite.
pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    run_selected(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10], seed).expect("fixed ids")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_has_expected_size_and_validity() {
        let f = family();
        assert_eq!(f.len(), 60);
        for spec in &f {
            assert!(spec.a_top() == 1.0);
            assert!(spec.c_h() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn g_point_sampler_hits_target() {
        let f = family();
        let spec = &f[7];
        let mut rng = rng::stream(3, 0);
        let g = sample_g_point(spec, &mut rng, 5.0);
        let d = distance::distance(spec, &g).d;
        assert!((d - 5.0).abs() < 0.05, "d = {d}");
        assert!(g.x.iter().all(|&v| v != 0.0));
        assert!(g.t.iter().all(|&v| v != 0.0));
    }
}
