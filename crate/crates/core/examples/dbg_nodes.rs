use ccheis_core::*;
use ccheis_core::poisson::*;

fn main() {
    // matched-tolerance node comparison across representative sweep points
    let specs = vec![
        (new_spec(&[(1.0, 1)], 1, &[0.0], None).unwrap(), "l1m1 b0"),
        (new_spec(&[(1.0, 4)], 2, &[1.0, 1.0], None).unwrap(), "l1m2 b1"),
        (new_spec(&[(0.5, 2), (1.0, 2)], 2, &[10.0, 10.0], None).unwrap(), "l2m2 b10"),
    ];
    let cfg = QuadConfig { rel_tol: 1e-7, ..QuadConfig::default() };
    for (spec, name) in &specs {
        for &d_target in &[0.5, 2.0, 8.0, 20.0] {
            let mut rng = ccheis_core::rng::stream(7, 0);
            use rand::Rng;
            let x: Vec<f64> = (0..2*spec.n()).map(|_| rng.sample::<f64,_>(rand_distr::StandardNormal)).collect();
            let t: Vec<f64> = (0..spec.m()).map(|_| rng.sample::<f64,_>(rand_distr::StandardNormal)).collect();
            let mut g = GroupPoint::new(x, t);
            for _ in 0..40 {
                let d = distance::distance(spec, &g).d;
                let r = d_target / d;
                if (r - 1.0).abs() < 1e-3 { break; }
                g = GroupPoint::new(g.x.iter().map(|v| v*r).collect(), g.t.iter().map(|v| v*r*r).collect());
            }
            let d = distance::distance(spec, &g).d;
            let h = 0.5 * d / (spec.n() as f64).sqrt();
            let sad = saddle_solve(spec, &g, h).unwrap();
            let pd = poisson_direct(spec, &g, h, &cfg).unwrap();
            let ps = poisson_shifted_tol(spec, &g, h, &sad, 1e-7).unwrap();
            println!("{name} d={d_target}: direct {} evals, shifted {} evals, advantage {:.1}x, reldiff {:.1e}",
                pd.n_evals, ps.n_evals, pd.n_evals as f64 / ps.n_evals as f64,
                ((pd.value - ps.value)/pd.value).abs());
        }
    }
}
