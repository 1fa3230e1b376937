use ccheis_core::*;
use ccheis_core::poisson::*;

fn main() {
    let spec = new_spec(&[(1.0, 4)], 1, &[100.0], None).unwrap();
    // reproduce the sampling: d_target moderate, h fraction
    let mut rng = ccheis_core::rng::stream(42, 3000 + 17);
    use rand::Rng;
    for trial in 0..100 {
        let d_target = 0.5 + 4.0 * rng.gen::<f64>();
        let x: Vec<f64> = (0..8).map(|_| rng.sample::<f64,_>(rand_distr::StandardNormal)).collect();
        let t: Vec<f64> = (0..1).map(|_| rng.sample::<f64,_>(rand_distr::StandardNormal)).collect();
        let mut g = GroupPoint::new(x, t);
        for _ in 0..40 {
            let d = distance::distance(&spec, &g).d;
            let ratio = d_target / d;
            if (ratio - 1.0).abs() < 1e-3 { break; }
            g = GroupPoint::new(g.x.iter().map(|v| v*ratio).collect(), g.t.iter().map(|v| v*ratio*ratio).collect());
        }
        let h = (0.1 + 0.4*rng.gen::<f64>()) * d_target / (spec.n() as f64).sqrt();
        let sad = match saddle_solve(&spec, &g, h) { Ok(s) => s, Err(_) => continue };
        let scale = sad.rho * 1e-3;
        let tau = sad.tau[0];
        let spp = s_value(&spec, &g, h, &[tau + 2.0*scale]).unwrap();
        let s0 = s_value(&spec, &g, h, &[tau]).unwrap();
        let smm = s_value(&spec, &g, h, &[tau - 2.0*scale]).unwrap();
        let fd = (spp - 2.0*s0 + smm) / (4.0*scale*scale);
        let rel = (sad.neg_hessian[(0,0)] + fd).abs() / sad.neg_hessian[(0,0)].abs();
        if rel > 1e-5 {
            println!("trial {trial}: rho={:.6e} tau={:.6e} t={:.4e} d_target={:.3} h={:.4}", sad.rho, tau, g.t[0], d_target, h);
            println!("  analytic H = {:.10e}  fd = {:.10e}  rel = {:.3e}", sad.neg_hessian[(0,0)], -fd, rel);
            println!("  grad_norm = {:.3e}  S = {:.6e}", sad.grad_norm, sad.s_value);
            // check with larger steps
            for &mult in &[1e-2f64, 3e-2, 1e-1] {
                let sc = sad.rho * mult;
                let spp = s_value(&spec, &g, h, &[tau + 2.0*sc]).unwrap();
                let smm = s_value(&spec, &g, h, &[tau - 2.0*sc]).unwrap();
                let fd2 = (spp - 2.0*s0 + smm) / (4.0*sc*sc);
                println!("  step {mult:.0e}*rho: fd = {:.10e}", -fd2);
            }
            break;
        }
    }
}
