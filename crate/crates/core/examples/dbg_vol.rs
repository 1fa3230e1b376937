use ccheis_core::*;
use std::time::Instant;

fn main() {
    let cases = vec![
        (new_spec(&[(1.0, 1)], 1, &[0.0], None).unwrap(), "l1 m1"),
        (new_spec(&[(0.5, 2), (1.0, 2)], 1, &[1.0], None).unwrap(), "l2 m1"),
        (new_spec(&[(0.5, 2), (1.0, 2)], 2, &[10.0, 10.0], None).unwrap(), "l2 m2"),
        (new_spec(&[(0.25, 2), (0.5, 2), (1.0, 2)], 2, &[100.0, 100.0], None).unwrap(), "l3 m2"),
    ];
    for (spec, name) in &cases {
        for &r in &[1.0, 50.0] {
            let cfg = QuadConfig { rel_tol: 1e-7, ..QuadConfig::default() };
            let t0 = Instant::now();
            let v = volume::ball_volume(spec, r, &cfg).unwrap();
            let dt = t0.elapsed().as_secs_f64();
            println!("{name} R={r}: value {:.6e} err {:.1e} in {:.3}s", v.value, v.abs_error, dt);
            let t0 = Instant::now();
            let mc = volume::ball_volume_mc(spec, r, &cfg).unwrap();
            let dt = t0.elapsed().as_secs_f64();
            println!("   mc: {:.6e} +- {:.1e} in {:.3}s", mc.value, mc.abs_error, dt);
        }
    }
}
