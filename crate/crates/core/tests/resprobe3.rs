use isoflow::export::RunConfig;
use isoflow::*;

#[test]
#[ignore]
fn residual_by_distance() {
    let cfg = RunConfig::default();
    let params = cfg.params().unwrap();
    let opts = cfg.build_options();
    let hat = velocity::build_hat(&params, &opts).unwrap();
    for dcut in [0.04, 0.06, 0.1, 0.2, 0.4] {
        let mut worst: f64 = 0.0;
        for w in hat.nodes().windows(2) {
            let (l, r) = (&w[0], &w[1]);
            if l.d2u.is_nan() || r.d2u.is_nan() { continue; }
            let mid = 0.5 * (l.xi + r.xi);
            if (mid - 2.0).abs() < dcut || (mid + 2.0).abs() < dcut { continue; }
            let u = hat.eval(mid).unwrap();
            let du = hat.eval_deriv(mid).unwrap();
            let rhs = ode_rhs_u(PhasePoint::new(mid, u), &params).unwrap();
            worst = worst.max((du - rhs).abs());
        }
        println!("exclude dist<{dcut}: max residual {worst:.3e}");
    }
}
