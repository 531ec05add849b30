// temporary: dissect the near-node hat residual
use isoflow::export::RunConfig;
use isoflow::*;

fn rk4_ref(params: &SimilarityParams, x0: f64, y0: f64, x1: f64, n: usize) -> f64 {
    let mut x = x0;
    let mut y = y0;
    let h = (x1 - x0) / n as f64;
    let f = |x: f64, y: f64| ode_rhs_u(PhasePoint::new(x, y), params).unwrap();
    for _ in 0..n {
        let k1 = f(x, y);
        let k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(x + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x += h;
    }
    y
}

#[test]
#[ignore]
fn dissect() {
    let cfg = RunConfig::default();
    let params = cfg.params().unwrap();
    let opts = cfg.build_options();
    let hat = velocity::build_hat(&params, &opts).unwrap();
    let nodes = hat.nodes();
    // find the segment containing xi = -1.99722
    for w in nodes.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        if l.xi <= -1.99722 && r.xi > -1.99722 {
            let mid = 0.5 * (l.xi + r.xi);
            let u_int = hat.eval(mid).unwrap();
            let du_int = hat.eval_deriv(mid).unwrap();
            let u_ref = rk4_ref(&params, l.xi, l.u, mid, 4000);
            let rhs_at_ref = ode_rhs_u(PhasePoint::new(mid, u_ref), &params).unwrap();
            let rhs_at_int = ode_rhs_u(PhasePoint::new(mid, u_int), &params).unwrap();
            println!("segment [{}, {}] h={:.3e} d2u=({:.6}, {:.6})", l.xi, r.xi, r.xi - l.xi, l.d2u, r.d2u);
            println!("value:  int={u_int:.15}  ref={u_ref:.15}  diff={:.3e}", u_int - u_ref);
            println!("deriv:  int={du_int:.15}  rhs(ref)={rhs_at_ref:.15}  diff={:.3e}", du_int - rhs_at_ref);
            println!("rhs(int) - rhs(ref) = {:.3e}", rhs_at_int - rhs_at_ref);
            // finite-difference d2u from du values of adjacent nodes
            let i = nodes.iter().position(|n| n.xi == l.xi).unwrap();
            let (a, b, c) = (&nodes[i - 1], &nodes[i], &nodes[i + 1]);
            let fd = ((c.du - b.du) / (c.xi - b.xi) + (b.du - a.du) / (b.xi - a.xi)) * 0.5;
            println!("node {} stored d2u={:.8} fd~{:.8}", b.xi, b.d2u, fd);
            // node-to-node consistency: value propagated by rk4 vs stored
            let u_prop = rk4_ref(&params, l.xi, l.u, r.xi, 8000);
            println!("node value consistency at r: stored={:.15} prop={:.15} diff={:.3e}", r.u, u_prop, r.u - u_prop);
            break;
        }
    }
}
