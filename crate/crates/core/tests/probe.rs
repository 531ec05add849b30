// scratch probe for construction values (temporary)
use isoflow::export::RunConfig;
use isoflow::*;

#[test]
#[ignore]
fn probe_construction() {
    let cfg = RunConfig::default();
    let params = cfg.params().unwrap();
    let opts = cfg.build_options();
    let cp = critical_points(&params);
    println!("xi_w={} u_w={} l+={} l-={}", cp.xi_w, cp.u_w, cp.lambda_plus, cp.lambda_minus);
    println!("ustar_bound={}", ustar_bound(&params));

    let t0 = std::time::Instant::now();
    let hat = velocity::build_hat(&params, &opts).unwrap();
    println!("hat built in {:?}: [{}, {}], {} nodes", t0.elapsed(), hat.xi_lo(), hat.xi_hi(), hat.nodes().len());
    println!("hat(-1) = {:.12}", hat.eval(-1.0).unwrap());
    println!("hat(1)  = {:.12}", hat.eval(1.0).unwrap());
    let mut f = |x: f64, y: f64| ode_rhs_u(PhasePoint::new(x, y), &params);
    println!("hat residual = {:.3e}", hat.max_midpoint_residual(&mut f).unwrap());

    let t0 = std::time::Instant::now();
    let (kink, u_star) = velocity::build_kink(&params, &opts).unwrap();
    println!("kink built in {:?}: [{}, {}], {} nodes, U* = {:.12}", t0.elapsed(), kink.xi_lo(), kink.xi_hi(), kink.nodes().len(), u_star);
    println!("kink residual = {:.3e}", kink.max_midpoint_residual(&mut f).unwrap());

    let t0 = std::time::Instant::now();
    let (tilde, xi_star) = velocity::build_tilde(&params, u_star, &opts).unwrap();
    println!("tilde built in {:?}: [{}, {}], {} nodes, xi* = {:.12}", t0.elapsed(), tilde.xi_lo(), tilde.xi_hi(), tilde.nodes().len(), xi_star);

    let (shock, crossings) = velocity::find_shock(&hat, &tilde, &params, &opts).unwrap();
    println!("xi_s = {:.12} ({} crossings)", shock.xi_bar, crossings);
    println!("U- = {:.12}, U+ = {:.12}", shock.u_minus, shock.u_plus);
    println!("V+V- - a^2 = {:.3e}", shock.v_plus * shock.v_minus - 1.0);

    let sol = cfg.build().unwrap();
    let d = &sol.density;
    println!("omega_w = {:.12}", d.omega_w);
    println!("C- = {:.12} +- {:.2e}", d.c_minus, d.c_minus_err);
    println!("gamma_fit = {:.8} vs analytic {:.8}", d.gamma_fit, d.gamma_analytic);
    println!("omega_s_plus = {:.12}", d.omega_s_plus);
    println!("omega_s_minus = {:.12}", d.omega_s_minus);
    println!("omega0_prime = {:.12}", d.omega0_prime);
    println!("hat_neg(xi_w) = {:.12}", d.hat_neg.eval(cp.xi_w).unwrap());

    let m0 = sol.mass_integral(0.0, 1.0).unwrap();
    println!("M(0;1) = {:.12} (closed {:.12})", m0.value, d.c_minus.abs() / (params.beta + params.nf()));
    let mm = sol.mass_integral(-0.25, 1.0).unwrap();
    println!("M(-0.25;1) = {:.12} +- {:.2e}", mm.value, mm.err);
    let mp = sol.mass_integral(0.25, 1.0).unwrap();
    println!("M(+0.25;1) = {:.12} +- {:.2e}", mp.value, mp.err);
}
