use isoflow::export::RunConfig;
use isoflow::weak::{self, WeakForm};
use isoflow::*;

#[test]
#[ignore]
fn probe_weak_and_fv() {
    let cfg = RunConfig::default();
    let sol = cfg.build().unwrap();

    let t0 = std::time::Instant::now();
    let rh = weak::check_rh(&sol, &[0.25, 0.5, 1.0]).unwrap();
    println!("rh: mass={:.3e} mom={:.3e} fields={:.3e} margins=({:.4},{:.4}) vgap={:.3e} in {:?}",
        rh.residual_mass, rh.residual_momentum, rh.residual_fields,
        rh.entropy_margin_inner, rh.entropy_margin_outer, rh.vproduct_gap, t0.elapsed());

    let t0 = std::time::Instant::now();
    let cont = weak::check_continuity(&sol, 1.0).unwrap();
    println!("continuity: gaps={:?} bars={:?} max_rel={:.3e} pass={} in {:?}",
        cont.gaps, cont.error_bars, cont.max_closed_rel_dev, cont.pass, t0.elapsed());

    let t0 = std::time::Instant::now();
    let flux = weak::check_flux(&sol, 1.0, 12).unwrap();
    println!("flux values: {:?}", flux.values);
    println!("flux slopes: {:?}", flux.slopes);
    println!("model slopes: {:?}", flux.model_slopes);
    println!("flux dev={:.4} decays={} in {:?}", flux.max_rel_slope_dev_last4, flux.decays, t0.elapsed());

    let battery = weak::standard_battery(&sol, 1.0);
    for psi in &battery {
        let t0 = std::time::Instant::now();
        let r = weak::weak_residual(&sol, psi, WeakForm::Mass, 3).unwrap();
        println!("mass {}: level3 val={:.3e} tail={:.3e} scale={:.3e} rel={:.3e} idgap={:.3e} in {:?}",
            psi.name, r.value, r.tail_bound, r.scale, r.reported()/r.scale, r.identity_gap, t0.elapsed());
    }
    let psi = &battery[6];
    for level in [3usize, 4, 5] {
        let t0 = std::time::Instant::now();
        let r = weak::weak_residual(&sol, psi, WeakForm::Mass, level).unwrap();
        let ri = weak::weak_residual(&sol, psi, WeakForm::Momentum, level).unwrap();
        println!("large-support level {level}: mass rel={:.3e} mom rel={:.3e} (in {:?})",
            r.reported()/r.scale, ri.reported()/ri.scale, t0.elapsed());
    }
}

#[test]
#[ignore]
fn probe_fv() {
    let cfg = RunConfig::default();
    let sol = cfg.build().unwrap();
    let t0 = std::time::Instant::now();
    let rows = fv::convergence_study(&sol, &[64, 128, 256], 0.5).unwrap();
    for r in &rows {
        println!("N={} l1_mass={:.4e} l1_mom={:.4e} rate={:?}/{:?}", r.n_cells, r.l1_mass, r.l1_mom, r.rate_mass, r.rate_mom);
    }
    println!("fv study in {:?}", t0.elapsed());
    let fcfg = fv::FvConfig::default_for(&sol, 256, 0.5);
    let mut st = fv::init_from_similarity(&sol, &fcfg).unwrap();
    fv::advance(&mut st, &sol, &fcfg).unwrap();
    let front = fv::shock_front_position(&st, &sol, &fcfg);
    println!("front={} exact={} cells_off={:.2}", front, sol.velocity.xi_s*0.5, (front - sol.velocity.xi_s*0.5).abs()/fcfg.dr());
}
