use isoflow::export::RunConfig;
use isoflow::weak::{self, WeakForm};

#[test]
#[ignore]
fn probe_levels() {
    let cfg = RunConfig::default();
    let sol = cfg.build().unwrap();
    let battery = weak::standard_battery(&sol, 1.0);
    for psi in &battery {
        print!("{:>24}:", psi.name);
        for level in [3usize, 4, 5, 6] {
            let r = weak::weak_residual(&sol, psi, WeakForm::Mass, level).unwrap();
            print!("  {:.2e}", r.reported() / r.scale);
        }
        println!();
        if psi.vanishes_at_origin() {
            print!("{:>24}.", "momentum");
            for level in [3usize, 4, 5, 6] {
                let r = weak::weak_residual(&sol, psi, WeakForm::Momentum, level).unwrap();
                print!("  {:.2e}", r.reported() / r.scale);
            }
            println!();
        }
    }
}
