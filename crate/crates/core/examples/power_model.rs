//! Surface power consumption and energy efficiency.

use hmimo::channel::isotropic_variances;
use hmimo::energy::{energy_efficiency, total_power, PowerModel};
use hmimo::geometry::build_lattice;
use hmimo::link::{closed_form_rate, LinkConfig};

fn main() -> hmimo::Result<()> {
    let model = PowerModel::reference(0.001, 3)?;
    println!("P_1 = {:.3e} W per antenna, P_2 = {:.3} W", model.p1(), model.p2());
    println!("N_s = 77, N_r = 3: {:.5} W", total_power(&model, 77, 3));

    let profile = isotropic_variances(&build_lattice(5.0, 5.0)?, &build_lattice(1.0, 1.0)?, 3)?;
    let cfg = LinkConfig::new(model.p_u, 1e-3, 3, 1)?;
    println!("\n{:>5} {:>10} {:>10} {:>10}", "N_s", "rate", "power", "EE");
    for n_s in [81, 150, 273, 500, 1000] {
        let rate = closed_form_rate(&profile, &cfg, n_s, 91)?;
        println!(
            "{n_s:>5} {:>10.4} {:>10.4} {:>10.5}",
            rate.sum_rate,
            total_power(&model, n_s, 91),
            energy_efficiency(&rate, &model, n_s, 91)
        );
    }
    Ok(())
}
