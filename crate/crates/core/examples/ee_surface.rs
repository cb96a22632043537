//! Coarse text map of the EE surface around the optimum.

use hmimo::channel::isotropic_variances;
use hmimo::energy::PowerModel;
use hmimo::geometry::build_lattice;
use hmimo::link::LinkConfig;
use hmimo::optimizer::{build_problem, ee_objective, optimize};

fn main() -> hmimo::Result<()> {
    let (users, p_u) = (3, 0.001);
    let lat_s = build_lattice(5.0, 5.0)?;
    let lat_r = build_lattice(1.0, 1.0)?;
    let profile = isotropic_variances(&lat_s, &lat_r, users)?;
    let cfg = LinkConfig::new(p_u, 1e-3, users, 1)?;
    let prob = build_problem(&profile, &cfg, &PowerModel::reference(p_u, users)?, 81, 5)?;
    let opt = optimize(&prob)?;
    let peak = opt.ee_value;

    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    println!("N_r ↓  N_s → 81..600, shade = EE / max");
    for n_r in (5..=200).rev().step_by(15) {
        let row: String = (81..=600)
            .step_by(10)
            .map(|n_s| {
                let f = ee_objective(&prob, n_s as f64, n_r as f64) / peak;
                shades[((f.clamp(0.97, 1.0) - 0.97) / 0.03 * 9.0).round() as usize]
            })
            .collect();
        println!("{n_r:>4} |{row}");
    }
    println!("optimum ({}, {}), {:.4} nat/J/Hz", opt.n_s_opt, opt.n_r_opt, peak);
    Ok(())
}
