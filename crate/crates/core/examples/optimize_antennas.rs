//! EE-optimal antenna counts: stationary point, active case, integer optimum,
//! and the exhaustive scan that checks them.
//!
//!     cargo run --release --example optimize_antennas

use hmimo::channel::isotropic_variances;
use hmimo::energy::PowerModel;
use hmimo::geometry::build_lattice;
use hmimo::link::LinkConfig;
use hmimo::optimizer::{build_problem, grid_scan_auto, kkt_residuals, optimize};

fn main() -> hmimo::Result<()> {
    let users = 3;
    let lat_r = build_lattice(1.0, 1.0)?;
    for sigma2_w in [1e-3, 1.0] {
        println!("σ²_w = {sigma2_w}");
        for l_s in [5.0, 7.0] {
            let lat_s = build_lattice(l_s, l_s)?;
            let profile = isotropic_variances(&lat_s, &lat_r, users)?;
            for p_u in [0.001, 0.01, 1.0] {
                let cfg = LinkConfig::new(p_u, sigma2_w, users, 1)?;
                let model = PowerModel::reference(p_u, users)?;
                let prob = build_problem(&profile, &cfg, &model, lat_s.len() as u64, lat_r.len() as u64)?;
                let opt = optimize(&prob)?;
                let grid = grid_scan_auto(&prob)?;
                let (ns, nr) = opt.continuous_stationary.unwrap();
                let (r1, r2) = kkt_residuals(&prob, ns, nr);
                println!(
                    "  L_s = {l_s}, p_u = {p_u:<5}  n = ({}, {})  bar = ({ns:7.1}, {nr:6.1})  \
                     opt = ({}, {})  {:?}  grid = ({}, {})  residuals {:.0e} {:.0e}",
                    prob.n_s(),
                    prob.n_r(),
                    opt.n_s_opt,
                    opt.n_r_opt,
                    opt.active_case,
                    grid.n_s_opt,
                    grid.n_r_opt,
                    r1.abs(),
                    r2.abs(),
                );
            }
        }
    }
    Ok(())
}
