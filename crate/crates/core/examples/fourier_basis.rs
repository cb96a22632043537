//! Plane-wave bases: semi-unitary on alias-free grids, not otherwise.

use hmimo::channel::{fourier_basis, longitudinal_wavenumber};
use hmimo::geometry::{build_lattice, SurfaceGeometry};

fn main() -> hmimo::Result<()> {
    let lattice = build_lattice(2.0, 2.0)?;
    println!("L = 2: {} lattice points, grid needs {:?}", lattice.len(), lattice.min_grid());

    for (h, v) in [(5, 5), (8, 8), (10, 8), (13, 1), (4, 4)] {
        let geom = SurfaceGeometry::new(2.0, 2.0, h, v, 0.0)?;
        let basis = fourier_basis(&geom, &lattice)?;
        println!(
            "{h:>2}x{v:<2} N = {:>3}  max|UᴴU - I| = {:.2e}  alias free: {}",
            basis.antennas(),
            basis.gram_deviation(),
            geom.is_alias_free(&lattice)
        );
    }

    // distance only adds a per-column phase
    let near = fourier_basis(&SurfaceGeometry::new(2.0, 2.0, 8, 8, 0.0)?, &lattice)?;
    let far = fourier_basis(&SurfaceGeometry::new(2.0, 2.0, 8, 8, 30.0)?, &lattice)?;
    let col = lattice.points().iter().position(|&p| p == (1, 1)).unwrap();
    let ratio = far.matrix()[(5, col)] / near.matrix()[(5, col)];
    let gamma = longitudinal_wavenumber(1, 1, 2.0, 2.0);
    println!("\ncolumn (1,1): phase {:.6} rad, γ z mod 2π = {:.6}", ratio.arg().rem_euclid(std::f64::consts::TAU), (gamma * 30.0).rem_euclid(std::f64::consts::TAU));
    Ok(())
}
