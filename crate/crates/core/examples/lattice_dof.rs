//! Wavenumber lattices, DoF counts and the Nyquist condition.
//!
//!     cargo run --example lattice_dof

use hmimo::geometry::{build_lattice, check_nyquist, dof_approx, SurfaceGeometry};

fn main() -> hmimo::Result<()> {
    println!("{:>5} {:>8} {:>8} {:>10}", "L", "lattice", "approx", "min grid");
    for l in [0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0] {
        let lattice = build_lattice(l, l)?;
        let (h, v) = lattice.min_grid();
        println!("{l:>5} {:>8} {:>8} {:>7}x{v}", lattice.len(), dof_approx(l, l), h);
    }

    let lattice = build_lattice(1.0, 1.0)?;
    println!("\nL = 1 lattice points: {:?}", lattice.points());

    // a rectangular surface
    let lattice = build_lattice(4.0, 1.5)?;
    println!("4 x 1.5 surface: {} points, approx {}", lattice.len(), dof_approx(4.0, 1.5));

    let geom = SurfaceGeometry::new(2.0, 3.0, 4, 6, 5.0)?;
    println!("\nantenna 7 of a 4x6 grid on 2x3 at z=5: {:?}", geom.position(6));
    println!("spacing {:.3} x {:.3}", geom.spacing_x(), geom.spacing_y());

    for (n, dof) in [(77, 77), (12, 13), (273, 78)] {
        println!("N = {n:>3}, n = {dof:>2}: nyquist {}", check_nyquist(n, dof));
    }
    Ok(())
}
