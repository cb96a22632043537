use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{SurfaceGeometry, WavenumberLattice};
use crate::KAPPA;

/// Sampled plane-wave harmonics of one surface, one column per lattice point.
#[derive(Debug, Clone)]
pub struct FourierBasis {
    matrix: DMatrix<Complex64>,
    lattice: WavenumberLattice,
    geom: SurfaceGeometry,
}

/// Longitudinal wavenumber `γ(m_x, m_y) = √(κ² − k_x² − k_y²)`.
pub fn longitudinal_wavenumber(m_x: i64, m_y: i64, len_x: f64, len_y: f64) -> f64 {
    let kx = KAPPA * m_x as f64 / len_x;
    let ky = KAPPA * m_y as f64 / len_y;
    (KAPPA * KAPPA - kx * kx - ky * ky).max(0.0).sqrt()
}

impl FourierBasis {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn lattice(&self) -> &WavenumberLattice {
        &self.lattice
    }

    pub fn geometry(&self) -> &SurfaceGeometry {
        &self.geom
    }

    /// Number of antennas (rows).
    pub fn antennas(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of lattice points (columns).
    pub fn dof(&self) -> usize {
        self.matrix.ncols()
    }

    /// `max |(UᴴU − I)_{ij}|`.
    pub fn gram_deviation(&self) -> f64 {
        let n = self.dof();
        let gram = self.matrix.adjoint() * &self.matrix;
        (gram - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Builds the `N × n` basis whose entry for antenna at `(x, y, z)` and
/// lattice point `(m_x, m_y)` is
/// `exp(j(2π m_x x/L_x + 2π m_y y/L_y + γ z)) / √N`.
pub fn fourier_basis(geom: &SurfaceGeometry, lattice: &WavenumberLattice) -> Result<FourierBasis> {
    if geom.len_x() != lattice.len_x() || geom.len_y() != lattice.len_y() {
        return Err(Error::DimensionMismatch(format!(
            "lattice built for ({}, {}) but surface is ({}, {})",
            lattice.len_x(),
            lattice.len_y(),
            geom.len_x(),
            geom.len_y()
        )));
    }
    let positions = geom.antenna_positions();
    let n = positions.len();
    let scale = 1.0 / (n as f64).sqrt();
    let (lx, ly) = (geom.len_x(), geom.len_y());
    let matrix = DMatrix::from_fn(n, lattice.len(), |row, col| {
        let (m_x, m_y) = lattice.points()[col];
        let [x, y, z] = positions[row];
        let phase = KAPPA * m_x as f64 * x / lx
            + KAPPA * m_y as f64 * y / ly
            + longitudinal_wavenumber(m_x, m_y, lx, ly) * z;
        Complex64::from_polar(scale, phase)
    });
    Ok(FourierBasis {
        matrix,
        lattice: lattice.clone(),
        geom: geom.clone(),
    })
}
