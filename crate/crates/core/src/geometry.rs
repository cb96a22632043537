//! Surface geometry, the wavenumber lattice ellipse and degree-of-freedom counts.
//!
//! Every length is a multiple of the wavelength.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A planar surface of `n_h × n_v` antennas on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGeometry {
    len_x: f64,
    len_y: f64,
    n_h: usize,
    n_v: usize,
    z_offset: f64,
}

impl SurfaceGeometry {
    pub fn new(len_x: f64, len_y: f64, n_h: usize, n_v: usize, z_offset: f64) -> Result<Self> {
        if !(len_x > 0.0 && len_y > 0.0 && len_x.is_finite() && len_y.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "side lengths must be positive and finite, got ({len_x}, {len_y})"
            )));
        }
        if n_h == 0 || n_v == 0 {
            return Err(Error::InvalidGeometry(format!(
                "antenna grid must be at least 1x1, got {n_h}x{n_v}"
            )));
        }
        if !z_offset.is_finite() {
            return Err(Error::InvalidGeometry("z offset must be finite".into()));
        }
        Ok(Self {
            len_x,
            len_y,
            n_h,
            n_v,
            z_offset,
        })
    }

    /// The smallest grid on which the sampled plane-wave basis of the
    /// surface's lattice is free of aliasing (and therefore semi-unitary).
    pub fn alias_free(len_x: f64, len_y: f64, z_offset: f64) -> Result<Self> {
        let lattice = build_lattice(len_x, len_y)?;
        let (n_h, n_v) = lattice.min_grid();
        Self::new(len_x, len_y, n_h, n_v, z_offset)
    }

    /// Lays out `count` antennas on a grid, preferring the most square
    /// alias-free factorization `n_h · n_v = count`.
    ///
    /// When no factorization is alias-free the most square one is used; check
    /// [`SurfaceGeometry::is_alias_free`] if that matters to the caller.
    pub fn with_count(len_x: f64, len_y: f64, count: usize, z_offset: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidGeometry("antenna count must be positive".into()));
        }
        let lattice = build_lattice(len_x, len_y)?;
        let (min_h, min_v) = lattice.min_grid();
        let factors: Vec<(usize, usize)> = (1..=count)
            .filter(|h| count % h == 0)
            .map(|h| (h, count / h))
            .collect();
        let squareness = |&(h, v): &(usize, usize)| (h.abs_diff(v), std::cmp::Reverse(h));
        let (n_h, n_v) = factors
            .iter()
            .filter(|&&(h, v)| h >= min_h && v >= min_v)
            .min_by_key(|f| squareness(f))
            .or_else(|| factors.iter().min_by_key(|f| squareness(f)))
            .copied()
            .expect("count >= 1 has at least one factorization");
        Self::new(len_x, len_y, n_h, n_v, z_offset)
    }

    pub fn len_x(&self) -> f64 {
        self.len_x
    }

    pub fn len_y(&self) -> f64 {
        self.len_y
    }

    pub fn n_h(&self) -> usize {
        self.n_h
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn z_offset(&self) -> f64 {
        self.z_offset
    }

    /// Total number of antennas `N = n_h · n_v`.
    pub fn antenna_count(&self) -> usize {
        self.n_h * self.n_v
    }

    pub fn spacing_x(&self) -> f64 {
        self.len_x / self.n_h as f64
    }

    pub fn spacing_y(&self) -> f64 {
        self.len_y / self.n_v as f64
    }

    /// Same surface moved to a different `z`.
    pub fn with_z_offset(&self, z_offset: f64) -> Self {
        Self {
            z_offset,
            ..self.clone()
        }
    }

    /// True when distinct lattice points stay distinct after sampling,
    /// i.e. `n_h` and `n_v` exceed twice the largest lattice index.
    pub fn is_alias_free(&self, lattice: &WavenumberLattice) -> bool {
        let (min_h, min_v) = lattice.min_grid();
        self.n_h >= min_h && self.n_v >= min_v
    }

    /// Position of the antenna with 0-based storage index `idx`.
    ///
    /// Antenna `n = idx + 1` sits at column `i = (n-1) mod n_h` and row
    /// `j = ⌊(n-1)/n_h⌋`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let i = idx % self.n_h;
        let j = idx / self.n_h;
        [
            i as f64 * self.spacing_x(),
            j as f64 * self.spacing_y(),
            self.z_offset,
        ]
    }

    /// All antenna positions in storage (row-major) order.
    pub fn antenna_positions(&self) -> Vec<[f64; 3]> {
        (0..self.antenna_count()).map(|n| self.position(n)).collect()
    }
}

/// Free-function form of [`SurfaceGeometry::antenna_positions`].
pub fn antenna_positions(geom: &SurfaceGeometry) -> Vec<[f64; 3]> {
    geom.antenna_positions()
}

/// Integer wavenumber indices `(m_x, m_y)` inside the ellipse
/// `(m_x/L_x)² + (m_y/L_y)² ≤ 1`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavenumberLattice {
    points: Vec<(i64, i64)>,
    len_x: f64,
    len_y: f64,
}

impl WavenumberLattice {
    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Never true: the origin is always a lattice point.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len_x(&self) -> f64 {
        self.len_x
    }

    pub fn len_y(&self) -> f64 {
        self.len_y
    }

    pub fn contains(&self, point: (i64, i64)) -> bool {
        self.points.binary_search(&point).is_ok()
    }

    pub fn max_abs_x(&self) -> i64 {
        self.points.iter().map(|p| p.0.abs()).max().unwrap_or(0)
    }

    pub fn max_abs_y(&self) -> i64 {
        self.points.iter().map(|p| p.1.abs()).max().unwrap_or(0)
    }

    /// Smallest `(n_h, n_v)` grid that samples this lattice without aliasing.
    pub fn min_grid(&self) -> (usize, usize) {
        (
            2 * self.max_abs_x() as usize + 1,
            2 * self.max_abs_y() as usize + 1,
        )
    }
}

fn inside_ellipse(m_x: i64, m_y: i64, len_x: f64, len_y: f64) -> bool {
    // (m_x/L_x)² + (m_y/L_y)² ≤ 1 multiplied through by (L_x L_y)², which is
    // exact for integer side lengths
    let a = m_x as f64 * len_y;
    let b = m_y as f64 * len_x;
    let r = len_x * len_y;
    a * a + b * b <= r * r
}

/// Enumerates the lattice ellipse of a surface with the given side lengths.
pub fn build_lattice(len_x: f64, len_y: f64) -> Result<WavenumberLattice> {
    if !(len_x > 0.0 && len_y > 0.0 && len_x.is_finite() && len_y.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "side lengths must be positive and finite, got ({len_x}, {len_y})"
        )));
    }
    let max_x = len_x.floor() as i64;
    let max_y = len_y.floor() as i64;
    let mut points = Vec::new();
    for m_x in -max_x..=max_x {
        for m_y in -max_y..=max_y {
            if inside_ellipse(m_x, m_y, len_x, len_y) {
                points.push((m_x, m_y));
            }
        }
    }
    Ok(WavenumberLattice {
        points,
        len_x,
        len_y,
    })
}

/// Large-surface approximation of the degrees of freedom, `⌊π L_x L_y⌋`.
pub fn dof_approx(len_x: f64, len_y: f64) -> u64 {
    (std::f64::consts::PI * len_x * len_y).floor() as u64
}

/// Spatial Nyquist condition: at least as many antennas as degrees of freedom.
pub fn check_nyquist(antennas: usize, dof: usize) -> bool {
    antennas >= dof
}
