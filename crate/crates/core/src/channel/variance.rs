use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::WavenumberLattice;
use crate::KAPPA;

/// Absolute tolerance of the per-cell spectral integral.
const CELL_QUADRATURE_TOL: f64 = 1e-10;

/// Separable angular variance profile: transmit variances `σ²_{s,t}` and,
/// per user, receive variances `σ²_{r,i,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    sigma2_s: Vec<f64>,
    sigma2_r: Vec<Vec<f64>>,
    labels_s: Option<Vec<(i64, i64)>>,
    labels_r: Option<Vec<(i64, i64)>>,
}

fn check_side(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::ZeroVariance(format!("{name} profile is empty")));
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::ZeroVariance(format!(
            "{name} variance {bad} is negative or not finite"
        )));
    }
    if values.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVariance(format!("{name} profile is all zero")));
    }
    Ok(())
}

impl VarianceProfile {
    /// Builds a profile from raw variances; `sigma2_r` has one entry per user.
    pub fn new(sigma2_s: Vec<f64>, sigma2_r: Vec<Vec<f64>>) -> Result<Self> {
        check_side("transmit", &sigma2_s)?;
        if sigma2_r.is_empty() {
            return Err(Error::InvalidParameter("at least one user is required".into()));
        }
        let n_r = sigma2_r[0].len();
        for (k, user) in sigma2_r.iter().enumerate() {
            if user.len() != n_r {
                return Err(Error::DimensionMismatch(format!(
                    "user {k} has {} receive variances, user 0 has {n_r}",
                    user.len()
                )));
            }
            check_side(&format!("receive (user {k})"), user)?;
        }
        Ok(Self {
            sigma2_s,
            sigma2_r,
            labels_s: None,
            labels_r: None,
        })
    }

    /// Attaches the lattice indices each variance belongs to.
    pub fn with_labels(mut self, labels_s: Vec<(i64, i64)>, labels_r: Vec<(i64, i64)>) -> Result<Self> {
        if labels_s.len() != self.n_s() || labels_r.len() != self.n_r() {
            return Err(Error::DimensionMismatch(format!(
                "labels ({}, {}) do not match profile sizes ({}, {})",
                labels_s.len(),
                labels_r.len(),
                self.n_s(),
                self.n_r()
            )));
        }
        self.labels_s = Some(labels_s);
        self.labels_r = Some(labels_r);
        Ok(self)
    }

    /// Rescales so that each side (and each user) sums to one.
    pub fn normalized(&self) -> Self {
        let s: f64 = self.sigma2_s.iter().sum();
        Self {
            sigma2_s: self.sigma2_s.iter().map(|v| v / s).collect(),
            sigma2_r: self
                .sigma2_r
                .iter()
                .map(|u| {
                    let t: f64 = u.iter().sum();
                    u.iter().map(|v| v / t).collect()
                })
                .collect(),
            labels_s: self.labels_s.clone(),
            labels_r: self.labels_r.clone(),
        }
    }

    pub fn n_s(&self) -> usize {
        self.sigma2_s.len()
    }

    pub fn n_r(&self) -> usize {
        self.sigma2_r[0].len()
    }

    pub fn users(&self) -> usize {
        self.sigma2_r.len()
    }

    pub fn sigma2_s(&self) -> &[f64] {
        &self.sigma2_s
    }

    pub fn sigma2_r(&self, user: usize) -> &[f64] {
        &self.sigma2_r[user]
    }

    pub fn sigma2_r_all(&self) -> &[Vec<f64>] {
        &self.sigma2_r
    }

    pub fn labels_s(&self) -> Option<&[(i64, i64)]> {
        self.labels_s.as_deref()
    }

    pub fn labels_r(&self) -> Option<&[(i64, i64)]> {
        self.labels_r.as_deref()
    }

    /// `Σ_t σ²_{s,t}`.
    pub fn sum_s(&self) -> f64 {
        self.sigma2_s.iter().sum()
    }

    /// `Σ_t σ⁴_{s,t}`.
    pub fn sum_s_fourth(&self) -> f64 {
        self.sigma2_s.iter().map(|v| v * v).sum()
    }

    /// `Σ_k Σ_i σ²_{r,i,k}`.
    pub fn sum_r(&self) -> f64 {
        self.sigma2_r.iter().flatten().sum()
    }

    /// `Σ_k Σ_i Σ_t σ²_{r,i,k} σ²_{s,t}`.
    pub fn total_power_gain(&self) -> f64 {
        self.sum_r() * self.sum_s()
    }

    /// `σ̂²_s = (1/n_s) Σ_t σ²_{s,t}`.
    pub fn sigma_hat_s2(&self) -> f64 {
        self.sum_s() / self.n_s() as f64
    }

    /// `σ̂²_r = (1/n_r) Σ_i Σ_k σ²_{r,i,k}`.
    pub fn sigma_hat_r2(&self) -> f64 {
        self.sum_r() / self.n_r() as f64
    }

    /// Writes the profile as CSV with columns
    /// `side,user_k,index_i,m_x,m_y,sigma2` (indices are 0-based).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (i, &v) in self.sigma2_s.iter().enumerate() {
            let label = self.labels_s.as_ref().map(|l| l[i]);
            w.serialize(ProfileRow {
                side: Side::S,
                user_k: None,
                index_i: i,
                m_x: label.map(|l| l.0),
                m_y: label.map(|l| l.1),
                sigma2: v,
            })?;
        }
        for (k, user) in self.sigma2_r.iter().enumerate() {
            for (i, &v) in user.iter().enumerate() {
                let label = self.labels_r.as_ref().map(|l| l[i]);
                w.serialize(ProfileRow {
                    side: Side::R,
                    user_k: Some(k),
                    index_i: i,
                    m_x: label.map(|l| l.0),
                    m_y: label.map(|l| l.1),
                    sigma2: v,
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a profile written by [`VarianceProfile::write_csv`].
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rows: Vec<ProfileRow> = Vec::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            rows.push(row?);
        }
        let mut s: Vec<Option<(f64, Option<(i64, i64)>)>> = Vec::new();
        let mut r: Vec<Vec<Option<(f64, Option<(i64, i64)>)>>> = Vec::new();
        let put = |slot: &mut Vec<Option<(f64, Option<(i64, i64)>)>>, row: &ProfileRow| -> Result<()> {
            if slot.len() <= row.index_i {
                slot.resize(row.index_i + 1, None);
            }
            if slot[row.index_i].is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate profile row (side {:?}, user {:?}, index {})",
                    row.side, row.user_k, row.index_i
                )));
            }
            let label = match (row.m_x, row.m_y) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            };
            slot[row.index_i] = Some((row.sigma2, label));
            Ok(())
        };
        for row in &rows {
            match row.side {
                Side::S => put(&mut s, row)?,
                Side::R => {
                    let k = row.user_k.ok_or_else(|| {
                        Error::InvalidParameter("receive row without user_k".into())
                    })?;
                    if r.len() <= k {
                        r.resize(k + 1, Vec::new());
                    }
                    put(&mut r[k], row)?;
                }
            }
        }
        let missing = || Error::InvalidParameter("profile CSV has gaps in its indices".into());
        let s: Vec<_> = s.into_iter().collect::<Option<Vec<_>>>().ok_or_else(missing)?;
        let r: Vec<Vec<_>> = r
            .into_iter()
            .map(|u| u.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(missing)?;
        let profile = Self::new(
            s.iter().map(|e| e.0).collect(),
            r.iter().map(|u| u.iter().map(|e| e.0).collect()).collect(),
        )?;
        let labels_s: Option<Vec<_>> = s.iter().map(|e| e.1).collect();
        let labels_r: Option<Vec<_>> = r.first().and_then(|u| u.iter().map(|e| e.1).collect());
        match (labels_s, labels_r) {
            (Some(ls), Some(lr)) => profile.with_labels(ls, lr),
            _ => Ok(profile),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Side {
    S,
    R,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    side: Side,
    user_k: Option<usize>,
    index_i: usize,
    m_x: Option<i64>,
    m_y: Option<i64>,
    sigma2: f64,
}

/// Equal variances on both sides: `1/n_s` per transmit and `1/n_r` per receive entry.
pub fn uniform_variances(n_s: usize, n_r: usize, users: usize) -> Result<VarianceProfile> {
    if n_s == 0 || n_r == 0 || users == 0 {
        return Err(Error::InvalidParameter(format!(
            "uniform profile needs n_s, n_r, K >= 1, got ({n_s}, {n_r}, {users})"
        )));
    }
    VarianceProfile::new(
        vec![1.0 / n_s as f64; n_s],
        vec![vec![1.0 / n_r as f64; n_r]; users],
    )
}

/// Isotropic-scattering profile: each lattice point gets the integral of
/// `1/√(κ² − k_x² − k_y²)` over its wavenumber cell inside the propagation
/// disk, normalized per side. All users share the receive profile.
pub fn isotropic_variances(
    lattice_s: &WavenumberLattice,
    lattice_r: &WavenumberLattice,
    users: usize,
) -> Result<VarianceProfile> {
    if users == 0 {
        return Err(Error::InvalidParameter("user count K must be at least 1".into()));
    }
    let side = |lat: &WavenumberLattice| -> Vec<f64> {
        lat.points()
            .iter()
            .map(|&(mx, my)| isotropic_cell_weight(mx, my, lat.len_x(), lat.len_y()))
            .collect()
    };
    let s = side(lattice_s);
    let r = side(lattice_r);
    Ok(VarianceProfile::new(s, vec![r; users])?
        .normalized()
        .with_labels(lattice_s.points().to_vec(), lattice_r.points().to_vec())?)
}

/// Unnormalized isotropic spectral weight of the cell centred on
/// `(2πm_x/L_x, 2πm_y/L_y)` with widths `2π/L_x × 2π/L_y`.
///
/// The `k_y` integral is done in closed form,
/// `∫ dk_y/√(r² − k_y²) = asin(k_y/r)` with `r = √(κ² − k_x²)`, leaving a
/// bounded one-dimensional integrand in `k_x`.
pub fn isotropic_cell_weight(m_x: i64, m_y: i64, len_x: f64, len_y: f64) -> f64 {
    let wx = KAPPA / len_x;
    let wy = KAPPA / len_y;
    let x0 = ((m_x as f64 - 0.5) * wx).max(-KAPPA);
    let x1 = ((m_x as f64 + 0.5) * wx).min(KAPPA);
    if x0 >= x1 {
        return 0.0;
    }
    let y0 = (m_y as f64 - 0.5) * wy;
    let y1 = (m_y as f64 + 0.5) * wy;

    let inner = |kx: f64| -> f64 {
        let r2 = KAPPA * KAPPA - kx * kx;
        if r2 <= 0.0 {
            return 0.0;
        }
        let r = r2.sqrt();
        (y1 / r).clamp(-1.0, 1.0).asin() - (y0 / r).clamp(-1.0, 1.0).asin()
    };

    // kinks where the circle crosses the cell's horizontal edges
    let mut knots = vec![x0, x1];
    for y in [y0, y1] {
        if y.abs() < KAPPA {
            let b = (KAPPA * KAPPA - y * y).sqrt();
            for k in [-b, b] {
                if k > x0 && k < x1 {
                    knots.push(k);
                }
            }
        }
    }
    knots.sort_by(f64::total_cmp);
    knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| quadrature::double_exponential::integrate(inner, w[0], w[1], CELL_QUADRATURE_TOL).integral)
        .sum()
}
