//! Plane-wave bases, separable variance profiles and channel sampling.
//!
//! The spatial channel to user `k` is `H^k = U_r^k H_a^k U_sᴴ`, where the
//! angular matrix `H_a^k` has independent circularly-symmetric Gaussian
//! entries with variance `N_r N_s σ²_{r,i,k} σ²_{s,t}`.

mod basis;
mod sample;
mod variance;

pub use basis::{fourier_basis, longitudinal_wavenumber, FourierBasis};
pub use sample::{sample_channel, trial_rng, ChannelRealization, HmimoChannel};
pub use variance::{isotropic_cell_weight, isotropic_variances, uniform_variances, VarianceProfile};

use crate::error::Result;
use crate::geometry::{build_lattice, SurfaceGeometry};

/// Builds a complete channel for `users` users from surface geometries:
/// exact lattices, plane-wave bases and the isotropic profile.
///
/// User `k` is placed at `z = user_distances[k]`; the distances only rotate
/// the receive basis columns by a phase.
pub fn isotropic_channel(
    bs: &SurfaceGeometry,
    user: &SurfaceGeometry,
    user_distances: &[f64],
) -> Result<HmimoChannel> {
    let lattice_s = build_lattice(bs.len_x(), bs.len_y())?;
    let lattice_r = build_lattice(user.len_x(), user.len_y())?;
    let profile = isotropic_variances(&lattice_s, &lattice_r, user_distances.len())?;
    channel_with_profile(bs, user, user_distances, profile)
}

/// Like [`isotropic_channel`] but with a caller-supplied profile.
pub fn channel_with_profile(
    bs: &SurfaceGeometry,
    user: &SurfaceGeometry,
    user_distances: &[f64],
    profile: VarianceProfile,
) -> Result<HmimoChannel> {
    let lattice_s = build_lattice(bs.len_x(), bs.len_y())?;
    let lattice_r = build_lattice(user.len_x(), user.len_y())?;
    let bs_basis = fourier_basis(bs, &lattice_s)?;
    let user_bases = user_distances
        .iter()
        .map(|&d| fourier_basis(&user.with_z_offset(d), &lattice_r))
        .collect::<Result<Vec<_>>>()?;
    HmimoChannel::new(bs_basis, user_bases, profile)
}

/// Default user distances `d_k = 10 (k+1)` wavelengths.
pub fn default_user_distances(users: usize) -> Vec<f64> {
    (1..=users).map(|k| 10.0 * k as f64).collect()
}
