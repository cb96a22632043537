use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{FourierBasis, VarianceProfile};
use crate::error::{Error, Result};

/// One draw of the multi-user channel.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// Stacked angular channels, `(n_r·K) × n_s`; user `k` owns rows `k·n_r..(k+1)·n_r`.
    pub h_a: DMatrix<Complex64>,
    /// Stacked spatial channels, `(N_r·K) × N_s`.
    pub h: DMatrix<Complex64>,
    pub seed: u64,
    pub trial: u64,
}

/// Generator for trial `trial` of a run seeded with `seed`.
///
/// Each trial owns an independent ChaCha stream, so trials can be drawn in
/// any order or in parallel and still reproduce.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Base-station basis, per-user receive bases and the variance profile,
/// validated against each other.
#[derive(Debug, Clone)]
pub struct HmimoChannel {
    bs: FourierBasis,
    users: Vec<FourierBasis>,
    profile: VarianceProfile,
    /// Per-entry standard deviation of the real and imaginary parts.
    part_sd: DMatrix<f64>,
}

impl HmimoChannel {
    pub fn new(bs: FourierBasis, users: Vec<FourierBasis>, profile: VarianceProfile) -> Result<Self> {
        if users.len() != profile.users() {
            return Err(Error::DimensionMismatch(format!(
                "{} user bases but the profile has {} users",
                users.len(),
                profile.users()
            )));
        }
        if bs.dof() != profile.n_s() {
            return Err(Error::DimensionMismatch(format!(
                "BS lattice has {} points, profile has {} transmit variances",
                bs.dof(),
                profile.n_s()
            )));
        }
        let n_r = profile.n_r();
        let big_n_r = users.first().map(|u| u.antennas()).unwrap_or(0);
        for (k, u) in users.iter().enumerate() {
            if u.dof() != n_r || u.antennas() != big_n_r {
                return Err(Error::DimensionMismatch(format!(
                    "user {k} basis is {}x{}, expected {big_n_r}x{n_r}",
                    u.antennas(),
                    u.dof()
                )));
            }
        }
        let scale = (big_n_r * bs.antennas()) as f64;
        let part_sd = DMatrix::from_fn(n_r * users.len(), profile.n_s(), |row, t| {
            let k = row / n_r;
            let i = row % n_r;
            (scale * profile.sigma2_r(k)[i] * profile.sigma2_s()[t] / 2.0).sqrt()
        });
        Ok(Self {
            bs,
            users,
            profile,
            part_sd,
        })
    }

    pub fn bs(&self) -> &FourierBasis {
        &self.bs
    }

    pub fn user_bases(&self) -> &[FourierBasis] {
        &self.users
    }

    pub fn profile(&self) -> &VarianceProfile {
        &self.profile
    }

    /// `N_s`.
    pub fn bs_antennas(&self) -> usize {
        self.bs.antennas()
    }

    /// `N_r`.
    pub fn user_antennas(&self) -> usize {
        self.users[0].antennas()
    }

    /// Variance of angular entry `(row, t)`: `N_r N_s σ²_{r,i,k} σ²_{s,t}`.
    pub fn entry_variance(&self, row: usize, t: usize) -> f64 {
        2.0 * self.part_sd[(row, t)].powi(2)
    }

    /// Draws the stacked angular matrix for one trial.
    pub fn sample_angular(&self, seed: u64, trial: u64) -> DMatrix<Complex64> {
        let mut rng = trial_rng(seed, trial);
        let (rows, cols) = self.part_sd.shape();
        let mut h_a = DMatrix::zeros(rows, cols);
        // fill row-major so the draw order does not depend on storage layout
        for r in 0..rows {
            for t in 0..cols {
                let sd = self.part_sd[(r, t)];
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                h_a[(r, t)] = Complex64::new(sd * re, sd * im);
            }
        }
        h_a
    }

    /// `H_a U_sᴴ`: the rows are the effective per-stream channels `g_i^kᴴ`.
    pub fn effective_channel(&self, h_a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        h_a * self.bs.matrix().adjoint()
    }

    /// `H^k = U_r^k H_a^k U_sᴴ` stacked over users.
    pub fn assemble(&self, h_a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n_r = self.profile.n_r();
        let big_n_r = self.user_antennas();
        let us_h = self.bs.matrix().adjoint();
        let mut h = DMatrix::zeros(big_n_r * self.users.len(), self.bs.antennas());
        for (k, u) in self.users.iter().enumerate() {
            let block = h_a.rows(k * n_r, n_r);
            let hk = u.matrix() * block * &us_h;
            h.rows_mut(k * big_n_r, big_n_r).copy_from(&hk);
        }
        h
    }

    /// Draws a full realization (angular and spatial).
    pub fn sample(&self, seed: u64, trial: u64) -> ChannelRealization {
        let h_a = self.sample_angular(seed, trial);
        let h = self.assemble(&h_a);
        ChannelRealization { h_a, h, seed, trial }
    }
}

/// Draws trial 0 of a channel built from `profile` and the given bases.
pub fn sample_channel(
    profile: &VarianceProfile,
    bs: &FourierBasis,
    users: &[FourierBasis],
    seed: u64,
) -> Result<ChannelRealization> {
    let ch = HmimoChannel::new(bs.clone(), users.to_vec(), profile.clone())?;
    Ok(ch.sample(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{fourier_basis, isotropic_variances, uniform_variances};
    use crate::geometry::{build_lattice, SurfaceGeometry};

    fn small_channel() -> HmimoChannel {
        let ls = build_lattice(1.0, 1.0).unwrap();
        let lr = build_lattice(1.0, 0.5).unwrap();
        let bs = fourier_basis(&SurfaceGeometry::new(1.0, 1.0, 3, 3, 0.0).unwrap(), &ls).unwrap();
        let users: Vec<_> = (0..2)
            .map(|k| {
                let g = SurfaceGeometry::new(1.0, 0.5, 4, 1, 3.0 + k as f64).unwrap();
                fourier_basis(&g, &lr).unwrap()
            })
            .collect();
        let profile = isotropic_variances(&ls, &lr, 2).unwrap();
        HmimoChannel::new(bs, users, profile).unwrap()
    }

    #[test]
    fn same_seed_same_draw() {
        let ch = small_channel();
        let a = ch.sample(42, 3);
        let b = ch.sample(42, 3);
        assert_eq!(a.h_a, b.h_a);
        assert_eq!(a.h, b.h);
        assert_ne!(ch.sample(42, 4).h_a, a.h_a);
        assert_ne!(ch.sample(43, 3).h_a, a.h_a);
    }

    #[test]
    fn shapes_and_frobenius_preservation() {
        let ch = small_channel();
        let r = ch.sample(7, 0);
        assert_eq!(r.h_a.shape(), (3 * 2, 5));
        assert_eq!(r.h.shape(), (4 * 2, 9));
        for k in 0..2 {
            let hk = r.h.rows(k * 4, 4).norm();
            let hak = r.h_a.rows(k * 3, 3).norm();
            assert!((hk - hak).abs() <= 1e-8 * hak);
        }
    }

    #[test]
    fn reassembly_matches_definition() {
        let ch = small_channel();
        let r = ch.sample(1, 9);
        let k = 1;
        let direct = ch.user_bases()[k].matrix() * r.h_a.rows(3, 3) * ch.bs().matrix().adjoint();
        assert_eq!(direct, r.h.rows(4, 4).into_owned());
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let ch = small_channel();
        let wrong = uniform_variances(4, 3, 2).unwrap();
        assert!(HmimoChannel::new(ch.bs().clone(), ch.user_bases().to_vec(), wrong).is_err());
        let wrong_k = uniform_variances(5, 3, 3).unwrap();
        assert!(HmimoChannel::new(ch.bs().clone(), ch.user_bases().to_vec(), wrong_k).is_err());
    }

    #[test]
    fn entry_variance_scaling() {
        let ch = small_channel();
        let p = ch.profile();
        let v = ch.entry_variance(4, 2);
        let expected = 4.0 * 9.0 * p.sigma2_r(1)[1] * p.sigma2_s()[2];
        assert!((v - expected).abs() < 1e-14 * expected);
    }
}
