//! MRT downlink rates: Monte-Carlo estimation and the closed form.
//!
//! With MRT the beam of stream `(i,k)` is `α g_i^k`, where `g_i^kᴴ` is row `i`
//! of user `k`'s block of `H_a U_sᴴ`. The per-stream SINR treats the
//! beamforming-gain uncertainty and the interference from every other stream
//! as independent Gaussian noise:
//!
//! ```text
//! SINR = p α² |E[gᴴg]|² / (σ²_w + p α² Var[gᴴg] + p α² Σ_{(j,q)≠(i,k)} E[|g_i^kᴴ g_j^q|²])
//! ```

mod closed_form;
mod moments;

pub use closed_form::{closed_form_rate, closed_form_terms, mrt_alpha_sq, ClosedFormTerms};
pub use moments::{estimate_moments, MomentAccumulator, MomentEstimates};

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{HmimoChannel, VarianceProfile};
use crate::error::{Error, Result};
use crate::geometry::check_nyquist;
use crate::RateUnit;

/// Transmission parameters shared by both rate routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Transmit power `p_u` (W).
    pub p_u: f64,
    /// Noise variance `σ²_w` (W).
    pub sigma2_w: f64,
    /// User count `K`.
    pub users: usize,
    /// Monte-Carlo trial count.
    pub trials: u64,
    #[serde(default)]
    pub unit: RateUnit,
}

impl LinkConfig {
    pub fn new(p_u: f64, sigma2_w: f64, users: usize, trials: u64) -> Result<Self> {
        let cfg = Self {
            p_u,
            sigma2_w,
            users,
            trials,
            unit: RateUnit::Bits,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Transmit power from an SNR in dB, `p_u = σ²_w · 10^(snr/10)`.
    pub fn from_snr_db(snr_db: f64, sigma2_w: f64, users: usize, trials: u64) -> Result<Self> {
        Self::new(sigma2_w * 10f64.powf(snr_db / 10.0), sigma2_w, users, trials)
    }

    pub fn with_unit(mut self, unit: RateUnit) -> Self {
        self.unit = unit;
        self
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.p_u / self.sigma2_w).log10()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_u > 0.0 && self.p_u.is_finite()) {
            return Err(Error::InvalidParameter(format!("p_u must be positive, got {}", self.p_u)));
        }
        if !(self.sigma2_w > 0.0 && self.sigma2_w.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma2_w must be positive, got {}",
                self.sigma2_w
            )));
        }
        if self.users == 0 {
            return Err(Error::InvalidParameter("user count K must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trial count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateMethod {
    ClosedForm,
    MonteCarlo,
}

impl RateMethod {
    /// Short tag used in CSV output.
    pub fn tag(self) -> &'static str {
        match self {
            RateMethod::ClosedForm => "th",
            RateMethod::MonteCarlo => "mc",
        }
    }
}

/// Per-stream SINRs and rates, `K × n_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub per_stream_rate: DMatrix<f64>,
    pub sinr: DMatrix<f64>,
    pub sum_rate: f64,
    pub method: RateMethod,
    pub trials_used: Option<u64>,
    pub unit: RateUnit,
}

impl RateResult {
    /// Builds the result from stream-ordered SINRs (`k·n_r + i`).
    pub fn from_sinr(
        sinr: &[f64],
        users: usize,
        unit: RateUnit,
        method: RateMethod,
        trials_used: Option<u64>,
    ) -> Self {
        let n_r = sinr.len() / users;
        let sinr = DMatrix::from_row_slice(users, n_r, sinr);
        let per_stream_rate = sinr.map(|s| unit.log1p(s));
        let sum_rate = per_stream_rate.iter().sum();
        Self {
            per_stream_rate,
            sinr,
            sum_rate,
            method,
            trials_used,
            unit,
        }
    }

    pub fn users(&self) -> usize {
        self.sinr.nrows()
    }

    pub fn streams_per_user(&self) -> usize {
        self.sinr.ncols()
    }
}

/// `Σ_k Σ_i R_i^k`.
pub fn sum_rate(result: &RateResult) -> f64 {
    result.per_stream_rate.iter().sum()
}

fn check_users(profile: &VarianceProfile, cfg: &LinkConfig) -> Result<()> {
    if profile.users() != cfg.users {
        return Err(Error::DimensionMismatch(format!(
            "profile has {} users, link config has {}",
            profile.users(),
            cfg.users
        )));
    }
    Ok(())
}

/// SINRs (stream order) from estimated moments and a normalization `α²`.
pub fn sinr_from_moments(m: &MomentEstimates, alpha_sq: f64, cfg: &LinkConfig) -> Vec<f64> {
    let gain = cfg.p_u * alpha_sq;
    (0..m.mean.len())
        .map(|s| {
            let interference: f64 = m.cross.row(s).iter().sum();
            gain * m.mean[s] * m.mean[s] / (cfg.sigma2_w + gain * m.var[s] + gain * interference)
        })
        .collect()
}

/// Turns estimated moments into a Monte-Carlo [`RateResult`].
pub fn mc_rate_from_moments(
    m: &MomentEstimates,
    channel: &HmimoChannel,
    cfg: &LinkConfig,
) -> Result<RateResult> {
    cfg.validate()?;
    check_users(channel.profile(), cfg)?;
    let alpha_sq = mrt_alpha_sq(channel.profile(), channel.bs_antennas(), channel.user_antennas())?;
    let sinr = sinr_from_moments(m, alpha_sq, cfg);
    Ok(RateResult::from_sinr(
        &sinr,
        cfg.users,
        cfg.unit,
        RateMethod::MonteCarlo,
        Some(m.trials),
    ))
}

/// Monte-Carlo MRT rates from `cfg.trials` channel draws.
///
/// Requires the Nyquist condition on both sides; all moments are estimated
/// from the same draws. Results are identical for a given seed whatever the
/// size of the current rayon pool.
pub fn mc_sinr(channel: &HmimoChannel, cfg: &LinkConfig, seed: u64) -> Result<RateResult> {
    check_mc_inputs(channel, cfg)?;
    let m = estimate_moments(channel, cfg.trials, seed);
    mc_rate_from_moments(&m, channel, cfg)
}

/// Checks what [`mc_sinr`] needs: at least two trials and the Nyquist
/// condition on both sides.
pub fn check_mc_inputs(channel: &HmimoChannel, cfg: &LinkConfig) -> Result<()> {
    cfg.validate()?;
    check_users(channel.profile(), cfg)?;
    if cfg.trials < 2 {
        return Err(Error::InsufficientTrials(cfg.trials as usize));
    }
    let p = channel.profile();
    for (antennas, dof) in [(channel.bs_antennas(), p.n_s()), (channel.user_antennas(), p.n_r())] {
        if !check_nyquist(antennas, dof) {
            return Err(Error::NyquistViolation { antennas, dof });
        }
    }
    if !channel.bs().geometry().is_alias_free(channel.bs().lattice()) {
        warn!("BS antenna grid aliases the lattice; the sampled basis is not semi-unitary");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_rate_examples() {
        let zero = RateResult::from_sinr(&[0.0; 6], 3, RateUnit::Bits, RateMethod::ClosedForm, None);
        assert_eq!(sum_rate(&zero), 0.0);

        let one = RateResult::from_sinr(&[3.0], 1, RateUnit::Bits, RateMethod::ClosedForm, None);
        assert_eq!(sum_rate(&one), 2.0);

        let r = RateResult::from_sinr(&[1.0; 9], 3, RateUnit::Bits, RateMethod::ClosedForm, None);
        assert_eq!(sum_rate(&r), 9.0);
        assert_eq!(r.sum_rate, 9.0);
        assert_eq!(r.per_stream_rate.shape(), (3, 3));
    }

    #[test]
    fn snr_conversion() {
        let cfg = LinkConfig::from_snr_db(20.0, 1.0, 3, 10).unwrap();
        assert!((cfg.p_u - 100.0).abs() < 1e-12);
        assert!((cfg.snr_db() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(LinkConfig::new(0.0, 1.0, 1, 1).is_err());
        assert!(LinkConfig::new(1.0, 0.0, 1, 1).is_err());
        assert!(LinkConfig::new(1.0, 1.0, 0, 1).is_err());
        assert!(LinkConfig::new(1.0, 1.0, 1, 0).is_err());
    }

    #[test]
    fn nats_unit() {
        let r = RateResult::from_sinr(&[std::f64::consts::E - 1.0], 1, RateUnit::Nats, RateMethod::ClosedForm, None);
        assert!((r.sum_rate - 1.0).abs() < 1e-15);
    }
}
