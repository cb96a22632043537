use log::warn;

use super::{check_users, LinkConfig, RateMethod, RateResult};
use crate::channel::VarianceProfile;
use crate::error::{Error, Result};
use crate::geometry::check_nyquist;

/// MRT normalization `α² = 1 / (N_r N_s Σ_k Σ_i Σ_t σ²_{r,i,k} σ²_{s,t})`,
/// which makes `E[Tr(V Vᴴ)] = 1`.
pub fn mrt_alpha_sq(profile: &VarianceProfile, n_s_antennas: usize, n_r_antennas: usize) -> Result<f64> {
    if n_s_antennas == 0 || n_r_antennas == 0 {
        return Err(Error::InvalidParameter("antenna counts must be positive".into()));
    }
    let total = profile.total_power_gain();
    if !(total > 0.0) {
        return Err(Error::ZeroVariance("total channel variance is zero".into()));
    }
    Ok(1.0 / ((n_s_antennas * n_r_antennas) as f64 * total))
}

/// The three pieces of the closed-form SINR `signal / (noise + interference)`,
/// in stream order `k·n_r + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormTerms {
    /// `σ²_{r,i,k} (n_s σ̂²_s)²`.
    pub signal: Vec<f64>,
    /// `σ²_w / (σ²_{r,i,k} p_u α² (N_r N_s)²)`.
    pub noise: Vec<f64>,
    /// `n_r σ̂²_r Σ_t σ⁴_{s,t}`; the same for every stream and independent of
    /// the antenna counts.
    pub interference: f64,
}

impl ClosedFormTerms {
    pub fn sinr(&self) -> Vec<f64> {
        self.signal
            .iter()
            .zip(&self.noise)
            .map(|(s, n)| s / (n + self.interference))
            .collect()
    }
}

pub fn closed_form_terms(
    profile: &VarianceProfile,
    cfg: &LinkConfig,
    n_s_antennas: usize,
    n_r_antennas: usize,
) -> Result<ClosedFormTerms> {
    cfg.validate()?;
    check_users(profile, cfg)?;
    let alpha_sq = mrt_alpha_sq(profile, n_s_antennas, n_r_antennas)?;
    let array_gain = (n_s_antennas * n_r_antennas) as f64;
    let n_s_hat = profile.n_s() as f64 * profile.sigma_hat_s2();
    let interference = profile.n_r() as f64 * profile.sigma_hat_r2() * profile.sum_s_fourth();
    let (signal, noise) = profile
        .sigma2_r_all()
        .iter()
        .flatten()
        .map(|&sr| {
            let noise = cfg.sigma2_w / (sr * cfg.p_u * alpha_sq * array_gain * array_gain);
            (sr * n_s_hat * n_s_hat, noise)
        })
        .unzip();
    Ok(ClosedFormTerms {
        signal,
        noise,
        interference,
    })
}

/// Closed-form ergodic MRT rates for `N_s` BS and `N_r` user antennas.
///
/// Violating the Nyquist condition only logs a warning: the expression stays
/// well defined and the optimizer probes the boundary.
pub fn closed_form_rate(
    profile: &VarianceProfile,
    cfg: &LinkConfig,
    n_s_antennas: usize,
    n_r_antennas: usize,
) -> Result<RateResult> {
    if !check_nyquist(n_s_antennas, profile.n_s()) || !check_nyquist(n_r_antennas, profile.n_r()) {
        warn!(
            "Nyquist condition violated: ({n_s_antennas}, {n_r_antennas}) antennas for ({}, {}) DoF",
            profile.n_s(),
            profile.n_r()
        );
    }
    let terms = closed_form_terms(profile, cfg, n_s_antennas, n_r_antennas)?;
    Ok(RateResult::from_sinr(
        &terms.sinr(),
        cfg.users,
        cfg.unit,
        RateMethod::ClosedForm,
        None,
    ))
}
