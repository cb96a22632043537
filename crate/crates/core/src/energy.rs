//! Surface power consumption and energy efficiency.
//!
//! The BS surface draws `N_s L_d P_d + N_s P_v/Q + P_f + p_u/ζ` and each user
//! surface `N_r L_d P_d + N_r P_v/Q + P_f`, so the system total is
//! `(N_s + K N_r) P_1 + P_2` with `P_1 = L_d P_d + P_v/Q` and
//! `P_2 = (K+1) P_f + p_u/ζ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::RateResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerModel {
    /// Power per diode `P_d` (W).
    #[serde(default = "defaults::p_d")]
    pub p_d: f64,
    /// Diodes per patch `L_d`.
    #[serde(default = "defaults::l_d")]
    pub l_d: f64,
    /// Power per voltage converter `P_v` (W).
    #[serde(default = "defaults::p_v")]
    pub p_v: f64,
    /// Patches per converter group `Q`.
    #[serde(default = "defaults::q")]
    pub q: f64,
    /// Power per FPGA `P_f` (W).
    #[serde(default = "defaults::p_f")]
    pub p_f: f64,
    /// Amplifier efficiency `ζ`, in `(0, 1]`.
    #[serde(default = "defaults::zeta")]
    pub zeta: f64,
    /// Transmit power `p_u` (W).
    pub p_u: f64,
    /// User count `K`.
    pub users: usize,
}

mod defaults {
    pub fn p_d() -> f64 {
        5e-6
    }
    pub fn l_d() -> f64 {
        1.0
    }
    pub fn p_v() -> f64 {
        5e-4
    }
    pub fn q() -> f64 {
        1.0
    }
    pub fn p_f() -> f64 {
        5.0
    }
    pub fn zeta() -> f64 {
        1.0
    }
}

impl PowerModel {
    /// Reference hardware constants: `ζ = 1`, `P_d L_d = 5·10⁻⁶ W`,
    /// `P_v/Q = 5·10⁻⁴ W`, `P_f = 5 W`.
    pub fn reference(p_u: f64, users: usize) -> Result<Self> {
        let m = Self {
            p_d: defaults::p_d(),
            l_d: defaults::l_d(),
            p_v: defaults::p_v(),
            q: defaults::q(),
            p_f: defaults::p_f(),
            zeta: defaults::zeta(),
            p_u,
            users,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("p_d", self.p_d),
            ("l_d", self.l_d),
            ("p_v", self.p_v),
            ("p_f", self.p_f),
            ("p_u", self.p_u),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q must be positive, got {}", self.q)));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "amplifier efficiency must lie in (0, 1], got {}",
                self.zeta
            )));
        }
        if self.users == 0 {
            return Err(Error::InvalidParameter("user count K must be at least 1".into()));
        }
        if !(self.p2() > 0.0) {
            return Err(Error::InvalidParameter("static power P_2 must be positive".into()));
        }
        Ok(())
    }

    /// Per-antenna power `P_1 = L_d P_d + P_v/Q`.
    pub fn p1(&self) -> f64 {
        self.l_d * self.p_d + self.p_v / self.q
    }

    /// Static power `P_2 = (K+1) P_f + p_u/ζ`.
    pub fn p2(&self) -> f64 {
        (self.users + 1) as f64 * self.p_f + self.p_u / self.zeta
    }

    /// `(N_s + K N_r) P_1 + P_2` for real-valued antenna counts.
    pub fn total_power_continuous(&self, n_s: f64, n_r: f64) -> f64 {
        (n_s + self.users as f64 * n_r) * self.p1() + self.p2()
    }
}

/// Total consumed power (W).
pub fn total_power(model: &PowerModel, n_s: usize, n_r: usize) -> f64 {
    model.total_power_continuous(n_s as f64, n_r as f64)
}

/// Sum rate per consumed watt, in the rate's unit per joule per hertz.
pub fn energy_efficiency(rate: &RateResult, model: &PowerModel, n_s: usize, n_r: usize) -> f64 {
    rate.sum_rate / total_power(model, n_s, n_r)
}
