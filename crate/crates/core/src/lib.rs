//! Holographic MIMO downlink toolkit.
//!
//! The crate models the downlink between a base station and `K` users, all
//! equipped with planar surfaces densely packed with sub-wavelength antennas.
//! The channel is a sampled Fourier plane-wave series: each surface is
//! described by a lattice of propagating wavenumbers, the angular channel
//! couples transmit and receive wavenumbers with independent Gaussian
//! gains, and the spatial channel is obtained by sandwiching the angular
//! matrix between the surfaces' plane-wave bases.
//!
//! On top of the channel model the crate provides
//!
//! - MRT ergodic rates, both estimated by Monte-Carlo and in closed form
//!   ([`link`]),
//! - a surface power-consumption model and energy efficiency ([`energy`]),
//! - the energy-efficiency-optimal antenna counts via the KKT stationarity
//!   equations, checked against an exhaustive integer scan ([`optimizer`]),
//! - configuration-driven sweeps that write CSV tables and manifests
//!   ([`experiments`]).
//!
//! All lengths are in units of the wavelength, so the wavenumber radius is
//! `2π`.
//!
//! ```
//! use hmimo::geometry::{build_lattice, dof_approx};
//!
//! let lattice = build_lattice(2.0, 2.0).unwrap();
//! assert_eq!(lattice.len(), 13);
//! assert_eq!(dof_approx(2.0, 2.0), 12);
//! ```

pub mod channel;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod link;
pub mod optimizer;

pub use error::{Error, Result};

/// Wavenumber radius `κ = 2π/λ` in wavelength-normalized units.
pub const KAPPA: f64 = 2.0 * std::f64::consts::PI;

/// Logarithm base used when reporting rates and energy efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateUnit {
    /// log2, bit/s/Hz.
    #[default]
    Bits,
    /// natural log, nat/s/Hz.
    Nats,
}

impl RateUnit {
    /// `log(1 + x)` in this unit.
    pub fn log1p(self, x: f64) -> f64 {
        match self {
            RateUnit::Bits => x.ln_1p() / std::f64::consts::LN_2,
            RateUnit::Nats => x.ln_1p(),
        }
    }
}
