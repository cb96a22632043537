//! Energy-efficiency-optimal antenna counts.
//!
//! The objective is pseudo-concave in `(N_s, N_r)`: a strictly concave sum
//! of rates over an affine power budget. It has a single stationary point
//! over the positive orthant, found from the two implicit stationarity
//! equations. When that point falls below a Nyquist bound, the bound is
//! activated and the other variable re-solved from its own equation.

mod oracle;
mod problem;
mod solve;

pub use oracle::{grid_scan_auto, grid_scan_oracle, GridBox};
pub use problem::{build_problem, ee_objective, kkt_residuals, EEProblem};
pub use solve::{
    optimize, optimize_source_given_receive, solve_receive_given_source, solve_source_given_receive, solve_stationary, ActiveCase,
    OptimumResult,
};

use serde::{Deserialize, Serialize};

/// Serializable optimizer record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub n_s: u64,
    pub n_r: u64,
    #[serde(rename = "Ns_bar")]
    pub ns_bar: Option<f64>,
    #[serde(rename = "Nr_bar")]
    pub nr_bar: Option<f64>,
    pub case: ActiveCase,
    #[serde(rename = "Ns_opt")]
    pub ns_opt: u64,
    #[serde(rename = "Nr_opt")]
    pub nr_opt: u64,
    /// Energy efficiency at the integer optimum, in nats per joule per hertz.
    pub ee: f64,
    pub residuals: Option<[f64; 2]>,
}

impl OptimizerReport {
    pub fn new(prob: &EEProblem, result: &OptimumResult) -> Self {
        Self {
            n_s: prob.n_s(),
            n_r: prob.n_r(),
            ns_bar: result.continuous_stationary.map(|p| p.0),
            nr_bar: result.continuous_stationary.map(|p| p.1),
            case: result.active_case,
            ns_opt: result.n_s_opt,
            nr_opt: result.n_r_opt,
            ee: result.ee_value,
            residuals: result.kkt_residuals.map(|(a, b)| [a, b]),
        }
    }
}
