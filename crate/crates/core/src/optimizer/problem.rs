use crate::channel::VarianceProfile;
use crate::energy::PowerModel;
use crate::error::{Error, Result};
use crate::link::LinkConfig;

/// Energy-efficiency maximization over antenna counts:
///
/// ```text
/// max  Σ_s ln(1 + a_s / (b_s/(N_r N_s) + c)) / ((N_s + K N_r) P_1 + P_2)
/// s.t. N_s ≥ n_s,  N_r ≥ n_r
/// ```
///
/// Streams `s = k·n_r + i` run over users and receive degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct EEProblem {
    a: Vec<f64>,
    b: Vec<f64>,
    c: f64,
    p1: f64,
    p2: f64,
    n_s: u64,
    n_r: u64,
    users: usize,
}

impl EEProblem {
    /// Builds a problem from raw constants, checking they are positive.
    #[allow(clippy::too_many_arguments)]
    pub fn from_constants(
        a: Vec<f64>,
        b: Vec<f64>,
        c: f64,
        p1: f64,
        p2: f64,
        n_s: u64,
        n_r: u64,
        users: usize,
    ) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "a has {} entries, b has {}",
                a.len(),
                b.len()
            )));
        }
        if users == 0 || a.len() % users != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} streams cannot be split over {users} users",
                a.len()
            )));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !a.iter().chain(&b).all(|&v| positive(v)) || !positive(c) {
            return Err(Error::ZeroVariance(
                "problem constants a, b, c must be strictly positive".into(),
            ));
        }
        if !(p1 >= 0.0 && p1.is_finite()) || !positive(p2) {
            return Err(Error::InvalidParameter(format!(
                "power constants must satisfy P_1 >= 0 and P_2 > 0, got ({p1}, {p2})"
            )));
        }
        if n_s == 0 || n_r == 0 {
            return Err(Error::InvalidParameter("DoF bounds must be at least 1".into()));
        }
        Ok(Self {
            a,
            b,
            c,
            p1,
            p2,
            n_s,
            n_r,
            users,
        })
    }

    /// Stream constants `a_s` (stream order).
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Stream constants `b_s` (stream order).
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// Lower bound on `N_s`.
    pub fn n_s(&self) -> u64 {
        self.n_s
    }

    /// Lower bound on `N_r`.
    pub fn n_r(&self) -> u64 {
        self.n_r
    }

    pub fn users(&self) -> usize {
        self.users
    }

    /// Same rates with the power constants multiplied by `factor`.
    pub fn with_scaled_power(&self, factor: f64) -> Result<Self> {
        Self::from_constants(
            self.a.clone(),
            self.b.clone(),
            self.c,
            self.p1 * factor,
            self.p2 * factor,
            self.n_s,
            self.n_r,
            self.users,
        )
    }

    pub fn with_bounds(&self, n_s: u64, n_r: u64) -> Result<Self> {
        Self::from_constants(
            self.a.clone(),
            self.b.clone(),
            self.c,
            self.p1,
            self.p2,
            n_s,
            n_r,
            self.users,
        )
    }

    fn streams(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.a.iter().copied().zip(self.b.iter().copied())
    }

    /// Sum of per-stream rates in nats, `Σ ln(1 + a/(b/(N_r N_s) + c))`.
    pub fn numerator(&self, n_s: f64, n_r: f64) -> f64 {
        let x = n_s * n_r;
        self.streams()
            .map(|(a, b)| (a * x / (b + self.c * x)).ln_1p())
            .sum()
    }

    /// `(N_s + K N_r) P_1 + P_2`.
    pub fn denominator(&self, n_s: f64, n_r: f64) -> f64 {
        self.p1 * (n_s + self.users as f64 * n_r) + self.p2
    }

    /// `Σ a b / ((c x + b)((c + a) x + b))` with `x = N_s N_r`; multiplying by
    /// `N_r` (resp. `N_s`) gives `∂numerator/∂N_s` (resp. `∂/∂N_r`).
    pub(crate) fn gradient_kernel(&self, n_s: f64, n_r: f64) -> f64 {
        let x = n_s * n_r;
        let c = self.c;
        self.streams()
            .map(|(a, b)| a * b / ((c * x + b) * ((c + a) * x + b)))
            .sum()
    }
}

/// Derives the problem constants from a channel profile:
/// `a = σ²_{r,i,k} (n_s σ̂²_s)²`,
/// `b = σ²_w (Σ_k Σ_i Σ_t σ²_{r,i,k} σ²_{s,t}) / (σ²_{r,i,k} p_u)` and
/// `c = n_r σ̂²_r Σ_t σ⁴_{s,t}`.
///
/// `n_s`, `n_r` are the Nyquist lower bounds on the antenna counts.
pub fn build_problem(
    profile: &VarianceProfile,
    cfg: &LinkConfig,
    model: &PowerModel,
    n_s: u64,
    n_r: u64,
) -> Result<EEProblem> {
    cfg.validate()?;
    model.validate()?;
    if profile.users() != cfg.users || model.users != cfg.users {
        return Err(Error::DimensionMismatch(format!(
            "user counts differ: profile {}, link {}, power model {}",
            profile.users(),
            cfg.users,
            model.users
        )));
    }
    if model.p_u != cfg.p_u {
        return Err(Error::InvalidParameter(format!(
            "transmit power differs between link ({}) and power model ({})",
            cfg.p_u, model.p_u
        )));
    }
    let n_s_hat = profile.n_s() as f64 * profile.sigma_hat_s2();
    let total = profile.total_power_gain();
    let c = profile.n_r() as f64 * profile.sigma_hat_r2() * profile.sum_s_fourth();
    let (a, b) = profile
        .sigma2_r_all()
        .iter()
        .flatten()
        .map(|&sr| (sr * n_s_hat * n_s_hat, cfg.sigma2_w * total / (sr * cfg.p_u)))
        .unzip();
    EEProblem::from_constants(a, b, c, model.p1(), model.p2(), n_s, n_r, cfg.users)
}

/// The objective `numerator / denominator` (nats per joule per hertz).
pub fn ee_objective(prob: &EEProblem, n_s: f64, n_r: f64) -> f64 {
    prob.numerator(n_s, n_r) / prob.denominator(n_s, n_r)
}

/// Left-hand sides of the two stationarity equations at `(N_s, N_r)`:
///
/// ```text
/// r1 = (P_1(N_s + K N_r) + P_2) Σ a b N_r / ((c x + b)((c+a) x + b)) −   P_1 Σ ln(1 + a/(b/x + c))
/// r2 = (P_1(N_s + K N_r) + P_2) Σ a b N_s / ((c x + b)((c+a) x + b)) − K P_1 Σ ln(1 + a/(b/x + c))
/// ```
///
/// Each equals the squared denominator times the corresponding partial
/// derivative of the objective.
pub fn kkt_residuals(prob: &EEProblem, n_s: f64, n_r: f64) -> (f64, f64) {
    let d = prob.denominator(n_s, n_r);
    let kernel = prob.gradient_kernel(n_s, n_r);
    let num = prob.numerator(n_s, n_r);
    let r1 = d * kernel * n_r - prob.p1 * num;
    let r2 = d * kernel * n_s - prob.users as f64 * prob.p1 * num;
    (r1, r2)
}
