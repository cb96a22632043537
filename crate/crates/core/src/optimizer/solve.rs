use serde::{Deserialize, Serialize};

use super::problem::{ee_objective, kkt_residuals, EEProblem};
use crate::error::{Error, Result};

/// Search interval for the stationary point, extended upward if needed.
const BRACKET: (f64, f64) = (1e-3, 1e9);
const BRACKET_LIMIT: f64 = 1e15;
/// Relative residual target, measured against `P_1 · numerator`.
const RESIDUAL_TOL: f64 = 1e-10;
const NEWTON_ITERS: usize = 100;
const MAX_HALVINGS: usize = 60;
/// Relative bracket width at which bisection stops.
const BISECTION_TOL: f64 = 1e-13;

/// Which constraints are active at the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveCase {
    /// Stationary point strictly inside both bounds.
    Interior,
    /// `N_r = n_r`, `N_s` from its own stationarity equation.
    ReceiveAtBound,
    /// `N_s = n_s`, `N_r` from its own stationarity equation.
    SourceAtBound,
    /// `(n_s, n_r)`.
    BothAtBound,
}

impl ActiveCase {
    /// Classifies an integer point against the bounds.
    pub fn of_point(prob: &EEProblem, n_s: u64, n_r: u64) -> Self {
        match (n_s > prob.n_s(), n_r > prob.n_r()) {
            (true, true) => ActiveCase::Interior,
            (true, false) => ActiveCase::ReceiveAtBound,
            (false, true) => ActiveCase::SourceAtBound,
            (false, false) => ActiveCase::BothAtBound,
        }
    }
}

/// Integer optimum with the continuous solution it was rounded from.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumResult {
    pub n_s_opt: u64,
    pub n_r_opt: u64,
    /// Unconstrained stationary point `(N̄_s, N̄_r)`.
    pub continuous_stationary: Option<(f64, f64)>,
    /// Constrained continuous optimum the integer point was rounded from.
    pub continuous_point: Option<(f64, f64)>,
    pub active_case: ActiveCase,
    /// Objective at the integer optimum (nats per joule per hertz).
    pub ee_value: f64,
    /// Residuals of both stationarity equations at `continuous_point`.
    pub kkt_residuals: Option<(f64, f64)>,
}

/// Scale of the residuals at `(n_s, n_r)`, `P_1 · numerator`.
fn residual_scale(prob: &EEProblem, n_s: f64, n_r: f64) -> f64 {
    (prob.p1() * prob.numerator(n_s, n_r)).max(f64::MIN_POSITIVE)
}

/// Residuals normalized so both are O(1) near the root.
fn scaled_residuals(prob: &EEProblem, u: f64, v: f64) -> (f64, f64) {
    let (n_s, n_r) = (u.exp(), v.exp());
    let (r1, r2) = kkt_residuals(prob, n_s, n_r);
    let s = residual_scale(prob, n_s, n_r);
    (r1 / s, r2 / (prob.users() as f64 * s))
}

fn converged(f: (f64, f64)) -> bool {
    f.0.abs() <= RESIDUAL_TOL && f.1.abs() <= RESIDUAL_TOL
}

/// Root of a function that is positive at small and negative at large
/// arguments, by bisection on `ln x` over the search bracket.
fn bisect_decreasing(mut f: impl FnMut(f64) -> f64) -> Result<f64> {
    let (mut lo, mut hi) = BRACKET;
    if !(f(lo) > 0.0) {
        return Err(Error::NonConvergence(format!(
            "stationarity residual is not positive at {lo}"
        )));
    }
    while !(f(hi) < 0.0) {
        hi *= 10.0;
        if hi > BRACKET_LIMIT {
            return Err(Error::NonConvergence(
                "stationarity residual never turns negative; the objective is increasing".into(),
            ));
        }
    }
    while hi / lo - 1.0 > BISECTION_TOL {
        let mid = (lo * hi).sqrt();
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// `N̄_s(N_r)`: root of the first stationarity equation at fixed `N_r`.
pub fn solve_source_given_receive(prob: &EEProblem, n_r: f64) -> Result<f64> {
    bisect_decreasing(|n_s| kkt_residuals(prob, n_s, n_r).0)
}

/// `N̄_r(N_s)`: root of the second stationarity equation at fixed `N_s`.
pub fn solve_receive_given_source(prob: &EEProblem, n_s: f64) -> Result<f64> {
    bisect_decreasing(|n_r| kkt_residuals(prob, n_s, n_r).1)
}

/// Damped Newton on the scaled residuals in log coordinates, with a
/// central-difference Jacobian.
fn newton(prob: &EEProblem, start: (f64, f64)) -> Option<(f64, f64)> {
    let (lo, hi) = (BRACKET.0.ln(), BRACKET_LIMIT.ln());
    let (mut u, mut v) = (start.0.ln(), start.1.ln());
    let merit = |f: (f64, f64)| f.0 * f.0 + f.1 * f.1;
    let mut f = scaled_residuals(prob, u, v);
    for _ in 0..NEWTON_ITERS {
        if converged(f) {
            return Some((u.exp(), v.exp()));
        }
        let h = 1e-6;
        let fu_p = scaled_residuals(prob, u + h, v);
        let fu_m = scaled_residuals(prob, u - h, v);
        let fv_p = scaled_residuals(prob, u, v + h);
        let fv_m = scaled_residuals(prob, u, v - h);
        let j11 = (fu_p.0 - fu_m.0) / (2.0 * h);
        let j21 = (fu_p.1 - fu_m.1) / (2.0 * h);
        let j12 = (fv_p.0 - fv_m.0) / (2.0 * h);
        let j22 = (fv_p.1 - fv_m.1) / (2.0 * h);
        let det = j11 * j22 - j12 * j21;
        if !det.is_finite() || det == 0.0 {
            return None;
        }
        let mut du = -(j22 * f.0 - j12 * f.1) / det;
        let mut dv = -(-j21 * f.0 + j11 * f.1) / det;
        // cap the step at a factor e^3 per iteration
        let len = du.abs().max(dv.abs());
        if len > 3.0 {
            du *= 3.0 / len;
            dv *= 3.0 / len;
        }
        let current = merit(f);
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let (nu, nv) = ((u + du).clamp(lo, hi), (v + dv).clamp(lo, hi));
            let nf = scaled_residuals(prob, nu, nv);
            if merit(nf) < current {
                accepted = Some((nu, nv, nf));
                break;
            }
            du *= 0.5;
            dv *= 0.5;
        }
        let (nu, nv, nf) = accepted?;
        u = nu;
        v = nv;
        f = nf;
    }
    converged(f).then(|| (u.exp(), v.exp()))
}

/// Alternating one-dimensional solves, each with a guaranteed sign change.
fn alternating_bisection(prob: &EEProblem, start: (f64, f64)) -> Result<(f64, f64)> {
    let mut n_r = start.1;
    for _ in 0..10_000 {
        let n_s = solve_source_given_receive(prob, n_r)?;
        n_r = solve_receive_given_source(prob, n_s)?;
        let f = scaled_residuals(prob, n_s.ln(), n_r.ln());
        if converged(f) {
            return Ok((n_s, n_r));
        }
    }
    Err(Error::NonConvergence(
        "alternating bisection did not reach the residual tolerance".into(),
    ))
}

/// The unique stationary point `(N̄_s, N̄_r)` of the unconstrained objective
/// over the positive orthant.
pub fn solve_stationary(prob: &EEProblem) -> Result<(f64, f64)> {
    if prob.p1() == 0.0 {
        return Err(Error::NonConvergence(
            "P_1 = 0: energy efficiency increases without bound".into(),
        ));
    }
    let start = (prob.n_s() as f64, prob.n_r() as f64);
    if let Some(root) = newton(prob, start) {
        return Ok(root);
    }
    let root = alternating_bisection(prob, start)?;
    // polish the bisection result
    Ok(newton(prob, root).unwrap_or(root))
}

/// Deterministic ordering of candidates: higher objective first, then
/// smaller `N_s`, then smaller `N_r`.
pub(crate) fn better(a: (f64, u64, u64), b: (f64, u64, u64)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2))
}

fn integerize(prob: &EEProblem, point: (f64, f64)) -> (u64, u64, f64) {
    let eval = |n_s: u64, n_r: u64| (ee_objective(prob, n_s as f64, n_r as f64), n_s, n_r);
    let clamp_s = |x: f64| (x.max(0.0) as u64).max(prob.n_s());
    let clamp_r = |x: f64| (x.max(0.0) as u64).max(prob.n_r());
    let mut best: Option<(f64, u64, u64)> = None;
    for n_s in [clamp_s(point.0.floor()), clamp_s(point.0.ceil())] {
        for n_r in [clamp_r(point.1.floor()), clamp_r(point.1.ceil())] {
            let cand = eval(n_s, n_r);
            if best.is_none_or(|b| better(cand, b)) {
                best = Some(cand);
            }
        }
    }
    let mut best = best.expect("four candidates");
    // discrete ascent over the feasible 8-neighbourhood
    loop {
        let (_, s, r) = best;
        let mut next = best;
        for ds in -1i64..=1 {
            for dr in -1i64..=1 {
                let (ns, nr) = (s as i64 + ds, r as i64 + dr);
                if (ds, dr) == (0, 0) || ns < prob.n_s() as i64 || nr < prob.n_r() as i64 {
                    continue;
                }
                let cand = eval(ns as u64, nr as u64);
                if better(cand, next) {
                    next = cand;
                }
            }
        }
        if next == best {
            return (best.1, best.2, best.0);
        }
        best = next;
    }
}

/// Best integer `N_s ≥ n_s` with `N_r` held at `n_r`, from the first
/// stationarity equation. Returns the count and its objective value.
pub fn optimize_source_given_receive(prob: &EEProblem, n_r: u64) -> Result<(u64, f64)> {
    let root = solve_source_given_receive(prob, n_r as f64)?;
    let eval = |n_s: u64| (ee_objective(prob, n_s as f64, n_r as f64), n_s, n_r);
    let lo = prob.n_s();
    let mut best = [root.floor(), root.ceil()]
        .map(|x| eval((x.max(0.0) as u64).max(lo)))
        .into_iter()
        .reduce(|a, b| if better(b, a) { b } else { a })
        .expect("two candidates");
    loop {
        let s = best.1;
        let mut next = best;
        for cand in [s.saturating_sub(1).max(lo), s + 1] {
            let c = eval(cand);
            if better(c, next) {
                next = c;
            }
        }
        if next == best {
            return Ok((best.1, best.0));
        }
        best = next;
    }
}

/// Energy-efficiency-optimal integer antenna counts.
///
/// Finds the stationary point, selects the active constraint case, re-solves
/// the free variable when one bound is active, and rounds to the best
/// floor/ceil combination followed by a local integer ascent.
pub fn optimize(prob: &EEProblem) -> Result<OptimumResult> {
    let stationary = solve_stationary(prob)?;
    let (lb_s, lb_r) = (prob.n_s() as f64, prob.n_r() as f64);
    let (case, point) = match (stationary.0 > lb_s, stationary.1 > lb_r) {
        (true, true) => (ActiveCase::Interior, stationary),
        (true, false) => {
            let n_s = solve_source_given_receive(prob, lb_r)?.max(lb_s);
            (ActiveCase::ReceiveAtBound, (n_s, lb_r))
        }
        (false, true) => {
            let n_r = solve_receive_given_source(prob, lb_s)?.max(lb_r);
            (ActiveCase::SourceAtBound, (lb_s, n_r))
        }
        (false, false) => (ActiveCase::BothAtBound, (lb_s, lb_r)),
    };
    let (n_s_opt, n_r_opt, ee_value) = integerize(prob, point);
    Ok(OptimumResult {
        n_s_opt,
        n_r_opt,
        continuous_stationary: Some(stationary),
        continuous_point: Some(point),
        active_case: case,
        ee_value,
        kkt_residuals: Some(kkt_residuals(prob, point.0, point.1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(users: usize, p1: f64) -> EEProblem {
        let streams = 2 * users;
        let a: Vec<f64> = (0..streams).map(|s| 0.2 + 0.1 * s as f64).collect();
        let b: Vec<f64> = (0..streams).map(|s| 40.0 + 15.0 * s as f64).collect();
        EEProblem::from_constants(a, b, 0.05, p1, 5.0, 3, 2, users).unwrap()
    }

    #[test]
    fn stationary_point_zeroes_both_residuals() {
        for users in 1..4 {
            let p = toy(users, 1e-3);
            let (ns, nr) = solve_stationary(&p).unwrap();
            let (r1, r2) = kkt_residuals(&p, ns, nr);
            let scale = residual_scale(&p, ns, nr);
            assert!(r1.abs() < 1e-10 * scale && r2.abs() < 1e-10 * scale * users as f64);
            assert!(r1.abs() < 1e-8 && r2.abs() < 1e-8);
        }
    }

    #[test]
    fn single_user_stationary_point_is_symmetric() {
        let p = toy(1, 2e-3);
        let (ns, nr) = solve_stationary(&p).unwrap();
        assert!((ns - nr).abs() < 1e-8 * ns, "{ns} vs {nr}");
    }

    #[test]
    fn fallback_agrees_with_newton() {
        let p = toy(3, 5e-4);
        let newton_root = solve_stationary(&p).unwrap();
        let bis = alternating_bisection(&p, (3.0, 2.0)).unwrap();
        assert!((newton_root.0 - bis.0).abs() < 1e-6 * bis.0);
        assert!((newton_root.1 - bis.1).abs() < 1e-6 * bis.1);
    }

    #[test]
    fn expensive_antennas_stay_at_bounds() {
        // high SNR (small b) saturates the rate already at the bounds
        let p = EEProblem::from_constants(vec![0.3; 4], vec![1e-3; 4], 0.05, 10.0, 5.0, 3, 2, 2).unwrap();
        let r = optimize(&p).unwrap();
        assert_eq!(r.active_case, ActiveCase::BothAtBound);
        assert_eq!((r.n_s_opt, r.n_r_opt), (p.n_s(), p.n_r()));
    }

    #[test]
    fn clamped_branch_zeroes_free_residual() {
        // a large receive-side bound forces N_r = n_r
        let p = toy(2, 1e-3).with_bounds(3, 10_000).unwrap();
        let r = optimize(&p).unwrap();
        assert_eq!(r.active_case, ActiveCase::ReceiveAtBound);
        assert_eq!(r.n_r_opt, 10_000);
        let (r1, _) = r.kkt_residuals.unwrap();
        assert!(r1.abs() < 1e-8);

        let p = toy(2, 1e-3).with_bounds(100_000, 2).unwrap();
        let r = optimize(&p).unwrap();
        assert_eq!(r.active_case, ActiveCase::SourceAtBound);
        assert_eq!(r.n_s_opt, 100_000);
        assert!(r.kkt_residuals.unwrap().1.abs() < 1e-8);
    }

    #[test]
    fn zero_antenna_cost_has_no_stationary_point() {
        let p = toy(1, 0.0);
        assert!(matches!(solve_stationary(&p), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn ordering_breaks_ties_towards_fewer_antennas() {
        assert!(better((1.0, 5, 5), (0.5, 1, 1)));
        assert!(better((1.0, 4, 9), (1.0, 5, 1)));
        assert!(better((1.0, 4, 1), (1.0, 4, 2)));
        assert!(!better((1.0, 4, 2), (1.0, 4, 2)));
    }
}
