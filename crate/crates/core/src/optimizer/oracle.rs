use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::problem::{ee_objective, EEProblem};
use super::solve::{better, ActiveCase, OptimumResult};
use crate::error::{Error, Result};

/// Integer search box for [`grid_scan_oracle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridBox {
    pub n_s: RangeInclusive<u64>,
    pub n_r: RangeInclusive<u64>,
}

impl GridBox {
    /// `[n_s, n_s + extra_s] × [n_r, n_r + extra_r]` starting at the problem bounds.
    pub fn from_bounds(prob: &EEProblem, extra_s: u64, extra_r: u64) -> Self {
        Self {
            n_s: prob.n_s()..=prob.n_s() + extra_s,
            n_r: prob.n_r()..=prob.n_r() + extra_r,
        }
    }

    pub fn points(&self) -> u64 {
        let span = |r: &RangeInclusive<u64>| r.end().saturating_sub(*r.start()) + 1;
        span(&self.n_s) * span(&self.n_r)
    }
}

/// Exhaustive argmax of the objective over the integer points of `bx`.
///
/// Ties go to the smallest `N_s`, then the smallest `N_r`. Fails with
/// [`Error::BoxTooSmall`] when the maximum sits on the far edge of an axis
/// that has more than one point, since the true optimum may lie outside.
pub fn grid_scan_oracle(prob: &EEProblem, bx: &GridBox) -> Result<OptimumResult> {
    let (s0, s1) = (*bx.n_s.start(), *bx.n_s.end());
    let (r0, r1) = (*bx.n_r.start(), *bx.n_r.end());
    if s0 > s1 || r0 > r1 || s0 < prob.n_s() || r0 < prob.n_r() {
        return Err(Error::InvalidParameter(format!(
            "grid box {s0}..={s1} x {r0}..={r1} is empty or below the bounds ({}, {})",
            prob.n_s(),
            prob.n_r()
        )));
    }
    let best = (s0..=s1)
        .into_par_iter()
        .map(|n_s| {
            (r0..=r1)
                .map(|n_r| (ee_objective(prob, n_s as f64, n_r as f64), n_s, n_r))
                .reduce(|a, b| if better(b, a) { b } else { a })
                .expect("nonempty row")
        })
        .reduce_with(|a, b| if better(b, a) { b } else { a })
        .expect("nonempty box");
    let (ee_value, n_s, n_r) = best;
    if (s1 > s0 && n_s == s1) || (r1 > r0 && n_r == r1) {
        return Err(Error::BoxTooSmall { n_s, n_r });
    }
    Ok(OptimumResult {
        n_s_opt: n_s,
        n_r_opt: n_r,
        continuous_stationary: None,
        continuous_point: None,
        active_case: ActiveCase::of_point(prob, n_s, n_r),
        ee_value,
        kkt_residuals: None,
    })
}

/// Grid scan starting from `[n_s, n_s+600] × [n_r, n_r+300]`, doubling the
/// extents while the maximum touches the far edge.
pub fn grid_scan_auto(prob: &EEProblem) -> Result<OptimumResult> {
    let (mut es, mut er) = (600u64, 300u64);
    loop {
        match grid_scan_oracle(prob, &GridBox::from_bounds(prob, es, er)) {
            Err(Error::BoxTooSmall { n_s, n_r }) if es < 1 << 16 => {
                if n_s == prob.n_s() + es {
                    es *= 2;
                }
                if n_r == prob.n_r() + er {
                    er *= 2;
                }
            }
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::optimize;

    fn toy(p1: f64) -> EEProblem {
        EEProblem::from_constants(vec![0.4, 0.3, 0.5], vec![60.0, 90.0, 45.0], 0.08, p1, 10.0, 4, 1, 3)
            .unwrap()
    }

    #[test]
    fn single_point_box() {
        let p = toy(1e-3);
        let bx = GridBox::from_bounds(&p, 0, 0);
        let r = grid_scan_oracle(&p, &bx).unwrap();
        assert_eq!((r.n_s_opt, r.n_r_opt), (4, 1));
        assert_eq!(r.active_case, ActiveCase::BothAtBound);
    }

    #[test]
    fn monotone_instance_returns_bounds() {
        let p = EEProblem::from_constants(vec![0.4, 0.3, 0.5], vec![1e-2; 3], 0.08, 1e3, 10.0, 4, 1, 3)
            .unwrap();
        let r = grid_scan_oracle(&p, &GridBox::from_bounds(&p, 50, 50)).unwrap();
        assert_eq!((r.n_s_opt, r.n_r_opt), (4, 1));
    }

    #[test]
    fn small_box_is_reported() {
        let p = toy(1e-4);
        let err = grid_scan_oracle(&p, &GridBox::from_bounds(&p, 3, 3)).unwrap_err();
        assert!(matches!(err, Error::BoxTooSmall { .. }));
    }

    #[test]
    fn agrees_with_optimize() {
        for p1 in [1e-4, 1e-3, 1e-2, 1.0] {
            let p = toy(p1);
            let a = optimize(&p).unwrap();
            let b = grid_scan_auto(&p).unwrap();
            assert_eq!((a.n_s_opt, a.n_r_opt), (b.n_s_opt, b.n_r_opt), "p1 = {p1}");
        }
    }

    #[test]
    fn rejects_box_below_bounds() {
        let p = toy(1e-3);
        let bx = GridBox { n_s: 1..=10, n_r: 1..=10 };
        assert!(grid_scan_oracle(&p, &bx).is_err());
    }
}
