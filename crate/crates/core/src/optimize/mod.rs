//! Box-constrained derivative-free maximization: a dividing-rectangles
//! global sweep followed by Nelder–Mead polishing from the best cells.

mod direct;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::RngState;

pub use simplex::{nelder_mead, SimplexResult};

/// Simplex iterations allowed per restart, per dimension.
const LOCAL_EVALS_PER_DIM: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Function evaluations spent in the global sweep.
    pub global_budget: usize,
    /// Number of local refinements, started from the best distinct cells.
    pub local_restarts: usize,
    /// Relative spread of simplex values at which a refinement stops.
    pub local_tol: f64,
    /// Seeds extra random starting points when the sweep produced fewer
    /// cells than restarts.
    pub rng_seed: u64,
}

impl OptimizerConfig {
    /// 2-D searches over a product basis.
    pub fn product_basis() -> Self {
        OptimizerConfig { global_budget: 2000, local_restarts: 8, local_tol: 1e-8, rng_seed: 0 }
    }

    /// 15-D searches over arbitrary bases.
    pub fn arbitrary_basis() -> Self {
        OptimizerConfig { global_budget: 20_000, ..Self::product_basis() }
    }

    /// 4-D searches over product input states.
    pub fn product_inputs() -> Self {
        OptimizerConfig { global_budget: 3000, ..Self::product_basis() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.global_budget == 0 {
            return Err(Error::InvalidConfig("global_budget must be positive".into()));
        }
        if self.local_restarts == 0 {
            return Err(Error::InvalidConfig("local_restarts must be positive".into()));
        }
        if !(self.local_tol > 0.0 && self.local_tol <= 1e-3) {
            return Err(Error::InvalidConfig(format!("local_tol {} outside (0, 1e-3]", self.local_tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// The refinement that produced `value` met the tolerance before its
    /// evaluation cap.
    pub converged: bool,
    /// Relative spread of the final simplex of that refinement.
    pub achieved_tol: f64,
}

/// Maximizes `f` over the box `bounds` (each `(lo, hi)` with lo < hi).
///
/// Points proposed outside the box are clamped onto it before evaluation.
pub fn maximize<F>(mut f: F, bounds: &[(f64, f64)], cfg: &OptimizerConfig) -> Optimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = bounds.len();
    assert!(n > 0, "empty search box");
    let mut evaluations = 0usize;
    let mut buf = vec![0.0; n];
    // minimize the negated objective in unit-cube coordinates
    let mut g = |u: &[f64]| -> f64 {
        evaluations += 1;
        for ((b, &ui), &(lo, hi)) in buf.iter_mut().zip(u).zip(bounds) {
            *b = lo + (hi - lo) * ui.clamp(0.0, 1.0);
        }
        let v = -f(&buf);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut rects = direct::minimize_unit(&mut g, n, cfg.global_budget);
    rects.sort_by(|a, b| a.value.total_cmp(&b.value));

    let mut starts: Vec<(Vec<f64>, Vec<f64>)> = rects
        .iter()
        .take(cfg.local_restarts)
        .map(|r| (r.center.clone(), (0..n).map(|d| 0.5 * r.side(d)).collect()))
        .collect();
    let mut rng = RngState::new(cfg.rng_seed);
    while starts.len() < cfg.local_restarts {
        starts.push(((0..n).map(|_| rng.uniform()).collect(), vec![0.25; n]));
    }

    let mut best_x = rects[0].center.clone();
    let mut best_val = rects[0].value;
    let mut converged = false;
    let mut achieved = f64::INFINITY;
    for (x0, steps) in starts {
        let r = nelder_mead(&mut g, &x0, &steps, cfg.local_tol, LOCAL_EVALS_PER_DIM * n);
        if r.value <= best_val {
            best_val = r.value;
            best_x = r.x;
            converged = r.converged;
            achieved = r.spread / r.value.abs().max(1.0);
        }
    }

    let x = best_x
        .iter()
        .zip(bounds)
        .map(|(&u, &(lo, hi))| lo + (hi - lo) * u.clamp(0.0, 1.0))
        .collect();
    Optimum { x, value: -best_val, evaluations, converged, achieved_tol: achieved }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for cfg in [
            OptimizerConfig::product_basis(),
            OptimizerConfig::arbitrary_basis(),
            OptimizerConfig::product_inputs(),
        ] {
            cfg.validate().unwrap();
        }
        let bad = OptimizerConfig { local_tol: 0.1, ..OptimizerConfig::product_basis() };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig { global_budget: 0, ..OptimizerConfig::product_basis() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn maximizes_multimodal_function_on_box() {
        // global maximum 2 at (1, −2); local maxima elsewhere
        let f = |x: &[f64]| {
            2.0 * (-((x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2))).exp()
                + 1.5 * (-((x[0] + 2.0).powi(2) + (x[1] - 2.0).powi(2)) * 4.0).exp()
        };
        let opt = maximize(f, &[(-3.0, 3.0), (-3.0, 3.0)], &OptimizerConfig::product_basis());
        assert!((opt.value - 2.0).abs() < 1e-9, "{}", opt.value);
        assert!((opt.x[0] - 1.0).abs() < 1e-4 && (opt.x[1] + 2.0).abs() < 1e-4);
        assert!(opt.converged);
    }

    #[test]
    fn optimum_on_boundary() {
        let f = |x: &[f64]| x[0] + x[1];
        let opt = maximize(f, &[(0.0, 1.0), (0.0, 2.0)], &OptimizerConfig::product_basis());
        assert!((opt.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn periodic_landscape_in_four_dims() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.3).cos()).product::<f64>();
        let opt = maximize(f, &[(0.0, std::f64::consts::TAU); 4], &OptimizerConfig::product_inputs());
        assert!((opt.value - 1.0).abs() < 1e-8, "{}", opt.value);
    }
}
