//! Shifted and scaled beta density d·B(x − x0; α, β) + h fitted to a
//! cross-section by Levenberg–Marquardt.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::CrossSection;
use crate::error::{Error, Result};

const MIN_POINTS: usize = 8;
const MAX_ITER: usize = 500;
const REL_CHI2_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-7;
/// The density argument is kept this far inside (0, 1).
const EDGE: f64 = 1e-9;
const Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha_b: f64,
    pub beta_b: f64,
    pub d: f64,
    pub x0: f64,
    pub h: f64,
}

impl BetaParams {
    pub fn to_array(self) -> [f64; 5] {
        [self.alpha_b, self.beta_b, self.d, self.x0, self.h]
    }

    pub fn from_array(p: [f64; 5]) -> Self {
        BetaParams { alpha_b: p[0], beta_b: p[1], d: p[2], x0: p[3], h: p[4] }
    }

    /// d·B(x − x0; α, β) + h
    pub fn eval(&self, x: f64) -> f64 {
        self.d * beta_density(x - self.x0, self.alpha_b, self.beta_b) + self.h
    }
}

/// Beta probability density; the argument is clamped to [1e-9, 1 − 1e-9].
pub fn beta_density(t: f64, a: f64, b: f64) -> f64 {
    let t = t.clamp(EDGE, 1.0 - EDGE);
    let ln_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    (ln_norm + (a - 1.0) * t.ln() + (b - 1.0) * (-t).ln_1p()).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaFitResult {
    pub params: BetaParams,
    /// Raw sum of squared residuals at the optimum.
    pub chi2: f64,
    /// 95% half-widths in the order (α, β, d, x0, h).
    pub ci95: [f64; 5],
    pub converged: bool,
    pub iterations: usize,
}

/// Starting point when none is supplied: α = 10, β = 0.5, x0 = h = 0 and d
/// matching the tallest point.
pub fn default_guess(section: &CrossSection) -> BetaParams {
    let (xp, yp) = section
        .points
        .iter()
        .cloned()
        .fold((0.5, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let shape = beta_density(xp, 10.0, 0.5);
    let d = if shape > 0.0 && yp.is_finite() { yp / shape } else { 1.0 };
    BetaParams { alpha_b: 10.0, beta_b: 0.5, d, x0: 0.0, h: 0.0 }
}

// Shape exponents are searched in log space so they stay positive.
fn to_internal(p: &BetaParams) -> [f64; 5] {
    [p.alpha_b.ln(), p.beta_b.ln(), p.d, p.x0, p.h]
}

fn from_internal(q: &[f64; 5]) -> BetaParams {
    BetaParams { alpha_b: q[0].exp(), beta_b: q[1].exp(), d: q[2], x0: q[3], h: q[4] }
}

fn residuals(p: &BetaParams, pts: &[(f64, f64)]) -> Vec<f64> {
    pts.iter().map(|&(x, y)| p.eval(x) - y).collect()
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn jacobian<F: Fn(&[f64; 5]) -> Vec<f64>>(res: F, q: &[f64; 5], base: &[f64]) -> Vec<[f64; 5]> {
    let mut jac = vec![[0.0; 5]; base.len()];
    for k in 0..5 {
        let step = FD_STEP * q[k].abs().max(1e-4);
        let mut qs = *q;
        qs[k] += step;
        let shifted = res(&qs);
        for (row, (s, b)) in jac.iter_mut().zip(shifted.iter().zip(base)) {
            row[k] = (s - b) / step;
        }
    }
    jac
}

fn normal_equations(jac: &[[f64; 5]], r: &[f64]) -> ([[f64; 5]; 5], [f64; 5]) {
    let mut a = [[0.0; 5]; 5];
    let mut g = [0.0; 5];
    for (row, &ri) in jac.iter().zip(r) {
        for i in 0..5 {
            g[i] += row[i] * ri;
            for j in 0..5 {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    (a, g)
}

/// Solves a·x = b by Gaussian elimination with partial pivoting.
fn solve5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> Option<[f64; 5]> {
    for col in 0..5 {
        let piv = (col..5).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..5 {
            let f = a[row][col] / a[col][col];
            for k in col..5 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 5];
    for row in (0..5).rev() {
        let mut acc = b[row];
        for k in row + 1..5 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn invert5(a: &[[f64; 5]; 5]) -> Option<[[f64; 5]; 5]> {
    let mut inv = [[0.0; 5]; 5];
    for k in 0..5 {
        let mut e = [0.0; 5];
        e[k] = 1.0;
        let col = solve5(*a, e)?;
        for i in 0..5 {
            inv[i][k] = col[i];
        }
    }
    Some(inv)
}

/// Least-squares fit of the shifted beta model to a cross-section.
pub fn fit_beta(section: &CrossSection, init: Option<BetaParams>) -> Result<BetaFitResult> {
    let nonzero = section.nonzero();
    if nonzero < MIN_POINTS {
        return Err(Error::InsufficientData { nonzero, required: MIN_POINTS });
    }
    let pts = &section.points;
    let start = init.unwrap_or_else(|| default_guess(section));
    if !(start.alpha_b > 0.0 && start.beta_b > 0.0) {
        return Err(Error::InvalidConfig("initial beta exponents must be positive".into()));
    }
    let res = |q: &[f64; 5]| residuals(&from_internal(q), pts);

    let mut q = to_internal(&start);
    let mut r = res(&q);
    let mut chi2 = sum_sq(&r);
    if !chi2.is_finite() {
        return Err(Error::FitDiverged("non-finite residuals at the initial guess".into()));
    }
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITER {
        iterations += 1;
        let jac = jacobian(res, &q, &r);
        let (a, g) = normal_equations(&jac, &r);
        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = a;
            for i in 0..5 {
                damped[i][i] += lambda * a[i][i].max(1e-300);
            }
            let step = solve5(damped, g.map(|v| -v));
            if let Some(step) = step {
                let mut trial = q;
                for i in 0..5 {
                    trial[i] += step[i];
                }
                let tr = res(&trial);
                let tchi = sum_sq(&tr);
                if tchi.is_finite() && tchi <= chi2 {
                    let rel = (chi2 - tchi) / chi2.max(f64::MIN_POSITIVE);
                    q = trial;
                    r = tr;
                    chi2 = tchi;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = true;
                    if rel < REL_CHI2_TOL || chi2 == 0.0 {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !improved {
            // no downhill step at any damping: a stationary point
            converged = true;
            break;
        }
    }

    let params = from_internal(&q);
    if !params.to_array().iter().all(|v| v.is_finite()) || !chi2.is_finite() {
        return Err(Error::FitDiverged("non-finite parameters".into()));
    }

    // covariance in the reported parameters
    let p = params.to_array();
    let model = |v: &[f64; 5]| residuals(&BetaParams::from_array(*v), pts);
    let jac = jacobian(model, &p, &r);
    let (a, _) = normal_equations(&jac, &r);
    let dof = pts.len().saturating_sub(5).max(1) as f64;
    let s2 = chi2 / dof;
    let ci95 = match invert5(&a) {
        Some(cov) => std::array::from_fn(|k| Z95 * (cov[k][k] * s2).max(0.0).sqrt()),
        None => [f64::NAN; 5],
    };
    Ok(BetaFitResult { params, chi2, ci95, converged, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Axis;

    pub(crate) const ENT_SECTION: BetaParams =
        BetaParams { alpha_b: 21.0539, beta_b: 0.4694, d: 0.0135, x0: 0.0022, h: -8.0159e-6 };
    pub(crate) const COH_SECTION: BetaParams =
        BetaParams { alpha_b: 9.1513, beta_b: 0.3766, d: 0.0019, x0: 6.8175e-5, h: 9.6372e-6 };
    pub(crate) const ARBITRARY_SECTION: BetaParams =
        BetaParams { alpha_b: 8.9527, beta_b: 0.3949, d: 0.0028, x0: 7.2652e-5, h: 5.0638e-5 };

    fn synthetic(p: &BetaParams) -> CrossSection {
        let points = (0..40).map(|k| (k as f64 + 0.5) / 40.0).map(|x| (x, p.eval(x))).collect();
        CrossSection { fixed_axis: Axis::Ent, fixed_bin: 39, points }
    }

    /// Tanh-sinh quadrature of the density over (0, 1), with 1 − x
    /// evaluated without cancellation.
    fn integrate_density(a: f64, b: f64) -> f64 {
        let ln_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
        let h = 1.0 / 64.0;
        let mut acc = 0.0;
        for k in -400..=400 {
            let t = k as f64 * h;
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            let x = 1.0 / (1.0 + (-2.0 * u).exp());
            let y = 1.0 / (1.0 + (2.0 * u).exp());
            if x <= 0.0 || y <= 0.0 {
                continue;
            }
            let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (2.0 * u.cosh().powi(2));
            acc += w * (ln_norm + (a - 1.0) * x.ln() + (b - 1.0) * y.ln()).exp();
        }
        acc * h
    }

    #[test]
    fn density_is_normalized() {
        for (a, b) in [(21.0539, 0.4694), (9.1513, 0.3766), (8.9527, 0.3949), (2.0, 3.0), (0.5, 0.5), (1.0, 1.0)] {
            let s = integrate_density(a, b);
            assert!((s - 1.0).abs() < 1e-8, "({a}, {b}): {s}");
        }
    }

    #[test]
    fn density_known_values() {
        // Beta(2,3) = 12 x (1−x)²
        let x = 0.3f64;
        assert!((beta_density(x, 2.0, 3.0) - 12.0 * x * (1.0 - x).powi(2)).abs() < 1e-12);
        assert!((beta_density(0.7, 1.0, 1.0) - 1.0).abs() < 1e-12);
        assert!(beta_density(1.0, 2.0, 0.5).is_finite());
    }

    fn assert_recovers(truth: &BetaParams) {
        let fit = fit_beta(&synthetic(truth), None).unwrap();
        for (got, want) in fit.params.to_array().iter().zip(truth.to_array()) {
            assert!(((got - want) / want).abs() < 0.01, "{:?} vs {:?}", fit.params, truth);
        }
        assert!(fit.converged);
        assert!(fit.chi2 < 1e-12);
    }

    #[test]
    fn recovers_entanglement_section_parameters() {
        assert_recovers(&ENT_SECTION);
    }

    #[test]
    fn recovers_coherence_section_parameters() {
        assert_recovers(&COH_SECTION);
    }

    #[test]
    fn recovers_arbitrary_basis_section_parameters() {
        assert_recovers(&ARBITRARY_SECTION);
    }

    #[test]
    fn empty_section_is_rejected() {
        let s = CrossSection { fixed_axis: Axis::Coh, fixed_bin: 0, points: vec![(0.5, 0.0); 40] };
        assert_eq!(fit_beta(&s, None), Err(Error::InsufficientData { nonzero: 0, required: 8 }));
    }

    #[test]
    fn confidence_intervals_shrink_with_less_noise() {
        let mut noisy = synthetic(&COH_SECTION);
        let mut quiet = noisy.clone();
        for (k, (p, q)) in noisy.points.iter_mut().zip(quiet.points.iter_mut()).enumerate() {
            let wiggle = if k % 2 == 0 { 1.0 } else { -1.0 };
            p.1 += 1e-4 * wiggle;
            q.1 += 1e-6 * wiggle;
        }
        let a = fit_beta(&noisy, None).unwrap();
        let b = fit_beta(&quiet, None).unwrap();
        assert!(a.ci95[0] > b.ci95[0]);
        assert!(a.ci95.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn solver_inverts() {
        let a = [
            [4.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 3.0, 1.0, 0.0, 0.0],
            [0.0, 1.0, 2.0, 0.5, 0.0],
            [0.0, 0.0, 0.5, 5.0, 1.0],
            [0.0, 0.0, 0.0, 1.0, 1.0],
        ];
        let inv = invert5(&a).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let v: f64 = (0..5).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }
}
