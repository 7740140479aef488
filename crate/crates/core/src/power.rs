//! Resource-generating power of two-qubit gates: maximal entanglement and
//! coherence produced from resource-free inputs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{kak_decompose, CartanForm, CartanParams, SU2Params, Unitary4};
use crate::linalg::{kron_vec, Mat2, Mat4, PureState4, C64};
use crate::measures::{
    coherence_of_coordinates, concurrence_bar, ent_entropy, ent_from_concurrence, l1_of_coordinates,
    vidal_e2, Basis4, ProductBasisParams,
};
use crate::optimize::{maximize, OptimizerConfig, Optimum};

/// Slack used by the region inequalities and the folding domain check.
const REGION_SLACK: f64 = 1e-12;
/// Per-input maxima closer than this count as tied.
const TIE_TOL: f64 = 1e-9;

const BASIS_BOUNDS: [(f64, f64); 2] = [(0.0, PI), (0.0, TAU)];
const INPUT_BOUNDS: [(f64, f64); 4] = [(0.0, PI), (0.0, TAU), (0.0, PI), (0.0, TAU)];

/// Product input |ψ⟩_A ⊗ |φ⟩_B with
/// |ψ⟩ = cos(a/2)|0⟩ + e^{ib} sin(a/2)|1⟩ and |φ⟩ = cos(g/2)|0⟩ + e^{id} sin(g/2)|1⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductInputParams {
    pub abar: f64,
    pub gbar: f64,
    pub bbar: f64,
    pub dbar: f64,
}

impl ProductInputParams {
    pub fn state(&self) -> PureState4 {
        let qubit = |t: f64, p: f64| {
            let (s, c) = (0.5 * t).sin_cos();
            [C64::new(c, 0.0), C64::from_polar(s, p)]
        };
        PureState4::from_unit_unchecked(kron_vec(&qubit(self.abar, self.bbar), &qubit(self.gbar, self.dbar)))
    }

    fn from_search(x: &[f64]) -> Self {
        ProductInputParams { abar: x[0], bbar: x[1], gbar: x[2], dbar: x[3] }
    }
}

/// Coherence of U·b_i in the product basis b, in bits; `i` is 1-based.
///
/// # Panics
/// If `i` is not in 1..=4.
pub fn stilde(u: &Unitary4, i: usize, b: &ProductBasisParams) -> f64 {
    assert!((1..=4).contains(&i), "basis element index {i} outside 1..=4");
    let basis = Basis4::product(b);
    let out = u.matrix().apply(&basis.vectors()[i - 1]);
    coherence_of_coordinates(&basis.coordinates(&out))
}

/// Best product basis for one gate and one coherence quantifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCoherence {
    pub value: f64,
    /// 1-based index of the basis element used as input.
    pub index: usize,
    pub basis: ProductBasisParams,
    /// Maximum over bases for each of the four inputs.
    pub per_input: [f64; 4],
    pub per_input_basis: [ProductBasisParams; 4],
    pub evaluations: usize,
    pub converged: bool,
    pub achieved_tol: f64,
}

fn product_search(u: &Unitary4, cfg: &OptimizerConfig, measure: fn(&[C64; 4]) -> f64) -> ProductCoherence {
    let m = u.matrix();
    let mut per_input = [0.0; 4];
    let mut per_basis = [ProductBasisParams::new(0.0, 0.0); 4];
    let mut evaluations = 0;
    let mut converged = true;
    let mut achieved = 0.0f64;
    for i in 0..4 {
        let opt = maximize(
            |x| {
                let basis = Basis4::product(&ProductBasisParams::new(x[0], x[1]));
                let out = m.apply(&basis.vectors()[i]);
                measure(&basis.coordinates(&out))
            },
            &BASIS_BOUNDS,
            cfg,
        );
        per_input[i] = opt.value;
        per_basis[i] = ProductBasisParams::new(opt.x[0], opt.x[1]).canonical();
        evaluations += opt.evaluations;
        converged &= opt.converged;
        achieved = achieved.max(opt.achieved_tol);
    }
    let best = per_input.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let index = per_input.iter().position(|&v| v >= best - TIE_TOL).unwrap();
    ProductCoherence {
        value: per_input[index],
        index: index + 1,
        basis: per_basis[index],
        per_input,
        per_input_basis: per_basis,
        evaluations,
        converged,
        achieved_tol: achieved,
    }
}

/// Maximal relative-entropy coherence over the product bases
/// {|00⟩, |01⟩, |1η⟩, |1η⊥⟩}, in bits (range [0, 2]).
pub fn coherence_power_product(u: &Unitary4, cfg: &OptimizerConfig) -> ProductCoherence {
    product_search(u, cfg, coherence_of_coordinates)
}

/// As `coherence_power_product` with l1-norm coherence (range [0, 3]).
pub fn l1_coherence_power(u: &Unitary4, cfg: &OptimizerConfig) -> ProductCoherence {
    product_search(u, cfg, l1_of_coordinates)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArbitraryCoherence {
    pub value: f64,
    /// 1-based index of the input basis element.
    pub index: usize,
    /// Basis-generating unitary W; the basis is W|00⟩ … W|11⟩.
    pub basis: CartanForm,
    /// The product-basis optimum was at least as good as the free search.
    pub from_product: bool,
    pub evaluations: usize,
    pub converged: bool,
    pub achieved_tol: f64,
}

fn basis_form(x: &[f64]) -> CartanForm {
    let su = |k: usize| SU2Params { theta: x[k], phi: x[k + 1], psi: x[k + 2] };
    CartanForm {
        alpha: CartanParams::new(x[0], x[1], x[2]),
        va: su(3),
        vb: su(6),
        ua: su(9),
        ub: su(12),
    }
}

fn arbitrary_bounds() -> Vec<(f64, f64)> {
    let mut b = vec![(0.0, PI); 3];
    for _ in 0..4 {
        b.extend_from_slice(&[(0.0, PI), (0.0, TAU), (0.0, 2.0 * TAU)]);
    }
    b
}

/// Column-wise coherences of W†UW: entry j is the coherence of U·w_j in
/// the basis {w_k}.
fn basis_coherences(u: &Mat4, w: &Mat4) -> [f64; 4] {
    let t = &(&w.dagger() * u) * w;
    std::array::from_fn(|j| coherence_of_coordinates(&t.column(j)))
}

/// Maximal relative-entropy coherence over arbitrary orthonormal bases.
///
/// Bases are generated by a full Cartan-form unitary (15 parameters). The
/// result is never below the product-basis optimum `product`, which is a
/// member of the searched family; if the free search ends lower, the
/// product optimum is reported.
pub fn coherence_power_arbitrary(
    u: &Unitary4,
    cfg: &OptimizerConfig,
    product: &ProductCoherence,
) -> ArbitraryCoherence {
    let m = u.matrix();
    let opt = maximize(
        |x| {
            let w = basis_form(x).unitary();
            basis_coherences(m, w.matrix()).into_iter().fold(0.0, f64::max)
        },
        &arbitrary_bounds(),
        cfg,
    );
    let form = basis_form(&opt.x);
    let values = basis_coherences(m, form.unitary().matrix());
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let index = values.iter().position(|&v| v >= best - TIE_TOL).unwrap() + 1;

    if product.value >= best {
        return ArbitraryCoherence {
            value: product.value,
            index: product.index,
            basis: product_basis_form(&product.basis),
            from_product: true,
            evaluations: opt.evaluations,
            converged: product.converged,
            achieved_tol: product.achieved_tol,
        };
    }
    ArbitraryCoherence {
        value: best,
        index,
        basis: form,
        from_product: false,
        evaluations: opt.evaluations,
        converged: opt.converged,
        achieved_tol: opt.achieved_tol,
    }
}

/// Cartan-form parameters of the unitary whose columns are the product
/// basis {|00⟩, |01⟩, |1η⟩, |1η⊥⟩}.
fn product_basis_form(b: &ProductBasisParams) -> CartanForm {
    let basis = Basis4::product(b);
    let w = Mat4::from_columns(*basis.vectors());
    let w = Unitary4::from_mat_unchecked(w);
    match kak_decompose(&w) {
        Ok(k) => CartanForm {
            ua: su2_params_of(&k.ua),
            ub: su2_params_of(&k.ub),
            alpha: k.alpha,
            va: su2_params_of(&k.va),
            vb: su2_params_of(&k.vb),
        },
        Err(_) => CartanForm::kernel_only(CartanParams::zero()),
    }
}

/// Angles of an SU(2) matrix in the convention of `su2`.
pub fn su2_params_of(m: &Mat2) -> SU2Params {
    let a = m.0[0][0];
    let b = m.0[0][1];
    let theta = 2.0 * b.norm().atan2(a.norm());
    // a = cos e^{i(ψ+φ)/2}, b = sin e^{−i(ψ−φ)/2}
    let sum = if a.norm() > 1e-12 { 2.0 * a.arg() } else { 0.0 };
    let diff = if b.norm() > 1e-12 { -2.0 * b.arg() } else { sum };
    let sum = if a.norm() > 1e-12 { sum } else { diff };
    let psi = 0.5 * (sum + diff);
    let phi = 0.5 * (sum - diff);
    // halving the angle sums can flip the overall sign; correct with ψ += 2π
    let cand = SU2Params { theta, phi, psi };
    let w = crate::gates::su2(&cand);
    let params = if (w.0[0][0] - a).norm() + (w.0[0][1] - b).norm() < 1e-8 {
        cand
    } else {
        SU2Params { theta, phi, psi: psi + TAU }
    };
    SU2Params::new(params.theta, params.phi, params.psi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementOptimum {
    pub value: f64,
    pub input: ProductInputParams,
    pub evaluations: usize,
    pub converged: bool,
    pub achieved_tol: f64,
}

fn input_search(u: &Unitary4, cfg: &OptimizerConfig, measure: fn(&PureState4) -> f64) -> EntanglementOptimum {
    let m = u.matrix();
    let Optimum { x, value, evaluations, converged, achieved_tol } = maximize(
        |x| measure(&ProductInputParams::from_search(x).state().evolve(m)),
        &INPUT_BOUNDS,
        cfg,
    );
    EntanglementOptimum { value, input: ProductInputParams::from_search(&x), evaluations, converged, achieved_tol }
}

/// Maximal local entropy (ebits) of U(|ψ⟩⊗|φ⟩) over product inputs.
pub fn ent_power_numeric(u: &Unitary4, cfg: &OptimizerConfig) -> EntanglementOptimum {
    input_search(u, cfg, ent_entropy)
}

/// As `ent_power_numeric` with the Vidal monotone E₂ (range [0, 0.5]).
pub fn vidal_ent_power(u: &Unitary4, cfg: &OptimizerConfig) -> EntanglementOptimum {
    input_search(u, cfg, vidal_e2)
}

/// Maps each kernel coefficient from [0, π] into [0, π/4] using the
/// π/2-periodicity and the reflection about π/4 of the entangling power.
pub fn fold_alpha(alpha: &CartanParams) -> Result<CartanParams> {
    let fold = |a: f64| -> Result<f64> {
        if !(a >= -REGION_SLACK && a <= PI + REGION_SLACK) {
            return Err(Error::DomainError { value: a, domain: "[0, π]" });
        }
        let a = a.clamp(0.0, PI);
        let a = if a >= FRAC_PI_2 { a - FRAC_PI_2 } else { a };
        Ok(if a <= FRAC_PI_4 { a } else { FRAC_PI_2 - a })
    };
    Ok(CartanParams::new(fold(alpha.ax)?, fold(alpha.ay)?, fold(alpha.az)?))
}

/// Folded coefficients sorted descending.
fn folded_sorted(alpha: &CartanParams) -> [f64; 3] {
    let folded = fold_alpha(&alpha.canonical()).expect("canonical coefficients lie in [0, π)");
    let mut s = folded.to_array();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Whether the kernel can turn some product input into a maximally
/// entangled state.
pub fn max_ent_region_test(alpha: &CartanParams) -> bool {
    let [i, j, k] = folded_sorted(alpha);
    i + j >= FRAC_PI_4 - REGION_SLACK && j + k <= FRAC_PI_4 + REGION_SLACK
}

/// Entangling power of the kernel U_d(α) in closed form, in ebits.
pub fn ent_power_closed_form(alpha: &CartanParams) -> f64 {
    if max_ent_region_test(alpha) {
        return 1.0;
    }
    let [i, j, k] = folded_sorted(alpha);
    ent_from_concurrence(concurrence_bar(&CartanParams::new(i, j, k))).expect("concurrence lies in [0, 1]")
}

/// Optimizer settings for each family of searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerBudgets {
    pub product_basis: OptimizerConfig,
    pub arbitrary_basis: OptimizerConfig,
    pub product_inputs: OptimizerConfig,
}

impl Default for PowerBudgets {
    fn default() -> Self {
        PowerBudgets {
            product_basis: OptimizerConfig::product_basis(),
            arbitrary_basis: OptimizerConfig::arbitrary_basis(),
            product_inputs: OptimizerConfig::product_inputs(),
        }
    }
}

impl PowerBudgets {
    pub fn validate(&self) -> Result<()> {
        self.product_basis.validate()?;
        self.arbitrary_basis.validate()?;
        self.product_inputs.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    /// Entangling power from the numeric search, ebits.
    pub e_g: f64,
    /// Entangling power from the kernel coefficients of the KAK form.
    pub e_g_closed_form: f64,
    pub kernel: CartanParams,
    pub c_g: f64,
    pub c_g_norm: f64,
    pub c_g_prime: f64,
    pub e_g_vidal: f64,
    pub c_g_l1: f64,
    pub entanglement: EntanglementOptimum,
    pub coherence: ProductCoherence,
    pub coherence_arbitrary: ArbitraryCoherence,
    pub vidal: EntanglementOptimum,
    pub l1: ProductCoherence,
    pub evaluations: usize,
    pub non_converged: usize,
}

/// Every power of `u` with its optimizer diagnostics.
pub fn resource_report(u: &Unitary4, budgets: &PowerBudgets) -> Result<ResourceReport> {
    budgets.validate()?;
    let kak = kak_decompose(u)?;
    let entanglement = ent_power_numeric(u, &budgets.product_inputs);
    let coherence = coherence_power_product(u, &budgets.product_basis);
    let coherence_arbitrary = coherence_power_arbitrary(u, &budgets.arbitrary_basis, &coherence);
    let vidal = vidal_ent_power(u, &budgets.product_inputs);
    let l1 = l1_coherence_power(u, &budgets.product_basis);

    let flags = [
        entanglement.converged,
        coherence.converged,
        coherence_arbitrary.converged,
        vidal.converged,
        l1.converged,
    ];
    let evaluations = entanglement.evaluations
        + coherence.evaluations
        + coherence_arbitrary.evaluations
        + vidal.evaluations
        + l1.evaluations;
    Ok(ResourceReport {
        e_g: entanglement.value.clamp(0.0, 1.0),
        e_g_closed_form: ent_power_closed_form(&kak.alpha),
        kernel: kak.alpha,
        c_g: coherence.value.clamp(0.0, 2.0),
        c_g_norm: (coherence.value / 2.0).clamp(0.0, 1.0),
        c_g_prime: coherence_arbitrary.value.clamp(0.0, 2.0),
        e_g_vidal: vidal.value.clamp(0.0, 0.5),
        c_g_l1: l1.value.clamp(0.0, 3.0),
        entanglement,
        coherence,
        coherence_arbitrary,
        vidal,
        l1,
        evaluations,
        non_converged: flags.iter().filter(|&&c| !c).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{haar_sample, named_gate, NamedGate, RngState};
    use proptest::prelude::*;

    /// Four-term expansion of the coherence of U|00⟩ (i = 1) or U|01⟩
    /// (i = 2) in the basis {|00⟩, |01⟩, |1η⟩, |1η⊥⟩}, written from the
    /// matrix entries r_j with column 0 = (r3, r7, r4, r8) and
    /// column 1 = (r1, r5, r2, r6).
    fn stilde_expanded(u: &Mat4, i: usize, theta: f64, phi: f64) -> f64 {
        let r = |j: usize| -> C64 {
            match j {
                1 => u.0[0][1],
                2 => u.0[2][1],
                3 => u.0[0][0],
                4 => u.0[2][0],
                5 => u.0[1][1],
                6 => u.0[3][1],
                7 => u.0[1][0],
                8 => u.0[3][0],
                _ => unreachable!(),
            }
        };
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let a = r(5 - 2 * i);
        let b = r(9 - 2 * i);
        let p = r(10 - 2 * i);
        let q = r((2 * i as i64 - 2 * sign) as usize);
        let (s, c) = (0.5 * theta).sin_cos();
        let e = C64::from_polar(1.0, phi);
        let t3 = p * c - e * q * s;
        let t4 = q * c + e.conj() * p * s;
        let h = |z: C64| {
            let w = z.norm_sqr();
            if w <= 1e-300 {
                0.0
            } else {
                -w * w.log2()
            }
        };
        h(a) + h(b) + h(t3) + h(t4)
    }

    fn random_form(rng: &mut RngState) -> CartanForm {
        let mut su = || SU2Params::new(rng.uniform_in(0.0, PI), rng.uniform_in(0.0, TAU), rng.uniform_in(0.0, 2.0 * TAU));
        let (ua, ub, va, vb) = (su(), su(), su(), su());
        let alpha = CartanParams::new(rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI));
        CartanForm { ua, ub, alpha, va, vb }
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig { global_budget: 600, local_restarts: 4, ..OptimizerConfig::product_basis() }
    }

    #[test]
    fn stilde_matches_expansion() {
        let mut rng = RngState::new(21);
        for _ in 0..100 {
            let u = haar_sample(&mut rng);
            let theta = rng.uniform_in(0.0, TAU);
            let phi = rng.uniform_in(0.0, TAU);
            for i in 1..=2 {
                let direct = stilde(&u, i, &ProductBasisParams::new(theta, phi));
                let expanded = stilde_expanded(u.matrix(), i, theta, phi);
                assert!((direct - expanded).abs() < 1e-9, "i={i}: {direct} vs {expanded}");
            }
        }
    }

    #[test]
    fn stilde_examples() {
        let id = Unitary4::identity();
        let cnot = named_gate(NamedGate::Cnot);
        for i in 1..=4 {
            assert!(stilde(&id, i, &ProductBasisParams::new(1.1, 0.4)) < 1e-12);
        }
        assert!(stilde(&cnot, 1, &ProductBasisParams::new(0.0, 0.0)) < 1e-12);
        // CNOT|1η⟩ with η = |+⟩ is |1η⟩ again
        let b = ProductBasisParams::new(FRAC_PI_2, 0.0);
        assert!(stilde(&cnot, 3, &b) < 1e-12);
        // η⊥ = |−⟩ picks up a sign only
        assert!(stilde(&cnot, 4, &b) < 1e-12);
        // H⊗H on |00⟩ spreads evenly over the computational basis
        let hh = named_gate(NamedGate::Hh);
        assert!((stilde(&hh, 1, &ProductBasisParams::new(0.0, 0.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic]
    fn stilde_rejects_index_zero() {
        stilde(&Unitary4::identity(), 0, &ProductBasisParams::new(0.0, 0.0));
    }

    #[test]
    fn fold_examples() {
        let f = |a: f64| fold_alpha(&CartanParams::new(a, 0.0, 0.0)).unwrap().ax;
        assert_eq!(f(0.2), 0.2);
        assert!((f(0.9 * PI) - 0.1 * PI).abs() < 1e-15);
        assert_eq!(f(FRAC_PI_4), FRAC_PI_4);
        assert!(f(PI).abs() < 1e-15);
        assert!(fold_alpha(&CartanParams::new(-0.1, 0.0, 0.0)).is_err());
        assert!(fold_alpha(&CartanParams::new(PI + 1e-9, 0.0, 0.0)).is_err());
        assert!(fold_alpha(&CartanParams::new(PI + 1e-13, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(ent_power_closed_form(&CartanParams::new(FRAC_PI_4, 0.0, 0.0)), 1.0);
        let e = ent_power_closed_form(&CartanParams::new(PI / 8.0, 0.0, 0.0));
        assert!((e - 0.6008760366928562).abs() < 1e-12, "{e}");
        assert_eq!(ent_power_closed_form(&CartanParams::zero()), 0.0);
        // periodicity is handled internally
        let a = ent_power_closed_form(&CartanParams::new(0.3, 0.1, 0.05));
        let b = ent_power_closed_form(&CartanParams::new(0.3 + PI, 0.1 - PI, 0.05 + 2.0 * PI));
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn region_examples() {
        assert!(max_ent_region_test(&CartanParams::new(FRAC_PI_4, PI / 8.0, 0.0)));
        assert!(!max_ent_region_test(&CartanParams::new(PI / 8.0, PI / 16.0, 0.0)));
        assert!(!max_ent_region_test(&CartanParams::zero()));
        // SWAP sits at (π/4, π/4, π/4): j + k = π/2 > π/4
        assert!(!max_ent_region_test(&CartanParams::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4)));
    }

    #[test]
    fn closed_form_matches_numeric_on_kernels() {
        let mut rng = RngState::new(99);
        let cfg = OptimizerConfig::product_inputs();
        for _ in 0..25 {
            let alpha = CartanParams::new(rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI));
            let u = CartanForm::kernel_only(alpha).unitary();
            let numeric = ent_power_numeric(&u, &cfg).value;
            let closed = ent_power_closed_form(&alpha);
            assert!((numeric - closed).abs() < 5e-3, "{alpha:?}: {numeric} vs {closed}");
        }
    }

    #[test]
    fn region_agrees_with_closed_form_value() {
        let mut rng = RngState::new(4);
        for _ in 0..10_000 {
            let alpha = CartanParams::new(rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI));
            let e = ent_power_closed_form(&alpha);
            assert!((0.0..=1.0).contains(&e));
            if !max_ent_region_test(&alpha) {
                assert!(e < 1.0 - 1e-15 || concurrence_bar(&alpha) > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn entangling_power_is_local_invariant() {
        let mut rng = RngState::new(8);
        let cfg = OptimizerConfig::product_inputs();
        for _ in 0..6 {
            let form = random_form(&mut rng);
            let bare = CartanForm::kernel_only(form.alpha).unitary();
            let dressed = form.unitary();
            let a = ent_power_numeric(&bare, &cfg).value;
            let b = ent_power_numeric(&dressed, &cfg).value;
            assert!((a - b).abs() < 5e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn s3_and_s4_maxima_agree() {
        let mut rng = RngState::new(12);
        for _ in 0..6 {
            let u = haar_sample(&mut rng);
            let r = coherence_power_product(&u, &OptimizerConfig::product_basis());
            assert!((r.per_input[2] - r.per_input[3]).abs() < 5e-3, "{:?}", r.per_input);
        }
    }

    #[test]
    fn arbitrary_bases_dominate_product_bases() {
        let mut rng = RngState::new(3);
        let cfg = OptimizerConfig { global_budget: 3000, local_restarts: 2, ..OptimizerConfig::arbitrary_basis() };
        for _ in 0..3 {
            let u = haar_sample(&mut rng);
            let p = coherence_power_product(&u, &quick());
            let a = coherence_power_arbitrary(&u, &cfg, &p);
            assert!(a.value >= p.value - 1e-6);
            assert!(a.value <= 2.0 + 1e-12);
            if !a.from_product {
                let w = a.basis.unitary();
                let v = basis_coherences(u.matrix(), w.matrix())[a.index - 1];
                assert!((v - a.value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_has_no_power() {
        let id = Unitary4::identity();
        assert!(coherence_power_product(&id, &quick()).value < 1e-9);
        assert!(l1_coherence_power(&id, &quick()).value < 1e-9);
        assert!(ent_power_numeric(&id, &quick()).value < 1e-9);
        assert!(vidal_ent_power(&id, &quick()).value < 1e-9);
        let p = coherence_power_product(&id, &quick());
        let cfg = OptimizerConfig { global_budget: 2000, local_restarts: 1, ..OptimizerConfig::arbitrary_basis() };
        assert!(coherence_power_arbitrary(&id, &cfg, &p).value < 1e-9);
    }

    #[test]
    fn vidal_and_l1_examples() {
        let cnot = named_gate(NamedGate::Cnot);
        assert!((vidal_ent_power(&cnot, &quick()).value - 0.5).abs() < 1e-6);
        assert!(vidal_ent_power(&named_gate(NamedGate::Swap), &quick()).value < 1e-9);
        assert!((l1_coherence_power(&named_gate(NamedGate::Hh), &quick()).value - 3.0).abs() < 1e-6);
    }

    #[test]
    fn su2_params_round_trip() {
        let mut rng = RngState::new(17);
        for _ in 0..200 {
            let p = SU2Params::new(rng.uniform_in(0.0, PI), rng.uniform_in(0.0, TAU), rng.uniform_in(0.0, 2.0 * TAU));
            let m = crate::gates::su2(&p);
            let back = crate::gates::su2(&su2_params_of(&m));
            assert!(m.frobenius_distance(&back) < 1e-10);
        }
    }

    #[test]
    fn product_basis_form_reproduces_basis() {
        let b = ProductBasisParams::new(1.2, 4.0);
        let w = product_basis_form(&b).unitary();
        let basis = Basis4::product(&b);
        for k in 0..4 {
            let overlap = crate::linalg::inner(&basis.vectors()[k], &w.matrix().column(k)).norm();
            assert!((overlap - 1.0).abs() < 1e-9, "{k}: {overlap}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn first_two_landscapes_are_pi_periodic_in_theta(seed in 0u64..1000, theta in 0.0..TAU, phi in 0.0..TAU) {
            let u = haar_sample(&mut RngState::new(seed));
            for i in 1..=2 {
                let a = stilde(&u, i, &ProductBasisParams::new(theta, phi));
                let b = stilde(&u, i, &ProductBasisParams::new((theta + PI) % TAU, phi));
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn landscapes_are_pi_periodic_in_alpha(seed in 0u64..1000, axis in 0usize..3, theta in 0.0..PI, phi in 0.0..TAU) {
            let mut rng = RngState::new(seed);
            let form = random_form(&mut rng);
            let mut shifted = form;
            let mut a = shifted.alpha.to_array();
            a[axis] += PI;
            shifted.alpha = CartanParams::from_array(a);
            let (u, v) = (form.unitary(), shifted.unitary());
            for i in 1..=4 {
                let b = ProductBasisParams::new(theta, phi);
                prop_assert!((stilde(&u, i, &b) - stilde(&v, i, &b)).abs() < 1e-9);
            }
        }

        #[test]
        fn closed_form_in_unit_range(ax in -10.0..10.0f64, ay in -10.0..10.0f64, az in -10.0..10.0f64) {
            let e = ent_power_closed_form(&CartanParams::new(ax, ay, az));
            prop_assert!((0.0..=1.0).contains(&e));
        }

        #[test]
        fn fold_lands_in_quarter_cell(ax in 0.0..PI, ay in 0.0..PI, az in 0.0..PI) {
            let f = fold_alpha(&CartanParams::new(ax, ay, az)).unwrap();
            for x in f.to_array() {
                prop_assert!((0.0..=FRAC_PI_4).contains(&x));
            }
        }
    }
}
