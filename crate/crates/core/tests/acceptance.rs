//! Acceptance gate. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails. The two campaign criteria take tens of minutes on one core.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::io::Write;
use std::sync::OnceLock;

use gatepower::ensemble::{cross_section, fit_beta, run_campaign, Axis, BetaParams, CampaignConfig, CampaignOutput, CoherenceMode, CrossSection};
use gatepower::linalg::{kron, partial_trace, reduced_density, Subsystem};
use gatepower::measures::{ent_entropy, von_neumann_entropy};
use gatepower::power::{coherence_power_arbitrary, ProductCoherence};
use gatepower::{
    coherence_power_product, ent_power_closed_form, ent_power_numeric, fold_alpha, haar_sample, kak_decompose,
    max_ent_region_test, named_gate, stilde, su2, CartanForm, CartanParams, Mat2, NamedGate, OptimizerConfig,
    ProductBasisParams, PureState4, RngState, SU2Params, Unitary4, C64,
};

const ENT_TOL: f64 = 5e-3;
const BOUNDARY_BAND: f64 = 1e-3;

/// Writes straight to the process stdout so the lines survive output capture.
fn report(id: &str, pass: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn folded_sorted(alpha: &CartanParams) -> [f64; 3] {
    let mut s = fold_alpha(&alpha.canonical()).unwrap().to_array();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Signed distance-like margin to the maximal-entangler region: negative inside.
fn region_violation(alpha: &CartanParams) -> f64 {
    let [i, j, k] = folded_sorted(alpha);
    (FRAC_PI_4 - (i + j)).max(j + k - FRAC_PI_4)
}

fn random_su2(rng: &mut RngState) -> SU2Params {
    SU2Params::new((1.0 - 2.0 * rng.uniform()).acos(), rng.uniform_in(0.0, TAU), rng.uniform_in(0.0, 2.0 * TAU))
}

fn random_local(rng: &mut RngState) -> Mat2 {
    su2(&random_su2(rng))
}

fn random_state(rng: &mut RngState) -> PureState4 {
    let amps = std::array::from_fn(|_| C64::new(rng.normal(), rng.normal()));
    PureState4::normalized(amps).unwrap()
}

fn sandwich(u: &Unitary4, left: Option<(&Mat2, &Mat2)>, right: Option<(&Mat2, &Mat2)>) -> Unitary4 {
    let mut m = u.clone();
    if let Some((c, d)) = right {
        m = Unitary4::local(c, d).then(&m);
    }
    if let Some((a, b)) = left {
        m = m.then(&Unitary4::local(a, b));
    }
    m
}

fn criterion_1() -> bool {
    let table = [
        (NamedGate::Cnot, 1.0, 0.5),
        (NamedGate::Cz, 1.0, 0.5),
        (NamedGate::Swap, 0.0, 0.7768),
        (NamedGate::SqrtSwap, 1.0, 0.75),
        (NamedGate::Yx, 0.0, 0.5),
        (NamedGate::Hh, 0.0, 1.0),
        (NamedGate::Hi, 0.0, 0.75),
    ];
    let mut worst: f64 = 0.0;
    for (gate, e, c) in table {
        let u = named_gate(gate);
        let eg = ent_power_numeric(&u, &OptimizerConfig::product_inputs()).value;
        let cg = coherence_power_product(&u, &OptimizerConfig::product_basis()).value / 2.0;
        worst = worst.max((eg - e).abs()).max((cg - c).abs());
    }
    let pass = worst < 5e-4;
    report("1", pass, &format!("seven-gate table, worst absolute deviation {worst:.2e} (tol 5e-4)"));
    pass
}

fn criterion_2() -> bool {
    let mut rng = RngState::new(2024);
    let cfg = OptimizerConfig::product_inputs();
    let (mut worst, mut banded, mut failures) = (0.0f64, 0, 0);
    for _ in 0..500 {
        let alpha = CartanParams::new(rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI));
        let numeric = ent_power_numeric(&CartanForm::kernel_only(alpha).unitary(), &cfg).value;
        let diff = (numeric - ent_power_closed_form(&alpha)).abs();
        if region_violation(&alpha).abs() < BOUNDARY_BAND {
            banded += 1;
            continue;
        }
        worst = worst.max(diff);
        failures += usize::from(diff >= ENT_TOL);
    }
    let pass = failures == 0;
    report(
        "2",
        pass,
        &format!("closed form vs optimizer on 500 kernels, worst |diff| {worst:.2e}, {failures} over 5e-3, {banded} in boundary band"),
    );
    pass
}

fn criterion_3() -> bool {
    let mut rng = RngState::new(3);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..1000 {
        let u = haar_sample(&mut rng);
        match kak_decompose(&u) {
            Ok(k) => worst = worst.max(k.residual(&u)),
            Err(_) => errors += 1,
        }
    }
    let cnot = folded_sorted(&kak_decompose(&named_gate(NamedGate::Cnot)).unwrap().alpha);
    let cnot_err = (cnot[0] - FRAC_PI_4).abs().max(cnot[1].abs()).max(cnot[2].abs());
    let pass = errors == 0 && worst < 1e-9 && cnot_err < 1e-9;
    report(
        "3",
        pass,
        &format!("KAK on 1000 Haar samples, worst residual {worst:.2e}, {errors} failures; CNOT kernel error {cnot_err:.2e}"),
    );
    pass
}

fn criterion_4() -> bool {
    let mut rng = RngState::new(4);
    let cfg = OptimizerConfig::product_inputs();
    let (mut banded, mut disagreements) = (0, Vec::new());
    for _ in 0..500 {
        let u = haar_sample(&mut rng);
        let alpha = kak_decompose(&u).unwrap().alpha;
        let v = region_violation(&alpha);
        if v.abs() < BOUNDARY_BAND {
            banded += 1;
            continue;
        }
        let numeric = ent_power_numeric(&u, &cfg).value;
        if max_ent_region_test(&alpha) != (numeric > 1.0 - ENT_TOL) {
            disagreements.push((v, numeric));
        }
    }
    let pass = disagreements.is_empty();
    let mut detail = format!("region test vs E_g > 1-5e-3 on 500 Haar samples, {} disagreements, {banded} in boundary band", disagreements.len());
    if let Some(far) = disagreements.iter().map(|d| d.0).reduce(f64::max) {
        let low = disagreements.iter().map(|d| d.1).fold(1.0, f64::min);
        detail += &format!(
            "; disagreeing samples lie up to {far:.3} outside the region with E_g >= {low:.5} (E_g falls off quadratically there)"
        );
    }
    report("4", pass, &detail);
    pass
}

fn product_campaign() -> &'static CampaignOutput {
    static OUT: OnceLock<CampaignOutput> = OnceLock::new();
    OUT.get_or_init(|| {
        let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        let cfg = CampaignConfig { n_samples: 100_000, seed: 5, worker_count: workers, ..CampaignConfig::default() };
        run_campaign(&cfg).unwrap()
    })
}

fn criterion_5() -> bool {
    let out = product_campaign();
    let top = out.grid.bins() - 1;
    let modal = out.grid.modal_bin();
    let sum = out.grid.nu_sum();
    let pass = modal == (top, top) && (sum - 1.0).abs() < 1e-12;
    report(
        "5",
        pass,
        &format!(
            "10^5 product-basis campaign, modal bin {modal:?} (want ({top}, {top})), sum of nu - 1 = {:.1e}, {} non-converged",
            sum - 1.0,
            out.counters.non_converged
        ),
    );
    pass
}

const ENT_SECTION: BetaParams = BetaParams { alpha_b: 21.0539, beta_b: 0.4694, d: 0.0135, x0: 0.0022, h: -8.0159e-6 };
const COH_SECTION: BetaParams = BetaParams { alpha_b: 9.1513, beta_b: 0.3766, d: 0.0019, x0: 6.8175e-5, h: 9.6372e-6 };
const ARBITRARY_SECTION: BetaParams = BetaParams { alpha_b: 8.9527, beta_b: 0.3949, d: 0.0028, x0: 7.2652e-5, h: 5.0638e-5 };

fn criterion_6() -> bool {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for truth in [ENT_SECTION, COH_SECTION, ARBITRARY_SECTION] {
        let points = (0..40).map(|k| (k as f64 + 0.5) / 40.0).map(|x| (x, truth.eval(x))).collect();
        let section = CrossSection { fixed_axis: Axis::Ent, fixed_bin: 39, points };
        match fit_beta(&section, None) {
            Ok(f) => {
                for (got, want) in f.params.to_array().iter().zip(truth.to_array()) {
                    worst = worst.max(((got - want) / want).abs());
                }
            }
            Err(_) => ok = false,
        }
    }
    let pass = ok && worst < 0.01;
    report("6", pass, &format!("beta fit of three noiseless reference curves, worst relative error {worst:.2e} (tol 1e-2)"));
    pass
}

fn criterion_7() -> bool {
    let out = product_campaign();
    let top = out.grid.bins() - 1;
    let fit = |axis| fit_beta(&cross_section(&out.grid, axis, top).unwrap(), None);
    let (ent, coh) = match (fit(Axis::Ent), fit(Axis::Coh)) {
        (Ok(e), Ok(c)) => (e.params.alpha_b, c.params.alpha_b),
        (e, c) => {
            report("7", false, &format!("section fit failed: ent {:?}, coh {:?}", e.err(), c.err()));
            return false;
        }
    };
    let pass = ent > coh && ent > 14.0 && coh < 14.0;
    report("7", pass, &format!("top-bin section fits, alpha_B(ent section) {ent:.3} vs alpha_B(coherence section) {coh:.3}"));
    pass
}

fn criterion_8() -> bool {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cfg = CampaignConfig {
        n_samples: 10_000,
        seed: 8,
        worker_count: workers,
        coherence_mode: CoherenceMode::ArbitraryBasis,
        ..CampaignConfig::default()
    };
    let out = run_campaign(&cfg).unwrap();
    let low = out.samples.records.iter().filter(|r| r.coherence / 2.0 < 0.84).count();
    let min = out.samples.records.iter().map(|r| r.coherence / 2.0).fold(f64::INFINITY, f64::min);
    let fraction = low as f64 / out.samples.records.len() as f64;
    let pass = fraction <= 0.01;
    report(
        "8",
        pass,
        &format!("10^4 arbitrary-basis campaign, fraction below 0.84 = {fraction:.4} (max 0.01), smallest value {min:.6}"),
    );
    pass
}

fn check(label: &str, ok: bool, failures: &mut Vec<String>) {
    if !ok {
        failures.push(label.to_string());
    }
}

fn criterion_9() -> bool {
    let mut rng = RngState::new(9);
    let mut failures = Vec::new();
    let pb = OptimizerConfig::product_basis();

    let mut theta_ok = true;
    let mut alpha_ok = true;
    for _ in 0..200 {
        let u = haar_sample(&mut rng);
        let b = ProductBasisParams::new(rng.uniform_in(0.0, TAU), rng.uniform_in(0.0, TAU));
        let shifted = ProductBasisParams::new((b.theta + PI) % TAU, b.phi);
        for i in 1..=2 {
            theta_ok &= (stilde(&u, i, &b) - stilde(&u, i, &shifted)).abs() < 1e-9;
        }
        let form = CartanForm {
            ua: random_su2(&mut rng),
            ub: random_su2(&mut rng),
            alpha: CartanParams::new(rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI)),
            va: random_su2(&mut rng),
            vb: random_su2(&mut rng),
        };
        let a = form.alpha.to_array();
        for axis in 0..3 {
            let mut moved = a;
            moved[axis] += PI;
            let g = CartanForm { alpha: CartanParams::from_array(moved), ..form };
            for i in 1..=4 {
                alpha_ok &= (stilde(&form.unitary(), i, &b) - stilde(&g.unitary(), i, &b)).abs() < 1e-9;
            }
        }
    }
    check("theta periodicity of the first two landscapes", theta_ok, &mut failures);
    check("period-pi kernel invariance", alpha_ok, &mut failures);

    let mut s34: f64 = 0.0;
    let mut prime_gap = f64::INFINITY;
    let arbitrary = OptimizerConfig { global_budget: 5000, ..OptimizerConfig::arbitrary_basis() };
    for _ in 0..10 {
        let u = haar_sample(&mut rng);
        let p: ProductCoherence = coherence_power_product(&u, &pb);
        s34 = s34.max((p.per_input[2] - p.per_input[3]).abs());
        let a = coherence_power_arbitrary(&u, &arbitrary, &p);
        prime_gap = prime_gap.min(a.value - p.value);
    }
    check("equal maxima of the third and fourth landscapes", s34 < 5e-3, &mut failures);
    check("arbitrary-basis power dominates product-basis power", prime_gap >= -1e-6, &mut failures);

    let mut ent_local: f64 = 0.0;
    let mut state_local: f64 = 0.0;
    let mut entropies: f64 = 0.0;
    let mut right_coherence: f64 = 0.0;
    for _ in 0..10 {
        let u = haar_sample(&mut rng);
        let (a, b, c, d) = (random_local(&mut rng), random_local(&mut rng), random_local(&mut rng), random_local(&mut rng));
        let dressed = sandwich(&u, Some((&a, &b)), Some((&c, &d)));
        let cfg = OptimizerConfig::product_inputs();
        ent_local = ent_local.max((ent_power_numeric(&u, &cfg).value - ent_power_numeric(&dressed, &cfg).value).abs());

        let right = sandwich(&u, None, Some((&c, &d)));
        right_coherence = right_coherence
            .max((coherence_power_product(&u, &pb).value - coherence_power_product(&right, &pb).value).abs());

        let psi = random_state(&mut rng);
        let moved = psi.evolve(&kron(&a, &b));
        state_local = state_local.max((ent_entropy(&psi) - ent_entropy(&moved)).abs());
        let sa = von_neumann_entropy(gatepower::linalg::herm_eigvals2(&reduced_density(&psi, Subsystem::A)));
        let sb = von_neumann_entropy(gatepower::linalg::herm_eigvals2(&partial_trace(&psi.projector(), Subsystem::B).unwrap()));
        entropies = entropies.max((sa - sb).abs());
    }
    check("local invariance of the entangling power", ent_local < ENT_TOL, &mut failures);
    check("local invariance of state entanglement", state_local < 1e-10, &mut failures);
    check("equal local entropies of pure states", entropies < 1e-10, &mut failures);
    check(
        &format!("right-local invariance of the product-basis coherence power (worst change {right_coherence:.4})"),
        right_coherence < ENT_TOL,
        &mut failures,
    );

    let grids: Vec<_> = [1, 3, 8]
        .iter()
        .map(|&w| run_campaign(&CampaignConfig { n_samples: 64, seed: 99, worker_count: w, ..CampaignConfig::default() }).unwrap().grid)
        .collect();
    check("histogram determinism across worker counts", grids.windows(2).all(|g| g[0] == g[1]), &mut failures);

    let pass = failures.is_empty();
    let detail = if pass {
        "all property suites hold".to_string()
    } else {
        format!("violated: {}", failures.join("; "))
    };
    report("9", pass, &detail);
    pass
}

#[test]
fn acceptance() {
    let results = [
        ("1", criterion_1()),
        ("2", criterion_2()),
        ("3", criterion_3()),
        ("4", criterion_4()),
        ("5", criterion_5()),
        ("6", criterion_6()),
        ("7", criterion_7()),
        ("8", criterion_8()),
        ("9", criterion_9()),
    ];
    let failed: Vec<_> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}
