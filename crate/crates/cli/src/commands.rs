use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use gatepower::ensemble::{
    bin_samples, cross_section, fit_beta, run_campaign, sample_max_entangling, scatter_export, Axis, BetaParams,
    CampaignConfig, CoherenceMode, CrossSection, EntanglementMode, MeasurePair,
};
use gatepower::power::{coherence_power_product, resource_report, stilde, PowerBudgets, ResourceReport};
use gatepower::{
    CartanForm, CartanParams, NamedGate, ProductBasisParams, RngState, SU2Params, Unitary4,
};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::io::*;
use crate::spec::{parse_numbers, GateSpec};

/// Coherence counted as maximal within this distance of 1 (normalized).
const MAXIMAL_TOL: f64 = 5e-3;

/// Normalized coherence below which Haar samples are reported as rare.
const LOW_COHERENCE: f64 = 0.84;

/// Config-file defaults; explicit flags always win.
#[derive(Debug, Default)]
pub struct Defaults(BTreeMap<String, String>);

impl Defaults {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Defaults::default()),
            Some(p) => Ok(Defaults(parse_config(&std::fs::read_to_string(p)?)?)),
        }
    }

    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Parse(format!("config value `{v}` for `{key}` is invalid"))),
        }
    }

    fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.0.get(key).cloned())
    }

    fn gate(&self, g: &GateArgs) -> GateArgs {
        GateArgs {
            gate: self.string(&g.gate, "gate"),
            matrix: self.string(&g.matrix, "matrix"),
            cartan: self.string(&g.cartan, "cartan"),
        }
    }

    fn budgets(&self, b: &BudgetArgs) -> CliResult<PowerBudgets> {
        let mut out = PowerBudgets::default();
        if let Some(n) = self.pick(b.product_budget, "product-budget")? {
            out.product_basis.global_budget = n;
        }
        if let Some(n) = self.pick(b.arbitrary_budget, "arbitrary-budget")? {
            out.arbitrary_basis.global_budget = n;
        }
        if let Some(n) = self.pick(b.input_budget, "input-budget")? {
            out.product_inputs.global_budget = n;
        }
        if let Some(n) = self.pick(b.restarts, "restarts")? {
            for cfg in [&mut out.product_basis, &mut out.arbitrary_basis, &mut out.product_inputs] {
                cfg.local_restarts = n;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

fn prepare_out(out: Option<&PathBuf>) -> CliResult<Option<PathBuf>> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    Ok(out.cloned())
}

fn create(dir: &Path, name: &str, manifest: &mut RunManifest) -> CliResult<BufWriter<File>> {
    manifest.outputs.push(name.to_string());
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let defaults = Defaults::load(cli.config.as_deref())?;
    match cli.command {
        Command::GateReport(a) => gate_report(&a, &defaults),
        Command::Scan(a) => scan(&a, &defaults),
        Command::Campaign(a) => campaign(&a, &defaults),
        Command::Fit(a) => fit(&a, &defaults),
        Command::Export(a) => export(&a, &defaults),
    }
}

#[derive(Serialize)]
struct GateReportEntry {
    gate: String,
    report: ResourceReport,
}

const REPORT_HEADER: &str = "gate        E_g     C~_g    C_g     C~'_g   E2_g    Cl1_g   E_g(kak)";

fn report_row(label: &str, r: &ResourceReport) -> String {
    format!(
        "{:<11} {:<7} {:<7} {:<7} {:<7} {:<7} {:<7} {}",
        label,
        format_sig4(r.e_g),
        format_sig4(r.c_g_norm),
        format_sig4(r.c_g),
        format_sig4(r.c_g_prime / 2.0),
        format_sig4(r.e_g_vidal),
        format_sig4(r.c_g_l1),
        format_sig4(r.e_g_closed_form),
    )
}

pub fn gate_report(a: &GateReportArgs, d: &Defaults) -> CliResult<()> {
    let start = Instant::now();
    let budgets = d.budgets(&a.budgets)?;
    let gate = d.gate(&a.gate);
    let specs: Vec<GateSpec> = if gate.gate.as_deref().map(|g| g.eq_ignore_ascii_case("all")) == Some(true) {
        if gate.matrix.is_some() || gate.cartan.is_some() {
            return Err(CliError::Usage("--gate all cannot be combined with --matrix or --cartan".into()));
        }
        NamedGate::ALL.iter().map(|&g| GateSpec::Named(g)).collect()
    } else {
        vec![GateSpec::from_flags(gate.gate.as_deref(), gate.matrix.as_deref(), gate.cartan.as_deref())?]
    };
    let units: Vec<(String, Unitary4)> =
        specs.iter().map(|s| Ok((s.label(), s.unitary()?))).collect::<CliResult<_>>()?;

    println!("{REPORT_HEADER}");
    let mut entries = Vec::new();
    for (label, u) in units {
        let report = resource_report(&u, &budgets)?;
        println!("{}", report_row(&label, &report));
        entries.push(GateReportEntry { gate: label, report });
    }

    if let Some(dir) = prepare_out(a.out.as_ref())? {
        let mut manifest = RunManifest::new("gate-report", json!({ "gate": gate.gate, "matrix": gate.matrix, "cartan": gate.cartan, "budgets": budgets }), None);
        manifest.counters.samples = entries.len() as u64;
        manifest.counters.optimizer_evaluations = entries.iter().map(|e| e.report.evaluations as u64).sum();
        manifest.counters.non_converged = entries.iter().map(|e| e.report.non_converged as u64).sum();
        manifest.outputs.push("report.json".into());
        write_json(&dir.join("report.json"), &json!({ "manifest": MANIFEST_FILE, "gates": entries }))?;
        manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
        manifest.write(&dir)?;
    }
    Ok(())
}

fn random_su2(rng: &mut RngState) -> SU2Params {
    let theta = (1.0 - 2.0 * rng.uniform()).acos();
    SU2Params::new(theta, rng.uniform_in(0.0, std::f64::consts::TAU), rng.uniform_in(0.0, 4.0 * std::f64::consts::PI))
}

pub fn scan(a: &ScanArgs, d: &Defaults) -> CliResult<()> {
    use std::f64::consts::{PI, TAU};
    let start = Instant::now();
    let budgets = d.budgets(&a.budgets)?;
    let seed = d.pick(a.seed, "seed")?.unwrap_or(0);
    let (name, header, rows, counters): (&str, Vec<&str>, Vec<Vec<f64>>, ManifestCounters) = match a.kind {
        ScanKind::StildeSurface => {
            let gate = d.gate(&a.gate);
            let u = GateSpec::from_flags(gate.gate.as_deref(), gate.matrix.as_deref(), gate.cartan.as_deref())?
                .unitary()?;
            let n = d.pick(a.resolution, "resolution")?.unwrap_or(64).max(2);
            let mut rows = Vec::with_capacity(n * n);
            for i in 0..n {
                let theta = PI * i as f64 / (n - 1) as f64;
                for j in 0..n {
                    let phi = TAU * j as f64 / n as f64;
                    let b = ProductBasisParams::new(theta, phi);
                    let mut row = vec![theta, phi];
                    row.extend((1..=4).map(|k| stilde(&u, k, &b)));
                    rows.push(row);
                }
            }
            let smax = (0..4).map(|k| rows.iter().map(|r| r[2 + k]).fold(0.0, f64::max)).collect::<Vec<_>>();
            println!("stilde surface: {} points, maxima S1..S4 = {:?}", rows.len(), smax.iter().map(|v| format_sig4(*v)).collect::<Vec<_>>());
            let c = ManifestCounters { samples: rows.len() as u64, optimizer_evaluations: 0, non_converged: 0 };
            ("stilde_surface.csv", vec!["theta", "phi", "s1", "s2", "s3", "s4"], rows, c)
        }
        ScanKind::AlphaRegion => {
            let n = d.pick(a.resolution, "resolution")?.unwrap_or(8).max(1);
            let mut rows = Vec::with_capacity(n * n * n);
            let mut evals = 0u64;
            let mut nonconv = 0u64;
            let mut cell = 0u64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let alpha = CartanParams::new(PI * i as f64 / n as f64, PI * j as f64 / n as f64, PI * k as f64 / n as f64);
                        let id = SU2Params::identity();
                        let form = if a.identity_locals {
                            CartanForm::kernel_only(alpha)
                        } else {
                            let mut rng = RngState::with_stream(seed, cell);
                            CartanForm { ua: random_su2(&mut rng), ub: random_su2(&mut rng), alpha, va: id, vb: id }
                        };
                        cell += 1;
                        let r = coherence_power_product(&form.unitary(), &budgets.product_basis);
                        evals += r.evaluations as u64;
                        nonconv += u64::from(!r.converged);
                        let norm = r.value / 2.0;
                        let maximal = if norm >= 1.0 - MAXIMAL_TOL { 1.0 } else { 0.0 };
                        rows.push(vec![alpha.ax, alpha.ay, alpha.az, norm, maximal]);
                    }
                }
            }
            let hits = rows.iter().filter(|r| r[4] == 1.0).count();
            println!("alpha region: {hits} of {} kernels reach maximal coherence", rows.len());
            let c = ManifestCounters { samples: rows.len() as u64, optimizer_evaluations: evals, non_converged: nonconv };
            ("alpha_region.csv", vec!["ax", "ay", "az", "c_g_norm", "maximal"], rows, c)
        }
        ScanKind::MaxEntCoherence => {
            let n = d.pick(a.samples, "samples")?.unwrap_or(1000);
            let mut rows = Vec::new();
            let mut evals = 0u64;
            let mut nonconv = 0u64;
            let mut rejected = 0u64;
            for i in 0..n {
                let mut rng = RngState::with_stream(seed, i);
                let (form, rej) = sample_max_entangling(&mut rng);
                rejected += rej;
                let r = coherence_power_product(&form.unitary(), &budgets.product_basis);
                evals += r.evaluations as u64;
                nonconv += u64::from(!r.converged);
                let al = form.alpha;
                rows.push(vec![al.ax, al.ay, al.az, r.basis.theta, r.basis.phi, r.index as f64, r.value / 2.0]);
            }
            let hits = rows.iter().filter(|r| r[6] >= 1.0 - MAXIMAL_TOL).count();
            println!(
                "maximal entanglers: {n} sampled ({rejected} rejected draws), {hits} reach maximal coherence"
            );
            let c = ManifestCounters { samples: n, optimizer_evaluations: evals, non_converged: nonconv };
            ("max_ent_coherence.csv", vec!["ax", "ay", "az", "theta", "phi", "index", "c_g_norm"], rows, c)
        }
    };
    if let Some(dir) = prepare_out(a.out.as_ref())? {
        let kind = format!("{:?}", a.kind);
        let mut manifest = RunManifest::new("scan", json!({ "kind": kind, "resolution": a.resolution, "samples": a.samples, "identity_locals": a.identity_locals, "gate": a.gate.gate, "matrix": a.gate.matrix, "cartan": a.gate.cartan, "budgets": budgets }), Some(seed));
        manifest.counters = counters;
        let w = create(&dir, name, &mut manifest)?;
        write_table(w, &header, &rows, Some(MANIFEST_FILE))?;
        manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
        manifest.write(&dir)?;
    }
    Ok(())
}

pub fn campaign_config(a: &CampaignArgs, d: &Defaults) -> CliResult<CampaignConfig> {
    let base = CampaignConfig::default();
    let coherence_mode = match d.pick(a.coherence_mode.clone(), "coherence-mode")? {
        Some(s) => s.parse::<CoherenceMode>()?,
        None => base.coherence_mode,
    };
    let entanglement_mode = match d.pick(a.ent_mode.clone(), "ent-mode")? {
        Some(s) => s.parse::<EntanglementMode>()?,
        None => base.entanglement_mode,
    };
    let cfg = CampaignConfig {
        n_samples: d.pick(a.samples, "samples")?.unwrap_or(base.n_samples),
        seed: d.pick(a.seed, "seed")?.unwrap_or(base.seed),
        coherence_mode,
        entanglement_mode,
        bin_width: d.pick(a.bin_width, "bin-width")?.unwrap_or(base.bin_width),
        worker_count: d.pick(a.workers, "workers")?.unwrap_or(base.worker_count),
        budgets: d.budgets(&a.budgets)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn campaign(a: &CampaignArgs, d: &Defaults) -> CliResult<()> {
    let start = Instant::now();
    let cfg = campaign_config(a, d)?;
    let out = run_campaign(&cfg)?;
    let (mx, my) = out.grid.modal_bin();
    let w = out.grid.bin_width();
    let edge = |k: usize| format_sig4(k as f64 * w);
    println!("samples: {}", out.counters.samples);
    println!(
        "modal bin: [{}, {}] x [{}, {}]  nu = {}",
        edge(mx),
        edge(mx + 1),
        edge(my),
        edge(my + 1),
        format_sig4(out.grid.nu(mx, my))
    );
    let low = out.samples.records.iter().filter(|r| cfg.coherence_mode.normalize(r.coherence) < LOW_COHERENCE).count();
    println!(
        "fraction with normalized coherence below {LOW_COHERENCE}: {}",
        format_sig4(low as f64 / out.samples.records.len().max(1) as f64)
    );
    println!("sum of nu: {}", out.grid.nu_sum());
    println!("non-converged searches: {}", out.counters.non_converged);

    if let Some(dir) = prepare_out(a.out.as_ref())? {
        let mut manifest = RunManifest::new("campaign", serde_json::to_value(cfg)?, Some(cfg.seed));
        manifest.counters = out.counters.into();
        write_histogram_csv(create(&dir, "histogram.csv", &mut manifest)?, &out.grid, Some(MANIFEST_FILE))?;
        write_samples_csv(create(&dir, "samples.csv", &mut manifest)?, &out.samples, Some(MANIFEST_FILE))?;
        manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
        manifest.write(&dir)?;
    }
    Ok(())
}

fn resolve(input: &Path, file: &str) -> PathBuf {
    if input.is_dir() {
        input.join(file)
    } else {
        input.to_path_buf()
    }
}

fn beta_params(s: &str) -> CliResult<BetaParams> {
    let v = parse_numbers(s)?;
    let arr: [f64; 5] =
        v.try_into().map_err(|_| CliError::Parse("beta parameters need 5 numbers: alpha,beta,d,x0,h".into()))?;
    Ok(BetaParams::from_array(arr))
}

pub fn fit(a: &FitArgs, d: &Defaults) -> CliResult<()> {
    let start = Instant::now();
    let axis = match a.axis {
        AxisArg::Ent => Axis::Ent,
        AxisArg::Coh => Axis::Coh,
    };
    let (section, source): (CrossSection, String) = match (&a.input, &a.synthetic) {
        (Some(input), None) => {
            let path = resolve(input, "histogram.csv");
            let grid = read_histogram_csv(BufReader::new(File::open(&path)?))?;
            let bin = d.pick(a.bin, "bin")?.unwrap_or(grid.bins().saturating_sub(1));
            (cross_section(&grid, axis, bin)?, path.display().to_string())
        }
        (None, Some(s)) => {
            let truth = beta_params(s)?;
            let points = (0..40).map(|k| (k as f64 + 0.5) / 40.0).map(|x| (x, truth.eval(x))).collect();
            (CrossSection { fixed_axis: axis, fixed_bin: 39, points }, format!("synthetic({s})"))
        }
        _ => return Err(CliError::Usage("fit needs exactly one of --input or --synthetic".into())),
    };
    let init = a.init.as_deref().map(beta_params).transpose()?;
    let result = fit_beta(&section, init);

    match &result {
        Ok(f) => {
            let p = f.params;
            println!("alpha_B = {} (± {})", p.alpha_b, f.ci95[0]);
            println!("beta_B  = {} (± {})", p.beta_b, f.ci95[1]);
            println!("d       = {} (± {})", p.d, f.ci95[2]);
            println!("x0      = {} (± {})", p.x0, f.ci95[3]);
            println!("h       = {} (± {})", p.h, f.ci95[4]);
            println!("chi2    = {}  converged: {}", f.chi2, f.converged);
        }
        Err(e) => eprintln!("fit failed: {e}"),
    }

    if let Some(dir) = prepare_out(a.out.as_ref())? {
        let mut manifest = RunManifest::new("fit", json!({ "source": source, "axis": axis, "bin": section.fixed_bin, "init": init }), None);
        manifest.counters.samples = section.points.len() as u64;
        let body = match &result {
            Ok(f) => json!({ "manifest": MANIFEST_FILE, "source": source, "axis": axis, "bin": section.fixed_bin,
                "params": f.params, "chi2": f.chi2, "chi2_kind": "sum of squared residuals",
                "ci95": { "alpha_b": f.ci95[0], "beta_b": f.ci95[1], "d": f.ci95[2], "x0": f.ci95[3], "h": f.ci95[4] },
                "converged": f.converged, "iterations": f.iterations }),
            Err(e) => json!({ "manifest": MANIFEST_FILE, "source": source, "axis": axis, "bin": section.fixed_bin,
                "error": e.to_string(), "converged": false }),
        };
        manifest.outputs.push("fit.json".into());
        write_json(&dir.join("fit.json"), &body)?;
        if let Ok(f) = &result {
            manifest.counters.non_converged = u64::from(!f.converged);
            let rows: Vec<Vec<f64>> = section.points.iter().map(|&(x, nu)| vec![x, nu, f.params.eval(x)]).collect();
            write_table(create(&dir, "fit_curve.csv", &mut manifest)?, &["x", "nu", "fitted"], &rows, Some(MANIFEST_FILE))?;
        }
        write_section_csv(create(&dir, "section.csv", &mut manifest)?, &section, Some(MANIFEST_FILE))?;
        manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
        manifest.write(&dir)?;
    }
    result.map(|_| ()).map_err(CliError::from)
}

pub fn export(a: &ExportArgs, d: &Defaults) -> CliResult<()> {
    let start = Instant::now();
    let path = resolve(&a.input, "samples.csv");
    let store = read_samples_csv(BufReader::new(File::open(&path)?))?;
    let pair = match a.pair {
        Some(PairArg::EntProduct) => MeasurePair::EntProduct,
        Some(PairArg::EntArbitrary) => MeasurePair::EntArbitrary,
        Some(PairArg::VidalL1) => MeasurePair::VidalL1,
        None => match (store.entanglement_mode, store.coherence_mode) {
            (EntanglementMode::Vidal, CoherenceMode::L1Norm) => MeasurePair::VidalL1,
            (_, CoherenceMode::ArbitraryBasis) => MeasurePair::EntArbitrary,
            _ => MeasurePair::EntProduct,
        },
    };
    let points = scatter_export(&store, pair)?;
    println!("{} points ({})", points.len(), pair.label());
    let bin_width = d.pick(a.bin_width, "bin-width")?;
    let grid = bin_width.map(|w| bin_samples(&store, w)).transpose()?;

    if let Some(dir) = prepare_out(a.out.as_ref())? {
        let mut manifest = RunManifest::new("export", json!({ "input": path.display().to_string(), "pair": pair, "bin_width": bin_width }), None);
        manifest.counters.samples = points.len() as u64;
        let rows: Vec<Vec<f64>> = points.iter().map(|&(x, y)| vec![x, y]).collect();
        write_table(create(&dir, "scatter.csv", &mut manifest)?, &["x", "y"], &rows, Some(MANIFEST_FILE))?;
        if let Some(g) = &grid {
            write_histogram_csv(create(&dir, "histogram.csv", &mut manifest)?, g, Some(MANIFEST_FILE))?;
        }
        manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
        manifest.write(&dir)?;
    } else {
        let mut stdout = std::io::stdout().lock();
        for (x, y) in points {
            writeln!(stdout, "{x},{y}")?;
        }
    }
    Ok(())
}

