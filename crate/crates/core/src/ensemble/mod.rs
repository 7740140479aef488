//! Haar-random campaigns: per-sample resource powers, 2-D histograms,
//! cross-sections and beta fits.

mod fit;
mod histogram;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{haar_sample, kak_decompose, CartanForm, CartanParams, RngState, SU2Params, Unitary4};
use crate::power::{
    coherence_power_arbitrary, coherence_power_product, ent_power_closed_form, ent_power_numeric,
    l1_coherence_power, max_ent_region_test, vidal_ent_power, PowerBudgets,
};

pub use fit::{beta_density, default_guess, fit_beta, BetaFitResult, BetaParams};
pub use histogram::{bins_for_width, cross_section, Axis, CrossSection, HistogramGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceMode {
    ProductBasis,
    ArbitraryBasis,
    L1Norm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementMode {
    ClosedForm,
    Numeric,
    Vidal,
}

impl CoherenceMode {
    /// Maps the raw power onto [0, 1] for histogramming.
    pub fn normalize(self, v: f64) -> f64 {
        match self {
            CoherenceMode::ProductBasis | CoherenceMode::ArbitraryBasis => v / 2.0,
            CoherenceMode::L1Norm => v / 3.0,
        }
    }
}

impl EntanglementMode {
    pub fn normalize(self, v: f64) -> f64 {
        match self {
            EntanglementMode::ClosedForm | EntanglementMode::Numeric => v,
            EntanglementMode::Vidal => 2.0 * v,
        }
    }
}

impl fmt::Display for CoherenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoherenceMode::ProductBasis => "product",
            CoherenceMode::ArbitraryBasis => "arbitrary",
            CoherenceMode::L1Norm => "l1",
        })
    }
}

impl fmt::Display for EntanglementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntanglementMode::ClosedForm => "closed",
            EntanglementMode::Numeric => "numeric",
            EntanglementMode::Vidal => "vidal",
        })
    }
}

impl FromStr for CoherenceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "product" | "product_basis" => Ok(CoherenceMode::ProductBasis),
            "arbitrary" | "arbitrary_basis" => Ok(CoherenceMode::ArbitraryBasis),
            "l1" | "l1_norm" => Ok(CoherenceMode::L1Norm),
            _ => Err(Error::InvalidConfig(format!("unknown coherence mode `{s}`"))),
        }
    }
}

impl FromStr for EntanglementMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "closed" | "closed_form" => Ok(EntanglementMode::ClosedForm),
            "numeric" => Ok(EntanglementMode::Numeric),
            "vidal" => Ok(EntanglementMode::Vidal),
            _ => Err(Error::InvalidConfig(format!("unknown entanglement mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub coherence_mode: CoherenceMode,
    pub entanglement_mode: EntanglementMode,
    pub bin_width: f64,
    pub worker_count: usize,
    pub budgets: PowerBudgets,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            n_samples: 1000,
            seed: 0,
            coherence_mode: CoherenceMode::ProductBasis,
            entanglement_mode: EntanglementMode::ClosedForm,
            bin_width: 0.025,
            worker_count: 1,
            budgets: PowerBudgets::default(),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
        }
        if self.worker_count == 0 {
            return Err(Error::InvalidConfig("worker_count must be at least 1".into()));
        }
        bins_for_width(self.bin_width)?;
        self.budgets.validate()
    }
}

/// Everything computed for one Haar draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    /// Kernel coefficients from the KAK form, when it was computed.
    pub kernel: Option<CartanParams>,
    /// Raw entanglement power (ebits, or E₂ in vidal mode).
    pub entanglement: f64,
    /// Raw coherence power (bits, or l1 coherence in l1 mode).
    pub coherence: f64,
    /// Product-basis coherence, kept alongside the arbitrary-basis value.
    pub coherence_product: Option<f64>,
    pub evaluations: usize,
    pub converged: bool,
    pub degenerate_draws: u64,
    /// The closed form was requested but the KAK decomposition failed.
    pub kak_failed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStore {
    pub entanglement_mode: EntanglementMode,
    pub coherence_mode: CoherenceMode,
    pub records: Vec<SampleRecord>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignCounters {
    pub samples: u64,
    pub evaluations: u64,
    pub non_converged: u64,
    pub degenerate_draws: u64,
    pub kak_failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignOutput {
    pub grid: HistogramGrid,
    pub samples: SampleStore,
    pub counters: CampaignCounters,
}

/// Computes the configured powers for draw `index`; the draw depends only
/// on `(seed, index)`.
pub fn evaluate_sample(cfg: &CampaignConfig, index: u64) -> SampleRecord {
    let mut rng = RngState::with_stream(cfg.seed, index);
    let u = haar_sample(&mut rng);
    let b = &cfg.budgets;
    let mut evaluations = 0;
    let mut converged = true;
    let mut kernel = None;
    let mut kak_failed = false;

    let entanglement = match cfg.entanglement_mode {
        EntanglementMode::ClosedForm => match kak_decompose(&u) {
            Ok(k) => {
                kernel = Some(k.alpha);
                ent_power_closed_form(&k.alpha)
            }
            Err(_) => {
                kak_failed = true;
                let opt = ent_power_numeric(&u, &b.product_inputs);
                evaluations += opt.evaluations;
                converged &= opt.converged;
                opt.value
            }
        },
        EntanglementMode::Numeric => {
            let opt = ent_power_numeric(&u, &b.product_inputs);
            evaluations += opt.evaluations;
            converged &= opt.converged;
            opt.value
        }
        EntanglementMode::Vidal => {
            let opt = vidal_ent_power(&u, &b.product_inputs);
            evaluations += opt.evaluations;
            converged &= opt.converged;
            opt.value
        }
    };

    let mut coherence_product = None;
    let coherence = match cfg.coherence_mode {
        CoherenceMode::ProductBasis => {
            let opt = coherence_power_product(&u, &b.product_basis);
            evaluations += opt.evaluations;
            converged &= opt.converged;
            opt.value
        }
        CoherenceMode::ArbitraryBasis => {
            let product = coherence_power_product(&u, &b.product_basis);
            let opt = coherence_power_arbitrary(&u, &b.arbitrary_basis, &product);
            evaluations += product.evaluations + opt.evaluations;
            converged &= opt.converged;
            coherence_product = Some(product.value);
            opt.value
        }
        CoherenceMode::L1Norm => {
            let opt = l1_coherence_power(&u, &b.product_basis);
            evaluations += opt.evaluations;
            converged &= opt.converged;
            opt.value
        }
    };

    SampleRecord {
        index,
        kernel,
        entanglement,
        coherence,
        coherence_product,
        evaluations,
        converged,
        degenerate_draws: rng.degenerate_draws(),
        kak_failed,
    }
}

/// Runs a campaign on `worker_count` threads. The output does not depend on
/// the worker count.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignOutput> {
    cfg.validate()?;
    let n = cfg.n_samples;
    let workers = (cfg.worker_count as u64).min(n) as usize;

    let mut records: Vec<SampleRecord> = if workers == 1 {
        (0..n).map(|i| evaluate_sample(cfg, i)).collect()
    } else {
        let parts: Vec<Vec<SampleRecord>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    s.spawn(move || {
                        (w..n).step_by(workers).map(|i| evaluate_sample(cfg, i)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("campaign worker panicked")).collect()
        });
        parts.into_iter().flatten().collect()
    };
    records.sort_by_key(|r| r.index);

    let samples = SampleStore {
        entanglement_mode: cfg.entanglement_mode,
        coherence_mode: cfg.coherence_mode,
        records,
    };
    let grid = bin_samples(&samples, cfg.bin_width)?;
    let counters = count(&samples);
    Ok(CampaignOutput { grid, samples, counters })
}

/// Histogram of a sample store at any bin width.
pub fn bin_samples(samples: &SampleStore, bin_width: f64) -> Result<HistogramGrid> {
    let mut grid = HistogramGrid::new(bin_width)?;
    for r in &samples.records {
        grid.add(
            samples.entanglement_mode.normalize(r.entanglement),
            samples.coherence_mode.normalize(r.coherence),
        );
    }
    Ok(grid)
}

fn count(samples: &SampleStore) -> CampaignCounters {
    let mut c = CampaignCounters::default();
    for r in &samples.records {
        c.samples += 1;
        c.evaluations += r.evaluations as u64;
        c.non_converged += u64::from(!r.converged);
        c.degenerate_draws += r.degenerate_draws;
        c.kak_failures += u64::from(r.kak_failed);
    }
    c
}

/// Measure pairs that can be exported as scatter data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurePair {
    /// (E_g, C_g/2) over product bases.
    EntProduct,
    /// (E_g, C′_g/2) over arbitrary bases.
    EntArbitrary,
    /// (E₂, l1 coherence power), raw scales.
    VidalL1,
}

impl MeasurePair {
    pub fn label(self) -> &'static str {
        match self {
            MeasurePair::EntProduct => "entanglement/product-basis coherence",
            MeasurePair::EntArbitrary => "entanglement/arbitrary-basis coherence",
            MeasurePair::VidalL1 => "vidal/l1 coherence",
        }
    }
}

impl FromStr for MeasurePair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ent_product" | "product" => Ok(MeasurePair::EntProduct),
            "ent_arbitrary" | "arbitrary" => Ok(MeasurePair::EntArbitrary),
            "vidal_l1" | "l1" => Ok(MeasurePair::VidalL1),
            _ => Err(Error::InvalidConfig(format!("unknown measure pair `{s}`"))),
        }
    }
}

/// (x, y) pairs of the selected measures, in sample order.
pub fn scatter_export(samples: &SampleStore, pair: MeasurePair) -> Result<Vec<(f64, f64)>> {
    let ent_ok = matches!(samples.entanglement_mode, EntanglementMode::ClosedForm | EntanglementMode::Numeric);
    let ok = match pair {
        MeasurePair::EntProduct => {
            ent_ok && matches!(samples.coherence_mode, CoherenceMode::ProductBasis | CoherenceMode::ArbitraryBasis)
        }
        MeasurePair::EntArbitrary => ent_ok && samples.coherence_mode == CoherenceMode::ArbitraryBasis,
        MeasurePair::VidalL1 => {
            samples.entanglement_mode == EntanglementMode::Vidal && samples.coherence_mode == CoherenceMode::L1Norm
        }
    };
    if !ok && !samples.records.is_empty() {
        return Err(Error::MissingMeasure(pair.label()));
    }
    Ok(samples
        .records
        .iter()
        .map(|r| match pair {
            MeasurePair::EntProduct => (r.entanglement, r.coherence_product.unwrap_or(r.coherence) / 2.0),
            MeasurePair::EntArbitrary => (r.entanglement, r.coherence / 2.0),
            MeasurePair::VidalL1 => (r.entanglement, r.coherence),
        })
        .collect())
}

/// Random Cartan form (U_A ⊗ U_B)·U_d with α uniform in [0, π)³ and Haar
/// local angles, redrawn until the kernel lies in the maximal-entanglement
/// region. Returns the form and the number of rejected draws.
pub fn sample_max_entangling(rng: &mut RngState) -> (CartanForm, u64) {
    let mut rejected = 0;
    loop {
        let alpha = CartanParams::new(rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI), rng.uniform_in(0.0, PI));
        if max_ent_region_test(&alpha) {
            let mut su = || {
                // Haar measure on SU(2): cos θ uniform
                let theta = (1.0 - 2.0 * rng.uniform()).acos();
                SU2Params::new(theta, rng.uniform_in(0.0, TAU), rng.uniform_in(0.0, 2.0 * TAU))
            };
            let (ua, ub) = (su(), su());
            let id = SU2Params::identity();
            return (CartanForm { ua, ub, alpha, va: id, vb: id }, rejected);
        }
        rejected += 1;
    }
}

/// Haar-random unitaries; a convenience for callers outside campaigns.
pub fn haar_batch(seed: u64, n: u64) -> Vec<Unitary4> {
    (0..n).map(|i| haar_sample(&mut RngState::with_stream(seed, i))).collect()
}
