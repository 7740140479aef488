//! CSV and JSON persistence, run manifests and number formatting.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use gatepower::ensemble::{
    CampaignCounters, CoherenceMode, CrossSection, EntanglementMode, HistogramGrid, SampleRecord, SampleStore,
};
use gatepower::CartanParams;

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Below this magnitude a value is printed as zero; it is round-off, not signal.
pub const DISPLAY_ZERO: f64 = 1e-12;

/// Renders `v` with four significant figures: 1 → "1.000", 0.5 → "0.5000".
pub fn format_sig4(v: f64) -> String {
    if v.abs() < DISPLAY_ZERO || !v.is_finite() {
        return if v.is_finite() { "0.000".to_string() } else { v.to_string() };
    }
    let mut decimals = 3 - v.abs().log10().floor() as i32;
    // rounding can carry into a new leading digit (0.99996 → 1.000)
    let rounded: f64 = format!("{:.*}", decimals.max(0) as usize, v).parse().unwrap_or(v);
    if rounded != 0.0 {
        decimals = 3 - rounded.abs().log10().floor() as i32;
    }
    format!("{:.*}", decimals.max(0) as usize, v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestCounters {
    pub samples: u64,
    pub optimizer_evaluations: u64,
    pub non_converged: u64,
}

impl From<CampaignCounters> for ManifestCounters {
    fn from(c: CampaignCounters) -> Self {
        ManifestCounters { samples: c.samples, optimizer_evaluations: c.evaluations, non_converged: c.non_converged }
    }
}

/// Record of one invocation; every output file names the manifest that
/// produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
    pub counters: ManifestCounters,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            args: std::env::args().collect(),
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: 0.0,
            counters: ManifestCounters { samples: 0, optimizer_evaluations: 0, non_converged: 0 },
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        write_json(&dir.join(MANIFEST_FILE), self)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

fn manifest_line<W: Write>(w: &mut W, manifest: Option<&str>) -> CliResult<()> {
    if let Some(m) = manifest {
        writeln!(w, "# manifest: {m}")?;
    }
    Ok(())
}

/// Writes every cell of the grid, one per row.
pub fn write_histogram_csv<W: Write>(mut w: W, grid: &HistogramGrid, manifest: Option<&str>) -> CliResult<()> {
    manifest_line(&mut w, manifest)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x_bin", "y_bin", "x_center", "y_center", "count", "nu"])?;
    for i in 0..grid.bins() {
        for j in 0..grid.bins() {
            out.write_record([
                i.to_string(),
                j.to_string(),
                grid.center(i).to_string(),
                grid.center(j).to_string(),
                grid.count(i, j).to_string(),
                grid.nu(i, j).to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, k: usize, name: &str) -> CliResult<T> {
    rec.get(k)
        .ok_or_else(|| CliError::Parse(format!("missing column `{name}`")))?
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad value in column `{name}`: {:?}", rec.get(k))))
}

pub fn read_histogram_csv<R: Read>(r: R) -> CliResult<HistogramGrid> {
    let mut cells = Vec::new();
    for rec in reader(r).records() {
        let rec = rec?;
        let i: usize = field(&rec, 0, "x_bin")?;
        let j: usize = field(&rec, 1, "y_bin")?;
        let count: u64 = field(&rec, 4, "count")?;
        cells.push((i, j, count));
    }
    let bins = cells.iter().map(|c| c.0.max(c.1) + 1).max().unwrap_or(0);
    let mut counts = vec![0u64; bins * bins];
    for (i, j, count) in cells {
        counts[i * bins + j] = count;
    }
    Ok(HistogramGrid::from_counts(bins, counts)?)
}

const SAMPLE_HEADER: [&str; 11] = [
    "index",
    "entanglement",
    "coherence",
    "coherence_product",
    "ax",
    "ay",
    "az",
    "evaluations",
    "converged",
    "degenerate_draws",
    "kak_failed",
];

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Raw per-sample records; the measure modes travel in a comment line.
pub fn write_samples_csv<W: Write>(mut w: W, store: &SampleStore, manifest: Option<&str>) -> CliResult<()> {
    manifest_line(&mut w, manifest)?;
    writeln!(w, "# entanglement_mode={} coherence_mode={}", store.entanglement_mode, store.coherence_mode)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SAMPLE_HEADER)?;
    for r in &store.records {
        let k = r.kernel.map(|k| k.to_array());
        out.write_record([
            r.index.to_string(),
            r.entanglement.to_string(),
            r.coherence.to_string(),
            opt_f64(r.coherence_product),
            opt_f64(k.map(|a| a[0])),
            opt_f64(k.map(|a| a[1])),
            opt_f64(k.map(|a| a[2])),
            r.evaluations.to_string(),
            r.converged.to_string(),
            r.degenerate_draws.to_string(),
            r.kak_failed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(r: R) -> CliResult<SampleStore> {
    let mut buf = std::io::BufReader::new(r);
    let mut modes = None;
    let mut body = String::new();
    let mut line = String::new();
    while buf.read_line(&mut line)? > 0 {
        if let Some(rest) = line.trim().strip_prefix('#') {
            let kv: BTreeMap<&str, &str> = rest.split_whitespace().filter_map(|t| t.split_once('=')).collect();
            if let (Some(e), Some(c)) = (kv.get("entanglement_mode"), kv.get("coherence_mode")) {
                modes = Some((e.parse::<EntanglementMode>()?, c.parse::<CoherenceMode>()?));
            }
        } else {
            body.push_str(&line);
        }
        line.clear();
    }
    let (entanglement_mode, coherence_mode) =
        modes.ok_or_else(|| CliError::Parse("sample file lacks the measure-mode comment line".into()))?;

    let opt = |rec: &csv::StringRecord, k: usize, name: &str| -> CliResult<Option<f64>> {
        match rec.get(k).map(str::trim) {
            None | Some("") => Ok(None),
            Some(_) => field(rec, k, name).map(Some),
        }
    };
    let mut records = Vec::new();
    for rec in reader(body.as_bytes()).records() {
        let rec = rec?;
        let kernel = match (opt(&rec, 4, "ax")?, opt(&rec, 5, "ay")?, opt(&rec, 6, "az")?) {
            (Some(x), Some(y), Some(z)) => Some(CartanParams::new(x, y, z)),
            _ => None,
        };
        records.push(SampleRecord {
            index: field(&rec, 0, "index")?,
            entanglement: field(&rec, 1, "entanglement")?,
            coherence: field(&rec, 2, "coherence")?,
            coherence_product: opt(&rec, 3, "coherence_product")?,
            kernel,
            evaluations: field(&rec, 7, "evaluations")?,
            converged: field(&rec, 8, "converged")?,
            degenerate_draws: field(&rec, 9, "degenerate_draws")?,
            kak_failed: field(&rec, 10, "kak_failed")?,
        });
    }
    Ok(SampleStore { entanglement_mode, coherence_mode, records })
}

/// Generic numeric table with a header row.
pub fn write_table<W: Write>(mut w: W, header: &[&str], rows: &[Vec<f64>], manifest: Option<&str>) -> CliResult<()> {
    manifest_line(&mut w, manifest)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row.iter().map(|v| v.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_section_csv<W: Write>(w: W, section: &CrossSection, manifest: Option<&str>) -> CliResult<()> {
    let rows: Vec<Vec<f64>> = section.points.iter().map(|&(x, nu)| vec![x, nu]).collect();
    write_table(w, &["x", "nu"], &rows, manifest)
}

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("config line {}: expected key=value", n + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}
