use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square 2-D histogram on [0,1]², x = entanglement axis, y = coherence axis.
///
/// Bins are half-open, [k·w, (k+1)·w), except the last one which also takes
/// the value 1. Values a rounding error outside [0,1] are clamped in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramGrid {
    bins: usize,
    /// Row-major, `counts[x * bins + y]`.
    counts: Vec<u64>,
    total: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Entanglement is held fixed; the section runs along coherence.
    Ent,
    /// Coherence is held fixed; the section runs along entanglement.
    Coh,
}

/// Number of bins per axis for a bin width that must tile [0,1] exactly.
pub fn bins_for_width(bin_width: f64) -> Result<usize> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::InvalidConfig(format!("bin width {bin_width} outside (0, 1]")));
    }
    let n = (1.0 / bin_width).round();
    if (n * bin_width - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!("bin width {bin_width} does not divide 1 evenly")));
    }
    Ok(n as usize)
}

impl HistogramGrid {
    pub fn new(bin_width: f64) -> Result<Self> {
        Ok(Self::with_bins(bins_for_width(bin_width)?))
    }

    pub fn with_bins(bins: usize) -> Self {
        assert!(bins > 0);
        HistogramGrid { bins, counts: vec![0; bins * bins], total: 0 }
    }

    /// Rebuilds a grid from row-major counts.
    pub fn from_counts(bins: usize, counts: Vec<u64>) -> Result<Self> {
        if bins == 0 || counts.len() != bins * bins {
            return Err(Error::InvalidConfig(format!("{} counts do not form a {bins}×{bins} grid", counts.len())));
        }
        let total = counts.iter().sum();
        Ok(HistogramGrid { bins, counts, total })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.bins as f64
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin_index(&self, v: f64) -> usize {
        let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        ((v * self.bins as f64).floor() as usize).min(self.bins - 1)
    }

    pub fn center(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / self.bins as f64
    }

    pub fn add(&mut self, x: f64, y: f64) {
        let (i, j) = (self.bin_index(x), self.bin_index(y));
        self.counts[i * self.bins + j] += 1;
        self.total += 1;
    }

    pub fn count(&self, x_bin: usize, y_bin: usize) -> u64 {
        self.counts[x_bin * self.bins + y_bin]
    }

    /// Relative frequency of a cell; 0 for an empty grid.
    pub fn nu(&self, x_bin: usize, y_bin: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(x_bin, y_bin) as f64 / self.total as f64
        }
    }

    pub fn merge(&mut self, other: &HistogramGrid) -> Result<()> {
        if other.bins != self.bins {
            return Err(Error::InvalidConfig("cannot merge grids of different resolution".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    /// Cell with the largest count; ties go to the lowest (x, y).
    pub fn modal_bin(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = k;
            }
        }
        (best / self.bins, best % self.bins)
    }

    pub fn nu_sum(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.bins {
            for j in 0..self.bins {
                acc += self.nu(i, j);
            }
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub fixed_axis: Axis,
    pub fixed_bin: usize,
    /// (bin center along the free axis, relative frequency)
    pub points: Vec<(f64, f64)>,
}

impl CrossSection {
    pub fn nonzero(&self) -> usize {
        self.points.iter().filter(|p| p.1 > 0.0).count()
    }
}

/// Relative frequencies along the row or column through `bin`.
pub fn cross_section(grid: &HistogramGrid, axis: Axis, bin: usize) -> Result<CrossSection> {
    if bin >= grid.bins {
        return Err(Error::IndexOutOfRange { index: bin, len: grid.bins });
    }
    let points = (0..grid.bins)
        .map(|k| {
            let nu = match axis {
                Axis::Ent => grid.nu(bin, k),
                Axis::Coh => grid.nu(k, bin),
            };
            (grid.center(k), nu)
        })
        .collect();
    Ok(CrossSection { fixed_axis: axis, fixed_bin: bin, points })
}
