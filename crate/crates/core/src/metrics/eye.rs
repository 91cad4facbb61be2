use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Phase x voltage histogram of DFE-corrected data-sampler inputs, kept per
/// transmitted symbol so the vertical opening can be read back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EyeDiagram {
    pub phase_bins: usize,
    pub v_bins: usize,
    /// Histogram covers `[-v_range, v_range)`.
    pub v_range: f64,
    /// Phase axis covers `[phase_lo, phase_lo + 1)` UI.
    pub phase_lo: f64,
    /// Counts for symbol +1 then -1, row-major `[class][phase][v]`.
    counts: Vec<u64>,
}

impl EyeDiagram {
    pub fn new(phase_bins: usize, v_bins: usize, v_range: f64, phase_lo: f64) -> Self {
        assert!(phase_bins > 0 && v_bins > 0 && v_range > 0.0);
        Self {
            phase_bins,
            v_bins,
            v_range,
            phase_lo,
            counts: vec![0; 2 * phase_bins * v_bins],
        }
    }

    pub fn v_bin_width(&self) -> f64 {
        2.0 * self.v_range / self.v_bins as f64
    }

    pub fn phase_bin(&self, phase: f64) -> usize {
        let x = (phase - self.phase_lo).rem_euclid(1.0);
        ((x * self.phase_bins as f64) as usize).min(self.phase_bins - 1)
    }

    fn v_bin(&self, v: f64) -> usize {
        let x = ((v + self.v_range) / self.v_bin_width()).floor();
        x.clamp(0.0, (self.v_bins - 1) as f64) as usize
    }

    fn idx(&self, class: usize, pb: usize, vb: usize) -> usize {
        (class * self.phase_bins + pb) * self.v_bins + vb
    }

    /// Record one sample of transmitted symbol `bit` at `phase` UI.
    pub fn add(&mut self, phase: f64, v: f64, bit: i8) {
        let class = usize::from(bit < 0);
        let i = self.idx(class, self.phase_bin(phase), self.v_bin(v));
        self.counts[i] += 1;
    }

    pub fn count(&self, bit: i8, phase_bin: usize, v_bin: usize) -> u64 {
        self.counts[self.idx(usize::from(bit < 0), phase_bin, v_bin)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Combine two diagrams with identical binning.
    pub fn merge(&mut self, other: &EyeDiagram) -> Result<()> {
        if (self.phase_bins, self.v_bins) != (other.phase_bins, other.v_bins)
            || self.v_range != other.v_range
            || self.phase_lo != other.phase_lo
        {
            return Err(Error::Config("eye diagrams with different binning".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// Rows of `(phase_ui, v_volts, count_plus, count_minus)` at bin centres,
    /// skipping empty cells.
    pub fn cells(&self) -> Vec<(f64, f64, u64, u64)> {
        let mut out = Vec::new();
        for pb in 0..self.phase_bins {
            for vb in 0..self.v_bins {
                let (p, m) = (self.counts[self.idx(0, pb, vb)], self.counts[self.idx(1, pb, vb)]);
                if p + m > 0 {
                    let phase = self.phase_lo + (pb as f64 + 0.5) / self.phase_bins as f64;
                    let v = -self.v_range + (vb as f64 + 0.5) * self.v_bin_width();
                    out.push((phase, v, p, m));
                }
            }
        }
        out
    }
}

/// Vertical opening at `phase`: lower edge of the innermost populated bin of
/// the +1 class minus the upper edge of the innermost populated bin of the
/// -1 class. Up to `ber_floor` of each class may be discarded as outliers.
pub fn measure_vem(eye: &EyeDiagram, phase: f64, ber_floor: f64) -> Result<f64> {
    let pb = eye.phase_bin(phase);
    let col = |bit: i8| (0..eye.v_bins).map(move |vb| eye.count(bit, pb, vb));
    let n_plus: u64 = col(1).sum();
    let n_minus: u64 = col(-1).sum();
    if n_plus == 0 || n_minus == 0 {
        return Err(Error::Empty("eye column"));
    }
    let skip = |n: u64| (ber_floor * n as f64).floor() as u64;
    let w = eye.v_bin_width();
    // +1 class from the bottom
    let mut seen = 0;
    let mut lo_plus = 0;
    for (vb, c) in col(1).enumerate() {
        seen += c;
        if seen > skip(n_plus) {
            lo_plus = vb;
            break;
        }
    }
    let mut seen = 0;
    let mut hi_minus = 0;
    for (vb, c) in col(-1).enumerate().collect::<Vec<_>>().into_iter().rev() {
        seen += c;
        if seen > skip(n_minus) {
            hi_minus = vb;
            break;
        }
    }
    let lo = -eye.v_range + lo_plus as f64 * w;
    let hi = -eye.v_range + (hi_minus + 1) as f64 * w;
    Ok(lo - hi)
}
