use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MIN_SPECTRUM_LEN: usize = 1 << 14;
/// Bins on each side of a peak lumped into one tone (Hann main lobe).
const CLUSTER: usize = 2;
/// A cluster counts as a spur when its peak bin clears the median bin by this much.
const SPUR_THRESHOLD_DB: f64 = 10.0;
/// Bins below this are FFT round-off, never spurs.
const NUMERIC_FLOOR_DBC: f64 = -200.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spur {
    pub freq_hz: f64,
    /// Cluster power relative to the carrier cluster.
    pub dbc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpectrum {
    /// Bin frequencies from -fs/2 upward.
    pub freqs: Vec<f64>,
    /// Per-bin power relative to the carrier cluster.
    pub power_dbc: Vec<f64>,
    /// Detected spurs, strongest first.
    pub spurs: Vec<Spur>,
    pub integrated_spur_dbc: f64,
    /// Median bin level, dBc.
    pub noise_floor_dbc: f64,
    /// Bandwidth the spur integration covered (one side), Hz.
    pub integration_bw_hz: f64,
    /// Windowed-spectrum energy minus windowed-signal energy, dB.
    pub parseval_error_db: f64,
}

impl PhaseSpectrum {
    pub fn dominant(&self) -> Option<Spur> {
        self.spurs.first().copied()
    }

    /// Level of the strongest bin within `tol_hz` of `freq_hz`, dBc.
    pub fn level_near(&self, freq_hz: f64, tol_hz: f64) -> f64 {
        self.freqs
            .iter()
            .zip(&self.power_dbc)
            .filter(|(f, _)| (**f - freq_hz).abs() <= tol_hz)
            .map(|(_, p)| *p)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Summed power of the `±2`-bin cluster around `freq_hz`, dBc.
    pub fn cluster_dbc(&self, freq_hz: f64) -> f64 {
        let df = self.freqs[1] - self.freqs[0];
        let p: f64 = self
            .freqs
            .iter()
            .zip(&self.power_dbc)
            .filter(|(f, _)| (**f - freq_hz).abs() <= (CLUSTER as f64 + 0.5) * df)
            .map(|(_, p)| 10f64.powf(p / 10.0))
            .sum();
        10.0 * p.log10()
    }
}

/// Remove the least-squares line from a phase sequence.
pub fn detrend(theta: &[f64]) -> Vec<f64> {
    let n = theta.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = theta.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in theta.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    theta
        .iter()
        .enumerate()
        .map(|(i, y)| y - my - slope * (i as f64 - mx))
        .collect()
}

/// Hann-windowed power spectrum of `exp(j*theta)` (theta in radians, sampled
/// at `sample_rate` Hz), relative to the carrier cluster at DC.
pub fn spectrum(theta: &[f64], sample_rate: f64) -> Result<PhaseSpectrum> {
    let n = theta.len();
    if n < MIN_SPECTRUM_LEN {
        return Err(Error::range("spectrum length", n));
    }
    let w: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect();
    let mut buf: Vec<Complex64> = theta
        .iter()
        .zip(&w)
        .map(|(t, w)| Complex64::from_polar(*w, *t))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let pow: Vec<f64> = buf.iter().map(|c| c.norm_sqr()).collect();

    let sig_energy: f64 = w.iter().map(|w| w * w).sum();
    let spec_energy: f64 = pow.iter().sum::<f64>() / n as f64;
    let parseval_error_db = 10.0 * (spec_energy / sig_energy).log10();

    // fftshift so index 0 is -fs/2
    let half = n / 2;
    let shifted: Vec<f64> = (0..n).map(|i| pow[(i + half) % n]).collect();
    let freqs: Vec<f64> = (0..n)
        .map(|i| (i as f64 - half as f64) * sample_rate / n as f64)
        .collect();
    let cluster_sum = |c: usize| -> f64 { (c - CLUSTER..=c + CLUSTER).map(|j| shifted[j]).sum() };
    let carrier = cluster_sum(half);
    if !(carrier > 0.0) {
        return Err(Error::Empty("carrier"));
    }
    let power_dbc: Vec<f64> = shifted
        .iter()
        .map(|p| 10.0 * (p.max(1e-300) / carrier).log10())
        .collect();

    let mut sorted = power_dbc.clone();
    sorted.sort_by(f64::total_cmp);
    let noise_floor_dbc = sorted[n / 2];

    // local maxima outside the carrier cluster, merged into disjoint clusters
    let mut spurs = Vec::new();
    let mut spur_power = 0.0;
    let mut i = CLUSTER;
    while i < n - CLUSTER {
        let is_peak = (i - CLUSTER..=i + CLUSTER).all(|j| shifted[j] <= shifted[i]);
        let outside = i.abs_diff(half) > 2 * CLUSTER;
        if is_peak && outside && power_dbc[i] > (noise_floor_dbc + SPUR_THRESHOLD_DB).max(NUMERIC_FLOOR_DBC) {
            let p = cluster_sum(i);
            spur_power += p;
            spurs.push(Spur {
                freq_hz: freqs[i],
                dbc: 10.0 * (p / carrier).log10(),
            });
            i += 2 * CLUSTER + 1;
        } else {
            i += 1;
        }
    }
    spurs.sort_by(|a, b| b.dbc.total_cmp(&a.dbc));
    let integrated_spur_dbc = if spur_power > 0.0 {
        10.0 * (spur_power / carrier).log10()
    } else {
        f64::NEG_INFINITY
    };
    Ok(PhaseSpectrum {
        freqs,
        power_dbc,
        spurs,
        integrated_spur_dbc,
        noise_floor_dbc,
        integration_bw_hz: sample_rate / 2.0,
        parseval_error_db,
    })
}
