use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JtolPoint {
    pub freq_hz: f64,
    /// Largest passing SJ amplitude, UI peak.
    pub amplitude_ui: f64,
    /// The search hit the top of its bracket; the true tolerance is higher.
    pub capped: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct JtolCurve {
    pub points: Vec<JtolPoint>,
    /// Frequencies that failed even at the smallest amplitude.
    pub failed_hz: Vec<f64>,
}

impl JtolCurve {
    /// Least-squares slope of 20*log10(amplitude) against log10(frequency)
    /// over points with `lo <= f <= hi`, dB/decade.
    pub fn slope_db_per_decade(&self, lo: f64, hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.freq_hz >= lo && p.freq_hz <= hi && !p.capped)
            .map(|p| (p.freq_hz.log10(), 20.0 * p.amplitude_ui.log10()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }

    /// Corner frequency: where the -20 dB/decade asymptote through the
    /// low-frequency points meets the high-frequency plateau (mean of the
    /// points at or above `plateau_from`).
    pub fn corner_hz(&self, low_below: f64, plateau_from: f64) -> Option<f64> {
        let low: Vec<&JtolPoint> = self
            .points
            .iter()
            .filter(|p| p.freq_hz <= low_below && !p.capped)
            .collect();
        let high: Vec<&JtolPoint> = self.points.iter().filter(|p| p.freq_hz >= plateau_from).collect();
        if low.is_empty() || high.is_empty() {
            return None;
        }
        // A(f) = c / f on the asymptote; geometric mean of c over the low points
        let log_c = low.iter().map(|p| (p.amplitude_ui * p.freq_hz).ln()).sum::<f64>() / low.len() as f64;
        let log_plateau = high.iter().map(|p| p.amplitude_ui.ln()).sum::<f64>() / high.len() as f64;
        Some((log_c - log_plateau).exp())
    }
}

/// Bisect the largest amplitude in `[lo, hi]` for which `passes` holds,
/// assuming tolerance is monotone in amplitude. `None` when `lo` already
/// fails. The result is within `rel_tol` (relative) of the boundary.
pub fn jtol_search(lo: f64, hi: f64, rel_tol: f64, mut passes: impl FnMut(f64) -> bool) -> Option<(f64, bool)> {
    if !passes(lo) {
        return None;
    }
    if passes(hi) {
        return Some((hi, true));
    }
    let (mut a, mut b) = (lo, hi);
    while b / a > 1.0 + rel_tol {
        let m = (a * b).sqrt();
        if passes(m) {
            a = m;
        } else {
            b = m;
        }
    }
    Some((a, false))
}
