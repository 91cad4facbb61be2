use crate::sim_core::SingleBitResponse;

/// Worst-case half-opening of the data eye when sampling `phase` UI after
/// the main-cursor peak: `h0 - sum_{k != 0} |h_k|`, with the first
/// post-cursor reduced by the DFE tap.
pub fn vem_at(sbr: &SingleBitResponse, dfe_tap: f64, phase: f64) -> f64 {
    let (lo, hi) = sbr.cursor_span();
    let isi: f64 = (lo..=hi)
        .filter(|&k| k != 0)
        .map(|k| {
            let h = sbr.cursor_at(k, phase);
            if k == 1 {
                (h - dfe_tap).abs()
            } else {
                h.abs()
            }
        })
        .sum();
    sbr.cursor_at(0, phase) - isi
}

/// [`vem_at`] over a phase grid.
pub fn vem_vs_phase(sbr: &SingleBitResponse, dfe_tap: f64, phases: &[f64]) -> Vec<(f64, f64)> {
    phases.iter().map(|&p| (p, vem_at(sbr, dfe_tap, p))).collect()
}

/// Grid phase with the largest VEM, refined by golden-section search in the
/// neighbouring grid cells.
pub fn argmax_vem(sbr: &SingleBitResponse, dfe_tap: f64, lo: f64, hi: f64) -> f64 {
    let n = 400;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let best = vem_vs_phase(sbr, dfe_tap, &grid)
        .into_iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, (_, v))| if v > acc.1 { (i, v) } else { acc });
    let step = (hi - lo) / n as f64;
    let (mut a, mut b) = (grid[best.0] - step, grid[best.0] + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if vem_at(sbr, dfe_tap, c) > vem_at(sbr, dfe_tap, d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Phase in `[lo, hi]` where the DFE-residual first post-cursor equals the
/// first precursor, by bisection. `None` if they do not cross.
pub fn cursor_crossing(sbr: &SingleBitResponse, dfe_tap: f64, lo: f64, hi: f64) -> Option<f64> {
    let f = |p: f64| (sbr.cursor_at(1, p) - dfe_tap) - sbr.cursor_at(-1, p);
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    if fa.signum() == f(b).signum() {
        return None;
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}
