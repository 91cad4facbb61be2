use rayon::prelude::*;

use super::config::{ScenarioConfig, BATCH_UI};
use super::engine::{run, RunOutput, Simulator};
use crate::global_clock::{FdivConfig, FdivState};
use crate::metrics::{
    detrend, jtol_search, spectrum, BathtubCurve, BathtubPoint, EyeDiagram, JtolCurve, JtolPoint, PhaseSpectrum,
};
use crate::{Error, Result};

/// Closed-loop run with a phase-scanning eye on lane 0.
pub fn eye(cfg: &ScenarioConfig, phase_bins: usize, v_bins: usize) -> Result<(EyeDiagram, RunOutput)> {
    let mut sim = Simulator::new(cfg)?;
    sim.enable_eye_scan(phase_bins, v_bins);
    sim.run_until(cfg.n_ui)?;
    let eye = sim.eye_scan(0).cloned().ok_or(Error::Empty("eye scan"))?;
    Ok((eye, sim.finish()?))
}

/// Lock during warmup, then freeze all phase adaptation and step the
/// sampling instant of lane 0 through `offsets` (UI from the lock),
/// comparing `bits_per_point` decisions at each.
pub fn bathtub(cfg: &ScenarioConfig, offsets: &[f64], bits_per_point: u64) -> Result<BathtubCurve> {
    let mut sim = Simulator::new(cfg)?;
    sim.run_until(cfg.warmup_ui + 1)?;
    sim.freeze(true);
    sim.set_resync(false);
    let mut points = Vec::with_capacity(offsets.len());
    for &off in offsets {
        sim.set_sample_offset(off);
        sim.reset_counts();
        let end = sim.ui() + bits_per_point;
        sim.run_until(end)?;
        let (errors, bits) = sim.ber_counts(0);
        points.push(BathtubPoint {
            phase: off,
            errors,
            bits,
        });
    }
    BathtubCurve::new(points)
}

/// Jitter tolerance with the given SJ frequencies: per frequency the largest
/// amplitude (UI peak, searched in `[lo, hi]`) that keeps every lane below
/// `target_ber` without a slip.
pub fn jtol(cfg: &ScenarioConfig, freqs: &[f64], target_ber: f64, lo: f64, hi: f64) -> Result<JtolCurve> {
    // per frequency: (amplitude, capped) when the lowest amplitude passed
    type Found = Result<(f64, Option<(f64, bool)>)>;
    let results: Vec<Found> = freqs
        .par_iter()
        .map(|&f| {
            let mut err = None;
            let found = jtol_search(lo, hi, 0.04, |amp| {
                let mut c = cfg.clone();
                c.jitter.sj_frequency = f;
                c.jitter.sj_amplitude = amp;
                match run(&c) {
                    Ok(out) => out
                        .report
                        .lanes
                        .iter()
                        .all(|l| l.slips == 0 && l.bits > 0 && (l.errors as f64) <= target_ber * l.bits as f64),
                    Err(e) => {
                        err.get_or_insert(e);
                        false
                    }
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok((f, found)),
            }
        })
        .collect();
    let mut curve = JtolCurve::default();
    for r in results {
        match r? {
            (f, Some((a, capped))) => curve.points.push(JtolPoint {
                freq_hz: f,
                amplitude_ui: a,
                capped,
            }),
            (f, None) => curve.failed_hz.push(f),
        }
    }
    Ok(curve)
}

/// Spectra of the recovered lane-0 clock and of the ILCM output over the
/// measurement window.
pub struct SpectrumRun {
    pub recovered: PhaseSpectrum,
    pub ilcm: PhaseSpectrum,
    pub output: RunOutput,
}

/// Phase-to-radian factor for a clock whose period is `t_lc` UI.
fn rad_per_ui(t_lc: f64) -> f64 {
    2.0 * std::f64::consts::PI / t_lc
}

pub fn spectrum_run(cfg: &ScenarioConfig) -> Result<SpectrumRun> {
    let mut c = cfg.clone();
    c.telemetry.traces = true;
    let out = run(&c)?;
    let tr = out.traces.as_ref().ok_or(Error::Empty("traces"))?;
    let fs = 1.0 / (BATCH_UI as f64 * c.clock.nominal_ui);
    let k = rad_per_ui(c.fdiv.t_lc);
    let rec: Vec<f64> = detrend(&tr.lane0_phase_ui).iter().map(|x| k * x).collect();
    let ilcm: Vec<f64> = detrend(&tr.ilcm_edge_ui).iter().map(|x| k * x).collect();
    Ok(SpectrumRun {
        recovered: spectrum(&rec, fs)?,
        ilcm: spectrum(&ilcm, fs)?,
        output: out,
    })
}

/// Stand-alone fractional divider + ILCM run.
pub struct FdivRun {
    /// `k_dcdl / k_true` every `decimation` cycles.
    pub k_rel: Vec<f64>,
    pub decimation: u64,
    /// First cycle after which `k_rel` stayed within 1% of unity, if any.
    pub settled_at: Option<u64>,
    /// ILCM phase (radians of the LC clock) over the last `record` cycles.
    pub ilcm_phase_rad: Vec<f64>,
}

pub fn fdiv_run(cfg: &FdivConfig, cycles: u64, record: u64, decimation: u64) -> Result<FdivRun> {
    let mut s = FdivState::new(cfg)?;
    let mut k_rel = Vec::new();
    let mut settled_at = None;
    let mut edges = Vec::with_capacity(record as usize);
    for n in 0..cycles {
        let e = s.step()?;
        let rel = s.k_dcdl / s.plant.k_true;
        if (rel - 1.0).abs() <= 0.01 {
            settled_at.get_or_insert(n);
        } else {
            settled_at = None;
        }
        if decimation > 0 && n % decimation == 0 {
            k_rel.push(rel);
        }
        if n + record >= cycles {
            edges.push(e.osc_phase);
        }
    }
    let k = rad_per_ui(cfg.t_lc);
    Ok(FdivRun {
        k_rel,
        decimation,
        settled_at,
        ilcm_phase_rad: detrend(&edges).iter().map(|x| k * x).collect(),
    })
}
