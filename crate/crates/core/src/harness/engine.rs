use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ScenarioConfig, BATCH_UI};
use super::report::{GlobalReport, LaneReport, OracleReport, RunReport};
use crate::afe::{slice_three, AfeConfig};
use crate::cdr_lane::LaneCdrState;
use crate::global_clock::FdivState;
use crate::metrics::{argmax_vem, cursor_crossing, measure_vem, vem_at, EyeDiagram};
use crate::sim_core::{jitter_offset, waveform::superpose, BitStream, SingleBitResponse};
use crate::{Error, Result};

/// Decimated per-lane telemetry row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaneRow {
    pub ui: u64,
    pub lane: usize,
    pub pi_code: u32,
    pub pi_turns: i64,
    pub dlev_code: u8,
    pub pdlev_code: u8,
    pub k_ratio: f64,
    pub ups: u64,
    pub dns: u64,
    pub sample_phase_ui: f64,
}

/// Decimated per-batch global-clock telemetry row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalRow {
    pub batch: u64,
    pub frac_ctrl: f64,
    pub ratio: f64,
    pub carry: u32,
    pub dcw: u32,
    pub k_dcdl_rel: f64,
    pub net_votes: f64,
}

/// Per-batch sequences kept for spectrum analysis (measurement window only).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Traces {
    /// Lane-0 sampling position relative to the transmitted bit grid, UI.
    pub lane0_phase_ui: Vec<f64>,
    /// ILCM edge after realignment, UI.
    pub ilcm_edge_ui: Vec<f64>,
    pub ratio: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
struct Running {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std(&self) -> f64 {
        if self.n > 1 {
            (self.m2 / (self.n - 1) as f64).sqrt()
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, Default)]
struct LaneStats {
    bits: u64,
    errors: u64,
    slips: u64,
    phase: Running,
    /// Phase-error means over the first and last tenth of the window.
    head: Running,
    tail: Running,
}

struct LaneSim {
    cdr: LaneCdrState,
    afe: AfeConfig,
    bits: BitStream,
    rng: ChaCha8Rng,
    skew: f64,
    /// Expected bit index minus UI count, fixed at the end of warmup.
    c0: Option<i64>,
    stats: LaneStats,
    eye: EyeDiagram,
    scan: Option<EyeDiagram>,
    sample_offset: f64,
    rows: Vec<LaneRow>,
}

/// Multi-lane simulation advancing one UI at a time.
pub struct Simulator {
    cfg: ScenarioConfig,
    sbr: SingleBitResponse,
    cursor_lo: i64,
    cursor_hi: i64,
    tx_ui: f64,
    lanes: Vec<LaneSim>,
    fdiv: FdivState,
    n: u64,
    batch: u64,
    osc_edge: f64,
    osc_period: f64,
    frozen: bool,
    resync: bool,
    ratio_sum: f64,
    ratio_count: u64,
    global_rows: Vec<GlobalRow>,
    traces: Option<Traces>,
    measure_from: u64,
}

/// Everything a finished run produced.
pub struct RunOutput {
    pub report: RunReport,
    pub lane_rows: Vec<LaneRow>,
    pub global_rows: Vec<GlobalRow>,
    pub traces: Option<Traces>,
}

fn prbs_seed(seed: u64, lane: usize, degree: u32) -> u32 {
    let m = (1u64 << degree) - 1;
    (1 + (seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(lane as u64 * 40_503)
        % (m - 1))) as u32
}

impl Simulator {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let sbr = cfg.channel.build(cfg.clock.nominal_ui)?;
        let (lo, hi) = sbr.cursor_span();
        let vmax = (lo..=hi).map(|k| sbr.cursor(k).abs()).sum::<f64>() + cfg.afe.dfe_tap.abs() + 0.05;
        let mut lanes = Vec::with_capacity(cfg.lanes);
        for l in 0..cfg.lanes {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(l as u64 + 1);
            let cdr = LaneCdrState::new(&cfg.lane, &cfg.afe);
            lanes.push(LaneSim {
                cdr,
                afe: cfg.afe.clone(),
                bits: BitStream::new(cfg.polynomial, prbs_seed(cfg.seed, l, cfg.polynomial.degree()), 0)?,
                rng,
                skew: cfg.lane_skew_ui[l],
                c0: None,
                stats: LaneStats::default(),
                eye: EyeDiagram::new(1, 4000, 1.5 * vmax, -0.5),
                scan: None,
                sample_offset: 0.0,
                rows: Vec::new(),
            });
        }
        let mut fdiv = FdivState::new(&cfg.fdiv)?;
        let first = fdiv.step()?;
        Ok(Self {
            cfg: cfg.clone(),
            cursor_lo: lo,
            cursor_hi: hi,
            sbr,
            tx_ui: cfg.clock.tx_ui(),
            lanes,
            fdiv,
            n: 0,
            batch: 0,
            osc_edge: first.osc_phase,
            osc_period: first.osc_period,
            frozen: false,
            resync: true,
            ratio_sum: 0.0,
            ratio_count: 0,
            global_rows: Vec::new(),
            traces: cfg.telemetry.traces.then(Traces::default),
            measure_from: cfg.warmup_ui,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn sbr(&self) -> &SingleBitResponse {
        &self.sbr
    }

    pub fn ui(&self) -> u64 {
        self.n
    }

    pub fn fdiv(&self) -> &FdivState {
        &self.fdiv
    }

    pub fn lane(&self, l: usize) -> &LaneCdrState {
        &self.lanes[l].cdr
    }

    /// Stop all phase adaptation (PI, ECA and the integral path).
    pub fn freeze(&mut self, frozen: bool) {
        self.frozen = frozen;
    }

    /// Whether a bit slip re-aligns the BER checker (default) or keeps
    /// comparing against the bit that was locked at the end of warmup.
    pub fn set_resync(&mut self, on: bool) {
        self.resync = on;
    }

    /// Extra sampling delay of every lane's samplers, UI.
    pub fn set_sample_offset(&mut self, offset: f64) {
        for l in &mut self.lanes {
            l.sample_offset = offset;
        }
    }

    /// Attach a phase-scanning eye to every lane: each UI one extra
    /// waveform sample is taken at a phase offset cycling across the bins.
    pub fn enable_eye_scan(&mut self, phase_bins: usize, v_bins: usize) {
        let v = self.lanes[0].eye.v_range;
        for l in &mut self.lanes {
            l.scan = Some(EyeDiagram::new(phase_bins, v_bins, v, -0.5));
        }
    }

    pub fn eye_scan(&self, lane: usize) -> Option<&EyeDiagram> {
        self.lanes[lane].scan.as_ref()
    }

    /// Errors and compared bits so far for `lane`.
    pub fn ber_counts(&self, lane: usize) -> (u64, u64) {
        let s = &self.lanes[lane].stats;
        (s.errors, s.bits)
    }

    pub fn slips(&self, lane: usize) -> u64 {
        self.lanes[lane].stats.slips
    }

    /// Restart BER, slip and phase accumulation (e.g. between sweep points).
    pub fn reset_counts(&mut self) {
        self.measure_from = self.n;
        for l in &mut self.lanes {
            l.stats = LaneStats::default();
        }
    }

    pub fn run_until(&mut self, n_ui: u64) -> Result<()> {
        while self.n < n_ui {
            self.step()?;
        }
        Ok(())
    }

    /// Advance every lane by one UI; close the batch every `BATCH_UI`.
    pub fn step(&mut self) -> Result<()> {
        let j = self.n % BATCH_UI;
        let t_clk = self.osc_edge + j as f64 * self.osc_period / BATCH_UI as f64;
        let measuring = self.n >= self.cfg.warmup_ui;
        let window = self.cfg.n_ui.saturating_sub(self.measure_from).max(1);
        let tenth = window / 10;
        let adapt_phase = !self.frozen;
        let decim = self.cfg.telemetry.lane_decimation;
        let (lo, hi) = (self.cursor_lo, self.cursor_hi);
        let sbr = &self.sbr;
        let nominal_ui_s = self.cfg.clock.nominal_ui;
        for (li, lane) in self.lanes.iter_mut().enumerate() {
            let jit = jitter_offset(&self.cfg.jitter, self.n, nominal_ui_s, &mut lane.rng);
            let t = t_clk + lane.cdr.pi_offset_ui() + lane.skew + lane.sample_offset + jit;
            let p = t / self.tx_ui;
            let p_eca = p + lane.cdr.eca_delay_ui() / self.tx_ui;
            let idx = p.round() as i64;
            lane.bits.ensure(idx.max(p_eca.round() as i64) - lo + 1);
            let bits = &lane.bits;
            let wave = |pos: f64| {
                let i = pos.round() as i64;
                superpose(sbr, pos - i as f64, |k| bits.get(i - k))
            };
            let v_clk = wave(p);
            let v_eca = if p_eca == p { v_clk } else { wave(p_eca) };
            debug_assert!(idx - hi >= 0);
            let dlev = lane.cdr.dlev_volts(&lane.afe);
            let pdlev = lane.cdr.pdlev_volts(&lane.afe);
            lane.afe.dfe_tap = lane.cdr.dfe_tap_volts(&self.cfg.afe);
            let d_prev = lane.cdr.d_prev;
            let s = slice_three(v_clk, v_eca, dlev, pdlev, d_prev, &lane.afe, &mut lane.rng);

            if measuring {
                let c0 = *lane.c0.get_or_insert(idx - self.n as i64);
                let expect = self.n as i64 + c0;
                let tx = lane.bits.get(expect);
                lane.stats.bits += 1;
                if s.d != tx {
                    lane.stats.errors += 1;
                }
                if idx != expect {
                    lane.stats.slips += 1;
                    if self.resync {
                        lane.c0 = Some(idx - self.n as i64);
                    }
                }
                let phase = p - idx as f64;
                lane.stats.phase.push(phase);
                let since = self.n - self.measure_from;
                let pe = p - expect as f64;
                if since < tenth {
                    lane.stats.head.push(pe);
                } else if since >= window - tenth {
                    lane.stats.tail.push(pe);
                }
                let a = v_clk - f64::from(d_prev) * lane.afe.dfe_tap;
                lane.eye.add(0.0, a, lane.bits.get(idx));
                if let Some(scan) = &mut lane.scan {
                    let pb = (self.n % scan.phase_bins as u64) as f64;
                    let off = -0.5 + (pb + 0.5) / scan.phase_bins as f64;
                    let pos = p + off;
                    let i = pos.round() as i64;
                    lane.bits.ensure(i - lo + 1);
                    let bits = &lane.bits;
                    let v = superpose(sbr, pos - i as f64, |k| bits.get(i - k));
                    scan.add(off, v - f64::from(d_prev) * lane.afe.dfe_tap, lane.bits.get(idx));
                }
                if li == 0 && j == 0 {
                    if let Some(tr) = &mut self.traces {
                        tr.lane0_phase_ui.push(pe);
                    }
                }
            }
            lane.cdr.update(s, adapt_phase);
            if decim > 0 && self.n.is_multiple_of(decim) {
                lane.rows.push(LaneRow {
                    ui: self.n,
                    lane: li,
                    pi_code: lane.cdr.pi_code,
                    pi_turns: lane.cdr.pi_turns,
                    dlev_code: lane.cdr.dlev.code,
                    pdlev_code: lane.cdr.pdlev.code,
                    k_ratio: lane.cdr.k_ratio(),
                    ups: lane.cdr.ups,
                    dns: lane.cdr.dns,
                    sample_phase_ui: p - idx as f64,
                });
            }
        }
        self.n += 1;
        if self.n.is_multiple_of(BATCH_UI) {
            self.close_batch(measuring)?;
        }
        Ok(())
    }

    fn close_batch(&mut self, measuring: bool) -> Result<()> {
        let mut votes = [0.0; super::config::MAX_LANES];
        for (v, l) in votes.iter_mut().zip(self.lanes.iter_mut()) {
            *v = l.cdr.take_batch_votes();
        }
        if !self.frozen {
            self.fdiv.apply_votes(&votes[..self.lanes.len()]);
        }
        let e = self.fdiv.step()?;
        self.osc_edge = e.osc_phase;
        self.osc_period = e.osc_period;
        if measuring {
            self.ratio_sum += e.ratio;
            self.ratio_count += 1;
            if let Some(tr) = &mut self.traces {
                tr.ilcm_edge_ui.push(e.osc_phase);
                tr.ratio.push(e.ratio);
            }
        }
        let gd = self.cfg.telemetry.global_decimation;
        if gd > 0 && self.batch.is_multiple_of(gd) {
            self.global_rows.push(GlobalRow {
                batch: self.batch,
                frac_ctrl: self.fdiv.frac_ctrl,
                ratio: e.ratio,
                carry: e.carry,
                dcw: e.dcw,
                k_dcdl_rel: self.fdiv.k_dcdl / self.fdiv.plant.k_true,
                net_votes: self.fdiv.integral.lane_vote_sum,
            });
        }
        self.batch += 1;
        Ok(())
    }

    pub fn oracle(&self) -> OracleReport {
        let tap = self.cfg.afe.dfe_tap;
        let argmax = argmax_vem(&self.sbr, tap, -0.5, 0.5);
        OracleReport {
            crossing_phase_ui: cursor_crossing(&self.sbr, tap, -0.5, 0.5),
            argmax_vem_phase_ui: argmax,
            vem_at_argmax: 2.0 * vem_at(&self.sbr, tap, argmax),
        }
    }

    pub fn report(&self) -> Result<RunReport> {
        let mut lanes = Vec::new();
        for (i, l) in self.lanes.iter().enumerate() {
            let st = &l.stats;
            let span = (self.cfg.n_ui.saturating_sub(self.measure_from)) as f64 * 0.9;
            let residual_ppm = if st.head.n > 0 && st.tail.n > 0 && span > 0.0 {
                (st.tail.mean - st.head.mean) / span * 1e6
            } else {
                0.0
            };
            let lock = st.phase.mean;
            let tap = l.cdr.dfe_tap_volts(&self.cfg.afe);
            lanes.push(LaneReport {
                lane: i,
                lock_phase_ui: lock,
                lock_phase_std_ui: st.phase.std(),
                dlev_code: l.cdr.dlev.code,
                pdlev_code: l.cdr.pdlev.code,
                pdlev_volts: l.cdr.pdlev_volts(&self.cfg.afe),
                dfe_tap_volts: tap,
                k_ratio: l.cdr.k_ratio(),
                pi_code: l.cdr.pi_code,
                residual_ppm,
                bits: st.bits,
                errors: st.errors,
                ber: if st.bits > 0 {
                    st.errors as f64 / st.bits as f64
                } else {
                    0.0
                },
                slips: st.slips,
                ups: l.cdr.ups,
                dns: l.cdr.dns,
                vem_measured: measure_vem(&l.eye, 0.0, 0.0).unwrap_or(f64::NAN),
                vem_oracle: 2.0 * vem_at(&self.sbr, tap, lock),
            });
        }
        let fd = &self.fdiv;
        let global = GlobalReport {
            mean_division_ratio: if self.ratio_count > 0 {
                self.ratio_sum / self.ratio_count as f64
            } else {
                fd.ratio()
            },
            final_frac_ctrl: fd.frac_ctrl,
            k_dcdl_rel: fd.k_dcdl / fd.plant.k_true,
            dcw_clamp_count: fd.dcw_clamp_count,
            integral_saturated: fd.integral.saturated,
            k_floor_hit: fd.k_floor_hit,
            fdiv_cycles: fd.cycles,
        };
        let loss_of_lock = global.integral_saturated || global.k_floor_hit || lanes.iter().any(|l| l.slips > 0);
        Ok(RunReport {
            seed: self.cfg.seed,
            config_hash: self.cfg.hash()?,
            n_ui: self.cfg.n_ui,
            warmup_ui: self.cfg.warmup_ui,
            lanes,
            global,
            oracle: self.oracle(),
            loss_of_lock,
        })
    }

    pub fn finish(mut self) -> Result<RunOutput> {
        let report = self.report()?;
        let mut lane_rows = Vec::new();
        for l in &mut self.lanes {
            lane_rows.append(&mut l.rows);
        }
        lane_rows.sort_by_key(|r| (r.ui, r.lane));
        Ok(RunOutput {
            report,
            lane_rows,
            global_rows: self.global_rows,
            traces: self.traces,
        })
    }
}

/// Simulate a scenario end to end.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let mut sim = Simulator::new(cfg)?;
    sim.run_until(cfg.n_ui)?;
    sim.finish()
}

/// Map a run's lock status onto `Error::LossOfLock`.
pub fn check_lock(report: &RunReport) -> Result<()> {
    if report.loss_of_lock {
        let slips: u64 = report.lanes.iter().map(|l| l.slips).sum();
        return Err(Error::LossOfLock(format!(
            "integral_saturated={} k_floor_hit={} slips={slips}",
            report.global.integral_saturated, report.global.k_floor_hit
        )));
    }
    Ok(())
}
