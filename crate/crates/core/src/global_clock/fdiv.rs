use serde::{Deserialize, Serialize};

use super::{
    dcdl_delay, dsm_step, integral_accumulate, kdcdl_calibrate, mmd_divide, BbVote, DcdlPlant, IntegralPathState,
    MMD_MAX, MMD_MIN,
};
use crate::cdr_lane::{ilcm_step, IlcmState};
use crate::{Error, Result};

/// Fractional divider, delay-line plant, ILCM and integral-path settings.
/// Times are in nominal UI; gains marked `_rel` are relative to `t_lc / 512`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdivConfig {
    pub div_int: u32,
    pub nominal_frac: f64,
    /// LC oscillator period.
    pub t_lc: f64,
    /// Integral path on; when off `frac_ctrl` stays at `nominal_frac`.
    pub tracking: bool,
    /// Division-ratio change per net lane vote.
    pub ki: f64,
    pub clamp_ppm: f64,
    pub k_true_rel: f64,
    pub k_dcdl_init_rel: f64,
    pub inl_bow_lsb: f64,
    pub calibrate: bool,
    pub mu_rel: f64,
    pub k_floor_rel: f64,
    /// Smallest |dcw - dcw_prev| (LSB) that drives a gain update. Below a
    /// few LSB the code rounding correlates with the step sign and biases k.
    pub cal_min_step: u32,
    pub mult_ratio: u32,
    pub ilcm_beta: f64,
    pub ilcm_track_gain: f64,
}

impl Default for FdivConfig {
    fn default() -> Self {
        Self {
            div_int: 16,
            nominal_frac: 0.0,
            t_lc: 2.0,
            tracking: true,
            ki: 1.0 / f64::from(1 << 18),
            clamp_ppm: 5000.0,
            k_true_rel: 1.0,
            k_dcdl_init_rel: 1.0,
            inl_bow_lsb: 0.73,
            calibrate: true,
            mu_rel: 1.0 / f64::from(1 << 14),
            k_floor_rel: 0.25,
            cal_min_step: 8,
            mult_ratio: 16,
            ilcm_beta: 0.5,
            ilcm_track_gain: 0.0,
        }
    }
}

impl FdivConfig {
    pub fn validate(&self) -> Result<()> {
        let ratio = f64::from(self.div_int) + self.nominal_frac;
        if !(f64::from(MMD_MIN)..=f64::from(MMD_MAX)).contains(&ratio) {
            return Err(Error::range("division ratio", ratio));
        }
        if !(self.t_lc > 0.0) {
            return Err(Error::range("t_lc", self.t_lc));
        }
        if !(self.ki >= 0.0) {
            return Err(Error::range("ki", self.ki));
        }
        if !(self.clamp_ppm > 0.0) {
            return Err(Error::range("clamp_ppm", self.clamp_ppm));
        }
        for (what, v) in [
            ("k_true_rel", self.k_true_rel),
            ("k_dcdl_init_rel", self.k_dcdl_init_rel),
        ] {
            if !(v > 0.0) {
                return Err(Error::range(what, v));
            }
        }
        if !(self.mu_rel >= 0.0) {
            return Err(Error::range("mu_rel", self.mu_rel));
        }
        if !(self.k_floor_rel > 0.0) {
            return Err(Error::range("k_floor_rel", self.k_floor_rel));
        }
        if !(self.ilcm_beta > 0.0 && self.ilcm_beta <= 1.0) {
            return Err(Error::range("ilcm_beta", self.ilcm_beta));
        }
        if self.mult_ratio == 0 {
            return Err(Error::range("mult_ratio", self.mult_ratio));
        }
        Ok(())
    }

    /// Delay-line LSB that exactly spans one LC period.
    pub fn k_nominal(&self) -> f64 {
        self.t_lc / 512.0
    }
}

/// One FDIV output cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdivEdge {
    /// Delayed FDIV output edge.
    pub edge: f64,
    /// ILCM edge after realignment.
    pub osc_phase: f64,
    /// ILCM free-running period for the coming cycle.
    pub osc_period: f64,
    pub ratio: f64,
    pub carry: u32,
    pub dcw: u32,
    pub dcw_clamped: bool,
    pub vote: BbVote,
}

/// Fractional divider with its delay line, the downstream ILCM and the
/// integral path that steers the fractional word.
#[derive(Clone, Debug)]
pub struct FdivState {
    pub div_int: u32,
    pub frac_ctrl: f64,
    pub dsm_accum: f64,
    pub dcw: u32,
    pub k_dcdl: f64,
    /// Time of the last undelayed MMD edge.
    pub t_mmd_prev: f64,
    pub dcw_prev: u32,
    pub plant: DcdlPlant,
    pub ilcm: IlcmState,
    pub integral: IntegralPathState,
    pub k_floor_hit: bool,
    pub dcw_clamp_count: u64,
    prev_clamped: bool,
    pub cycles: u64,
    cfg: FdivConfig,
}

impl FdivState {
    pub fn new(cfg: &FdivConfig) -> Result<Self> {
        cfg.validate()?;
        let k0 = cfg.k_nominal();
        let clamp = cfg.clamp_ppm * 1e-6 * f64::from(cfg.div_int);
        Ok(Self {
            div_int: cfg.div_int,
            frac_ctrl: cfg.nominal_frac,
            dsm_accum: 0.0,
            dcw: 0,
            k_dcdl: k0 * cfg.k_dcdl_init_rel,
            t_mmd_prev: 0.0,
            dcw_prev: 0,
            plant: DcdlPlant {
                k_true: k0 * cfg.k_true_rel,
                inl_bow_lsb: cfg.inl_bow_lsb,
            },
            ilcm: IlcmState::new(cfg.mult_ratio, cfg.ilcm_beta, cfg.ilcm_track_gain),
            integral: IntegralPathState::new(cfg.ki, clamp),
            k_floor_hit: false,
            dcw_clamp_count: 0,
            prev_clamped: false,
            cycles: 0,
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &FdivConfig {
        &self.cfg
    }

    pub fn ratio(&self) -> f64 {
        f64::from(self.div_int) + self.frac_ctrl
    }

    /// Integral-path update from one batch of lane votes (no-op when
    /// tracking is off).
    pub fn apply_votes(&mut self, votes: &[f64]) {
        if self.cfg.tracking {
            self.frac_ctrl = integral_accumulate(&mut self.integral, votes, self.cfg.nominal_frac);
        }
    }

    /// Produce the next output edge, realign the ILCM and run one
    /// delay-line gain calibration step.
    pub fn step(&mut self) -> Result<FdivEdge> {
        let ratio = self.ratio();
        if !(f64::from(MMD_MIN)..f64::from(MMD_MAX)).contains(&ratio) {
            return Err(Error::range("division ratio", ratio));
        }
        let n = ratio.floor();
        let (carry, residue) = dsm_step(ratio - n, &mut self.dsm_accum)?;
        self.t_mmd_prev += mmd_divide(n as u32 + carry, self.cfg.t_lc)?;
        let code = dcdl_delay(residue, self.k_dcdl, self.cfg.t_lc)?;
        self.dcw = code.dcw;
        if code.clamped {
            self.dcw_clamp_count += 1;
        }
        let edge = self.t_mmd_prev + self.plant.delay(self.dcw);
        let nominal_period = ratio * self.cfg.t_lc;
        let vote = ilcm_step(&mut self.ilcm, edge, nominal_period);
        let excited = code.dcw.abs_diff(self.dcw_prev) >= self.cfg.cal_min_step;
        // a saturated code says nothing about the gain
        if self.cfg.calibrate && self.cycles > 0 && excited && !code.clamped && !self.prev_clamped {
            let floor = self.cfg.k_floor_rel * self.cfg.k_nominal();
            let (k, hit) = kdcdl_calibrate(
                self.k_dcdl,
                vote,
                self.dcw,
                self.dcw_prev,
                self.cfg.mu_rel * self.cfg.k_nominal(),
                floor,
            );
            self.k_dcdl = k;
            self.k_floor_hit |= hit;
        }
        self.dcw_prev = self.dcw;
        self.prev_clamped = code.clamped;
        self.cycles += 1;
        Ok(FdivEdge {
            edge,
            osc_phase: self.ilcm.osc_phase,
            osc_period: self.ilcm.period(nominal_period),
            ratio,
            carry,
            dcw: self.dcw,
            dcw_clamped: code.clamped,
            vote,
        })
    }
}
