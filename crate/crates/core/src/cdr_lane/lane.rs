use serde::{Deserialize, Serialize};

use super::{
    dfe_tap_adapt, dlev_update, mmpd_vote, pdlev_update, pi_phase, proportional_update, EcaConfig, EcaState, LevelLoop,
    PiModel, ProportionalPath, Vote,
};
use crate::afe::{dac_voltage, AfeConfig, SamplerOutputs};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaneConfig {
    /// Net vote weight per PI step.
    pub prop_threshold: f64,
    /// Votes per Dlev LSB.
    pub dlev_every: u32,
    /// Qualifying patterns per Pdlev LSB.
    pub pdlev_every: u32,
    pub dlev_init: u8,
    pub pdlev_init: u8,
    /// Adapt the DFE tap with sign-sign LMS instead of holding `afe.dfe_tap`.
    pub dfe_adapt: bool,
    pub dfe_every: u32,
    pub pi: PiModel,
    /// UI covered by one full PI rotation (half-rate clocking: 2 UI).
    pub pi_span_ui: f64,
    pub pi_init: u32,
    pub eca: EcaConfig,
}

impl Default for LaneConfig {
    fn default() -> Self {
        Self {
            prop_threshold: 16.0,
            dlev_every: 4,
            pdlev_every: 2,
            dlev_init: 40,
            pdlev_init: 30,
            dfe_adapt: false,
            dfe_every: 16,
            pi: PiModel::default(),
            pi_span_ui: 2.0,
            pi_init: 0,
            eca: EcaConfig::default(),
        }
    }
}

impl LaneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.prop_threshold >= 1.0) {
            return Err(Error::range("prop_threshold", self.prop_threshold));
        }
        if !(self.pi_span_ui > 0.0) {
            return Err(Error::range("pi_span_ui", self.pi_span_ui));
        }
        self.pi.validate()?;
        self.eca.validate()
    }
}

/// Outcome of one UI of lane logic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaneStep {
    pub vote: Vote,
    pub pi_step: i32,
}

/// Per-lane CDR state: decision/error history, adapted levels, PI position,
/// proportional accumulator and ECA.
#[derive(Clone, Debug)]
pub struct LaneCdrState {
    pub d_prev: i8,
    pub d_prev2: i8,
    pub e_prev: i8,
    e_em_prev: i8,
    pub dlev: LevelLoop,
    pub pdlev: LevelLoop,
    pub dfe_tap: Option<LevelLoop>,
    /// PI code, modulo 2^bits.
    pub pi_code: u32,
    /// Completed PI rotations, so the phase stays continuous across wraps.
    pub pi_turns: i64,
    pub prop: ProportionalPath,
    pub eca: EcaState,
    /// Weighted net vote (Up 1, Dn k) since the last batch boundary.
    pub batch_votes: f64,
    pub ups: u64,
    pub dns: u64,
    cfg: LaneConfig,
}

impl LaneCdrState {
    pub fn new(cfg: &LaneConfig, afe: &AfeConfig) -> Self {
        let dfe_tap = cfg
            .dfe_adapt
            .then(|| LevelLoop::new(afe.dac_code_for(afe.dfe_tap), cfg.dfe_every));
        Self {
            d_prev: 1,
            d_prev2: 1,
            e_prev: 1,
            e_em_prev: 1,
            dlev: LevelLoop::new(cfg.dlev_init, cfg.dlev_every),
            pdlev: LevelLoop::new(cfg.pdlev_init, cfg.pdlev_every),
            dfe_tap,
            pi_code: cfg.pi_init % cfg.pi.codes(),
            pi_turns: 0,
            prop: ProportionalPath::new(cfg.prop_threshold),
            eca: EcaState::new(cfg.eca.clone()),
            batch_votes: 0.0,
            ups: 0,
            dns: 0,
            cfg: cfg.clone(),
        }
    }

    pub fn config(&self) -> &LaneConfig {
        &self.cfg
    }

    /// Recovered-clock phase contributed by the PI, UI (unwrapped).
    pub fn pi_offset_ui(&self) -> f64 {
        (pi_phase(self.pi_code, &self.cfg.pi) + self.pi_turns as f64) * self.cfg.pi_span_ui
    }

    pub fn eca_delay_ui(&self) -> f64 {
        self.eca.extra_delay()
    }

    pub fn k_ratio(&self) -> f64 {
        self.eca.k_ratio
    }

    pub fn dlev_volts(&self, afe: &AfeConfig) -> f64 {
        dac_voltage(self.dlev.code, afe).unwrap_or(0.0)
    }

    pub fn pdlev_volts(&self, afe: &AfeConfig) -> f64 {
        dac_voltage(self.pdlev.code, afe).unwrap_or(0.0)
    }

    pub fn dfe_tap_volts(&self, afe: &AfeConfig) -> f64 {
        match &self.dfe_tap {
            Some(t) => dac_voltage(t.code, afe).unwrap_or(0.0),
            None => afe.dfe_tap,
        }
    }

    /// Force the PI to a code (open-loop sweeps).
    pub fn set_pi(&mut self, code: u32, turns: i64) {
        self.pi_code = code % self.cfg.pi.codes();
        self.pi_turns = turns;
    }

    fn step_pi(&mut self, step: i32) {
        let codes = i64::from(self.cfg.pi.codes());
        let c = i64::from(self.pi_code) + i64::from(step);
        self.pi_turns += c.div_euclid(codes);
        self.pi_code = c.rem_euclid(codes) as u32;
    }

    /// Digest this UI's sampler outputs. `adapt_phase = false` freezes the
    /// PI and ECA (open-loop measurements) while levels keep adapting.
    pub fn update(&mut self, s: SamplerOutputs, adapt_phase: bool) -> LaneStep {
        let vote = mmpd_vote(self.d_prev, s.d, self.e_prev, s.e_pd);
        dlev_update(&mut self.dlev, s.d, s.e_pd);
        if let Some(tap) = &mut self.dfe_tap {
            dfe_tap_adapt(tap, self.d_prev, s.e_pd);
        }
        // the eye-monitor sample of x[n-1] is judged once x[n] is known
        pdlev_update(&mut self.pdlev, (self.d_prev2, self.d_prev, s.d), self.e_em_prev);

        let mut pi_step = 0;
        if adapt_phase {
            self.eca.observe(self.pdlev.code);
            pi_step = proportional_update(&mut self.prop, vote, self.eca.k_ratio);
            self.step_pi(pi_step);
        }
        match vote {
            Vote::Up => self.ups += 1,
            Vote::Dn => self.dns += 1,
            Vote::Hold => {}
        }
        // the integral path sees the same 1:k weighting, otherwise it would
        // pull the lock back to the unweighted null
        self.batch_votes += match vote {
            Vote::Up => 1.0,
            Vote::Dn => -self.eca.k_ratio,
            Vote::Hold => 0.0,
        };

        self.d_prev2 = self.d_prev;
        self.d_prev = s.d;
        self.e_prev = s.e_pd;
        self.e_em_prev = s.e_em;
        LaneStep { vote, pi_step }
    }

    pub fn take_batch_votes(&mut self) -> f64 {
        std::mem::take(&mut self.batch_votes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane() -> LaneCdrState {
        LaneCdrState::new(&LaneConfig::default(), &AfeConfig::default())
    }

    fn out(d: i8, e_pd: i8) -> SamplerOutputs {
        SamplerOutputs { d, e_pd, e_em: 1 }
    }

    #[test]
    fn pi_wraps_with_continuous_phase() {
        let mut l = lane();
        l.set_pi(255, 0);
        let before = l.pi_offset_ui();
        l.step_pi(1);
        assert_eq!(l.pi_code, 0);
        assert_eq!(l.pi_turns, 1);
        assert!((l.pi_offset_ui() - before - 2.0 / 256.0).abs() < 1e-12);
        l.step_pi(-2);
        assert_eq!((l.pi_code, l.pi_turns), (254, 0));
    }

    #[test]
    fn early_votes_move_phase_later() {
        let mut l = lane();
        let start = l.pi_offset_ui();
        l.update(out(-1, -1), true);
        // every consecutive pair of this cycle is an early pattern
        let cycle = [out(1, -1), out(1, 1), out(-1, 1), out(-1, -1)];
        for _ in 0..32 {
            for s in cycle {
                assert_eq!(l.update(s, true).vote, Vote::Up);
            }
        }
        assert_eq!(l.ups, 128);
        assert_eq!(l.pi_code, 8);
        assert!(l.pi_offset_ui() > start);
    }

    #[test]
    fn frozen_phase_keeps_pi() {
        let mut l = lane();
        l.update(out(-1, -1), false);
        for _ in 0..50 {
            for s in [out(1, -1), out(1, 1), out(-1, 1), out(-1, -1)] {
                l.update(s, false);
            }
        }
        assert_eq!(l.pi_code, 0);
        assert_eq!(l.take_batch_votes(), 200.0);
        assert_eq!(l.take_batch_votes(), 0.0);
    }

    #[test]
    fn fixed_tap_unless_adaptive() {
        let afe = AfeConfig {
            dfe_tap: 0.3,
            ..Default::default()
        };
        let l = LaneCdrState::new(&LaneConfig::default(), &afe);
        assert_eq!(l.dfe_tap_volts(&afe), 0.3);
        let mut cfg = LaneConfig::default();
        cfg.dfe_adapt = true;
        cfg.dfe_every = 1;
        let mut l = LaneCdrState::new(&cfg, &afe);
        let before = l.dfe_tap.as_ref().unwrap().code;
        for _ in 0..5 {
            // residual post-cursor: error agrees with previous decision
            l.update(out(1, 1), false);
        }
        assert!(l.dfe_tap.as_ref().unwrap().code > before);
    }
}
