use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EcaConfig {
    pub enabled: bool,
    /// CLK_ECA delay when C_dly is switched in, UI.
    pub dither_delay_ui: f64,
    /// UI spent in each dither state.
    pub dither_period: u32,
    pub k_init: f64,
    pub k_step: f64,
    pub k_min: f64,
    pub k_max: f64,
    /// Snapshot difference (in codes) below which k is left alone.
    pub deadband: f64,
}

impl Default for EcaConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            dither_delay_ui: 1.0 / 32.0,
            dither_period: 8192,
            k_init: 1.0,
            k_step: 1.0 / 16.0,
            k_min: 1.0 / 8.0,
            k_max: 8.0,
            deadband: 0.0,
        }
    }
}

impl EcaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_min > 0.0 && self.k_min <= self.k_init && self.k_init <= self.k_max) {
            return Err(Error::Config(format!(
                "ECA needs 0 < k_min <= k_init <= k_max (got {}, {}, {})",
                self.k_min, self.k_init, self.k_max
            )));
        }
        if !(self.k_step > 0.0) {
            return Err(Error::range("k_step", self.k_step));
        }
        if self.dither_period < 64 {
            return Err(Error::range("dither_period", self.dither_period));
        }
        if !(self.dither_delay_ui >= 0.0 && self.dither_delay_ui < 0.5) {
            return Err(Error::range("dither_delay_ui", self.dither_delay_ui));
        }
        if !(self.deadband >= 0.0) {
            return Err(Error::range("deadband", self.deadband));
        }
        Ok(())
    }
}

/// Eye-climbing state. The dither alternates C_dly off and on, each for
/// `dither_period` UI; Pdlev is averaged over the second half of each state.
/// After each off/on pair the two averages are compared: a higher Pdlev with
/// the delayed clock means the eye rises to the right, so `k` is lowered.
#[derive(Clone, Debug, PartialEq)]
pub struct EcaState {
    pub k_ratio: f64,
    pub dither_on: bool,
    pub pdlev_snapshot_on: Option<f64>,
    pub pdlev_snapshot_off: Option<f64>,
    cfg: EcaConfig,
    ui_in_state: u32,
    sum: f64,
    count: u32,
}

impl EcaState {
    pub fn new(cfg: EcaConfig) -> Self {
        Self {
            k_ratio: cfg.k_init,
            dither_on: false,
            pdlev_snapshot_on: None,
            pdlev_snapshot_off: None,
            cfg,
            ui_in_state: 0,
            sum: 0.0,
            count: 0,
        }
    }

    pub fn config(&self) -> &EcaConfig {
        &self.cfg
    }

    /// Extra CLK_ECA delay currently applied, UI.
    pub fn extra_delay(&self) -> f64 {
        if self.cfg.enabled && self.dither_on {
            self.cfg.dither_delay_ui
        } else {
            0.0
        }
    }

    /// Feed the Pdlev code seen this UI.
    pub fn observe(&mut self, pdlev_code: u8) {
        if !self.cfg.enabled {
            return;
        }
        if self.ui_in_state >= self.cfg.dither_period / 2 {
            self.sum += f64::from(pdlev_code);
            self.count += 1;
        }
        self.ui_in_state += 1;
        if self.ui_in_state == self.cfg.dither_period {
            let snapshot = self.sum / f64::from(self.count.max(1));
            self.eca_step(snapshot);
        }
    }

    /// Dither-period boundary: record the averaged Pdlev of the state that
    /// just ended, toggle C_dly and, after an on/off pair, adjust `k`.
    pub fn eca_step(&mut self, snapshot: f64) {
        if self.dither_on {
            self.pdlev_snapshot_on = Some(snapshot);
        } else {
            self.pdlev_snapshot_off = Some(snapshot);
        }
        if self.dither_on {
            if let (Some(on), Some(off)) = (self.pdlev_snapshot_on, self.pdlev_snapshot_off) {
                let delta = on - off;
                if delta.abs() > self.cfg.deadband {
                    let step = if delta > 0.0 { -self.cfg.k_step } else { self.cfg.k_step };
                    self.k_ratio = (self.k_ratio + step).clamp(self.cfg.k_min, self.cfg.k_max);
                }
            }
        }
        self.dither_on = !self.dither_on;
        self.ui_in_state = 0;
        self.sum = 0.0;
        self.count = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on() -> EcaConfig {
        EcaConfig {
            enabled: true,
            ..Default::default()
        }
    }

    /// Feed one full off/on cycle with the given Pdlev codes.
    fn cycle(s: &mut EcaState, off: u8, on: u8) {
        for _ in 0..s.config().dither_period {
            s.observe(off);
        }
        assert!(s.dither_on);
        assert_eq!(s.extra_delay(), 1.0 / 32.0);
        for _ in 0..s.config().dither_period {
            s.observe(on);
        }
        assert!(!s.dither_on);
    }

    #[test]
    fn rising_eye_lowers_k() {
        let mut s = EcaState::new(on());
        let mut last = s.k_ratio;
        for _ in 0..5 {
            cycle(&mut s, 40, 41);
            assert!(s.k_ratio < last);
            last = s.k_ratio;
        }
        assert!((s.k_ratio - (1.0 - 5.0 / 16.0)).abs() < 1e-12);
    }

    #[test]
    fn falling_eye_raises_k_and_clamps() {
        let mut s = EcaState::new(on());
        for _ in 0..200 {
            cycle(&mut s, 41, 40);
        }
        assert_eq!(s.k_ratio, 8.0);
    }

    #[test]
    fn equal_snapshots_within_deadband_hold() {
        let mut s = EcaState::new(EcaConfig { deadband: 0.5, ..on() });
        for _ in 0..10 {
            cycle(&mut s, 40, 40);
        }
        assert_eq!(s.k_ratio, 1.0);
        let mut s = EcaState::new(on());
        cycle(&mut s, 33, 33);
        assert_eq!(s.k_ratio, 1.0);
    }

    #[test]
    fn apex_random_walk_stays_near_start() {
        let mut s = EcaState::new(on());
        // alternating sign of the observed slope
        for i in 0..50 {
            if i % 2 == 0 {
                cycle(&mut s, 40, 41)
            } else {
                cycle(&mut s, 41, 40)
            }
            assert!((s.k_ratio - 1.0).abs() <= 1.0 / 16.0 + 1e-12);
        }
    }

    #[test]
    fn only_second_half_is_averaged() {
        let mut s = EcaState::new(on());
        let p = s.config().dither_period;
        for i in 0..p {
            s.observe(if i < p / 2 { 0 } else { 30 });
        }
        assert_eq!(s.pdlev_snapshot_off, Some(30.0));
    }

    #[test]
    fn disabled_never_dithers() {
        let mut s = EcaState::new(EcaConfig::default());
        for _ in 0..100_000 {
            s.observe(10);
        }
        assert_eq!(s.extra_delay(), 0.0);
        assert_eq!(s.k_ratio, 1.0);
    }
}
