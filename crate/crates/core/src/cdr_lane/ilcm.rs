use serde::{Deserialize, Serialize};

use crate::global_clock::{bbpd_vote, BbVote};

/// Behavioral injection-locked clock multiplier at reference-edge granularity.
///
/// Between injections the oscillator free-runs for one (trimmed) reference
/// period; at each injection its phase is pulled towards the reference edge
/// by `realign_beta`, and the bang-bang comparison of the two edges trims the
/// free-running period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IlcmState {
    pub mult_ratio: u32,
    pub realign_beta: f64,
    /// Time of the last realigned oscillator edge (same units as the reference edges).
    pub osc_phase: f64,
    /// Relative trim of the free-running period.
    pub freq_track_accum: f64,
    /// Trim applied per bang-bang decision.
    pub track_gain: f64,
}

impl IlcmState {
    pub fn new(mult_ratio: u32, realign_beta: f64, track_gain: f64) -> Self {
        assert!(
            realign_beta > 0.0 && realign_beta <= 1.0,
            "realign_beta must be in (0, 1]"
        );
        Self {
            mult_ratio,
            realign_beta,
            osc_phase: 0.0,
            freq_track_accum: 0.0,
            track_gain,
        }
    }

    /// Free-running oscillator period for a nominal reference period.
    pub fn period(&self, nominal_ref_period: f64) -> f64 {
        nominal_ref_period * (1.0 + self.freq_track_accum)
    }
}

/// Advance to the next reference edge at `ref_edge` (nominal spacing
/// `ref_period`). Returns the bang-bang comparison of the reference edge
/// against the free-running prediction.
pub fn ilcm_step(ilcm: &mut IlcmState, ref_edge: f64, ref_period: f64) -> BbVote {
    let predicted = ilcm.osc_phase + ilcm.period(ref_period);
    let vote = bbpd_vote(ref_edge, predicted);
    ilcm.osc_phase = predicted + ilcm.realign_beta * (ref_edge - predicted);
    // reference early -> free-running period too long
    ilcm.freq_track_accum += match vote {
        BbVote::Early => -ilcm.track_gain,
        BbVote::Late => ilcm.track_gain,
    };
    vote
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_realignment_follows_reference() {
        let mut s = IlcmState::new(16, 1.0, 0.0);
        for k in 1..100 {
            let edge = k as f64 * 32.0 + 0.01 * (k as f64).sin();
            ilcm_step(&mut s, edge, 32.0);
            assert_eq!(s.osc_phase, edge);
        }
    }

    #[test]
    fn half_realignment_halves_error() {
        let mut s = IlcmState::new(16, 0.5, 0.0);
        s.osc_phase = 0.4;
        let mut err = 0.4;
        for k in 1..20 {
            ilcm_step(&mut s, k as f64 * 32.0, 32.0);
            let e = s.osc_phase - k as f64 * 32.0;
            assert!((e - err / 2.0).abs() < 1e-12);
            err = e;
        }
    }

    /// Constant frequency offset with no trim: e[k+1] = (1 - beta)(e[k] - delta)
    /// settles at -(1 - beta) * delta / beta.
    #[test]
    fn ramp_settles_to_offset_over_beta() {
        for beta in [0.25, 0.5, 0.8] {
            let mut s = IlcmState::new(16, beta, 0.0);
            let delta = 0.003;
            for k in 1..400 {
                ilcm_step(&mut s, k as f64 * (32.0 + delta), 32.0);
            }
            let e = s.osc_phase - 399.0 * (32.0 + delta);
            let expect = -(1.0 - beta) * delta / beta;
            assert!((e - expect).abs() < 1e-9, "beta {beta}: {e} vs {expect}");
        }
    }

    #[test]
    fn frequency_trim_removes_ramp_error() {
        let mut s = IlcmState::new(16, 0.5, 1e-6);
        let delta = 0.003;
        for k in 1..200_000 {
            ilcm_step(&mut s, k as f64 * (32.0 + delta), 32.0);
        }
        assert!((s.period(32.0) - (32.0 + delta)).abs() < 1e-3 * delta.max(1e-4) * 100.0);
    }
}
