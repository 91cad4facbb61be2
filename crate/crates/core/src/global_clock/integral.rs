use serde::{Deserialize, Serialize};

/// Shared integral path. `freq_accum` is the division-ratio correction added
/// to the nominal fractional word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralPathState {
    pub freq_accum: f64,
    /// Ratio change per unit of net vote.
    pub ki: f64,
    /// Symmetric bound on `freq_accum`.
    pub clamp: f64,
    /// Net vote of the last batch, all lanes.
    pub lane_vote_sum: f64,
    /// Set once the clamp has engaged.
    pub saturated: bool,
}

impl IntegralPathState {
    pub fn new(ki: f64, clamp: f64) -> Self {
        Self {
            freq_accum: 0.0,
            ki,
            clamp,
            lane_vote_sum: 0.0,
            saturated: false,
        }
    }
}

/// Fold one batch of per-lane net votes into the integrator and return the
/// new fractional control word `nominal_frac + freq_accum`.
pub fn integral_accumulate(state: &mut IntegralPathState, votes: &[f64], nominal_frac: f64) -> f64 {
    let sum: f64 = votes.iter().sum();
    state.lane_vote_sum = sum;
    let next = state.freq_accum + state.ki * sum;
    if next.abs() > state.clamp {
        state.saturated = true;
        state.freq_accum = next.clamp(-state.clamp, state.clamp);
    } else {
        state.freq_accum = next;
    }
    nominal_frac + state.freq_accum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_votes_hold() {
        let mut s = IntegralPathState::new(1e-3, 1.0);
        for _ in 0..10 {
            assert_eq!(integral_accumulate(&mut s, &[0.0; 4], 0.04), 0.04);
        }
    }

    #[test]
    fn linear_ramp() {
        let mut s = IntegralPathState::new(1e-3, 1.0);
        for b in 1..=50 {
            let f = integral_accumulate(&mut s, &[1.0], 0.0);
            assert!((f - b as f64 * 1e-3).abs() < 1e-12);
        }
    }

    #[test]
    fn lanes_add() {
        let mut one = IntegralPathState::new(1e-3, 1.0);
        let mut four = IntegralPathState::new(1e-3, 1.0);
        integral_accumulate(&mut one, &[3.0], 0.0);
        integral_accumulate(&mut four, &[3.0; 4], 0.0);
        assert!((four.freq_accum - 4.0 * one.freq_accum).abs() < 1e-15);
        assert_eq!(four.lane_vote_sum, 12.0);
    }

    #[test]
    fn clamp_flags() {
        let mut s = IntegralPathState::new(0.1, 0.25);
        for _ in 0..5 {
            integral_accumulate(&mut s, &[1.0], 0.0);
        }
        assert_eq!(s.freq_accum, 0.25);
        assert!(s.saturated);
    }
}
