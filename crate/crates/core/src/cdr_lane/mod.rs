//! Per-lane timing recovery.
//!
//! Each lane runs the modified sign-sign Mueller-Müller detector on the data
//! and PD-error samplers, adapts Dlev (towards h0) and Pdlev (towards the
//! eye-margin level of the `-1,+1,-1` pattern), and steers its phase
//! interpolator through a weighted proportional path. The eye-climbing loop
//! retunes the up:dn weight `k` so the lock settles at maximum Pdlev.

mod adapt;
mod eca;
mod ilcm;
mod lane;
mod mmpd;
mod pi;
mod proportional;

pub use adapt::{bdlev_update, dfe_tap_adapt, dlev_update, pdlev_update, LevelLoop, PDLEV_PATTERN};
pub use eca::{EcaConfig, EcaState};
pub use ilcm::{ilcm_step, IlcmState};
pub use lane::{LaneCdrState, LaneConfig, LaneStep};
pub use mmpd::{mmpd_vote, Vote};
pub use pi::{pi_phase, PiMode, PiModel};
pub use proportional::{proportional_update, ProportionalPath};
