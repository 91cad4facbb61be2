//! Global frequency tracking shared by all lanes.
//!
//! Lanes hand their net phase votes to a common integral path once per
//! deserialized word. The integral path steers a fractional divider built from
//! a first-order delta-sigma modulator, a multi-modulus divider and a
//! digitally controlled delay line that cancels the modulator's phase residue.
//! The delay-line gain is learned in the background from bang-bang decisions
//! made against the injection-locked multiplier.

mod dcdl;
mod dsm;
mod fdiv;
mod integral;

pub use dcdl::{bbpd_vote, dcdl_delay, kdcdl_calibrate, BbVote, DcdlCode, DcdlPlant, DCDL_BITS, DCDL_MAX_CODE};
pub use dsm::{dsm_step, mmd_divide, DSM_FRAC_BITS, MMD_MAX, MMD_MIN};
pub use fdiv::{FdivConfig, FdivEdge, FdivState};
pub use integral::{integral_accumulate, IntegralPathState};
