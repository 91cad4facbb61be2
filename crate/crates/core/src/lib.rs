//! Behavioral, discrete-time model of a multi-lane baud-rate CDR receiver.
//!
//! The crate is organized the way the receiver is:
//!
//! * [`sim_core`]: stimulus (PRBS), channel single-bit response, CTLE, jitter.
//! * [`afe`]: 1-tap DFE, slicers and the 6-bit reference DACs.
//! * [`cdr_lane`]: per-lane timing recovery (sign-sign Mueller-Müller voting,
//!   level adaptation, eye-climbing, phase interpolator, ILCM).
//! * [`global_clock`]: shared frequency tracking through the fractional
//!   divider (DSM + MMD + DCDL) and DCDL gain calibration.
//! * [`metrics`]: eye, VEM, bathtub, phase spectrum and JTOL engines.
//! * [`harness`]: scenario configuration, the 4-lane simulation loop, reports.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod afe;
pub mod cdr_lane;
mod error;
pub mod global_clock;
pub mod harness;
pub mod metrics;
pub mod sim_core;

pub use error::{Error, Result};
