//! Stimulus and channel: transmitted bits, the single-bit response, receive
//! waveform evaluation at arbitrary phase, jitter and the TX/RX clock domains.

mod bits;
mod clock;
mod ctle;
mod jitter;
mod prbs;
mod sbr;
pub(crate) mod waveform;

pub use bits::BitStream;
pub use clock::ClockDomain;
pub use ctle::{ctle_shape, CtleParams};
pub use jitter::{jitter_offset, JitterSpec};
pub use prbs::{prbs_next, Polynomial, PrbsState};
pub use sbr::{SingleBitResponse, DEFAULT_OVERSAMPLING};
pub use waveform::{waveform_value, BitWindow};
