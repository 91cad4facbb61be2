//! Measurement engines and the brute-force oracles they are checked against.

mod bathtub;
mod eye;
mod jtol;
mod spectrum;
mod vem;

pub use bathtub::{wilson_upper, BathtubCurve, BathtubPoint};
pub use eye::{measure_vem, EyeDiagram};
pub use jtol::{jtol_search, JtolCurve, JtolPoint};
pub use spectrum::{detrend, spectrum, PhaseSpectrum, Spur, MIN_SPECTRUM_LEN};
pub use vem::{argmax_vem, cursor_crossing, vem_at, vem_vs_phase};
