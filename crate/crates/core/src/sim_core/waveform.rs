use super::SingleBitResponse;
use crate::{Error, Result};

/// A slice of transmitted bits (±1) with `center` marking x_n.
#[derive(Clone, Copy, Debug)]
pub struct BitWindow<'a> {
    pub bits: &'a [i8],
    pub center: usize,
}

impl<'a> BitWindow<'a> {
    pub fn new(bits: &'a [i8], center: usize) -> Self {
        Self { bits, center }
    }
}

/// Receive-waveform value `sum_k x_{n-k} * sbr(k + phase)` for `phase` in [0, 1).
pub fn waveform_value(sbr: &SingleBitResponse, window: BitWindow<'_>, phase: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&phase) {
        return Err(Error::range("phase", phase));
    }
    let (lo, hi) = sbr.cursor_span();
    let c = window.center as i64;
    // x_{n-k} for k in lo..=hi
    let need_lo = c - hi;
    let need_hi = c - lo;
    if need_lo < 0 || need_hi >= window.bits.len() as i64 {
        return Err(Error::WindowTooShort {
            need_lo,
            need_hi,
            have: window.bits.len(),
        });
    }
    Ok(superpose(sbr, phase, |k| window.bits[(c - k) as usize]))
}

/// Unchecked superposition over the SBR cursor span; `x(k)` returns x_{n-k}.
#[inline]
pub(crate) fn superpose(sbr: &SingleBitResponse, phase: f64, x: impl Fn(i64) -> i8) -> f64 {
    let (lo, hi) = sbr.cursor_span();
    (lo..=hi)
        .map(|k| f64::from(x(k)) * sbr.value_at(k as f64 + phase))
        .sum()
}
