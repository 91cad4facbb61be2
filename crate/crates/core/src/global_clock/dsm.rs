use crate::{Error, Result};

pub const MMD_MIN: u32 = 8;
pub const MMD_MAX: u32 = 32;
/// Fractional bits of the modulator input word.
pub const DSM_FRAC_BITS: i32 = 32;

/// First-order delta-sigma step. Returns `(carry, residue)` where the residue
/// is the accumulator left after the carry, i.e. how far the MMD edge runs
/// ahead of the ideal fractional edge, in LC periods.
///
/// `frac` is quantized to a `DSM_FRAC_BITS` word, so the accumulator stays
/// on an exact binary grid and the carry density never drifts.
pub fn dsm_step(frac: f64, accum: &mut f64) -> Result<(u32, f64)> {
    if !(0.0..1.0).contains(&frac) {
        return Err(Error::range("frac", frac));
    }
    let scale = 2f64.powi(DSM_FRAC_BITS);
    let word = (frac * scale).round().min(scale - 1.0) / scale;
    *accum += word;
    let carry = accum.floor();
    *accum -= carry;
    Ok((carry as u32, *accum))
}

/// Output period of the multi-modulus divider for one cycle.
pub fn mmd_divide(modulus: u32, t_lc: f64) -> Result<f64> {
    if !(MMD_MIN..=MMD_MAX).contains(&modulus) {
        return Err(Error::range("MMD modulus", modulus));
    }
    Ok(f64::from(modulus) * t_lc)
}
