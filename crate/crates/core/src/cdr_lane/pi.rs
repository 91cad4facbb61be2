use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PiMode {
    Ideal,
    /// Uniformly weighted quadrature interpolation: the output phasor walks a
    /// diamond, so the phase of step `k` in a quadrant is `atan(k / (N - k))`.
    Diamond,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PiModel {
    pub bits: u32,
    pub mode: PiMode,
}

impl Default for PiModel {
    fn default() -> Self {
        Self {
            bits: 8,
            mode: PiMode::Ideal,
        }
    }
}

impl PiModel {
    pub fn validate(&self) -> Result<()> {
        if !(2..=16).contains(&self.bits) {
            return Err(Error::range("PI bits", self.bits));
        }
        Ok(())
    }

    pub fn codes(&self) -> u32 {
        1 << self.bits
    }

    /// Codes per quadrant, N.
    pub fn phases_per_quadrant(&self) -> u32 {
        1 << (self.bits - 2)
    }
}

/// Output phase of `code` as a fraction of one full PI rotation.
pub fn pi_phase(code: u32, model: &PiModel) -> f64 {
    let code = code % model.codes();
    match model.mode {
        PiMode::Ideal => f64::from(code) / f64::from(model.codes()),
        PiMode::Diamond => {
            let n = model.phases_per_quadrant();
            let (q, k) = (code / n, code % n);
            let frac = f64::from(k).atan2(f64::from(n - k)) / std::f64::consts::FRAC_PI_2;
            (f64::from(q) + frac) / 4.0
        }
    }
}
