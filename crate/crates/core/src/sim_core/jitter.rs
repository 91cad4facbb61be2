use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Random plus sinusoidal jitter, applied to the RX sampling instant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JitterSpec {
    /// UI rms
    pub rj_sigma: f64,
    /// UI peak
    pub sj_amplitude: f64,
    /// Hz
    pub sj_frequency: f64,
}

impl JitterSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rj_sigma >= 0.0) {
            return Err(Error::range("rj_sigma", self.rj_sigma));
        }
        if !(self.sj_amplitude >= 0.0) {
            return Err(Error::range("sj_amplitude", self.sj_amplitude));
        }
        Ok(())
    }
}

/// Jitter in UI at UI index `n` for a link with unit interval `ui` seconds.
pub fn jitter_offset<R: Rng + ?Sized>(spec: &JitterSpec, n: u64, ui: f64, rng: &mut R) -> f64 {
    let sj = if spec.sj_amplitude > 0.0 {
        spec.sj_amplitude * (2.0 * std::f64::consts::PI * spec.sj_frequency * n as f64 * ui).sin()
    } else {
        0.0
    };
    let rj = if spec.rj_sigma > 0.0 {
        Normal::new(0.0, spec.rj_sigma).map(|d| d.sample(rng)).unwrap_or(0.0)
    } else {
        0.0
    };
    sj + rj
}
