use serde::{Deserialize, Serialize};

use super::SingleBitResponse;
use crate::{Error, Result};

/// One-zero / two-pole CTLE: `dc_gain * (1 + s/wz) / ((1 + s/wp1)(1 + s/wp2))`.
///
/// `pole2_hz` may be infinite to drop the second pole.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CtleParams {
    pub zero_hz: f64,
    pub pole1_hz: f64,
    pub pole2_hz: f64,
    pub dc_gain: f64,
}

impl CtleParams {
    pub fn validate(&self) -> Result<()> {
        let Self {
            zero_hz,
            pole1_hz,
            pole2_hz,
            dc_gain,
        } = *self;
        if !(zero_hz > 0.0 && zero_hz.is_finite()) {
            return Err(Error::Filter(format!(
                "zero must be a positive frequency, got {zero_hz}"
            )));
        }
        if !(pole1_hz >= zero_hz && pole1_hz.is_finite()) {
            return Err(Error::Filter(format!(
                "pole1 ({pole1_hz}) must be finite and not below the zero ({zero_hz})"
            )));
        }
        if !(pole2_hz > zero_hz) {
            return Err(Error::Filter(format!(
                "pole2 ({pole2_hz}) must lie above the zero ({zero_hz})"
            )));
        }
        if !(dc_gain > 0.0 && dc_gain.is_finite()) {
            return Err(Error::Filter(format!("dc gain must be positive, got {dc_gain}")));
        }
        Ok(())
    }

    /// Peaking (high-frequency over DC gain) in dB, ignoring pole2.
    pub fn peaking_db(&self) -> f64 {
        20.0 * (self.pole1_hz / self.zero_hz).log10()
    }
}

/// First-order bilinear section `(b0 + b1 z^-1) / (a0 + a1 z^-1)`.
struct Section {
    b0: f64,
    b1: f64,
    a0: f64,
    a1: f64,
}

impl Section {
    fn run(&self, x: &[f64]) -> Vec<f64> {
        let mut y = Vec::with_capacity(x.len());
        let (mut xp, mut yp) = (0.0, 0.0);
        for &xi in x {
            let yi = (self.b0 * xi + self.b1 * xp - self.a1 * yp) / self.a0;
            y.push(yi);
            xp = xi;
            yp = yi;
        }
        y
    }
}

/// Filter the SBR with the CTLE, discretized by the bilinear transform at the
/// SBR sample rate. `ui` is the unit interval in seconds. The output is
/// extended by four UI so the filter tail is kept, and the cursor is the new
/// argmax.
pub fn ctle_shape(sbr: &SingleBitResponse, p: &CtleParams, ui: f64) -> Result<SingleBitResponse> {
    p.validate()?;
    if !(ui > 0.0) {
        return Err(Error::range("ui", ui));
    }
    let os = sbr.oversampling();
    let fs = os as f64 / ui;
    let k = |f: f64| 2.0 * fs / (2.0 * std::f64::consts::PI * f);

    let mut x = sbr.samples().to_vec();
    x.extend(std::iter::repeat_n(0.0, 4 * os));

    let (a, c) = (k(p.zero_hz), k(p.pole1_hz));
    let lead = Section {
        b0: 1.0 + a,
        b1: 1.0 - a,
        a0: 1.0 + c,
        a1: 1.0 - c,
    };
    let mut y = if p.zero_hz == p.pole1_hz { x } else { lead.run(&x) };
    if p.pole2_hz.is_finite() {
        let d = k(p.pole2_hz);
        y = Section {
            b0: 1.0,
            b1: 1.0,
            a0: 1.0 + d,
            a1: 1.0 - d,
        }
        .run(&y);
    }
    y.iter_mut().for_each(|v| *v *= p.dc_gain);
    SingleBitResponse::with_samples(y, os)
}
