//! Behavioral analog front-end: 1-tap DFE summer, three slicers and the
//! 6-bit reference DACs that set Dlev and Pdlev.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::sim_core::{waveform::superpose, BitWindow, SingleBitResponse};
use crate::{Error, Result};

pub const DAC_BITS: u32 = 6;
pub const DAC_MAX_CODE: u8 = (1 << DAC_BITS) - 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AfeConfig {
    /// Volts subtracted per previous decision.
    pub dfe_tap: f64,
    pub sampler_noise_sigma: f64,
    /// Input-referred offsets of the data, PD-error and eye-monitor samplers.
    pub sampler_offset: [f64; 3],
    pub dac_fullscale: f64,
    pub dac_bits: u32,
}

impl Default for AfeConfig {
    fn default() -> Self {
        Self {
            dfe_tap: 0.0,
            sampler_noise_sigma: 0.0,
            sampler_offset: [0.0; 3],
            dac_fullscale: 0.75,
            dac_bits: DAC_BITS,
        }
    }
}

impl AfeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dac_bits != DAC_BITS {
            return Err(Error::range("dac_bits", self.dac_bits));
        }
        if !(self.sampler_noise_sigma >= 0.0) {
            return Err(Error::range("sampler_noise_sigma", self.sampler_noise_sigma));
        }
        if !(self.dac_fullscale > 0.0) {
            return Err(Error::range("dac_fullscale", self.dac_fullscale));
        }
        Ok(())
    }

    pub fn dac_lsb(&self) -> f64 {
        self.dac_fullscale / f64::from(DAC_MAX_CODE)
    }

    /// Nearest DAC code for a voltage, saturated to the code range.
    pub fn dac_code_for(&self, volts: f64) -> u8 {
        (volts / self.dac_lsb()).round().clamp(0.0, f64::from(DAC_MAX_CODE)) as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerOutputs {
    pub d: i8,
    pub e_pd: i8,
    pub e_em: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampler {
    Data = 0,
    PhaseError = 1,
    EyeMonitor = 2,
}

pub fn dfe_apply(v_in: f64, prev_bit: i8, tap: f64) -> f64 {
    v_in - f64::from(prev_bit) * tap
}

/// Comparator decision `sign(v - vref + offset + noise)`; exact zero resolves to +1.
pub fn sampler_decide<R: Rng + ?Sized>(v: f64, vref: f64, cfg: &AfeConfig, which: Sampler, rng: &mut R) -> i8 {
    let noise = if cfg.sampler_noise_sigma > 0.0 {
        let z: f64 = StandardNormal.sample(rng);
        z * cfg.sampler_noise_sigma
    } else {
        0.0
    };
    if v - vref + cfg.sampler_offset[which as usize] + noise >= 0.0 {
        1
    } else {
        -1
    }
}

pub fn dac_voltage(code: u8, cfg: &AfeConfig) -> Result<f64> {
    if code > DAC_MAX_CODE {
        return Err(Error::range("DAC code", code));
    }
    Ok(cfg.dac_fullscale * f64::from(code) / f64::from(DAC_MAX_CODE))
}

/// Slice pre-computed summer inputs. `v_clk` is the waveform at CLK and
/// `v_eca` at CLK_ECA, both before DFE correction.
pub fn slice_three<R: Rng + ?Sized>(
    v_clk: f64,
    v_eca: f64,
    dlev: f64,
    pdlev: f64,
    prev_bit: i8,
    cfg: &AfeConfig,
    rng: &mut R,
) -> SamplerOutputs {
    let a = dfe_apply(v_clk, prev_bit, cfg.dfe_tap);
    let b = dfe_apply(v_eca, prev_bit, cfg.dfe_tap);
    let d = sampler_decide(a, 0.0, cfg, Sampler::Data, rng);
    let s = f64::from(d);
    let e_pd = sampler_decide(a, dlev * s, cfg, Sampler::PhaseError, rng);
    let e_em = sampler_decide(b, pdlev * s, cfg, Sampler::EyeMonitor, rng);
    SamplerOutputs { d, e_pd, e_em }
}

/// Three-sampler stage on a bit window: data and PD-error samplers at
/// `clk_phase`, eye monitor at `clk_phase + eca_extra_delay`. Error samplers
/// compare against their reference scaled by the concurrent data decision.
#[allow(clippy::too_many_arguments)]
pub fn sample_three<R: Rng + ?Sized>(
    window: BitWindow<'_>,
    sbr: &SingleBitResponse,
    clk_phase: f64,
    eca_extra_delay: f64,
    dlev_code: u8,
    pdlev_code: u8,
    prev_bit: i8,
    cfg: &AfeConfig,
    rng: &mut R,
) -> Result<SamplerOutputs> {
    if !(0.0..1.0).contains(&clk_phase) {
        return Err(Error::range("clk_phase", clk_phase));
    }
    if !(eca_extra_delay >= 0.0) {
        return Err(Error::range("eca_extra_delay", eca_extra_delay));
    }
    let v_clk = crate::sim_core::waveform_value(sbr, window, clk_phase)?;
    // CLK_ECA may run past the UI boundary; the window check above covers
    // the SBR span so evaluate the delayed instant directly.
    let c = window.center as i64;
    let (lo, hi) = sbr.cursor_span();
    if c - hi - 1 < 0 || c - lo + 1 >= window.bits.len() as i64 {
        return Err(Error::WindowTooShort {
            need_lo: c - hi - 1,
            need_hi: c - lo + 1,
            have: window.bits.len(),
        });
    }
    let t = clk_phase + eca_extra_delay;
    let shift = t.floor() as i64;
    let v_eca = superpose(sbr, t - shift as f64, |k| window.bits[(c - k + shift) as usize]);
    let v_eca = if shift == 0 && eca_extra_delay == 0.0 {
        v_clk
    } else {
        v_eca
    };
    Ok(slice_three(
        v_clk,
        v_eca,
        dac_voltage(dlev_code, cfg)?,
        dac_voltage(pdlev_code, cfg)?,
        prev_bit,
        cfg,
        rng,
    ))
}
