use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::afe::AfeConfig;
use crate::cdr_lane::LaneConfig;
use crate::global_clock::FdivConfig;
use crate::sim_core::{ctle_shape, ClockDomain, CtleParams, JitterSpec, Polynomial, SingleBitResponse};
use crate::{Error, Result};

pub const MAX_LANES: usize = 4;
/// UI per deserialized word; lanes exchange votes at this cadence.
pub const BATCH_UI: u64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// Two coincident poles sized by Nyquist loss.
    TwoPole,
    /// UI-spaced cursor list joined linearly.
    Taps,
    /// Oversampled response from a CSV file.
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub loss_db: f64,
    /// Peak of the single-bit response, volts.
    pub peak: f64,
    pub span_ui: usize,
    pub oversampling: usize,
    pub taps: Vec<f64>,
    pub main: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ctle: Option<CtleParams>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            kind: ChannelKind::TwoPole,
            loss_db: 12.0,
            peak: 0.6,
            span_ui: 12,
            oversampling: 32,
            taps: vec![0.1, 0.6, 0.2],
            main: 1,
            path: None,
            ctle: None,
        }
    }
}

impl ChannelConfig {
    /// Single-bit response seen by the samplers (after the optional CTLE).
    pub fn build(&self, nominal_ui: f64) -> Result<SingleBitResponse> {
        let raw = match self.kind {
            ChannelKind::TwoPole => {
                SingleBitResponse::two_pole_lowpass(self.loss_db, self.peak, self.span_ui, self.oversampling)?
            }
            ChannelKind::Taps => SingleBitResponse::from_taps(&self.taps, self.main, self.oversampling)?,
            ChannelKind::Csv => {
                let p = self
                    .path
                    .as_ref()
                    .ok_or_else(|| Error::Config("channel.path missing".into()))?;
                SingleBitResponse::read_csv(p)?
            }
        };
        match &self.ctle {
            Some(c) => ctle_shape(&raw, c, nominal_ui),
            None => Ok(raw),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_ui: u64,
    /// UI of adaptation before any metric accumulates.
    pub warmup_ui: u64,
    pub lanes: usize,
    pub polynomial: Polynomial,
    /// Static channel delay of each lane, UI.
    pub lane_skew_ui: Vec<f64>,
    pub channel: ChannelConfig,
    pub clock: ClockDomain,
    pub jitter: JitterSpec,
    pub afe: AfeConfig,
    pub lane: LaneConfig,
    pub fdiv: FdivConfig,
    pub telemetry: TelemetryConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TelemetryConfig {
    /// Per-lane CSV row every this many UI (0: off).
    pub lane_decimation: u64,
    /// Per-batch global-clock CSV rows (0: off).
    pub global_decimation: u64,
    /// Keep per-batch phase traces in memory for spectrum analysis.
    pub traces: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_ui: 600_000,
            warmup_ui: 200_000,
            lanes: 4,
            polynomial: Polynomial::Prbs31,
            lane_skew_ui: vec![0.0, 0.27, 0.51, 0.78],
            channel: ChannelConfig::default(),
            clock: ClockDomain {
                nominal_ui: 31.25e-12,
                ppm_offset: 0.0,
            },
            jitter: JitterSpec::default(),
            afe: AfeConfig::default(),
            lane: LaneConfig::default(),
            fdiv: FdivConfig::default(),
            telemetry: TelemetryConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// SHA-256 of the canonical TOML serialization, hex.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml_string()?.as_bytes())))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_LANES).contains(&self.lanes) {
            return Err(Error::range("lanes", self.lanes));
        }
        if self.n_ui <= self.warmup_ui {
            return Err(Error::Config(format!(
                "n_ui ({}) must exceed warmup_ui ({})",
                self.n_ui, self.warmup_ui
            )));
        }
        if self.lane_skew_ui.len() < self.lanes {
            return Err(Error::Config(format!(
                "lane_skew_ui has {} entries for {} lanes",
                self.lane_skew_ui.len(),
                self.lanes
            )));
        }
        if 2 * u64::from(self.fdiv.mult_ratio) != BATCH_UI {
            return Err(Error::Config(format!(
                "mult_ratio {} does not give {BATCH_UI} UI per reference cycle",
                self.fdiv.mult_ratio
            )));
        }
        if let Some(c) = &self.channel.ctle {
            c.validate()?;
        }
        self.clock.validate()?;
        self.jitter.validate()?;
        self.afe.validate()?;
        self.lane.validate()?;
        self.fdiv.validate()?;
        Ok(())
    }

    /// Measurement window length, UI.
    pub fn measure_ui(&self) -> u64 {
        self.n_ui - self.warmup_ui
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = ScenarioConfig::default();
        c.validate().unwrap();
        let s = c.to_toml_string().unwrap();
        let back = ScenarioConfig::from_toml_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c = ScenarioConfig::from_toml_str(
            "seed = 9\nlanes = 2\n[clock]\nnominal_ui = 31.25e-12\nppm_offset = 2500.0\n",
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.lanes, 2);
        assert_eq!(c.clock.ppm_offset, 2500.0);
        assert_eq!(c.fdiv, FdivConfig::default());
    }

    #[test]
    fn invalid_configs() {
        assert!(ScenarioConfig::from_toml_str("lanes = 5").is_err());
        assert!(ScenarioConfig::from_toml_str("n_ui = 10\nwarmup_ui = 10").is_err());
        assert!(ScenarioConfig::from_toml_str("[fdiv]\ndiv_int = 7").is_err());
        assert!(ScenarioConfig::from_toml_str("bogus = [").is_err());
    }

    #[test]
    fn hash_changes_with_content() {
        let a = ScenarioConfig::default();
        let mut b = a.clone();
        b.seed = 2;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }
}
