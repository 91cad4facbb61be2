use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// TX data clock relative to the RX reference.
///
/// A positive `ppm_offset` means the TX unit interval is longer than nominal,
/// so the fractional divider must divide by `16 * (1 + ppm * 1e-6)` to match.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClockDomain {
    pub nominal_ui: f64,
    pub ppm_offset: f64,
}

impl ClockDomain {
    pub fn new(nominal_ui: f64, ppm_offset: f64) -> Result<Self> {
        let c = Self { nominal_ui, ppm_offset };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nominal_ui > 0.0) {
            return Err(Error::range("nominal_ui", self.nominal_ui));
        }
        if !(self.ppm_offset.abs() <= 10_000.0) {
            return Err(Error::range("ppm_offset", self.ppm_offset));
        }
        Ok(())
    }

    /// TX unit interval in units of the nominal RX UI.
    pub fn tx_ui(&self) -> f64 {
        1.0 + self.ppm_offset * 1e-6
    }
}

impl Default for ClockDomain {
    fn default() -> Self {
        // 32 Gb/s
        Self {
            nominal_ui: 31.25e-12,
            ppm_offset: 0.0,
        }
    }
}
