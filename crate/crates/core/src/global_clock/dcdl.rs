use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DCDL_BITS: u32 = 9;
pub const DCDL_MAX_CODE: u32 = (1 << DCDL_BITS) - 1;

/// Bang-bang phase detector decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BbVote {
    Early,
    Late,
}

impl BbVote {
    pub fn sign(self) -> f64 {
        match self {
            BbVote::Early => 1.0,
            BbVote::Late => -1.0,
        }
    }
}

/// `Early` when edge `a` does not come after edge `b`.
pub fn bbpd_vote(a: f64, b: f64) -> BbVote {
    if a <= b {
        BbVote::Early
    } else {
        BbVote::Late
    }
}

/// Quantized delay-line control word for one FDIV cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DcdlCode {
    pub dcw: u32,
    /// The requested delay exceeded the line's range.
    pub clamped: bool,
}

/// Control word that cancels `residue` LC periods with gain estimate `k_dcdl`
/// (time per LSB, same unit as `t_lc`).
pub fn dcdl_delay(residue: f64, k_dcdl: f64, t_lc: f64) -> Result<DcdlCode> {
    if !(k_dcdl > 0.0) {
        return Err(Error::range("k_dcdl", k_dcdl));
    }
    let want = (residue * t_lc / k_dcdl).round();
    let dcw = want.clamp(0.0, f64::from(DCDL_MAX_CODE));
    Ok(DcdlCode {
        dcw: dcw as u32,
        clamped: dcw != want,
    })
}

/// The simulated delay line: `k_true * dcw` plus a parabolic INL bow that is
/// zero at both ends and `inl_bow_lsb` LSB at mid-code.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcdlPlant {
    pub k_true: f64,
    pub inl_bow_lsb: f64,
}

impl DcdlPlant {
    pub fn delay(&self, dcw: u32) -> f64 {
        let x = f64::from(dcw) / f64::from(DCDL_MAX_CODE);
        self.k_true * (f64::from(dcw) + self.inl_bow_lsb * 4.0 * x * (1.0 - x))
    }
}

/// Sign-sign LMS update of the delay-line gain estimate. `vote` compares the
/// FDIV edge against the free-running expectation: an early edge after the
/// code went up means the line delivered too little delay per LSB, so the
/// estimate (which sets codes as `delay / k`) is too large.
///
/// Returns the new estimate and whether the floor clamp engaged.
pub fn kdcdl_calibrate(k_dcdl: f64, vote: BbVote, dcw: u32, dcw_prev: u32, mu: f64, floor: f64) -> (f64, bool) {
    let dir = (i64::from(dcw) - i64::from(dcw_prev)).signum() as f64;
    let k = k_dcdl - mu * vote.sign() * dir;
    if k < floor {
        (floor, true)
    } else {
        (k, false)
    }
}
