use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polynomial {
    /// x^7 + x^6 + 1
    Prbs7,
    /// x^31 + x^28 + 1
    Prbs31,
}

impl Polynomial {
    pub fn degree(self) -> u32 {
        match self {
            Polynomial::Prbs7 => 7,
            Polynomial::Prbs31 => 31,
        }
    }

    fn taps(self) -> (u32, u32) {
        match self {
            Polynomial::Prbs7 => (7, 6),
            Polynomial::Prbs31 => (31, 28),
        }
    }

    pub fn period(self) -> u64 {
        (1u64 << self.degree()) - 1
    }
}

/// Fibonacci LFSR. The output bit is the register MSB shifted out on each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrbsState {
    register: u32,
    polynomial: Polynomial,
}

impl PrbsState {
    pub fn new(polynomial: Polynomial, seed: u32) -> Result<Self> {
        let mask = ((1u64 << polynomial.degree()) - 1) as u32;
        let register = seed & mask;
        if register == 0 {
            return Err(Error::Config("PRBS seed must not be all-zero".into()));
        }
        Ok(Self { register, polynomial })
    }

    pub fn register(&self) -> u32 {
        self.register
    }

    pub fn polynomial(&self) -> Polynomial {
        self.polynomial
    }

    /// Advance one step and return the output bit as ±1.
    pub fn next_bit(&mut self) -> i8 {
        let n = self.polynomial.degree();
        let (a, b) = self.polynomial.taps();
        let r = self.register;
        let out = (r >> (n - 1)) & 1;
        let fb = ((r >> (a - 1)) ^ (r >> (b - 1))) & 1;
        let mask = ((1u64 << n) - 1) as u32;
        self.register = ((r << 1) | fb) & mask;
        if out == 1 {
            1
        } else {
            -1
        }
    }
}

/// Free-function form of [`PrbsState::next_bit`].
pub fn prbs_next(state: &mut PrbsState) -> i8 {
    state.next_bit()
}

impl Iterator for PrbsState {
    type Item = i8;

    fn next(&mut self) -> Option<i8> {
        Some(self.next_bit())
    }
}
