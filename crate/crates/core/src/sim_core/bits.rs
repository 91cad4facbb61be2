use super::{Polynomial, PrbsState};
use crate::Result;

const CAPACITY: usize = 1 << 14;

/// Lazily generated transmit bit stream addressable by absolute UI index.
///
/// Indices below the already-generated window by more than the ring capacity
/// are gone; the simulator only ever looks a few dozen UI back.
#[derive(Clone, Debug)]
pub struct BitStream {
    prbs: PrbsState,
    ring: Vec<i8>,
    /// absolute index of the next bit to generate
    next: i64,
    first: i64,
}

impl BitStream {
    pub fn new(polynomial: Polynomial, seed: u32, first_index: i64) -> Result<Self> {
        Ok(Self {
            prbs: PrbsState::new(polynomial, seed)?,
            ring: vec![0; CAPACITY],
            next: first_index,
            first: first_index,
        })
    }

    /// Make sure bits up to and including `index` exist.
    #[inline]
    pub fn ensure(&mut self, index: i64) {
        while self.next <= index {
            let b = self.prbs.next_bit();
            self.ring[(self.next as usize) & (CAPACITY - 1)] = b;
            self.next += 1;
        }
    }

    /// Bit at `index`; must be within the generated window.
    #[inline]
    pub fn get(&self, index: i64) -> i8 {
        debug_assert!(index < self.next && index >= self.first && index > self.next - CAPACITY as i64);
        self.ring[(index as usize) & (CAPACITY - 1)]
    }

    pub fn first_index(&self) -> i64 {
        self.first
    }
}
