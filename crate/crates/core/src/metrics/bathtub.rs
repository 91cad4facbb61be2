use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Wilson score upper bound on a binomial proportion at `z` sigmas.
pub fn wilson_upper(errors: u64, n: u64, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let n_f = n as f64;
    let p = errors as f64 / n_f;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n_f);
    let spread = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((centre + spread) / (1.0 + z2 / n_f)).min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathtubPoint {
    /// Sampling offset from the locked phase, UI.
    pub phase: f64,
    pub errors: u64,
    pub bits: u64,
}

impl BathtubPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            return 1.0;
        }
        self.errors as f64 / self.bits as f64
    }

    /// 95% confidence upper bound; error-free points use the rule of three.
    pub fn upper(&self) -> f64 {
        if self.bits == 0 {
            1.0
        } else if self.errors == 0 {
            (3.0 / self.bits as f64).min(1.0)
        } else {
            wilson_upper(self.errors, self.bits, 1.96)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BathtubCurve {
    pub points: Vec<BathtubPoint>,
}

impl BathtubCurve {
    /// Build from points whose phases must be strictly increasing.
    pub fn new(points: Vec<BathtubPoint>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].phase > w[0].phase)) {
            return Err(Error::Config("bathtub phases must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// Add the counts of a curve measured on the same phase grid.
    pub fn merge(&mut self, other: &BathtubCurve) -> Result<()> {
        if self.points.len() != other.points.len()
            || self.points.iter().zip(&other.points).any(|(a, b)| a.phase != b.phase)
        {
            return Err(Error::Config("bathtub curves on different phase grids".into()));
        }
        for (a, b) in self.points.iter_mut().zip(&other.points) {
            a.errors += b.errors;
            a.bits += b.bits;
        }
        Ok(())
    }

    /// Width of the contiguous region around the lowest-BER point whose BER
    /// is at or below `target`, interpolating the crossings in log-BER.
    /// Zero-error points count as `0.3 / bits` so the log stays finite.
    pub fn opening(&self, target: f64) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let lb = |p: &BathtubPoint| {
            let b = if p.errors == 0 {
                0.3 / p.bits.max(1) as f64
            } else {
                p.ber()
            };
            b.log10()
        };
        let t = target.log10();
        let best = (0..self.points.len())
            .min_by(|&a, &b| lb(&self.points[a]).total_cmp(&lb(&self.points[b])))
            .unwrap();
        if lb(&self.points[best]) > t {
            return 0.0;
        }
        let cross = |i: usize, j: usize| {
            let (a, b) = (&self.points[i], &self.points[j]);
            let (la, lbv) = (lb(a), lb(b));
            if (lbv - la).abs() < 1e-15 {
                return b.phase;
            }
            a.phase + (b.phase - a.phase) * (t - la) / (lbv - la)
        };
        let mut l = best;
        while l > 0 && lb(&self.points[l - 1]) <= t {
            l -= 1;
        }
        let left = if l == 0 { self.points[0].phase } else { cross(l, l - 1) };
        let mut r = best;
        while r + 1 < self.points.len() && lb(&self.points[r + 1]) <= t {
            r += 1;
        }
        let right = if r + 1 == self.points.len() {
            self.points[r].phase
        } else {
            cross(r, r + 1)
        };
        right - left
    }

    /// True when the BER does not increase moving from either end towards
    /// the minimum, allowing for confidence-bound overlap.
    pub fn is_bathtub_shaped(&self) -> bool {
        let Some(best) = (0..self.points.len()).min_by(|&a, &b| self.points[a].ber().total_cmp(&self.points[b].ber()))
        else {
            return true;
        };
        let lower = |p: &BathtubPoint| {
            if p.errors == 0 {
                0.0
            } else {
                // symmetric Wilson lower bound
                let n = p.bits as f64;
                let q = p.ber();
                let z = 1.96;
                let c = q + z * z / (2.0 * n);
                let s = z * (q * (1.0 - q) / n + z * z / (4.0 * n * n)).sqrt();
                ((c - s) / (1.0 + z * z / n)).max(0.0)
            }
        };
        let pts = &self.points;
        (1..=best).all(|i| lower(&pts[i]) <= pts[i - 1].upper())
            && (best..pts.len() - 1).all(|i| lower(&pts[i]) <= pts[i + 1].upper())
    }
}
