use crate::afe::DAC_MAX_CODE;

/// Data pattern `(x[n-1], x[n], x[n+1])` on which Pdlev adapts.
pub const PDLEV_PATTERN: (i8, i8, i8) = (-1, 1, -1);

/// A 6-bit sign-sign LMS level. Votes accumulate and the code moves one LSB
/// whenever the accumulator reaches `every`, which sets the loop gain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelLoop {
    pub code: u8,
    acc: i32,
    every: i32,
}

impl LevelLoop {
    pub fn new(code: u8, every: u32) -> Self {
        Self {
            code: code.min(DAC_MAX_CODE),
            acc: 0,
            every: every.max(1) as i32,
        }
    }

    fn vote(&mut self, weight: i32) {
        self.acc += weight;
        if self.acc >= self.every {
            self.acc = 0;
            self.code = (self.code + 1).min(DAC_MAX_CODE);
        } else if self.acc <= -self.every {
            self.acc = 0;
            self.code = self.code.saturating_sub(1);
        }
    }
}

/// Dlev towards h0: step up when the sample magnitude exceeds Dlev (`e * d > 0`).
pub fn dlev_update(level: &mut LevelLoop, d: i8, e_pd: i8) {
    level.vote(if e_pd == d { 1 } else { -1 });
}

/// Pdlev: adapts only on the `-1,+1,-1` pattern. `pattern` is the decided
/// `(x[n-1], x[n], x[n+1])` and `e_em` the eye-monitor sample taken at `x[n]`.
/// Returns whether the pattern qualified.
pub fn pdlev_update(level: &mut LevelLoop, pattern: (i8, i8, i8), e_em: i8) -> bool {
    if pattern != PDLEV_PATTERN {
        return false;
    }
    level.vote(if e_em > 0 { 1 } else { -1 });
    true
}

/// Baseline biased data level: down-steps carry three times the weight of
/// up-steps, so the level settles on the 25th percentile of `|v|`.
/// Construct the loop with `every >= 3` so one down-vote is one LSB.
pub fn bdlev_update(level: &mut LevelLoop, d: i8, e: i8) {
    level.vote(if e == d { 1 } else { -3 });
}

/// Optional DFE tap adaptation: `sign(e_pd * d[n-1])` correlates with the
/// residual first post-cursor.
pub fn dfe_tap_adapt(tap: &mut LevelLoop, d_prev: i8, e_pd: i8) {
    tap.vote(i32::from(d_prev * e_pd));
}
