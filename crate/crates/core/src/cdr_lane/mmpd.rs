/// Phase-detector output. `Up` means the sampling clock is early and should
/// move later; `Dn` means it is late.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vote {
    Up,
    Dn,
    Hold,
}

impl Vote {
    pub fn as_i32(self) -> i32 {
        match self {
            Vote::Up => 1,
            Vote::Dn => -1,
            Vote::Hold => 0,
        }
    }
}

/// Modified sign-sign Mueller-Müller phase detector.
///
/// Error samples are `sign(v - Dlev * d)`. The detector evaluates
/// `d[n-1] * e[n] - d[n] * e[n-1]`, whose mean is proportional to `h1 - h-1`,
/// on every pattern: rising and falling transitions plus the two
/// no-transition polarities. Eight of the sixteen input combinations vote.
///
/// | d[n-1] d[n] e[n-1] e[n] | vote |
/// |---|---|
/// | -1 +1 -1 -1 / +1 -1 +1 +1 | Up (transition) |
/// | +1 +1 -1 +1 / -1 -1 +1 -1 | Up (no transition) |
/// | -1 +1 +1 +1 / +1 -1 -1 -1 | Dn (transition) |
/// | +1 +1 +1 -1 / -1 -1 -1 +1 | Dn (no transition) |
///
/// With the first post-cursor cancelled by the DFE and `h-1 > 0`, `e[n-1]`
/// always agrees with `d[n]` on a no-transition pair, so the no-transition
/// Up rows never fire and only the late-detecting no-transition rows add
/// detections. The null stays at `h1 = h-1`.
pub fn mmpd_vote(d_prev: i8, d: i8, e_prev: i8, e: i8) -> Vote {
    debug_assert!([d_prev, d, e_prev, e].iter().all(|v| v.abs() == 1));
    match i32::from(d_prev) * i32::from(e) - i32::from(d) * i32::from(e_prev) {
        z if z > 0 => Vote::Up,
        z if z < 0 => Vote::Dn,
        _ => Vote::Hold,
    }
}
