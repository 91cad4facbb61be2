use super::Vote;

/// Weighted majority-vote accumulator driving the PI: `Up` adds 1, `Dn`
/// subtracts `k_ratio`, and every `threshold` of net weight is one PI step.
#[derive(Clone, Debug, PartialEq)]
pub struct ProportionalPath {
    pub accum: f64,
    pub threshold: f64,
}

impl ProportionalPath {
    pub fn new(threshold: f64) -> Self {
        Self { accum: 0.0, threshold }
    }
}

/// Returns the PI code step (+1 later, -1 earlier, 0 none).
pub fn proportional_update(path: &mut ProportionalPath, vote: Vote, k_ratio: f64) -> i32 {
    debug_assert!(k_ratio > 0.0);
    match vote {
        Vote::Up => path.accum += 1.0,
        Vote::Dn => path.accum -= k_ratio,
        Vote::Hold => return 0,
    }
    let mut step = 0;
    while path.accum >= path.threshold {
        path.accum -= path.threshold;
        step += 1;
    }
    while path.accum <= -path.threshold {
        path.accum += path.threshold;
        step -= 1;
    }
    step
}
