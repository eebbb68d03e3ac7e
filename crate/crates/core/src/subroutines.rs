//! Partitioning into play batches and relative score-mass estimation.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::oracle::Simulator;
use crate::scalar::Scalar;

/// Default cap on plays inside one score estimate.
pub const DEFAULT_ESTIMATE_CAP: u64 = 10_000_000;

/// Consecutive batches of a sorted item set. Every batch except possibly the
/// last has exactly the requested size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    pub batch_size: usize,
    pub batches: Vec<Vec<usize>>,
}

impl BatchPlan {
    /// Batches of exactly `batch_size` items.
    pub fn full_batches(&self) -> &[Vec<usize>] {
        match self.batches.last() {
            Some(last) if last.len() < self.batch_size => &self.batches[..self.batches.len() - 1],
            _ => &self.batches,
        }
    }

    /// The short final batch, empty when the split is exact.
    pub fn remainder(&self) -> &[usize] {
        match self.batches.last() {
            Some(last) if last.len() < self.batch_size => last,
            _ => &[],
        }
    }
}

/// Splits `items` (taken in ascending id order) into `ceil(|A| / k)` batches.
pub fn partition(items: &[usize], batch_size: usize) -> Result<BatchPlan> {
    if batch_size < 1 {
        return Err(invalid("batch size must be at least 1"));
    }
    if items.is_empty() {
        return Err(invalid("cannot partition an empty item set"));
    }
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    Ok(BatchPlan {
        batch_size,
        batches: sorted.chunks(batch_size).map(<[usize]>::to_vec).collect(),
    })
}

/// Outcome of one score estimate: `ratio = (plays_used - wins_of_pivot) / wins_of_pivot`,
/// an estimate of `Theta_S / theta_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreEstimate<F> {
    pub ratio: F,
    pub plays_used: u64,
    pub wins_of_pivot: u64,
}

/// Pivot wins required at confidence `delta`: `ceil(10 ln(4 / delta))`.
pub fn required_pivot_wins<F: Scalar>(delta: F) -> u64 {
    let d = (F::lit(10.0) * (F::lit(4.0) / delta).ln()).ceil();
    d.to_u64().expect("finite positive win target").max(1)
}

/// Plays `set ∪ {pivot}` until the pivot has won `ceil(10 ln(4/δ))` times
/// and returns the non-pivot wins per pivot win.
pub fn score_estimate<F: Scalar, R: Rng>(
    sim: &mut Simulator<'_, F, R>,
    set: &[usize],
    pivot: usize,
    delta: F,
    cap: u64,
) -> Result<ScoreEstimate<F>> {
    score_estimate_padded(sim, set, pivot, &[], delta, cap)
}

/// [`score_estimate`] with `fillers` added to every play so that the played
/// subset has a prescribed size.
///
/// Wins by fillers count as plays but not as wins of `set`, so the ratio
/// still estimates `Theta_S / theta_b`.
pub fn score_estimate_padded<F: Scalar, R: Rng>(
    sim: &mut Simulator<'_, F, R>,
    set: &[usize],
    pivot: usize,
    fillers: &[usize],
    delta: F,
    cap: u64,
) -> Result<ScoreEstimate<F>> {
    if set.contains(&pivot) || fillers.contains(&pivot) {
        return Err(invalid(format!("pivot {pivot} must not belong to the estimated set")));
    }
    if fillers.iter().any(|f| set.contains(f)) {
        return Err(invalid("filler items must lie outside the estimated set"));
    }
    if !(delta > F::zero() && delta < F::one()) {
        return Err(invalid(format!("confidence {delta} outside (0, 1)")));
    }
    let mut played: Vec<usize> = set
        .iter()
        .chain(fillers)
        .copied()
        .chain(std::iter::once(pivot))
        .collect();
    sim.model().check_set(&played)?;
    played.sort_unstable();

    let target = required_pivot_wins(delta);
    let mut wins = 0u64;
    let mut set_wins = 0u64;
    let mut plays = 0u64;
    while wins < target {
        if plays >= cap {
            return Err(Error::EstimationTimeout { cap });
        }
        let winner = sim.play_winner(&played)?;
        if winner == pivot {
            wins += 1;
        } else if fillers.is_empty() || set.contains(&winner) {
            set_wins += 1;
        }
        plays += 1;
    }
    Ok(ScoreEstimate {
        ratio: F::from_count(set_wins) / F::from_count(wins),
        plays_used: plays,
        wins_of_pivot: wins,
    })
}

/// Largest number of plays a single batch may be scheduled for.
pub const MAX_BATCH_PLAYS: u64 = 1 << 50;

/// Rounds a real play count up, rejecting counts no run could afford.
pub fn ceil_plays<F: Scalar>(x: F) -> Result<u64> {
    let c = x.ceil();
    match c.to_u64() {
        Some(t) if c.is_finite() && t <= MAX_BATCH_PLAYS => Ok(t),
        _ => Err(Error::Capacity(format!(
            "batch length {x} exceeds the limit of {MAX_BATCH_PLAYS} plays"
        ))),
    }
}

/// `max(2 x + 1, 2)`, the inflated mass used to size benchmark batches.
pub fn clamp_theta_hat<F: Scalar>(raw: F) -> Result<F> {
    if raw.is_nan() || raw < F::zero() {
        return Err(invalid(format!("score ratio {raw} must be nonnegative")));
    }
    Ok((F::lit(2.0) * raw + F::one()).max(F::lit(2.0)))
}
