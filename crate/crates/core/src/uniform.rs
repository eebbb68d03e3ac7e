//! Fixed-budget best-item identification by uniform allocation and
//! median halving.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::model::PlModel;
use crate::oracle::Simulator;
use crate::rank_breaking::WinCountMatrix;
use crate::report::{RunReport, Trace, UniformRound, UniformTrace};
use crate::scalar::Scalar;
use crate::subroutines::partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetConfig {
    /// Total subset plays allowed.
    pub q: u64,
    pub k: usize,
    pub m: usize,
}

impl BudgetConfig {
    pub fn new(q: u64, k: usize, m: usize) -> Self {
        Self { q, k, m }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 2 || self.k > n {
            return Err(invalid(format!("subset size k = {} outside 2..={n}", self.k)));
        }
        if self.m < 1 || self.m >= self.k {
            return Err(invalid(format!("ranking length m = {} outside 1..={}", self.m, self.k - 1)));
        }
        let min = min_feasible_budget(n, self.k)?;
        if self.q < min {
            return Err(invalid(format!(
                "budget Q = {} is below the minimum feasible budget {min} for n = {n}, k = {}",
                self.q, self.k
            )));
        }
        Ok(())
    }

    /// Plays per set: `floor(kQ / (2n + k log2 k))`, further capped so that
    /// the sets actually formed never exceed `Q`.
    pub fn plays_per_set(&self, n: usize) -> u64 {
        let k = self.k as f64;
        let denom = 2.0 * n as f64 + k * k.log2();
        let by_formula = (k * self.q as f64 / denom).floor() as u64;
        by_formula.min(self.q / set_count(n, self.k) as u64)
    }
}

fn halve(size: usize) -> usize {
    size.div_ceil(2)
}

/// Number of sets the algorithm plays on `n` items. Survivor counts do not
/// depend on the feedback, so this is fixed in advance.
pub fn set_count(n: usize, k: usize) -> usize {
    let mut alive = n;
    let mut sets = 0;
    while alive >= k {
        let full = alive / k;
        sets += full;
        alive = full * halve(k) + alive % k;
    }
    while alive > 1 {
        sets += 1;
        alive = halve(alive);
    }
    sets
}

/// Smallest budget giving every set at least one play:
/// `max(ceil((2n + k log2 k) / k), number of sets)`.
pub fn min_feasible_budget(n: usize, k: usize) -> Result<u64> {
    if k < 2 || k > n {
        return Err(invalid(format!("need n >= k >= 2, got n = {n}, k = {k}")));
    }
    let kf = k as f64;
    let by_formula = ((2.0 * n as f64 + kf * kf.log2()) / kf).ceil() as u64;
    Ok(by_formula.max(set_count(n, k) as u64))
}

/// Runs uniform allocation over all items of `model` within `cfg.q` plays.
pub fn uniform_allocation<F: Scalar, R: Rng>(model: &PlModel<F>, cfg: &BudgetConfig, rng: R) -> Result<RunReport> {
    let n = model.n();
    cfg.validate(n)?;
    let q_prime = cfg.plays_per_set(n);
    let k = cfg.k;
    let mut sim = Simulator::new(model, rng).with_budget(Some(cfg.q));
    let mut trace = UniformTrace { q_prime, rounds: Vec::new() };
    let mut survivors: Vec<usize> = (0..n).collect();

    while survivors.len() >= k {
        let plan = partition(&survivors, k)?;
        let mut next: Vec<usize> = plan.remainder().to_vec();
        let mut kept = Vec::new();
        for batch in plan.full_batches() {
            let mut wins = WinCountMatrix::new(batch)?;
            sim.play_batch(batch, cfg.m, q_prime, &mut wins)?;
            let top = median_survivors(&wins, batch)?;
            kept.extend_from_slice(&top);
            next.extend(top);
        }
        trace.rounds.push(UniformRound {
            endgame: false,
            survivors: survivors.clone(),
            batches: plan.full_batches().to_vec(),
            kept,
        });
        next.sort_unstable();
        survivors = next;
    }

    if survivors.len() > 1 {
        let mut padded = survivors.clone();
        padded.extend((0..n).filter(|i| !survivors.contains(i)).take(k - survivors.len()));
        padded.sort_unstable();
        let mut wins = WinCountMatrix::new(&padded)?;
        while survivors.len() > 1 {
            sim.play_batch(&padded, cfg.m, q_prime, &mut wins)?;
            let mut top = median_survivors(&wins, &survivors)?;
            top.sort_unstable();
            trace.rounds.push(UniformRound {
                endgame: true,
                survivors: survivors.clone(),
                batches: vec![padded.clone()],
                kept: top.clone(),
            });
            survivors = top;
        }
    }

    Ok(RunReport {
        returned_item: Some(survivors[0]),
        total_plays: sim.plays(),
        per_item_plays: sim.per_item_plays().to_vec(),
        trace: Trace::Uniform(trace),
    })
}

/// Keeps the `ceil(|pool| / 2)` members of `pool` ranked by Copeland score
/// `w_i = #{j : p_ij > 1/2}` within `pool`, then by `sum_j p_ij`, then by
/// lower id. All of them have `w_i` at least the lower median.
fn median_survivors(wins: &WinCountMatrix, pool: &[usize]) -> Result<Vec<usize>> {
    let mut scored = Vec::with_capacity(pool.len());
    for &i in pool {
        let mut copeland = 0usize;
        let mut total = 0.0f64;
        for &j in pool {
            if i == j {
                continue;
            }
            let p: f64 = wins.empirical_prob(i, j)?;
            total += p;
            if p > 0.5 {
                copeland += 1;
            }
        }
        scored.push((i, copeland, total));
    }
    scored.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(b.2.partial_cmp(&a.2).expect("finite probabilities"))
            .then(a.0.cmp(&b.0))
    });
    Ok(scored.into_iter().take(halve(pool.len())).map(|(i, _, _)| i).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minimum_budget_examples() {
        assert_eq!(min_feasible_budget(16, 5).unwrap(), 9);
        assert_eq!(min_feasible_budget(2, 2).unwrap(), 3);
        assert!(min_feasible_budget(3, 4).is_err());
        assert_eq!(BudgetConfig::new(9, 5, 1).plays_per_set(16), 1);
    }

    #[test]
    fn set_counts() {
        // 16 -> 3 sets, 10 left -> 2 sets, 6 -> 1 set, 4 -> 2 -> 1
        assert_eq!(set_count(16, 5), 8);
        assert_eq!(set_count(2, 2), 1);
        assert_eq!(set_count(5, 5), 3);
    }

    #[test]
    fn rejects_small_budget() {
        let model = PlModel::new(vec![1.0; 16]).unwrap();
        let err = uniform_allocation(&model, &BudgetConfig::new(8, 5, 1), ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(err.to_string().contains("minimum feasible budget 9"));
    }

    #[test]
    fn stays_within_budget() {
        let model = PlModel::new((0..16).map(|i| 1.0 - 0.06 * i as f64).collect()).unwrap();
        for (q, k, m) in [(9, 5, 1), (100, 5, 2), (1000, 4, 3), (37, 2, 1), (500, 16, 1)] {
            let cfg = BudgetConfig::new(q, k, m);
            let r = uniform_allocation(&model, &cfg, ChaCha8Rng::seed_from_u64(q)).unwrap();
            assert!(r.total_plays <= q, "q={q}: {}", r.total_plays);
            let Trace::Uniform(t) = &r.trace else { panic!() };
            for round in &t.rounds {
                for b in &round.batches {
                    assert_eq!(b.len(), k);
                }
            }
            assert_eq!(r.total_plays, t.q_prime * set_count(16, k) as u64);
        }
    }

    #[test]
    fn n_equals_k_single_batch() {
        let model = PlModel::new(vec![1.0, 0.5, 0.25, 0.1]).unwrap();
        let r = uniform_allocation(&model, &BudgetConfig::new(400, 4, 1), ChaCha8Rng::seed_from_u64(1)).unwrap();
        let Trace::Uniform(t) = &r.trace else { panic!() };
        assert_eq!(t.rounds[0].batches.len(), 1);
        assert_eq!(t.rounds[0].kept.len(), 2);
        assert!(r.total_plays <= 400);
    }

    #[test]
    fn dominant_item_always_survives() {
        let mut theta = vec![1e6];
        theta.extend(std::iter::repeat_n(1.0, 11));
        let model = PlModel::new(theta).unwrap();
        for seed in 0..20 {
            let r = uniform_allocation(&model, &BudgetConfig::new(200, 3, 1), ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(r.returned_item, Some(0));
        }
    }

    #[test]
    fn halving_rule() {
        let set = [0, 1, 2, 3];
        let mut w = WinCountMatrix::new(&set).unwrap();
        // 2 beats everyone, 0 beats 1 and 3, 1 beats 3
        w.add_winner(&[2, 0], 2, 3);
        w.add_winner(&[2, 1], 2, 3);
        w.add_winner(&[2, 3], 2, 3);
        w.add_winner(&[0, 1], 0, 3);
        w.add_winner(&[0, 3], 0, 3);
        w.add_winner(&[1, 3], 1, 3);
        assert_eq!(median_survivors(&w, &set).unwrap(), vec![2, 0]);
        // all tied: lowest ids win
        let w = WinCountMatrix::new(&set).unwrap();
        assert_eq!(median_survivors(&w, &set).unwrap(), vec![0, 1]);
    }
}
