//! Play accounting on top of a [`PlModel`].
//!
//! Every subset play made by an algorithm goes through a [`Simulator`], which
//! owns the random stream, counts plays per item and enforces an optional
//! global budget.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::model::PlModel;
use crate::rank_breaking::WinCountMatrix;
use crate::scalar::Scalar;

/// Batches with more distinct outcomes than this are played one by one.
const MAX_BATCH_OUTCOMES: usize = 720;
/// Batches shorter than this are played one by one.
const MIN_BATCH_PLAYS: u64 = 64;

pub struct Simulator<'a, F, R> {
    model: &'a PlModel<F>,
    rng: R,
    plays: u64,
    per_item: Vec<u64>,
    budget: Option<u64>,
}

impl<'a, F: Scalar, R: Rng> Simulator<'a, F, R> {
    pub fn new(model: &'a PlModel<F>, rng: R) -> Self {
        Self {
            model,
            rng,
            plays: 0,
            per_item: vec![0; model.n()],
            budget: None,
        }
    }

    /// Caps the total number of subset plays. Exceeding it fails with
    /// [`Error::BudgetExhausted`].
    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.budget = budget;
        self
    }

    pub fn model(&self) -> &'a PlModel<F> {
        self.model
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    /// Total subset plays so far.
    pub fn plays(&self) -> u64 {
        self.plays
    }

    /// Number of plays each item took part in.
    pub fn per_item_plays(&self) -> &[u64] {
        &self.per_item
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }

    fn charge(&mut self, set: &[usize], t: u64) -> Result<()> {
        if let Some(budget) = self.budget {
            if self.plays + t > budget {
                return Err(Error::BudgetExhausted {
                    budget,
                    plays: self.plays,
                    partial: None,
                });
            }
        }
        self.plays += t;
        for &i in set {
            self.per_item[i] += t;
        }
        Ok(())
    }

    /// One winner-feedback play of a sorted subset.
    pub fn play_winner(&mut self, sorted: &[usize]) -> Result<usize> {
        self.charge(sorted, 1)?;
        Ok(self.model.winner_sorted(sorted, &mut self.rng))
    }

    /// Plays `sorted` `t` times with top-`m` feedback and rank-breaks every
    /// outcome into `wins`.
    ///
    /// Long batches over small subsets draw the outcome counts from the exact
    /// multinomial over all top-`m` rankings, which has the same law as `t`
    /// independent plays.
    pub fn play_batch(
        &mut self,
        sorted: &[usize],
        m: usize,
        t: u64,
        wins: &mut WinCountMatrix,
    ) -> Result<()> {
        debug_assert!(m >= 1 && m < sorted.len());
        self.charge(sorted, t)?;
        if t == 0 {
            return Ok(());
        }
        let outcomes = falling_factorial(sorted.len(), m);
        if t >= MIN_BATCH_PLAYS && outcomes <= MAX_BATCH_OUTCOMES {
            let rankings = self.model.enumerate_rankings(sorted, m);
            let mut left = t;
            let mut mass_left = 1.0f64;
            let last = rankings.len() - 1;
            for (idx, (ranking, prob)) in rankings.iter().enumerate() {
                if left == 0 {
                    break;
                }
                let prob = prob.to_f64_lossy();
                let count = if idx == last {
                    left
                } else {
                    let p = if mass_left > 0.0 {
                        (prob / mass_left).clamp(0.0, 1.0)
                    } else {
                        1.0
                    };
                    Binomial::new(left, p)
                        .expect("probability clamped to [0, 1]")
                        .sample(&mut self.rng)
                };
                mass_left -= prob;
                left -= count;
                if count > 0 {
                    wins.add_ranking(sorted, ranking, count);
                }
            }
        } else {
            for _ in 0..t {
                let ranking = self.model.topm_sorted(sorted, m, &mut self.rng);
                wins.add_ranking(sorted, &ranking, 1);
            }
        }
        Ok(())
    }
}

fn falling_factorial(k: usize, m: usize) -> usize {
    (k - m + 1..=k).fold(1usize, |acc, x| acc.saturating_mul(x))
}
