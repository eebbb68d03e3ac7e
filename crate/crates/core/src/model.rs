//! Plackett-Luce instances and exact feedback samplers.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Largest subset for which [`PlModel::topm_pmf`] enumerates rankings.
pub const MAX_PMF_SUBSET: usize = 8;

/// A Plackett-Luce choice model over items `0..n` with positive scores.
///
/// Item `i` wins a played subset `S` with probability `theta[i] / sum_{j in S} theta[j]`.
/// The model is immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PlModel<F> {
    theta: Vec<F>,
    best: usize,
    unique_best: bool,
}

/// Gaps to the best score, `delta[i] = theta_max - theta[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile<F> {
    pub delta: Vec<F>,
    /// Smallest gap among items other than the best one. Zero when the best
    /// score is shared.
    pub delta_min: F,
    pub best_item: usize,
}

/// An ordered list of distinct items, best first.
///
/// A length-1 ranking is winner feedback.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankedFeedback(Vec<usize>);

impl RankedFeedback {
    pub fn new(items: Vec<usize>) -> Result<Self> {
        if items.is_empty() {
            return Err(invalid("ranking must contain at least one item"));
        }
        for (pos, item) in items.iter().enumerate() {
            if items[..pos].contains(item) {
                return Err(invalid(format!("item {item} repeated in ranking")));
            }
        }
        Ok(Self(items))
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn winner(&self) -> usize {
        self.0[0]
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

/// On-disk instance description, `{"theta": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub theta: Vec<f64>,
}

impl<F: Scalar> PlModel<F> {
    /// Builds a model from raw scores. Scores are kept as given.
    pub fn new(theta: Vec<F>) -> Result<Self> {
        if theta.len() < 2 {
            return Err(invalid(format!(
                "a model needs at least 2 items, got {}",
                theta.len()
            )));
        }
        if let Some((i, t)) = theta
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > F::zero()))
        {
            return Err(invalid(format!("theta[{i}] = {t} is not a positive finite score")));
        }
        let mut best = 0;
        for (i, t) in theta.iter().enumerate() {
            if *t > theta[best] {
                best = i;
            }
        }
        let unique_best = theta
            .iter()
            .enumerate()
            .all(|(i, t)| i == best || *t < theta[best]);
        Ok(Self {
            theta,
            best,
            unique_best,
        })
    }

    /// Builds a model rescaled so that the largest score is exactly one.
    pub fn new_normalized(theta: Vec<F>) -> Result<Self> {
        let raw = Self::new(theta)?;
        let top = raw.theta[raw.best];
        raw.scaled(F::one() / top)
    }

    /// Same model with every score multiplied by `c > 0`.
    pub fn scaled(&self, c: F) -> Result<Self> {
        if !(c.is_finite() && c > F::zero()) {
            return Err(invalid(format!("scale factor {c} must be positive")));
        }
        Self::new(self.theta.iter().map(|&t| t * c).collect())
    }

    pub fn from_file_spec(spec: &InstanceFile) -> Result<Self> {
        let theta = spec
            .theta
            .iter()
            .map(|&t| F::from_f64(t).ok_or_else(|| invalid(format!("unrepresentable score {t}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(theta)
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[F] {
        &self.theta
    }

    pub fn score(&self, item: usize) -> F {
        self.theta[item]
    }

    /// Index of the largest score; the lowest such index when shared.
    pub fn best_item(&self) -> usize {
        self.best
    }

    pub fn has_unique_best(&self) -> bool {
        self.unique_best
    }

    /// Rejects models whose best score is shared. Exact identification is
    /// not well defined for them.
    pub fn require_unique_best(&self) -> Result<()> {
        if self.unique_best {
            Ok(())
        } else {
            Err(invalid(format!(
                "best score {} is attained by more than one item",
                self.theta[self.best]
            )))
        }
    }

    pub fn gaps(&self) -> GapProfile<F> {
        let top = self.theta[self.best];
        let delta: Vec<F> = self.theta.iter().map(|&t| top - t).collect();
        let delta_min = delta
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.best)
            .map(|(_, d)| *d)
            .fold(F::infinity(), F::min);
        GapProfile {
            delta,
            delta_min,
            best_item: self.best,
        }
    }

    /// Total score of a subset.
    pub fn subset_mass(&self, set: &[usize]) -> Result<F> {
        self.check_set(set)?;
        Ok(set.iter().map(|&i| self.theta[i]).sum())
    }

    /// Sum of the `k` largest scores, the heaviest mass a size-`k` play can have.
    pub fn top_k_mass(&self, k: usize) -> Result<F> {
        if k == 0 || k > self.n() {
            return Err(invalid(format!("k = {k} outside 1..={}", self.n())));
        }
        let mut sorted = self.theta.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).expect("scores are finite"));
        Ok(sorted[..k].iter().copied().sum())
    }

    /// Probability that `i` beats `j` in a duel, `theta_i / (theta_i + theta_j)`.
    pub fn pairwise_prob(&self, i: usize, j: usize) -> Result<F> {
        if i == j {
            return Err(invalid(format!("pairwise probability needs distinct items, got {i} twice")));
        }
        self.check_item(i)?;
        self.check_item(j)?;
        Ok(self.pref(i, j))
    }

    /// The larger side is computed directly and the smaller as its
    /// complement, which is exact, so `pref(i, j) + pref(j, i) == 1`.
    #[inline]
    pub(crate) fn pref(&self, i: usize, j: usize) -> F {
        let (ti, tj) = (self.theta[i], self.theta[j]);
        if ti >= tj {
            ti / (ti + tj)
        } else {
            F::one() - tj / (ti + tj)
        }
    }

    /// Draws the winner of one play of `set`.
    ///
    /// Uses one uniform draw and inverse-CDF over the subset in ascending
    /// item order, so results are reproducible for a seeded stream.
    pub fn sample_winner<R: Rng + ?Sized>(&self, set: &[usize], rng: &mut R) -> Result<usize> {
        let sorted = self.sorted_set(set)?;
        Ok(self.winner_sorted(&sorted, rng))
    }

    /// Draws a top-`m` ranking of `set` by `m` successive winner draws
    /// without replacement.
    pub fn sample_topm<R: Rng + ?Sized>(
        &self,
        set: &[usize],
        m: usize,
        rng: &mut R,
    ) -> Result<RankedFeedback> {
        let sorted = self.sorted_set(set)?;
        if m == 0 || m >= sorted.len() {
            return Err(invalid(format!(
                "top-m length {m} outside 1..={} for a subset of {}",
                sorted.len().saturating_sub(1),
                sorted.len()
            )));
        }
        Ok(RankedFeedback(self.topm_sorted(&sorted, m, rng)))
    }

    /// Exact distribution of top-`m` rankings of a small subset.
    ///
    /// Accepts `1 <= m <= |S|`; the map has `|S|! / (|S| - m)!` entries.
    pub fn topm_pmf(&self, set: &[usize], m: usize) -> Result<BTreeMap<RankedFeedback, F>> {
        let sorted = self.sorted_set(set)?;
        if sorted.len() > MAX_PMF_SUBSET {
            return Err(Error::Capacity(format!(
                "ranking enumeration limited to subsets of at most {MAX_PMF_SUBSET} items, got {}",
                sorted.len()
            )));
        }
        if m == 0 || m > sorted.len() {
            return Err(invalid(format!("top-m length {m} outside 1..={}", sorted.len())));
        }
        Ok(self
            .enumerate_rankings(&sorted, m)
            .into_iter()
            .map(|(r, p)| (RankedFeedback(r), p))
            .collect())
    }

    /// All top-`m` rankings of a sorted, validated subset with their
    /// probabilities. No size guard.
    pub(crate) fn enumerate_rankings(&self, sorted: &[usize], m: usize) -> Vec<(Vec<usize>, F)> {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(m);
        let mut remaining = sorted.to_vec();
        let mass: F = sorted.iter().map(|&i| self.theta[i]).sum();
        self.enumerate_rec(&mut remaining, mass, m, &mut prefix, F::one(), &mut out);
        out
    }

    fn enumerate_rec(
        &self,
        remaining: &mut Vec<usize>,
        mass: F,
        depth: usize,
        prefix: &mut Vec<usize>,
        prob: F,
        out: &mut Vec<(Vec<usize>, F)>,
    ) {
        if depth == 0 {
            out.push((prefix.clone(), prob));
            return;
        }
        for pos in 0..remaining.len() {
            let item = remaining.remove(pos);
            let t = self.theta[item];
            prefix.push(item);
            self.enumerate_rec(remaining, mass - t, depth - 1, prefix, prob * t / mass, out);
            prefix.pop();
            remaining.insert(pos, item);
        }
    }

    /// Winner draw over a sorted, validated subset.
    pub(crate) fn winner_sorted<R: Rng + ?Sized>(&self, sorted: &[usize], rng: &mut R) -> usize {
        let mass: F = sorted.iter().map(|&i| self.theta[i]).sum();
        self.pick(sorted, mass, rng)
    }

    pub(crate) fn topm_sorted<R: Rng + ?Sized>(
        &self,
        sorted: &[usize],
        m: usize,
        rng: &mut R,
    ) -> Vec<usize> {
        let mut remaining = sorted.to_vec();
        let mut mass: F = remaining.iter().map(|&i| self.theta[i]).sum();
        let mut ranking = Vec::with_capacity(m);
        for _ in 0..m {
            let w = self.pick(&remaining, mass, rng);
            let pos = remaining.iter().position(|&i| i == w).expect("winner is in set");
            remaining.remove(pos);
            mass = remaining.iter().map(|&i| self.theta[i]).sum();
            ranking.push(w);
        }
        ranking
    }

    fn pick<R: Rng + ?Sized>(&self, set: &[usize], mass: F, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let target = F::lit(u) * mass;
        let mut acc = F::zero();
        for &i in set {
            acc = acc + self.theta[i];
            if target < acc {
                return i;
            }
        }
        // Rounding can leave target == mass; the last item owns that edge.
        *set.last().expect("non-empty set")
    }

    pub(crate) fn check_item(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            Err(invalid(format!("item {i} outside 0..{}", self.n())))
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_set(&self, set: &[usize]) -> Result<()> {
        if set.is_empty() {
            return Err(invalid("item set is empty"));
        }
        let mut seen = vec![false; self.n()];
        for &i in set {
            self.check_item(i)?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(invalid(format!("item {i} appears twice in set")));
            }
        }
        Ok(())
    }

    pub(crate) fn sorted_set(&self, set: &[usize]) -> Result<Vec<usize>> {
        self.check_set(set)?;
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        Ok(sorted)
    }
}
