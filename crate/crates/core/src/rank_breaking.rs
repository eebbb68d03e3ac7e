//! Pairwise win counts extracted from subset rankings.

use std::io::Write;

use crate::error::{invalid, Result};
use crate::model::RankedFeedback;
use crate::scalar::Scalar;

/// Dense pairwise win counts over a declared item universe.
///
/// `wins(i, j)` is the number of rank-broken comparisons in which `i` beat `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinCountMatrix {
    universe: Vec<usize>,
    counts: Vec<u64>,
}

impl WinCountMatrix {
    pub fn new(universe: &[usize]) -> Result<Self> {
        let mut sorted = universe.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("win-count universe has duplicate items"));
        }
        let u = sorted.len();
        Ok(Self {
            universe: sorted,
            counts: vec![0; u * u],
        })
    }

    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    pub fn reset(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
    }

    fn index(&self, item: usize) -> Result<usize> {
        self.universe
            .binary_search(&item)
            .map_err(|_| invalid(format!("item {item} is outside the win-count universe")))
    }

    pub fn wins(&self, i: usize, j: usize) -> Result<u64> {
        let (a, b) = (self.index(i)?, self.index(j)?);
        Ok(self.counts[a * self.universe.len() + b])
    }

    /// `n_ij = w_ij + w_ji`.
    pub fn comparisons(&self, i: usize, j: usize) -> Result<u64> {
        Ok(self.wins(i, j)? + self.wins(j, i)?)
    }

    /// Sum of all pairwise increments recorded so far.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Applies one top-`m` ranking of the played set `set`: every ranked item
    /// beats each item of `set` not ranked ahead of or at its position.
    /// Returns the number of increments, `sum_{l=1..m} (|S| - l)`.
    pub fn rank_break_update(&mut self, set: &[usize], sigma: &RankedFeedback) -> Result<u64> {
        for &i in set {
            self.index(i)?;
        }
        if sigma.len() > set.len() {
            return Err(invalid("ranking is longer than the played set"));
        }
        for &r in sigma.items() {
            if !set.contains(&r) {
                return Err(invalid(format!("ranked item {r} was not in the played set")));
            }
        }
        Ok(self.add_ranking(set, sigma.items(), 1))
    }

    /// Rank-breaks `count` identical plays; inputs are trusted.
    pub(crate) fn add_ranking(&mut self, set: &[usize], ranking: &[usize], count: u64) -> u64 {
        let u = self.universe.len();
        let mut added = 0;
        for (pos, &winner) in ranking.iter().enumerate() {
            let row = self.index(winner).expect("validated") * u;
            for &loser in set {
                if ranking[..=pos].contains(&loser) {
                    continue;
                }
                let col = self.index(loser).expect("validated");
                self.counts[row + col] += count;
                added += count;
            }
        }
        added
    }

    /// Records `count` plays in which `winner` beat every other member of `set`.
    #[cfg(test)]
    pub(crate) fn add_winner(&mut self, set: &[usize], winner: usize, count: u64) {
        self.add_ranking(set, &[winner], count);
    }

    /// `w_ij / (w_ij + w_ji)`, or exactly one half when the pair was never compared.
    pub fn empirical_prob<F: Scalar>(&self, i: usize, j: usize) -> Result<F> {
        if i == j {
            return Err(invalid(format!("empirical probability needs distinct items, got {i} twice")));
        }
        let w_ij = self.wins(i, j)?;
        let n_ij = w_ij + self.wins(j, i)?;
        Ok(if n_ij == 0 {
            F::half()
        } else {
            F::from_count(w_ij) / F::from_count(n_ij)
        })
    }

    /// Writes `row_item,col_item,count` lines for every nonzero entry.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row_item", "col_item", "count"])?;
        let u = self.universe.len();
        for (a, &i) in self.universe.iter().enumerate() {
            for (b, &j) in self.universe.iter().enumerate() {
                let c = self.counts[a * u + b];
                if c > 0 {
                    w.write_record([i.to_string(), j.to_string(), c.to_string()])?;
                }
            }
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PlModel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fb(v: &[usize]) -> RankedFeedback {
        RankedFeedback::new(v.to_vec()).unwrap()
    }

    #[test]
    fn full_ranking_of_four_yields_six_pairs() {
        // items a, b, c, d = 0, 1, 2, 3; ranking b > a > c > d
        let set = [0, 1, 2, 3];
        let mut w = WinCountMatrix::new(&set).unwrap();
        assert_eq!(w.rank_break_update(&set, &fb(&[1, 0, 2])).unwrap(), 6);
        let expected = [(1, 0), (1, 2), (1, 3), (0, 2), (0, 3), (2, 3)];
        for i in 0..4 {
            for j in 0..4 {
                let want = u64::from(expected.contains(&(i, j)));
                assert_eq!(w.wins(i, j).unwrap(), want, "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn increments_match_closed_form() {
        for k in 2..=8usize {
            let set: Vec<usize> = (0..k).collect();
            for m in 1..k {
                let mut w = WinCountMatrix::new(&set).unwrap();
                let ranking: Vec<usize> = (0..m).rev().collect();
                let added = w.rank_break_update(&set, &fb(&ranking)).unwrap();
                assert_eq!(added as usize, m * (2 * k - m - 1) / 2);
                assert_eq!(w.total(), added);
            }
        }
    }

    #[test]
    fn winner_feedback_fills_one_row() {
        let set = [2, 5, 7, 9];
        let mut w = WinCountMatrix::new(&set).unwrap();
        assert_eq!(w.rank_break_update(&set, &fb(&[7])).unwrap(), 3);
        for &j in &[2, 5, 9] {
            assert_eq!(w.wins(7, j).unwrap(), 1);
        }
        assert_eq!(w.total(), 3);
    }

    #[test]
    fn rejects_foreign_items() {
        let set = [0, 1, 2];
        let mut w = WinCountMatrix::new(&set).unwrap();
        assert!(w.rank_break_update(&set, &fb(&[3])).is_err());
        assert!(w.rank_break_update(&[0, 1, 4], &fb(&[0])).is_err());
        assert!(w.wins(0, 9).is_err());
        assert!(WinCountMatrix::new(&[1, 1]).is_err());
    }

    #[test]
    fn empirical_prob_rules() {
        let mut w = WinCountMatrix::new(&[0, 1, 2]).unwrap();
        for _ in 0..3 {
            w.add_winner(&[0, 1], 0, 1);
        }
        w.add_winner(&[0, 1], 1, 1);
        assert_eq!(w.empirical_prob::<f64>(0, 1).unwrap(), 0.75);
        assert_eq!(w.empirical_prob::<f64>(0, 2).unwrap(), 0.5);
        assert!(w.empirical_prob::<f64>(1, 1).is_err());
    }

    #[test]
    fn csv_dump_lists_nonzero_entries() {
        let set = [0, 1, 2];
        let mut w = WinCountMatrix::new(&set).unwrap();
        w.rank_break_update(&set, &fb(&[2, 0])).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "row_item,col_item,count\n0,1,1\n2,0,1\n2,1,1\n");
    }

    #[test]
    fn duel_estimates_concentrate() {
        // Hoeffding radius at confidence 0.01 must cover the error in >= 99% of trials.
        let model = PlModel::new(vec![1.0, 0.6]).unwrap();
        let p = model.pairwise_prob(0, 1).unwrap();
        let trials = 400;
        let mut covered = 0;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = WinCountMatrix::new(&[0, 1]).unwrap();
            for _ in 0..500 {
                let winner = model.sample_winner(&[0, 1], &mut rng).unwrap();
                w.add_winner(&[0, 1], winner, 1);
            }
            let n = w.comparisons(0, 1).unwrap() as f64;
            let radius = ((2.0f64 / 0.01).ln() / (2.0 * n)).sqrt();
            if (w.empirical_prob::<f64>(0, 1).unwrap() - p).abs() <= radius {
                covered += 1;
            }
        }
        assert!(covered as f64 >= 0.99 * trials as f64, "covered {covered}/{trials}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn exposure_is_symmetric_and_diagonal_empty(
                seed in any::<u64>(), k in 2usize..8, plays in 1usize..40
            ) {
                let theta: Vec<f64> = (0..k).map(|i| 1.0 / (i as f64 + 1.0)).collect();
                let model = PlModel::new(theta).unwrap();
                let set: Vec<usize> = (0..k).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut w = WinCountMatrix::new(&set).unwrap();
                let m = 1 + (seed as usize % (k - 1));
                for _ in 0..plays {
                    let r = model.sample_topm(&set, m, &mut rng).unwrap();
                    w.rank_break_update(&set, &r).unwrap();
                }
                for i in 0..k {
                    prop_assert_eq!(w.wins(i, i).unwrap(), 0);
                    for j in 0..k {
                        prop_assert_eq!(w.comparisons(i, j).unwrap(), w.comparisons(j, i).unwrap());
                    }
                }
                prop_assert_eq!(w.total() as usize, plays * m * (2 * k - m - 1) / 2);
            }
        }
    }
}
