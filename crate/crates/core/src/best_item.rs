//! Adaptive (ε, δ)-PAC best-item search by group battles.
//!
//! The surviving set is split into groups of `k`; each group is played just
//! long enough, as sized by its estimated score mass, for one member to
//! dominate every other member up to a shrinking margin. Group winners
//! advance until a single item remains.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::PlModel;
use crate::oracle::Simulator;
use crate::rank_breaking::WinCountMatrix;
use crate::report::{BestItemTrace, RunReport, Trace};
use crate::scalar::Scalar;
use crate::subroutines::{ceil_plays, partition, score_estimate_padded, DEFAULT_ESTIMATE_CAP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestItemConfig<F> {
    pub k: usize,
    pub m: usize,
    pub eps: F,
    pub delta: F,
    /// The round that starts once at most `k` items survive uses
    /// `eps_prev = final_eps_factor * eps` and `delta_prev = final_delta_factor * delta`
    /// before the usual per-round shrinkage.
    pub final_eps_factor: F,
    pub final_delta_factor: F,
    pub estimate_cap: u64,
}

impl<F: Scalar> BestItemConfig<F> {
    pub fn new(k: usize, m: usize, eps: F, delta: F) -> Self {
        Self {
            k,
            m,
            eps,
            delta,
            final_eps_factor: F::lit(2.0) / F::lit(3.0),
            final_delta_factor: F::one(),
            estimate_cap: DEFAULT_ESTIMATE_CAP,
        }
    }

    fn validate(&self, max_eps: F) -> Result<()> {
        if self.k < 2 {
            return Err(invalid(format!("subset size k = {} must be at least 2", self.k)));
        }
        if self.m < 1 || self.m >= self.k {
            return Err(invalid(format!("ranking length m = {} outside 1..={}", self.m, self.k - 1)));
        }
        if !(self.eps > F::zero() && self.eps <= max_eps) {
            return Err(invalid(format!("eps = {} outside (0, {max_eps}]", self.eps)));
        }
        if !(self.delta > F::zero() && self.delta < F::one()) {
            return Err(invalid(format!("delta = {} outside (0, 1)", self.delta)));
        }
        Ok(())
    }
}

/// How a group's score mass (relative to the pivot) is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
enum MassSource<F> {
    Estimate { pivot: usize },
    Fixed(F),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupRecord<F> {
    pub items: Vec<usize>,
    pub theta_hat: F,
    pub t: u64,
    pub estimate_plays: u64,
    pub chosen: usize,
    /// False when no member cleared the margin and the choice was random.
    pub by_margin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestItemPhase<F> {
    pub survivors: usize,
    pub eps: F,
    pub delta: F,
    /// The single group of this round was topped up with non-candidates.
    pub padded: bool,
    pub groups: Vec<GroupRecord<F>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubroutineReport<F> {
    pub returned_item: usize,
    pub total_plays: u64,
    pub pivot: Option<usize>,
    /// Plays spent finding the pivot when none was supplied.
    pub pivot_plays: u64,
    pub phases: Vec<BestItemPhase<F>>,
}

impl<F: Scalar> SubroutineReport<F> {
    /// Plays attributable to the recorded phases: group battles plus score estimates.
    pub fn phase_plays(&self) -> u64 {
        self.phases
            .iter()
            .flat_map(|p| &p.groups)
            .map(|g| g.t + g.estimate_plays)
            .sum()
    }
}

impl<F: Scalar> SubroutineReport<F> {
    pub fn to_trace(&self) -> BestItemTrace {
        BestItemTrace {
            pivot: self.pivot,
            pivot_plays: self.pivot_plays,
            rounds: self
                .phases
                .iter()
                .map(|p| {
                    let plays = p.groups.iter().map(|g| g.t + g.estimate_plays).sum();
                    (p.survivors, p.groups.len(), p.eps.to_f64_lossy(), p.delta.to_f64_lossy(), plays)
                })
                .collect(),
        }
    }
}

/// Runs [`pac_best_item`] over all items of `model` as a standalone algorithm.
pub fn run_best_item<F: Scalar, R: Rng>(
    model: &PlModel<F>,
    cfg: &BestItemConfig<F>,
    rng: R,
    budget: Option<u64>,
) -> Result<RunReport> {
    let mut sim = Simulator::new(model, rng).with_budget(budget);
    let all: Vec<usize> = (0..model.n()).collect();
    let sub = match pac_best_item(&mut sim, &all, cfg, None) {
        Ok(sub) => sub,
        Err(Error::BudgetExhausted { budget, plays, .. }) => {
            let partial = RunReport {
                returned_item: None,
                total_plays: sim.plays(),
                per_item_plays: sim.per_item_plays().to_vec(),
                trace: Trace::BestItem(BestItemTrace { pivot: None, pivot_plays: 0, rounds: Vec::new() }),
            };
            return Err(Error::BudgetExhausted { budget, plays, partial: Some(Box::new(partial)) });
        }
        Err(e) => return Err(e),
    };
    Ok(RunReport {
        returned_item: Some(sub.returned_item),
        total_plays: sim.plays(),
        per_item_plays: sim.per_item_plays().to_vec(),
        trace: Trace::BestItem(sub.to_trace()),
    })
}

/// Group battle length `ceil(16 theta_hat / (m eps^2) * ln(2k / delta))`.
pub fn battle_length<F: Scalar>(theta_hat: F, m: usize, eps: F, delta: F, k: usize) -> Result<u64> {
    let k_f = F::from_usize(k).expect("k fits");
    let m_f = F::from_usize(m).expect("m fits");
    let t = F::lit(16.0) * theta_hat / (m_f * eps * eps) * (F::lit(2.0) * k_f / delta).ln();
    ceil_plays(t)
}

/// Finds an item `b` with `p(b beats best) > 1/2 - eps` with probability at
/// least `1 - delta`.
///
/// Without a `pivot` one is bootstrapped first, and `delta` is split evenly
/// between the bootstrap and the main search.
pub fn pac_best_item<F: Scalar, R: Rng>(
    sim: &mut Simulator<'_, F, R>,
    items: &[usize],
    cfg: &BestItemConfig<F>,
    pivot: Option<usize>,
) -> Result<SubroutineReport<F>> {
    cfg.validate(F::lit(0.125))?;
    let items = sim.model().sorted_set(items)?;
    if items.len() == 1 {
        return Ok(SubroutineReport {
            returned_item: items[0],
            total_plays: 0,
            pivot,
            pivot_plays: 0,
            phases: Vec::new(),
        });
    }
    let start = sim.plays();
    let (pivot, delta) = match pivot {
        Some(p) => {
            sim.model().check_item(p)?;
            (p, cfg.delta)
        }
        None => {
            let half = cfg.delta * F::half();
            (bootstrap_pivot(sim, &items, cfg.k, cfg.m, half)?, half)
        }
    };
    let pivot_plays = sim.plays() - start;
    let main_cfg = BestItemConfig { delta, ..*cfg };
    let mut report = battle(sim, &items, &main_cfg, MassSource::Estimate { pivot })?;
    report.pivot = Some(pivot);
    report.pivot_plays = pivot_plays;
    report.total_plays = sim.plays() - start;
    Ok(report)
}

/// Finds a (1/2)-optimal reference item: the same group battle with every
/// group's mass taken as the worst case `k` and `eps = 1/2`.
pub fn bootstrap_pivot<F: Scalar, R: Rng>(
    sim: &mut Simulator<'_, F, R>,
    items: &[usize],
    k: usize,
    m: usize,
    delta: F,
) -> Result<usize> {
    let cfg = BestItemConfig::new(k, m, F::half(), delta);
    Ok(bootstrap_report(sim, items, &cfg)?.returned_item)
}

pub(crate) fn bootstrap_report<F: Scalar, R: Rng>(
    sim: &mut Simulator<'_, F, R>,
    items: &[usize],
    cfg: &BestItemConfig<F>,
) -> Result<SubroutineReport<F>> {
    cfg.validate(F::half())?;
    let items = sim.model().sorted_set(items)?;
    let k_f = F::from_usize(cfg.k).expect("k fits");
    battle(sim, &items, cfg, MassSource::Fixed(k_f))
}

fn battle<F: Scalar, R: Rng>(
    sim: &mut Simulator<'_, F, R>,
    items: &[usize],
    cfg: &BestItemConfig<F>,
    mass: MassSource<F>,
) -> Result<SubroutineReport<F>> {
    let start = sim.plays();
    let k = cfg.k;
    if items.len() < k && sim.n() < k {
        return Err(invalid(format!("cannot form plays of {k} items from a universe of {}", sim.n())));
    }
    let mut report = SubroutineReport {
        returned_item: items[0],
        total_plays: 0,
        pivot: match mass {
            MassSource::Estimate { pivot } => Some(pivot),
            MassSource::Fixed(_) => None,
        },
        pivot_plays: 0,
        phases: Vec::new(),
    };
    if items.len() == 1 {
        return Ok(report);
    }

    let final_eps = cfg.final_eps_factor * cfg.eps;
    let final_delta = cfg.final_delta_factor * cfg.delta;
    let mut survivors = items.to_vec();
    let mut eps_prev = cfg.eps / F::lit(8.0);
    let mut delta_prev = cfg.delta * F::half();
    let mut round = if survivors.len() < k {
        eps_prev = final_eps;
        delta_prev = final_delta;
        padded_round(&survivors, items, sim.n(), k)
    } else {
        full_round(&survivors, k)?
    };

    loop {
        let eps = F::lit(0.75) * eps_prev;
        let delta = delta_prev * F::half();
        let mut phase = BestItemPhase {
            survivors: survivors.len(),
            eps,
            delta,
            padded: round.padded,
            groups: Vec::with_capacity(round.groups.len()),
        };
        let mut next: Vec<usize> = round.remainder.clone();
        for group in &round.groups {
            let record = play_group(sim, group, &survivors, cfg, mass, eps, delta)?;
            next.push(record.chosen);
            phase.groups.push(record);
        }
        report.phases.push(phase);
        next.sort_unstable();
        survivors = next;

        if survivors.len() == 1 {
            break;
        }
        if survivors.len() <= k {
            round = padded_round(&survivors, items, sim.n(), k);
            eps_prev = final_eps;
            delta_prev = final_delta;
        } else {
            round = full_round(&survivors, k)?;
            eps_prev = eps;
            delta_prev = delta;
        }
    }
    report.returned_item = survivors[0];
    report.total_plays = sim.plays() - start;
    Ok(report)
}

struct Round {
    groups: Vec<Vec<usize>>,
    remainder: Vec<usize>,
    padded: bool,
}

fn full_round(survivors: &[usize], k: usize) -> Result<Round> {
    let plan = partition(survivors, k)?;
    Ok(Round {
        groups: plan.full_batches().to_vec(),
        remainder: plan.remainder().to_vec(),
        padded: false,
    })
}

/// One group holding every survivor, topped up to `k` with the lowest-id
/// items already knocked out of `pool`, then the lowest-id outsiders.
fn padded_round(survivors: &[usize], pool: &[usize], n: usize, k: usize) -> Round {
    let mut group = survivors.to_vec();
    let eliminated = pool.iter().copied().filter(|i| !survivors.contains(i));
    let outsiders = (0..n).filter(|i| !pool.contains(i));
    for filler in eliminated.chain(outsiders) {
        if group.len() >= k {
            break;
        }
        group.push(filler);
    }
    group.sort_unstable();
    Round {
        groups: vec![group],
        remainder: Vec::new(),
        padded: true,
    }
}

fn play_group<F: Scalar, R: Rng>(
    sim: &mut Simulator<'_, F, R>,
    group: &[usize],
    survivors: &[usize],
    cfg: &BestItemConfig<F>,
    mass: MassSource<F>,
    eps: F,
    delta: F,
) -> Result<GroupRecord<F>> {
    let (theta_hat, estimate_plays) = match mass {
        MassSource::Fixed(c) => (c, 0),
        MassSource::Estimate { pivot } => {
            let rest: Vec<usize> = group.iter().copied().filter(|&i| i != pivot).collect();
            // Theta_G / theta_b counts the pivot itself when it plays in the group.
            let mut ratio = if rest.len() < group.len() { F::one() } else { F::zero() };
            // Every estimating play holds k items: chunks of k - 1 plus the pivot,
            // short chunks topped up with other group members as fillers.
            let plan = partition(&rest, cfg.k - 1)?;
            let chunk_delta = delta / F::from_usize(plan.batches.len()).expect("chunk count fits");
            let mut plays = 0;
            for chunk in &plan.batches {
                let fillers: Vec<usize> = rest
                    .iter()
                    .copied()
                    .filter(|i| !chunk.contains(i))
                    .take(cfg.k - 1 - chunk.len())
                    .collect();
                let est = score_estimate_padded(sim, chunk, pivot, &fillers, chunk_delta, cfg.estimate_cap)?;
                ratio = ratio + est.ratio;
                plays += est.plays_used;
            }
            (ratio.max(F::one()), plays)
        }
    };
    let t = battle_length(theta_hat, cfg.m, eps, delta, cfg.k)?;
    let mut wins = WinCountMatrix::new(group)?;
    sim.play_batch(group, cfg.m, t, &mut wins)?;

    let eligible: Vec<usize> = group.iter().copied().filter(|i| survivors.contains(i)).collect();
    let threshold = F::half() - eps * F::half();
    let mut best: Option<(usize, F)> = None;
    for &i in &eligible {
        let mut clears = true;
        let mut score = F::zero();
        for &j in group {
            if j == i {
                continue;
            }
            let p: F = wins.empirical_prob(i, j)?;
            score = score + p;
            if p < threshold {
                clears = false;
            }
        }
        // Ascending ids with strict improvement keeps the lowest id on ties.
        if clears && best.is_none_or(|(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    let (chosen, by_margin) = match best {
        Some((i, _)) => (i, true),
        None => (eligible[sim.rng().random_range(0..eligible.len())], false),
    };
    Ok(GroupRecord {
        items: group.to_vec(),
        theta_hat,
        t,
        estimate_plays,
        chosen,
        by_margin,
    })
}
