//! The PAC-Wrapper: phase-wise pivot benchmarking and elimination.
//!
//! Each phase `s` finds a reference item `b_s` with the best-item subroutine,
//! plays every other survivor against it in batches of `k`, and drops the
//! items that lose to it by more than `eps_s = 2^-(s+2)`. Once fewer than `k`
//! items survive, a single padded set is replayed until one item is left.
//!
//! With `eps > 0` the run stops at the first phase whose `eps_s <= eps` and
//! returns that phase's pivot; with `m > 1` every play reveals a top-`m`
//! ranking and all batch lengths shrink by `1/m`.

use rand::Rng;

use crate::best_item::{pac_best_item, BestItemConfig};
use crate::error::{invalid, Error, Result};
use crate::model::PlModel;
use crate::oracle::Simulator;
use crate::rank_breaking::WinCountMatrix;
use crate::report::{BatchRecord, RunReport, Trace, WrapperPhase, WrapperTrace};
use crate::scalar::Scalar;
use crate::subroutines::{ceil_plays, clamp_theta_hat, partition, score_estimate, score_estimate_padded,
    DEFAULT_ESTIMATE_CAP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrapperConfig<F> {
    pub k: usize,
    pub m: usize,
    /// Zero asks for the best item itself.
    pub eps: F,
    pub delta: F,
    /// `delta_s = delta / (delta_numerator * s^3)`.
    pub delta_numerator: F,
    pub subroutine_final_eps: F,
    pub subroutine_final_delta: F,
    pub estimate_cap: u64,
    /// Global cap on subset plays.
    pub budget: Option<u64>,
}

impl<F: Scalar> WrapperConfig<F> {
    pub fn new(k: usize, m: usize, eps: F, delta: F) -> Self {
        Self {
            k,
            m,
            eps,
            delta,
            delta_numerator: F::lit(120.0),
            subroutine_final_eps: F::lit(2.0) / F::lit(3.0),
            subroutine_final_delta: F::one(),
            estimate_cap: DEFAULT_ESTIMATE_CAP,
            budget: None,
        }
    }

    pub fn validate(&self, model: &PlModel<F>) -> Result<()> {
        let n = model.n();
        if self.k < 2 || self.k > n {
            return Err(invalid(format!("subset size k = {} outside 2..={n}", self.k)));
        }
        if self.m < 1 || self.m >= self.k {
            return Err(invalid(format!("ranking length m = {} outside 1..={}", self.m, self.k - 1)));
        }
        if !(self.eps >= F::zero() && self.eps <= F::one()) {
            return Err(invalid(format!("eps = {} outside [0, 1]", self.eps)));
        }
        if !(self.delta > F::zero() && self.delta < F::one()) {
            return Err(invalid(format!("delta = {} outside (0, 1)", self.delta)));
        }
        if self.delta_numerator.is_nan() || self.delta_numerator <= F::zero() {
            return Err(invalid("delta numerator must be positive"));
        }
        if self.eps == F::zero() {
            model.require_unique_best()?;
        }
        Ok(())
    }

    /// `(eps_s, delta_s)` of phase `s`.
    pub fn schedule(&self, s: u32) -> (F, F) {
        let eps_s = F::lit(0.5).powi(s as i32 + 2);
        let s_f = F::from_u32(s).expect("phase index fits");
        (eps_s, self.delta / (self.delta_numerator * s_f * s_f * s_f))
    }

    /// Batch length `ceil(2 theta_hat / (m eps_s^2) * ln(k / delta_s))`.
    pub fn batch_length(&self, theta_hat: F, eps_s: F, delta_s: F) -> Result<u64> {
        let k_f = F::from_usize(self.k).expect("k fits");
        let m_f = F::from_usize(self.m).expect("m fits");
        ceil_plays(F::lit(2.0) * theta_hat / (m_f * eps_s * eps_s) * (k_f / delta_s).ln())
    }

    fn subroutine(&self, eps_s: F, delta_s: F) -> BestItemConfig<F> {
        let eps = if self.eps > F::zero() { eps_s / F::lit(4.0) } else { eps_s };
        BestItemConfig {
            final_eps_factor: self.subroutine_final_eps,
            final_delta_factor: self.subroutine_final_delta,
            estimate_cap: self.estimate_cap,
            ..BestItemConfig::new(self.k, self.m, eps, delta_s)
        }
    }
}

/// Runs the wrapper on all items of `model`.
pub fn pac_wrapper<F: Scalar, R: Rng>(model: &PlModel<F>, cfg: &WrapperConfig<F>, rng: R) -> Result<RunReport> {
    cfg.validate(model)?;
    let mut sim = Simulator::new(model, rng).with_budget(cfg.budget);
    let mut trace = WrapperTrace::default();
    match run(&mut sim, cfg, &mut trace) {
        Ok(item) => Ok(RunReport {
            returned_item: Some(item),
            total_plays: sim.plays(),
            per_item_plays: sim.per_item_plays().to_vec(),
            trace: Trace::Wrapper(trace),
        }),
        Err(Error::BudgetExhausted { budget, plays, .. }) => Err(Error::BudgetExhausted {
            budget,
            plays,
            partial: Some(Box::new(RunReport {
                returned_item: None,
                total_plays: sim.plays(),
                per_item_plays: sim.per_item_plays().to_vec(),
                trace: Trace::Wrapper(trace),
            })),
        }),
        Err(e) => Err(e),
    }
}

fn run<F: Scalar, R: Rng>(
    sim: &mut Simulator<'_, F, R>,
    cfg: &WrapperConfig<F>,
    trace: &mut WrapperTrace,
) -> Result<usize> {
    let n = sim.n();
    let k = cfg.k;
    let mut survivors: Vec<usize> = (0..n).collect();
    let mut s: u32 = 1;

    while survivors.len() >= k {
        let (eps_s, delta_s) = cfg.schedule(s);
        let before = sim.plays();
        let pivot = pac_best_item(sim, &survivors, &cfg.subroutine(eps_s, delta_s), None)?.returned_item;
        let mut phase = WrapperPhase {
            s,
            endgame: false,
            eps: eps_s.to_f64_lossy(),
            delta: delta_s.to_f64_lossy(),
            pivot,
            survivors: survivors.clone(),
            subroutine_plays: sim.plays() - before,
            batches: Vec::new(),
            eliminated: Vec::new(),
        };
        if cfg.eps > F::zero() && eps_s <= cfg.eps {
            trace.phases.push(phase);
            trace.stopped_early = true;
            return Ok(pivot);
        }

        let rest: Vec<usize> = survivors.iter().copied().filter(|&i| i != pivot).collect();
        let plan = partition(&rest, k - 1)?;
        let mut next = vec![pivot];
        next.extend_from_slice(plan.remainder());
        for batch in plan.full_batches() {
            let est = score_estimate(sim, batch, pivot, delta_s, cfg.estimate_cap)?;
            let theta_hat = clamp_theta_hat(est.ratio)?;
            let t = cfg.batch_length(theta_hat, eps_s, delta_s)?;
            let mut played = batch.clone();
            played.push(pivot);
            played.sort_unstable();
            let mut wins = WinCountMatrix::new(&played)?;
            sim.play_batch(&played, cfg.m, t, &mut wins)?;
            let threshold = F::half() - eps_s;
            for &i in batch {
                if wins.empirical_prob::<F>(i, pivot)? > threshold {
                    next.push(i);
                } else {
                    phase.eliminated.push(i);
                }
            }
            phase.batches.push(BatchRecord {
                items: played,
                raw_ratio: est.ratio.to_f64_lossy(),
                theta_hat: theta_hat.to_f64_lossy(),
                estimate_plays: est.plays_used,
                t,
            });
        }
        trace.phases.push(phase);
        next.sort_unstable();
        survivors = next;
        s += 1;
    }

    if survivors.len() == 1 {
        return Ok(survivors[0]);
    }

    // Fewer than k survivors: top the set up with the lowest-id eliminated items.
    let mut padded = survivors.clone();
    padded.extend((0..n).filter(|i| !survivors.contains(i)).take(k - survivors.len()));
    padded.sort_unstable();
    let mut wins = WinCountMatrix::new(&padded)?;

    while survivors.len() > 1 {
        let (eps_s, delta_s) = cfg.schedule(s);
        let before = sim.plays();
        let pivot = pac_best_item(sim, &survivors, &cfg.subroutine(eps_s, delta_s), None)?.returned_item;
        let mut phase = WrapperPhase {
            s,
            endgame: true,
            eps: eps_s.to_f64_lossy(),
            delta: delta_s.to_f64_lossy(),
            pivot,
            survivors: survivors.clone(),
            subroutine_plays: sim.plays() - before,
            batches: Vec::new(),
            eliminated: Vec::new(),
        };
        if cfg.eps > F::zero() && eps_s <= cfg.eps {
            trace.phases.push(phase);
            trace.stopped_early = true;
            return Ok(pivot);
        }

        let rest: Vec<usize> = survivors.iter().copied().filter(|&i| i != pivot).collect();
        let fillers: Vec<usize> = padded.iter().copied().filter(|i| !survivors.contains(i)).collect();
        let est = score_estimate_padded(sim, &rest, pivot, &fillers, delta_s, cfg.estimate_cap)?;
        let theta_hat = clamp_theta_hat(est.ratio)?;
        let t = cfg.batch_length(theta_hat, eps_s, delta_s)?;
        sim.play_batch(&padded, cfg.m, t, &mut wins)?;
        let threshold = F::half() - eps_s;
        let mut next = vec![pivot];
        for &i in &rest {
            if wins.empirical_prob::<F>(i, pivot)? < threshold {
                phase.eliminated.push(i);
            } else {
                next.push(i);
            }
        }
        phase.batches.push(BatchRecord {
            items: padded.clone(),
            raw_ratio: est.ratio.to_f64_lossy(),
            theta_hat: theta_hat.to_f64_lossy(),
            estimate_plays: est.plays_used,
            t,
        });
        trace.phases.push(phase);
        next.sort_unstable();
        survivors = next;
        s += 1;
    }
    Ok(survivors[0])
}
