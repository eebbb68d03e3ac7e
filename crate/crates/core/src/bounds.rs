//! Closed-form complexity predictors.
//!
//! These evaluate the instance-dependent expressions of the upper and lower
//! bounds with all hidden constants set to one. They are meant as overlays
//! for measured play counts, not as guarantees.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::model::PlModel;
use crate::scalar::Scalar;
use crate::uniform::min_feasible_budget;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityTerms<F> {
    pub ub_pac: F,
    pub lb_winner: F,
    pub lb_topm: F,
    pub delta_tilde: F,
    pub ua_success_lb: F,
}

fn check_delta<F: Scalar>(delta: F) -> Result<()> {
    if delta > F::zero() && delta < F::one() {
        Ok(())
    } else {
        Err(invalid(format!("delta = {delta} outside (0, 1)")))
    }
}

fn usize_f<F: Scalar>(x: usize) -> F {
    F::from_usize(x).expect("count fits")
}

/// `(Theta_[k] / k) * sum_{i != best} max(1, 1/(m g_i^2)) ln(k/delta) ln(1/g_i)`
/// with `g_i = max(Delta_i, eps)`.
///
/// A negative `ln(1/g_i)` (gaps above one on unnormalized instances) is
/// clamped to zero.
pub fn pac_upper_bound<F: Scalar>(inst: &PlModel<F>, k: usize, m: usize, eps: F, delta: F) -> Result<F> {
    check_delta(delta)?;
    if m < 1 {
        return Err(invalid("m must be at least 1"));
    }
    if eps < F::zero() {
        return Err(invalid(format!("eps = {eps} must be nonnegative")));
    }
    if eps == F::zero() {
        inst.require_unique_best()?;
    }
    let top = inst.top_k_mass(k)?;
    let gaps = inst.gaps();
    let m_f = usize_f::<F>(m);
    let log_k = (usize_f::<F>(k) / delta).ln();
    let sum: F = gaps
        .delta
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != gaps.best_item)
        .map(|(_, &d)| {
            let g = d.max(eps);
            let per = (F::one() / (m_f * g * g)).max(F::one());
            per * log_k * (F::one() / g).ln().max(F::zero())
        })
        .sum();
    Ok(top / usize_f(k) * sum)
}

fn instance_term<F: Scalar>(inst: &PlModel<F>) -> Result<F> {
    inst.require_unique_best()?;
    let gaps = inst.gaps();
    let top = inst.theta()[gaps.best_item];
    Ok(gaps
        .delta
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != gaps.best_item)
        .map(|(i, &d)| inst.theta()[i] * top / (d * d))
        .sum())
}

/// `max(sum_{i != best} theta_i theta_best / Delta_i^2, n/k) ln(1/delta)`.
pub fn winner_lower_bound<F: Scalar>(inst: &PlModel<F>, k: usize, delta: F) -> Result<F> {
    topm_lower_bound(inst, k, 1, delta)
}

/// The winner lower bound with the instance sum divided by `m`.
pub fn topm_lower_bound<F: Scalar>(inst: &PlModel<F>, k: usize, m: usize, delta: F) -> Result<F> {
    check_delta(delta)?;
    if k < 1 || m < 1 {
        return Err(invalid("k and m must be at least 1"));
    }
    let term = instance_term(inst)? / usize_f(m);
    let floor = usize_f::<F>(inst.n()) / usize_f(k);
    Ok(term.max(floor) * (F::one() / delta).ln())
}

/// `(sum_{a != best} theta_a^2 / Delta_a^2)^-1`, zero when a gap vanishes.
pub fn delta_tilde<F: Scalar>(inst: &PlModel<F>) -> F {
    let gaps = inst.gaps();
    let mut sum = F::zero();
    for (a, &d) in gaps.delta.iter().enumerate() {
        if a == gaps.best_item {
            continue;
        }
        if d == F::zero() {
            return F::zero();
        }
        let t = inst.theta()[a];
        sum = sum + t * t / (d * d);
    }
    F::one() / sum
}

/// `exp(-2 m Q delta_tilde)`.
pub fn budget_error_bound<F: Scalar>(inst: &PlModel<F>, q: u64, m: usize) -> F {
    (-F::lit(2.0) * usize_f::<F>(m) * F::from_count(q) * delta_tilde(inst)).exp()
}

/// `1 - 4 log2(n) ((k-1)/k) exp(-m Q Delta_min^2 / (16 (2n + k log2 k)))`, clamped to `[0, 1]`.
pub fn ua_success_bound<F: Scalar>(inst: &PlModel<F>, k: usize, m: usize, q: u64) -> Result<F> {
    let n = inst.n();
    let min = min_feasible_budget(n, k)?;
    if q < min {
        return Err(invalid(format!("budget {q} below the minimum feasible {min}")));
    }
    let n_f = usize_f::<F>(n);
    let k_f = usize_f::<F>(k);
    let d = inst.gaps().delta_min;
    let denom = F::lit(16.0) * (F::lit(2.0) * n_f + k_f * k_f.log2());
    let expo = -(usize_f::<F>(m) * F::from_count(q) * d * d) / denom;
    let b = F::one() - F::lit(4.0) * n_f.log2() * (k_f - F::one()) / k_f * expo.exp();
    Ok(b.max(F::zero()).min(F::one()))
}

pub fn complexity_terms<F: Scalar>(
    inst: &PlModel<F>,
    k: usize,
    m: usize,
    eps: F,
    delta: F,
    q: u64,
) -> Result<ComplexityTerms<F>> {
    Ok(ComplexityTerms {
        ub_pac: pac_upper_bound(inst, k, m, eps, delta)?,
        lb_winner: winner_lower_bound(inst, k, delta)?,
        lb_topm: topm_lower_bound(inst, k, m, delta)?,
        delta_tilde: delta_tilde(inst),
        ua_success_lb: ua_success_bound(inst, k, m, q)?,
    })
}
