//! Seeded multi-replicate parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::best_item::{run_best_item, BestItemConfig};
use crate::bounds::{budget_error_bound, pac_upper_bound, topm_lower_bound, ua_success_bound};
use crate::error::{invalid, Error, Result};
use crate::model::PlModel;
use crate::report::RunReport;
use crate::uniform::{uniform_allocation, BudgetConfig};
use crate::wrapper::{pac_wrapper, WrapperConfig};

use super::env::load_env;

#[derive(Debug, Clone, PartialEq)]
pub enum EnvSource {
    Named(String),
    Inline(Vec<f64>),
}

impl EnvSource {
    pub fn load(&self) -> Result<PlModel<f64>> {
        match self {
            EnvSource::Named(name) => load_env(name),
            EnvSource::Inline(theta) => PlModel::new(theta.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Algorithm {
    PacWrapper,
    UniformAllocation,
    PacBestItem,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::PacWrapper => "pac-wrapper",
            Algorithm::UniformAllocation => "uniform-allocation",
            Algorithm::PacBestItem => "pac-best-item",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pac-wrapper" | "pw" => Ok(Algorithm::PacWrapper),
            "uniform-allocation" | "ua" => Ok(Algorithm::UniformAllocation),
            "pac-best-item" => Ok(Algorithm::PacBestItem),
            other => Err(invalid(format!(
                "unknown algorithm '{other}' (pac-wrapper, uniform-allocation, pac-best-item)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    None,
    Eps(Vec<f64>),
    M(Vec<usize>),
    Q(Vec<u64>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::None => "none",
            SweepAxis::Eps(_) => "eps",
            SweepAxis::M(_) => "m",
            SweepAxis::Q(_) => "q",
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            SweepAxis::None => vec![f64::NAN],
            SweepAxis::Eps(v) => v.clone(),
            SweepAxis::M(v) => v.iter().map(|&x| x as f64).collect(),
            SweepAxis::Q(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }

    fn len(&self) -> usize {
        match self {
            SweepAxis::None => 1,
            SweepAxis::Eps(v) => v.len(),
            SweepAxis::M(v) => v.len(),
            SweepAxis::Q(v) => v.len(),
        }
    }
}

fn parse_list<T: FromStr>(axis: &str, values: &str) -> Result<Vec<T>> {
    values
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| invalid(format!("bad {axis} grid value '{v}'")))
        })
        .collect()
}

/// Parses `none`, `eps:<values>`, `m:<values>` or `q:<values>` with
/// comma-separated values.
impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(SweepAxis::None);
        }
        let (axis, values) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("sweep '{s}' is not of the form axis:v1,v2,...")))?;
        match axis {
            "eps" => Ok(SweepAxis::Eps(parse_list(axis, values)?)),
            "m" => Ok(SweepAxis::M(parse_list(axis, values)?)),
            "q" => Ok(SweepAxis::Q(parse_list(axis, values)?)),
            other => Err(invalid(format!("unknown sweep axis '{other}' (eps, m, q)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub env: EnvSource,
    pub algo: Algorithm,
    pub axis: SweepAxis,
    pub reps: usize,
    pub base_seed: u64,
    pub k: usize,
    pub m: usize,
    pub eps: f64,
    pub delta: f64,
    /// Budget for uniform allocation when Q is not swept.
    pub q: Option<u64>,
}

impl ExperimentSpec {
    pub fn new(env: EnvSource, algo: Algorithm) -> Self {
        Self {
            env,
            algo,
            axis: SweepAxis::None,
            reps: 50,
            base_seed: 0,
            k: 5,
            m: 1,
            eps: 0.01,
            delta: 0.01,
            q: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(invalid("at least one replicate is required"));
        }
        let values = self.axis.values();
        if values.is_empty() {
            return Err(invalid("sweep grid is empty"));
        }
        if values.len() > 1 {
            let up = values.windows(2).all(|w| w[0] < w[1]);
            let down = values.windows(2).all(|w| w[0] > w[1]);
            if !(up || down) {
                return Err(invalid("sweep grid must be strictly sorted"));
            }
        }
        match (&self.axis, self.algo) {
            (SweepAxis::Q(_), Algorithm::UniformAllocation) => Ok(()),
            (SweepAxis::Q(_), algo) => Err(invalid(format!("a Q grid needs uniform-allocation, not {algo}"))),
            (SweepAxis::Eps(_), Algorithm::UniformAllocation) => {
                Err(invalid("uniform-allocation has no eps parameter to sweep"))
            }
            (_, Algorithm::UniformAllocation) if self.q.is_none() => {
                Err(invalid("uniform-allocation needs a budget Q"))
            }
            _ => Ok(()),
        }
    }

    /// `(eps, m, q)` at grid point `idx`.
    fn point(&self, idx: usize) -> (f64, usize, Option<u64>) {
        match &self.axis {
            SweepAxis::None => (self.eps, self.m, self.q),
            SweepAxis::Eps(v) => (v[idx], self.m, self.q),
            SweepAxis::M(v) => (self.eps, v[idx], self.q),
            SweepAxis::Q(v) => (self.eps, self.m, Some(v[idx])),
        }
    }

    fn run_one(&self, model: &PlModel<f64>, idx: usize, rep: usize) -> Result<RunReport> {
        let (eps, m, q) = self.point(idx);
        let rng = ChaCha8Rng::seed_from_u64(self.base_seed.wrapping_add(rep as u64));
        match self.algo {
            Algorithm::PacWrapper => pac_wrapper(model, &WrapperConfig::new(self.k, m, eps, self.delta), rng),
            Algorithm::UniformAllocation => {
                let q = q.expect("validated");
                uniform_allocation(model, &BudgetConfig::new(q, self.k, m), rng)
            }
            Algorithm::PacBestItem => run_best_item(model, &BestItemConfig::new(self.k, m, eps, self.delta), rng, None),
        }
    }

    /// `(theory_ub, theory_lb)` at grid point `idx`: play-count predictors for
    /// the fixed-confidence algorithms, success-probability bounds for
    /// uniform allocation.
    pub fn theory(&self, model: &PlModel<f64>, idx: usize) -> Result<(f64, f64)> {
        let (eps, m, q) = self.point(idx);
        match self.algo {
            Algorithm::UniformAllocation => {
                let q = q.expect("validated");
                Ok((
                    1.0 - budget_error_bound(model, q, m),
                    ua_success_bound(model, self.k, m, q)?,
                ))
            }
            _ => Ok((
                pac_upper_bound(model, self.k, m, eps, self.delta)?,
                topm_lower_bound(model, self.k, m, self.delta)?,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub mean_plays: f64,
    pub std_plays: f64,
    pub success_rate: f64,
    pub theory_ub: f64,
    pub theory_lb: f64,
    /// Mean participation count per item.
    pub mean_survival: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: &'static str,
    pub algo: Algorithm,
    pub rows: Vec<SweepRow>,
}

/// Runs `reps` replicates at every grid point, replicate `r` seeded with
/// `base_seed + r`. Replicates run in parallel; aggregation follows grid and
/// replicate order, so the result does not depend on scheduling.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let model = spec.env.load()?;
    let points = spec.axis.len();
    let jobs: Vec<(usize, usize)> = (0..points)
        .flat_map(|p| (0..spec.reps).map(move |r| (p, r)))
        .collect();
    let runs: Vec<RunReport> = jobs
        .par_iter()
        .map(|&(p, r)| spec.run_one(&model, p, r))
        .collect::<Result<_>>()?;

    let best = model.best_item();
    let values = spec.axis.values();
    let mut rows = Vec::with_capacity(points);
    for (p, chunk) in runs.chunks(spec.reps).enumerate() {
        let plays: Vec<f64> = chunk.iter().map(|r| r.total_plays as f64).collect();
        let (mean, std) = mean_std(&plays);
        let successes = chunk.iter().filter(|r| r.returned_item == Some(best)).count();
        let mut survival = vec![0.0; model.n()];
        for r in chunk {
            for (acc, &c) in survival.iter_mut().zip(&r.per_item_plays) {
                *acc += c as f64;
            }
        }
        survival.iter_mut().for_each(|s| *s /= chunk.len() as f64);
        let (theory_ub, theory_lb) = spec.theory(&model, p)?;
        rows.push(SweepRow {
            axis_value: values[p],
            mean_plays: mean,
            std_plays: std,
            success_rate: successes as f64 / chunk.len() as f64,
            theory_ub,
            theory_lb,
            mean_survival: survival,
        });
    }
    Ok(SweepResult {
        axis: spec.axis.name(),
        algo: spec.algo,
        rows,
    })
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_axes() {
        assert_eq!("none".parse::<SweepAxis>().unwrap(), SweepAxis::None);
        assert_eq!("eps:0.5,0.1".parse::<SweepAxis>().unwrap(), SweepAxis::Eps(vec![0.5, 0.1]));
        assert_eq!("m:1,2,4".parse::<SweepAxis>().unwrap(), SweepAxis::M(vec![1, 2, 4]));
        assert_eq!("q:10, 20".parse::<SweepAxis>().unwrap(), SweepAxis::Q(vec![10, 20]));
        assert!("k:1".parse::<SweepAxis>().is_err());
        assert!("m:1,x".parse::<SweepAxis>().is_err());
        assert!("eps".parse::<SweepAxis>().is_err());
        assert_eq!("ua".parse::<Algorithm>().unwrap(), Algorithm::UniformAllocation);
        assert!("dnb".parse::<Algorithm>().is_err());
    }

    #[test]
    fn rejects_mismatched_specs() {
        let env = EnvSource::Named("g1".into());
        let mut spec = ExperimentSpec::new(env.clone(), Algorithm::PacWrapper);
        spec.axis = SweepAxis::Q(vec![100, 200]);
        assert!(run_sweep(&spec).is_err());

        let mut spec = ExperimentSpec::new(env.clone(), Algorithm::UniformAllocation);
        spec.q = Some(100);
        spec.axis = SweepAxis::Eps(vec![0.1]);
        assert!(run_sweep(&spec).is_err());

        let spec = ExperimentSpec::new(env.clone(), Algorithm::UniformAllocation);
        assert!(run_sweep(&spec).is_err());

        let mut spec = ExperimentSpec::new(env.clone(), Algorithm::PacWrapper);
        spec.axis = SweepAxis::M(vec![2, 1, 4]);
        assert!(run_sweep(&spec).is_err());
        spec.axis = SweepAxis::M(vec![]);
        assert!(run_sweep(&spec).is_err());
        spec.axis = SweepAxis::None;
        spec.reps = 0;
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn small_ua_sweep() {
        let mut spec = ExperimentSpec::new(EnvSource::Named("g4".into()), Algorithm::UniformAllocation);
        spec.axis = SweepAxis::Q(vec![50, 500]);
        spec.reps = 8;
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 2);
        let model = load_env("g4").unwrap();
        for (idx, row) in res.rows.iter().enumerate() {
            assert!((0.0..=1.0).contains(&row.success_rate));
            assert!(row.mean_plays <= row.axis_value);
            assert_eq!((row.theory_ub, row.theory_lb), spec.theory(&model, idx).unwrap());
            let total: f64 = row.mean_survival.iter().sum();
            assert!((total - 5.0 * row.mean_plays).abs() < 1e-6);
        }
    }

    #[test]
    fn replicate_order_does_not_matter() {
        let mut spec = ExperimentSpec::new(EnvSource::Named("g1".into()), Algorithm::UniformAllocation);
        spec.q = Some(300);
        spec.reps = 6;
        let a = run_sweep(&spec).unwrap();
        // Same seeds visited one by one in reverse order.
        let model = spec.env.load().unwrap();
        let mut plays: Vec<f64> = (0..6).rev().map(|r| spec.run_one(&model, 0, r).unwrap().total_plays as f64).collect();
        plays.reverse();
        assert_eq!(a.rows[0].mean_plays, mean_std(&plays).0);
    }

    #[test]
    fn sample_std() {
        assert_eq!(mean_std(&[2.0, 4.0]), (3.0, 2f64.sqrt()));
        assert_eq!(mean_std(&[5.0]), (5.0, 0.0));
    }
}
