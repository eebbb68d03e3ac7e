//! Built-in Plackett-Luce environments.

use crate::error::{Error, Result};
use crate::model::PlModel;

/// Names accepted by [`load_env`], in listing order.
pub const ENV_NAMES: [&str; 8] = ["g1", "g4", "arith", "geo", "b1", "g4b", "arithb", "geob"];

/// Step of `arithb`. The printed step of 0.2 would make scores negative from
/// the seventh item on, so the 50-item arithmetic instance uses 0.02.
pub const ARITHB_STEP: f64 = 0.02;

fn blocks(head: f64, tiers: &[(f64, usize)]) -> Vec<f64> {
    let mut theta = vec![head];
    for &(v, count) in tiers {
        theta.extend(std::iter::repeat_n(v, count));
    }
    theta
}

fn arithmetic(n: usize, step: f64) -> Vec<f64> {
    (0..n).map(|i| 1.0 - step * i as f64).collect()
}

fn geometric(n: usize, ratio: f64) -> Vec<f64> {
    (0..n).map(|i| ratio.powi(i as i32)).collect()
}

/// Score vector of a named environment, item 0 being the best.
pub fn env_theta(name: &str) -> Result<Vec<f64>> {
    Ok(match name {
        "g1" => blocks(0.8, &[(0.2, 15)]),
        "g4" => blocks(1.0, &[(0.7, 5), (0.5, 5), (0.01, 5)]),
        "arith" => arithmetic(16, 0.06),
        "geo" => geometric(16, 0.8),
        "b1" => blocks(0.8, &[(0.6, 15)]),
        "g4b" => blocks(1.0, &[(0.7, 17), (0.5, 27), (0.01, 5)]),
        "arithb" => arithmetic(50, ARITHB_STEP),
        "geob" => geometric(50, 0.9),
        other => {
            return Err(Error::NotFound(format!(
                "unknown environment '{other}' (known: {})",
                ENV_NAMES.join(", ")
            )))
        }
    })
}

pub fn load_env(name: &str) -> Result<PlModel<f64>> {
    PlModel::new(env_theta(name)?)
}

/// `(name, n, delta_min)` for every built-in environment.
pub fn list() -> Vec<(&'static str, usize, f64)> {
    ENV_NAMES
        .iter()
        .map(|&name| {
            let model = load_env(name).expect("built-in environments are valid");
            (name, model.n(), model.gaps().delta_min)
        })
        .collect()
}
