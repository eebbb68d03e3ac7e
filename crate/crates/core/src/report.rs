//! Per-run outcomes and their CSV forms.

use std::io::Write;

use serde::Serialize;

/// Outcome of one algorithm run.
///
/// `returned_item` is `None` only for the partial report carried by a
/// budget-exhausted error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub returned_item: Option<usize>,
    pub total_plays: u64,
    /// Number of subset plays each item took part in.
    pub per_item_plays: Vec<u64>,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Trace {
    Wrapper(WrapperTrace),
    Uniform(UniformTrace),
    BestItem(BestItemTrace),
}

/// One benchmarking batch: the pivot plus up to `k - 1` challengers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchRecord {
    pub items: Vec<usize>,
    pub raw_ratio: f64,
    /// Clamped mass used to size the batch.
    pub theta_hat: f64,
    pub estimate_plays: u64,
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WrapperPhase {
    pub s: u32,
    /// Phase of the final loop that plays one padded set.
    pub endgame: bool,
    pub eps: f64,
    pub delta: f64,
    pub pivot: usize,
    /// Survivors entering the phase.
    pub survivors: Vec<usize>,
    pub subroutine_plays: u64,
    pub batches: Vec<BatchRecord>,
    pub eliminated: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct WrapperTrace {
    pub phases: Vec<WrapperPhase>,
    /// The run stopped at the first phase with `eps_s <= eps`.
    pub stopped_early: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformRound {
    pub endgame: bool,
    pub survivors: Vec<usize>,
    pub batches: Vec<Vec<usize>>,
    pub kept: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct UniformTrace {
    pub q_prime: u64,
    pub rounds: Vec<UniformRound>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestItemTrace {
    pub pivot: Option<usize>,
    pub pivot_plays: u64,
    /// `(survivors, groups, eps, delta, plays)` per round.
    pub rounds: Vec<(usize, usize, f64, f64, u64)>,
}

impl RunReport {
    /// Writes one row per phase or round of the trace.
    pub fn write_phase_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match &self.trace {
            Trace::Wrapper(t) => {
                w.write_record([
                    "s", "endgame", "eps", "delta", "pivot", "survivors", "batches",
                    "subroutine_plays", "batch_plays", "eliminated",
                ])?;
                for p in &t.phases {
                    let batch_plays: u64 = p.batches.iter().map(|b| b.t + b.estimate_plays).sum();
                    w.write_record([
                        p.s.to_string(),
                        p.endgame.to_string(),
                        p.eps.to_string(),
                        p.delta.to_string(),
                        p.pivot.to_string(),
                        p.survivors.len().to_string(),
                        p.batches.len().to_string(),
                        p.subroutine_plays.to_string(),
                        batch_plays.to_string(),
                        join(&p.eliminated),
                    ])?;
                }
            }
            Trace::Uniform(t) => {
                w.write_record(["round", "endgame", "q_prime", "survivors", "batches", "kept"])?;
                for (i, r) in t.rounds.iter().enumerate() {
                    w.write_record([
                        (i + 1).to_string(),
                        r.endgame.to_string(),
                        t.q_prime.to_string(),
                        r.survivors.len().to_string(),
                        r.batches.len().to_string(),
                        join(&r.kept),
                    ])?;
                }
            }
            Trace::BestItem(t) => {
                w.write_record(["round", "survivors", "groups", "eps", "delta", "plays"])?;
                for (i, (size, groups, eps, delta, plays)) in t.rounds.iter().enumerate() {
                    w.write_record([
                        (i + 1).to_string(),
                        size.to_string(),
                        groups.to_string(),
                        eps.to_string(),
                        delta.to_string(),
                        plays.to_string(),
                    ])?;
                }
            }
        }
        w.flush()
    }

    /// Writes `item,plays` for every item.
    pub fn write_survival_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["item", "plays"])?;
        for (i, c) in self.per_item_plays.iter().enumerate() {
            w.write_record([i.to_string(), c.to_string()])?;
        }
        w.flush()
    }
}

fn join(items: &[usize]) -> String {
    items.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

/// Per-item participation counts of a completed or truncated run.
pub fn survival_profile(report: &RunReport) -> Vec<u64> {
    report.per_item_plays.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> RunReport {
        RunReport {
            returned_item: Some(0),
            total_plays: 12,
            per_item_plays: vec![12, 12, 5],
            trace: Trace::Uniform(UniformTrace {
                q_prime: 4,
                rounds: vec![UniformRound {
                    endgame: false,
                    survivors: vec![0, 1, 2],
                    batches: vec![vec![0, 1, 2]],
                    kept: vec![0, 1],
                }],
            }),
        }
    }

    #[test]
    fn survival_rows() {
        let mut buf = Vec::new();
        report().write_survival_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "item,plays\n0,12\n1,12\n2,5\n");
        assert_eq!(survival_profile(&report()), vec![12, 12, 5]);
    }

    #[test]
    fn phase_rows() {
        let mut buf = Vec::new();
        report().write_phase_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "round,endgame,q_prime,survivors,batches,kept\n1,false,4,3,1,0;1\n"
        );
    }
}
