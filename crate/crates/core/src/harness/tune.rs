//! Grid search for the sparsification parameters.
//!
//! Each round runs all nine combinations of three violation fractions and
//! three nonzero fractions, ranks them by pairwise wins, then recenters both
//! grids on the winner with half the spacing.

use super::compare::{compare, Checkpoint, InstanceRun};
use crate::error::{Error, Result};

pub const CLOCKED_TIMES: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 20.0, 30.0];
pub const MAX_ROUNDS: usize = 20;

/// Three grid values `center - half, center, center + half`, clipped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub center: f64,
    pub half: f64,
}

impl Axis {
    pub fn from_range(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidProblem(format!("range [{lo}, {hi}] not within [0, 1]")));
        }
        Ok(Self {
            center: (lo + hi) / 2.0,
            half: (hi - lo) / 2.0,
        })
    }

    pub fn values(&self) -> [f64; 3] {
        [
            (self.center - self.half).clamp(0.0, 1.0),
            self.center,
            (self.center + self.half).clamp(0.0, 1.0),
        ]
    }

    pub fn span(&self) -> f64 {
        let [lo, _, hi] = self.values();
        hi - lo
    }

    fn recenter(&self, center: f64) -> Self {
        Self {
            center,
            half: self.half / 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneRound {
    pub viol: [f64; 3],
    pub nz: [f64; 3],
    /// Pairwise wins per grid point, `[v][n]`.
    pub scores: [[usize; 3]; 3],
    pub winner: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub pct_viol: f64,
    pub pct_nz: f64,
    pub rounds: Vec<TuneRound>,
    /// False when the round cap stopped the search.
    pub converged: bool,
}

/// Best grid point: most wins, then (1, 1), then closest to it, then first.
fn pick(scores: &[[usize; 3]; 3]) -> (usize, usize) {
    let best = scores.iter().flatten().copied().max().unwrap_or(0);
    let mut tied: Vec<(usize, usize)> = (0..3)
        .flat_map(|v| (0..3).map(move |n| (v, n)))
        .filter(|&(v, n)| scores[v][n] == best)
        .collect();
    tied.sort_by_key(|&(v, n)| (v.abs_diff(1) + n.abs_diff(1), v, n));
    tied[0]
}

/// Tunes `(pct_viol, pct_nz)` starting from the given ranges.
///
/// `evaluate(instance, pct_viol, pct_nz)` runs the algorithm once. Two grid
/// points are compared with [`compare`] at each checkpoint using threshold
/// `g`; the side with more instance wins scores a point.
pub fn tune<I, E>(
    instances: &[I],
    mut evaluate: E,
    viol_range: (f64, f64),
    nz_range: (f64, f64),
    checkpoints: &[Checkpoint],
    g: f64,
) -> Result<TuneResult>
where
    E: FnMut(&I, f64, f64) -> Result<InstanceRun>,
{
    if instances.is_empty() {
        return Err(Error::NoInstances);
    }
    let mut va = Axis::from_range(viol_range.0, viol_range.1)?;
    let mut na = Axis::from_range(nz_range.0, nz_range.1)?;
    let mut rounds = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let (vs, ns) = (va.values(), na.values());
        let mut runs: Vec<Vec<InstanceRun>> = Vec::with_capacity(9);
        for &v in &vs {
            for &n in &ns {
                runs.push(instances.iter().map(|inst| evaluate(inst, v, n)).collect::<Result<_>>()?);
            }
        }
        let mut scores = [[0usize; 3]; 3];
        for p in 0..9 {
            for q in p + 1..9 {
                let report = compare(&runs[p], &runs[q], checkpoints, g)?;
                for row in &report.rows {
                    if row.a_wins > row.b_wins {
                        scores[p / 3][p % 3] += 1;
                    } else if row.b_wins > row.a_wins {
                        scores[q / 3][q % 3] += 1;
                    }
                }
            }
        }
        let winner = pick(&scores);
        log::info!(
            "tune round {}: viol {vs:?}, nz {ns:?}, winner ({}, {})",
            rounds.len() + 1,
            vs[winner.0],
            ns[winner.1]
        );
        rounds.push(TuneRound {
            viol: vs,
            nz: ns,
            scores,
            winner,
        });
        if winner == (1, 1) && va.span() <= 0.2 + 1e-12 && na.span() <= 0.1 + 1e-12 {
            return Ok(TuneResult {
                pct_viol: va.center,
                pct_nz: na.center,
                rounds,
                converged: true,
            });
        }
        va = va.recenter(vs[winner.0]);
        na = na.recenter(ns[winner.1]);
    }
    log::warn!("tuning stopped after {MAX_ROUNDS} rounds without meeting the stop rule");
    Ok(TuneResult {
        pct_viol: va.center,
        pct_nz: na.center,
        rounds,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{IterRecord, RunTrace, Status};

    /// Trace whose gap closed at every clocked time is `gap` (root 100, opt 0).
    fn flat(gap: f64) -> RunTrace {
        let mut records = vec![IterRecord {
            iter: 0,
            seconds: 0.0,
            objective: 100.0,
            added_by: [0; 4],
            cuts_purged: 0,
            pool_size: 0,
            min_eig: -1.0,
            permanent_rows: 0,
        }];
        records.push(IterRecord {
            iter: 1,
            seconds: 0.5,
            objective: 100.0 - gap,
            ..records[0].clone()
        });
        records.push(IterRecord {
            iter: 2,
            seconds: 60.0,
            objective: 100.0 - gap,
            ..records[0].clone()
        });
        RunTrace {
            n: 3,
            m: 0,
            records,
            status: Status::TimeLimit,
            diagnostic: None,
        }
    }

    fn clocked() -> Vec<Checkpoint> {
        CLOCKED_TIMES.iter().map(|&t| Checkpoint::Seconds(t)).collect()
    }

    fn stub(gap: impl Fn(f64, f64) -> f64) -> impl FnMut(&usize, f64, f64) -> Result<InstanceRun> {
        move |inst, v, n| {
            Ok(InstanceRun {
                name: format!("i{inst}"),
                trace: flat(gap(v, n)),
                opt: 0.0,
            })
        }
    }

    #[test]
    fn constant_evaluator_returns_center() {
        let res = tune(&[0usize, 1], stub(|_, _| 30.0), (0.0, 1.0), (0.0, 1.0), &clocked(), 1.0).unwrap();
        assert!(res.converged);
        assert_eq!((res.pct_viol, res.pct_nz), (0.5, 0.5));
        assert!(res.rounds.iter().all(|r| r.winner == (1, 1)));
        assert!(res.rounds.len() <= 6);
    }

    #[test]
    fn monotone_in_nz_goes_to_the_top() {
        // 50 points per unit of pct_nz keeps neighbours more than g = 1 apart
        let res = tune(&[0usize, 1, 2], stub(|_, n| 50.0 * n), (0.0, 1.0), (0.0, 1.0), &clocked(), 1.0).unwrap();
        assert!(res.converged, "{} rounds", res.rounds.len());
        assert!((res.pct_nz - 1.0).abs() <= 0.05, "nz = {}", res.pct_nz);
        assert_eq!(res.pct_viol, 0.5);
    }

    #[test]
    fn peaked_evaluator_finds_the_peak() {
        let res = tune(
            &[0usize],
            stub(|v, n| 90.0 - 100.0 * ((v - 0.6).abs() + (n - 0.2).abs())),
            (0.0, 1.0),
            (0.0, 1.0),
            &clocked(),
            1.0,
        )
        .unwrap();
        assert!(res.converged);
        assert!((res.pct_viol - 0.6).abs() <= 0.1 && (res.pct_nz - 0.2).abs() <= 0.05);
    }

    #[test]
    fn empty_instance_set_is_an_error() {
        let none: [usize; 0] = [];
        assert_eq!(
            tune(&none, stub(|_, _| 0.0), (0.0, 1.0), (0.0, 1.0), &clocked(), 1.0).unwrap_err(),
            Error::NoInstances
        );
    }

    #[test]
    fn tie_break_prefers_center_then_distance() {
        assert_eq!(pick(&[[0; 3]; 3]), (1, 1));
        assert_eq!(pick(&[[2, 0, 0], [0, 0, 2], [0, 0, 0]]), (1, 2));
        assert_eq!(pick(&[[2, 0, 0], [0, 0, 0], [0, 0, 2]]), (0, 0));
    }
}
