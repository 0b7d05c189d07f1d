//! Benchmark layer: gap closed, pairwise comparison, tuning, test instances.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

mod boxqp;
mod compare;
mod tune;

pub use boxqp::{brute_force_opt, gen_boxqp, local_search_opt};
pub use compare::{compare, instance_table, outcome, Checkpoint, CheckpointRow, ComparisonReport, InstanceRun, Outcome};
pub use tune::{tune, Axis, TuneResult, TuneRound, CLOCKED_TIMES, MAX_ROUNDS};

/// Bounds for one instance of a maximization problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRecord {
    /// Bound of the McCormick relaxation.
    pub rlt: f64,
    /// Bound at the point of interest.
    pub bnd: f64,
    pub opt: f64,
}

impl GapRecord {
    /// `rlt ≥ bnd ≥ opt − tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        self.rlt + tol >= self.bnd && self.bnd >= self.opt - tol
    }
}

/// `100 (RLT − BND) / (RLT − OPT)`.
pub fn gap_closed(rec: &GapRecord) -> Result<f64> {
    if rec.rlt == rec.opt {
        return Err(Error::ZeroGap);
    }
    let g = 100.0 * (rec.rlt - rec.bnd) / (rec.rlt - rec.opt);
    if !(-1e-6..=100.0 + 1e-6).contains(&g) {
        log::warn!("gap closed {g:.4} outside [0, 100]: rlt={} bnd={} opt={}", rec.rlt, rec.bnd, rec.opt);
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptSource {
    Supplied,
    BruteForced,
    /// Best value found by local search; a lower bound on the optimum.
    LocalSearch,
}

impl OptSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Supplied => "supplied",
            Self::BruteForced => "brute-forced",
            Self::LocalSearch => "local-search",
        }
    }
}

impl FromStr for OptSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::Supplied, Self::BruteForced, Self::LocalSearch]
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown optimum source `{s}`")))
    }
}

impl fmt::Display for OptSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptValue {
    pub value: f64,
    pub source: OptSource,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let g = |rlt, bnd, opt| gap_closed(&GapRecord { rlt, bnd, opt }).unwrap();
        assert_eq!(g(100.0, 20.0, 0.0), 80.0);
        assert_eq!(g(7.0, 7.0, 3.0), 0.0);
        assert_eq!(g(7.0, 3.0, 3.0), 100.0);
        assert_eq!(gap_closed(&GapRecord { rlt: 1.0, bnd: 1.0, opt: 1.0 }), Err(Error::ZeroGap));
    }

    #[test]
    fn opt_source_names() {
        for s in [OptSource::Supplied, OptSource::BruteForced, OptSource::LocalSearch] {
            assert_eq!(s.name().parse::<OptSource>().unwrap(), s);
        }
    }

    proptest! {
        #[test]
        fn affine_invariance(
            rlt in -100.0f64..100.0,
            frac in 0.0f64..1.0,
            width in 0.1f64..50.0,
            shift in -1e3f64..1e3,
            scale in 0.01f64..100.0,
        ) {
            let opt = rlt - width;
            let bnd = rlt - frac * width;
            let base = gap_closed(&GapRecord { rlt, bnd, opt }).unwrap();
            let t = |v: f64| scale * v + shift;
            let moved = gap_closed(&GapRecord { rlt: t(rlt), bnd: t(bnd), opt: t(opt) }).unwrap();
            prop_assert!((base - moved).abs() < 1e-6);
            prop_assert!((base - 100.0 * frac).abs() < 1e-6);
        }
    }
}
