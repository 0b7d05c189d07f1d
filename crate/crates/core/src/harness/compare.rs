//! Pairwise comparison of two algorithms over an instance set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{gap_closed, GapRecord};
use crate::engine::RunTrace;
use crate::error::{Error, Result};

/// Where two traces are compared: after `k` cutting rounds or at `t` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Checkpoint {
    Iteration(usize),
    Seconds(f64),
}

impl Checkpoint {
    /// Parses a comma-separated list such as `1,2,5,10s`.
    pub fn parse_list(s: &str) -> Result<Vec<Checkpoint>> {
        s.split(',').filter(|p| !p.trim().is_empty()).map(|p| p.trim().parse()).collect()
    }
}

impl FromStr for Checkpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Unsupported(format!("bad checkpoint `{s}` (expected e.g. `5` or `5s`)"));
        if let Some(secs) = s.strip_suffix('s') {
            let v: f64 = secs.parse().map_err(|_| bad())?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(bad());
            }
            Ok(Self::Seconds(v))
        } else {
            s.parse().map(Self::Iteration).map_err(|_| bad())
        }
    }
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Iteration(k) => write!(f, "{k}"),
            Self::Seconds(t) => write!(f, "{t}s"),
        }
    }
}

/// One algorithm's result on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRun {
    pub name: String,
    pub trace: RunTrace,
    pub opt: f64,
}

impl InstanceRun {
    /// Bound reached at `cp`, or `None` when the trace has no value there:
    /// it stopped before the checkpoint, or (for times) has no record yet.
    pub fn bound_at(&self, cp: Checkpoint) -> Option<f64> {
        match cp {
            Checkpoint::Iteration(k) => self.trace.at_iteration(k).map(|r| r.objective),
            Checkpoint::Seconds(t) => {
                let last = self.trace.records.last()?;
                if last.seconds < t {
                    return None;
                }
                self.trace.at_time(t).map(|r| r.objective)
            }
        }
    }

    /// Gap closed at `cp`; `None` when the bound is missing or the gap undefined.
    pub fn gap_at(&self, cp: Checkpoint) -> Option<f64> {
        let rlt = self.trace.root_bound()?;
        let bnd = self.bound_at(cp)?;
        gap_closed(&GapRecord { rlt, bnd, opt: self.opt }).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    AWins,
    BWins,
    Tie,
    Incomparable,
}

/// Winner by gap closed: a side wins only when ahead by at least `g` points.
pub fn outcome(gap_a: Option<f64>, gap_b: Option<f64>, g: f64) -> Outcome {
    let (Some(a), Some(b)) = (gap_a, gap_b) else {
        return Outcome::Incomparable;
    };
    // absorbs representation error in differences like 51.0 - 50.0
    let slack = 1e-9 * (1.0 + g.abs());
    if b - a >= g - slack {
        Outcome::BWins
    } else if a - b >= g - slack {
        Outcome::AWins
    } else {
        Outcome::Tie
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRow {
    pub checkpoint: Checkpoint,
    pub a_wins: usize,
    pub b_wins: usize,
    pub ties: usize,
    pub incomparable: usize,
    /// Mean of `gap_B − gap_A` over comparable instances.
    pub impr: Option<f64>,
}

impl CheckpointRow {
    pub fn total(&self) -> usize {
        self.a_wins + self.b_wins + self.ties + self.incomparable
    }

    fn pct(&self, k: usize) -> f64 {
        100.0 * k as f64 / self.total().max(1) as f64
    }

    /// `(A, B, tie, inc)` as percentages of all instances.
    pub fn percentages(&self) -> [f64; 4] {
        [
            self.pct(self.a_wins),
            self.pct(self.b_wins),
            self.pct(self.ties),
            self.pct(self.incomparable),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub g: f64,
    pub rows: Vec<CheckpointRow>,
    /// Per instance and checkpoint.
    pub outcomes: BTreeMap<String, Vec<Outcome>>,
}

impl ComparisonReport {
    /// `checkpoint,A_wins,B_wins,tie,inc,impr`, percentages with two decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("checkpoint,A_wins,B_wins,tie,inc,impr\n");
        for row in &self.rows {
            let [a, b, t, i] = row.percentages();
            let impr = row.impr.map(|v| format!("{v:.2}")).unwrap_or_else(|| "NA".into());
            out.push_str(&format!("{},{a:.2},{b:.2},{t:.2},{i:.2},{impr}\n", row.checkpoint));
        }
        out
    }
}

fn by_name(runs: &[InstanceRun]) -> Result<BTreeMap<&str, &InstanceRun>> {
    let mut map = BTreeMap::new();
    for r in runs {
        if map.insert(r.name.as_str(), r).is_some() {
            return Err(Error::InstanceMismatch(format!("instance `{}` appears twice", r.name)));
        }
    }
    Ok(map)
}

/// Compares algorithm A against B on the same instances at every checkpoint.
pub fn compare(a: &[InstanceRun], b: &[InstanceRun], checkpoints: &[Checkpoint], g: f64) -> Result<ComparisonReport> {
    let (ma, mb) = (by_name(a)?, by_name(b)?);
    let names_a: BTreeSet<_> = ma.keys().copied().collect();
    let names_b: BTreeSet<_> = mb.keys().copied().collect();
    if names_a != names_b {
        let mut missing = Vec::new();
        for n in names_a.difference(&names_b) {
            missing.push(format!("`{n}` missing from B"));
        }
        for n in names_b.difference(&names_a) {
            missing.push(format!("`{n}` missing from A"));
        }
        return Err(Error::InstanceMismatch(missing.join(", ")));
    }
    if names_a.is_empty() {
        return Err(Error::NoInstances);
    }
    let mut outcomes: BTreeMap<String, Vec<Outcome>> = BTreeMap::new();
    let mut rows = Vec::with_capacity(checkpoints.len());
    for &cp in checkpoints {
        let mut row = CheckpointRow {
            checkpoint: cp,
            a_wins: 0,
            b_wins: 0,
            ties: 0,
            incomparable: 0,
            impr: None,
        };
        let mut diffs = Vec::new();
        for name in &names_a {
            let (ga, gb) = (ma[name].gap_at(cp), mb[name].gap_at(cp));
            let o = outcome(ga, gb, g);
            match o {
                Outcome::AWins => row.a_wins += 1,
                Outcome::BWins => row.b_wins += 1,
                Outcome::Tie => row.ties += 1,
                Outcome::Incomparable => row.incomparable += 1,
            }
            if let (Some(ga), Some(gb)) = (ga, gb) {
                diffs.push(gb - ga);
            }
            outcomes.entry(name.to_string()).or_default().push(o);
        }
        if !diffs.is_empty() {
            row.impr = Some(diffs.iter().sum::<f64>() / diffs.len() as f64);
        }
        rows.push(row);
    }
    Ok(ComparisonReport { g, rows, outcomes })
}

/// Long-format table `instance,n,m,bound,gap@c1,...` for one algorithm.
///
/// `bounds` holds the reference bound per instance (for example a long run
/// until stalling); missing values and undefined gaps are written as `NA`.
pub fn instance_table(runs: &[InstanceRun], bounds: &BTreeMap<String, f64>, checkpoints: &[Checkpoint]) -> String {
    let mut out = String::from("instance,n,m,bound");
    for cp in checkpoints {
        out.push_str(&format!(",gap@{cp}"));
    }
    out.push('\n');
    let mut sorted: Vec<_> = runs.iter().collect();
    sorted.sort_by(|x, y| x.name.cmp(&y.name));
    for r in sorted {
        let bound = bounds.get(&r.name).map(|b| format!("{b}")).unwrap_or_else(|| "NA".into());
        out.push_str(&format!("{},{},{},{bound}", r.name, r.trace.n, r.trace.m));
        for &cp in checkpoints {
            match r.gap_at(cp) {
                Some(g) => out.push_str(&format!(",{g:.2}")),
                None => out.push_str(",NA"),
            }
        }
        out.push('\n');
    }
    out
}
