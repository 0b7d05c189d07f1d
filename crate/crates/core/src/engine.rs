//! The cutting-plane loop.
//!
//! Iteration 0 solves the McCormick relaxation. Each later iteration separates
//! the previous optimum, adds the violated cuts, re-solves, and possibly purges
//! cuts that went slack.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::cuts::{
    cut_from_vector, dedupe, minor_cuts, sparsify1, sparsify2, Cut, CutPool, Provenance, Spectrum, SparsifyParams,
    EIG_TOL, PURGE_EPS, SLACK_TOL,
};
use crate::error::{Error, Result};
use crate::lp::{DualSimplex, LpBackend, RowHandle};
use crate::model::{ExtendedModel, XtildeView};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Dense eigenvector cuts only.
    S,
    S1M,
    S2M,
    Sparse1,
    Sparse2,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [Self::S, Self::S1M, Self::S2M, Self::Sparse1, Self::Sparse2];

    pub fn sparsifier(self) -> Option<Provenance> {
        match self {
            Self::S => None,
            Self::S1M | Self::Sparse1 => Some(Provenance::Sparse1),
            Self::S2M | Self::Sparse2 => Some(Provenance::Sparse2),
        }
    }

    pub fn uses_minor(self) -> bool {
        matches!(self, Self::S1M | Self::S2M)
    }

    pub fn default_params(self, seed: u64) -> SparsifyParams {
        match self.sparsifier() {
            Some(Provenance::Sparse2) => SparsifyParams::sparse2_default(seed),
            _ => SparsifyParams::sparse1_default(seed),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::S => "s",
            Self::S1M => "s1m",
            Self::S2M => "s2m",
            Self::Sparse1 => "sparse1",
            Self::Sparse2 => "sparse2",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unsupported(format!("unknown strategy `{s}` (expected s, s1m, s2m, sparse1 or sparse2)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig {
    /// Cap on cutting rounds after the initial solve.
    pub max_iterations: usize,
    /// Total wall clock, checked between iterations.
    pub time_limit: Duration,
    pub tail_window: usize,
    pub tail_eps: f64,
    pub purge_eps: f64,
    pub slack_tol: f64,
    pub eig_tol: f64,
    pub purge: bool,
    pub strategy: Strategy,
    pub sparsify: SparsifyParams,
}

impl LoopConfig {
    pub fn new(strategy: Strategy, seed: u64) -> Self {
        Self {
            max_iterations: 1000,
            time_limit: Duration::from_secs(600),
            tail_window: 50,
            tail_eps: 1e-4,
            purge_eps: PURGE_EPS,
            slack_tol: SLACK_TOL,
            eig_tol: EIG_TOL,
            purge: true,
            strategy,
            sparsify: strategy.default_params(seed),
        }
    }

    /// Runs until the bound improves by less than `eps` (relative) over
    /// `window` iterations, without iteration or time caps.
    pub fn until_stall(strategy: Strategy, seed: u64, eps: f64, window: usize) -> Self {
        Self {
            max_iterations: usize::MAX,
            time_limit: Duration::MAX,
            tail_window: window,
            tail_eps: eps,
            ..Self::new(strategy, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tail_window == 0 || self.time_limit.is_zero() && self.max_iterations == 0 {
            return Err(Error::InvalidProblem("loop limits must be positive".into()));
        }
        SparsifyParams::new(self.sparsify.pct_viol, self.sparsify.pct_nz, self.sparsify.seed).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    IterationLimit,
    TimeLimit,
    TailingOff,
    PsdFeasible,
    LpError,
}

impl Status {
    pub const ALL: [Status; 5] = [
        Self::IterationLimit,
        Self::TimeLimit,
        Self::TailingOff,
        Self::PsdFeasible,
        Self::LpError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::IterationLimit => "iteration-limit",
            Self::TimeLimit => "time-limit",
            Self::TailingOff => "tailing-off",
            Self::PsdFeasible => "psd-feasible",
            Self::LpError => "lp-error",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown status `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    pub seconds: f64,
    pub objective: f64,
    /// Cuts added this iteration, indexed like [`Provenance::ALL`].
    pub added_by: [usize; 4],
    pub cuts_purged: usize,
    pub pool_size: usize,
    /// Smallest eigenvalue of X̃ at this iteration's LP optimum.
    pub min_eig: f64,
    /// Rows that are not cuts: linearized constraints and McCormick rows.
    pub permanent_rows: usize,
}

impl IterRecord {
    pub fn cuts_added(&self) -> usize {
        self.added_by.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub n: usize,
    pub m: usize,
    /// `records[t].iter == t`; record 0 is the McCormick relaxation.
    pub records: Vec<IterRecord>,
    pub status: Status,
    pub diagnostic: Option<String>,
}

impl RunTrace {
    pub fn root_bound(&self) -> Option<f64> {
        self.records.first().map(|r| r.objective)
    }

    pub fn final_bound(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }

    pub fn at_iteration(&self, t: usize) -> Option<&IterRecord> {
        self.records.get(t)
    }

    /// Latest record with a timestamp not after `seconds`.
    pub fn at_time(&self, seconds: f64) -> Option<&IterRecord> {
        self.records.iter().take_while(|r| r.seconds <= seconds).last()
    }

    /// Number of cutting rounds performed.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }
}

/// `z[t]` is the bound after iteration `t`, `z[0]` the root. True iff
/// `t ≥ window` and `z_t ≥ (1 − eps)·z_{t−window}`.
pub fn tailing_off(z: &[f64], window: usize, eps: f64) -> bool {
    let Some(t) = z.len().checked_sub(1) else {
        return false;
    };
    t >= window && z[t] >= (1.0 - eps) * z[t - window]
}

/// Everything the loop adds in one iteration, exposed for inspection.
#[derive(Debug)]
pub struct CutRound<'a, T> {
    pub iter: usize,
    pub xtilde: &'a XtildeView<T>,
    pub cuts: &'a [Cut<T>],
}

/// Cuts for one separation round, filtered to violation above `eig_tol` and
/// deduplicated by direction.
pub fn separate<T: Scalar>(
    xt: &XtildeView<T>,
    spectrum: &Spectrum<T>,
    strategy: Strategy,
    params: &SparsifyParams,
    stream: u64,
    eig_tol: T,
) -> Result<Vec<Cut<T>>> {
    let mut rng = params.rng(stream);
    let mut cuts = Vec::new();
    let negative: Vec<_> = spectrum.negative(eig_tol).collect();
    for pair in &negative {
        cuts.push(cut_from_vector(pair.vector.clone(), Provenance::PsdCut, xt)?);
    }
    if let Some(kind) = strategy.sparsifier() {
        for pair in &negative {
            let sparse = match kind {
                Provenance::Sparse1 => sparsify1(&pair.vector, xt, params, &mut rng),
                _ => sparsify2(&pair.vector, xt, params, &mut rng),
            };
            let sparse = match sparse {
                Ok(s) => s,
                // rounding can leave an eigenvector of a tiny negative eigenvalue unviolated
                Err(Error::NotViolated(_)) => continue,
                Err(e) => return Err(e),
            };
            for w in sparse {
                if strategy.uses_minor() {
                    cuts.extend(minor_cuts(&w, xt, eig_tol)?);
                }
                cuts.push(cut_from_vector(w, kind, xt)?);
            }
        }
    }
    cuts.retain(|c| c.violation() > eig_tol);
    Ok(dedupe(cuts))
}

fn index_of(p: Provenance) -> usize {
    Provenance::ALL.iter().position(|&q| q == p).expect("listed provenance")
}

/// Runs the loop on `model` with the bundled simplex.
pub fn run<T: Scalar>(model: &ExtendedModel<T>, config: &LoopConfig) -> Result<RunTrace> {
    run_with(model, config, &mut DualSimplex::default(), |_| {})
}

/// Runs the loop with an explicit backend; `observe` sees every batch of cuts
/// right before it enters the LP.
pub fn run_with<T: Scalar, B: LpBackend<T>>(
    model: &ExtendedModel<T>,
    config: &LoopConfig,
    backend: &mut B,
    mut observe: impl FnMut(&CutRound<'_, T>),
) -> Result<RunTrace> {
    config.validate()?;
    let start = Instant::now();
    let eig_tol = T::c(config.eig_tol);
    let map = *model.columns();

    backend.load_columns(model.objective(), model.col_lower(), model.col_upper());
    let permanent: Vec<_> = model.rows().iter().map(|r| r.row.clone()).collect();
    backend.add_rows(&permanent);

    let mut trace = RunTrace {
        n: model.n(),
        m: map.m(),
        records: Vec::new(),
        status: Status::LpError,
        diagnostic: None,
    };
    let mut warned = false;
    let mut check_sign = |z: f64| {
        if z <= 0.0 && !warned {
            warned = true;
            log::warn!("bound {z} is not positive; relative tailing-off and purge tests apply to raw values");
        }
    };

    let mut solution = match backend.solve() {
        Ok(s) => s,
        Err(e) => {
            trace.diagnostic = Some(format!("initial relaxation: {e}"));
            return Ok(trace);
        }
    };
    let mut xt = model.xtilde(&solution.primal);
    let mut spectrum = Spectrum::of(&xt)?;
    let z0 = solution.objective.to_f64_lossy();
    check_sign(z0);
    trace.records.push(IterRecord {
        iter: 0,
        seconds: start.elapsed().as_secs_f64(),
        objective: z0,
        added_by: [0; 4],
        cuts_purged: 0,
        pool_size: 0,
        min_eig: spectrum.min_eigenvalue().to_f64_lossy(),
        permanent_rows: backend.num_rows(),
    });

    let mut pool: CutPool<T, RowHandle> = CutPool::new(config.purge_eps, config.slack_tol);
    let mut history = vec![z0];
    let status = loop {
        let t = trace.records.len();
        if spectrum.min_eigenvalue() >= -eig_tol {
            break Status::PsdFeasible;
        }
        if t > config.max_iterations {
            break Status::IterationLimit;
        }
        if start.elapsed() >= config.time_limit {
            break Status::TimeLimit;
        }
        if tailing_off(&history, config.tail_window, config.tail_eps) {
            break Status::TailingOff;
        }

        let cuts = separate(&xt, &spectrum, config.strategy, &config.sparsify, t as u64, eig_tol)?;
        if cuts.is_empty() {
            break Status::PsdFeasible;
        }
        observe(&CutRound {
            iter: t,
            xtilde: &xt,
            cuts: &cuts,
        });
        let rows: Vec<_> = cuts.iter().map(|c| c.to_row(&map)).collect();
        let handles = backend.add_rows(&rows);
        let mut added_by = [0; 4];
        for (cut, h) in cuts.into_iter().zip(handles) {
            added_by[index_of(cut.provenance())] += 1;
            pool.push(cut, h);
        }

        solution = match backend.solve() {
            Ok(s) => s,
            Err(e) => {
                trace.diagnostic = Some(format!("iteration {t}: {e}"));
                break Status::LpError;
            }
        };
        let z = solution.objective.to_f64_lossy();
        check_sign(z);

        let mut purged = 0;
        if config.purge {
            let slacks: Vec<T> = pool
                .iter()
                .map(|e| {
                    let act = backend.row_activity(e.handle).expect("pooled cut is in the LP");
                    act + e.cut.constant()
                })
                .collect();
            let z_t = solution.objective;
            let z_prev = T::c(history[t - 1]);
            let removed = pool.purge(&slacks, z_t, z_prev);
            purged = removed.len();
            backend.remove_rows(&removed)?;
        }

        xt = model.xtilde(&solution.primal);
        spectrum = Spectrum::of(&xt)?;
        history.push(z);
        trace.records.push(IterRecord {
            iter: t,
            seconds: start.elapsed().as_secs_f64(),
            objective: z,
            added_by,
            cuts_purged: purged,
            pool_size: pool.len(),
            min_eig: spectrum.min_eigenvalue().to_f64_lossy(),
            permanent_rows: backend.num_rows() - pool.len(),
        });
        log::debug!(
            "iter {t}: z = {z:.9}, +{} cuts, -{purged}, pool {}",
            trace.records[t].cuts_added(),
            pool.len()
        );
    };
    trace.status = status;
    Ok(trace)
}
