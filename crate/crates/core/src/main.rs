use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{CommandFactory, Parser, Subcommand};

use psdcut::cuts::SparsifyParams;
use psdcut::engine::{run, LoopConfig, Strategy};
use psdcut::harness::{
    brute_force_opt, compare, gen_boxqp, instance_table, local_search_opt, tune, Checkpoint, InstanceRun, OptSource,
    OptValue, CLOCKED_TIMES,
};
use psdcut::io::{self, TraceFile};
use psdcut::model::lift;
use psdcut::{Error, Problem, Result};

const GRID_STEP: f64 = 0.01;
const LOCAL_STARTS: usize = 200;

#[derive(Parser)]
#[command(name = "psdcut", version, about = "PSD cutting planes for QCQP relaxations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the cutting-plane loop on one instance and write its trace.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "s")]
        strategy: Strategy,
        /// Defaults to 1000, or no cap with --until-stall.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Seconds; defaults to 600, or no cap with --until-stall.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        pct_viol: Option<f64>,
        #[arg(long)]
        pct_nz: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trace: PathBuf,
        /// Known optimal value; otherwise read from `<instance>.opt` or computed for small box problems.
        #[arg(long)]
        opt: Option<f64>,
        /// Stop once the bound improves by less than EPS (relative) over WIN iterations.
        #[arg(long, value_name = "EPS,WIN", value_parser = parse_stall)]
        until_stall: Option<(f64, usize)>,
        #[arg(long)]
        no_purge: bool,
    },
    /// Compare two directories of traces at a list of checkpoints.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Gap difference, in percentage points, needed for a win.
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        /// Comma-separated iterations (`5`) and times (`2s`).
        #[arg(long, default_value = "1,2,3,5,10,15,20,30,50")]
        checkpoints: String,
        #[arg(long)]
        out: PathBuf,
        /// Directory of reference traces whose final bounds fill the `bound` column.
        #[arg(long)]
        bound: Option<PathBuf>,
        #[arg(long)]
        table_a: Option<PathBuf>,
        #[arg(long)]
        table_b: Option<PathBuf>,
    },
    /// Grid-search the sparsification parameters over a directory of instances.
    Tune {
        #[arg(long)]
        strategy: Strategy,
        #[arg(long)]
        instances: PathBuf,
        /// Defaults to the clocked times 1s,2s,5s,10s,20s,30s.
        #[arg(long)]
        checkpoints: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        /// Seconds per run.
        #[arg(long, default_value_t = 30.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a random box-constrained QP instance.
    GenBoxqp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write `<out>.opt` (exact for n <= 3, local search otherwise).
        #[arg(long)]
        with_opt: bool,
    },
    /// Write the lifted LP of an instance in MPS format.
    ExportMps {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_stall(s: &str) -> std::result::Result<(f64, usize), String> {
    let (eps, win) = s.split_once(',').ok_or("expected EPS,WIN")?;
    let eps: f64 = eps.trim().parse().map_err(|_| format!("bad EPS `{eps}`"))?;
    let win: usize = win.trim().parse().map_err(|_| format!("bad WIN `{win}`"))?;
    if eps.is_nan() || eps < 0.0 || win == 0 {
        return Err("EPS must be >= 0 and WIN positive".into());
    }
    Ok((eps, win))
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| Error::InvalidProblem(format!("bad time limit {s}")))
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned())
}

/// Optimum from the command line, a sidecar file, or a search on box problems.
fn resolve_opt(problem: &Problem, path: &Path, given: Option<f64>, seed: u64) -> Result<Option<OptValue>> {
    if let Some(value) = given {
        return Ok(Some(OptValue {
            value,
            source: OptSource::Supplied,
        }));
    }
    if let Some(o) = io::read_opt_sidecar(path)? {
        return Ok(Some(o));
    }
    Ok(compute_opt(problem, seed))
}

fn compute_opt(problem: &Problem, seed: u64) -> Option<OptValue> {
    if problem.p() != 0 {
        return None;
    }
    if problem.n() <= 3 {
        if let Ok(value) = brute_force_opt(problem, GRID_STEP) {
            return Some(OptValue {
                value,
                source: OptSource::BruteForced,
            });
        }
    }
    local_search_opt(problem, LOCAL_STARTS, seed).ok().map(|value| OptValue {
        value,
        source: OptSource::LocalSearch,
    })
}

fn sparsify_params(strategy: Strategy, pct_viol: Option<f64>, pct_nz: Option<f64>, seed: u64) -> Result<SparsifyParams> {
    let d = strategy.default_params(seed);
    if strategy.sparsifier().is_none() && (pct_viol.is_some() || pct_nz.is_some()) {
        log::warn!("strategy {strategy} does not sparsify; --pct-viol and --pct-nz are ignored");
    }
    SparsifyParams::new(pct_viol.unwrap_or(d.pct_viol), pct_nz.unwrap_or(d.pct_nz), seed)
}

fn to_run(name: String, file: TraceFile) -> Result<InstanceRun> {
    let opt = file
        .opt
        .ok_or_else(|| Error::InstanceMismatch(format!("trace `{name}` has no optimum value")))?;
    Ok(InstanceRun {
        name,
        trace: file.trace,
        opt: opt.value,
    })
}

fn load_runs(dir: &Path) -> Result<Vec<InstanceRun>> {
    io::read_trace_dir(dir)?
        .into_iter()
        .map(|(name, f)| to_run(name, f))
        .collect()
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve {
            instance,
            strategy,
            max_iters,
            time_limit,
            pct_viol,
            pct_nz,
            seed,
            trace,
            opt,
            until_stall,
            no_purge,
        } => {
            let problem: Problem = io::read_instance(&instance)?;
            let mut config = match until_stall {
                Some((eps, win)) => LoopConfig::until_stall(strategy, seed, eps, win),
                None => LoopConfig::new(strategy, seed),
            };
            if let Some(k) = max_iters {
                config.max_iterations = k;
            }
            if let Some(t) = time_limit {
                config.time_limit = seconds(t)?;
            }
            config.sparsify = sparsify_params(strategy, pct_viol, pct_nz, seed)?;
            config.purge = !no_purge;
            config.validate()?;
            let opt = resolve_opt(&problem, &instance, opt, seed)?;
            let model = lift(&problem)?;
            let result = run(&model, &config)?;
            let gap = match (opt, result.root_bound(), result.final_bound()) {
                (Some(o), Some(rlt), Some(bnd)) => psdcut::harness::gap_closed(&psdcut::harness::GapRecord {
                    rlt,
                    bnd,
                    opt: o.value,
                })
                .ok(),
                _ => None,
            };
            println!(
                "{}: status={} iterations={} root={} final={} gap={}",
                stem(&instance),
                result.status,
                result.iterations(),
                result.root_bound().map_or("NA".into(), io::format_number),
                result.final_bound().map_or("NA".into(), io::format_number),
                gap.map_or("NA".into(), |g| format!("{g:.2}")),
            );
            if let Some(d) = &result.diagnostic {
                eprintln!("warning: {d}");
            }
            io::write_file(&trace, &io::write_trace(&TraceFile { trace: result, opt }))
        }
        Command::Compare {
            a,
            b,
            g,
            checkpoints,
            out,
            bound,
            table_a,
            table_b,
        } => {
            let cps = Checkpoint::parse_list(&checkpoints)?;
            let (runs_a, runs_b) = (load_runs(&a)?, load_runs(&b)?);
            let report = compare(&runs_a, &runs_b, &cps, g)?;
            io::write_file(&out, &report.to_csv())?;
            print!("{}", report.to_csv());
            let bounds: BTreeMap<String, f64> = match bound {
                Some(dir) => io::read_trace_dir(&dir)?
                    .into_iter()
                    .filter_map(|(name, f)| f.trace.final_bound().map(|b| (name, b)))
                    .collect(),
                None => BTreeMap::new(),
            };
            for (path, runs) in [(table_a, &runs_a), (table_b, &runs_b)] {
                if let Some(path) = path {
                    io::write_file(&path, &instance_table(runs, &bounds, &cps))?;
                }
            }
            Ok(())
        }
        Command::Tune {
            strategy,
            instances,
            checkpoints,
            g,
            time_limit,
            max_iters,
            seed,
        } => {
            if strategy.sparsifier().is_none() {
                return Err(Error::Unsupported(format!("strategy {strategy} has no parameters to tune")));
            }
            let cps = match checkpoints {
                Some(s) => Checkpoint::parse_list(&s)?,
                None => CLOCKED_TIMES.iter().map(|&t| Checkpoint::Seconds(t)).collect(),
            };
            let mut set = Vec::new();
            for (name, path) in io::list_dir(&instances, io::INSTANCE_EXT)? {
                let problem: Problem = io::read_instance(&path)?;
                let opt = resolve_opt(&problem, &path, None, seed)?
                    .ok_or_else(|| Error::InstanceMismatch(format!("no optimum known for `{name}`")))?;
                set.push((name, lift(&problem)?, opt.value));
            }
            let limit = seconds(time_limit)?;
            let result = tune(
                &set,
                |(name, model, opt), v, n| {
                    let mut config = LoopConfig::new(strategy, seed);
                    config.sparsify = SparsifyParams::new(v, n, seed)?;
                    config.time_limit = limit;
                    config.max_iterations = max_iters;
                    Ok(InstanceRun {
                        name: name.clone(),
                        trace: run(model, &config)?,
                        opt: *opt,
                    })
                },
                (0.0, 1.0),
                (0.0, 1.0),
                &cps,
                g,
            )?;
            for (k, r) in result.rounds.iter().enumerate() {
                println!(
                    "round {}: viol {:?} nz {:?} winner ({}, {})",
                    k + 1,
                    r.viol,
                    r.nz,
                    r.viol[r.winner.0],
                    r.nz[r.winner.1]
                );
            }
            println!(
                "pct_viol={} pct_nz={} rounds={} converged={}",
                result.pct_viol,
                result.pct_nz,
                result.rounds.len(),
                result.converged
            );
            Ok(())
        }
        Command::GenBoxqp {
            n,
            density,
            seed,
            out,
            with_opt,
        } => {
            let problem: Problem = gen_boxqp(n, density, seed)?;
            io::write_file(&out, &io::serialize_instance(&problem))?;
            if with_opt {
                let opt = compute_opt(&problem, seed).expect("box problems admit a search");
                io::write_file(&io::opt_sidecar(&out), &io::format_opt(&opt))?;
            }
            Ok(())
        }
        Command::ExportMps { instance, out } => {
            let problem: Problem = io::read_instance(&instance)?;
            io::write_file(&out, &io::write_mps(&lift(&problem)?, &stem(&instance)))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
