//! The `ndp` command line.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 usage error,
//! 3 malformed input file, 4 infeasible instance.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ndp_core::harness::{
    assignment_csv, config_history_csv, reference, solution_file, trace_csv, BenchRecord, BenchReport,
    RunParams,
};
use ndp_core::hybrid::{run_chains, HybridError, InnerLayer};
use ndp_core::instance::OpenConfig;
use ndp_core::qubo::{
    build_direct_qubo, build_inner_qubo, count_resources, default_penalties, direct_penalties, read_qubo,
    read_varmap, write_qubo, write_varmap, PenaltyMode, SlackWidth,
};
use ndp_core::solvers::{solve, InnerSettings};
use ndp_core::{parse_orlib, AnnealSchedule, Backend, HybridConfig, Instance, SolveReport, SolverParams};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "ndp", version, about = "Capacitated facility location by two-layer annealing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the hybrid solver on one instance.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the classical baseline (greedy inner layer) on one instance.
    Baseline {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the hybrid solver on every `capN` file in a directory.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Minimize a QUBO read from a file.
    SolveQubo {
        file: PathBuf,
        /// Variable map; defaults to `<file>.varmap` when that exists.
        #[arg(long)]
        varmap: Option<PathBuf>,
        #[arg(long, default_value = "tabu")]
        inner: Backend,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 32)]
        sub_size: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write the assignment QUBO (or the single-shot model with --direct).
    ExportQubo {
        file: PathBuf,
        #[arg(long)]
        direct: bool,
        #[arg(long, default_value = "paper")]
        penalty: PenaltyMode,
        /// Open sites as a bit string such as `1011`; all open by default.
        #[arg(long)]
        open: Option<String>,
        #[arg(long)]
        paper_slack_width: bool,
        /// Output path; the variable map goes to `<out>.varmap`.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Qubit and coupler counts of the assignment QUBO.
    Resources {
        file: PathBuf,
        #[arg(long)]
        open: Option<String>,
        #[arg(long)]
        paper_slack_width: bool,
    },
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "tabu")]
    pub inner: Backend,
    #[arg(long, default_value = "paper")]
    pub penalty: PenaltyMode,
    #[arg(long, default_value_t = 10_000.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Trials per temperature; defaults to the number of sites.
    #[arg(long)]
    pub iters_per_step: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 32)]
    pub sub_size: usize,
    /// CSV of (iter, temp, current_cost, best_cost).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Solution file: site bits, then one row of assignment bits per customer.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// CSV of the current configuration after each temperature.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// CSV of the best assignment matrix.
    #[arg(long)]
    pub assignment: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long)]
    pub t0_auto: bool,
    /// Use ceil(log2 v) slack bits per site instead of ceil(log2(v + 1)).
    #[arg(long)]
    pub paper_slack_width: bool,
    #[arg(long)]
    pub no_capacity_guard: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Infeasible(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Other(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Infeasible(_) => 4,
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Input(m) | Failure::Infeasible(m) => m.clone(),
                Failure::Other(e) => format!("{e:#}"),
            };
            let _ = writeln!(err, "error: {msg}");
            f.code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Solve { file, run } => solve_file(&file, &run, false, out),
        Command::Baseline { file, run } => solve_file(&file, &run, true, out),
        Command::Bench { dir, run } => bench(&dir, &run, out),
        Command::SolveQubo {
            file,
            varmap,
            inner,
            seed,
            restarts,
            sub_size,
            json,
        } => {
            let params = SolverParams {
                backend: inner,
                seed,
                restarts,
                sub_size,
                ..Default::default()
            };
            solve_qubo(&file, varmap.as_deref(), &params, json.as_deref(), out)
        }
        Command::ExportQubo {
            file,
            direct,
            penalty,
            open,
            paper_slack_width,
            out: path,
        } => export_qubo(&file, direct, penalty, open.as_deref(), width(paper_slack_width), path.as_deref(), out),
        Command::Resources {
            file,
            open,
            paper_slack_width,
        } => resources(&file, open.as_deref(), width(paper_slack_width), out),
    }
}

fn width(paper: bool) -> SlackWidth {
    if paper {
        SlackWidth::Compat
    } else {
        SlackWidth::Full
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> Result<Instance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_orlib(&text)
        .map(|inst| inst.with_name(stem(path)))
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn instance(path: &Path) -> Result<Instance, Failure> {
    load_instance(path).map_err(Failure::Input)
}

fn open_config(bits: Option<&str>, m: usize) -> Result<OpenConfig, Failure> {
    let Some(bits) = bits else {
        return Ok(OpenConfig::all_open(m));
    };
    let parsed: Option<Vec<bool>> = bits
        .chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect();
    match parsed {
        Some(v) if v.len() == m => Ok(OpenConfig::new(v)),
        _ => Err(Failure::Usage(format!("--open expects {m} characters of 0/1, got {bits:?}"))),
    }
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Other)
}

/// Hybrid configuration from command-line flags.
pub fn hybrid_config(inst: &Instance, run: &RunArgs, baseline: bool) -> Result<HybridConfig, String> {
    let schedule = AnnealSchedule::new(
        run.t0,
        run.t_end,
        run.alpha,
        run.iters_per_step.unwrap_or(inst.sites()),
    )
    .map_err(|e| e.to_string())?;
    let inner = if baseline {
        InnerLayer::Greedy
    } else {
        let params = SolverParams {
            backend: run.inner,
            restarts: run.restarts,
            seed: run.seed,
            sub_size: run.sub_size,
            ..Default::default()
        };
        params.validate().map_err(|e| e.to_string())?;
        let mut settings = InnerSettings::new(default_penalties(inst, run.penalty), params);
        settings.slack_width = width(run.paper_slack_width);
        InnerLayer::Qubo(settings)
    };
    let mut cfg = HybridConfig::new(schedule, inner);
    cfg.capacity_guard = !run.no_capacity_guard;
    cfg.t0_auto = run.t0_auto;
    Ok(cfg)
}

fn run_params(cfg: &HybridConfig, run: &RunArgs, baseline: bool) -> RunParams {
    let s = cfg.schedule;
    let name = |v: &dyn std::fmt::Debug| format!("{v:?}").to_lowercase();
    RunParams {
        mode: if baseline { "baseline" } else { "hybrid" }.into(),
        inner: if baseline { "greedy".into() } else { name(&run.inner) },
        penalty: name(&run.penalty),
        t0: s.t0,
        t_end: s.t_end,
        alpha: s.alpha,
        iters_per_step: s.iters_per_step,
        restarts: run.restarts,
        sub_size: run.sub_size,
        chains: run.chains,
        t0_auto: run.t0_auto,
        paper_slack_width: run.paper_slack_width,
        capacity_guard: cfg.capacity_guard,
    }
}

fn run_one(inst: &Instance, run: &RunArgs, baseline: bool) -> Result<(SolveReport, RunParams), Failure> {
    let cfg = hybrid_config(inst, run, baseline).map_err(Failure::Usage)?;
    let report = run_chains(inst, &cfg, run.seed, run.chains).map_err(|e| match e {
        HybridError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
        HybridError::Schedule(_) => Failure::Usage(e.to_string()),
        HybridError::Inner(_) => Failure::Other(anyhow!(e)),
    })?;
    // the schedule actually used (t0 may have been estimated)
    let mut params = run_params(&cfg, run, baseline);
    params.t0 = report.schedule.t0;
    Ok((report, params))
}

fn solve_file(file: &Path, run: &RunArgs, baseline: bool, out: &mut dyn Write) -> Outcome {
    let inst = instance(file)?;
    let (report, params) = run_one(&inst, run, baseline)?;
    let trace_path = run.trace.as_ref().map(|p| p.display().to_string());
    let record = BenchRecord::new(&stem(file), inst.sites(), inst.customers(), &report, params, trace_path);

    if let Some(p) = &run.trace {
        write_file(p, &trace_csv(&report.trace))?;
    }
    if let Some(p) = &run.history {
        write_file(p, &config_history_csv(&report.config_history))?;
    }
    if let Some(p) = &run.assignment {
        write_file(p, &assignment_csv(&report.best_assignment.y))?;
    }
    if let Some(p) = &run.solution {
        write_file(p, &solution_file(&report.best_open, &report.best_assignment.y))?;
    }
    if let Some(p) = &run.json {
        write_file(p, &(to_json(&record)? + "\n"))?;
    }

    let w = |e: std::io::Error| Failure::Other(e.into());
    match record.best_cost {
        Some(c) => writeln!(out, "best_cost {c}").map_err(w)?,
        None => writeln!(out, "best_cost infeasible").map_err(w)?,
    }
    writeln!(out, "open {}", report.best_open).map_err(w)?;
    if let Some(g) = record.gap_pct {
        writeln!(out, "gap_pct {g:.4}").map_err(w)?;
    }
    writeln!(
        out,
        "trials {} accepted {} rejected {} inner_solves {} fallbacks {}",
        report.trials, report.accepted, report.rejected, report.inner_solves, report.fallbacks
    )
    .map_err(w)?;
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Other(e.into()))
}

/// Files in `dir` whose stem is `cap` followed by digits, in table order
/// (known instances first, then by name).
pub fn cap_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| {
            let s = stem(p);
            s.strip_prefix("cap")
                .is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
        })
        .collect();
    let key = |p: &PathBuf| {
        let s = stem(p);
        let digits: u64 = s[3..].parse().unwrap_or(u64::MAX);
        (reference(&s).is_none(), digits, s)
    };
    files.sort_by_key(key);
    Ok(files)
}

fn bench(dir: &Path, run: &RunArgs, out: &mut dyn Write) -> Outcome {
    let files = cap_files(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    if files.is_empty() {
        return Err(Failure::Input(format!("no capN files in {}", dir.display())));
    }
    let mut records = Vec::new();
    for f in &files {
        let inst = instance(f)?;
        let (report, params) = run_one(&inst, run, false)?;
        records.push(BenchRecord::new(&stem(f), inst.sites(), inst.customers(), &report, params, None));
    }
    let report = BenchReport::new(records);
    write!(out, "{}", report.table()).map_err(|e| Failure::Other(e.into()))?;
    if let Some(p) = &run.json {
        write_file(p, &(to_json(&report)? + "\n"))?;
    }
    Ok(())
}

fn solve_qubo(
    file: &Path,
    varmap: Option<&Path>,
    params: &SolverParams,
    json_path: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let text = read_text(file)?;
    let sidecar = {
        let mut p = file.as_os_str().to_owned();
        p.push(".varmap");
        PathBuf::from(p)
    };
    let roles = match varmap {
        Some(p) => Some(read_text(p)?),
        None if sidecar.is_file() => Some(read_text(&sidecar)?),
        None => None,
    }
    .map(|t| read_varmap(&t).map_err(|e| Failure::Input(e.to_string())))
    .transpose()?;
    let q = read_qubo(&text, roles).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
    params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let set = solve(&q, params).map_err(|e| Failure::Usage(e.to_string()))?;
    let best = set.best().expect("solver returns a sample");
    let bits: String = best.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    let w = |e: std::io::Error| Failure::Other(e.into());
    writeln!(out, "energy {}", best.energy).map_err(w)?;
    writeln!(out, "bits {bits}").map_err(w)?;
    let active: Vec<String> = q
        .varmap()
        .iter()
        .zip(&best.bits)
        .filter(|(_, &b)| b)
        .map(|(r, _)| r.to_string())
        .collect();
    for r in &active {
        writeln!(out, "{r}").map_err(w)?;
    }
    if let Some(p) = json_path {
        let samples: Vec<_> = set
            .samples
            .iter()
            .take(10)
            .map(|s| {
                json!({
                    "energy": s.energy,
                    "bits": s.bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>(),
                    "occurrences": s.occurrences,
                })
            })
            .collect();
        let doc = json!({
            "file": file.display().to_string(),
            "nvars": q.nvars(),
            "backend": format!("{:?}", params.backend).to_lowercase(),
            "seed": params.seed,
            "energy": best.energy,
            "bits": bits,
            "active": active,
            "samples": samples,
        });
        write_file(p, &(to_json(&doc)? + "\n"))?;
    }
    Ok(())
}

fn export_qubo(
    file: &Path,
    direct: bool,
    penalty: PenaltyMode,
    open: Option<&str>,
    width: SlackWidth,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let inst = instance(file)?;
    let q = if direct {
        if open.is_some() {
            return Err(Failure::Usage("--open does not apply to --direct".into()));
        }
        build_direct_qubo(&inst, &direct_penalties(&inst, penalty), width)
    } else {
        let open = open_config(open, inst.sites())?;
        build_inner_qubo(&inst, &open, &default_penalties(&inst, penalty), width)
    }
    .map_err(|e| Failure::Input(e.to_string()))?;
    match path {
        Some(p) => {
            write_file(p, &write_qubo(&q))?;
            let mut vm = p.as_os_str().to_owned();
            vm.push(".varmap");
            write_file(Path::new(&vm), &write_varmap(&q))?;
            writeln!(out, "wrote {} variables, {} terms to {}", q.nvars(), q.terms().len(), p.display())
                .map_err(|e| Failure::Other(e.into()))
        }
        None => write!(out, "{}", write_qubo(&q)).map_err(|e| Failure::Other(e.into())),
    }
}

fn resources(file: &Path, open: Option<&str>, width: SlackWidth, out: &mut dyn Write) -> Outcome {
    let inst = instance(file)?;
    let open = open_config(open, inst.sites())?;
    if open.open_count() == 0 {
        return Err(Failure::Usage("no site is open".into()));
    }
    let res = count_resources(&inst, &open, width);
    let q = build_inner_qubo(&inst, &open, &default_penalties(&inst, PenaltyMode::Paper), width)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let structural = q.terms().keys().filter(|(p, r)| p != r).count();
    let w = |e: std::io::Error| Failure::Other(e.into());
    writeln!(out, "qubits {}", res.qubits).map_err(w)?;
    writeln!(out, "couplers {}", res.couplers).map_err(w)?;
    writeln!(out, "built_qubits {}", q.nvars()).map_err(w)?;
    writeln!(out, "built_couplers {structural}").map_err(w)?;
    Ok(())
}
