//! Two-layer annealing: simulated annealing over which sites are open, with
//! customer assignment delegated to a QUBO solver for every proposal.

use std::collections::HashMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{total_cost, Assignment, Instance, OpenConfig};
use crate::solvers::{
    assign_customers, assign_greedy, rng_for, InnerOutcome, InnerSettings, Rng, SolveError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HybridError {
    #[error("total capacity {capacity} cannot cover total demand {demand}")]
    Infeasible { capacity: f64, demand: f64 },
    #[error("invalid schedule: {0}")]
    Schedule(&'static str),
    #[error("inner layer failed: {0}")]
    Inner(#[from] SolveError),
}

/// Geometric cooling `T <- alpha T` from `t0` while `T > t_end`, with
/// `iters_per_step` Metropolis trials per temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub t0: f64,
    pub t_end: f64,
    pub alpha: f64,
    pub iters_per_step: usize,
}

impl AnnealSchedule {
    pub fn new(t0: f64, t_end: f64, alpha: f64, iters_per_step: usize) -> Result<Self, HybridError> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(HybridError::Schedule("t0 must be positive"));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(HybridError::Schedule("t_end must be positive"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(HybridError::Schedule("alpha must lie in (0, 1)"));
        }
        if iters_per_step == 0 {
            return Err(HybridError::Schedule("iters_per_step must be at least 1"));
        }
        Ok(Self {
            t0,
            t_end,
            alpha,
            iters_per_step,
        })
    }

    /// `t0 = 10000`, `t_end = 1`, `alpha = 0.5`, `m` trials per step.
    pub fn standard(sites: usize) -> Self {
        Self {
            t0: 10_000.0,
            t_end: 1.0,
            alpha: 0.5,
            iters_per_step: sites.max(1),
        }
    }

    pub fn total_trials(&self) -> usize {
        cooling_steps(self).len() * self.iters_per_step
    }
}

/// Temperatures visited by the schedule: `t0, alpha t0, ...` while above
/// `t_end`. A schedule with `t0 <= t_end` runs once at `t0`.
pub fn cooling_steps(s: &AnnealSchedule) -> Vec<f64> {
    let mut temps = vec![s.t0];
    let mut t = s.t0;
    loop {
        t *= s.alpha;
        if t <= s.t_end {
            break;
        }
        temps.push(t);
    }
    temps
}

/// Metropolis criterion. Improvements are always accepted; an infinite new
/// cost never is.
pub fn metropolis_accept(old_cost: f64, new_cost: f64, t: f64, rng: &mut Rng) -> bool {
    if new_cost < old_cost {
        return true;
    }
    if !new_cost.is_finite() {
        return false;
    }
    let rho: f64 = rng.gen();
    rho < (-(new_cost - old_cost) / t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Close,
    Open,
    Swap,
}

/// How a neighbouring configuration is proposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProposalMode {
    /// Roll for one of the available move types, then pick a target.
    #[default]
    MoveType,
    /// Uniform over the whole neighbourhood (symmetric proposal).
    UniformNeighbor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub config: OpenConfig,
    /// `None` when no legal move exists and the input is returned.
    pub kind: Option<MoveKind>,
}

/// Legal moves from `open`. With `capacity_guard`, moves leaving less open
/// capacity than total demand are excluded.
pub fn legal_moves(inst: &Instance, open: &OpenConfig, capacity_guard: bool) -> Vec<(MoveKind, usize, usize)> {
    let demand = inst.total_demand();
    let cap = inst.open_capacity(open);
    let v = inst.capacity();
    let ok = |after: f64| !capacity_guard || after >= demand;
    let opened: Vec<usize> = open.open_sites().collect();
    let closed: Vec<usize> = (0..open.len()).filter(|&j| !open.is_open(j)).collect();
    let mut moves = Vec::new();
    for &j in &opened {
        if ok(cap - v[j]) {
            moves.push((MoveKind::Close, j, j));
        }
    }
    for &k in &closed {
        if ok(cap + v[k]) {
            moves.push((MoveKind::Open, k, k));
        }
    }
    for &j in &opened {
        for &k in &closed {
            if ok(cap - v[j] + v[k]) {
                moves.push((MoveKind::Swap, j, k));
            }
        }
    }
    moves
}

fn apply(open: &OpenConfig, (kind, a, b): (MoveKind, usize, usize)) -> OpenConfig {
    let mut out = open.clone();
    match kind {
        MoveKind::Close => out.set(a, false),
        MoveKind::Open => out.set(a, true),
        MoveKind::Swap => {
            out.set(a, false);
            out.set(b, true);
        }
    }
    out
}

/// Proposes a neighbour of `open`: close one site, open one site, or move a
/// facility from an open site to a closed one.
pub fn neighbor_move(
    inst: &Instance,
    open: &OpenConfig,
    capacity_guard: bool,
    mode: ProposalMode,
    rng: &mut Rng,
) -> Move {
    let moves = legal_moves(inst, open, capacity_guard);
    if moves.is_empty() {
        return Move {
            config: open.clone(),
            kind: None,
        };
    }
    let chosen = match mode {
        ProposalMode::UniformNeighbor => *moves.choose(rng).expect("non-empty"),
        ProposalMode::MoveType => {
            let mut kinds: Vec<MoveKind> = moves.iter().map(|m| m.0).collect();
            kinds.dedup();
            let kind = *kinds.choose(rng).expect("non-empty");
            let of_kind: Vec<_> = moves.iter().filter(|m| m.0 == kind).collect();
            **of_kind.choose(rng).expect("non-empty")
        }
    };
    Move {
        config: apply(open, chosen),
        kind: Some(chosen.0),
    }
}

/// Inner layer used for each configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnerLayer {
    Qubo(InnerSettings),
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub schedule: AnnealSchedule,
    pub inner: InnerLayer,
    pub capacity_guard: bool,
    pub proposal: ProposalMode,
    /// Replace `t0` by the mean |cost change| over 50 probe moves.
    pub t0_auto: bool,
    /// Restart multiplier of the final re-solve of the best configuration;
    /// 0 disables it.
    pub refine_factor: usize,
}

impl HybridConfig {
    pub fn new(schedule: AnnealSchedule, inner: InnerLayer) -> Self {
        Self {
            schedule,
            inner,
            capacity_guard: true,
            proposal: ProposalMode::MoveType,
            t0_auto: false,
            refine_factor: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub temp: f64,
    pub current_cost: f64,
    pub best_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub best_cost: f64,
    pub best_open: OpenConfig,
    pub best_assignment: Assignment,
    pub trace: Vec<TraceRow>,
    pub accepted: usize,
    pub rejected: usize,
    /// Current configuration at the end of every cooling step.
    pub config_history: Vec<OpenConfig>,
    pub schedule: AnnealSchedule,
    pub trials: usize,
    /// Distinct configurations whose inner problem was solved.
    pub inner_solves: usize,
    /// Inner solves that ended on the greedy fallback.
    pub fallbacks: usize,
    pub seed: u64,
    pub wall_time_s: f64,
}

#[derive(Clone)]
struct Evaluated {
    cost: f64,
    assignment: Assignment,
}

struct Evaluator<'a> {
    inst: &'a Instance,
    inner: &'a InnerLayer,
    seed: u64,
    cache: HashMap<OpenConfig, Evaluated>,
    fallbacks: usize,
}

impl<'a> Evaluator<'a> {
    fn new(inst: &'a Instance, inner: &'a InnerLayer, seed: u64) -> Self {
        Self {
            inst,
            inner,
            seed,
            cache: HashMap::new(),
            fallbacks: 0,
        }
    }

    fn solve(&mut self, open: &OpenConfig, restart_factor: usize, salt: u64) -> Result<Evaluated, HybridError> {
        let outcome = match self.inner {
            InnerLayer::Greedy => assign_greedy(self.inst, open),
            InnerLayer::Qubo(settings) => {
                let mut settings = settings.clone();
                settings.params.seed = self.seed ^ salt.wrapping_mul(0x2545_f491_4f6c_dd1d);
                settings.params.restarts *= restart_factor.max(1);
                assign_customers(self.inst, open, &settings)
            }
        };
        let InnerOutcome {
            assignment,
            inner_cost,
            fallback,
            ..
        } = match outcome {
            Ok(o) => o,
            Err(SolveError::NoOpenFacility) => {
                return Ok(Evaluated {
                    cost: f64::INFINITY,
                    assignment: empty_assignment(self.inst),
                })
            }
            Err(e) => return Err(e.into()),
        };
        if fallback {
            self.fallbacks += 1;
        }
        let cost = if inner_cost.is_finite() {
            total_cost(self.inst, open, &assignment.y).expect("dimensions match")
        } else {
            f64::INFINITY
        };
        Ok(Evaluated { cost, assignment })
    }

    fn evaluate(&mut self, open: &OpenConfig) -> Result<Evaluated, HybridError> {
        if let Some(e) = self.cache.get(open) {
            return Ok(e.clone());
        }
        let salt = self.cache.len() as u64 + 1;
        let e = self.solve(open, 1, salt)?;
        self.cache.insert(open.clone(), e.clone());
        Ok(e)
    }
}

fn empty_assignment(inst: &Instance) -> Assignment {
    Assignment {
        y: vec![vec![false; inst.sites()]; inst.customers()],
        feasible: false,
        violations: Vec::new(),
    }
}

/// Random subset of sites whose capacity covers the total demand.
pub fn initial_config(inst: &Instance, rng: &mut Rng) -> OpenConfig {
    let m = inst.sites();
    for _ in 0..1000 {
        let cfg = OpenConfig::new((0..m).map(|_| rng.gen::<bool>()).collect());
        if cfg.open_count() > 0 && inst.open_capacity(&cfg) >= inst.total_demand() {
            return cfg;
        }
    }
    OpenConfig::all_open(m)
}

/// Runs the outer annealing loop with the configured inner layer.
pub fn run_hybrid(inst: &Instance, cfg: &HybridConfig, seed: u64) -> Result<SolveReport, HybridError> {
    if !inst.is_globally_feasible() {
        return Err(HybridError::Infeasible {
            capacity: inst.total_capacity(),
            demand: inst.total_demand(),
        });
    }
    let started = Instant::now();
    let mut rng = rng_for(seed, 0);
    let mut eval = Evaluator::new(inst, &cfg.inner, seed);

    let mut current = initial_config(inst, &mut rng);
    let first = eval.evaluate(&current)?;
    let mut current_cost = first.cost;
    let mut best_cost = first.cost;
    let mut best_open = current.clone();
    let mut best_assignment = first.assignment;

    let mut schedule = cfg.schedule;
    if cfg.t0_auto {
        let mut total = 0.0;
        let mut count = 0usize;
        for _ in 0..50 {
            let mv = neighbor_move(inst, &current, cfg.capacity_guard, cfg.proposal, &mut rng);
            let c = eval.evaluate(&mv.config)?.cost;
            if c.is_finite() && current_cost.is_finite() {
                total += (c - current_cost).abs();
                count += 1;
            }
        }
        if count > 0 && total > 0.0 {
            schedule.t0 = total / count as f64;
        }
    }
    let temps = cooling_steps(&schedule);

    let mut trace = vec![TraceRow {
        iter: 0,
        temp: temps[0],
        current_cost,
        best_cost,
    }];
    let mut history = Vec::with_capacity(temps.len());
    let (mut accepted, mut rejected) = (0, 0);
    let mut iter = 0;
    for &t in &temps {
        for _ in 0..schedule.iters_per_step {
            iter += 1;
            let mv = neighbor_move(inst, &current, cfg.capacity_guard, cfg.proposal, &mut rng);
            let cand = eval.evaluate(&mv.config)?;
            if cand.cost < best_cost {
                best_cost = cand.cost;
                best_open = mv.config.clone();
                best_assignment = cand.assignment.clone();
            }
            if metropolis_accept(current_cost, cand.cost, t, &mut rng) {
                current = mv.config;
                current_cost = cand.cost;
                accepted += 1;
            } else {
                rejected += 1;
            }
            trace.push(TraceRow {
                iter,
                temp: t,
                current_cost,
                best_cost,
            });
        }
        history.push(current.clone());
    }

    if cfg.refine_factor > 0 && best_cost.is_finite() {
        if let InnerLayer::Qubo(_) = cfg.inner {
            let refined = eval.solve(&best_open, cfg.refine_factor, u64::MAX)?;
            if refined.cost < best_cost {
                best_cost = refined.cost;
                best_assignment = refined.assignment;
                trace.push(TraceRow {
                    iter,
                    temp: *temps.last().expect("non-empty"),
                    current_cost,
                    best_cost,
                });
            }
        }
    }

    Ok(SolveReport {
        best_cost,
        best_open,
        best_assignment,
        trace,
        accepted,
        rejected,
        config_history: history,
        schedule,
        trials: iter,
        inner_solves: eval.cache.len(),
        fallbacks: eval.fallbacks,
        seed,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Same outer loop with the greedy assignment as inner layer.
pub fn run_classical_baseline(
    inst: &Instance,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<SolveReport, HybridError> {
    run_hybrid(inst, &HybridConfig::new(*schedule, InnerLayer::Greedy), seed)
}

/// Independent chains seeded `seed, seed + 1, ...`; the chain with the
/// lowest best cost wins (earliest chain on ties).
pub fn run_chains(
    inst: &Instance,
    cfg: &HybridConfig,
    seed: u64,
    chains: usize,
) -> Result<SolveReport, HybridError> {
    let reports: Vec<Result<SolveReport, HybridError>> = (0..chains.max(1) as u64)
        .into_par_iter()
        .map(|k| run_hybrid(inst, cfg, seed.wrapping_add(k)))
        .collect();
    let mut best: Option<SolveReport> = None;
    for r in reports {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.best_cost < b.best_cost) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one chain"))
}

/// Fixed-temperature Metropolis chain over configurations with a given
/// energy function; returns visit counts after `burn_in`.
pub fn sample_fixed_temperature<F>(
    inst: &Instance,
    energy: F,
    start: OpenConfig,
    t: f64,
    steps: usize,
    burn_in: usize,
    mode: ProposalMode,
    rng: &mut Rng,
) -> HashMap<OpenConfig, usize>
where
    F: Fn(&OpenConfig) -> f64,
{
    let mut counts = HashMap::new();
    let mut current = start;
    let mut e = energy(&current);
    for step in 0..burn_in + steps {
        let mv = neighbor_move(inst, &current, true, mode, rng);
        let e_new = energy(&mv.config);
        if metropolis_accept(e, e_new, t, rng) {
            current = mv.config;
            e = e_new;
        }
        if step >= burn_in {
            *counts.entry(current.clone()).or_insert(0) += 1;
        }
    }
    counts
}
