mod common;

use common::*;
use ndp_core::hybrid::{
    cooling_steps, run_chains, run_hybrid, AnnealSchedule, HybridConfig, InnerLayer, ProposalMode,
};
use ndp_core::instance::{check_feasibility, total_cost};
use ndp_core::qubo::{default_penalties, PenaltyMode};
use ndp_core::solvers::{Backend, InnerSettings, SolverParams};
use ndp_core::synthetic::{random_instance, InstanceShape};
use ndp_core::{run_classical_baseline, Instance};
use rand::Rng;

fn exact_config(inst: &Instance) -> HybridConfig {
    let params = SolverParams::default().with_backend(Backend::Exact);
    let inner = InnerSettings::new(default_penalties(inst, PenaltyMode::Strict), params);
    HybridConfig::new(AnnealSchedule::standard(inst.sites()), InnerLayer::Qubo(inner))
}

#[test]
fn schedule_lengths() {
    assert_eq!(cooling_steps(&AnnealSchedule::standard(16)).len(), 14);
    for m in [1, 16, 25, 50] {
        assert_eq!(AnnealSchedule::standard(m).total_trials(), 14 * m);
    }
}

#[test]
fn report_is_consistent() {
    let inst = tiny_instance(4, 3, 11, 3, 7);
    let r = run_hybrid(&inst, &exact_config(&inst), 3).unwrap();
    assert_eq!(r.trials, 56);
    assert_eq!(r.accepted + r.rejected, 56);
    assert_eq!(r.config_history.len(), 14);
    assert!(r.best_assignment.feasible);
    let cost = total_cost(&inst, &r.best_open, &r.best_assignment.y).unwrap();
    assert!((cost - r.best_cost).abs() < 1e-9);
    for w in r.trace.windows(2) {
        assert!(w[1].best_cost <= w[0].best_cost);
        assert!(w[1].best_cost <= w[1].current_cost);
    }
}

#[test]
fn hybrid_reaches_global_optimum_on_tiny_instances() {
    let mut hits = 0;
    let mut total = 0;
    for seed in 0..30 {
        let mut r = rng(seed);
        let inst = tiny_instance(r.gen_range(2..=3), r.gen_range(2..=5), seed, 5, 14);
        let Some(opt) = global_optimum(&inst) else { continue };
        total += 1;
        let rep = run_hybrid(&inst, &exact_config(&inst), seed).unwrap();
        assert!(rep.best_cost >= opt - 1e-9);
        if (rep.best_cost - opt).abs() < 1e-9 {
            hits += 1;
        }
    }
    assert!(hits * 20 >= total * 19, "{hits}/{total}");
}

#[test]
fn baseline_is_feasible_and_bounded_below_by_optimum() {
    for seed in 0..20 {
        let inst = tiny_instance(3, 5, seed, 5, 14);
        let Some(opt) = global_optimum(&inst) else { continue };
        let rep = run_classical_baseline(&inst, &AnnealSchedule::standard(3), seed).unwrap();
        assert!(rep.best_cost >= opt - 1e-9);
        let a = check_feasibility(&inst, &rep.best_open, rep.best_assignment.y.clone()).unwrap();
        assert!(a.feasible);
    }
}

#[test]
fn single_site_trace_is_flat() {
    let inst = Instance::new(vec![10.0], vec![4.0], vec![2.0, 3.0], vec![vec![1.0], vec![2.0]]).unwrap();
    let rep = run_hybrid(&inst, &exact_config(&inst), 1).unwrap();
    assert_eq!(rep.best_cost, 7.0);
    assert!(rep.trace.iter().all(|t| t.current_cost == 7.0 && t.best_cost == 7.0));
}

#[test]
fn same_seed_same_report() {
    let inst = random_instance(&InstanceShape::cap_like(6, 12), 4);
    let settings = InnerSettings::new(
        default_penalties(&inst, PenaltyMode::Paper),
        SolverParams {
            restarts: 4,
            ..Default::default()
        },
    );
    let cfg = HybridConfig::new(AnnealSchedule::standard(6), InnerLayer::Qubo(settings));
    let mut a = run_hybrid(&inst, &cfg, 9).unwrap();
    let mut b = run_hybrid(&inst, &cfg, 9).unwrap();
    a.wall_time_s = 0.0;
    b.wall_time_s = 0.0;
    assert_eq!(a, b);
    let c = run_chains(&inst, &cfg, 9, 3).unwrap();
    assert!(c.best_cost <= a.best_cost);
}

#[test]
fn infeasible_instance_is_rejected() {
    let inst = Instance::new(vec![1.0], vec![1.0], vec![5.0], vec![vec![1.0]]).unwrap();
    assert!(run_hybrid(&inst, &exact_config(&inst), 0).is_err());
}

#[test]
fn uniform_proposal_runs() {
    let inst = tiny_instance(4, 3, 2, 3, 7);
    let mut cfg = exact_config(&inst);
    cfg.proposal = ProposalMode::UniformNeighbor;
    let rep = run_hybrid(&inst, &cfg, 2).unwrap();
    assert!(rep.best_cost.is_finite());
    assert_eq!(rep.best_open.len(), 4);
}
