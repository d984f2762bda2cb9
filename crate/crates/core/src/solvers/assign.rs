use serde::{Deserialize, Serialize};

use super::{solve, Sample, SolveError, SolverParams};
use crate::instance::{check_feasibility, greedy_assign, Assignment, Instance, OpenConfig};
use crate::qubo::{build_inner_qubo, PenaltySet, Qubo, QuboError, SlackWidth, VarRole};

/// Maps the assignment bits of a sample back to `y` and checks it.
/// Slack and auxiliary bits are ignored.
pub fn decode_assignment(
    s: &Sample,
    q: &Qubo,
    inst: &Instance,
    open: &OpenConfig,
) -> Result<Assignment, SolveError> {
    if q.varmap().len() != q.nvars() {
        return Err(SolveError::Varmap {
            expected: q.nvars(),
            found: q.varmap().len(),
        });
    }
    if s.bits.len() != q.nvars() {
        return Err(SolveError::SampleLength {
            expected: q.nvars(),
            found: s.bits.len(),
        });
    }
    let (m, n) = (inst.sites(), inst.customers());
    let mut y = vec![vec![false; m]; n];
    for (role, &bit) in q.varmap().iter().zip(&s.bits) {
        if let VarRole::Assign { customer, site } = *role {
            if customer >= n || site >= m {
                return Err(SolveError::Varmap {
                    expected: n * m,
                    found: customer * m + site,
                });
            }
            y[customer][site] = bit;
        }
    }
    check_feasibility(inst, open, y).map_err(|_| SolveError::Varmap {
        expected: m,
        found: open.len(),
    })
}

/// Configuration of the inner layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerSettings {
    pub penalties: PenaltySet,
    pub params: SolverParams,
    pub slack_width: SlackWidth,
    /// Solver calls before falling back to the greedy assignment.
    pub max_repair: usize,
}

impl InnerSettings {
    pub fn new(penalties: PenaltySet, params: SolverParams) -> Self {
        Self {
            penalties,
            params,
            slack_width: SlackWidth::Full,
            max_repair: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerOutcome {
    pub assignment: Assignment,
    /// Transport cost of `assignment`, or infinity when no feasible
    /// assignment was found.
    pub inner_cost: f64,
    /// Solver calls made (0 when the QUBO path was skipped).
    pub attempts: usize,
    /// The greedy assignment was used.
    pub fallback: bool,
}

/// Seed of repair attempt `attempt`; attempt 0 uses `seed` unchanged.
pub fn repair_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Solves the assignment QUBO for `open`, scanning samples best-first for a
/// feasible decode and resampling with fresh seeds when none is found.
pub fn assign_customers(
    inst: &Instance,
    open: &OpenConfig,
    settings: &InnerSettings,
) -> Result<InnerOutcome, SolveError> {
    let q = match build_inner_qubo(inst, open, &settings.penalties, settings.slack_width) {
        Ok(q) => q,
        Err(QuboError::NoOpenFacility) => return Err(SolveError::NoOpenFacility),
        Err(e) => return Err(e.into()),
    };
    for attempt in 0..settings.max_repair {
        let params = SolverParams {
            seed: repair_seed(settings.params.seed, attempt),
            ..settings.params.clone()
        };
        let samples = solve(&q, &params)?;
        for s in &samples.samples {
            let a = decode_assignment(s, &q, inst, open)?;
            if a.feasible {
                return Ok(InnerOutcome {
                    inner_cost: a.transport_cost(inst),
                    assignment: a,
                    attempts: attempt + 1,
                    fallback: false,
                });
            }
        }
    }
    let a = greedy_assign(inst, open).map_err(|_| SolveError::NoOpenFacility)?;
    Ok(InnerOutcome {
        inner_cost: if a.feasible {
            a.transport_cost(inst)
        } else {
            f64::INFINITY
        },
        assignment: a,
        attempts: settings.max_repair,
        fallback: true,
    })
}

/// Greedy inner layer used by the classical baseline.
pub fn assign_greedy(inst: &Instance, open: &OpenConfig) -> Result<InnerOutcome, SolveError> {
    let a = greedy_assign(inst, open).map_err(|_| SolveError::NoOpenFacility)?;
    Ok(InnerOutcome {
        inner_cost: if a.feasible {
            a.transport_cost(inst)
        } else {
            f64::INFINITY
        },
        assignment: a,
        attempts: 0,
        fallback: false,
    })
}
