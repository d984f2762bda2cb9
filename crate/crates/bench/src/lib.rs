//! Fixtures shared by the criterion benchmarks.

use ndp_core::qubo::{build_inner_qubo, default_penalties, PenaltyMode, SlackWidth};
use ndp_core::synthetic::{random_instance, InstanceShape};
use ndp_core::{Instance, OpenConfig, Qubo};

/// OR-Library-shaped instance with `sites x customers`.
pub fn cap_like(sites: usize, customers: usize, seed: u64) -> Instance {
    random_instance(&InstanceShape::cap_like(sites, customers), seed)
}

/// Assignment QUBO with every site open.
pub fn inner_qubo(inst: &Instance, mode: PenaltyMode) -> Qubo {
    let pen = default_penalties(inst, mode);
    build_inner_qubo(inst, &OpenConfig::all_open(inst.sites()), &pen, SlackWidth::Full)
        .expect("synthetic demands are integral")
}
