//! Seeded random instances for tests, benchmarks and experiments.

use rand::Rng as _;

use crate::instance::Instance;
use crate::solvers::rng_for;

/// Ranges (inclusive) for the integer-valued data of a random instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceShape {
    pub sites: usize,
    pub customers: usize,
    pub demand: (u32, u32),
    pub capacity: (u32, u32),
    pub fixed_cost: (u32, u32),
    pub cost: (u32, u32),
}

impl InstanceShape {
    /// Shape resembling the OR-Library `cap` family: capacity 5000 per
    /// site, fixed costs in the thousands, demands up to a few thousand.
    pub fn cap_like(sites: usize, customers: usize) -> Self {
        Self {
            sites,
            customers,
            demand: (100, 3000),
            capacity: (5000, 5000),
            fixed_cost: (7500, 25000),
            cost: (500, 40000),
        }
    }
}

/// Random instance with `Σ capacity ≥ Σ demand` (capacities are scaled up
/// uniformly when needed). Deterministic in `seed`.
pub fn random_instance(shape: &InstanceShape, seed: u64) -> Instance {
    let mut rng = rng_for(seed, 0x5eed);
    let mut draw = |(lo, hi): (u32, u32)| f64::from(rng.gen_range(lo..=hi));
    let demand: Vec<f64> = (0..shape.customers).map(|_| draw(shape.demand)).collect();
    let mut capacity: Vec<f64> = (0..shape.sites).map(|_| draw(shape.capacity)).collect();
    let fixed: Vec<f64> = (0..shape.sites).map(|_| draw(shape.fixed_cost)).collect();
    let cost: Vec<Vec<f64>> = (0..shape.customers)
        .map(|_| (0..shape.sites).map(|_| draw(shape.cost)).collect())
        .collect();
    let total_d: f64 = demand.iter().sum();
    let total_v: f64 = capacity.iter().sum();
    if total_v < total_d {
        let f = total_d / total_v;
        capacity.iter_mut().for_each(|v| *v = (*v * f).ceil());
    }
    Instance::new(capacity, fixed, demand, cost).expect("generated values are valid")
}
