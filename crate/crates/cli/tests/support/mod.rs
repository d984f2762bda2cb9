//! Exhaustive reference solutions for tiny instances.
#![allow(dead_code)]

use ndp_core::{Instance, OpenConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cheapest capacity-respecting assignment to the open sites, by trying
/// every map from customers to open sites.
pub fn best_transport(inst: &Instance, open: &[bool]) -> Option<f64> {
    let sites: Vec<usize> = (0..open.len()).filter(|&j| open[j]).collect();
    if sites.is_empty() {
        return None;
    }
    let n = inst.customers();
    let total = sites.len().pow(n as u32);
    let mut best: Option<f64> = None;
    for code in 0..total {
        let mut c = code;
        let mut load = vec![0.0; inst.sites()];
        let mut cost = 0.0;
        for i in 0..n {
            let j = sites[c % sites.len()];
            c /= sites.len();
            load[j] += inst.demand()[i];
            cost += inst.cost(i, j);
        }
        if (0..inst.sites()).all(|j| load[j] <= inst.capacity()[j]) && best.is_none_or(|b| cost < b) {
            best = Some(cost);
        }
    }
    best
}

/// Optimum of fixed plus transport cost over every (x, y).
pub fn global_optimum(inst: &Instance) -> Option<f64> {
    let m = inst.sites();
    let mut best: Option<f64> = None;
    for mask in 1u32..(1 << m) {
        let open: Vec<bool> = (0..m).map(|j| mask >> j & 1 == 1).collect();
        if let Some(t) = best_transport(inst, &open) {
            let f: f64 = (0..m).filter(|&j| open[j]).map(|j| inst.fixed_cost()[j]).sum();
            if best.is_none_or(|b| f + t < b) {
                best = Some(f + t);
            }
        }
    }
    best
}

/// Integer instance with `m` sites and `n` customers.
pub fn random_instance(m: usize, n: usize, seed: u64, demand_max: u32, capacity_max: u32) -> Instance {
    let mut r = rng(seed);
    let demand = (0..n).map(|_| f64::from(r.gen_range(1..=demand_max))).collect();
    let capacity = (0..m).map(|_| f64::from(r.gen_range(1..=capacity_max))).collect();
    let fixed = (0..m).map(|_| f64::from(r.gen_range(0..=20))).collect();
    let cost = (0..n)
        .map(|_| (0..m).map(|_| f64::from(r.gen_range(0..=15))).collect())
        .collect();
    Instance::new(capacity, fixed, demand, cost).unwrap()
}

pub fn all_open(m: usize) -> OpenConfig {
    OpenConfig::all_open(m)
}
