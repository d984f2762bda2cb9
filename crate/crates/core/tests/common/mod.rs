//! Brute-force reference computations. Deliberately naive and independent
//! of the solver code paths they check.
#![allow(dead_code)]

use ndp_core::{Instance, OpenConfig, Qubo};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bits_of(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|k| mask >> k & 1 == 1).collect()
}

/// Energy straight from the term map.
pub fn naive_energy(q: &Qubo, bits: &[bool]) -> f64 {
    let mut e = q.offset();
    for (&(p, r), &w) in q.terms() {
        if bits[p] && bits[r] {
            e += w;
        }
    }
    e
}

/// Minimum energy over all bit vectors by plain counting.
pub fn enumerate_min(q: &Qubo) -> (f64, Vec<bool>) {
    let n = q.nvars();
    let mut best = (f64::INFINITY, vec![]);
    for mask in 0..(1u64 << n) {
        let bits = bits_of(mask, n);
        let e = naive_energy(q, &bits);
        if e < best.0 {
            best = (e, bits);
        }
    }
    best
}

pub fn random_qubo(n: usize, seed: u64) -> Qubo {
    let mut r = rng(seed);
    let mut terms = Vec::new();
    for p in 0..n {
        for q in p..n {
            if p == q || r.gen_bool(0.5) {
                terms.push(((p, q), r.gen_range(-1.0..1.0)));
            }
        }
    }
    Qubo::from_terms(n, terms, r.gen_range(-1.0..1.0), vec![])
}

/// Cheapest assignment of every customer to exactly one open site within
/// capacity, by trying all `open^n` assignments. `None` if none fits.
pub fn best_assignment(inst: &Instance, open: &OpenConfig) -> Option<(f64, Vec<usize>)> {
    let sites: Vec<usize> = open.open_sites().collect();
    if sites.is_empty() {
        return None;
    }
    let n = inst.customers();
    let mut choice = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let mut load = vec![0.0; inst.sites()];
        let mut cost = 0.0;
        for (i, &k) in choice.iter().enumerate() {
            let j = sites[k];
            load[j] += inst.demand()[i];
            cost += inst.cost(i, j);
        }
        let fits = (0..inst.sites()).all(|j| load[j] <= inst.capacity()[j]);
        if fits && best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, choice.iter().map(|&k| sites[k]).collect()));
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            choice[pos] += 1;
            if choice[pos] < sites.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Global optimum of fixed plus transport cost over all site subsets.
pub fn global_optimum(inst: &Instance) -> Option<f64> {
    let m = inst.sites();
    (1..(1u64 << m))
        .filter_map(|mask| {
            let open = OpenConfig::new(bits_of(mask, m));
            let fixed: f64 = open.open_sites().map(|j| inst.fixed_cost()[j]).sum();
            best_assignment(inst, &open).map(|(c, _)| fixed + c)
        })
        .min_by(f64::total_cmp)
}

/// Random integer-valued instance.
pub fn tiny_instance(m: usize, n: usize, seed: u64, demand_max: u32, capacity_max: u32) -> Instance {
    let mut r = rng(seed);
    let demand: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(1..=demand_max))).collect();
    let capacity: Vec<f64> = (0..m).map(|_| f64::from(r.gen_range(1..=capacity_max))).collect();
    let fixed: Vec<f64> = (0..m).map(|_| f64::from(r.gen_range(0..=20))).collect();
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..m).map(|_| f64::from(r.gen_range(0..=15))).collect())
        .collect();
    Instance::new(capacity, fixed, demand, cost).unwrap()
}

pub fn y_from_sites(inst: &Instance, sites: &[usize]) -> Vec<Vec<bool>> {
    sites
        .iter()
        .map(|&j| (0..inst.sites()).map(|k| k == j).collect())
        .collect()
}

/// Minimum energy by Gray-code enumeration over a dense copy of the matrix.
/// Same answer as `enumerate_min`, fast enough for 24 variables.
pub fn enumerate_min_gray(q: &Qubo) -> f64 {
    let n = q.nvars();
    let mut w = vec![vec![0.0; n]; n];
    for (&(p, r), &c) in q.terms() {
        w[p][r] += c;
        if p != r {
            w[r][p] += c;
        }
    }
    let mut x = vec![false; n];
    let mut e = q.offset();
    let mut best = e;
    for k in 1u64..(1u64 << n) {
        let v = k.trailing_zeros() as usize;
        let mut d = w[v][v];
        for u in 0..n {
            if u != v && x[u] {
                d += w[v][u];
            }
        }
        if x[v] {
            e -= d;
        } else {
            e += d;
        }
        x[v] = !x[v];
        best = best.min(e);
    }
    best
}
