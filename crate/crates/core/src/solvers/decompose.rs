//! Block decomposition for QUBOs too large for a single sub-solver call.
//!
//! A global incumbent is improved block by block: the variables outside a
//! block are clamped to their incumbent values, the resulting small QUBO is
//! solved, and the block assignment is replaced only when that lowers the
//! energy. Each pass ends with a tabu search over the whole model started
//! from the incumbent.

use rand::seq::SliceRandom;

use super::{rng_for, tabu, solve, Backend, Sample, SolveError, SolverParams, MAX_EXACT_VARS};
use crate::qubo::{Qubo, QuboMatrix};

fn sub_params(p: &SolverParams, block: usize, seed: u64) -> SolverParams {
    let backend = match p.backend {
        Backend::Exact if block <= MAX_EXACT_VARS => Backend::Exact,
        Backend::Sa | Backend::Sqa => p.backend,
        _ => Backend::Tabu,
    };
    SolverParams {
        backend,
        seed,
        ..p.clone()
    }
}

pub fn solve_decomposed(q: &Qubo, p: &SolverParams) -> Result<Sample, SolveError> {
    solve_decomposed_with_trace(q, p).map(|(s, _)| s)
}

/// Also returns the incumbent energy after the initial descent and after
/// every pass.
pub fn solve_decomposed_with_trace(q: &Qubo, p: &SolverParams) -> Result<(Sample, Vec<f64>), SolveError> {
    p.validate()?;
    let n = q.nvars();
    if n <= p.sub_size {
        let set = solve(q, &sub_params(p, n, p.seed))?;
        let best = set.samples.into_iter().next().expect("solver returns a sample");
        let trace = vec![best.energy];
        return Ok((best, trace));
    }

    let mat = q.matrix();
    let mut bits = vec![false; n];
    let mut field = mat.local_fields(&bits);
    for v in 0..n {
        if QuboMatrix::flip_delta(&field, &bits, v) < 0.0 {
            mat.flip(&mut field, &mut bits, v);
        }
    }
    let mut energy = mat.energy(&bits);
    let mut trace = vec![energy];

    let mut rng = rng_for(p.seed, 0xdec0);
    let mut stale = 0usize;
    let mut improved_last = true;
    let mut local = vec![usize::MAX; n];
    let mut pass = 0u64;
    while stale < p.passes {
        let mut order: Vec<usize> = (0..n).collect();
        if improved_last {
            let impact: Vec<f64> = (0..n)
                .map(|v| QuboMatrix::flip_delta(&field, &bits, v).abs())
                .collect();
            order.sort_by(|&a, &b| impact[b].total_cmp(&impact[a]).then(a.cmp(&b)));
        } else {
            order.shuffle(&mut rng);
        }

        let mut improved = false;
        for (b, block) in order.chunks(p.sub_size).enumerate() {
            for (k, &v) in block.iter().enumerate() {
                local[v] = k;
            }
            let sub = clamp(&mat, &bits, block, &local);
            let current: Vec<bool> = block.iter().map(|&v| bits[v]).collect();
            let current_energy = sub.energy(&current);
            let seed = p.seed ^ (pass << 32) ^ b as u64;
            let set = solve(&sub, &sub_params(p, block.len(), seed))?;
            let candidate = &set.samples[0];
            let tol = 1e-9 * current_energy.abs().max(1.0);
            if candidate.energy < current_energy - tol {
                for (k, &v) in block.iter().enumerate() {
                    if bits[v] != candidate.bits[k] {
                        mat.flip(&mut field, &mut bits, v);
                    }
                }
                improved = true;
            }
            for &v in block {
                local[v] = usize::MAX;
            }
        }
        let polished = tabu::search(&mat, p, bits.clone(), &mut rng);
        let polished_energy = mat.energy(&polished);
        if polished_energy < mat.energy(&bits) - 1e-9 * energy.abs().max(1.0) {
            bits = polished;
            field = mat.local_fields(&bits);
            improved = true;
        }
        let new_energy = mat.energy(&bits);
        debug_assert!(new_energy <= energy + 1e-9 * energy.abs().max(1.0));
        energy = new_energy;
        trace.push(energy);
        improved_last = improved;
        stale = if improved { 0 } else { stale + 1 };
        pass += 1;
    }
    Ok((Sample::new(q, bits), trace))
}

/// Sub-QUBO over `block` with every other variable fixed to `bits`.
fn clamp(mat: &QuboMatrix, bits: &[bool], block: &[usize], local: &[usize]) -> Qubo {
    let mut terms = Vec::new();
    for (k, &v) in block.iter().enumerate() {
        let mut lin = mat.linear(v);
        for (u, w) in mat.neighbors(v) {
            match local[u] {
                usize::MAX => {
                    if bits[u] {
                        lin += w;
                    }
                }
                l if l > k => terms.push(((k, l), w)),
                _ => {}
            }
        }
        terms.push(((k, k), lin));
    }
    Qubo::from_terms(block.len(), terms, 0.0, vec![])
}
