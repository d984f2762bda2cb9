//! Best-improvement one-flip tabu search with aspiration.

use rand::Rng as _;

use super::{random_bits, Rng, SolverParams};
use crate::qubo::QuboMatrix;

pub(crate) fn default_tenure(n: usize) -> usize {
    (10 + n / 100).min(n / 4).max(1)
}

pub(crate) fn run(mat: &QuboMatrix, p: &SolverParams, rng: &mut Rng) -> Vec<bool> {
    let start = random_bits(mat.nvars(), rng);
    search(mat, p, start, rng)
}

/// Tabu search from `bits`; returns the best state visited.
pub(crate) fn search(mat: &QuboMatrix, p: &SolverParams, mut bits: Vec<bool>, rng: &mut Rng) -> Vec<bool> {
    let n = mat.nvars();
    if n == 0 {
        return bits;
    }
    let tenure = p.tabu_tenure.unwrap_or_else(|| default_tenure(n)).min(n - 1);
    let max_iter = p.sweeps.saturating_mul(n).max(1);
    let stall_limit = n.max(50);

    let mut field = mat.local_fields(&bits);
    let mut energy = mat.energy(&bits);
    let mut best = energy;
    let mut best_bits = bits.clone();
    let mut tabu_until = vec![0usize; n];
    let mut last_improvement = 0usize;

    for it in 0..max_iter {
        let tol = 1e-12 * best.abs().max(1.0);
        let mut chosen = None;
        let mut chosen_delta = f64::INFINITY;
        let mut ties = 0u32;
        for v in 0..n {
            let delta = QuboMatrix::flip_delta(&field, &bits, v);
            let allowed = tabu_until[v] <= it || energy + delta < best - tol;
            if !allowed {
                continue;
            }
            if delta < chosen_delta - tol {
                chosen = Some(v);
                chosen_delta = delta;
                ties = 1;
            } else if delta <= chosen_delta + tol {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    chosen = Some(v);
                }
            }
        }
        let Some(v) = chosen else { continue };
        mat.flip(&mut field, &mut bits, v);
        energy += chosen_delta;
        tabu_until[v] = it + 1 + tenure;
        if energy < best - tol {
            best = energy;
            best_bits.copy_from_slice(&bits);
            last_improvement = it;
        } else if it - last_improvement >= stall_limit {
            break;
        }
    }
    best_bits
}
