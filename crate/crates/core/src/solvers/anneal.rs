//! Single-bit-flip Metropolis annealing on a geometric temperature ladder.

use rand::Rng as _;

use super::{random_bits, Rng, SolverParams};
use crate::qubo::QuboMatrix;

pub(crate) fn temperatures(mat: &QuboMatrix, p: &SolverParams) -> (f64, f64) {
    let hot = p
        .sa_t_hot
        .unwrap_or_else(|| (mat.max_flip_magnitude() / std::f64::consts::LN_2).max(f64::MIN_POSITIVE));
    let cold = p
        .sa_t_cold
        .unwrap_or_else(|| mat.min_abs_coefficient() / 100f64.ln())
        .min(hot);
    (hot, cold)
}

pub(crate) fn run(mat: &QuboMatrix, p: &SolverParams, rng: &mut Rng) -> Vec<bool> {
    let n = mat.nvars();
    let mut bits = random_bits(n, rng);
    if n == 0 {
        return bits;
    }
    let mut field = mat.local_fields(&bits);
    let mut energy = mat.energy(&bits);
    let mut best = energy;
    let mut best_bits = bits.clone();

    let (hot, cold) = temperatures(mat, p);
    let ratio = if p.sweeps > 1 {
        (cold / hot).powf(1.0 / (p.sweeps - 1) as f64)
    } else {
        1.0
    };
    let mut t = hot;
    for _ in 0..p.sweeps {
        for v in 0..n {
            let delta = QuboMatrix::flip_delta(&field, &bits, v);
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp() {
                mat.flip(&mut field, &mut bits, v);
                energy += delta;
                if energy < best {
                    best = energy;
                    best_bits.copy_from_slice(&bits);
                }
            }
        }
        t *= ratio;
    }
    best_bits
}
