//! Path-integral Monte Carlo emulation of transverse-field annealing.
//!
//! `P` Trotter replicas of the bit vector form a ring. Replica `k` carries
//! the problem energy `E(x_k)`; neighbouring replicas are coupled
//! ferromagnetically in spin form (`s = 2x - 1`) with
//! `J_perp = -(P T / 2) ln tanh(Gamma / (P T))`. The whole ring is sampled
//! at temperature `P T` while `Gamma` ramps linearly from hot to cold.

use rand::Rng as _;

use super::{random_bits, Rng, SolverParams};
use crate::qubo::QuboMatrix;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Schedule {
    pub temperature: f64,
    pub gamma_hot: f64,
    pub gamma_cold: f64,
}

pub(crate) fn schedule(mat: &QuboMatrix, p: &SolverParams) -> Schedule {
    let scale = mat.max_flip_magnitude().max(f64::MIN_POSITIVE);
    let slices = p.sqa_slices as f64;
    Schedule {
        temperature: p.sqa_temperature.unwrap_or(scale / (8.0 * slices)),
        gamma_hot: p.sqa_gamma_hot.unwrap_or(scale),
        gamma_cold: p.sqa_gamma_cold.unwrap_or(1e-3 * scale),
    }
}

/// Inter-replica coupling for field `gamma` at `slices * temperature`.
pub fn trotter_coupling(gamma: f64, temperature: f64, slices: usize) -> f64 {
    let pt = slices as f64 * temperature;
    -0.5 * pt * (gamma / pt).tanh().ln()
}

#[inline]
fn spin(b: bool) -> f64 {
    if b {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn run(mat: &QuboMatrix, p: &SolverParams, rng: &mut Rng) -> Vec<bool> {
    let n = mat.nvars();
    let slices = p.sqa_slices;
    if n == 0 {
        return Vec::new();
    }
    let sched = schedule(mat, p);
    let pt = slices as f64 * sched.temperature;

    let mut bits: Vec<Vec<bool>> = (0..slices).map(|_| random_bits(n, rng)).collect();
    let mut fields: Vec<Vec<f64>> = bits.iter().map(|b| mat.local_fields(b)).collect();
    let mut energies: Vec<f64> = bits.iter().map(|b| mat.energy(b)).collect();
    let (mut best, mut best_bits) = best_slice(&energies, &bits);

    for sweep in 0..p.sweeps {
        let frac = if p.sweeps > 1 {
            sweep as f64 / (p.sweeps - 1) as f64
        } else {
            1.0
        };
        let gamma = sched.gamma_hot + (sched.gamma_cold - sched.gamma_hot) * frac;
        let j_perp = trotter_coupling(gamma, sched.temperature, slices);

        for k in 0..slices {
            let (prev, next) = ((k + slices - 1) % slices, (k + 1) % slices);
            for v in 0..n {
                let d_problem = QuboMatrix::flip_delta(&fields[k], &bits[k], v);
                let d_ring = if slices > 1 {
                    2.0 * j_perp * spin(bits[k][v]) * (spin(bits[prev][v]) + spin(bits[next][v]))
                } else {
                    0.0
                };
                let delta = d_problem + d_ring;
                if delta <= 0.0 || rng.gen::<f64>() < (-delta / pt).exp() {
                    mat.flip(&mut fields[k], &mut bits[k], v);
                    energies[k] += d_problem;
                }
            }
        }
        // flip one variable in every replica at once; ring energy unchanged
        for v in 0..n {
            let delta: f64 = (0..slices)
                .map(|k| QuboMatrix::flip_delta(&fields[k], &bits[k], v))
                .sum();
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / pt).exp() {
                for k in 0..slices {
                    energies[k] += QuboMatrix::flip_delta(&fields[k], &bits[k], v);
                    mat.flip(&mut fields[k], &mut bits[k], v);
                }
            }
        }

        let (e, k) = energies
            .iter()
            .enumerate()
            .map(|(k, &e)| (e, k))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("at least one slice");
        if e < best {
            best = e;
            best_bits.copy_from_slice(&bits[k]);
        }
    }
    best_bits
}

fn best_slice(energies: &[f64], bits: &[Vec<bool>]) -> (f64, Vec<bool>) {
    let k = (0..energies.len())
        .min_by(|&a, &b| energies[a].total_cmp(&energies[b]))
        .expect("at least one slice");
    (energies[k], bits[k].clone())
}
