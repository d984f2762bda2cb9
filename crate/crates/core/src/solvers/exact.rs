use super::{Sample, SolveError};
use crate::qubo::{Qubo, QuboMatrix};

pub const MAX_EXACT_VARS: usize = 26;

/// Global minimum by Gray-code enumeration of all `2^n` states.
///
/// Energies within 1e-9 (relative) of each other count as ties and are
/// resolved towards the lexicographically smallest bit vector.
pub fn solve_exact(q: &Qubo) -> Result<Sample, SolveError> {
    let n = q.nvars();
    if n > MAX_EXACT_VARS {
        return Err(SolveError::TooLarge {
            nvars: n,
            max: MAX_EXACT_VARS,
        });
    }
    let mat = q.matrix();
    let mut bits = vec![false; n];
    let mut field = mat.local_fields(&bits);
    let mut energy = mat.offset();
    let mut best_bits = bits.clone();
    let mut best = energy;

    for step in 1u64..(1u64 << n) {
        let p = step.trailing_zeros() as usize;
        energy += QuboMatrix::flip_delta(&field, &bits, p);
        mat.flip(&mut field, &mut bits, p);
        let tol = 1e-9 * best.abs().max(1.0);
        if energy < best - tol {
            best = energy;
            best_bits.copy_from_slice(&bits);
        } else if energy <= best + tol && bits < best_bits {
            best = best.min(energy);
            best_bits.copy_from_slice(&bits);
        }
    }
    Ok(Sample::new(q, best_bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        let neg = Qubo::from_terms(1, [((0, 0), -1.0)], 0.0, vec![]);
        let s = solve_exact(&neg).unwrap();
        assert_eq!((s.bits, s.energy), (vec![true], -1.0));
        let pos = Qubo::from_terms(1, [((0, 0), 1.0)], 0.0, vec![]);
        let s = solve_exact(&pos).unwrap();
        assert_eq!((s.bits, s.energy), (vec![false], 0.0));
    }

    #[test]
    fn ties_go_to_smallest_vector() {
        // x0 + x1 - 2 x0 x1 ... minimum 0 at 00 and 11
        let q = Qubo::from_terms(2, [((0, 0), 1.0), ((1, 1), 1.0), ((0, 1), -2.0)], 0.0, vec![]);
        assert_eq!(solve_exact(&q).unwrap().bits, vec![false, false]);
        // all four states degenerate
        let flat = Qubo::from_terms(2, [], 3.0, vec![]);
        let s = solve_exact(&flat).unwrap();
        assert_eq!((s.bits, s.energy), (vec![false, false], 3.0));
        // minimum at 01 and 10: 10 > 01 lexicographically
        let q = Qubo::from_terms(2, [((0, 0), -1.0), ((1, 1), -1.0), ((0, 1), 2.0)], 0.0, vec![]);
        assert_eq!(solve_exact(&q).unwrap().bits, vec![false, true]);
    }

    #[test]
    fn empty_model() {
        let q = Qubo::from_terms(0, [], 1.5, vec![]);
        let s = solve_exact(&q).unwrap();
        assert!(s.bits.is_empty());
        assert_eq!(s.energy, 1.5);
    }

    #[test]
    fn guard() {
        let q = Qubo::from_terms(27, [], 0.0, vec![]);
        assert_eq!(
            solve_exact(&q),
            Err(SolveError::TooLarge { nvars: 27, max: 26 })
        );
    }
}
