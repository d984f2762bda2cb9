use serde::{Deserialize, Serialize};

use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// Weak penalties (`lambda_i = min_j c_ij`); constraint violations are
    /// possible and are repaired by resampling.
    #[default]
    Paper,
    /// Penalties large enough that every exact ground state is feasible
    /// whenever a feasible assignment exists.
    Strict,
}

impl std::str::FromStr for PenaltyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "strict" => Ok(Self::Strict),
            other => Err(format!("unknown penalty mode {other:?} (expected paper|strict)")),
        }
    }
}

/// Penalty weights: `lambda` per customer (one-hot), `mu` per site
/// (capacity), `alpha` per `(customer, site)` pair, row-major (legitimacy,
/// direct encoding only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySet {
    pub mode: PenaltyMode,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl PenaltySet {
    pub fn alpha(&self, customer: usize, site: usize) -> f64 {
        self.alpha[customer * self.mu.len() + site]
    }

    pub fn is_positive(&self) -> bool {
        self.lambda.iter().chain(&self.mu).chain(&self.alpha).all(|&w| w > 0.0)
    }
}

fn positive_or(w: f64, fallback: f64) -> f64 {
    if w > 0.0 {
        w
    } else {
        fallback
    }
}

/// Default weights for the assignment-only encoding.
///
/// Paper mode: `lambda_i = min_j c_ij` and `mu_j = min c / (max v)^2`.
/// Strict mode: `lambda_i = max(2 max_j c_ij + 1, B)` and `mu_j = B` with
/// `B = sum_i max_j c_ij + 1`, which bounds every feasible transport cost,
/// so any violated constraint (at least one unit, integer data) costs more
/// than the best feasible assignment.
pub fn default_penalties(inst: &Instance, mode: PenaltyMode) -> PenaltySet {
    let (m, n) = (inst.sites(), inst.customers());
    let row_max = |i: usize| inst.cost_row(i).iter().copied().fold(0.0, f64::max);
    let row_min = |i: usize| inst.cost_row(i).iter().copied().fold(f64::INFINITY, f64::min);
    let (lambda, mu): (Vec<f64>, Vec<f64>) = match mode {
        PenaltyMode::Paper => {
            let min_c = (0..n).map(row_min).fold(f64::INFINITY, f64::min);
            let max_v = inst.capacity().iter().copied().fold(0.0, f64::max);
            let floor = positive_or(min_c, 1.0);
            let lambda = (0..n).map(|i| positive_or(row_min(i), floor)).collect();
            let mu = vec![floor / (max_v * max_v); m];
            (lambda, mu)
        }
        PenaltyMode::Strict => {
            let bound = (0..n).map(row_max).sum::<f64>() + 1.0;
            let lambda = (0..n).map(|i| (2.0 * row_max(i) + 1.0).max(bound)).collect();
            (lambda, vec![bound; m])
        }
    };
    let alpha = (0..n)
        .flat_map(|i| std::iter::repeat_n(lambda[i], m))
        .collect();
    PenaltySet {
        mode,
        lambda,
        mu,
        alpha,
    }
}

/// Default weights for the single-shot encoding, which also pays fixed
/// costs. Strict mode uses `B = sum_j f_j + sum_i max_j c_ij + 1` for every
/// weight; paper mode matches [`default_penalties`] with `alpha_ij = lambda_i`.
pub fn direct_penalties(inst: &Instance, mode: PenaltyMode) -> PenaltySet {
    match mode {
        PenaltyMode::Paper => default_penalties(inst, mode),
        PenaltyMode::Strict => {
            let (m, n) = (inst.sites(), inst.customers());
            let bound = inst.fixed_cost().iter().sum::<f64>()
                + (0..n)
                    .map(|i| inst.cost_row(i).iter().copied().fold(0.0, f64::max))
                    .sum::<f64>()
                + 1.0;
            PenaltySet {
                mode,
                lambda: vec![bound; n],
                mu: vec![bound; m],
                alpha: vec![bound; n * m],
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one() -> Instance {
        Instance::new(vec![10.0], vec![5.0], vec![3.0], vec![vec![7.0]]).unwrap()
    }

    #[test]
    fn paper_lambda_is_row_minimum() {
        let p = default_penalties(&one_by_one(), PenaltyMode::Paper);
        assert_eq!(p.lambda, vec![7.0]);
        assert_eq!(p.mu, vec![7.0 / 100.0]);
        assert!(p.is_positive());
    }

    #[test]
    fn strict_lambda() {
        let p = default_penalties(&one_by_one(), PenaltyMode::Strict);
        assert_eq!(p.lambda, vec![15.0]);
        assert!(p.is_positive());
    }

    #[test]
    fn zero_costs_still_give_positive_weights() {
        let inst = Instance::new(vec![2.0, 2.0], vec![0.0, 0.0], vec![1.0], vec![vec![0.0, 3.0]]).unwrap();
        for mode in [PenaltyMode::Paper, PenaltyMode::Strict] {
            assert!(default_penalties(&inst, mode).is_positive());
            assert!(direct_penalties(&inst, mode).is_positive());
        }
    }

    #[test]
    fn direct_strict_covers_fixed_costs() {
        let p = direct_penalties(&one_by_one(), PenaltyMode::Strict);
        assert_eq!(p.lambda, vec![13.0]);
        assert_eq!(p.alpha(0, 0), 13.0);
    }
}
