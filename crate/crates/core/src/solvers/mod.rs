//! QUBO minimizers and the inner assignment layer built on them.
//!
//! Every solver is a pure function of `(Qubo, SolverParams)`: restarts run
//! in parallel, each restart seeds its own RNG from `seed ^ restart`, and
//! results are merged in a fixed order.

mod anneal;
mod assign;
mod decompose;
mod exact;
mod sqa;
mod tabu;

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::{Qubo, QuboMatrix};

pub use assign::{assign_customers, assign_greedy, decode_assignment, repair_seed, InnerOutcome, InnerSettings};
pub use decompose::{solve_decomposed, solve_decomposed_with_trace};
pub use sqa::trotter_coupling;
pub use exact::{solve_exact, MAX_EXACT_VARS};

pub type Rng = ChaCha8Rng;

/// RNG stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("exact enumeration supports at most {max} variables, got {nvars}")]
    TooLarge { nvars: usize, max: usize },
    #[error("backend {0:?} is not a sampling heuristic")]
    NotHeuristic(Backend),
    #[error("invalid solver parameters: {0}")]
    Params(String),
    #[error("sample has {found} bits, model has {expected} variables")]
    SampleLength { expected: usize, found: usize },
    #[error("variable map has {found} entries, model has {expected} variables")]
    Varmap { expected: usize, found: usize },
    #[error(transparent)]
    Qubo(#[from] crate::qubo::QuboError),
    #[error("no facility is open")]
    NoOpenFacility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Exact,
    Sa,
    #[default]
    Tabu,
    Sqa,
    Decomposed,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "exact" => Self::Exact,
            "sa" => Self::Sa,
            "tabu" => Self::Tabu,
            "sqa" => Self::Sqa,
            "decomposed" => Self::Decomposed,
            other => {
                return Err(format!(
                    "unknown backend {other:?} (expected exact|sa|tabu|sqa|decomposed)"
                ))
            }
        })
    }
}

/// Solver knobs. Temperatures and field strengths left as `None` are
/// derived from the coefficient range of the model being solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub backend: Backend,
    /// SA/SQA: Monte Carlo sweeps per restart. Tabu: iteration budget in
    /// units of `nvars`.
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
    pub sa_t_hot: Option<f64>,
    pub sa_t_cold: Option<f64>,
    pub tabu_tenure: Option<usize>,
    /// Trotter replicas.
    pub sqa_slices: usize,
    pub sqa_gamma_hot: Option<f64>,
    pub sqa_gamma_cold: Option<f64>,
    /// Bath temperature of the path-integral simulation.
    pub sqa_temperature: Option<f64>,
    /// Block size of the decomposition solver.
    pub sub_size: usize,
    /// Decomposition stops after this many passes without improvement.
    pub passes: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            backend: Backend::Tabu,
            sweeps: 20,
            restarts: 20,
            seed: 42,
            sa_t_hot: None,
            sa_t_cold: None,
            tabu_tenure: None,
            sqa_slices: 16,
            sqa_gamma_hot: None,
            sqa_gamma_cold: None,
            sqa_temperature: None,
            sub_size: 32,
            passes: 3,
        }
    }
}

impl SolverParams {
    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: &str| Err(SolveError::Params(msg.to_string()));
        if self.sweeps == 0 || self.restarts == 0 || self.sqa_slices == 0 || self.passes == 0 {
            return bad("sweeps, restarts, sqa_slices and passes must be at least 1");
        }
        if self.sub_size < 8 {
            return bad("sub_size must be at least 8");
        }
        if self.tabu_tenure == Some(0) {
            return bad("tabu_tenure must be at least 1");
        }
        let temps = [
            self.sa_t_hot,
            self.sa_t_cold,
            self.sqa_gamma_hot,
            self.sqa_gamma_cold,
            self.sqa_temperature,
        ];
        if temps.iter().flatten().any(|&t| !(t > 0.0 && t.is_finite())) {
            return bad("temperatures and field strengths must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub bits: Vec<bool>,
    pub energy: f64,
    pub occurrences: usize,
}

impl Sample {
    /// Evaluates `bits` on `q`.
    pub fn new(q: &Qubo, bits: Vec<bool>) -> Self {
        let energy = q.energy(&bits);
        Self {
            bits,
            energy,
            occurrences: 1,
        }
    }

    /// Builds a sample from externally supplied values, rejecting an energy
    /// that does not match the model.
    pub fn ingest(q: &Qubo, bits: Vec<bool>, energy: f64) -> Result<Self, SolveError> {
        if bits.len() != q.nvars() {
            return Err(SolveError::SampleLength {
                expected: q.nvars(),
                found: bits.len(),
            });
        }
        let s = Self::new(q, bits);
        if !energies_match(s.energy, energy) {
            return Err(SolveError::Params(format!(
                "sample energy {energy} does not match recomputed {}",
                s.energy
            )));
        }
        Ok(s)
    }

    fn order(&self, other: &Self) -> Ordering {
        self.energy
            .total_cmp(&other.energy)
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

/// Relative agreement to 1e-9.
pub fn energies_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Distinct samples, best first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
}

impl SampleSet {
    pub fn from_samples(mut samples: Vec<Sample>) -> Self {
        samples.sort_by(Sample::order);
        let mut merged: Vec<Sample> = Vec::with_capacity(samples.len());
        for s in samples {
            match merged.last_mut() {
                Some(last) if last.bits == s.bits => last.occurrences += s.occurrences,
                _ => merged.push(s),
            }
        }
        Self { samples: merged }
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Runs `restarts` independent copies of a sampling heuristic.
pub fn solve_heuristic(q: &Qubo, p: &SolverParams) -> Result<SampleSet, SolveError> {
    p.validate()?;
    let mat = q.matrix();
    let run: fn(&QuboMatrix, &SolverParams, &mut Rng) -> Vec<bool> = match p.backend {
        Backend::Sa => anneal::run,
        Backend::Tabu => tabu::run,
        Backend::Sqa => sqa::run,
        other => return Err(SolveError::NotHeuristic(other)),
    };
    let samples: Vec<Sample> = (0..p.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(p.seed, r);
            Sample::new(q, run(&mat, p, &mut rng))
        })
        .collect();
    Ok(SampleSet::from_samples(samples))
}

/// Dispatches on `p.backend`; exact and decomposed runs yield one sample.
pub fn solve(q: &Qubo, p: &SolverParams) -> Result<SampleSet, SolveError> {
    match p.backend {
        Backend::Exact => Ok(SampleSet::from_samples(vec![solve_exact(q)?])),
        Backend::Decomposed => Ok(SampleSet::from_samples(vec![solve_decomposed(q, p)?])),
        _ => solve_heuristic(q, p),
    }
}

pub(crate) fn random_bits(n: usize, rng: &mut Rng) -> Vec<bool> {
    use rand::Rng as _;
    (0..n).map(|_| rng.gen::<bool>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_set_orders_and_merges() {
        let q = Qubo::from_terms(2, [((0, 0), -1.0), ((1, 1), -1.0)], 0.0, vec![]);
        let set = SampleSet::from_samples(vec![
            Sample::new(&q, vec![true, false]),
            Sample::new(&q, vec![true, true]),
            Sample::new(&q, vec![false, true]),
            Sample::new(&q, vec![true, true]),
        ]);
        assert_eq!(set.len(), 3);
        assert_eq!(set.samples[0].bits, vec![true, true]);
        assert_eq!(set.samples[0].occurrences, 2);
        assert_eq!(set.samples[1].bits, vec![false, true]);
    }

    #[test]
    fn ingest_checks_energy() {
        let q = Qubo::from_terms(1, [((0, 0), -1.0)], 0.0, vec![]);
        assert!(Sample::ingest(&q, vec![true], -1.0).is_ok());
        assert!(Sample::ingest(&q, vec![true], 0.0).is_err());
        assert!(Sample::ingest(&q, vec![true, false], -1.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SolverParams::default().validate().is_ok());
        let p = SolverParams {
            sub_size: 4,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SolverParams {
            sa_t_cold: Some(0.0),
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn exact_is_not_a_heuristic() {
        let q = Qubo::from_terms(1, [], 0.0, vec![]);
        let p = SolverParams::default().with_backend(Backend::Exact);
        assert_eq!(solve_heuristic(&q, &p), Err(SolveError::NotHeuristic(Backend::Exact)));
    }
}
