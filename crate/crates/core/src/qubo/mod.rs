//! Quadratic unconstrained binary optimization models.
//!
//! A [`Qubo`] stores the upper triangle of `Q` in a sparse map (diagonal
//! entries are the linear terms, since `x*x = x` for bits) plus a constant
//! offset, and remembers what each variable means in the facility problem.

mod encode;
mod io;
mod ising;
mod penalty;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use encode::{build_direct_qubo, build_inner_qubo, count_resources, slack_bits, Resources, SlackWidth};
pub use io::{read_qubo, read_varmap, write_qubo, write_varmap, QuboFormatError};
pub use ising::{qubo_to_ising, IsingModel};
pub use penalty::{default_penalties, direct_penalties, PenaltyMode, PenaltySet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboError {
    #[error("no facility is open")]
    NoOpenFacility,
    #[error("demand of customer {customer} is {value}, QUBO encoding needs integer demands")]
    NonIntegerDemand { customer: usize, value: f64 },
    #[error("penalty set does not match instance: {0}")]
    PenaltyShape(&'static str),
    #[error("open configuration has {found} sites, instance has {expected}")]
    ConfigLength { expected: usize, found: usize },
}

/// Meaning of a QUBO variable in the facility problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum VarRole {
    /// `y_ij`: customer `i` served by site `j`.
    Assign { customer: usize, site: usize },
    /// Bit `bit` of the capacity slack of site `site`.
    Slack { bit: usize, site: usize },
    /// `x_j`: facility built at `site` (direct encoding only).
    Facility { site: usize },
    /// Auxiliary bit of the legitimacy penalty for `(customer, site)`.
    Legit { customer: usize, site: usize },
}

impl fmt::Display for VarRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarRole::Assign { customer, site } => write!(f, "assign {customer} {site}"),
            VarRole::Slack { bit, site } => write!(f, "slack {bit} {site}"),
            VarRole::Facility { site } => write!(f, "facility - {site}"),
            VarRole::Legit { customer, site } => write!(f, "legit {customer} {site}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qubo {
    nvars: usize,
    terms: BTreeMap<(usize, usize), f64>,
    offset: f64,
    varmap: Vec<VarRole>,
}

impl Qubo {
    /// Builds a model from raw terms. `(p, q)` and `(q, p)` are merged into
    /// the upper triangle; zero coefficients are dropped.
    ///
    /// Panics if an index is out of range or `varmap` is non-empty with the
    /// wrong length.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = ((usize, usize), f64)>,
        offset: f64,
        varmap: Vec<VarRole>,
    ) -> Self {
        assert!(varmap.is_empty() || varmap.len() == nvars, "varmap length");
        let mut b = QuboBuilder::new(nvars);
        for ((p, q), w) in terms {
            b.add_quadratic(p, q, w);
        }
        b.add_constant(offset);
        let mut out = b.finish();
        out.varmap = varmap;
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.terms
    }

    pub fn varmap(&self) -> &[VarRole] {
        &self.varmap
    }

    pub fn coefficient(&self, p: usize, q: usize) -> f64 {
        let key = if p <= q { (p, q) } else { (q, p) };
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    /// Number of off-diagonal nonzeros, i.e. couplers.
    pub fn coupler_count(&self) -> usize {
        self.terms.keys().filter(|(p, q)| p != q).count()
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        assert_eq!(bits.len(), self.nvars, "bit vector length");
        self.offset
            + self
                .terms
                .iter()
                .filter(|((p, q), _)| bits[*p] && bits[*q])
                .map(|(_, w)| w)
                .sum::<f64>()
    }

    /// Largest absolute coefficient, or 0 for an empty model.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |a, w| a.max(w.abs()))
    }

    pub fn matrix(&self) -> QuboMatrix {
        QuboMatrix::new(self)
    }
}

/// Accumulates terms; coefficients for the same pair are summed.
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    nvars: usize,
    terms: BTreeMap<(usize, usize), f64>,
    offset: f64,
    varmap: Vec<VarRole>,
}

impl QuboBuilder {
    pub fn new(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
            offset: 0.0,
            varmap: Vec::new(),
        }
    }

    /// Appends a variable with the given role and returns its index.
    pub fn add_var(&mut self, role: VarRole) -> usize {
        self.varmap.push(role);
        self.nvars = self.nvars.max(self.varmap.len());
        self.varmap.len() - 1
    }

    pub fn add_constant(&mut self, c: f64) {
        self.offset += c;
    }

    pub fn add_linear(&mut self, p: usize, w: f64) {
        self.add_quadratic(p, p, w);
    }

    pub fn add_quadratic(&mut self, p: usize, q: usize, w: f64) {
        assert!(p < self.nvars && q < self.nvars, "variable index out of range");
        if w == 0.0 {
            return;
        }
        let key = if p <= q { (p, q) } else { (q, p) };
        *self.terms.entry(key).or_insert(0.0) += w;
    }

    /// Adds `weight * (sum_k a_k x_k + constant)^2`, expanded with `x*x = x`.
    pub fn add_squared(&mut self, weight: f64, linear: &[(usize, f64)], constant: f64) {
        for (k, &(p, a)) in linear.iter().enumerate() {
            self.add_linear(p, weight * (a * a + 2.0 * a * constant));
            for &(q, b) in &linear[k + 1..] {
                self.add_quadratic(p, q, 2.0 * weight * a * b);
            }
        }
        self.add_constant(weight * constant * constant);
    }

    pub fn finish(self) -> Qubo {
        let mut terms = self.terms;
        terms.retain(|_, w| *w != 0.0);
        Qubo {
            nvars: self.nvars,
            terms,
            offset: self.offset,
            varmap: self.varmap,
        }
    }
}

/// Compressed symmetric adjacency form used by the solvers.
#[derive(Debug, Clone)]
pub struct QuboMatrix {
    linear: Vec<f64>,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    offset: f64,
}

impl QuboMatrix {
    fn new(q: &Qubo) -> Self {
        let n = q.nvars;
        let mut linear = vec![0.0; n];
        let mut degree = vec![0usize; n];
        for (&(p, r), &w) in &q.terms {
            if p == r {
                linear[p] += w;
            } else {
                degree[p] += 1;
                degree[r] += 1;
            }
        }
        let mut row_start = vec![0usize; n + 1];
        for p in 0..n {
            row_start[p + 1] = row_start[p] + degree[p];
        }
        let mut fill = row_start.clone();
        let nnz = row_start[n];
        let mut cols = vec![0usize; nnz];
        let mut weights = vec![0.0; nnz];
        for (&(p, r), &w) in &q.terms {
            if p != r {
                cols[fill[p]] = r;
                weights[fill[p]] = w;
                fill[p] += 1;
                cols[fill[r]] = p;
                weights[fill[r]] = w;
                fill[r] += 1;
            }
        }
        Self {
            linear,
            row_start,
            cols,
            weights,
            offset: q.offset,
        }
    }

    pub fn nvars(&self) -> usize {
        self.linear.len()
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self, p: usize) -> f64 {
        self.linear[p]
    }

    /// `(neighbor, weight)` pairs of variable `p`.
    #[inline]
    pub fn neighbors(&self, p: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_start[p]..self.row_start[p + 1];
        self.cols[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        let mut e = self.offset;
        for p in 0..self.nvars() {
            if bits[p] {
                e += self.linear[p];
                e += self
                    .neighbors(p)
                    .filter(|&(q, _)| q > p && bits[q])
                    .map(|(_, w)| w)
                    .sum::<f64>();
            }
        }
        e
    }

    /// `field[p] = linear[p] + sum_q w_pq x_q`; flipping `p` changes the
    /// energy by `field[p]` (0 -> 1) or `-field[p]` (1 -> 0).
    pub fn local_fields(&self, bits: &[bool]) -> Vec<f64> {
        (0..self.nvars())
            .map(|p| {
                self.linear[p]
                    + self
                        .neighbors(p)
                        .filter(|&(q, _)| bits[q])
                        .map(|(_, w)| w)
                        .sum::<f64>()
            })
            .collect()
    }

    #[inline]
    pub fn flip_delta(field: &[f64], bits: &[bool], p: usize) -> f64 {
        if bits[p] {
            -field[p]
        } else {
            field[p]
        }
    }

    /// Flips `p` and updates `field` in place.
    #[inline]
    pub fn flip(&self, field: &mut [f64], bits: &mut [bool], p: usize) {
        let sign = if bits[p] { -1.0 } else { 1.0 };
        bits[p] = !bits[p];
        for (q, w) in self.neighbors(p) {
            field[q] += sign * w;
        }
    }

    /// Upper bound on `|delta|` of any single flip.
    pub fn max_flip_magnitude(&self) -> f64 {
        (0..self.nvars())
            .map(|p| self.linear[p].abs() + self.neighbors(p).map(|(_, w)| w.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Smallest nonzero `|coefficient|`, or 1 for an empty model.
    pub fn min_abs_coefficient(&self) -> f64 {
        let m = self
            .linear
            .iter()
            .chain(&self.weights)
            .map(|w| w.abs())
            .filter(|&w| w > 0.0)
            .fold(f64::INFINITY, f64::min);
        if m.is_finite() {
            m
        } else {
            1.0
        }
    }
}
