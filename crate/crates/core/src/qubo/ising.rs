use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Qubo;

/// `E(s) = offset + sum_p h_p s_p + sum_{p<q} J_pq s_p s_q`, `s in {-1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub h: Vec<f64>,
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let s = |p: usize| f64::from(spins[p]);
        self.offset
            + self.h.iter().enumerate().map(|(p, h)| h * s(p)).sum::<f64>()
            + self.j.iter().map(|(&(p, q), w)| w * s(p) * s(q)).sum::<f64>()
    }
}

/// Substitutes `x = (1 + s) / 2`.
pub fn qubo_to_ising(q: &Qubo) -> IsingModel {
    let mut h = vec![0.0; q.nvars()];
    let mut j = BTreeMap::new();
    let mut offset = q.offset();
    for (&(p, r), &w) in q.terms() {
        if p == r {
            h[p] += w / 2.0;
            offset += w / 2.0;
        } else {
            h[p] += w / 4.0;
            h[r] += w / 4.0;
            offset += w / 4.0;
            j.insert((p, r), w / 4.0);
        }
    }
    IsingModel { h, j, offset }
}
