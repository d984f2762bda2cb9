use serde::{Deserialize, Serialize};

use super::{PenaltySet, Qubo, QuboBuilder, QuboError, VarRole};
use crate::instance::{Instance, OpenConfig};

/// Number of slack bits used to turn `load <= v` into an equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SlackWidth {
    /// `ceil(log2(v + 1))`: every slack in `0..=v` is representable.
    #[default]
    Full,
    /// `ceil(log2 v)`: one bit short when `v` is a power of two. Kept to
    /// reproduce published qubit counts.
    Compat,
}

/// Slack bits for capacity `v` (fractional capacities are floored).
pub fn slack_bits(capacity: f64, width: SlackWidth) -> usize {
    let v = capacity.floor().max(0.0) as u64;
    match width {
        SlackWidth::Full => (u64::BITS - v.leading_zeros()) as usize,
        SlackWidth::Compat if v <= 1 => 0,
        SlackWidth::Compat => (u64::BITS - (v - 1).leading_zeros()) as usize,
    }
}

fn integer_demands(inst: &Instance) -> Result<(), QuboError> {
    match inst.demand().iter().position(|d| d.fract() != 0.0) {
        Some(customer) => Err(QuboError::NonIntegerDemand {
            customer,
            value: inst.demand()[customer],
        }),
        None => Ok(()),
    }
}

fn check_penalties(inst: &Instance, pen: &PenaltySet) -> Result<(), QuboError> {
    let (m, n) = (inst.sites(), inst.customers());
    if pen.lambda.len() != n {
        return Err(QuboError::PenaltyShape("lambda must have one weight per customer"));
    }
    if pen.mu.len() != m {
        return Err(QuboError::PenaltyShape("mu must have one weight per site"));
    }
    if pen.alpha.len() != n * m {
        return Err(QuboError::PenaltyShape("alpha must have one weight per (customer, site)"));
    }
    Ok(())
}

/// Adds slack variables for `site` and the capacity penalty over the given
/// assignment variables `(customer, var)`.
fn add_capacity_term(
    b: &mut QuboBuilder,
    inst: &Instance,
    site: usize,
    assign_vars: &[(usize, usize)],
    weight: f64,
    width: SlackWidth,
) {
    let v = inst.capacity()[site].floor();
    let mut linear: Vec<(usize, f64)> = assign_vars
        .iter()
        .map(|&(i, p)| (p, inst.demand()[i]))
        .collect();
    for bit in 0..slack_bits(inst.capacity()[site], width) {
        let p = b.add_var(VarRole::Slack { bit, site });
        linear.push((p, (1u64 << bit) as f64));
    }
    b.add_squared(weight, &linear, -v);
}

/// Assignment QUBO for a fixed set of open sites.
///
/// Variables exist only for open sites: all `y_ij` (customer-major), then
/// the slack bits of each open site in ascending site order.
pub fn build_inner_qubo(
    inst: &Instance,
    open: &OpenConfig,
    pen: &PenaltySet,
    width: SlackWidth,
) -> Result<Qubo, QuboError> {
    if open.len() != inst.sites() {
        return Err(QuboError::ConfigLength {
            expected: inst.sites(),
            found: open.len(),
        });
    }
    check_penalties(inst, pen)?;
    integer_demands(inst)?;
    let sites: Vec<usize> = open.open_sites().collect();
    if sites.is_empty() {
        return Err(QuboError::NoOpenFacility);
    }

    let n = inst.customers();
    let mut b = QuboBuilder::new(0);
    // var[i][k] for the k-th open site
    let mut var = vec![Vec::with_capacity(sites.len()); n];
    for (i, row) in var.iter_mut().enumerate() {
        for &site in &sites {
            row.push(b.add_var(VarRole::Assign { customer: i, site }));
        }
    }

    for (i, row) in var.iter().enumerate() {
        for (k, &p) in row.iter().enumerate() {
            b.add_linear(p, inst.cost(i, sites[k]));
        }
        let one_hot: Vec<(usize, f64)> = row.iter().map(|&p| (p, 1.0)).collect();
        b.add_squared(pen.lambda[i], &one_hot, -1.0);
    }
    for (k, &site) in sites.iter().enumerate() {
        let column: Vec<(usize, usize)> = (0..n).map(|i| (i, var[i][k])).collect();
        add_capacity_term(&mut b, inst, site, &column, pen.mu[site], width);
    }
    Ok(b.finish())
}

/// Single-shot QUBO over facility, assignment, slack and legitimacy bits.
///
/// The legitimacy penalty is applied per `(customer, site)` pair:
/// `alpha_ij (x_j - y_ij - b_ij)^2`, which is zero exactly when `y_ij <= x_j`
/// for a suitable choice of `b_ij`.
pub fn build_direct_qubo(inst: &Instance, pen: &PenaltySet, width: SlackWidth) -> Result<Qubo, QuboError> {
    check_penalties(inst, pen)?;
    integer_demands(inst)?;
    let (m, n) = (inst.sites(), inst.customers());
    let mut b = QuboBuilder::new(0);
    let facility: Vec<usize> = (0..m).map(|site| b.add_var(VarRole::Facility { site })).collect();
    let assign: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|site| b.add_var(VarRole::Assign { customer: i, site }))
                .collect()
        })
        .collect();

    for (j, &p) in facility.iter().enumerate() {
        b.add_linear(p, inst.fixed_cost()[j]);
    }
    for (i, row) in assign.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            b.add_linear(p, inst.cost(i, j));
        }
        let one_hot: Vec<(usize, f64)> = row.iter().map(|&p| (p, 1.0)).collect();
        b.add_squared(pen.lambda[i], &one_hot, -1.0);
    }
    for j in 0..m {
        let column: Vec<(usize, usize)> = (0..n).map(|i| (i, assign[i][j])).collect();
        add_capacity_term(&mut b, inst, j, &column, pen.mu[j], width);
    }
    for (i, row) in assign.iter().enumerate() {
        for (j, &y) in row.iter().enumerate() {
            let aux = b.add_var(VarRole::Legit { customer: i, site: j });
            b.add_squared(pen.alpha(i, j), &[(facility[j], 1.0), (y, -1.0), (aux, -1.0)], 0.0);
        }
    }
    Ok(b.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub qubits: usize,
    pub couplers: usize,
}

/// Qubit and coupler counts of the assignment QUBO for `open`.
///
/// With `m` open sites, `n` customers and `k_j` slack bits:
/// couplers = `n m(m-1)/2` (one-hot) + `m n(n-1)/2` (capacity, logical)
/// + `sum k_j(k_j-1)/2` (slack-slack) + `sum n k_j` (slack-logical).
pub fn count_resources(inst: &Instance, open: &OpenConfig, width: SlackWidth) -> Resources {
    let n = inst.customers();
    let m_open = open.open_count();
    let ks: Vec<usize> = open
        .open_sites()
        .map(|j| slack_bits(inst.capacity()[j], width))
        .collect();
    let slack: usize = ks.iter().sum();
    Resources {
        qubits: m_open * n + slack,
        couplers: n * m_open * m_open.saturating_sub(1) / 2
            + m_open * n * n.saturating_sub(1) / 2
            + ks.iter().map(|k| k * k.saturating_sub(1) / 2).sum::<usize>()
            + n * slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{default_penalties, PenaltyMode};

    #[test]
    fn slack_widths() {
        assert_eq!(slack_bits(1.0, SlackWidth::Full), 1);
        assert_eq!(slack_bits(2.0, SlackWidth::Full), 2);
        assert_eq!(slack_bits(3.0, SlackWidth::Full), 2);
        assert_eq!(slack_bits(4.0, SlackWidth::Full), 3);
        assert_eq!(slack_bits(5000.0, SlackWidth::Full), 13);
        assert_eq!(slack_bits(1.0, SlackWidth::Compat), 0);
        assert_eq!(slack_bits(2.0, SlackWidth::Compat), 1);
        assert_eq!(slack_bits(4.0, SlackWidth::Compat), 2);
        assert_eq!(slack_bits(5.0, SlackWidth::Compat), 3);
        assert_eq!(slack_bits(65536.0, SlackWidth::Compat), 16);
        assert_eq!(slack_bits(2.7, SlackWidth::Full), 2);
    }

    #[test]
    fn one_site_one_customer_compat_width() {
        let inst = Instance::new(vec![2.0], vec![1.0], vec![1.0], vec![vec![3.0]]).unwrap();
        let pen = default_penalties(&inst, PenaltyMode::Paper);
        let q = build_inner_qubo(&inst, &OpenConfig::all_open(1), &pen, SlackWidth::Compat).unwrap();
        assert_eq!(q.nvars(), 2);
        assert_eq!(
            q.varmap(),
            &[VarRole::Assign { customer: 0, site: 0 }, VarRole::Slack { bit: 0, site: 0 }]
        );
        assert_eq!(
            count_resources(&inst, &OpenConfig::all_open(1), SlackWidth::Compat),
            Resources { qubits: 2, couplers: 1 }
        );
    }

    #[test]
    fn direct_has_one_of_each_role() {
        let inst = Instance::new(vec![2.0], vec![1.0], vec![1.0], vec![vec![3.0]]).unwrap();
        let pen = default_penalties(&inst, PenaltyMode::Paper);
        let q = build_direct_qubo(&inst, &pen, SlackWidth::Compat).unwrap();
        assert_eq!(q.nvars(), 4);
    }

    #[test]
    fn closed_facility_assignment_is_penalized() {
        let inst = Instance::new(vec![2.0], vec![1.0], vec![1.0], vec![vec![3.0]]).unwrap();
        let pen = default_penalties(&inst, PenaltyMode::Paper);
        let q = build_direct_qubo(&inst, &pen, SlackWidth::Compat).unwrap();
        let idx = |role: VarRole| q.varmap().iter().position(|r| *r == role).unwrap();
        // facility bit stays 0 throughout
        assert_eq!(idx(VarRole::Facility { site: 0 }), 0);
        let y = idx(VarRole::Assign { customer: 0, site: 0 });
        let (a, b) = (idx(VarRole::Slack { bit: 0, site: 0 }), idx(VarRole::Legit { customer: 0, site: 0 }));
        for slack in [false, true] {
            for aux in [false, true] {
                let energy = |yv: bool| {
                    let mut bits = vec![false; 4];
                    bits[y] = yv;
                    bits[a] = slack;
                    bits[b] = aux;
                    q.energy(&bits)
                };
                assert!(energy(true) > energy(false));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let inst = Instance::new(vec![2.0], vec![1.0], vec![1.5], vec![vec![3.0]]).unwrap();
        let pen = default_penalties(&inst, PenaltyMode::Paper);
        assert!(matches!(
            build_inner_qubo(&inst, &OpenConfig::all_open(1), &pen, SlackWidth::Full),
            Err(QuboError::NonIntegerDemand { customer: 0, .. })
        ));
        let inst = Instance::new(vec![2.0], vec![1.0], vec![1.0], vec![vec![3.0]]).unwrap();
        assert_eq!(
            build_inner_qubo(&inst, &OpenConfig::all_closed(1), &pen, SlackWidth::Full),
            Err(QuboError::NoOpenFacility)
        );
    }
}
