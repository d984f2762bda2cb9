//! Problem data for the capacitated facility location problem, plus the
//! OR-Library `cap` text format, cost evaluation and feasibility checks.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("instance needs at least one site and one customer (got m={sites}, n={customers})")]
    Empty { sites: usize, customers: usize },
    #[error("{what} has length {found}, expected {expected}")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what}[{index}] = {value} is out of range")]
    OutOfRange {
        what: &'static str,
        index: usize,
        value: f64,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("token {position}: expected a number, found {token:?}")]
    NonNumeric { position: usize, token: String },
    #[error("token {position}: {what} must be a positive count, found {token:?}")]
    BadDimension {
        position: usize,
        what: &'static str,
        token: String,
    },
    #[error("expected {expected} tokens for a {sites}x{customers} instance, found {found}")]
    TokenCount {
        sites: usize,
        customers: usize,
        expected: usize,
        found: usize,
    },
    #[error("token {position}: {what} must be positive, found {value}")]
    NonPositive {
        position: usize,
        what: &'static str,
        value: f64,
    },
    #[error("token {position}: {what} must be non-negative, found {value}")]
    Negative {
        position: usize,
        what: &'static str,
        value: f64,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimensionError {
    #[error("open configuration has {found} sites, instance has {expected}")]
    Sites { expected: usize, found: usize },
    #[error("assignment matrix is {rows}x{cols}, instance is {customers}x{sites}")]
    Matrix {
        customers: usize,
        sites: usize,
        rows: usize,
        cols: usize,
    },
}

/// Immutable problem data.
///
/// Sites are indexed `0..m`, customers `0..n`. `cost(i, j)` is the cost of
/// serving the whole demand of customer `i` from site `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    name: Option<String>,
    capacity: Vec<f64>,
    fixed_cost: Vec<f64>,
    demand: Vec<f64>,
    /// Row-major `n x m`.
    cost: Vec<f64>,
}

impl Instance {
    pub fn new(
        capacity: Vec<f64>,
        fixed_cost: Vec<f64>,
        demand: Vec<f64>,
        cost: Vec<Vec<f64>>,
    ) -> Result<Self, InstanceError> {
        let m = capacity.len();
        let n = demand.len();
        if m == 0 || n == 0 {
            return Err(InstanceError::Empty {
                sites: m,
                customers: n,
            });
        }
        if fixed_cost.len() != m {
            return Err(InstanceError::Length {
                what: "fixed_cost",
                expected: m,
                found: fixed_cost.len(),
            });
        }
        if cost.len() != n {
            return Err(InstanceError::Length {
                what: "cost rows",
                expected: n,
                found: cost.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * m);
        for row in cost {
            if row.len() != m {
                return Err(InstanceError::Length {
                    what: "cost row",
                    expected: m,
                    found: row.len(),
                });
            }
            flat.extend(row);
        }
        check_all("capacity", &capacity, |v| v > 0.0)?;
        check_all("demand", &demand, |v| v > 0.0)?;
        check_all("fixed_cost", &fixed_cost, |v| v >= 0.0)?;
        check_all("cost", &flat, |v| v >= 0.0)?;
        Ok(Self {
            name: None,
            capacity,
            fixed_cost,
            demand,
            cost: flat,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Number of candidate sites `m`.
    pub fn sites(&self) -> usize {
        self.capacity.len()
    }

    /// Number of customers `n`.
    pub fn customers(&self) -> usize {
        self.demand.len()
    }

    pub fn capacity(&self) -> &[f64] {
        &self.capacity
    }

    pub fn fixed_cost(&self) -> &[f64] {
        &self.fixed_cost
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    #[inline]
    pub fn cost(&self, customer: usize, site: usize) -> f64 {
        self.cost[customer * self.sites() + site]
    }

    pub fn cost_row(&self, customer: usize) -> &[f64] {
        let m = self.sites();
        &self.cost[customer * m..(customer + 1) * m]
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.capacity.iter().sum()
    }

    /// Capacity available from the open sites of `open`.
    pub fn open_capacity(&self, open: &OpenConfig) -> f64 {
        open.open_sites().map(|j| self.capacity[j]).sum()
    }

    /// `false` when even opening every site cannot cover the total demand.
    pub fn is_globally_feasible(&self) -> bool {
        self.total_capacity() >= self.total_demand()
    }

    /// Same instance with every monetary value multiplied by `factor`.
    pub fn scale_costs(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.fixed_cost.iter_mut().for_each(|f| *f *= factor);
        out.cost.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// Renders the instance in OR-Library `cap` format.
    pub fn to_orlib(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.sites(), self.customers());
        for j in 0..self.sites() {
            let _ = writeln!(out, "{} {}", self.capacity[j], self.fixed_cost[j]);
        }
        for i in 0..self.customers() {
            let _ = writeln!(out, "{}", self.demand[i]);
            let row: Vec<String> = self.cost_row(i).iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

fn check_all(what: &'static str, values: &[f64], ok: impl Fn(f64) -> bool) -> Result<(), InstanceError> {
    match values.iter().position(|&v| !v.is_finite() || !ok(v)) {
        Some(index) => Err(InstanceError::OutOfRange {
            what,
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Parses an OR-Library capacitated warehouse location file.
///
/// Layout: `m n`, then `m` pairs `capacity fixed_cost`, then for every
/// customer its demand followed by `m` allocation costs. Token positions in
/// errors are 1-based.
pub fn parse_orlib(text: &str) -> Result<Instance, ParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let dim = |position: usize, what: &'static str| -> Result<usize, ParseError> {
        let token = tokens.get(position - 1).copied().unwrap_or("<eof>");
        match token.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(ParseError::BadDimension {
                position,
                what,
                token: token.to_string(),
            }),
        }
    };
    let m = dim(1, "site count")?;
    let n = dim(2, "customer count")?;

    let expected = 2 + 2 * m + n * (1 + m);
    if tokens.len() != expected {
        return Err(ParseError::TokenCount {
            sites: m,
            customers: n,
            expected,
            found: tokens.len(),
        });
    }

    let number = |position: usize| -> Result<f64, ParseError> {
        let token = tokens[position - 1];
        token
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ParseError::NonNumeric {
                position,
                token: token.to_string(),
            })
    };
    let positive = |position: usize, what: &'static str| -> Result<f64, ParseError> {
        let value = number(position)?;
        if value > 0.0 {
            Ok(value)
        } else {
            Err(ParseError::NonPositive {
                position,
                what,
                value,
            })
        }
    };
    let non_negative = |position: usize, what: &'static str| -> Result<f64, ParseError> {
        let value = number(position)?;
        if value >= 0.0 {
            Ok(value)
        } else {
            Err(ParseError::Negative {
                position,
                what,
                value,
            })
        }
    };

    let mut pos = 3;
    let mut capacity = Vec::with_capacity(m);
    let mut fixed_cost = Vec::with_capacity(m);
    for _ in 0..m {
        capacity.push(positive(pos, "capacity")?);
        fixed_cost.push(non_negative(pos + 1, "fixed cost")?);
        pos += 2;
    }
    let mut demand = Vec::with_capacity(n);
    let mut cost = Vec::with_capacity(n);
    for _ in 0..n {
        demand.push(positive(pos, "demand")?);
        pos += 1;
        let mut row = Vec::with_capacity(m);
        for _ in 0..m {
            row.push(non_negative(pos, "allocation cost")?);
            pos += 1;
        }
        cost.push(row);
    }
    Ok(Instance::new(capacity, fixed_cost, demand, cost)
        .expect("values validated during parsing"))
}

/// Which sites have a facility built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpenConfig(Vec<bool>);

impl OpenConfig {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn all_open(m: usize) -> Self {
        Self(vec![true; m])
    }

    pub fn all_closed(m: usize) -> Self {
        Self(vec![false; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_open(&self, site: usize) -> bool {
        self.0[site]
    }

    pub fn set(&mut self, site: usize, open: bool) {
        self.0[site] = open;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn open_sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j)
    }

    pub fn open_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &OpenConfig) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for OpenConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Binary `n x m` matrix `y[i][j]`.
pub type AssignmentMatrix = Vec<Vec<bool>>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    /// Customer served by `assigned` sites instead of exactly one.
    OneHot { customer: usize, assigned: usize },
    /// Site load exceeds its capacity.
    Capacity { site: usize, load: f64, capacity: f64 },
    /// Customer assigned to a closed site.
    Legitimacy { customer: usize, site: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub y: AssignmentMatrix,
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl Assignment {
    /// Site serving each customer, if the row is one-hot.
    pub fn site_of(&self, customer: usize) -> Option<usize> {
        let row = &self.y[customer];
        let mut it = row.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j);
        match (it.next(), it.next()) {
            (Some(j), None) => Some(j),
            _ => None,
        }
    }

    pub fn transport_cost(&self, inst: &Instance) -> f64 {
        transport_cost(inst, &self.y)
    }
}

fn check_dims(inst: &Instance, open: &OpenConfig, y: &AssignmentMatrix) -> Result<(), DimensionError> {
    let (m, n) = (inst.sites(), inst.customers());
    if open.len() != m {
        return Err(DimensionError::Sites {
            expected: m,
            found: open.len(),
        });
    }
    let bad_row = y.iter().find(|row| row.len() != m);
    if y.len() != n || bad_row.is_some() {
        return Err(DimensionError::Matrix {
            customers: n,
            sites: m,
            rows: y.len(),
            cols: bad_row.map_or(m, |r| r.len()),
        });
    }
    Ok(())
}

fn transport_cost(inst: &Instance, y: &AssignmentMatrix) -> f64 {
    let mut total = 0.0;
    for (i, row) in y.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b {
                total += inst.cost(i, j);
            }
        }
    }
    total
}

/// Fixed plus transport cost of `(open, y)`. Feasibility is not checked.
pub fn total_cost(inst: &Instance, open: &OpenConfig, y: &AssignmentMatrix) -> Result<f64, DimensionError> {
    check_dims(inst, open, y)?;
    let fixed: f64 = open.open_sites().map(|j| inst.fixed_cost[j]).sum();
    Ok(fixed + transport_cost(inst, y))
}

/// Lists every violated constraint of `y` against `open`.
///
/// Capacity is enforced as `load <= capacity`.
pub fn check_feasibility(
    inst: &Instance,
    open: &OpenConfig,
    y: AssignmentMatrix,
) -> Result<Assignment, DimensionError> {
    check_dims(inst, open, &y)?;
    let mut violations = Vec::new();
    let mut load = vec![0.0; inst.sites()];
    for (i, row) in y.iter().enumerate() {
        let assigned = row.iter().filter(|&&b| b).count();
        if assigned != 1 {
            violations.push(Violation::OneHot { customer: i, assigned });
        }
        for (j, &b) in row.iter().enumerate() {
            if b {
                load[j] += inst.demand[i];
            }
        }
    }
    for (j, &l) in load.iter().enumerate() {
        if l > inst.capacity[j] {
            violations.push(Violation::Capacity {
                site: j,
                load: l,
                capacity: inst.capacity[j],
            });
        }
    }
    for (i, row) in y.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b && !open.is_open(j) {
                violations.push(Violation::Legitimacy { customer: i, site: j });
            }
        }
    }
    Ok(Assignment {
        feasible: violations.is_empty(),
        y,
        violations,
    })
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no facility is open")]
pub struct NoOpenFacility;

/// Largest-demand-first assignment to the cheapest open site that still has
/// room. Customers that fit nowhere are left unserved and the result is
/// flagged infeasible.
pub fn greedy_assign(inst: &Instance, open: &OpenConfig) -> Result<Assignment, NoOpenFacility> {
    assert_eq!(open.len(), inst.sites(), "open configuration length");
    let sites: Vec<usize> = open.open_sites().collect();
    if sites.is_empty() {
        return Err(NoOpenFacility);
    }
    let mut order: Vec<usize> = (0..inst.customers()).collect();
    // stable: ties keep file order
    order.sort_by(|&a, &b| inst.demand[b].total_cmp(&inst.demand[a]));

    let mut remaining = inst.capacity.clone();
    let mut y = vec![vec![false; inst.sites()]; inst.customers()];
    for i in order {
        let best = sites
            .iter()
            .copied()
            .filter(|&j| remaining[j] >= inst.demand[i])
            .min_by(|&a, &b| inst.cost(i, a).total_cmp(&inst.cost(i, b)));
        if let Some(j) = best {
            remaining[j] -= inst.demand[i];
            y[i][j] = true;
        }
    }
    Ok(check_feasibility(inst, open, y).expect("dimensions built from instance"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one() -> Instance {
        parse_orlib("1 1\n10 5\n3 7\n").unwrap()
    }

    #[test]
    fn parses_minimal_file() {
        let inst = one_by_one();
        assert_eq!(inst.sites(), 1);
        assert_eq!(inst.customers(), 1);
        assert_eq!(inst.capacity(), &[10.0]);
        assert_eq!(inst.fixed_cost(), &[5.0]);
        assert_eq!(inst.demand(), &[3.0]);
        assert_eq!(inst.cost(0, 0), 7.0);
    }

    #[test]
    fn parses_decimals() {
        let inst = parse_orlib("2 1\n5000 7500.\n5000 7500.0\n146\n 6739.725 10355.05\n").unwrap();
        assert_eq!(inst.fixed_cost(), &[7500.0, 7500.0]);
        assert_eq!(inst.cost_row(0), &[6739.725, 10355.05]);
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_orlib("1 1\n10 5\n3\n"),
            Err(ParseError::TokenCount {
                sites: 1,
                customers: 1,
                expected: 6,
                found: 5
            })
        );
        assert!(matches!(
            parse_orlib("1 1\n10 x\n3 7\n"),
            Err(ParseError::NonNumeric { position: 4, .. })
        ));
        assert!(matches!(
            parse_orlib("1 1\n0 5\n3 7\n"),
            Err(ParseError::NonPositive { position: 3, what: "capacity", .. })
        ));
        assert!(matches!(
            parse_orlib("1 1\n10 5\n-3 7\n"),
            Err(ParseError::NonPositive { position: 5, what: "demand", .. })
        ));
        assert!(matches!(
            parse_orlib("0 1\n"),
            Err(ParseError::BadDimension { position: 1, .. })
        ));
        assert!(matches!(parse_orlib(""), Err(ParseError::BadDimension { .. })));
    }

    #[test]
    fn serialize_round_trip() {
        let inst = parse_orlib("2 2\n10 5.5\n4 0\n3 7 1.25\n1 0 9\n").unwrap();
        assert_eq!(parse_orlib(&inst.to_orlib()).unwrap(), inst);
    }

    #[test]
    fn total_cost_examples() {
        let inst = one_by_one();
        let none = total_cost(&inst, &OpenConfig::all_closed(1), &vec![vec![false]]).unwrap();
        assert_eq!(none, 0.0);
        let full = total_cost(&inst, &OpenConfig::all_open(1), &vec![vec![true]]).unwrap();
        assert_eq!(full, 12.0);
        assert!(total_cost(&inst, &OpenConfig::all_open(2), &vec![vec![true]]).is_err());
        assert!(total_cost(&inst, &OpenConfig::all_open(1), &vec![vec![true, false]]).is_err());
    }

    #[test]
    fn violations() {
        let inst = one_by_one();
        let a = check_feasibility(&inst, &OpenConfig::all_open(1), vec![vec![false]]).unwrap();
        assert_eq!(a.violations, vec![Violation::OneHot { customer: 0, assigned: 0 }]);
        assert!(!a.feasible);

        let tight = Instance::new(vec![2.0], vec![0.0], vec![3.0], vec![vec![1.0]]).unwrap();
        let a = check_feasibility(&tight, &OpenConfig::all_open(1), vec![vec![true]]).unwrap();
        assert!(matches!(a.violations[..], [Violation::Capacity { site: 0, .. }]));

        let a = check_feasibility(&inst, &OpenConfig::all_closed(1), vec![vec![true]]).unwrap();
        assert_eq!(a.violations, vec![Violation::Legitimacy { customer: 0, site: 0 }]);
    }

    #[test]
    fn capacity_is_inclusive() {
        let exact = Instance::new(vec![3.0], vec![0.0], vec![3.0], vec![vec![1.0]]).unwrap();
        let a = check_feasibility(&exact, &OpenConfig::all_open(1), vec![vec![true]]).unwrap();
        assert!(a.feasible);
    }

    #[test]
    fn greedy_single_site_takes_everyone() {
        let inst = Instance::new(
            vec![10.0, 10.0],
            vec![1.0, 1.0],
            vec![2.0, 3.0, 4.0],
            vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap();
        let open = OpenConfig::new(vec![true, false]);
        let a = greedy_assign(&inst, &open).unwrap();
        assert!(a.feasible);
        assert!(a.y.iter().all(|row| row == &[true, false]));
    }

    #[test]
    fn greedy_flags_pigeonhole() {
        let inst = Instance::new(vec![2.0, 2.0], vec![0.0, 0.0], vec![2.0, 2.0], vec![vec![1.0, 1.0]; 2]).unwrap();
        let a = greedy_assign(&inst, &OpenConfig::new(vec![true, false])).unwrap();
        assert!(!a.feasible);
        assert_eq!(greedy_assign(&inst, &OpenConfig::all_closed(2)), Err(NoOpenFacility));
    }

    #[test]
    fn global_feasibility_flag() {
        let inst = Instance::new(vec![1.0], vec![0.0], vec![2.0], vec![vec![1.0]]).unwrap();
        assert!(!inst.is_globally_feasible());
        assert!(one_by_one().is_globally_feasible());
    }
}
