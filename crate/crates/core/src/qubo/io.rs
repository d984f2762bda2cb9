//! Plain-text QUBO exchange format.
//!
//! ```text
//! p qubo <nvars> <nterms> <offset>
//! <p> <q> <coeff>        # one line per term, p <= q
//! ```
//!
//! Numbers are written with 17 significant digits so a file read back
//! reproduces every coefficient bit for bit. The sidecar variable map has
//! one `<var> <role> <a> <b>` line per variable (`assign i j`,
//! `slack l j`, `facility - j`, `legit i j`; indices 0-based).

use std::fmt::Write as _;

use thiserror::Error;

use super::{Qubo, VarRole};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header declares {declared} terms, found {found}")]
    TermCount { declared: usize, found: usize },
    #[error("variable map has {found} entries, model has {expected} variables")]
    VarmapLength { expected: usize, found: usize },
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_qubo(q: &Qubo) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p qubo {} {} {}",
        q.nvars(),
        q.terms().len(),
        fmt_num(q.offset())
    );
    for (&(p, r), &w) in q.terms() {
        let _ = writeln!(out, "{p} {r} {}", fmt_num(w));
    }
    out
}

pub fn write_varmap(q: &Qubo) -> String {
    let mut out = String::new();
    for (p, role) in q.varmap().iter().enumerate() {
        let _ = writeln!(out, "{p} {role}");
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> QuboFormatError {
    QuboFormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, token: Option<&str>, what: &str) -> Result<T, QuboFormatError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("bad {what} {token:?}")))
}

/// Reads a model written by [`write_qubo`]. Blank lines and lines starting
/// with `#` or `c ` are ignored. An optional variable map is attached when
/// given.
pub fn read_qubo(text: &str, varmap: Option<Vec<VarRole>>) -> Result<Qubo, QuboFormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#') && !l.starts_with("c "));
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("p") || tok.next() != Some("qubo") {
        return Err(syntax(hline, "header must start with \"p qubo\""));
    }
    let nvars: usize = field(hline, tok.next(), "variable count")?;
    let nterms: usize = field(hline, tok.next(), "term count")?;
    let offset: f64 = field(hline, tok.next(), "offset")?;

    let mut terms = Vec::with_capacity(nterms);
    for (line, l) in lines {
        let mut tok = l.split_whitespace();
        let p: usize = field(line, tok.next(), "row index")?;
        let q: usize = field(line, tok.next(), "column index")?;
        let w: f64 = field(line, tok.next(), "coefficient")?;
        if p > q || q >= nvars {
            return Err(syntax(line, format!("term ({p}, {q}) outside upper triangle of {nvars} variables")));
        }
        terms.push(((p, q), w));
    }
    if terms.len() != nterms {
        return Err(QuboFormatError::TermCount {
            declared: nterms,
            found: terms.len(),
        });
    }
    let varmap = varmap.unwrap_or_default();
    if !varmap.is_empty() && varmap.len() != nvars {
        return Err(QuboFormatError::VarmapLength {
            expected: nvars,
            found: varmap.len(),
        });
    }
    Ok(Qubo::from_terms(nvars, terms, offset, varmap))
}

pub fn read_varmap(text: &str) -> Result<Vec<VarRole>, QuboFormatError> {
    let mut out = Vec::new();
    for (k, l) in text.lines().enumerate() {
        let line = k + 1;
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 4 {
            return Err(syntax(line, "expected `<var> <role> <a> <b>`"));
        }
        let var: usize = field(line, Some(tok[0]), "variable index")?;
        if var != out.len() {
            return Err(syntax(line, format!("variable {var} out of order")));
        }
        let b: usize = field(line, Some(tok[3]), "index")?;
        let role = match tok[1] {
            "assign" => VarRole::Assign {
                customer: field(line, Some(tok[2]), "customer")?,
                site: b,
            },
            "slack" => VarRole::Slack {
                bit: field(line, Some(tok[2]), "bit")?,
                site: b,
            },
            "facility" => VarRole::Facility { site: b },
            "legit" => VarRole::Legit {
                customer: field(line, Some(tok[2]), "customer")?,
                site: b,
            },
            other => return Err(syntax(line, format!("unknown role {other:?}"))),
        };
        out.push(role);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_term_lines() {
        let q = Qubo::from_terms(2, [((0, 0), -1.0), ((0, 1), 0.1)], 2.5, vec![]);
        let text = write_qubo(&q);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("p qubo 2 2 2.5000000000000000e0"));
        assert_eq!(lines.next(), Some("0 0 -1.0000000000000000e0"));
        assert_eq!(lines.next(), Some("0 1 1.0000000000000001e-1"));
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_qubo("q qubo 1 0 0", None).is_err());
        assert!(read_qubo("p qubo 1 1 0\n1 0 2.0\n", None).is_err());
        assert!(matches!(
            read_qubo("p qubo 2 2 0\n0 1 2.0\n", None),
            Err(QuboFormatError::TermCount { declared: 2, found: 1 })
        ));
        assert!(read_varmap("0 weird 1 2\n").is_err());
        assert!(read_varmap("1 assign 0 0\n").is_err());
    }

    #[test]
    fn varmap_round_trip() {
        let roles = vec![
            VarRole::Facility { site: 3 },
            VarRole::Assign { customer: 1, site: 3 },
            VarRole::Slack { bit: 2, site: 3 },
            VarRole::Legit { customer: 1, site: 3 },
        ];
        let q = Qubo::from_terms(4, [((0, 3), 1.0)], 0.0, roles.clone());
        assert_eq!(read_varmap(&write_varmap(&q)).unwrap(), roles);
    }
}
