//! Benchmark bookkeeping: published reference values for the OR-Library
//! `cap` instances, gap computation, and the report/trace file formats.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hybrid::{SolveReport, TraceRow};
use crate::instance::{AssignmentMatrix, OpenConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceEntry {
    pub name: &'static str,
    pub m: usize,
    pub n: usize,
    /// Proven optimum.
    pub lindo_opt: f64,
    /// Published classical annealing result (single run).
    pub paper_sa: f64,
    /// Published hybrid annealing result.
    pub paper_qa: f64,
}

const fn entry(name: &'static str, m: usize, lindo_opt: f64, paper_sa: f64, paper_qa: f64) -> ReferenceEntry {
    ReferenceEntry {
        name,
        m,
        n: 50,
        lindo_opt,
        paper_sa,
        paper_qa,
    }
}

pub const REFERENCE: [ReferenceEntry; 12] = [
    entry("cap71", 16, 932615.7500, 1460909.750, 933172.1000),
    entry("cap72", 16, 977799.4000, 1395389.538, 977988.1000),
    entry("cap73", 16, 1010641.450, 1585875.550, 1010641.450),
    entry("cap74", 16, 1034976.975, 1390963.787, 1034976.975),
    entry("cap101", 25, 796648.4400, 1182235.563, 797656.2875),
    entry("cap102", 25, 854704.2000, 1282306.175, 854952.5125),
    entry("cap103", 25, 893782.1125, 1395701.200, 894872.1125),
    entry("cap104", 25, 928941.7500, 1458550.450, 928941.7500),
    entry("cap131", 50, 793439.5620, 1167543.950, 796066.6500),
    entry("cap132", 50, 851495.3250, 1132436.300, 852291.9375),
    entry("cap133", 50, 893076.7120, 1126423.238, 893521.4125),
    entry("cap134", 50, 928941.7500, 1321380.713, 928941.7500),
];

pub fn reference(name: &str) -> Option<&'static ReferenceEntry> {
    REFERENCE.iter().find(|e| e.name == name)
}

/// Signed percentage gap to the known optimum, `None` for unknown names.
pub fn compare_reference(name: &str, best_cost: f64) -> Option<f64> {
    reference(name).map(|e| 100.0 * (best_cost - e.lindo_opt) / e.lindo_opt)
}

/// Parameters echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub mode: String,
    pub inner: String,
    pub penalty: String,
    pub t0: f64,
    pub t_end: f64,
    pub alpha: f64,
    pub iters_per_step: usize,
    pub restarts: usize,
    pub sub_size: usize,
    pub chains: usize,
    pub t0_auto: bool,
    pub paper_slack_width: bool,
    pub capacity_guard: bool,
}

/// One solved instance; the JSON written by `solve` and `baseline`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub m: usize,
    pub n: usize,
    /// `null` when no feasible solution was found.
    pub best_cost: Option<f64>,
    pub gap_pct: Option<f64>,
    pub seed: u64,
    pub params: RunParams,
    pub runtime_s: f64,
    pub trace_path: Option<String>,
}

impl BenchRecord {
    pub fn new(
        instance: &str,
        m: usize,
        n: usize,
        report: &SolveReport,
        params: RunParams,
        trace_path: Option<String>,
    ) -> Self {
        let best = report.best_cost.is_finite().then_some(report.best_cost);
        Self {
            instance: instance.to_string(),
            m,
            n,
            best_cost: best,
            gap_pct: best.and_then(|c| compare_reference(instance, c)),
            seed: report.seed,
            params,
            runtime_s: report.wall_time_s,
            trace_path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub mean_gap_pct: Option<f64>,
    pub max_gap_pct: Option<f64>,
}

impl BenchReport {
    pub fn new(records: Vec<BenchRecord>) -> Self {
        let gaps: Vec<f64> = records.iter().filter_map(|r| r.gap_pct).collect();
        let (mean, max) = if gaps.is_empty() {
            (None, None)
        } else {
            (
                Some(gaps.iter().sum::<f64>() / gaps.len() as f64),
                Some(gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            )
        };
        Self {
            records,
            mean_gap_pct: mean,
            max_gap_pct: max,
        }
    }

    /// Text table, one row per instance.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>16} {:>16} {:>9} {:>9}",
            "instance", "size", "best_cost", "reference", "gap_pct", "time_s"
        );
        for r in &self.records {
            let best = r.best_cost.map_or("infeasible".to_string(), |c| format!("{c:.4}"));
            let reference = reference(&r.instance).map_or("n/a".to_string(), |e| format!("{:.4}", e.lindo_opt));
            let gap = r.gap_pct.map_or("n/a".to_string(), |g| format!("{g:.4}"));
            let _ = writeln!(
                out,
                "{:<10} {:>7} {:>16} {:>16} {:>9} {:>9.2}",
                r.instance,
                format!("{}x{}", r.m, r.n),
                best,
                reference,
                gap,
                r.runtime_s
            );
        }
        if let (Some(mean), Some(max)) = (self.mean_gap_pct, self.max_gap_pct) {
            let _ = writeln!(out, "mean gap {mean:.4}%  max gap {max:.4}%");
        }
        out
    }
}

fn fmt_cost(c: f64) -> String {
    if c.is_finite() {
        c.to_string()
    } else {
        "inf".to_string()
    }
}

pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("iter,temp,current_cost,best_cost\n");
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.iter,
            r.temp,
            fmt_cost(r.current_cost),
            fmt_cost(r.best_cost)
        );
    }
    out
}

fn bits_line(bits: &[bool], sep: &str) -> String {
    bits.iter().map(|&b| if b { "1" } else { "0" }).collect::<Vec<_>>().join(sep)
}

/// One row of comma-separated site bits per cooling step.
pub fn config_history_csv(history: &[OpenConfig]) -> String {
    history.iter().map(|c| bits_line(c.bits(), ",") + "\n").collect()
}

/// `n` rows of `m` comma-separated bits.
pub fn assignment_csv(y: &AssignmentMatrix) -> String {
    y.iter().map(|row| bits_line(row, ",") + "\n").collect()
}

/// First line the `m` site bits, then `n` lines of `m` assignment bits.
pub fn solution_file(open: &OpenConfig, y: &AssignmentMatrix) -> String {
    let mut out = bits_line(open.bits(), " ") + "\n";
    for row in y {
        out += &bits_line(row, " ");
        out.push('\n');
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("solution file line {line}: {message}")]
pub struct SolutionFormatError {
    pub line: usize,
    pub message: String,
}

pub fn parse_solution(text: &str) -> Result<(OpenConfig, AssignmentMatrix), SolutionFormatError> {
    let mut rows = Vec::new();
    for (k, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = l
            .split_whitespace()
            .map(|t| match t {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(SolutionFormatError {
                    line: k + 1,
                    message: format!("expected 0 or 1, found {other:?}"),
                }),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        rows.push(row);
    }
    let mut it = rows.into_iter();
    let open = it.next().ok_or(SolutionFormatError {
        line: 1,
        message: "empty solution".into(),
    })?;
    let y: AssignmentMatrix = it.collect();
    if let Some(k) = y.iter().position(|r| r.len() != open.len()) {
        return Err(SolutionFormatError {
            line: k + 2,
            message: format!("expected {} bits", open.len()),
        });
    }
    Ok((OpenConfig::new(open), y))
}
