//! Report types shared by the JSON and text renderers.
//!
//! Every float is rounded to 12 significant digits before it is stored, so
//! both renderers print the same numbers.

use qmc_core::linalg::ComplexMatrix;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Rounds to 12 significant digits.
pub fn sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Text form of a number with at most 12 significant digits.
pub fn num(x: f64) -> String {
    let r = sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-4..1e12).contains(&a) || !a.is_finite() {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// A complex matrix as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let part = |f: fn(&qmc_core::linalg::C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| sig(f(&m[(i, j)]))).collect())
                .collect()
        };
        Self {
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }
}

/// Entries below this magnitude print as `0` in text output.
const TEXT_CHOP: f64 = 1e-14;

fn entry(re: f64, im: f64) -> String {
    let chop = |x: f64| if x.abs() < TEXT_CHOP { 0.0 } else { x };
    let (re, im) = (chop(re), chop(im));
    match (re == 0.0, im == 0.0) {
        (_, true) => num(re),
        (true, false) => format!("{}i", num(im)),
        (false, false) if im < 0.0 => format!("{}-{}i", num(re), num(-im)),
        (false, false) => format!("{}+{}i", num(re), num(im)),
    }
}

impl MatrixJson {
    /// Rows on separate lines, each prefixed by `indent`.
    pub fn render(&self, indent: &str) -> String {
        let rows: Vec<Vec<String>> = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| entry(a, b)).collect())
            .collect();
        let width = rows.iter().flatten().map(String::len).max().unwrap_or(0);
        let mut out = String::new();
        for (k, row) in rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            let open = if k == 0 { "[" } else { " " };
            let close = if k + 1 == rows.len() { "]" } else { "," };
            let _ = writeln!(out, "{indent}{open}[{}]{close}", cells.join(", "));
        }
        out
    }

    /// Single-line form for tables.
    pub fn inline(&self) -> String {
        let rows: Vec<String> = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| {
                let cells: Vec<String> = r.iter().zip(i).map(|(&a, &b)| entry(a, b)).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Tolerance of the `≲` and `≂` comparisons.
    pub eps: f64,
    /// Tolerance of the row-sum check when the model was loaded.
    pub stochastic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowJson {
    pub state: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub command: String,
    pub model: String,
    pub valid: bool,
    pub dimension: usize,
    pub states: usize,
    pub tolerance: f64,
    pub rows: Vec<RowJson>,
    pub violations: Vec<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVerdictJson {
    pub state: String,
    pub verdict: bool,
    /// Some threshold decided at this state was within `eps` of its boundary.
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubformulaJson {
    pub formula: String,
    pub satisfying: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceStateJson {
    pub state: String,
    pub holds: bool,
    pub marginal: bool,
    pub gap: f64,
    pub trace_operator: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceJson {
    pub formula: String,
    pub path: String,
    pub direction: String,
    pub bound: MatrixJson,
    pub method: Option<String>,
    pub states: Vec<EvidenceStateJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub command: String,
    pub model: String,
    pub formula: String,
    pub state: Option<String>,
    pub holds: Option<bool>,
    pub marginal: Option<bool>,
    pub satisfying: Vec<String>,
    pub verdicts: Vec<StateVerdictJson>,
    pub subformulas: Vec<SubformulaJson>,
    pub evidence: Vec<EvidenceJson>,
    pub tolerances: Tolerances,
    pub method: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub command: String,
    pub model: String,
    pub path_formula: String,
    pub state: String,
    pub method: Option<String>,
    pub tolerances: Tolerances,
    pub trace_operator: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_rep: Option<MatrixJson>,
    /// `Q ≂ I` within `eps`.
    pub equivalent_to_identity: bool,
    /// `Q ≂ 0` within `eps`.
    pub equivalent_to_zero: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub command: String,
    pub model: String,
    pub path_formula: String,
    pub state: String,
    pub rho: String,
    pub samples: u64,
    pub seed: u64,
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seconds: f64,
}

fn names(set: &[String]) -> String {
    format!("{{{}}}", set.join(", "))
}

impl ValidateReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model      {}", self.model);
        let _ = writeln!(out, "dimension  {}", self.dimension);
        let _ = writeln!(out, "states     {}", self.states);
        let _ = writeln!(out, "tolerance  {}", num(self.tolerance));
        for v in &self.violations {
            let _ = writeln!(out, "violation  {v}");
        }
        let _ = writeln!(out, "valid      {}", self.valid);
        out
    }
}

impl CheckReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model      {}", self.model);
        let _ = writeln!(out, "formula    {}", self.formula);
        let _ = writeln!(out, "method     {}", self.method);
        let _ = writeln!(out, "eps        {}", num(self.tolerances.eps));
        let width = self.verdicts.iter().map(|v| v.state.len()).max().unwrap_or(0);
        for ev in &self.evidence {
            let _ = writeln!(out);
            let method = ev.method.as_deref().map(|m| format!(" ({m})")).unwrap_or_default();
            let _ = writeln!(out, "{}{method}", ev.formula);
            let _ = writeln!(out, "  bound {}", ev.bound.inline());
            for s in &ev.states {
                let flag = if s.marginal { " marginal" } else { "" };
                let _ = writeln!(
                    out,
                    "  {:<width$}  {:<5}  gap {:<18}  {}{flag}",
                    s.state,
                    s.holds,
                    num(s.gap),
                    s.trace_operator.inline()
                );
            }
        }
        let _ = writeln!(out);
        for v in &self.verdicts {
            let flag = if v.marginal { " marginal" } else { "" };
            let _ = writeln!(out, "verdict    {:<width$}  {}{flag}", v.state, v.verdict);
        }
        let _ = writeln!(out, "sat        {}", names(&self.satisfying));
        if let (Some(state), Some(holds)) = (&self.state, self.holds) {
            let _ = writeln!(out, "holds      {state}: {holds}");
        }
        let _ = writeln!(out, "time       {} s", num(self.seconds));
        out
    }
}

impl ComputeReport {
    pub fn text(&self, show_matrix: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model      {}", self.model);
        let _ = writeln!(out, "formula    {}", self.path_formula);
        let _ = writeln!(out, "state      {}", self.state);
        if let Some(m) = &self.method {
            let _ = writeln!(out, "method     {m}");
        }
        match (&self.matrix_rep, show_matrix) {
            (Some(rep), true) => {
                let _ = writeln!(out, "matrix representation");
                out.push_str(&rep.render("  "));
            }
            _ => {
                let _ = writeln!(out, "trace operator");
                out.push_str(&self.trace_operator.render("  "));
            }
        }
        let _ = writeln!(out, "equivalent to I  {}", self.equivalent_to_identity);
        let _ = writeln!(out, "equivalent to 0  {}", self.equivalent_to_zero);
        let _ = writeln!(out, "time       {} s", num(self.seconds));
        out
    }
}

impl SimulateReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model      {}", self.model);
        let _ = writeln!(out, "formula    {}", self.path_formula);
        let _ = writeln!(out, "state      {}", self.state);
        let _ = writeln!(out, "rho        {}", self.rho);
        let _ = writeln!(out, "samples    {}", self.samples);
        let _ = writeln!(out, "seed       {}", self.seed);
        let _ = writeln!(out, "estimate   {}", num(self.estimate));
        let _ = writeln!(out, "stderr     {}", num(self.stderr));
        let _ = writeln!(out, "time       {} s", num(self.seconds));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(2.0 / 3.0 * 1e-9), "6.66666666667e-10");
        assert_eq!(num(123456789012345.0), "1.23456789012e14");
    }

    #[test]
    fn entries() {
        assert_eq!(entry(0.25, 0.0), "0.25");
        assert_eq!(entry(0.0, -1.0), "-1i");
        assert_eq!(entry(0.5, -0.5), "0.5-0.5i");
        assert_eq!(entry(1e-17, 0.0), "0");
    }
}
