//! Tabular verification reports shared by the verifiers and the CLI.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Per-point rows plus named summary values and a verdict.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub passed: bool,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub violation: Option<String>,
}

/// Shortest round-trip decimal form, switching to exponent notation for
/// very small or very large magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl VerificationReport {
    pub fn new(suite: &str, columns: &[&str]) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            passed: false,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
            notes: Vec::new(),
            violation: None,
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn column_index(&self, name: &str) -> usize {
        self.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let i = self.column_index(name);
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// Maximum of a column; NaN entries propagate as NaN.
    pub fn column_max(&self, name: &str) -> f64 {
        self.column(name).into_iter().fold(f64::NEG_INFINITY, |m, v| {
            if v.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(v)
            }
        })
    }

    pub fn column_min(&self, name: &str) -> f64 {
        self.column(name)
            .into_iter()
            .fold(f64::INFINITY, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.min(v) })
    }

    pub fn add_summary(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), value));
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn set_passed(&mut self, passed: bool) {
        self.passed = passed;
    }

    /// Marks the report failed; the first violation is kept.
    pub fn fail(&mut self, violation: impl Into<String>) {
        self.passed = false;
        if self.violation.is_none() {
            self.violation = Some(violation.into());
        }
    }

    /// CSV rows followed by `#`-prefixed summary lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        writeln!(out, "# suite,{}", self.suite)?;
        for (k, v) in &self.summary {
            writeln!(out, "# {k},{}", fmt_num(*v))?;
        }
        for n in &self.notes {
            writeln!(out, "# note,{n}")?;
        }
        if let Some(v) = &self.violation {
            writeln!(out, "# violation,{v}")?;
        }
        writeln!(out, "# result,{}", if self.passed { "pass" } else { "fail" })?;
        Ok(())
    }

    /// One-line verdict with the summary values.
    pub fn verdict_line(&self) -> String {
        let mut s = format!("{} {}", if self.passed { "PASS" } else { "FAIL" }, self.suite);
        for (k, v) in &self.summary {
            s.push_str(&format!(" {k}={}", fmt_num(*v)));
        }
        if let Some(v) = &self.violation {
            s.push_str(&format!(" ({v})"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = VerificationReport::new("demo", &["a", "b"]);
        r.push_row(vec![1.0, 1e-300]);
        r.add_summary("max", 2.5);
        r.set_passed(true);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("a,b\n1,1e-300\n# suite,demo\n# max,2.5\n"));
        assert!(text.ends_with("# result,pass\n"));
        assert_eq!(r.column_max("b"), 1e-300);
    }
}
