use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use plap_core::report::fmt_f64;
use serde::Serialize;

/// One acceptance check: passes iff `|measured - target| ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub target: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, target: f64, measured: f64, tolerance: f64) -> Self {
        let pass = (measured - target).abs() <= tolerance;
        Self {
            name: name.into(),
            target,
            measured,
            tolerance,
            pass,
        }
    }

    /// A count of violations, which must be zero.
    pub fn count(name: impl Into<String>, violations: usize) -> Self {
        Self::new(name, 0.0, violations as f64, 0.0)
    }

    /// The criterion label, `c7` for `c7.rate_outer`.
    pub fn criterion(&self) -> &str {
        self.name.split('.').next().unwrap_or(&self.name)
    }
}

/// A file produced by a campaign step, held in memory until the run finishes.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            name: name.into(),
            bytes,
        }
    }

    /// Builds a CSV from `#` comment lines, a header, and pre-formatted rows.
    pub fn csv(name: impl Into<String>, comments: &[String], header: &str, rows: &[Vec<f64>]) -> Self {
        let mut text = String::new();
        for c in comments {
            let _ = writeln!(text, "# {c}");
        }
        text.push_str(header);
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        Self::new(name, text.into_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepTiming {
    pub step: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub campaign: String,
    pub seed: u64,
    pub parallel: bool,
    pub rows: Vec<CheckRow>,
    pub timings: Vec<StepTiming>,
    pub artifacts: Vec<String>,
}

impl ExperimentReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn seconds(&self, step: &str) -> Option<f64> {
        self.timings.iter().find(|t| t.step == step).map(|t| t.seconds)
    }

    /// `checks.csv`: one line per row, no timings, so reruns are byte-identical.
    pub fn checks_csv(&self) -> String {
        let mut text = String::new();
        let _ = writeln!(text, "# campaign={} seed={}", self.campaign, self.seed);
        text.push_str("name,target,measured,tolerance,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                r.name,
                fmt_f64(r.target),
                fmt_f64(r.measured),
                fmt_f64(r.tolerance),
                r.pass
            );
        }
        text
    }

    /// Human-readable table for the terminal.
    pub fn summary_text(&self) -> String {
        let mut text = String::new();
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(4);
        for r in &self.rows {
            let _ = writeln!(
                text,
                "{:<4} {:<width$}  measured {:>24}  target {:>24}  tol {:.1e}",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                fmt_f64(r.measured),
                fmt_f64(r.target),
                r.tolerance,
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(text, "{} checks, {} failed", self.rows.len(), failed);
        text
    }

    pub fn write_summary(&self, dir: &Path) -> io::Result<()> {
        fs::write(dir.join("checks.csv"), self.checks_csv())?;
        let json = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join("summary.json"), json + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule() {
        assert!(CheckRow::new("c1.x", 1.0, 1.0 + 5e-4, 1e-3).pass);
        assert!(!CheckRow::new("c1.x", 1.0, 1.1, 1e-3).pass);
        assert!(!CheckRow::new("c1.x", 0.0, f64::NAN, 1.0).pass);
        assert!(CheckRow::count("c3.v", 0).pass);
        assert!(!CheckRow::count("c3.v", 2).pass);
        assert_eq!(CheckRow::count("c3.v", 2).criterion(), "c3");
    }

    #[test]
    fn csv_layout() {
        let a = Artifact::csv("t.csv", &["k=1".into()], "a,b", &[vec![1.0, 0.5]]);
        assert_eq!(
            String::from_utf8(a.bytes).unwrap(),
            "# k=1\na,b\n1.0000000000000000e0,5.0000000000000000e-1\n"
        );
    }
}
