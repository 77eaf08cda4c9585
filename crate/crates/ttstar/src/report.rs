//! Machine-readable run reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use ttstar_core::VerificationReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckFile {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub pass: bool,
    pub seed: u64,
    pub fd_step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub spec: String,
    pub points: Vec<Vec<[f64; 2]>>,
    pub checks: Vec<CheckFile>,
    pub summary: Summary,
}

impl ReportFile {
    /// `summary.pass` is the conjunction of the entries.
    pub fn new(spec: &str, points: &[Vec<Complex64>], report: &VerificationReport, seed: u64, fd_step: f64) -> Self {
        let checks: Vec<CheckFile> = report
            .entries
            .iter()
            .map(|e| CheckFile { name: e.name.clone(), residual: e.residual, tolerance: e.tolerance, pass: e.pass })
            .collect();
        let pass = checks.iter().all(|c| c.pass);
        Self {
            spec: spec.to_string(),
            points: points.iter().map(|p| p.iter().map(|z| [z.re, z.im]).collect()).collect(),
            checks,
            summary: Summary { pass, seed, fd_step },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}
