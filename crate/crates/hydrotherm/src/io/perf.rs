//! Performance-report and scaling-table writers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::PerfReport;

pub fn write_perf_report(report: &PerfReport, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path.display().to_string(), e))
}

/// One worker count of a scaling study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchEntry {
    pub workers: usize,
    pub report: PerfReport,
    /// total(1 worker) / total(this worker count).
    pub speedup: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub scenario: String,
    pub entries: Vec<BenchEntry>,
}

impl BenchReport {
    /// Builds the speedup table from per-worker-count reports. The baseline
    /// is the first entry's worker count (conventionally 1).
    pub fn from_reports(scenario: impl Into<String>, reports: Vec<PerfReport>) -> BenchReport {
        let baseline = reports.first().map(|r| r.total_s).unwrap_or(0.0);
        let entries = reports
            .into_iter()
            .map(|report| BenchEntry {
                workers: report.workers,
                speedup: if report.total_s > 0.0 {
                    baseline / report.total_s
                } else {
                    0.0
                },
                report,
            })
            .collect();
        BenchReport {
            scenario: scenario.into(),
            entries,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Plain-text speedup table for the terminal.
    pub fn table(&self) -> String {
        let mut out = String::from("workers  total_s    speedup\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{:>7}  {:>9.3}  {:>7.2}\n",
                e.workers, e.report.total_s, e.speedup
            ));
        }
        out
    }
}
