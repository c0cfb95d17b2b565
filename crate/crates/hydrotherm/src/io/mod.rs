//! Run output: VTK snapshots, observation CSVs, performance reports and the
//! run manifest that ties them together.

pub mod obs;
pub mod perf;
pub mod vtk;

pub use obs::{append_observations, write_observation_csv, CSV_HEADER};
pub use perf::{write_perf_report, BenchEntry, BenchReport};
pub use vtk::write_vtk;

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, ObservationLine};
use crate::sim::{OutputSink, PerfReport, State};

/// Identifies a run: the exact config it came from, the engine version and
/// the worker count. Written before the first snapshot; the file list is
/// completed when the run finishes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_sha256: String,
    pub engine_version: String,
    pub workers: usize,
    /// Results are bitwise reproducible for a fixed config; no seeds enter
    /// the computation.
    pub deterministic: bool,
    pub files: Vec<String>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path.display().to_string(), e))
}

/// Output sink for one run directory: `manifest.json` (written up front),
/// zero-padded `fields_NNNNNN.vtk` snapshots, a streaming
/// `observations.csv`, and `perf.json` on finalize.
pub struct RunBundle {
    dir: PathBuf,
    lines: Vec<ObservationLine>,
    csv: std::io::BufWriter<std::fs::File>,
    manifest: RunManifest,
    files: Vec<String>,
}

impl RunBundle {
    pub fn create(
        dir: &Path,
        config_text: &str,
        lines: Vec<ObservationLine>,
        workers: usize,
    ) -> Result<RunBundle> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let manifest = RunManifest {
            config_sha256: format!("{:x}", Sha256::digest(config_text.as_bytes())),
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            workers,
            deterministic: true,
            files: Vec::new(),
        };
        write_json(&dir.join("manifest.json"), &manifest)?;

        let csv_path = dir.join("observations.csv");
        let file = std::fs::File::create(&csv_path)
            .map_err(|e| Error::io(csv_path.display().to_string(), e))?;
        let mut csv = std::io::BufWriter::new(file);
        writeln!(csv, "{CSV_HEADER}").map_err(|e| Error::io(csv_path.display().to_string(), e))?;

        Ok(RunBundle {
            dir: dir.to_path_buf(),
            lines,
            csv,
            manifest,
            files: vec!["observations.csv".to_string()],
        })
    }

    /// Flushes the CSV, writes `perf.json` and completes the manifest.
    pub fn finalize(mut self, report: &PerfReport) -> Result<()> {
        self.csv
            .flush()
            .map_err(|e| Error::io("observations.csv".to_string(), e))?;
        write_perf_report(report, &self.dir.join("perf.json"))?;
        self.files.push("perf.json".to_string());
        self.manifest.files = self.files;
        write_json(&self.dir.join("manifest.json"), &self.manifest)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

impl OutputSink for RunBundle {
    fn on_snapshot(&mut self, mesh: &Mesh, state: &State) -> Result<()> {
        append_observations(&mut self.csv, mesh, state, &self.lines)?;
        // The initial state appears in the CSV only; field files start at
        // the first completed step.
        if state.step > 0 {
            let name = format!("fields_{:06}.vtk", state.step);
            write_vtk(mesh, state, &self.dir.join(&name))?;
            self.files.push(name);
        }
        Ok(())
    }
}
