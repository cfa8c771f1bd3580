//! CSV results and the JSON manifest written next to them.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::BerRecord;

#[derive(Debug, Serialize)]
struct CsvRow {
    ebn0_db: f64,
    frames: u64,
    frame_errors: u64,
    bits: u64,
    bit_errors: u64,
    ber: f64,
    fer: f64,
    seconds: f64,
}

impl From<&BerRecord> for CsvRow {
    fn from(r: &BerRecord) -> Self {
        CsvRow {
            ebn0_db: r.eb_n0_db,
            frames: r.frames,
            frame_errors: r.frame_errors,
            bits: r.bits_simulated,
            bit_errors: r.bit_errors,
            ber: r.ber,
            fer: r.fer,
            seconds: r.wall_time,
        }
    }
}

/// Writes records as CSV. The header is always present, even for no records.
pub fn write_csv<W: Write>(out: W, records: &[BerRecord]) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["ebn0_db", "frames", "frame_errors", "bits", "bit_errors", "ber", "fer", "seconds"])?;
    for r in records {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()
}

/// `results.csv` -> `results.json`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Output of `git describe --always --dirty` at build time.
pub fn git_describe() -> &'static str {
    env!("PCFEC_GIT_DESCRIBE")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest<C> {
    pub command: String,
    pub version: String,
    pub git_describe: String,
    pub parallel: bool,
    pub seed: u64,
    pub config: C,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
}

impl<C: Serialize> RunManifest<C> {
    pub fn new(command: &str, seed: u64, config: C) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            git_describe: git_describe().to_string(),
            parallel: crate::par::parallel_enabled(),
            seed,
            config,
            result: None,
        }
    }

    pub fn with_result<R: Serialize>(mut self, result: &R) -> Self {
        self.result = serde_json::to_value(result).ok();
        self
    }
}

pub fn write_manifest<C: Serialize>(path: &Path, manifest: &RunManifest<C>) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, manifest)?;
    writeln!(f)?;
    f.flush()
}
