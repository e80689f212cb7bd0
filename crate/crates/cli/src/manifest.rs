use std::collections::BTreeMap;
use std::path::Path;

use asep_core::io::{write_atomic, IoError};
use asep_core::symmetry::OrbitRecord;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct BestGap {
    pub ig: String,
    pub decimal: String,
    pub witness: String,
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub orbits: usize,
    pub vertices: u128,
    pub best_gap: BTreeMap<usize, BestGap>,
    pub wall_seconds: f64,
}

impl Summary {
    pub fn from_records(records: &[OrbitRecord]) -> Summary {
        let best_gap = asep_core::gap::lower_bound_report(records)
            .into_iter()
            .map(|r| {
                (
                    r.n,
                    BestGap {
                        decimal: r.decimal(),
                        ig: r.ig.to_string(),
                        witness: r.witness,
                    },
                )
            })
            .collect();
        Summary {
            orbits: records.len(),
            vertices: records.iter().map(|r| r.orbit_size).sum(),
            best_gap,
            wall_seconds: 0.0,
        }
    }
}

/// One per run, written as `manifest.json` in the output directory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub starts: Vec<String>,
    pub output_dir: String,
    pub summary: Summary,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, output_dir: &Path) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config,
            seed: None,
            starts: Vec::new(),
            output_dir: output_dir.display().to_string(),
            summary: Summary::default(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), IoError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_atomic(&dir.join("manifest.json"), text.as_bytes())
    }
}
