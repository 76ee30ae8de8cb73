//! Simulation bundles on disk: `<stem>.x.csv`, `<stem>.counting.csv` and a
//! JSON sidecar `<stem>.json` with the config echo, seed and full-precision
//! records. Reading rebuilds the paths from the records and checks them
//! against the CSVs.

use std::path::{Path, PathBuf};

use ctrwkit_core::processes::{assemble, InnovationRecord, SimulationBundle};
use ctrwkit_core::rng::SeedSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io::{read_step_path, write_step_path};
use crate::scenario::ProcessSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub process: ProcessSpec,
    pub n: u64,
    pub horizon: f64,
    pub seed: u64,
    pub stream: u64,
    /// Number of past innovations θ_0, ..., θ_{-past}.
    pub past: usize,
    /// θ_{-past}, ..., θ_0, θ_1, ...
    pub innovations: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waits: Option<Vec<f64>>,
}

fn file(dir: &Path, stem: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{stem}.{suffix}"))
}

pub fn write_bundle(dir: &Path, stem: &str, spec: &ProcessSpec, b: &SimulationBundle) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    write_step_path(&file(dir, stem, "x.csv"), &b.x)?;
    write_step_path(&file(dir, stem, "counting.csv"), &b.counting)?;
    let side = Sidecar {
        process: spec.clone(),
        n: b.config.n,
        horizon: b.horizon,
        seed: b.seed.seed,
        stream: b.seed.stream,
        past: b.innovations.past(),
        innovations: b.innovations.values().to_vec(),
        waits: b.waits.clone(),
    };
    let path = file(dir, stem, "json");
    let text = serde_json::to_string_pretty(&side).expect("sidecar serialises");
    std::fs::write(&path, text).map_err(|e| CliError::write(&path, e))
}

pub fn read_bundle(dir: &Path, stem: &str) -> Result<SimulationBundle> {
    let path = file(dir, stem, "json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::read(&path, e))?;
    let side: Sidecar = serde_json::from_str(&text).map_err(|e| CliError::format(&path, e))?;
    let config = side.process.build(side.n)?;
    let innovations = InnovationRecord::new(side.past, side.innovations).map_err(|e| CliError::format(&path, e))?;
    let paths = assemble(&config, &innovations, side.waits.as_deref(), side.horizon, config.time_exponent())
        .map_err(|e| CliError::format(&path, e))?;
    for (suffix, rebuilt) in [("x.csv", &paths.x), ("counting.csv", &paths.counting)] {
        let p = file(dir, stem, suffix);
        let stored = read_step_path(&p, Some(side.horizon))?;
        if &stored != rebuilt {
            return Err(CliError::format(&p, "path does not match the records in the sidecar"));
        }
    }
    Ok(SimulationBundle {
        config,
        horizon: side.horizon,
        seed: SeedSpec::new(side.seed, side.stream),
        x: paths.x,
        counting: paths.counting,
        innovations,
        waits: side.waits,
        events: paths.events,
    })
}
