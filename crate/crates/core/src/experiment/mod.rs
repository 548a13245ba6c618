//! Experiment configuration, Monte-Carlo sweeps and result files.

mod abep;
mod config;
mod qr;
mod results;
mod sweep;

use std::path::{Path, PathBuf};

pub use abep::run_abep_sweep;
pub use config::{NoiseMode, OutputFormat, QrSettings, Scenario, SweepConfig};
pub use qr::{run_qr_experiment, BitmapPair, QrOutcome};
pub use results::{emit_results, read_results_csv, read_results_jsonl, write_results, Metric, ResultRow};
pub use sweep::{Sweep, MAX_POINTS};

use crate::error::Result;

pub(crate) const CHANNEL_STREAM: u64 = 1;
pub(crate) const DATA_STREAM: u64 = 2;

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub(crate) fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// Rows plus, for QR scenarios, one bitmap pair per sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub bitmaps: Vec<BitmapPair>,
}

/// Dispatches on the configured scenario.
pub fn run_experiment(cfg: &SweepConfig, threads: Option<usize>) -> Result<Outcome> {
    if cfg.scenario.is_qr() {
        let o = run_qr_experiment(cfg, threads)?;
        Ok(Outcome {
            rows: o.rows,
            bitmaps: o.bitmaps,
        })
    } else {
        Ok(Outcome {
            rows: run_abep_sweep(cfg, threads)?,
            bitmaps: Vec::new(),
        })
    }
}

/// Writes `<scenario>_x<x>_M<m>_{original,recovered}.pbm` into `dir` and
/// returns the paths.
pub fn write_bitmaps(dir: &Path, pairs: &[BitmapPair]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(pairs.len() * 2);
    for p in pairs {
        for (kind, grid) in [("original", &p.original), ("recovered", &p.recovered)] {
            let path = dir.join(format!("{}_x{}_M{}_{kind}.pbm", p.scenario, p.x, p.m));
            std::fs::write(&path, grid.to_pbm())?;
            written.push(path);
        }
    }
    Ok(written)
}
