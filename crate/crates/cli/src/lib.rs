//! Command-line front end for the idrkit pipeline.
//!
//! [`run`] parses arguments, resolves the configuration, runs the selected
//! stages and writes every output atomically into the output directory,
//! together with `manifest.json` (path, size and SHA-256 of each data file)
//! and `run_report.json`.

pub mod args;
pub mod config;
pub mod pipeline;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use serde::Serialize;
use sha2::{Digest, Sha256};

use idrkit_core::qualifier::CorpusStats;
use idrkit_core::Warning;

use crate::args::Cli;
use crate::config::{resolve, ConfigError, RunConfig};
use crate::pipeline::{load_inputs, run_pipeline, Artifact, Selection, Timing};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const MANIFEST: &str = "manifest.json";
pub const REPORT: &str = "run_report.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn of(artifacts: &[Artifact]) -> Manifest {
        let mut files: Vec<ManifestEntry> = artifacts
            .iter()
            .map(|a| ManifestEntry {
                path: a.path.clone(),
                bytes: a.bytes.len(),
                sha256: hex::encode(Sha256::digest(&a.bytes)),
            })
            .collect();
        files.sort_by(|a, b| a.path.cmp(&b.path));
        Manifest { files }
    }
}

#[derive(Debug, Serialize)]
struct RunReport<'a> {
    command: &'a str,
    config: &'a RunConfig,
    stats: Option<&'a CorpusStats>,
    warnings: &'a [Warning],
    /// Every file written by the run except this report.
    files: Vec<ManifestEntry>,
    timings: &'a [Timing],
    total_millis: f64,
}

/// Writes `bytes` to `dir/rel` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, rel: &str, bytes: &[u8]) -> Result<()> {
    let target = dir.join(rel);
    let parent = target.parent().unwrap_or(dir);
    std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent).with_context(|| format!("creating temp file in {}", parent.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).with_context(|| format!("writing {}", target.display()))?;
    Ok(())
}

fn execute(command: &str, cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let inputs = load_inputs(cfg)?;
    let mut out = run_pipeline(cfg, inputs, Selection::for_command(command))?;
    for w in &out.warnings {
        log::warn!("{w}");
    }

    let manifest = Manifest::of(&out.artifacts);
    let mut manifest_json = serde_json::to_vec_pretty(&manifest)?;
    manifest_json.push(b'\n');
    out.artifacts.push(Artifact {
        path: MANIFEST.into(),
        bytes: manifest_json,
    });
    for a in &out.artifacts {
        write_atomic(&cfg.out, &a.path, &a.bytes)?;
    }

    let report = RunReport {
        command,
        config: cfg,
        stats: out.stats.as_ref(),
        warnings: &out.warnings,
        files: Manifest::of(&out.artifacts).files,
        timings: &out.timings,
        total_millis: started.elapsed().as_secs_f64() * 1e3,
    };
    let mut report_json = serde_json::to_vec_pretty(&report)?;
    report_json.push(b'\n');
    write_atomic(&cfg.out, REPORT, &report_json)?;
    log::info!("wrote {} files to {}", out.artifacts.len() + 1, cfg.out.display());
    Ok(())
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("IDRKIT_LOG", "warn");
    // a second call in the same process (tests) is harmless
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let command = cli.command.name();
    let cfg = match resolve(cli.command.flags()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("idrkit {command}: {e}");
            return EXIT_USAGE;
        }
    };
    match execute(command, &cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("idrkit {command}: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}
