//! Manifests in, JSON reports out.
//!
//! ```text
//! tractorlab <command> --manifest <path> [--seed N] [--out <path>] [--tol-scale X]
//! ```
//!
//! `--manifest` may name a directory, in which case every `*.json` file in it
//! is run in file-name order. Exit codes: 0 when every verdict passes, 1 when
//! one fails, 2 for input errors.

mod commands;
pub mod manifest;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

pub use commands::Run;
pub use manifest::{load, load_str, Loaded, Manifest, SCHEMA_VERSION};
pub use report::{CorpusReport, Report, Tolerances, Verdict};

use crate::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Ric, P, W and Cotton-York at the sample points.
    Compute,
    /// Invariance of W and tractor transport under random projective changes.
    Invariance,
    /// Tractor frame transport along the declared curves and loops.
    Transport,
    /// Holonomy algebra at the base point and invariant fiber structures.
    Holonomy,
    /// Holonomy, candidate structures, geometric reports and labels.
    Detect,
    /// Identity, invariance and transport properties.
    Verify,
    /// Every stage.
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Compute => "compute",
            Command::Invariance => "invariance",
            Command::Transport => "transport",
            Command::Holonomy => "holonomy",
            Command::Detect => "detect",
            Command::Verify => "verify",
            Command::Suite => "suite",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tractorlab", version, about = "Projective tractor calculus on coordinate charts")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Manifest file, or a directory of manifests.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Overrides the manifest's sampling seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    pub tol_scale: f64,
}

/// Run one command on a loaded manifest. Stage errors become failed verdicts.
pub fn run(command: Command, loaded: &Loaded, seed: Option<u64>, tol_scale: f64) -> Report {
    let mut r = Run::new(loaded, seed, tol_scale);
    let stages: &[&str] = match command {
        Command::Compute => &["compute"],
        Command::Invariance => &["invariance"],
        Command::Transport => &["transport"],
        Command::Holonomy => &["holonomy"],
        Command::Detect => &["detect"],
        Command::Verify => &["identities", "tractor_curvature", "invariance", "transport"],
        Command::Suite => &["compute", "tractor_curvature", "invariance", "transport", "detect"],
    };
    for &stage in stages {
        let result = match stage {
            "compute" => r.compute(true),
            "identities" => r.compute(false),
            "tractor_curvature" => r.tractor_curvature(),
            "invariance" => r.invariance(),
            "transport" => r.transport(),
            "holonomy" => r.holonomy(),
            "detect" => r.detect(),
            _ => unreachable!("unknown stage {stage}"),
        };
        if let Err(e) = result {
            r.verdicts.push(Verdict::holds("precondition", stage, false, e.to_string()));
        }
    }
    let failed: Vec<String> = r
        .verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| format!("{} [{}]", v.name, v.subject))
        .collect();
    Report {
        tool: "tractorlab",
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        command: command.name().into(),
        manifest: loaded.manifest.name.clone(),
        seed: r.seed,
        tol_scale,
        pass: failed.is_empty(),
        failed,
        sections: r.sections,
        verdicts: r.verdicts,
        skipped: r.skipped,
    }
}

/// Manifest files under `path`: the file itself, or a directory's `*.json` in name order.
pub fn manifest_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Io(format!("{}: no *.json manifests", path.display())));
    }
    Ok(files)
}

/// Everything between argument parsing and the exit code: returns the exit
/// code and the serialized report (absent on input errors).
pub fn execute(args: &Args) -> (i32, std::result::Result<String, String>) {
    if !(args.tol_scale.is_finite() && args.tol_scale > 0.0) {
        return (EXIT_INPUT, Err("--tol-scale must be a positive number".into()));
    }
    let files = match manifest_files(&args.manifest) {
        Ok(f) => f,
        Err(e) => return (EXIT_INPUT, Err(e.to_string())),
    };
    let mut loaded = Vec::with_capacity(files.len());
    for f in &files {
        match load(f) {
            Ok(l) => loaded.push(l),
            Err(e) => return (EXIT_INPUT, Err(format!("{}: {e}", f.display()))),
        }
    }
    let reports: Vec<Report> = loaded
        .iter()
        .map(|l| run(args.command, l, args.seed, args.tol_scale))
        .collect();
    let pass = reports.iter().all(|r| r.pass);
    let json = if args.manifest.is_dir() {
        serde_json::to_string_pretty(&CorpusReport {
            tool: "tractorlab",
            version: env!("CARGO_PKG_VERSION"),
            command: args.command.name().into(),
            seed: args.seed,
            tol_scale: args.tol_scale,
            pass,
            reports,
        })
    } else {
        serde_json::to_string_pretty(&reports[0])
    }
    .expect("reports serialize");
    (if pass { EXIT_PASS } else { EXIT_FAIL }, Ok(json + "\n"))
}

/// Apply `TRACTORLAB_THREADS` to the global thread pool.
pub fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("TRACTORLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("TRACTORLAB_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Command-line entry point; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    let (code, out) = execute(&args);
    match out {
        Err(e) => {
            eprintln!("error: {e}");
            code
        }
        Ok(json) => match &args.out {
            Some(path) => match std::fs::write(path, json) {
                Ok(()) => code,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    EXIT_INPUT
                }
            },
            None => {
                print!("{json}");
                code
            }
        },
    }
}
