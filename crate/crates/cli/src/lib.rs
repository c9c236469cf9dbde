//! Command-line driver: reads curve documents, runs the engine, writes reports.

pub mod document;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use curvetau_core::{all_partitions, dimca_check, Analysis, Error, PartitionAnalyses};
use thiserror::Error;

use document::CurveDocument;
use report::{canonical_json, DimcaRecord, Invariants, PartitionRecord, Report, Timings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 parse, 3 validation, 4 precision, 5 oracle mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(e) => match e {
                Error::Parse { .. } => 2,
                Error::PrecisionExhausted { .. } | Error::ConductorNotStabilized(_) => 4,
                Error::OracleMismatch { .. } | Error::InclusionNotCertified(_) => 5,
                _ => 3,
            },
            CliError::Usage(_) | CliError::Io { .. } => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "curvetau", version, about = "Value sets and Tjurina numbers of plane curve singularities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a curve document describes a reduced curve.
    Validate { file: PathBuf },
    /// Semigroups, value sets, Tjurina and Milnor numbers.
    Invariants {
        file: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tjurina decomposition and the Dimca bound for branch splits.
    Dimca {
        file: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Run invariants and every split on each `*.json` in a directory.
    Corpus { dir: PathBuf },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SplitArgs {
    /// Branches of `J`, numbered from 1, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub partition: Option<Vec<usize>>,
    #[arg(long)]
    pub all_partitions: bool,
}

fn read(path: &Path) -> Result<CurveDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    CurveDocument::parse(&text)
}

fn analyse(doc: &CurveDocument) -> Result<Analysis<curvetau_core::Rational>, CliError> {
    let curve = doc.curve()?;
    curve.validate()?;
    Ok(Analysis::new(&curve, &doc.settings()?)?)
}

pub fn invariants_report(doc: &CurveDocument) -> Result<Report<Invariants>, CliError> {
    let start = Instant::now();
    let canonical = report::invariants(&analyse(doc)?)?;
    Ok(Report {
        input: doc.canonical()?,
        canonical,
        timings: Timings {
            total_ms: start.elapsed().as_millis(),
        },
    })
}

/// `splits` holds 0-based subsets `J`; `None` means every split up to complement.
pub fn dimca_report(doc: &CurveDocument, splits: Option<Vec<Vec<usize>>>) -> Result<Report<DimcaRecord>, CliError> {
    let start = Instant::now();
    let curve = doc.curve()?;
    curve.validate()?;
    let settings = doc.settings()?;
    if curve.r() < 2 {
        return Err(CliError::Usage("the Dimca bound needs at least two branches".into()));
    }
    let splits = splits.unwrap_or_else(|| all_partitions(curve.r()));
    let mut partitions = Vec::with_capacity(splits.len());
    let mut corollary = [0, 0];
    for j in &splits {
        let p = PartitionAnalyses::new(&curve, j, &settings)?;
        let (rep, verdict) = dimca_check(&p)?;
        corollary = [verdict.corollary.0, verdict.corollary.1];
        partitions.push(PartitionRecord::new(&rep, &verdict));
    }
    Ok(Report {
        input: doc.canonical()?,
        canonical: DimcaRecord {
            partitions,
            corollary,
        },
        timings: Timings {
            total_ms: start.elapsed().as_millis(),
        },
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// Runs one command, writing its output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { file } => {
            let doc = read(&file)?;
            let report = doc.curve()?.validate()?;
            emit(
                out,
                &format!(
                    "valid: {} branches, multiplicities {:?}, intersection orders {:?}",
                    report.branch_count, report.multiplicities, report.orders
                ),
            )
        }
        Command::Invariants { file, json } => {
            let report = invariants_report(&read(&file)?)?;
            let text = canonical_json(&report);
            match json {
                Some(path) => std::fs::write(&path, text + "\n").map_err(|source| CliError::Io { path, source }),
                None => emit(out, &text),
            }
        }
        Command::Dimca { file, split } => {
            let doc = read(&file)?;
            let splits = match split.partition {
                Some(j) => {
                    if j.contains(&0) {
                        return Err(CliError::Usage("branches are numbered from 1".into()));
                    }
                    Some(vec![j.iter().map(|i| i - 1).collect()])
                }
                None => None,
            };
            emit(out, &canonical_json(&dimca_report(&doc, splits)?))
        }
        Command::Corpus { dir } => corpus(&dir, out),
    }
}

fn corpus(dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut worst: Option<CliError> = None;
    for path in files {
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let start = Instant::now();
        let result = read(&path).and_then(|doc| {
            let inv = invariants_report(&doc)?.canonical;
            let slack = if inv.branches.len() > 1 {
                dimca_report(&doc, None)?.canonical.partitions.iter().map(|p| p.slack).min()
            } else {
                None
            };
            Ok((inv, slack))
        });
        let ms = start.elapsed().as_millis();
        match result {
            Ok((inv, slack)) => emit(
                out,
                &format!(
                    "{name}: r={} tau={} (oracle {}) mu={} (oracle {}) min_slack={} ok {ms} ms",
                    inv.branches.len(),
                    inv.tau.formula,
                    inv.tau.oracle,
                    inv.milnor.formula,
                    inv.milnor.oracle,
                    slack.map_or("-".to_string(), |s| s.to_string()),
                ),
            )?,
            Err(e) => {
                emit(out, &format!("{name}: error (exit {}): {e}", e.exit_code()))?;
                if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                    worst = Some(e);
                }
            }
        }
    }
    worst.map_or(Ok(()), Err)
}
