//! `atiyah-kernel`: exact center-valued traces, kernel projections and
//! Atiyah lattices from the command line.
//!
//! Exit status is 0 on success, 1 when a verification found a broken
//! identity, and 2 for bad input.

mod cache;
mod commands;
mod config;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::commands::{ApproximateArgs, Report, Session, VerifyArgs};
use crate::config::{OutputFormat, SessionConfig};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Verification(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn verification(msg: impl Into<String>) -> Self {
        CliError::Verification(msg.into())
    }
}

impl From<atiyah_core::Error> for CliError {
    fn from(e: atiyah_core::Error) -> Self {
        if e.is_verification_failure() {
            CliError::Verification(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "atiyah-kernel", version, about = "Exact center-valued traces and Atiyah lattices")]
struct Cli {
    /// TOML session configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Coefficient field K: q, q(w5), or a cyclotomic order. Overrides the config.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Report format. Overrides the config.
    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,
    /// Snap tolerance as p/q. Overrides the config.
    #[arg(long, global = true)]
    tolerance: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-group utilities.
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Primitive central idempotents u, their orbit sums U, and the P blocks.
    Idempotents {
        /// Group JSON file or built-in name such as cyclic:4.
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        group: Option<String>,
        /// Use Δ⁺ of a model together with its conjugation action.
        #[arg(long)]
        model: Option<String>,
    },
    /// Center-valued trace of a square matrix over the group ring.
    Trace {
        #[arg(long)]
        group: String,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Projection onto the kernel and its center-valued dimension.
    Kernel {
        #[arg(long)]
        group: String,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Three-route check of the trace formula for irreducible projections.
    AtiyahVerify {
        /// Built-in model name or model JSON file.
        #[arg(long)]
        model: String,
        /// Restrict to one catalog subgroup.
        #[arg(long)]
        subgroup: Option<String>,
        /// Projection in K[H] as element JSON; without it every block's minimal projection is checked.
        #[arg(long, requires = "subgroup")]
        projection: Option<PathBuf>,
        /// Accept the projection as irreducible without the rank certificate.
        #[arg(long)]
        assert_irreducible: bool,
    },
    /// Atiyah lattice in Hermite normal form with its discreteness certificate.
    Lattice {
        #[arg(long)]
        model: String,
        /// Assume Schur index 1 where no projection can be built.
        #[arg(long)]
        superlattice: bool,
    },
    /// Matrix sizes L_j by the closed formula and from the lattice.
    Lj {
        #[arg(long)]
        model: String,
        #[arg(long)]
        superlattice: bool,
    },
    /// Kernel dimensions along a residual chain and their snap to the lattice.
    Approximate {
        /// Chain JSON; defaults to the model's built-in chain.
        #[arg(long)]
        chain: Option<PathBuf>,
        /// Symbolic matrix JSON in the chain generators.
        #[arg(long)]
        matrix: PathBuf,
        /// Use only the first N levels.
        #[arg(long)]
        levels: Option<usize>,
        /// Model supplying Δ⁺ and the lattice; defaults to torsion-free.
        #[arg(long)]
        model: Option<String>,
        /// Extra words whose dim^u coefficients are reported per level.
        #[arg(long = "track")]
        track: Vec<String>,
        /// Tail window for the snap verdict.
        #[arg(long, default_value_t = 2)]
        window: usize,
        /// JSONL file of finished levels, reused across runs.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Import or export character tables for the on-disk cache.
    CharacterTable {
        #[command(subcommand)]
        action: TableAction,
    },
}

#[derive(Subcommand)]
enum GroupAction {
    /// Order, classes, exponent, character degrees and canonical hash.
    Inspect {
        #[arg(long)]
        group: String,
    },
}

#[derive(Subcommand)]
enum TableAction {
    Export {
        #[arg(long)]
        group: String,
    },
    Import {
        #[arg(long)]
        group: String,
        #[arg(long)]
        table: PathBuf,
    },
}

fn session(cli: &Cli) -> Result<Session, CliError> {
    let mut cfg = SessionConfig::load(cli.config.as_deref())?;
    if let Some(f) = &cli.field {
        cfg.field = config::parse_field(f)?;
    }
    if let Some(o) = cli.output {
        cfg.output = o;
    }
    if let Some(t) = &cli.tolerance {
        let tol = atiyah_core::scalar::parse_rational(t)?;
        if tol <= atiyah_core::scalar::rat(0, 1) || tol >= atiyah_core::scalar::rat(1, 1) {
            return Err(CliError::input(format!("tolerance {t} must lie strictly between 0 and 1")));
        }
        cfg.tolerance = tol;
    }
    Session::new(cfg)
}

fn run(cli: &Cli) -> Result<(Report, OutputFormat), CliError> {
    let s = session(cli)?;
    let cfg = &s.cfg;
    let report = match &cli.command {
        Command::Group { action: GroupAction::Inspect { group } } => commands::group_inspect(&s, &input::group(group, cfg)?)?,
        Command::Idempotents { group: Some(group), .. } => commands::idempotents(&s, &input::group(group, cfg)?, &[])?,
        Command::Idempotents { model: Some(model), .. } => commands::model_idempotents(&s, &input::model(model, cfg)?)?,
        Command::Idempotents { .. } => return Err(CliError::input("pass --group or --model")),
        Command::Trace { group, matrix } => commands::trace(&s, &input::group(group, cfg)?, matrix)?,
        Command::Kernel { group, matrix } => commands::kernel(&s, &input::group(group, cfg)?, matrix)?,
        Command::AtiyahVerify { model, subgroup, projection, assert_irreducible } => commands::atiyah_verify(
            &s,
            &input::model(model, cfg)?,
            VerifyArgs {
                subgroup: subgroup.as_deref(),
                projection: projection.as_deref(),
                assert_irreducible: *assert_irreducible,
            },
        )?,
        Command::Lattice { model, superlattice } => commands::lattice(&s, &input::model(model, cfg)?, *superlattice)?,
        Command::Lj { model, superlattice } => commands::lj(&s, &input::model(model, cfg)?, *superlattice)?,
        Command::Approximate { chain, matrix, levels, model, track, window, checkpoint } => {
            let vg = model.as_deref().map(|m| input::model(m, cfg)).transpose()?;
            commands::approximate_cmd(
                &s,
                ApproximateArgs {
                    chain: chain.as_deref(),
                    matrix,
                    levels: *levels,
                    model: vg.as_ref(),
                    track,
                    window: *window,
                    checkpoint: checkpoint.as_deref(),
                },
            )?
        }
        Command::CharacterTable { action: TableAction::Export { group } } => {
            commands::table_export(&s, &input::group(group, cfg)?)?
        }
        Command::CharacterTable { action: TableAction::Import { group, table } } => {
            commands::table_import(&s, &input::group(group, cfg)?, table)?
        }
    };
    Ok((report, s.cfg.output))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Two-column listing of the top-level report fields.
fn render_table(v: &Value) -> String {
    let Value::Object(map) = v else { return scalar_text(v) + "\n" };
    let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, val) in map {
        out.push_str(&format!("{k:<width$}  {}\n", scalar_text(val)));
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, format)) => {
            match format {
                OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report.value).expect("serializable")),
                OutputFormat::Table => print!("{}", render_table(&report.value)),
            }
            match report.failure {
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
