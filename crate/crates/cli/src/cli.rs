use crate::api::{RouteRequest, Snapshot};
use crate::config::{AppConfig, CONFIG_ENV};
use crate::server::{self, AppState};
use campus_ar_core::qrcode::{decode_symbol, encode_symbol};
use campus_ar_core::sqlgen::generate_ddl;
use campus_ar_core::tablespec::parse_table_text;
use campus_ar_core::{
    BitMatrix, DdlOptions, EcLevel, KeywordCase, QrSymbolConfig, Symmetry, TableSpec,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "campus-ar", version, about = "Campus staff finder and table-spec SQL generator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a table specification and print its JSON form.
    Parse {
        /// Specification text; standard input when omitted.
        file: Option<PathBuf>,
    },
    /// Generate a `create table` statement.
    Ddl(DdlArgs),
    /// Encode a payload as a QR symbol.
    QrEncode(QrEncodeArgs),
    /// Decode a QR symbol written by `qr-encode`.
    QrDecode {
        /// Matrix text; standard input when omitted.
        file: Option<PathBuf>,
    },
    /// Route from a node to a staff member's desk.
    Route(RouteArgs),
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = CONFIG_ENV)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct DdlArgs {
    /// Specification text (or JSON with `--json`); standard input when omitted.
    pub file: Option<PathBuf>,
    /// Read the JSON form printed by `parse` instead of specification text.
    #[arg(long)]
    pub json: bool,
    /// Upper-case SQL keywords.
    #[arg(long)]
    pub upper: bool,
    /// Spaces before each column line.
    #[arg(long, default_value_t = 0)]
    pub indent: u8,
    /// Replaces the table initials in check-constraint names.
    #[arg(long)]
    pub constraint_prefix: Option<String>,
}

#[derive(Debug, Args)]
pub struct QrEncodeArgs {
    pub payload: String,
    #[arg(long, default_value = "M")]
    pub level: EcLevel,
    /// Force the version (needs `--mask`).
    #[arg(long, requires = "mask", value_parser = clap::value_parser!(u8).range(1..=3))]
    pub version: Option<u8>,
    /// Force the mask pattern (needs `--version`).
    #[arg(long, requires = "version", value_parser = clap::value_parser!(u8).range(0..=7))]
    pub mask: Option<u8>,
    /// Write the matrix here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print block-character art to standard output instead of matrix text.
    #[arg(long, conflicts_with = "out")]
    pub art: bool,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub staff: String,
    #[arg(long, env = CONFIG_ENV)]
    pub config: PathBuf,
}

/// Exit status: 0 success, 1 domain error, 2 usage error.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn parse_spec(file: Option<&Path>, text: &str) -> Result<TableSpec, Failure> {
    parse_table_text(&source_name(file), text).map_err(|e| Failure(format!("{}: {e}", e.kind())))
}

fn read_input(file: Option<&Path>) -> Result<String, Failure> {
    match file {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn source_name(file: Option<&Path>) -> String {
    file.map_or_else(|| "<stdin>".to_owned(), |p| p.display().to_string())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("response types serialize")
}

#[derive(Serialize)]
struct DecodeOutput {
    payload: String,
    corrected_errors: usize,
    orientation_applied: Symmetry,
    config: QrSymbolConfig,
}

/// Runs one command, writing its result to `out`.
pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Parse { file } => {
            let text = read_input(file.as_deref())?;
            let spec = parse_spec(file.as_deref(), &text)?;
            writeln!(out, "{}", spec.to_json())?;
        }
        Command::Ddl(args) => {
            let text = read_input(args.file.as_deref())?;
            let spec = if args.json {
                TableSpec::from_json(&text)?
            } else {
                parse_spec(args.file.as_deref(), &text)?
            };
            let opts = DdlOptions {
                keyword_case: if args.upper {
                    KeywordCase::Upper
                } else {
                    KeywordCase::Lower
                },
                indent: args.indent,
                constraint_prefix_override: args.constraint_prefix,
            };
            writeln!(out, "{}", generate_ddl(&spec, &opts)?)?;
        }
        Command::QrEncode(args) => {
            let forced = args.version.zip(args.mask);
            let (m, _) = encode_symbol(args.payload.as_bytes(), args.level, forced)?;
            if args.art {
                write!(out, "{}", m.to_ascii_art(4))?;
            } else if let Some(path) = args.out {
                std::fs::write(&path, m.to_text())
                    .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            } else {
                write!(out, "{}", m.to_text())?;
            }
        }
        Command::QrDecode { file } => {
            let m = BitMatrix::from_text(&read_input(file.as_deref())?)?;
            let report = decode_symbol(&m)?;
            let output = DecodeOutput {
                payload: String::from_utf8(report.payload)
                    .map_err(|_| Failure("payload is not UTF-8 text".into()))?,
                corrected_errors: report.corrected_errors,
                orientation_applied: report.orientation_applied,
                config: report.config,
            };
            writeln!(out, "{}", to_json(&output))?;
        }
        Command::Route(args) => {
            let cfg = AppConfig::load(&args.config)?;
            let snapshot = Snapshot::load(&cfg, 1)?;
            let response = snapshot.route(&RouteRequest {
                from_node: args.from,
                staff_id: args.staff,
            })?;
            writeln!(out, "{}", to_json(&response))?;
        }
        Command::Serve { config } => {
            let cfg = AppConfig::load(&config)?;
            init_tracing(cfg.log_level.as_filter());
            let state = AppState::new(cfg)?;
            tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()?
                .block_on(server::serve(state))?;
        }
    }
    Ok(())
}

fn init_tracing(default: &str) {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}

/// Parses `args` and runs the command, reporting errors on standard error.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = std::io::stdout();
    match execute(cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
