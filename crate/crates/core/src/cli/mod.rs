//! Command-line front end: `run <config> [--out DIR] [--jobs N] [--verbose]`.
//!
//! Exit codes: 0 success, 1 usage, 2 invariant failure, 3 solver failure.

pub mod config;
pub mod output;
mod run;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{parse_config, ConfigError, DomainSpec, ExperimentConfig, Kind};
pub use output::{CheckRecord, FileEntry, RunManifest, StageRecord, Writer, MANIFEST};
pub use run::{run, RunError, RunOptions};
pub use svg::{render_svg, RenderUnsupported};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "freebound",
    version,
    about = "Optimal partial transport experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory [default: the config's `output`, else `out`, next to the config].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweeps [default: all cores].
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: Option<u16>,
        /// Progress on stderr.
        #[arg(long)]
        verbose: bool,
    },
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let Command::Run {
        config,
        out,
        jobs,
        verbose,
    } = cli.command;
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return EXIT_USAGE;
        }
    };
    let parsed = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return EXIT_USAGE;
        }
    };
    let here = config.parent().unwrap_or(std::path::Path::new("."));
    let out = out.unwrap_or_else(|| here.join(parsed.output.as_deref().unwrap_or("out")));
    let opts = RunOptions {
        out,
        jobs: jobs.map(usize::from),
        verbose,
    };
    match run(&parsed, &opts) {
        Ok(m) => {
            let code = m.exit_code();
            if verbose || code != EXIT_OK {
                for st in m.stages.iter().filter(|s| s.error.is_some()) {
                    eprintln!(
                        "stage {} failed: {}",
                        st.stage,
                        st.error.as_deref().unwrap_or("")
                    );
                }
                for c in m.checks.iter().filter(|c| c.hard && !c.passed) {
                    eprintln!("invariant {} failed: {} > {}", c.name, c.value, c.limit);
                }
            }
            code
        }
        Err(RunError::Usage(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(RunError::Io(e)) => {
            eprintln!("error: {e}");
            3
        }
    }
}
