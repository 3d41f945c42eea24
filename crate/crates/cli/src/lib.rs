//! Command-line front end: every analysis is registered by name in a
//! [`Registry`] and writes a self-describing CSV or JSON report.

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod output;
pub mod registry;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use error::CliError;
pub use registry::{Analysis, Registry};

/// Parse `argv`, run the analysis and write its report. Returns the
/// process exit status: 0 on success, 1 on numerical or I/O failure or a
/// failed verification, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let registry = commands::builtin();
    let matches = match registry.command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    match execute(&registry, name, sub) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("ewa {name}: {e}");
            e.exit_code()
        }
    }
}

fn execute(registry: &Registry, name: &str, matches: &clap::ArgMatches) -> Result<bool, CliError> {
    let run = registry.dispatch(name, matches)?;
    let mut sink: Box<dyn Write> = match &run.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    output::write_report(&mut sink, &run.header, &run.report, run.format)?;
    sink.flush()?;
    Ok(run.report.success)
}
