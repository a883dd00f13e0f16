//! Command-line front end for the random access Bell game simulator.
//! All physics lives in `rabg-core`; this crate parses flags, runs the
//! requested computation, and serializes the result as CSV or JSON with
//! deterministic, byte-reproducible formatting.

pub mod commands;
pub mod config;
pub mod numfmt;
pub mod table;

pub use commands::{execute, Cli, CliError, CmdOutput};

/// Writes the rendered output to the requested destination and returns
/// the process exit code.
pub fn deliver(output: CmdOutput) -> i32 {
    match &output.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &output.text) {
                eprintln!("rabg: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{}", output.text),
    }
    output.exit_code
}
