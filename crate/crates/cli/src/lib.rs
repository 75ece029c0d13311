//! The `ypq` command line: `verify`, `geodesic` and `rank`.
//!
//! Exit codes: 0 when every check passes, 1 when any fails, 2 for a
//! configuration error.

pub mod config;
pub mod geodesic;
pub mod rank;
pub mod verify;

use std::io::Write;

use ypq_core::par::Execution;

use config::{Cli, Command, RunConfig};
use geodesic::GeodesicError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn write_json<T: serde::Serialize>(cfg: &RunConfig, value: &T) -> Result<(), String> {
    let mut out = cfg.sink().map_err(|e| format!("opening output: {e}"))?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| format!("writing output: {e}"))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| format!("writing output: {e}"))
}

fn verdict(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs a parsed command and returns the process exit code. Diagnostics go
/// to `err`.
pub fn run(cli: Cli, err: &mut dyn Write) -> i32 {
    let (args, which) = match cli.command {
        Command::Verify(a) => (a, 0),
        Command::Geodesic(a) => (a, 1),
        Command::Rank(a) => (a, 2),
    };
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let exec = Execution::default();
    let result = match which {
        0 => verify::run_verify(&cfg, exec).and_then(|r| write_json(&cfg, &r).map(|_| r.passed)),
        2 => rank::run_rank(&cfg, exec).and_then(|r| write_json(&cfg, &r).map(|_| r.passed)),
        _ => {
            let mut out = match cfg.sink() {
                Ok(o) => o,
                Err(e) => {
                    let _ = writeln!(err, "error: opening output: {e}");
                    return EXIT_CONFIG;
                }
            };
            match geodesic::run_geodesic(&cfg, &mut out) {
                Ok(o) => {
                    if let Some(t) = o.exit_time {
                        let _ = writeln!(err, "note: trajectory left the sampling region at t = {t}");
                    }
                    Ok(o.passed)
                }
                Err(GeodesicError::Config(e)) => Err(e),
                Err(GeodesicError::Runtime(e)) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_FAIL;
                }
            }
        }
    };
    match result {
        Ok(passed) => verdict(passed),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}
