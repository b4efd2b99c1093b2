//! The `layersum` command.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error.

pub mod config;
pub mod export;
pub mod raw;
pub mod report;
pub mod table02;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::error::ErrorKind;
use clap::Parser;

pub use config::{parse_config, render_args, Args, CliConfig, Mode};
pub use report::{run, RunArtifacts, RunMeta, RunReport};
pub use table02::{reproduce_table02, Table02Row};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

fn execute(cfg: &CliConfig) -> Result<()> {
    if cfg.seed_was_random {
        eprintln!("layersum: seed {}", cfg.run.seed.0);
    }
    match cfg.mode {
        Mode::Table02 => {
            let rows = reproduce_table02(&cfg.run)?;
            print!("{}", table02::render_table02(&rows));
            if let Some(dir) = &cfg.output.out {
                std::fs::create_dir_all(dir)?;
                match cfg.output.format {
                    config::ReportFormat::Json => {
                        let mut w = BufWriter::new(File::create(dir.join("table02.json"))?);
                        serde_json::to_writer_pretty(&mut w, &rows)?;
                        w.write_all(b"\n")?;
                        w.flush()?;
                    }
                    config::ReportFormat::Csv => {
                        let w = BufWriter::new(File::create(dir.join("table02.csv"))?);
                        table02::write_table02_csv(&rows, w)?;
                    }
                }
            }
        }
        Mode::Run => {
            let artifacts = run(cfg)?;
            eprintln!(
                "layersum: {} sets, {} draws, {} workers, {:.3}s",
                artifacts.report.summaries.len(),
                artifacts.report.draws,
                artifacts.meta.workers,
                artifacts.meta.wall_time_secs
            );
            if cfg.output.out.is_none() {
                let stdout = io::stdout();
                report::write_report(&artifacts.report, cfg.output.format, stdout.lock())?;
            }
        }
    }
    Ok(())
}

/// Runs the command with `argv` (program name first) and returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    match config::resolve(args).and_then(|cfg| execute(&cfg)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("layersum: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    e.exit_code()
}
