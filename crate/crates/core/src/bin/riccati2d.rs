use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use riccati2d::cli::{error_exit_code, verify_file, RunOptions};
use riccati2d::Error;

#[derive(Parser)]
#[command(
    name = "riccati2d",
    version,
    about = "Verify Schrodinger/Riccati identities on a rectangle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identities selected by a config file and print a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for residual fields (grid CSV).
        #[arg(long)]
        dump_fields: Option<PathBuf>,
        /// Number of refinement levels; overrides `refine` in the config.
        #[arg(long)]
        refine: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Command::Verify {
        config,
        out,
        dump_fields,
        refine,
    } = cli.command;
    let opts = RunOptions {
        refine,
        dump_dir: dump_fields,
    };
    let result = verify_file(&config, &opts).and_then(|report| {
        let json = report.to_json();
        match &out {
            Some(p) => std::fs::write(p, json + "\n").map_err(|e| Error::io(p, e))?,
            None => println!("{json}"),
        }
        Ok(report.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("riccati2d: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
