//! Batch front-end for the dephasing simulator: configuration documents,
//! result files and summary tables.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Run one experiment described by a TOML configuration document.
#[derive(Debug, Parser)]
#[command(name = "dephasing", version, about)]
pub struct Cli {
    /// Path to the configuration document.
    pub config: PathBuf,
    /// Override the seed given in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the output directory given in the configuration.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;

/// Parses arguments, runs, and maps failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let overrides = config::Overrides {
        seed: cli.seed,
        output_dir: cli.out,
    };
    let cfg = match config::load(&cli.config, &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run::execute(&cfg) {
        Ok((summary, written)) => {
            print!("{}", summary.render());
            for path in written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
