use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wave_sgldg::config::{load_config, preset_config, CATALOG};
use wave_sgldg::runner::run;

/// Stochastic Galerkin LDG wave solver.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// TOML configuration file (or inline TOML).
    #[arg(long, short)]
    config: Option<String>,
    /// Catalog preset; overrides the `preset` key of the configuration.
    #[arg(long, short)]
    preset: Option<String>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, short, default_value_t = 1)]
    workers: usize,
    /// List catalog presets and exit.
    #[arg(long)]
    list_presets: bool,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if cli.list_presets {
        CATALOG.iter().for_each(|p| println!("{p}"));
        return ExitCode::SUCCESS;
    }
    let config = match (&cli.config, &cli.preset) {
        (Some(c), p) => load_config(c, p.as_deref()),
        (None, Some(p)) => preset_config(p),
        (None, None) => {
            eprintln!("error: pass --config or --preset (see --list-presets)");
            return ExitCode::from(2);
        }
    };
    let result = config.and_then(|mut config| {
        if let Some(out) = cli.out {
            config.output.dir = out;
        }
        run(&config, cli.workers)
    });
    match result {
        Ok(report) => {
            println!("{}", report.provenance);
            println!(
                "{}",
                serde_json::to_string_pretty(&report.summary).unwrap_or_default()
            );
            println!(
                "wrote {} and {}",
                report.csv.display(),
                report.manifest.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
