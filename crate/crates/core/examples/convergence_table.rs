//! Convergence table for a catalog preset (default `test1-linear-table`),
//! written as CSV plus a JSON manifest.
//!
//! `cargo run --release --example convergence_table -- test2-cubic-table`

use wave_sgldg::config::preset_config;
use wave_sgldg::runner::run;

fn main() -> wave_sgldg::Result<()> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "test1-linear-table".into());
    let mut config = preset_config(&name)?;
    config.output.dir = std::env::temp_dir().join(format!("wave-sgldg-{name}"));
    let report = run(&config, 0)?;
    print!(
        "{}",
        std::fs::read_to_string(&report.csv).unwrap_or_default()
    );
    println!("{} -> {}", report.provenance, report.manifest.display());
    Ok(())
}
