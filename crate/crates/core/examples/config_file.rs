//! Resolve a TOML configuration: preset expansion, overrides, defaults and
//! the CFL-based time step.

use wave_sgldg::config::parse_config;

const TOML: &str = r#"
preset = "test2-linear-table"
h = [0.5, 0.25]
suggest_dt = true
cfl = 0.05
final_time = 0.01
"#;

fn main() -> wave_sgldg::Result<()> {
    let config = parse_config(TOML, None)?;
    println!(
        "resolved: {}",
        serde_json::to_string_pretty(&config).unwrap_or_default()
    );
    println!(
        "cells per direction: {:?}",
        config
            .h
            .iter()
            .map(|&h| config.cells_for(h))
            .collect::<Result<Vec<_>, _>>()?
    );
    match parse_config("h = [0.3]\ndt = 0.1\nfinal_time = 1.0", None) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
