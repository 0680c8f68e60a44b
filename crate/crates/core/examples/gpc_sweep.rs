//! Error against gPC order at fixed mesh and step: it falls until the
//! spatial error dominates, then plateaus.

use wave_sgldg::config::preset_config;
use wave_sgldg::studies::gpc_sweep;

fn main() -> wave_sgldg::Result<()> {
    let config = preset_config("test1-gpc-sweep")?;
    let sweep = gpc_sweep(&config.case(config.h[0])?, &config.sweep_orders)?;
    for p in &sweep.points {
        println!(
            "P = {}  M = {:2}  e_u = {:.4e}",
            p.order, p.modes, p.error.u
        );
    }
    match sweep.plateau {
        Some(i) => println!("plateau from P = {}", sweep.points[i].order),
        None => println!("no plateau reached"),
    }
    Ok(())
}
