//! Long-time error growth: `e_u(t)` stays below `C (t + 1)`.
//!
//! `cargo run --release --example long_time -- test2-long-time-large-noise`

use wave_sgldg::config::preset_config;
use wave_sgldg::studies::long_time_error;

fn main() -> wave_sgldg::Result<()> {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "test1-long-time-small-noise".into());
    let config = preset_config(&name)?;
    let series = long_time_error(&config.case(config.h[0])?, config.sample_every)?;
    for s in series.samples.iter().step_by(10) {
        println!("t = {:6.3}  e_u = {:.4e}", s.t, s.u);
    }
    println!(
        "sup e_u / (t + 1) = {:.4e}, envelope exponent {:.3}",
        series.max_scaled, series.envelope_exponent
    );
    Ok(())
}
