//! Leap-frog with homogeneous Dirichlet data conserves the discrete energy
//! to round-off; both algebraic forms of it agree.

use wave_sgldg::config::preset_config;
use wave_sgldg::studies::energy_run;

fn main() -> wave_sgldg::Result<()> {
    let config = preset_config("energy-homogeneous")?;
    for (degree, gpc_order) in [(1, 0), (1, 4), (3, 4)] {
        let mut spec = config.case(config.h[0])?;
        spec.degree = degree;
        spec.gpc_order = gpc_order;
        spec.cell_quadrature = Some(degree + 2);
        spec.y_nodes = Some(gpc_order + 5);
        let trace = energy_run(&spec)?;
        println!(
            "k = {degree}, P = {gpc_order}: {} steps, E0 = {:.10e}, max relative drift {:.2e}, form gap {:.2e}",
            trace.records.len(),
            trace.records[0].fully_discrete,
            trace.max_relative_drift(),
            trace.max_form_gap()
        );
    }
    Ok(())
}
