//! Stability in the coefficient: the distance between solutions with `a^2`
//! and `a^2 + eps` scales linearly in `eps`.

use wave_sgldg::config::preset_config;
use wave_sgldg::studies::perturbation_study;

fn main() -> wave_sgldg::Result<()> {
    let config = preset_config("perturbation")?;
    let runs = perturbation_study(
        &config.case(config.h[0])?,
        &config.perturbation_eps,
        config.sample_every,
    )?;
    for run in &runs {
        println!(
            "eps = {:.2e}  max D(t)/(t+1) = {:.4e}  ratio to eps = {:.4}",
            run.eps,
            run.max_scaled,
            run.max_scaled / run.eps
        );
    }
    Ok(())
}
