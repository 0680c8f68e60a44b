//! The boundary-adapted projection of the initial data onto `Q^k` per cell
//! and gPC mode: its error decays like `h^(k+1)`.

use wave_sgldg::diagnostics::{observed_orders, NormScaling};
use wave_sgldg::simulation::{CaseSpec, Discretization};

fn main() -> wave_sgldg::Result<()> {
    for k in 1..=3 {
        let mut h = Vec::new();
        let mut e = Vec::new();
        for n in [4, 8, 16] {
            let disc = Discretization::build(&CaseSpec::new("test1", 0.001, k, 2, n, 1e-3, 1e-3))?;
            let (v0, _) = disc.initial_data()?;
            let s0 = disc.solver.compute_s(&v0, 0.0)?;
            let err = disc
                .error_evaluator(NormScaling::DomainAverage)?
                .evaluate(&v0, &s0, 0.0)?;
            h.push(disc.h());
            e.push(err.u);
        }
        let orders = observed_orders(&h, &e);
        for i in 0..h.len() {
            let order = orders[i].map(|o| format!("{o:.2}")).unwrap_or_default();
            println!(
                "k = {k}  h = {:.4}  |u - P u| = {:.3e}  order {order}",
                h[i], e[i]
            );
        }
    }
    Ok(())
}
