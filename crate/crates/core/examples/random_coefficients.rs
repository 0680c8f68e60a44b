//! Galerkin coefficient matrices `A = E[a Phi Phi^T]` of both benchmark
//! speeds: symmetric, and with spectrum inside `[a_min, a_max]`.

use nalgebra::SymmetricEigen;
use wave_sgldg::coeff::assemble_a;
use wave_sgldg::gpc::GpcBasis;
use wave_sgldg::mesh::Side;
use wave_sgldg::presets::build_preset;

fn main() -> wave_sgldg::Result<()> {
    let basis = GpcBasis::new(2, 4)?;
    for (problem, x) in [
        ("test1", [0.7, 1.3]),
        ("test2", [-0.5, 0.2]),
        ("test2", [0.5, 0.2]),
    ] {
        let preset = build_preset(problem, 0.2)?;
        let a = assemble_a(preset.model.as_ref(), &basis, x, Some(Side::Plus))?;
        let asym = (&a - a.transpose()).abs().max();
        let eig = SymmetricEigen::new(a).eigenvalues;
        let (lo, hi) = preset.model.bounds();
        println!(
            "{problem} at {x:?}: eigenvalues in [{:.4}, {:.4}], bounds [{lo:.4}, {hi:.4}], asymmetry {asym:.1e}",
            eig.min(),
            eig.max()
        );
    }
    Ok(())
}
