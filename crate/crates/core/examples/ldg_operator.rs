//! The LDG pair `S = grad_h` and `div_h(A .)`: with homogeneous data the
//! discrete divergence is minus the adjoint of `S`, which is what makes
//! the scheme energy conserving.

use std::sync::Arc;

use wave_sgldg::coeff::GalerkinCoeffField;
use wave_sgldg::dg::{project_l2, LocalBasis};
use wave_sgldg::gpc::GpcBasis;
use wave_sgldg::ldg::{FluxChoice, FluxConvention, LdgOperator};
use wave_sgldg::mesh::Mesh2D;
use wave_sgldg::presets::build_preset;

fn main() -> wave_sgldg::Result<()> {
    let preset = build_preset("test2", 0.3)?;
    let gpc = GpcBasis::new(2, 2)?;
    let mesh = Mesh2D::new(preset.domain, 6, 6, &preset.model.interfaces())?;
    let basis = LocalBasis::new(2)?;
    let coeffs = Arc::new(GalerkinCoeffField::assemble(
        preset.model.as_ref(),
        &gpc,
        &mesh,
        basis.rule(),
    )?);
    for (fx, fy) in [
        (FluxChoice::MinusPlus, FluxChoice::MinusPlus),
        (FluxChoice::PlusMinus, FluxChoice::MinusPlus),
        (FluxChoice::PlusMinus, FluxChoice::PlusMinus),
    ] {
        let op = LdgOperator::new(
            mesh.clone(),
            basis.clone(),
            coeffs.clone(),
            FluxConvention { x: fx, y: fy },
        )?;
        let field = |shift: f64| {
            project_l2(op.basis(), op.mesh(), op.modes(), |x, out| {
                for (m, o) in out.iter_mut().enumerate() {
                    *o = ((m as f64 + 1.0) * x[0] + shift).sin() * (2.0 * x[1] - shift).cos();
                }
            })
        };
        let (v, w) = (field(0.3), field(1.1));
        let sv = op.compute_s(&v, None)?;
        let sw = op.compute_s(&w, None)?;
        let lhs = op.compute_acceleration(&sv)?.dot(&w);
        let rhs = -sv.dot(&sw);
        println!("{fx:?}/{fy:?}: <div(A S v), w> = {lhs:.12e}, -<S v, S w> = {rhs:.12e}");
    }
    Ok(())
}
