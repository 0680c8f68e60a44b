//! The library operator against an independent dense assembly. The
//! acceptance harness sweeps every small configuration; these cases pin a
//! representative few so a failure points at one setting.

mod common;

use common::{oracle_gap, oracle_models};
use wave_sgldg::ldg::{FluxChoice, FluxConvention};

const TOL: f64 = 1e-11;

fn check(nx: usize, ny: usize, k: usize, order: usize, flux: FluxConvention) {
    for (name, model, domain, _) in oracle_models() {
        let [s, acc, adjoint] = oracle_gap(model.as_ref(), domain, nx, ny, k, order, flux, 7);
        assert!(s <= TOL, "{name}: S gap {s:e}");
        assert!(acc <= TOL, "{name}: acceleration gap {acc:e}");
        assert!(adjoint <= TOL, "{name}: adjoint gap {adjoint:e}");
    }
}

#[test]
fn single_cell_piecewise_constants() {
    check(2, 1, 0, 0, FluxConvention::default());
}

#[test]
fn quadratic_elements_with_three_modes() {
    check(4, 4, 2, 1, FluxConvention::default());
}

#[test]
fn rectangular_mesh_with_mixed_fluxes() {
    let flux = FluxConvention {
        x: FluxChoice::PlusMinus,
        y: FluxChoice::MinusPlus,
    };
    check(4, 3, 1, 1, flux);
}

#[test]
fn plus_minus_fluxes_in_both_directions() {
    check(2, 4, 2, 1, FluxConvention::uniform(FluxChoice::PlusMinus));
}
