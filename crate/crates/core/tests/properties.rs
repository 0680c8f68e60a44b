//! Invariants checked on randomly drawn inputs.

mod common;

use common::{library_operator, random_field, rng};
use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use wave_sgldg::coeff::assemble_a;
use wave_sgldg::config::{parse_config, preset_config, ConfigFile, CATALOG};
use wave_sgldg::diagnostics::convergence_order;
use wave_sgldg::gpc::{binomial, GpcBasis, MultiIndexSet};
use wave_sgldg::ldg::{BoundaryData, FluxChoice, FluxConvention};
use wave_sgldg::leapfrog::{discrete_energy, suggest_dt, WaveSolver};
use wave_sgldg::mesh::{Mesh2D, Rect, Side};
use wave_sgldg::presets::build_preset;

fn flux_strategy() -> impl Strategy<Value = FluxConvention> {
    let choice = prop_oneof![Just(FluxChoice::MinusPlus), Just(FluxChoice::PlusMinus)];
    (choice.clone(), choice).prop_map(|(x, y)| FluxConvention { x, y })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn index_set_is_total_degree_and_graded(dims in 1usize..4, order in 0usize..6) {
        let set = MultiIndexSet::new(dims, order).unwrap();
        prop_assert_eq!(set.len() as u64, binomial(dims + order, dims));
        let degrees: Vec<usize> = set.iter().map(|a| a.iter().sum()).collect();
        prop_assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(degrees.iter().all(|&d| d <= order));
    }

    #[test]
    fn gpc_basis_is_orthonormal(dims in 1usize..3, order in 0usize..5) {
        let basis = GpcBasis::new(dims, order).unwrap();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let g = basis.rule().expectation(|y| basis.eval(i, y).unwrap() * basis.eval(j, y).unwrap());
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gpc_projection_reproduces_polynomials(c in prop::array::uniform4(-2.0f64..2.0), y in prop::array::uniform2(-1.0f64..1.0)) {
        let basis = GpcBasis::new(2, 2).unwrap();
        let f = |y: &[f64]| c[0] + c[1] * y[0] + c[2] * y[1] * y[1] + c[3] * y[0] * y[1];
        let coeffs = basis.project(f);
        prop_assert!((basis.evaluate_expansion(&coeffs, &y) - f(&y)).abs() < 1e-12);
    }

    #[test]
    fn galerkin_matrix_is_spd_within_bounds(
        delta in 0.0f64..0.6,
        problem in prop_oneof![Just("test1"), Just("test2")],
        t in prop::array::uniform2(0.01f64..0.99),
        order in 0usize..4,
    ) {
        let preset = build_preset(problem, delta).unwrap();
        let d = preset.domain;
        let x = [d.lo[0] + t[0] * d.width(0), d.lo[1] + t[1] * d.width(1)];
        let basis = GpcBasis::new(2, order).unwrap();
        let a = assemble_a(preset.model.as_ref(), &basis, x, Some(Side::Plus)).unwrap();
        prop_assert!((&a - a.transpose()).amax() < 1e-14);
        let eig = SymmetricEigen::new(a).eigenvalues;
        let (lo, hi) = preset.model.bounds();
        prop_assert!(eig.min() >= lo - 1e-12 && eig.max() <= hi + 1e-12, "{:?} not in [{lo}, {hi}]", eig);
    }

    #[test]
    fn energy_is_conserved_with_homogeneous_data(
        delta in 0.0f64..0.3,
        k in 0usize..3,
        order in 0usize..3,
        n in 1usize..4,
        flux in flux_strategy(),
        seed in any::<u64>(),
    ) {
        let preset = build_preset("test2", delta).unwrap();
        let op = std::sync::Arc::new(library_operator(preset.model.as_ref(), preset.domain, 2 * n, n, k, order, flux));
        let solver = WaveSolver::new(op.clone(), BoundaryData::Homogeneous);
        let mut r = rng(seed);
        let v0 = random_field(&op, &mut r);
        let w0 = random_field(&op, &mut r);
        let dt = suggest_dt(&op, 0.1);
        let mut state = solver.initialize(v0, &w0, 0.0, dt).unwrap();
        let e0 = discrete_energy(&state);
        solver.advance(&mut state, 100, |_| Ok(())).unwrap();
        let e1 = discrete_energy(&state);
        prop_assert!(((e1.fully_discrete - e0.fully_discrete) / e0.fully_discrete).abs() < 1e-10);
        prop_assert!(((e1.fully_discrete - e1.alternative) / e0.fully_discrete).abs() < 1e-12);
    }

    #[test]
    fn s_is_linear_and_acceleration_is_minus_its_adjoint(
        k in 0usize..3,
        order in 0usize..2,
        nx in 1usize..4,
        ny in 1usize..4,
        flux in flux_strategy(),
        alpha in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let preset = build_preset("test1", 0.2).unwrap();
        let op = library_operator(preset.model.as_ref(), preset.domain, nx, ny, k, order, flux);
        let mut r = rng(seed);
        let v = random_field(&op, &mut r);
        let w = random_field(&op, &mut r);
        let mut comb = v.clone();
        comb.axpy(alpha, &w);
        let (sv, sw, sc) = (op.compute_s(&v, None).unwrap(), op.compute_s(&w, None).unwrap(), op.compute_s(&comb, None).unwrap());
        let mut lin = sv.clone();
        lin.axpy(alpha, &sw);
        lin.axpy(-1.0, &sc);
        prop_assert!(lin.max_abs() <= 1e-11 * sc.max_abs().max(1.0));
        let lhs = op.compute_acceleration(&sv).unwrap().dot(&w);
        let rhs = -sv.dot(&sw);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (sv.norm_sq() * sw.norm_sq()).sqrt().max(1.0));
    }

    #[test]
    fn leapfrog_is_time_reversible(k in 0usize..3, steps in 1usize..60, seed in any::<u64>()) {
        let preset = build_preset("test1", 0.1).unwrap();
        let op = std::sync::Arc::new(library_operator(preset.model.as_ref(), preset.domain, 3, 3, k, 1, FluxConvention::default()));
        let solver = WaveSolver::new(op.clone(), BoundaryData::Homogeneous);
        let mut r = rng(seed);
        let v0 = random_field(&op, &mut r);
        let w0 = random_field(&op, &mut r);
        let mut state = solver.initialize(v0.clone(), &w0, 0.0, suggest_dt(&op, 0.1)).unwrap();
        solver.advance(&mut state, steps, |_| Ok(())).unwrap();
        let mut back = state.reversed();
        solver.advance(&mut back, steps, |_| Ok(())).unwrap();
        let mut d = back.v_curr.clone();
        d.axpy(-1.0, &v0);
        prop_assert!(d.max_abs() < 1e-9 * v0.max_abs().max(1.0), "{}", d.max_abs());
    }

    #[test]
    fn located_cell_contains_the_point(nx in 1usize..9, ny in 1usize..9, t in prop::array::uniform2(0.0f64..1.0)) {
        let mesh = Mesh2D::new(Rect::new([-1.0, 0.5], [2.0, 1.5]), nx, ny, &[]).unwrap();
        let x = [-1.0 + 3.0 * t[0], 0.5 + t[1]];
        let cell = mesh.locate(x, None).unwrap();
        prop_assert!(mesh.cell_bounds(cell).contains(x));
    }

    #[test]
    fn convergence_order_inverts_power_law(p in 0.5f64..6.0, e in 1e-8f64..1.0, h in 0.01f64..1.0) {
        let fine = e * 0.5f64.powf(p);
        prop_assert!((convergence_order(e, fine, h, h / 2.0) - p).abs() < 1e-10);
    }

    #[test]
    fn resolved_configs_round_trip(index in 0..CATALOG.len()) {
        let config = preset_config(CATALOG[index]).unwrap();
        let file = ConfigFile {
            experiment: Some(config.experiment),
            problem: Some(config.problem.clone()),
            delta: Some(config.delta),
            random_dims: Some(config.random_dims),
            gpc_order: Some(config.gpc_order),
            degree: Some(config.degree),
            h: Some(config.h.clone()),
            dt: Some(config.dt),
            final_time: Some(config.final_time),
            flux: Some(config.flux),
            boundary: Some(config.boundary),
            y_nodes: Some(config.y_nodes),
            cell_quadrature: Some(config.cell_quadrature),
            scaling: Some(config.scaling),
            sweep_orders: Some(config.sweep_orders.clone()),
            sample_every: Some(config.sample_every),
            perturbation_eps: Some(config.perturbation_eps.clone()),
            output: Some(config.output.clone()),
            preset: Some(config.name.clone()),
            ..ConfigFile::default()
        };
        let text = toml::to_string(&file).unwrap();
        let again = parse_config(&text, None).unwrap();
        prop_assert_eq!(again.defaults_filled.len(), 0);
        let mut expected = config.clone();
        expected.defaults_filled.clear();
        prop_assert_eq!(again, expected);
    }
}
