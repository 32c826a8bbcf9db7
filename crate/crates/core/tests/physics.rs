use layerflow::diagnostics::{boundary_flux_probe, edb_ledger_check};
use layerflow::experiments::{preset, run_scenario, InitialRecipe};
use layerflow::oracles::{dense_reference_run, ReferenceTarget};
use layerflow::solvers::{run_boundary_layer, run_limit};
use layerflow::{
    BoundaryLayerProblem, BoundaryValues, CapacityProfile, ConductivityProfile, Field, Grid,
    LayerSpec, LimitKind, LimitProblem,
};

fn layer_problem(u0: Field, eps: f64) -> BoundaryLayerProblem {
    let layer = LayerSpec::new(u0.grid(), eps).unwrap();
    BoundaryLayerProblem::new(
        layer,
        ConductivityProfile::Canonical,
        CapacityProfile::KappaOverEps(1.0),
        u0,
        0.1,
        1e-3,
    )
}

#[test]
fn energy_drop_equals_dissipation_terms() {
    let g = Grid::one_dimensional(80).unwrap();
    let u0 = Field::from_fn(g, |x, _| (3.0 * x).sin() + x * x);
    let ledger = run_boundary_layer(&layer_problem(u0, 0.1)).unwrap();
    let mut prev = ledger.initial_energy;
    for s in &ledger.steps {
        let balance = s.energy - prev + s.kinetic + s.extra;
        assert!(balance.abs() < 1e-12 * prev.max(1.0), "{balance}");
        prev = s.energy;
    }
    assert!(edb_ledger_check(&ledger).unwrap() < 1e-12);
}

#[test]
fn ordered_data_stay_ordered() {
    let g = Grid::one_dimensional(80).unwrap();
    let low = Field::from_fn(g, |x, _| (2.0 * x).cos());
    let high = Field::from_fn(g, |x, _| (2.0 * x).cos() + 0.1 + 0.2 * x * (1.0 - x));
    let a = run_boundary_layer(&layer_problem(low.clone(), 0.1)).unwrap();
    let b = run_boundary_layer(&layer_problem(high, 0.1)).unwrap();
    let (ua, ub) = (
        &a.final_snapshot().unwrap().field,
        &b.final_snapshot().unwrap().field,
    );
    assert!(ua.values().iter().zip(ub.values()).all(|(x, y)| x <= y));
    // maximum principle
    let fa = ua.values();
    assert!(fa
        .iter()
        .all(|v| *v <= low.max() + 1e-12 && *v >= low.min() - 1e-12));
}

#[test]
fn coupled_mass_is_conserved_in_the_dynamic_limit() {
    let g = Grid::new(2, 40, Some(8)).unwrap();
    let kappa = 0.7;
    let u0 = Field::from_fn(g, |x, y| {
        (std::f64::consts::PI * x).cos() + 0.3 * (2.0 * std::f64::consts::PI * y).sin()
    });
    let w0 = BoundaryValues::constant(8, 2.0, -0.5);
    let p = LimitProblem::new(LimitKind::Dynamic(kappa), u0, Some(w0), 0.05, 1e-3);
    let ledger = run_limit(&p).unwrap();
    // conjugate gradients run to a 1e-10 relative residual
    for s in &ledger.steps {
        assert!(
            (s.mass - ledger.initial_mass).abs() < 1e-8,
            "{} vs {}",
            s.mass,
            ledger.initial_mass
        );
    }
}

#[test]
fn boundary_flux_vanishes_under_refinement() {
    let mut fluxes = Vec::new();
    for m in [80, 160, 320] {
        let g = Grid::one_dimensional(m).unwrap();
        let u0 = Field::from_fn(g, |x, _| (std::f64::consts::PI * x).cos());
        let p = layer_problem(u0, 0.1);
        let ledger = run_boundary_layer(&p).unwrap();
        let probe = boundary_flux_probe(
            &ledger.final_snapshot().unwrap().field,
            &p.operators().unwrap(),
        )
        .unwrap();
        fluxes.push(probe.face_flux / probe.operator_norm);
    }
    assert!(
        fluxes[1] < 0.6 * fluxes[0] && fluxes[2] < 0.6 * fluxes[1],
        "{fluxes:?}"
    );
}

#[test]
fn constant_data_give_zero_error_rows() {
    let mut s = preset("dynamic-k1").unwrap();
    s.cells = 80;
    s.dt = 1e-2;
    s.horizon = 0.05;
    s.sweep = vec![0.1, 0.05];
    s.u0 = InitialRecipe::Constant(0.75);
    let rows = run_scenario(&s).unwrap();
    for r in rows.iter().filter(|r| {
        r.quantity.starts_with("l2_")
            || r.quantity.contains("edb")
            || r.quantity.contains("residual")
    }) {
        assert!(r.value.abs() < 1e-12, "{} = {}", r.quantity, r.value);
    }
}

#[test]
fn main_path_agrees_with_the_dense_reference() {
    let mut s = preset("dynamic-k1").unwrap();
    s.cells = 40;
    s.dt = 2e-3;
    s.horizon = 0.1;
    s.sweep = vec![0.1];
    let g = s.grid().unwrap();
    let u0 = s.u0.field(g).unwrap();
    let w0 = s.w0.values(&u0).unwrap();

    let dense =
        dense_reference_run(&s, ReferenceTarget::Limit(LimitKind::Dynamic(1.0)), 8).unwrap();
    let lim = run_limit(&LimitProblem::new(
        LimitKind::Dynamic(1.0),
        u0.clone(),
        Some(w0.clone()),
        s.horizon,
        s.dt,
    ))
    .unwrap();
    let err = lim
        .final_snapshot()
        .unwrap()
        .field
        .difference(dense.last().unwrap())
        .unwrap()
        .l2_norm();
    assert!(err < 5e-3, "limit {err}");

    let layer = LayerSpec::new(&g, 0.1).unwrap();
    let spliced = layerflow::solvers::well_prepared_data(&u0, &w0, &layer).unwrap();
    let bl = run_boundary_layer(&BoundaryLayerProblem::new(
        layer,
        s.conductivity.clone(),
        s.capacity.clone(),
        spliced,
        s.horizon,
        s.dt,
    ))
    .unwrap();
    let dense = dense_reference_run(&s, ReferenceTarget::BoundaryLayer(0.1), 8).unwrap();
    let err = bl
        .final_snapshot()
        .unwrap()
        .field
        .difference(dense.last().unwrap())
        .unwrap()
        .l2_norm();
    assert!(err < 5e-3, "boundary layer {err}");
}

#[test]
fn dense_reference_guards() {
    let mut s = preset("strong-k1").unwrap();
    assert!(dense_reference_run(&s, ReferenceTarget::BoundaryLayer(0.1), 4).is_err());
    s = preset("dynamic-k1").unwrap();
    assert!(dense_reference_run(&s, ReferenceTarget::BoundaryLayer(0.1), 2).is_err());
    assert!(matches!(
        dense_reference_run(&s, ReferenceTarget::BoundaryLayer(0.1), 4096),
        Err(layerflow::Error::MemoryGuard(_))
    ));
}

#[test]
fn dense_reference_of_constant_data_is_constant() {
    let mut s = preset("dynamic-k1").unwrap();
    s.cells = 40;
    s.dt = 1e-2;
    s.horizon = 0.05;
    s.u0 = InitialRecipe::Constant(0.3);
    for target in [
        ReferenceTarget::BoundaryLayer(0.1),
        ReferenceTarget::Limit(LimitKind::Dynamic(1.0)),
    ] {
        for f in dense_reference_run(&s, target, 4).unwrap() {
            assert!(f.values().iter().all(|v| (v - 0.3).abs() < 1e-12));
        }
    }
}

#[test]
fn dense_reference_self_converges() {
    let mut s = preset("dynamic-k1").unwrap();
    s.cells = 40;
    s.dt = 2e-3;
    s.horizon = 0.1;
    let target = ReferenceTarget::BoundaryLayer(0.1);
    let r4 = dense_reference_run(&s, target, 4).unwrap();
    let r8 = dense_reference_run(&s, target, 8).unwrap();
    let r16 = dense_reference_run(&s, target, 16).unwrap();
    let d1 = r4
        .last()
        .unwrap()
        .difference(r8.last().unwrap())
        .unwrap()
        .l2_norm();
    let d2 = r8
        .last()
        .unwrap()
        .difference(r16.last().unwrap())
        .unwrap()
        .l2_norm();
    assert!(d1 < 1e-3 && d2 < 0.6 * d1, "{d1} {d2}");
}

#[test]
fn dense_dirichlet_reference_matches_the_separable_solution() {
    let mut s = preset("dirichlet-kinf").unwrap();
    s.cells = 50;
    s.dt = 1e-3;
    s.horizon = 0.1;
    let dense = dense_reference_run(&s, ReferenceTarget::Limit(LimitKind::Dirichlet), 8).unwrap();
    let g = s.grid().unwrap();
    let pi = std::f64::consts::PI;
    let exact = Field::from_fn(g, |x, _| (-pi * pi * 0.1f64).exp() * (pi * x).sin());
    let err = dense.last().unwrap().difference(&exact).unwrap().l2_norm();
    // O(h² + dt) with h = 1/400 and dt = 1.25e-4
    assert!(err < 5e-4, "{err}");
}
