//! Structural identity checks run by `layerflow check`.

use crate::coefficients::{CapacityProfile, ConductivityProfile};
use crate::diagnostics::{edb_ledger_check, energy_equality_residual, reilly_residual};
use crate::error::Result;
use crate::geometry::{Grid, LayerSpec};
use crate::operators::{BoundaryValues, Field};
use crate::solvers::{
    run_boundary_layer, run_limit, BoundaryLayerProblem, LimitKind, LimitProblem,
};

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value.abs() <= tolerance,
        }
    }
}

/// Energy-dissipation balance, mass conservation and the Reilly identity on
/// small grids.
pub fn identity_suite() -> Result<Vec<IdentityCheck>> {
    let mut out = Vec::new();
    let grid = Grid::one_dimensional(100)?;
    let u0 = Field::from_fn(grid, |x, _| 1.0 + (std::f64::consts::PI * x).cos());
    for eps in [0.2, 0.1, 0.05] {
        let layer = LayerSpec::new(&grid, eps)?;
        let p = BoundaryLayerProblem::new(
            layer,
            ConductivityProfile::Canonical,
            CapacityProfile::KappaOverEps(1.0),
            u0.clone(),
            0.05,
            1e-3,
        );
        let ledger = run_boundary_layer(&p)?;
        out.push(IdentityCheck::new(
            format!("edb_eps{eps}"),
            edb_ledger_check(&ledger)?,
            1e-10,
        ));
        let mass_drift = ledger
            .steps
            .iter()
            .map(|s| (s.mass - ledger.initial_mass).abs() / ledger.initial_mass)
            .fold(0.0, f64::max);
        out.push(IdentityCheck::new(
            format!("mass_eps{eps}"),
            mass_drift,
            1e-10,
        ));
        out.push(IdentityCheck::new(
            format!("energy_equality_eps{eps}"),
            energy_equality_residual(&ledger)?.value,
            1e-2,
        ));
    }
    let w0 = BoundaryValues::constant(1, 1.0, -1.0);
    for kind in [
        LimitKind::Dynamic(1.0),
        LimitKind::Neumann,
        LimitKind::Dirichlet,
    ] {
        let ledger = run_limit(&LimitProblem::new(
            kind,
            u0.clone(),
            Some(w0.clone()),
            0.05,
            1e-3,
        ))?;
        out.push(IdentityCheck::new(
            format!("edb_{}", kind.label()),
            edb_ledger_check(&ledger)?,
            1e-10,
        ));
    }
    let fine = Grid::one_dimensional(512)?;
    let layer = LayerSpec::new(&fine, 0.25)?;
    let r = reilly_residual(
        &Field::from_fn(fine, |x, _| x * x),
        &layer,
        &ConductivityProfile::Canonical,
    )?;
    out.push(IdentityCheck::new(
        "reilly_x2_eps0.25",
        r.residual / r.lhs,
        1e-2,
    ));
    Ok(out)
}
