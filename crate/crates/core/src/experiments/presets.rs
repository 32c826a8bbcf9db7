//! Committed scenario defaults, one per regime.

use super::{BoundaryRecipe, ConfigError, InitialRecipe, Mode, ReferenceKind, Scenario};
use crate::coefficients::{CapacityProfile, ConductivityProfile};
use crate::par::Execution;

const NAMES: [&str; 9] = [
    "dynamic-k1",
    "neumann-k0",
    "dirichlet-kinf",
    "degenerate-a",
    "reilly",
    "strong-k1",
    "gamma",
    "dirichlet-strong",
    "neumann-strong",
];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn base(name: &str) -> Scenario {
    Scenario {
        name: name.into(),
        mode: Mode::Flow,
        dimension: 1,
        cells: 400,
        cells_periodic: None,
        refinements: Vec::new(),
        conductivity: ConductivityProfile::Canonical,
        capacity: CapacityProfile::KappaOverEps(1.0),
        u0: InitialRecipe::Cosine {
            k: 1,
            wavenumber: None,
        },
        w0: BoundaryRecipe::Trace,
        splice: true,
        sweep: vec![0.2, 0.1, 0.05, 0.025],
        dt: 2.5e-4,
        horizon: 0.25,
        snapshots: Vec::new(),
        references: vec![ReferenceKind::Dynamic],
        workers: None,
        execution: Execution::Parallel,
        output: None,
        warnings: Vec::new(),
    }
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Result<Scenario, ConfigError> {
    let s = match name {
        "dynamic-k1" => base(name),
        "neumann-k0" => Scenario {
            cells: 1280,
            capacity: CapacityProfile::Power(0.5),
            sweep: vec![0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125],
            references: vec![ReferenceKind::Neumann],
            ..base(name)
        },
        "dirichlet-kinf" => Scenario {
            cells: 800,
            capacity: CapacityProfile::Power(2.0),
            u0: InitialRecipe::Sine(1),
            w0: BoundaryRecipe::Constant(0.0),
            references: vec![ReferenceKind::Dirichlet],
            ..base(name)
        },
        "degenerate-a" => Scenario {
            conductivity: ConductivityProfile::DegenerateCubic,
            references: vec![ReferenceKind::Neumann, ReferenceKind::Dynamic],
            ..base(name)
        },
        "reilly" => Scenario {
            mode: Mode::Reilly,
            cells: 64,
            refinements: vec![64, 128, 256, 512],
            u0: InitialRecipe::Monomial(2),
            sweep: vec![0.25],
            dt: 0.0,
            horizon: 0.0,
            references: Vec::new(),
            ..base(name)
        },
        "strong-k1" => Scenario {
            dimension: 2,
            cells: 160,
            cells_periodic: Some(8),
            u0: InitialRecipe::Cosine {
                k: 1,
                wavenumber: Some(1),
            },
            sweep: vec![0.2, 0.1, 0.05],
            dt: 1e-3,
            horizon: 0.1,
            ..base(name)
        },
        "gamma" => Scenario {
            mode: Mode::Gamma,
            u0: InitialRecipe::Linear,
            sweep: vec![0.2, 0.1, 0.05, 0.025],
            dt: 0.01,
            horizon: 1.0,
            references: Vec::new(),
            ..base(name)
        },
        "dirichlet-strong" => Scenario {
            splice: false,
            capacity: CapacityProfile::Power(2.0),
            u0: InitialRecipe::Sine(1),
            w0: BoundaryRecipe::Constant(0.0),
            references: vec![ReferenceKind::Dirichlet],
            ..base(name)
        },
        "neumann-strong" => Scenario {
            splice: false,
            capacity: CapacityProfile::Power(0.5),
            references: vec![ReferenceKind::Neumann],
            ..base(name)
        },
        _ => {
            return Err(ConfigError::UnknownPreset {
                name: name.into(),
                available: NAMES.join(", "),
            });
        }
    };
    Ok(s)
}
