//! Scenarios, presets, config files and CSV reports.

pub mod checks;
pub mod config;
pub mod presets;
pub mod report;
pub mod runner;

use std::f64::consts::PI;
use std::path::PathBuf;

use crate::coefficients::{CapacityProfile, ConductivityProfile, Kappa};
use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::operators::{trace_at_depth, BoundaryValues, Field};
use crate::par::Execution;
use crate::solvers::{dynamic_frequency, mode_shape, LimitKind, Parity};

pub use checks::{identity_suite, IdentityCheck};
pub use config::{parse_config, ConfigError};
pub use presets::{preset, preset_names};
pub use report::{write_csv, ReportRow};
pub use runner::{run_scenario, run_sweep, SweepOutcome};

/// What a scenario computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// ε-sweep of boundary-layer runs against limit runs.
    Flow,
    /// Reilly identity terms across grid refinements.
    Reilly,
    /// Recovery-sequence probes for `E_ε` and `F_ε`.
    Gamma,
}

/// Named initial fields.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialRecipe {
    Constant(f64),
    /// `x_N`
    Linear,
    /// `cos(kπ x_N)`, times `cos(2π j x')` when a torus wavenumber is given
    Cosine {
        k: u32,
        wavenumber: Option<u32>,
    },
    /// `sin(kπ x_N)`
    Sine(u32),
    /// `x_N^n`
    Monomial(u32),
    /// Separable mode of the 1D dynamic problem.
    Eigenmode {
        kappa: f64,
        parity: Parity,
        m: usize,
    },
    /// `sin⁴` bump supported in `[0.3, 0.7]`
    Bump,
}

impl InitialRecipe {
    pub fn field(&self, grid: Grid) -> Result<Field> {
        Ok(match *self {
            Self::Constant(c) => Field::constant(grid, c),
            Self::Linear => Field::from_fn(grid, |x, _| x),
            Self::Cosine { k, wavenumber } => Field::from_fn(grid, |x, y| {
                let tangential = wavenumber.map_or(1.0, |j| (2.0 * PI * j as f64 * y).cos());
                (k as f64 * PI * x).cos() * tangential
            }),
            Self::Sine(k) => Field::from_fn(grid, |x, _| (k as f64 * PI * x).sin()),
            Self::Monomial(n) => Field::from_fn(grid, |x, _| x.powi(n as i32)),
            Self::Eigenmode { kappa, parity, m } => {
                let mu = dynamic_frequency(kappa, m, parity)?;
                Field::from_fn(grid, |x, _| mode_shape(mu, parity, x))
            }
            Self::Bump => Field::from_fn(grid, |x, _| {
                if (0.3..=0.7).contains(&x) {
                    (PI * (x - 0.3) / 0.4).sin().powi(4)
                } else {
                    0.0
                }
            }),
        })
    }

    pub fn label(&self) -> String {
        match self {
            Self::Constant(c) => format!("constant:{c}"),
            Self::Linear => "linear".into(),
            Self::Cosine {
                k,
                wavenumber: None,
            } => format!("cosine:{k}"),
            Self::Cosine {
                k,
                wavenumber: Some(j),
            } => format!("cosine:{k}:{j}"),
            Self::Sine(k) => format!("sine:{k}"),
            Self::Monomial(n) => format!("monomial:{n}"),
            Self::Eigenmode { kappa, parity, m } => {
                format!(
                    "eigenmode:{kappa}:{}:{m}",
                    if *parity == Parity::Odd {
                        "odd"
                    } else {
                        "even"
                    }
                )
            }
            Self::Bump => "bump".into(),
        }
    }
}

/// Initial boundary values `w₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryRecipe {
    /// `w₀ = γ u₀`
    Trace,
    Constant(f64),
}

impl BoundaryRecipe {
    pub fn values(&self, u0: &Field) -> Result<BoundaryValues> {
        match *self {
            Self::Trace => trace_at_depth(u0, 0.0),
            Self::Constant(c) => Ok(BoundaryValues::constant(u0.grid().cells_periodic(), c, c)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Trace => "trace".into(),
            Self::Constant(c) => format!("constant:{c}"),
        }
    }
}

/// Limit problem a sweep is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Dynamic,
    Neumann,
    Dirichlet,
}

impl ReferenceKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Dynamic => "dynamic",
            Self::Neumann => "neumann",
            Self::Dirichlet => "dirichlet",
        }
    }

    /// The reference matching a κ classification.
    pub fn for_kappa(kappa: Kappa) -> Self {
        match kappa {
            Kappa::Zero => Self::Neumann,
            Kappa::Finite(_) => Self::Dynamic,
            Kappa::Infinite => Self::Dirichlet,
        }
    }
}

/// A fully specified experiment.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    pub dimension: usize,
    pub cells: usize,
    pub cells_periodic: Option<usize>,
    /// Grid sizes for [`Mode::Reilly`].
    pub refinements: Vec<usize>,
    pub conductivity: ConductivityProfile,
    pub capacity: CapacityProfile,
    pub u0: InitialRecipe,
    pub w0: BoundaryRecipe,
    /// Start the ε-runs from the splice `χ_{Ω_ε} u₀ + χ_{Ω∖Ω_ε} w₀`.
    pub splice: bool,
    pub sweep: Vec<f64>,
    pub dt: f64,
    pub horizon: f64,
    pub snapshots: Vec<f64>,
    pub references: Vec<ReferenceKind>,
    pub workers: Option<usize>,
    pub execution: Execution,
    pub output: Option<PathBuf>,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dimension, self.cells, self.cells_periodic)
    }

    /// κ of the capacity family.
    pub fn kappa(&self) -> Result<Kappa> {
        self.capacity.kappa_limit()
    }

    /// Limit problem for a reference kind.
    pub fn limit_kind(&self, reference: ReferenceKind) -> Result<LimitKind> {
        Ok(match reference {
            ReferenceKind::Dynamic => match self.kappa()? {
                Kappa::Finite(k) => LimitKind::Dynamic(k),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "dynamic reference needs a finite kappa, capacity gives {other}"
                    )))
                }
            },
            ReferenceKind::Neumann => LimitKind::Neumann,
            ReferenceKind::Dirichlet => LimitKind::Dirichlet,
        })
    }

    /// Snapshot times including `T`, ascending.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let mut t = self.snapshots.clone();
        if !t.iter().any(|&s| (s - self.horizon).abs() <= 0.5 * self.dt) {
            t.push(self.horizon);
        }
        t.sort_by(f64::total_cmp);
        t
    }

    /// Depth of the fixed comparison region `Ω_δ`: the widest layer of the sweep.
    pub fn comparison_depth(&self) -> f64 {
        self.sweep.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest multiple of `cells` on which every ε is a grid multiple,
    /// capped at 4096.
    pub(crate) fn aligned_cells(cells: usize, sweep: &[f64]) -> Option<usize> {
        (1..)
            .map(|k| k * cells)
            .take_while(|&m| m <= 4096)
            .find(|&m| {
                sweep
                    .iter()
                    .all(|&e| Grid::one_dimensional(m).is_ok_and(|g| g.cells_in(e).is_some()))
            })
    }
}
