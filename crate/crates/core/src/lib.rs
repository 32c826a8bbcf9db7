//! Numerical laboratory for the concentrated-capacity heat equation
//! `b_ε u_t = div(a_ε ∇u)` on the flat cylinder `T^{N-1} × (0, 1)`.
//!
//! The capacity `b_ε` equals `φ(ε)` on an ε-layer next to the boundary and 1
//! elsewhere; the conductivity `a_ε` may degenerate at the boundary. Depending
//! on `κ = lim ε φ(ε)` the solutions approach the heat equation with a dynamic
//! (`κ ∈ (0, ∞)`), Neumann (`κ = 0`) or Dirichlet (`κ = ∞`) boundary condition.
//!
//! Module map:
//!
//! * [`geometry`]: grids, boundary distance, exact ε-layer partitions.
//! * [`coefficients`]: conductivity and capacity families, κ classification,
//!   the non-degeneracy integral.
//! * [`operators`]: stiffness/capacity assembly, layer averages, traces,
//!   energy, dissipation, the embedding `ι_ε`.
//! * [`solvers`]: backward Euler for the boundary-layer flow and the three
//!   limit problems, plus the dynamic-BC eigenmodes.
//! * [`diagnostics`]: residuals of the structural identities and convergence
//!   distances.
//! * [`gamma`]: recovery-sequence and liminf probes for Γ-convergence along
//!   `ι_ε`.
//! * [`experiments`]: scenario presets, config parsing, CSV reports.
//! * [`oracles`]: independent closed-form, quadrature and root-finding checks.

// `!(x > 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod gamma;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod oracles;
pub mod par;
pub mod quadrature;
pub mod solvers;

pub use coefficients::{CapacityProfile, ConductivityProfile, Kappa, NondegeneracyReport};
pub use error::{Error, Result};
pub use geometry::{Grid, LayerSpec};
pub use operators::{BoundaryValues, CoupledState, Field, OperatorPair};
pub use solvers::{BoundaryLayerProblem, LimitKind, LimitProblem, RunLedger};
