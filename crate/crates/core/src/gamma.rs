//! Γ-convergence probes along the embedding `ι_ε(v) = (v, m_ε v)`.
//!
//! The recovery half uses the constant sequence for `E_ε` and the splice
//! `χ_{Ω_ε} u + χ_{Ω∖Ω_ε} w` for `F_ε`. The liminf half is only sampled.

use std::fmt;

use crate::coefficients::{CapacityProfile, ConductivityProfile, Kappa};
use crate::error::{Error, Result};
use crate::geometry::LayerSpec;
use crate::operators::{
    assemble, assemble_stiffness, average_m_eps, embed_iota, energy, functional_f, trace_at_depth,
    BoundaryValues, CoupledState, Field, OperatorPair,
};
use crate::solvers::{well_prepared_data, LimitKind, RunKind, RunLedger};

/// Extended-real functional value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalValue {
    Finite(f64),
    Infinite,
}

impl FunctionalValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }
}

impl fmt::Display for FunctionalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GammaProbe {
    pub target: CoupledState,
    pub epsilon_sweep: Vec<f64>,
    pub functional_values: Vec<FunctionalValue>,
    pub limit_value: FunctionalValue,
    /// `‖ι_ε(u^ε) − (u, w)‖_{H_0^κ}` per ε.
    pub embedding_distances: Vec<f64>,
    /// Set when the target is off the trace-consistent diagonal `w = γu`.
    pub flagged: bool,
}

impl GammaProbe {
    /// `|F_ε − F_0|` per ε, `None` for an infinite limit.
    pub fn gaps(&self) -> Option<Vec<f64>> {
        let limit = self.limit_value.finite()?;
        self.functional_values
            .iter()
            .map(|v| v.finite().map(|v| (v - limit).abs()))
            .collect()
    }
}

fn check_sweep(sweep: &[f64]) -> Result<()> {
    if sweep.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon sweep".into()));
    }
    if sweep.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "epsilon sweep must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "kappa must lie in (0, inf), got {kappa}"
        )));
    }
    Ok(())
}

/// `E_ε(u)` along the constant recovery sequence against
/// `E₀(u, w) = ½∫|∇u|²` if `w = γu` and `+∞` otherwise.
pub fn recovery_e(
    u: &Field,
    w: &BoundaryValues,
    kappa: f64,
    sweep: &[f64],
    a: &ConductivityProfile,
) -> Result<GammaProbe> {
    check_sweep(sweep)?;
    check_kappa(kappa)?;
    let g = *u.grid();
    let gamma_u = trace_at_depth(u, 0.0)?;
    let scale = u.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let on_diagonal = gamma_u.difference(w)?.norm() <= 1e-12 * scale;
    let unit = OperatorPair::unit(&g, g.weights(), false)?;
    let limit_value = if on_diagonal {
        FunctionalValue::Finite(energy(u, &unit))
    } else {
        FunctionalValue::Infinite
    };
    let target = CoupledState {
        interior: u.clone(),
        boundary: w.clone(),
        kappa,
    };
    let mut values = Vec::with_capacity(sweep.len());
    let mut distances = Vec::with_capacity(sweep.len());
    for &eps in sweep {
        let layer = LayerSpec::new(&g, eps)?;
        let pair = assemble_stiffness(&g, &layer, a)?;
        values.push(FunctionalValue::Finite(energy(u, &pair)));
        distances.push(embed_iota(u, &layer, kappa)?.distance(&target)?);
    }
    Ok(GammaProbe {
        target,
        epsilon_sweep: sweep.to_vec(),
        functional_values: values,
        limit_value,
        embedding_distances: distances,
        flagged: !on_diagonal,
    })
}

/// `F_ε` of the spliced trajectory against
/// `F_bs(u, w) = ½∫∫u_t² + ½κ∫∫_{∂Ω}w_t²`.
pub fn recovery_f(
    u_traj: &[Field],
    w_traj: &[BoundaryValues],
    capacity: &CapacityProfile,
    sweep: &[f64],
    dt: f64,
) -> Result<GammaProbe> {
    check_sweep(sweep)?;
    let kappa = match capacity.kappa_limit()? {
        Kappa::Finite(k) => k,
        other => {
            return Err(Error::InvalidArgument(format!(
                "F recovery needs a finite positive kappa, got {other}"
            )));
        }
    };
    if u_traj.len() < 2 || u_traj.len() != w_traj.len() {
        return Err(Error::InvalidArgument(
            "trajectories need matching lengths of at least 2".into(),
        ));
    }
    let g = *u_traj[0].grid();
    let unit = OperatorPair::unit(&g, g.weights(), false)?;
    let mut limit = functional_f(u_traj, dt, &unit)?;
    for w in w_traj.windows(2) {
        let v = w[1].difference(&w[0])?.scaled(1.0 / dt);
        limit += 0.5 * kappa * dt * v.norm_squared();
    }
    let last = u_traj.len() - 1;
    let target = CoupledState {
        interior: u_traj[last].clone(),
        boundary: w_traj[last].clone(),
        kappa,
    };
    let mut values = Vec::with_capacity(sweep.len());
    let mut distances = Vec::with_capacity(sweep.len());
    for &eps in sweep {
        let layer = LayerSpec::new(&g, eps)?;
        let pair = assemble(&g, &layer, &ConductivityProfile::Canonical, capacity)?;
        let spliced = u_traj
            .iter()
            .zip(w_traj)
            .map(|(u, w)| well_prepared_data(u, w, &layer))
            .collect::<Result<Vec<_>>>()?;
        values.push(FunctionalValue::Finite(functional_f(&spliced, dt, &pair)?));
        distances.push(embed_iota(&spliced[last], &layer, kappa)?.distance(&target)?);
    }
    Ok(GammaProbe {
        target,
        epsilon_sweep: sweep.to_vec(),
        functional_values: values,
        limit_value: FunctionalValue::Finite(limit),
        embedding_distances: distances,
        flagged: false,
    })
}

/// A user-supplied sequence `ε ↦ v^ε` for probing the liminf of `E_ε`.
pub trait AdversarialSequence {
    fn member(&self, layer: &LayerSpec) -> Result<Field>;
}

impl<F> AdversarialSequence for F
where
    F: Fn(&LayerSpec) -> Result<Field>,
{
    fn member(&self, layer: &LayerSpec) -> Result<Field> {
        self(layer)
    }
}

/// Evaluates `E_ε(v^ε)` and `‖ι_ε(v^ε) − (u, w)‖` along a user sequence.
/// The limit value is `E₀(u, w)`, infinite off the diagonal `w = γu`.
pub fn adversarial_probe_e(
    sequence: &dyn AdversarialSequence,
    u: &Field,
    w: &BoundaryValues,
    kappa: f64,
    sweep: &[f64],
    a: &ConductivityProfile,
) -> Result<GammaProbe> {
    let mut probe = recovery_e(u, w, kappa, sweep, a)?;
    let g = *u.grid();
    for (i, &eps) in sweep.iter().enumerate() {
        let layer = LayerSpec::new(&g, eps)?;
        let v = sequence.member(&layer)?;
        let pair = assemble_stiffness(&g, &layer, a)?;
        probe.functional_values[i] = FunctionalValue::Finite(energy(&v, &pair));
        probe.embedding_distances[i] = embed_iota(&v, &layer, kappa)?.distance(&probe.target)?;
    }
    Ok(probe)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiminfEntry {
    pub epsilon: f64,
    /// `∫_0^T I_ε(u^ε) dt`
    pub i_eps: f64,
    /// `∫_0^T I_0(u) dt` from the limit run
    pub i_limit: f64,
    /// `ε · i_limit`
    pub tolerance: f64,
    pub holds: bool,
}

/// Samples `∫I_ε(u^ε) ≥ ∫I_0(u) − tol_ε` along a sweep of runs.
pub fn liminf_probe_i(bl_ledgers: &[RunLedger], limit: &RunLedger) -> Result<Vec<LiminfEntry>> {
    match limit.kind {
        RunKind::Limit(LimitKind::Dirichlet) => {
            return Err(Error::InvalidArgument(
                "liminf probe does not cover the Dirichlet regime".into(),
            ));
        }
        RunKind::BoundaryLayer { .. } => {
            return Err(Error::InvalidArgument(
                "liminf probe needs a limit ledger as reference".into(),
            ));
        }
        RunKind::Limit(_) => {}
    }
    let eps: Vec<f64> = bl_ledgers
        .iter()
        .map(|l| {
            l.epsilon()
                .ok_or_else(|| Error::Mismatch("sweep contains a limit ledger".into()))
        })
        .collect::<Result<_>>()?;
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Mismatch(
            "sweep must be strictly decreasing in epsilon".into(),
        ));
    }
    let integrate = |l: &RunLedger| l.steps.iter().map(|s| l.dt * s.dissipation).sum::<f64>();
    let i_limit = integrate(limit);
    bl_ledgers
        .iter()
        .zip(eps)
        .map(|(l, epsilon)| {
            if l.steps.len() != limit.steps.len()
                || l.dt != limit.dt
                || l.snapshot_times() != limit.snapshot_times()
            {
                return Err(Error::Mismatch(format!(
                    "ledger at epsilon = {epsilon} does not match the limit run"
                )));
            }
            let i_eps = integrate(l);
            let tolerance = epsilon * i_limit;
            Ok(LiminfEntry {
                epsilon,
                i_eps,
                i_limit,
                tolerance,
                holds: i_eps >= i_limit - tolerance,
            })
        })
        .collect()
}

/// `(m_ε u, γu)` distance used by the recovery-embedding rate.
pub fn average_trace_distance(u: &Field, layer: &LayerSpec) -> Result<f64> {
    average_m_eps(u, layer)?.distance(&trace_at_depth(u, 0.0)?)
}
