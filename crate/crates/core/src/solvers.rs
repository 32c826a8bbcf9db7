//! Backward Euler for the boundary-layer flow and the limit problems.
//!
//! Each step solves `(B + dt K) u⁺ = B u`. Taking the inner product with
//! `δ = u⁺ − u` gives the per-step balance
//! `E(u⁺) − E(u) + ⟨Bδ, δ⟩/dt + ½⟨Kδ, δ⟩ = 0`, which the ledger records.

use crate::coefficients::{CapacityProfile, ConductivityProfile};
use crate::error::{Error, Result};
use crate::geometry::{Grid, LayerSpec};
use crate::linalg::{conjugate_gradient, solve_tridiagonal};
use crate::operators::{assemble, average_m_eps, energy, BoundaryValues, Field, OperatorPair};

/// Default relative tolerance of the linear solves.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const CG_MAX_ITERATIONS: usize = 50_000;

/// One implicit step `(B + dt K) u⁺ = B u`.
pub fn step_backward_euler(u: &Field, dt: f64, pair: &OperatorPair, tol: f64) -> Result<Field> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if u.grid() != pair.grid() {
        return Err(Error::Mismatch(
            "field and operators live on different grids".into(),
        ));
    }
    let g = *pair.grid();
    let b = pair.capacity();
    let rhs: Vec<f64> = (0..g.node_count())
        .map(|i| {
            if pair.is_free(i) {
                b[i] * u.values()[i]
            } else {
                0.0
            }
        })
        .collect();
    let values = if g.dimension() == 1 {
        solve_1d(&g, dt, pair, &rhs)?
    } else {
        solve_cg(&g, dt, pair, &rhs, u.values(), tol)?
    };
    Ok(Field::from_raw(g, values))
}

fn solve_1d(g: &Grid, dt: f64, pair: &OperatorPair, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = g.rows();
    let m = g.cells_normal();
    let h = g.h();
    let b = pair.capacity();
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut diag = b.to_vec();
    for (j, a) in pair.face_conductivity().iter().enumerate() {
        let c = dt * a / h;
        diag[j] += c;
        diag[j + 1] += c;
        upper[j] = -c;
        lower[j + 1] = -c;
    }
    if pair.pinned_boundary() {
        for j in [0, m] {
            diag[j] = 1.0;
            lower[j] = 0.0;
            upper[j] = 0.0;
        }
        lower[1] = 0.0;
        upper[m - 1] = 0.0;
    }
    solve_tridiagonal(&lower, &diag, &upper, rhs)
}

fn solve_cg(
    g: &Grid,
    dt: f64,
    pair: &OperatorPair,
    rhs: &[f64],
    guess: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let b = pair.capacity();
    let free: Vec<bool> = (0..g.node_count()).map(|i| pair.is_free(i)).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        let masked: Vec<f64> = x
            .iter()
            .zip(&free)
            .map(|(v, &f)| if f { *v } else { 0.0 })
            .collect();
        out.iter_mut().for_each(|o| *o = 0.0);
        pair.add_stiffness(&masked, dt, out);
        for i in 0..out.len() {
            out[i] = if free[i] { out[i] + b[i] * x[i] } else { x[i] };
        }
    };
    let kd = pair.stiffness_diagonal();
    let diagonal: Vec<f64> = (0..g.node_count())
        .map(|i| if free[i] { b[i] + dt * kd[i] } else { 1.0 })
        .collect();
    let start: Vec<f64> = guess
        .iter()
        .zip(&free)
        .map(|(v, &f)| if f { *v } else { 0.0 })
        .collect();
    Ok(conjugate_gradient(apply, &diagonal, rhs, &start, tol, CG_MAX_ITERATIONS)?.solution)
}

/// What produced a ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunKind {
    BoundaryLayer { epsilon: f64 },
    Limit(LimitKind),
}

/// Per-step ledger entry for the step ending at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub time: f64,
    /// `E(u^{n+1})`
    pub energy: f64,
    /// `dt ⟨B v, v⟩` with `v = δ/dt`
    pub kinetic: f64,
    /// `(dt²/2) ⟨A v, v⟩`
    pub extra: f64,
    /// `I(u^{n+1})`
    pub dissipation: f64,
    /// `m_ε u^{n+1}` for boundary-layer runs, the boundary nodes for limits.
    pub trace: BoundaryValues,
    /// `E(u^{n+1}) − E(u^n) + kinetic + extra`
    pub edb_residual: f64,
    /// `⟨B u^{n+1}, 1⟩`
    pub mass: f64,
    /// `½ ⟨B u^{n+1}, u^{n+1}⟩`
    pub half_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: Field,
    pub trace: BoundaryValues,
}

/// Everything a run records. Write-once: produced by [`run_boundary_layer`]
/// or [`run_limit`].
#[derive(Debug, Clone)]
pub struct RunLedger {
    pub kind: RunKind,
    pub grid: Grid,
    pub dt: f64,
    /// The state the evolution starts from (after splicing or projection).
    pub initial: Field,
    pub initial_energy: f64,
    /// `½ ⟨B u₀, u₀⟩`
    pub initial_half_mass: f64,
    pub initial_mass: f64,
    pub initial_trace: BoundaryValues,
    pub steps: Vec<StepRecord>,
    pub snapshots: Vec<Snapshot>,
}

impl RunLedger {
    pub fn horizon(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.time)
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self.kind {
            RunKind::BoundaryLayer { epsilon } => Some(epsilon),
            RunKind::Limit(_) => None,
        }
    }

    /// Snapshot recorded at `time` (within `dt/2`).
    pub fn snapshot_at(&self, time: f64) -> Result<&Snapshot> {
        self.snapshots
            .iter()
            .find(|s| (s.time - time).abs() <= 0.5 * self.dt)
            .ok_or_else(|| Error::SnapshotMismatch(format!("no snapshot at t = {time}")))
    }

    /// `E(u(t))` at a step time.
    pub fn energy_at(&self, time: f64) -> Result<f64> {
        if time.abs() <= 0.5 * self.dt {
            return Ok(self.initial_energy);
        }
        self.steps
            .iter()
            .find(|s| (s.time - time).abs() <= 0.5 * self.dt)
            .map(|s| s.energy)
            .ok_or_else(|| Error::SnapshotMismatch(format!("no step at t = {time}")))
    }

    pub fn final_snapshot(&self) -> Result<&Snapshot> {
        self.snapshots.last().ok_or(Error::EmptyLedger)
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }
}

fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and T > 0, got dt = {dt}, T = {horizon}"
        )));
    }
    let n = (horizon / dt).round();
    if (n * dt - horizon).abs() > 1e-9 * horizon.max(1.0) || n < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "T = {horizon} is not a multiple of dt = {dt}"
        )));
    }
    Ok(n as usize)
}

fn snapshot_steps(times: &[f64], dt: f64, steps: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(times.len() + 1);
    for &t in times {
        let n = (t / dt).round();
        if t < 0.0 || (n * dt - t).abs() > 1e-9 * t.max(1.0) || n as usize > steps {
            return Err(Error::SnapshotMismatch(format!(
                "t = {t} is not a step time in [0, {}]",
                steps as f64 * dt
            )));
        }
        out.push(n as usize);
    }
    out.push(steps);
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn evolve(
    kind: RunKind,
    pair: &OperatorPair,
    initial: Field,
    dt: f64,
    horizon: f64,
    snapshots: &[f64],
    tol: f64,
    trace: &dyn Fn(&Field) -> Result<BoundaryValues>,
) -> Result<RunLedger> {
    let steps = step_count(horizon, dt)?;
    let wanted = snapshot_steps(snapshots, dt, steps)?;
    let mass_of = |u: &Field| {
        pair.capacity()
            .iter()
            .zip(u.values())
            .map(|(b, v)| b * v)
            .sum::<f64>()
    };
    let initial_energy = energy(&initial, pair);
    let initial_trace = trace(&initial)?;
    let mut ledger = RunLedger {
        kind,
        grid: *pair.grid(),
        dt,
        initial_energy,
        initial_half_mass: 0.5 * pair.capacity_form(initial.values(), initial.values()),
        initial_mass: mass_of(&initial),
        initial_trace: initial_trace.clone(),
        initial: initial.clone(),
        steps: Vec::with_capacity(steps),
        snapshots: Vec::with_capacity(wanted.len()),
    };
    if wanted.first() == Some(&0) {
        ledger.snapshots.push(Snapshot {
            time: 0.0,
            field: initial.clone(),
            trace: initial_trace,
        });
    }
    let mut u = initial;
    let mut e = initial_energy;
    let mut next = wanted.iter().copied().filter(|&n| n > 0).peekable();
    for n in 1..=steps {
        let u1 = step_backward_euler(&u, dt, pair, tol)?;
        let delta: Vec<f64> = u1
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| a - b)
            .collect();
        let e1 = energy(&u1, pair);
        let kinetic = pair.capacity_form(&delta, &delta) / dt;
        let extra = 0.5 * pair.stiffness_form(&delta, &delta);
        let time = n as f64 * dt;
        let tr = trace(&u1)?;
        ledger.steps.push(StepRecord {
            time,
            energy: e1,
            kinetic,
            extra,
            dissipation: pair.dissipation_of(u1.values()),
            trace: tr.clone(),
            edb_residual: e1 - e + kinetic + extra,
            mass: mass_of(&u1),
            half_mass: 0.5 * pair.capacity_form(u1.values(), u1.values()),
        });
        if next.peek() == Some(&n) {
            next.next();
            ledger.snapshots.push(Snapshot {
                time,
                field: u1.clone(),
                trace: tr,
            });
        }
        u = u1;
        e = e1;
    }
    Ok(ledger)
}

/// The ε-problem `b_ε u_t = div(a_ε ∇u)` with natural boundary closure.
#[derive(Debug, Clone)]
pub struct BoundaryLayerProblem {
    pub grid: Grid,
    pub layer: LayerSpec,
    pub conductivity: ConductivityProfile,
    pub capacity: CapacityProfile,
    pub initial: Field,
    pub horizon: f64,
    pub dt: f64,
    /// Times (multiples of `dt`) at which full fields are kept; `T` is always kept.
    pub snapshots: Vec<f64>,
    pub tolerance: f64,
}

impl BoundaryLayerProblem {
    pub fn new(
        layer: LayerSpec,
        conductivity: ConductivityProfile,
        capacity: CapacityProfile,
        initial: Field,
        horizon: f64,
        dt: f64,
    ) -> Self {
        Self {
            grid: *layer.grid(),
            layer,
            conductivity,
            capacity,
            initial,
            horizon,
            dt,
            snapshots: Vec::new(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshots = times;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn operators(&self) -> Result<OperatorPair> {
        assemble(&self.grid, &self.layer, &self.conductivity, &self.capacity)
    }
}

/// Runs the ε-problem, recording `m_ε u` at every step.
pub fn run_boundary_layer(problem: &BoundaryLayerProblem) -> Result<RunLedger> {
    problem.layer.check_grid(&problem.grid)?;
    if problem.initial.grid() != &problem.grid {
        return Err(Error::Mismatch(
            "initial field is not on the problem grid".into(),
        ));
    }
    let pair = problem.operators()?;
    let layer = problem.layer;
    evolve(
        RunKind::BoundaryLayer {
            epsilon: layer.epsilon(),
        },
        &pair,
        problem.initial.clone(),
        problem.dt,
        problem.horizon,
        &problem.snapshots,
        problem.tolerance,
        &|u| average_m_eps(u, &layer),
    )
}

/// Splice `χ_{d ≥ ε} u₀ + χ_{d < ε} w₀`: layer nodes take the boundary value
/// of their component and column, bulk nodes (including `d = ε`) keep `u₀`.
pub fn well_prepared_data(u0: &Field, w0: &BoundaryValues, layer: &LayerSpec) -> Result<Field> {
    let g = *u0.grid();
    layer.check_grid(&g)?;
    let p = g.cells_periodic();
    if w0.bottom.len() != p || w0.top.len() != p {
        return Err(Error::Mismatch(format!(
            "boundary data needs {p} values per side"
        )));
    }
    let k = layer.layer_cells();
    let values = (0..g.node_count())
        .map(|i| {
            let (row, col) = g.position(i);
            if row < k {
                w0.bottom[col]
            } else if layer.is_layer_row(row) {
                w0.top[col]
            } else {
                u0.values()[i]
            }
        })
        .collect();
    Ok(Field::from_raw(g, values))
}

/// Which limit problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitKind {
    /// Heat equation with `κ w_t + ∂u/∂ν = 0`, `w = γu`.
    Dynamic(f64),
    Neumann,
    Dirichlet,
}

impl LimitKind {
    pub fn label(&self) -> &'static str {
        match self {
            LimitKind::Dynamic(_) => "dynamic",
            LimitKind::Neumann => "neumann",
            LimitKind::Dirichlet => "dirichlet",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimitProblem {
    pub kind: LimitKind,
    pub grid: Grid,
    pub initial: Field,
    /// Initial boundary values; used by the dynamic kind only.
    pub boundary: Option<BoundaryValues>,
    pub horizon: f64,
    pub dt: f64,
    pub snapshots: Vec<f64>,
    pub tolerance: f64,
}

impl LimitProblem {
    pub fn new(
        kind: LimitKind,
        initial: Field,
        boundary: Option<BoundaryValues>,
        horizon: f64,
        dt: f64,
    ) -> Self {
        Self {
            kind,
            grid: *initial.grid(),
            initial,
            boundary,
            horizon,
            dt,
            snapshots: Vec::new(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshots = times;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

fn boundary_trace(u: &Field) -> Result<BoundaryValues> {
    let g = u.grid();
    Ok(BoundaryValues {
        bottom: u.row(0).to_vec(),
        top: u.row(g.cells_normal()).to_vec(),
    })
}

/// Mass operator and starting state of a limit problem.
pub fn limit_operators(problem: &LimitProblem) -> Result<(OperatorPair, Field)> {
    let g = problem.grid;
    if problem.initial.grid() != &g {
        return Err(Error::Mismatch(
            "initial field is not on the problem grid".into(),
        ));
    }
    let m = g.cells_normal();
    let on_boundary = |i: usize| {
        let row = g.position(i).0;
        row == 0 || row == m
    };
    match problem.kind {
        LimitKind::Dynamic(kappa) => {
            if !(kappa > 0.0 && kappa.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "dynamic limit needs kappa in (0, inf), got {kappa}"
                )));
            }
            let w0 = problem.boundary.as_ref().ok_or_else(|| {
                Error::InvalidArgument("dynamic limit needs initial boundary values".into())
            })?;
            let p = g.cells_periodic();
            if w0.bottom.len() != p || w0.top.len() != p {
                return Err(Error::Mismatch(format!(
                    "boundary data needs {p} values per side"
                )));
            }
            let meas = kappa * g.boundary_node_measure();
            let mass: Vec<f64> = (0..g.node_count())
                .map(|i| g.node_weight(i) + if on_boundary(i) { meas } else { 0.0 })
                .collect();
            // a boundary node carries both u₀ (weight W) and w₀ (weight κ/P)
            let values = (0..g.node_count())
                .map(|i| {
                    let (row, col) = g.position(i);
                    let u = problem.initial.values()[i];
                    let w = if row == 0 {
                        w0.bottom[col]
                    } else if row == m {
                        w0.top[col]
                    } else {
                        return u;
                    };
                    (g.node_weight(i) * u + meas * w) / mass[i]
                })
                .collect();
            Ok((
                OperatorPair::unit(&g, mass, false)?,
                Field::from_raw(g, values),
            ))
        }
        LimitKind::Neumann => Ok((
            OperatorPair::unit(&g, g.weights(), false)?,
            problem.initial.clone(),
        )),
        LimitKind::Dirichlet => {
            let values = (0..g.node_count())
                .map(|i| {
                    if on_boundary(i) {
                        0.0
                    } else {
                        problem.initial.values()[i]
                    }
                })
                .collect();
            Ok((
                OperatorPair::unit(&g, g.weights(), true)?,
                Field::from_raw(g, values),
            ))
        }
    }
}

/// Runs a limit problem; the ledger trace is the boundary-node trajectory.
pub fn run_limit(problem: &LimitProblem) -> Result<RunLedger> {
    let (pair, start) = limit_operators(problem)?;
    evolve(
        RunKind::Limit(problem.kind),
        &pair,
        start,
        problem.dt,
        problem.horizon,
        &problem.snapshots,
        problem.tolerance,
        &boundary_trace,
    )
}

/// Parity of a separable 1D mode about `x = ½`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `cos(μ(x − ½))`
    Even,
    /// `sin(μ(x − ½))`
    Odd,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if !(flo * fhi < 0.0) {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Frequency `μ` of the `m`-th (1-based) nonconstant mode of the 1D dynamic
/// problem with parameter κ.
pub fn dynamic_frequency(kappa: f64, m: usize, parity: Parity) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "need kappa in (0, inf) and m >= 1, got {kappa}, {m}"
        )));
    }
    use std::f64::consts::PI;
    let shift = (m - 1) as f64 * PI;
    let theta = match parity {
        // tan θ = 1/(2κθ)  ⇔  2κθ sin θ − cos θ = 0
        Parity::Odd => bisect(
            |t| 2.0 * kappa * t * t.sin() - t.cos(),
            shift,
            shift + 0.5 * PI,
        )?,
        // tan θ = −2κθ  ⇔  sin θ + 2κθ cos θ = 0
        Parity::Even => bisect(
            |t| t.sin() + 2.0 * kappa * t * t.cos(),
            shift + 0.5 * PI,
            shift + PI,
        )?,
    };
    Ok(2.0 * theta)
}

/// Decay rates `λ = μ²` of the first `count` modes; even parity is preceded
/// by the constant mode `λ = 0`.
pub fn dynamic_eigenvalues(kappa: f64, count: usize, parity: Parity) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(count + 1);
    if parity == Parity::Even {
        out.push(0.0);
    }
    for m in 1..=count {
        let mu = dynamic_frequency(kappa, m, parity)?;
        out.push(mu * mu);
    }
    Ok(out)
}

/// Mode shape `sin(μ(x−½))` or `cos(μ(x−½))`.
pub fn mode_shape(mu: f64, parity: Parity, x: f64) -> f64 {
    match parity {
        Parity::Odd => (mu * (x - 0.5)).sin(),
        Parity::Even => (mu * (x - 0.5)).cos(),
    }
}

/// Decay rate of the tensor mode `mode(x_N) cos(2π j x')` on the cylinder.
pub fn tensor_decay_rate(lambda: f64, wavenumber: usize) -> f64 {
    let k = 2.0 * std::f64::consts::PI * wavenumber as f64;
    lambda + k * k
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constants_are_stationary() {
        let g = Grid::one_dimensional(20).unwrap();
        let l = LayerSpec::new(&g, 0.1).unwrap();
        let pair = assemble(
            &g,
            &l,
            &ConductivityProfile::Canonical,
            &CapacityProfile::KappaOverEps(1.0),
        )
        .unwrap();
        let u = Field::constant(g, 2.5);
        let u1 = step_backward_euler(&u, 0.01, &pair, 1e-10).unwrap();
        assert!(u1.values().iter().all(|&v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn cosine_decays_with_discrete_eigenvalue() {
        let m = 100;
        let g = Grid::one_dimensional(m).unwrap();
        let pair = OperatorPair::unit(&g, g.weights(), false).unwrap();
        let u = Field::from_fn(g, |x, _| (PI * x).cos());
        let dt = 1e-3;
        let u1 = step_backward_euler(&u, dt, &pair, 1e-12).unwrap();
        let h = g.h();
        let lam = 2.0 * (1.0 - (PI * h).cos()) / (h * h);
        let mut err: f64 = 0.0;
        for (a, b) in u1.values().iter().zip(u.values()) {
            err = err.max((a - b / (1.0 + dt * lam)).abs());
        }
        // the trapezoid-lumped boundary rows cost O(h²)
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn two_dimensional_step_conserves_mass() {
        let g = Grid::new(2, 20, Some(6)).unwrap();
        let l = LayerSpec::new(&g, 0.1).unwrap();
        let pair = assemble(
            &g,
            &l,
            &ConductivityProfile::Canonical,
            &CapacityProfile::KappaOverEps(1.0),
        )
        .unwrap();
        let u = Field::from_fn(g, |x, y| (PI * x).cos() + (2.0 * PI * y).sin());
        let u1 = step_backward_euler(&u, 1e-2, &pair, 1e-12).unwrap();
        let mass = |f: &Field| {
            pair.capacity()
                .iter()
                .zip(f.values())
                .map(|(b, v)| b * v)
                .sum::<f64>()
        };
        assert!((mass(&u1) - mass(&u)).abs() < 1e-10);
    }

    #[test]
    fn splice_example() {
        let g = Grid::one_dimensional(10).unwrap();
        let l = LayerSpec::new(&g, 0.2).unwrap();
        let u0 = Field::from_fn(g, |x, _| x);
        let s = well_prepared_data(&u0, &BoundaryValues::constant(1, 0.0, 1.0), &l).unwrap();
        let v = s.values();
        assert_eq!(&v[..2], &[0.0, 0.0]);
        assert_eq!(&v[9..], &[1.0, 1.0]);
        for (j, x) in v.iter().enumerate().take(9).skip(2) {
            assert_eq!(*x, g.x_normal(j));
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let odd = dynamic_eigenvalues(1.0, 2, Parity::Odd).unwrap();
        assert!((odd[0].sqrt() - 1.3066).abs() < 1e-4);
        assert!((odd[0] - 1.707).abs() < 1e-3);
        let even = dynamic_eigenvalues(1.0, 1, Parity::Even).unwrap();
        assert_eq!(even.len(), 2);
        assert_eq!(even[0], 0.0);
        assert!((even[1].sqrt() - 3.673).abs() < 1e-3);
        assert!((even[1] - 13.49).abs() < 1e-2);
    }

    #[test]
    fn dynamic_limit_rejects_bad_kappa() {
        let g = Grid::one_dimensional(10).unwrap();
        let p = LimitProblem::new(
            LimitKind::Dynamic(0.0),
            Field::constant(g, 1.0),
            Some(BoundaryValues::constant(1, 1.0, 1.0)),
            0.1,
            0.01,
        );
        assert!(run_limit(&p).is_err());
    }

    #[test]
    fn snapshot_times_must_be_step_times() {
        let g = Grid::one_dimensional(10).unwrap();
        let p = LimitProblem::new(LimitKind::Neumann, Field::constant(g, 1.0), None, 0.1, 0.01)
            .with_snapshots(vec![0.015]);
        assert!(matches!(run_limit(&p), Err(Error::SnapshotMismatch(_))));
    }
}
