//! Executes scenarios.

use super::report::{expected_row_count, sort_block, write_csv, ReportRow};
use super::{Mode, ReferenceKind, Scenario};
use crate::coefficients::Kappa;
use crate::diagnostics::{
    compare_to_limit, compare_to_limit_on, edb_ledger_check, energy_equality_residual,
    reilly_residual,
};
use crate::error::{Error, Result};
use crate::gamma::{recovery_e, recovery_f};
use crate::geometry::{Grid, LayerSpec};
use crate::operators::{BoundaryValues, Field};
use crate::par::map_collect;
use crate::solvers::{
    run_boundary_layer, run_limit, well_prepared_data, BoundaryLayerProblem, LimitProblem,
    RunLedger,
};

/// Ledgers of a flow scenario.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// One limit run per reference, in reference order.
    pub limits: Vec<(ReferenceKind, RunLedger)>,
    /// One boundary-layer run per ε, in sweep order.
    pub layers: Vec<RunLedger>,
}

impl SweepOutcome {
    pub fn limit(&self, kind: ReferenceKind) -> Option<&RunLedger> {
        self.limits.iter().find(|(k, _)| *k == kind).map(|(_, l)| l)
    }
}

enum Job {
    Limit(ReferenceKind),
    Layer(f64),
}

fn annotate(epsilon: f64) -> impl Fn(Error) -> Error {
    move |e| Error::SweepPoint {
        epsilon,
        source: Box::new(e),
    }
}

/// Runs every boundary-layer problem of the sweep and every reference limit,
/// concurrently when the scenario allows it.
pub fn run_sweep(s: &Scenario) -> Result<SweepOutcome> {
    let grid = s.grid()?;
    let u0 = s.u0.field(grid)?;
    let w0 = s.w0.values(&u0)?;
    let snaps = s.snapshot_times();
    let jobs: Vec<Job> = s
        .references
        .iter()
        .map(|&r| Job::Limit(r))
        .chain(s.sweep.iter().map(|&e| Job::Layer(e)))
        .collect();
    let results = map_collect(&jobs, s.execution, s.workers, |job| match job {
        Job::Limit(r) => {
            let kind = s.limit_kind(*r)?;
            let p = LimitProblem::new(kind, u0.clone(), Some(w0.clone()), s.horizon, s.dt)
                .with_snapshots(snaps.clone());
            run_limit(&p)
        }
        Job::Layer(eps) => layer_run(s, &grid, &u0, &w0, *eps, &snaps).map_err(annotate(*eps)),
    });
    let mut limits = Vec::new();
    let mut layers = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        match job {
            Job::Limit(r) => limits.push((*r, res?)),
            Job::Layer(_) => layers.push(res?),
        }
    }
    Ok(SweepOutcome { limits, layers })
}

fn layer_run(
    s: &Scenario,
    grid: &Grid,
    u0: &Field,
    w0: &BoundaryValues,
    eps: f64,
    snaps: &[f64],
) -> Result<RunLedger> {
    let layer = LayerSpec::new(grid, eps)?;
    let initial = if s.splice {
        well_prepared_data(u0, w0, &layer)?
    } else {
        u0.clone()
    };
    let p = BoundaryLayerProblem::new(
        layer,
        s.conductivity.clone(),
        s.capacity.clone(),
        initial,
        s.horizon,
        s.dt,
    )
    .with_snapshots(snaps.to_vec());
    run_boundary_layer(&p)
}

/// Runs a scenario and returns its rows in report order; writes the CSV when
/// the scenario names an output path.
pub fn run_scenario(s: &Scenario) -> Result<Vec<ReportRow>> {
    let rows = match s.mode {
        Mode::Flow => flow_rows(s, &run_sweep(s)?)?,
        Mode::Reilly => reilly_rows(s)?,
        Mode::Gamma => gamma_rows(s)?,
    };
    assert_eq!(
        rows.len(),
        expected_row_count(s),
        "row-count formula out of sync for {}",
        s.name
    );
    if let Some(path) = &s.output {
        write_csv(&rows, path)?;
    }
    Ok(rows)
}

struct RowSink<'a> {
    scenario: &'a str,
    h: f64,
    dt: f64,
    rows: Vec<ReportRow>,
}

impl RowSink<'_> {
    fn push(&mut self, epsilon: f64, t: f64, quantity: impl Into<String>, value: f64) {
        self.rows.push(ReportRow {
            scenario: self.scenario.to_string(),
            epsilon,
            h: self.h,
            dt: self.dt,
            t,
            quantity: quantity.into(),
            value,
        });
    }

    fn take_block(&mut self) -> Vec<ReportRow> {
        let mut block = std::mem::take(&mut self.rows);
        sort_block(&mut block);
        block
    }
}

fn suffix(i: usize, r: ReferenceKind) -> String {
    if i == 0 {
        "limit".into()
    } else {
        r.label().into()
    }
}

/// Builds the flow-mode rows from finished ledgers.
pub fn flow_rows(s: &Scenario, outcome: &SweepOutcome) -> Result<Vec<ReportRow>> {
    let grid = s.grid()?;
    let snaps = s.snapshot_times();
    let depth = s.comparison_depth();
    let mut sink = RowSink {
        scenario: &s.name,
        h: grid.h(),
        dt: s.dt,
        rows: Vec::new(),
    };
    let mut out = Vec::new();

    for (r, ledger) in &outcome.limits {
        for &t in &snaps {
            sink.push(
                0.0,
                t,
                format!("{}_energy", r.label()),
                ledger.energy_at(t)?,
            );
        }
        sink.push(
            0.0,
            s.horizon,
            format!("{}_edb_max", r.label()),
            edb_ledger_check(ledger)?,
        );
    }
    out.extend(sink.take_block());

    for ledger in &outcome.layers {
        let eps = ledger.epsilon().unwrap_or(f64::NAN);
        let block =
            layer_block(s, &mut sink, ledger, outcome, &snaps, depth).map_err(annotate(eps))?;
        out.extend(block);
    }
    Ok(out)
}

fn layer_block(
    s: &Scenario,
    sink: &mut RowSink<'_>,
    ledger: &RunLedger,
    outcome: &SweepOutcome,
    snaps: &[f64],
    depth: f64,
) -> Result<Vec<ReportRow>> {
    let eps = ledger.epsilon().unwrap_or(f64::NAN);
    for &t in snaps {
        let snap = ledger.snapshot_at(t)?;
        sink.push(eps, t, "energy", ledger.energy_at(t)?);
        sink.push(eps, t, "m_eps_norm", snap.trace.norm());
    }
    for (i, (r, limit)) in outcome.limits.iter().enumerate() {
        let tag = suffix(i, *r);
        for &t in snaps {
            let fixed = compare_to_limit_on(ledger, limit, &[t], depth)?;
            sink.push(eps, t, format!("l2_interior_vs_{tag}"), fixed.l2_interior);
            if i == 0 {
                sink.push(
                    eps,
                    t,
                    "l2_bulk_vs_limit",
                    compare_to_limit(ledger, limit, &[t])?.l2_interior,
                );
            }
        }
        let whole = compare_to_limit_on(ledger, limit, snaps, depth)?;
        sink.push(
            eps,
            s.horizon,
            format!("l2_boundary_vs_{tag}"),
            whole.l2_boundary,
        );
    }
    sink.push(eps, s.horizon, "edb_max", edb_ledger_check(ledger)?);
    sink.push(
        eps,
        s.horizon,
        "energy_equality_residual",
        energy_equality_residual(ledger)?.value,
    );
    let sup = ledger
        .steps
        .iter()
        .map(|st| st.trace.norm())
        .fold(ledger.initial_trace.norm(), f64::max);
    sink.push(eps, s.horizon, "sup_m_eps_norm", sup);
    let phi = s.capacity.phi(eps)?;
    sink.push(
        eps,
        s.horizon,
        "mass_bound",
        (2.0 * ledger.initial_half_mass / (eps * phi)).sqrt(),
    );
    Ok(sink.take_block())
}

fn reilly_rows(s: &Scenario) -> Result<Vec<ReportRow>> {
    let mut out = Vec::new();
    for &eps in &s.sweep {
        for &m in &s.refinements {
            let grid = Grid::new(s.dimension, m, s.cells_periodic)?;
            let layer = LayerSpec::new(&grid, eps).map_err(annotate(eps))?;
            let u = s.u0.field(grid)?;
            let r = reilly_residual(&u, &layer, &s.conductivity).map_err(annotate(eps))?;
            let mut sink = RowSink {
                scenario: &s.name,
                h: grid.h(),
                dt: 0.0,
                rows: Vec::new(),
            };
            sink.push(eps, 0.0, "boundary_term", r.boundary_term);
            sink.push(eps, 0.0, "corrected_residual", r.corrected_residual);
            sink.push(eps, 0.0, "hessian_term", r.hessian_term);
            sink.push(eps, 0.0, "lhs", r.lhs);
            sink.push(eps, 0.0, "residual", r.residual);
            sink.push(eps, 0.0, "rhs_split", r.hessian_term + r.boundary_term);
            out.extend(sink.take_block());
        }
    }
    Ok(out)
}

/// Gamma mode: `E_ε` along the constant sequence of `u₀` (target `(u₀, w₀)`)
/// and `F_ε` along the splice of the unit pair `u(t) = t`, `w(t) = t`.
fn gamma_rows(s: &Scenario) -> Result<Vec<ReportRow>> {
    let grid = s.grid()?;
    let kappa = match s.kappa()? {
        Kappa::Finite(k) => k,
        other => {
            return Err(Error::InvalidArgument(format!(
                "gamma mode needs a finite kappa, got {other}"
            )))
        }
    };
    let u0 = s.u0.field(grid)?;
    let w0 = s.w0.values(&u0)?;
    let e = recovery_e(&u0, &w0, kappa, &s.sweep, &s.conductivity)?;
    let steps = (s.horizon / s.dt).round() as usize;
    let p = grid.cells_periodic();
    let u_traj: Vec<Field> = (0..=steps)
        .map(|n| Field::constant(grid, n as f64 * s.dt))
        .collect();
    let w_traj: Vec<BoundaryValues> = (0..=steps)
        .map(|n| BoundaryValues::constant(p, n as f64 * s.dt, n as f64 * s.dt))
        .collect();
    let f = recovery_f(&u_traj, &w_traj, &s.capacity, &s.sweep, s.dt)?;

    let inf_or = |v: Option<f64>| v.unwrap_or(f64::INFINITY);
    let mut sink = RowSink {
        scenario: &s.name,
        h: grid.h(),
        dt: s.dt,
        rows: Vec::new(),
    };
    sink.push(0.0, s.horizon, "e_limit", inf_or(e.limit_value.finite()));
    sink.push(0.0, s.horizon, "f_limit", inf_or(f.limit_value.finite()));
    let mut out = sink.take_block();
    let e_limit = e.limit_value.finite();
    let f_limit = f.limit_value.finite();
    for (i, &eps) in s.sweep.iter().enumerate() {
        let ev = inf_or(e.functional_values[i].finite());
        let fv = inf_or(f.functional_values[i].finite());
        sink.push(eps, s.horizon, "e_eps", ev);
        sink.push(
            eps,
            s.horizon,
            "e_gap",
            e_limit.map_or(f64::INFINITY, |l| (ev - l).abs()),
        );
        sink.push(
            eps,
            s.horizon,
            "embedding_distance",
            e.embedding_distances[i],
        );
        sink.push(eps, s.horizon, "f_eps", fv);
        sink.push(
            eps,
            s.horizon,
            "f_gap",
            f_limit.map_or(f64::INFINITY, |l| (fv - l).abs()),
        );
        out.extend(sink.take_block());
    }
    Ok(out)
}
