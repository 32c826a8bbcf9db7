//! Residuals of the structural identities and distances to the limits.

use crate::coefficients::ConductivityProfile;
use crate::error::{Error, Result};
use crate::geometry::LayerSpec;
use crate::operators::{assemble_stiffness, average_m_eps, trace_at_depth, Field, OperatorPair};
use crate::solvers::RunLedger;

/// Both sides of the Reilly-type identity
/// `∫|div(a_ε∇u)|² = Σ∫a_ε²|∂²u|² + (1/ε)∫_{d=ε}|∂u/∂x_N|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReillyReport {
    pub lhs: f64,
    pub hessian_term: f64,
    pub boundary_term: f64,
    /// `|lhs − hessian_term − boundary_term| / max(lhs, 1)`
    pub residual: f64,
    /// `Σ_sides [(1/ε)∫_{d=ε}|u_{x'}|² − (1/ε²)∫_{layer}|u_{x'}|²]`. Zero in 1D
    /// and for fields whose tangential gradient has the same mean square on
    /// every slice of the layer; otherwise it is what the two sides differ by.
    pub tangential_remainder: f64,
    /// Residual with the tangential remainder added to the right-hand side.
    pub corrected_residual: f64,
}

/// Evaluates the Reilly identity terms on a nodal field. Only the canonical
/// conductivity is in scope.
///
/// Second differences at the interface rows are one-sided into the bulk so
/// that they never straddle the kink of `a_ε`.
pub fn reilly_residual(
    field: &Field,
    layer: &LayerSpec,
    a: &ConductivityProfile,
) -> Result<ReillyReport> {
    if *a != ConductivityProfile::Canonical {
        return Err(Error::ReillyScope(format!(
            "conductivity {} is not canonical",
            a.label()
        )));
    }
    let g = *field.grid();
    layer.check_grid(&g)?;
    let pair = assemble_stiffness(&g, layer, a)?;
    let lhs = pair.dissipation_of(field.values());

    let m = g.cells_normal();
    let p = g.cells_periodic();
    let k = layer.layer_cells();
    let h = g.h();
    let hp = g.periodic_spacing();
    let eps = layer.epsilon();
    let u = |j: usize, c: usize| field.values()[g.index(j, c % p)];
    let left = |c: usize| (c + p - 1) % p;
    let two_d = g.dimension() == 2;

    let mut hessian = 0.0;
    for j in 1..m {
        let a = pair.row_conductivity()[j];
        if a == 0.0 {
            continue;
        }
        // rows whose centred stencil would cross d = ε look into the bulk
        let (j0, j1, j2) = if j == k {
            (j, j + 1, j + 2)
        } else if j == m - k {
            (j - 2, j - 1, j)
        } else {
            (j - 1, j, j + 1)
        };
        for c in 0..p {
            let unn = (u(j0, c) - 2.0 * u(j1, c) + u(j2, c)) / (h * h);
            let mut sq = unn * unn;
            if two_d {
                let upp = (u(j, c + 1) - 2.0 * u(j, c) + u(j, left(c))) / (hp * hp);
                let (lo, hi, span) = if j == k {
                    (j, j + 1, h)
                } else if j == m - k {
                    (j - 1, j, h)
                } else {
                    (j - 1, j + 1, 2.0 * h)
                };
                let unp = (u(hi, c + 1) - u(hi, left(c)) - u(lo, c + 1) + u(lo, left(c)))
                    / (2.0 * hp * span);
                sq += upp * upp + 2.0 * unp * unp;
            }
            hessian += g.row_weight(j) * hp * a * a * sq;
        }
    }

    let mut boundary = 0.0;
    for j in [k, m - k] {
        for c in 0..p {
            let un = (u(j + 1, c) - u(j - 1, c)) / (2.0 * h);
            boundary += hp * un * un / eps;
        }
    }

    let mut remainder = 0.0;
    if two_d {
        let tangential = |j: usize| -> f64 {
            (0..p)
                .map(|c| {
                    let d = (u(j, c + 1) - u(j, left(c))) / (2.0 * hp);
                    hp * d * d
                })
                .sum()
        };
        for (iface, rows) in [
            (k, (0..=k).collect::<Vec<_>>()),
            (m - k, (m - k..=m).collect()),
        ] {
            let layer_integral: f64 = rows
                .iter()
                .enumerate()
                .map(|(n, &j)| if n == 0 || n == k { 0.5 * h } else { h } * tangential(j))
                .sum();
            remainder += tangential(iface) / eps - layer_integral / (eps * eps);
        }
    }

    let scale = lhs.max(1.0);
    Ok(ReillyReport {
        lhs,
        hessian_term: hessian,
        boundary_term: boundary,
        residual: (lhs - hessian - boundary).abs() / scale,
        tangential_remainder: remainder,
        corrected_residual: (lhs - hessian - boundary - remainder).abs() / scale,
    })
}

/// `max_n |E⁺ − E + (1/dt)⟨Bδ,δ⟩ + ½⟨Aδ,δ⟩| / max(E(u₀), 1)`.
pub fn edb_ledger_check(ledger: &RunLedger) -> Result<f64> {
    if ledger.steps.is_empty() {
        return Err(Error::EmptyLedger);
    }
    let worst = ledger
        .steps
        .iter()
        .map(|s| s.edb_residual.abs())
        .fold(0.0, f64::max);
    Ok(worst / ledger.initial_energy.max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEqualityResidual {
    pub value: f64,
    /// True when the initial data vanish and `value` is absolute.
    pub absolute: bool,
}

/// `|½⟨Bu(T),u(T)⟩ + 2 Σ dt E(u^{n+1}) − ½⟨Bu₀,u₀⟩| / ½⟨Bu₀,u₀⟩`.
pub fn energy_equality_residual(ledger: &RunLedger) -> Result<EnergyEqualityResidual> {
    let last = ledger.steps.last().ok_or(Error::EmptyLedger)?;
    let dissipated: f64 = ledger
        .steps
        .iter()
        .map(|s| 2.0 * ledger.dt * s.energy)
        .sum();
    let raw = (last.half_mass + dissipated - ledger.initial_half_mass).abs();
    if ledger.initial_half_mass == 0.0 {
        Ok(EnergyEqualityResidual {
            value: raw,
            absolute: true,
        })
    } else {
        Ok(EnergyEqualityResidual {
            value: raw / ledger.initial_half_mass,
            absolute: false,
        })
    }
}

/// `(‖γ^ε u − m_ε u‖²_{L²(∂Ω)}, 2 E_ε(u) · nondeg)`.
pub fn trace_average_gap(
    field: &Field,
    layer: &LayerSpec,
    energy_value: f64,
    nondeg_value: f64,
) -> Result<(f64, f64)> {
    let trace = trace_at_depth(field, layer.epsilon())?;
    let avg = average_m_eps(field, layer)?;
    Ok((
        trace.difference(&avg)?.norm_squared(),
        2.0 * energy_value * nondeg_value,
    ))
}

/// Distances between a boundary-layer run and a limit run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Interior `L²` distance at the last requested time.
    pub l2_interior: f64,
    /// `‖m_ε u^ε − w‖_{L²(∂Ω × (0, T))}`.
    pub l2_boundary: f64,
    /// Max of the interior distance over the requested times.
    pub sup_t_l2: f64,
    /// Slope across a sweep; `None` for a single comparison.
    pub rate: Option<f64>,
}

fn check_pairing(bl: &RunLedger, limit: &RunLedger) -> Result<()> {
    if bl.grid != limit.grid {
        return Err(Error::Mismatch("ledgers live on different grids".into()));
    }
    if bl.steps.len() != limit.steps.len() || (bl.dt - limit.dt).abs() > 1e-15 * bl.dt.max(1.0) {
        return Err(Error::SnapshotMismatch(format!(
            "step sequences differ: {} steps of {} vs {} steps of {}",
            bl.steps.len(),
            bl.dt,
            limit.steps.len(),
            limit.dt
        )));
    }
    Ok(())
}

/// Compares on the moving bulk `{d ≥ ε}` (the whole domain for a limit
/// ledger on the left).
pub fn compare_to_limit(bl: &RunLedger, limit: &RunLedger, times: &[f64]) -> Result<ErrorReport> {
    let depth = bl.epsilon().unwrap_or(0.0);
    compare_to_limit_on(bl, limit, times, depth)
}

/// Compares on the fixed region `Ω_δ = {d ≥ depth}`.
pub fn compare_to_limit_on(
    bl: &RunLedger,
    limit: &RunLedger,
    times: &[f64],
    depth: f64,
) -> Result<ErrorReport> {
    check_pairing(bl, limit)?;
    if times.is_empty() {
        return Err(Error::SnapshotMismatch("no comparison times given".into()));
    }
    let g = bl.grid;
    let rows = g.cells_in(depth).ok_or(Error::NotAligned {
        epsilon: depth,
        h: g.h(),
    })?;
    let m = g.cells_normal();
    let mut per_time = Vec::with_capacity(times.len());
    for &t in times {
        let a = bl.snapshot_at(t)?;
        let b = limit.snapshot_at(t)?;
        let diff = a.field.difference(&b.field)?;
        per_time.push(diff.l2_norm_rows(|j| j >= rows && j <= m - rows));
    }
    let mut boundary = 0.0;
    for (s, r) in bl.steps.iter().zip(&limit.steps) {
        boundary += bl.dt * s.trace.difference(&r.trace)?.norm_squared();
    }
    Ok(ErrorReport {
        l2_interior: *per_time.last().unwrap(),
        l2_boundary: boundary.sqrt(),
        sup_t_l2: per_time.iter().copied().fold(0.0, f64::max),
        rate: None,
    })
}

/// Compares a sweep of runs against one limit on `Ω_depth` and fills the
/// rate of the interior distance in ε.
pub fn compare_sweep(
    sweep: &[RunLedger],
    limit: &RunLedger,
    times: &[f64],
    depth: f64,
) -> Result<Vec<ErrorReport>> {
    let mut reports = sweep
        .iter()
        .map(|bl| compare_to_limit_on(bl, limit, times, depth))
        .collect::<Result<Vec<_>>>()?;
    if reports.len() >= 3 {
        let eps: Vec<f64> = sweep
            .iter()
            .map(|l| l.epsilon().unwrap_or(f64::NAN))
            .collect();
        let errs: Vec<f64> = reports.iter().map(|r| r.l2_interior).collect();
        let rate = rate_estimate(&eps, &errs).ok();
        for r in &mut reports {
            r.rate = rate;
        }
    }
    Ok(reports)
}

/// `‖∂_t m_ε u^ε − w_t‖_{L²(∂Ω × (0,T))}` from step differences. In the
/// dynamic limit `w_t = −(1/κ) ∂u/∂ν`, so this compares the layer-average
/// velocity with the limit normal flux.
pub fn trace_velocity_distance(bl: &RunLedger, limit: &RunLedger) -> Result<f64> {
    check_pairing(bl, limit)?;
    let mut prev_a = &bl.initial_trace;
    let mut prev_b = &limit.initial_trace;
    let mut total = 0.0;
    for (s, r) in bl.steps.iter().zip(&limit.steps) {
        let va = s.trace.difference(prev_a)?.scaled(1.0 / bl.dt);
        let vb = r.trace.difference(prev_b)?.scaled(1.0 / bl.dt);
        total += bl.dt * va.difference(&vb)?.norm_squared();
        prev_a = &s.trace;
        prev_b = &r.trace;
    }
    Ok(total.sqrt())
}

/// Least-squares slope of `log(error)` against `log(param)`.
pub fn rate_estimate(params: &[f64], errors: &[f64]) -> Result<f64> {
    if params.len() != errors.len() || params.len() < 3 {
        return Err(Error::InvalidArgument(
            "rate needs at least 3 matching points".into(),
        ));
    }
    if params
        .iter()
        .chain(errors)
        .any(|&v| !(v > 0.0) || !v.is_finite())
    {
        return Err(Error::InvalidArgument(
            "rate needs positive finite entries".into(),
        ));
    }
    let xs: Vec<f64> = params.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "rate needs distinct parameters".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Boundary-flux probe for the natural closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxProbe {
    /// `max |a_{1/2}(u_1 − u_0)/h|` over both components and all columns.
    pub face_flux: f64,
    /// `‖A u‖_{L²}`
    pub operator_norm: f64,
}

/// Measures the weighted flux through the first face at each boundary
/// component. For the canonical profile `a_{1/2} = h/(2ε)`, so the flux is
/// `O(h)` and vanishes under refinement.
pub fn boundary_flux_probe(field: &Field, pair: &OperatorPair) -> Result<FluxProbe> {
    let g = *pair.grid();
    if field.grid() != &g {
        return Err(Error::Mismatch(
            "field and operators live on different grids".into(),
        ));
    }
    let m = g.cells_normal();
    let h = g.h();
    let faces = pair.face_conductivity();
    let mut flux: f64 = 0.0;
    for c in 0..g.cells_periodic() {
        let u = |j: usize| field.values()[g.index(j, c)];
        flux = flux.max((faces[0] * (u(1) - u(0)) / h).abs());
        flux = flux.max((faces[m - 1] * (u(m) - u(m - 1)) / h).abs());
    }
    Ok(FluxProbe {
        face_flux: flux,
        operator_norm: pair.apply_nodal(field).l2_norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use std::f64::consts::PI;

    fn x2_report(m: usize) -> ReillyReport {
        let g = Grid::one_dimensional(m).unwrap();
        let l = LayerSpec::new(&g, 0.25).unwrap();
        reilly_residual(
            &Field::from_fn(g, |x, _| x * x),
            &l,
            &ConductivityProfile::Canonical,
        )
        .unwrap()
    }

    #[test]
    fn reilly_x2_terms_approach_closed_forms() {
        let r = x2_report(512);
        assert!((r.lhs - 38.0 / 3.0).abs() < 0.05, "{r:?}");
        assert!((r.hessian_term - 8.0 / 3.0).abs() < 0.05, "{r:?}");
        assert!((r.boundary_term - 10.0).abs() < 1e-9, "{r:?}");
        assert!(x2_report(128).residual > r.residual);
    }

    #[test]
    fn reilly_rejects_other_profiles() {
        let g = Grid::one_dimensional(64).unwrap();
        let l = LayerSpec::new(&g, 0.25).unwrap();
        let err = reilly_residual(
            &Field::constant(g, 1.0),
            &l,
            &ConductivityProfile::ConstantOne,
        )
        .unwrap_err();
        assert!(err
            .to_string()
            .contains("Reilly identity out of stated scope"));
    }

    #[test]
    fn reilly_constant_field_is_zero() {
        let g = Grid::new(2, 32, Some(8)).unwrap();
        let l = LayerSpec::new(&g, 0.25).unwrap();
        let r = reilly_residual(
            &Field::constant(g, 2.0),
            &l,
            &ConductivityProfile::Canonical,
        )
        .unwrap();
        assert_eq!(
            (r.lhs, r.hessian_term, r.boundary_term, r.residual),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn reilly_linear_field() {
        let g = Grid::one_dimensional(256).unwrap();
        let l = LayerSpec::new(&g, 0.25).unwrap();
        let r = reilly_residual(
            &Field::from_fn(g, |x, _| x),
            &l,
            &ConductivityProfile::Canonical,
        )
        .unwrap();
        assert!((r.boundary_term - 8.0).abs() < 1e-9);
        assert!(r.hessian_term.abs() < 1e-9);
        assert!((r.lhs - 8.0).abs() < 0.1, "{r:?}");
    }

    #[test]
    fn tangential_remainder_accounts_for_the_2d_defect() {
        let mut plain = Vec::new();
        let mut corrected = Vec::new();
        for m in [64, 128, 256] {
            let g = Grid::new(2, m, Some(m / 2)).unwrap();
            let l = LayerSpec::new(&g, 0.25).unwrap();
            let u = Field::from_fn(g, |x, y| x * x * (2.0 * PI * y).cos());
            let r = reilly_residual(&u, &l, &ConductivityProfile::Canonical).unwrap();
            plain.push(r.residual);
            corrected.push(r.corrected_residual);
        }
        assert!(plain[2] > 0.1, "{plain:?}");
        assert!(corrected.iter().all(|c| *c < 1e-3), "{corrected:?}");
    }

    #[test]
    fn rate_examples() {
        let p = [0.1, 0.05, 0.025, 0.0125];
        let sq: Vec<f64> = p.iter().map(|v| v * v).collect();
        assert!((rate_estimate(&p, &p).unwrap() - 1.0).abs() < 1e-12);
        assert!((rate_estimate(&p, &sq).unwrap() - 2.0).abs() < 1e-12);
        assert!(rate_estimate(&p, &[3.0; 4]).unwrap().abs() < 1e-12);
        assert!(rate_estimate(&p, &[1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn gap_example() {
        let g = Grid::one_dimensional(40).unwrap();
        let l = LayerSpec::new(&g, 0.1).unwrap();
        let u = Field::from_fn(g, |x, _| x);
        let (gap, bound) = trace_average_gap(&u, &l, 0.45, 0.1).unwrap();
        assert!((gap - 0.005).abs() < 1e-14);
        assert!((bound - 0.09).abs() < 1e-14);
    }
}
