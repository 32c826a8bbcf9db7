//! Independent reference computations.
//!
//! Nothing here calls the main-path quadrature, root finder or linear
//! solvers: integrals use composite Simpson on kink-split intervals, roots use
//! the tangent form of the dispersion relations, and the dense reference runs
//! assemble and eliminate their own tridiagonal systems.

use std::f64::consts::PI;
use std::io::Write;

use crate::coefficients::{
    nondegeneracy_value, total_capacity, CapacityProfile, ConductivityProfile,
    NondegeneracyExponent,
};
use crate::diagnostics::trace_average_gap;
use crate::error::{Error, Result};
use crate::experiments::Scenario;
use crate::geometry::{Grid, LayerSpec};
use crate::operators::{assemble, average_m_eps, energy, Field};
use crate::solvers::{dynamic_frequency, LimitKind, Parity};

/// Gate for every discrepancy in the suite.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub name: String,
    pub claimed: f64,
    pub oracle: f64,
    pub absolute: f64,
    pub relative: f64,
    pub method: String,
    pub passed: bool,
}

impl OracleResult {
    fn new(name: &str, claimed: f64, oracle: f64, method: &str) -> Self {
        let absolute = (claimed - oracle).abs();
        let relative = if oracle != 0.0 {
            absolute / oracle.abs()
        } else {
            absolute
        };
        Self {
            name: name.into(),
            claimed,
            oracle,
            absolute,
            relative,
            method: method.into(),
            passed: absolute <= ORACLE_TOLERANCE,
        }
    }
}

fn simpson_panels(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    // endpoints are nudged inward so piecewise integrands take their one-sided values
    let nudge = 1e-13 * (b - a);
    let mut s = f(a + nudge) + f(b - nudge);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Composite Simpson over `[a, b]`, split at `kinks`, doubling the panel count
/// from `nodes` until successive values agree to `1e-12` (relative).
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, kinks: &[f64], nodes: usize) -> f64 {
    let mut cuts = vec![a];
    cuts.extend(kinks.iter().copied().filter(|&k| k > a && k < b));
    cuts.push(b);
    cuts.windows(2)
        .map(|w| {
            let mut n = nodes.max(2);
            let mut prev = simpson_panels(f, w[0], w[1], n);
            loop {
                n *= 2;
                let next = simpson_panels(f, w[0], w[1], n);
                if (next - prev).abs() <= 1e-12 * next.abs().max(1e-300) || n > 1 << 22 {
                    return next;
                }
                prev = next;
            }
        })
        .sum()
}

fn canonical(d: f64, eps: f64) -> f64 {
    (d / eps).min(1.0)
}

fn dist(x: f64) -> f64 {
    x.min(1.0 - x)
}

/// Non-degeneracy integral for the canonical profile with `s = ε e^{-t}`
/// (`p = 1`) or `t = τ²` (`p = ½`), truncated at `t = 64`. The inner integral
/// of `σ/a(σ)` in `y = ln(ε/σ)` is itself done by Simpson.
fn nondeg_oracle(eps: f64, half: bool, nodes: usize) -> f64 {
    let inner = move |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let g = move |y: f64| {
            let s = eps * (-y).exp();
            s / canonical(s, eps)
        };
        simpson(&g, 0.0, t, &[], 4)
    };
    if half {
        let f = move |tau: f64| inner(tau * tau).sqrt() * (-tau * tau).exp() * 2.0 * tau;
        simpson(&f, 0.0, 8.0, &[], nodes)
    } else {
        let f = move |t: f64| inner(t) * (-t).exp();
        simpson(&f, 0.0, 64.0, &[], nodes)
    }
}

/// Registry of named closed-form integrands.
pub fn quadrature_oracle(name: &str, nodes: usize) -> Result<f64> {
    let v = match name {
        "reilly_lhs_x2_eps025" => {
            let e = 0.25;
            let f = move |x: f64| {
                let v = if x < e {
                    4.0 * x / e
                } else if x > 1.0 - e {
                    (2.0 - 4.0 * x) / e
                } else {
                    2.0
                };
                v * v
            };
            simpson(&f, 0.0, 1.0, &[e, 1.0 - e], nodes)
        }
        "reilly_hessian_x2_eps025" => {
            let f = |x: f64| 4.0 * canonical(dist(x), 0.25).powi(2);
            simpson(&f, 0.0, 1.0, &[0.25, 0.75], nodes)
        }
        "capacity_mass_eps01_phi10" => {
            let f = |x: f64| if dist(x) < 0.1 { 10.0 } else { 1.0 };
            simpson(&f, 0.0, 1.0, &[0.1, 0.9], nodes)
        }
        "capacity_mass_eps02_phi5" => {
            let f = |x: f64| if dist(x) < 0.2 { 5.0 } else { 1.0 };
            simpson(&f, 0.0, 1.0, &[0.2, 0.8], nodes)
        }
        "energy_linear_canonical_eps01" => {
            let f = |x: f64| 0.5 * canonical(dist(x), 0.1);
            simpson(&f, 0.0, 1.0, &[0.1, 0.9], nodes)
        }
        "average_x2_eps02" => simpson(&|x: f64| x * x / 0.2, 0.0, 0.2, &[], nodes),
        "average_linear_eps01" => simpson(&|x: f64| x / 0.1, 0.0, 0.1, &[], nodes),
        "trace_gap_linear_eps01" => {
            let bottom = simpson(&|x: f64| x / 0.1, 0.0, 0.1, &[], nodes);
            let top = simpson(&|x: f64| x / 0.1, 0.9, 1.0, &[], nodes);
            bottom.powi(2) + (1.0 - top).powi(2)
        }
        "f_gap_unit_pair_eps01_phi10" => {
            let f = |x: f64| 0.5 * if dist(x) < 0.1 { 10.0 } else { 1.0 } - 1.5;
            simpson(&f, 0.0, 1.0, &[0.1, 0.9], nodes)
        }
        "nondeg_canonical_p1_eps01" => nondeg_oracle(0.1, false, nodes),
        "nondeg_canonical_phalf_eps01" => nondeg_oracle(0.1, true, nodes),
        _ => return Err(Error::UnknownExpression(name.into())),
    };
    Ok(v)
}

/// Dispersion-relation families of the 1D dynamic problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootFamily {
    /// `tan(μ/2) = 1/(κμ)`
    Odd,
    /// `tan(μ/2) = −κμ`
    Even,
}

/// Root `μ` of the `index`-th bracket by 200 bisection steps on the tangent
/// form, with the sign change checked at both ends.
pub fn transcendental_root_oracle(family: RootFamily, kappa: f64, index: usize) -> Result<f64> {
    if index == 0 || !(kappa > 0.0) {
        return Err(Error::InvalidArgument(
            "index >= 1 and kappa > 0 required".into(),
        ));
    }
    let m = index as f64;
    let (lo, hi, f): (f64, f64, Box<dyn Fn(f64) -> f64>) = match family {
        RootFamily::Odd => {
            let lo = (m - 1.0) * PI;
            (
                lo,
                lo + 0.5 * PI,
                Box::new(move |t: f64| t.tan() - 1.0 / (2.0 * kappa * t)),
            )
        }
        RootFamily::Even => (
            (m - 0.5) * PI,
            m * PI,
            Box::new(move |t: f64| t.tan() + 2.0 * kappa * t),
        ),
    };
    let pad = 1e-13 * hi;
    let (mut a, mut b) = (lo + pad, hi - pad);
    let (fa, fb) = (f(a), f(b));
    if !(fa < 0.0 && fb > 0.0) {
        return Err(Error::RootNotBracketed { lo: a, hi: b });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a + b)
}

/// Target of a dense reference run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceTarget {
    BoundaryLayer(f64),
    Limit(LimitKind),
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / beta;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Fine-grid, fine-step reference run of a 1D scenario: `M·r` cells and
/// `dt/r`. Returns the snapshots at the scenario's snapshot times, restricted
/// to the coarse nodes (which are fine nodes, so the linear interpolant is
/// exact there).
pub fn dense_reference_run(
    scenario: &Scenario,
    target: ReferenceTarget,
    refinement: usize,
) -> Result<Vec<Field>> {
    if scenario.dimension != 1 {
        return Err(Error::InvalidArgument(
            "dense reference runs are one-dimensional".into(),
        ));
    }
    if refinement < 4 {
        return Err(Error::InvalidArgument(format!(
            "refinement {refinement} below 4"
        )));
    }
    let coarse = scenario.grid()?;
    let mf = scenario.cells * refinement;
    if mf + 1 > 1_000_000 {
        return Err(Error::MemoryGuard(mf + 1));
    }
    let fine = Grid::one_dimensional(mf)?;
    let h = 1.0 / mf as f64;
    let dt = scenario.dt / refinement as f64;
    let steps = (scenario.horizon / dt).round() as usize;
    let u0 = scenario.u0.field(fine)?;
    let w0 = scenario.w0.values(&u0)?;
    let x = |j: usize| j as f64 * h;
    let n = mf + 1;

    let mut cell_a = vec![1.0; mf];
    let mut mass = vec![0.0; n];
    let mut pinned = false;
    let mut state: Vec<f64> = u0.values().to_vec();
    match target {
        ReferenceTarget::BoundaryLayer(eps) => {
            let phi = scenario.capacity.phi(eps)?;
            for (c, a) in cell_a.iter_mut().enumerate() {
                *a = scenario.conductivity.at(dist(x(c) + 0.5 * h), eps)?;
                let b = if dist(x(c) + 0.5 * h) < eps { phi } else { 1.0 };
                mass[c] += 0.5 * h * b;
                mass[c + 1] += 0.5 * h * b;
            }
            if scenario.splice {
                for (j, v) in state.iter_mut().enumerate() {
                    if x(j) < eps - 0.5 * h {
                        *v = w0.bottom[0];
                    } else if x(j) > 1.0 - eps + 0.5 * h {
                        *v = w0.top[0];
                    }
                }
            }
        }
        ReferenceTarget::Limit(kind) => {
            for c in 0..mf {
                mass[c] += 0.5 * h;
                mass[c + 1] += 0.5 * h;
            }
            match kind {
                LimitKind::Dynamic(kappa) => {
                    for (j, w) in [(0, w0.bottom[0]), (mf, w0.top[0])] {
                        state[j] = (mass[j] * state[j] + kappa * w) / (mass[j] + kappa);
                        mass[j] += kappa;
                    }
                }
                LimitKind::Neumann => {}
                LimitKind::Dirichlet => {
                    pinned = true;
                    state[0] = 0.0;
                    state[mf] = 0.0;
                }
            }
        }
    }

    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut diag = mass.clone();
    for c in 0..mf {
        let k = dt * cell_a[c] / h;
        diag[c] += k;
        diag[c + 1] += k;
        upper[c] = -k;
        lower[c + 1] = -k;
    }
    if pinned {
        for j in [0, mf] {
            diag[j] = 1.0;
            lower[j] = 0.0;
            upper[j] = 0.0;
        }
        lower[1] = 0.0;
        upper[mf - 1] = 0.0;
    }

    let wanted: Vec<usize> = scenario
        .snapshot_times()
        .iter()
        .map(|t| (t / dt).round() as usize)
        .collect();
    let restrict = |v: &[f64]| -> Field {
        Field::from_fn(coarse, |xc, _| v[(xc * mf as f64).round() as usize])
    };
    let mut out = Vec::with_capacity(wanted.len());
    if wanted.first() == Some(&0) {
        out.push(restrict(&state));
    }
    for step in 1..=steps {
        let mut rhs: Vec<f64> = state.iter().zip(&mass).map(|(u, m)| u * m).collect();
        if pinned {
            rhs[0] = 0.0;
            rhs[mf] = 0.0;
        }
        thomas(&lower, &diag, &upper, &mut rhs);
        state = rhs;
        if wanted.contains(&step) {
            out.push(restrict(&state));
        }
    }
    Ok(out)
}

/// Runs every registered check.
pub fn run_oracle_suite() -> Result<Vec<OracleResult>> {
    const NODES: usize = 64;
    let mut out = Vec::new();
    let simpson_note = "composite Simpson, kink-split, doubled to 1e-12";

    for (name, claimed) in [
        ("reilly_lhs_x2_eps025", 38.0 / 3.0),
        ("reilly_hessian_x2_eps025", 8.0 / 3.0),
        ("capacity_mass_eps01_phi10", 2.8),
        ("capacity_mass_eps02_phi5", 2.6),
        ("energy_linear_canonical_eps01", 0.45),
        ("average_x2_eps02", 0.04 / 3.0),
        ("average_linear_eps01", 0.05),
        ("f_gap_unit_pair_eps01_phi10", -0.1),
        ("nondeg_canonical_p1_eps01", 0.1),
        ("nondeg_canonical_phalf_eps01", (0.1 * PI).sqrt() / 2.0),
        ("trace_gap_linear_eps01", 0.005),
    ] {
        out.push(OracleResult::new(
            name,
            claimed,
            quadrature_oracle(name, NODES)?,
            simpson_note,
        ));
    }

    // main-path values against the oracle integrals
    let g40 = Grid::one_dimensional(40)?;
    let l01 = LayerSpec::new(&g40, 0.1)?;
    let l02 = LayerSpec::new(&g40, 0.2)?;
    out.push(OracleResult::new(
        "main_total_capacity_eps01_phi10",
        total_capacity(&g40, &l01, &CapacityProfile::KappaOverEps(1.0))?,
        quadrature_oracle("capacity_mass_eps01_phi10", NODES)?,
        "lumped capacity vs Simpson",
    ));
    out.push(OracleResult::new(
        "main_total_capacity_eps02_phi5",
        total_capacity(&g40, &l02, &CapacityProfile::KappaOverEps(1.0))?,
        quadrature_oracle("capacity_mass_eps02_phi5", NODES)?,
        "lumped capacity vs Simpson",
    ));
    let pair = assemble(
        &g40,
        &l01,
        &ConductivityProfile::Canonical,
        &CapacityProfile::KappaOverEps(1.0),
    )?;
    let linear = Field::from_fn(g40, |x, _| x);
    out.push(OracleResult::new(
        "main_energy_linear_eps01",
        energy(&linear, &pair),
        quadrature_oracle("energy_linear_canonical_eps01", NODES)?,
        "face-sum energy vs Simpson",
    ));
    out.push(OracleResult::new(
        "main_average_linear_eps01",
        average_m_eps(&linear, &l01)?.bottom[0],
        quadrature_oracle("average_linear_eps01", NODES)?,
        "trapezoid layer average vs Simpson",
    ));
    out.push(OracleResult::new(
        "main_trace_gap_linear_eps01",
        trace_average_gap(&linear, &l01, 0.45, 0.1)?.0,
        quadrature_oracle("trace_gap_linear_eps01", NODES)?,
        "trace and layer average vs Simpson",
    ));
    for (name, p, key) in [
        (
            "main_nondeg_p1_eps01",
            NondegeneracyExponent::One,
            "nondeg_canonical_p1_eps01",
        ),
        (
            "main_nondeg_phalf_eps01",
            NondegeneracyExponent::Half,
            "nondeg_canonical_phalf_eps01",
        ),
    ] {
        out.push(OracleResult::new(
            name,
            nondegeneracy_value(&ConductivityProfile::Canonical, 0.1, p, 200)?.value,
            quadrature_oracle(key, NODES)?,
            "Gauss-Kronrod nested vs Simpson nested",
        ));
    }

    // eigenvalue roots
    for (name, family, parity, lo, hi) in [
        (
            "root_odd_kappa1_m1",
            RootFamily::Odd,
            Parity::Odd,
            1.30653,
            1.30655,
        ),
        (
            "root_even_kappa1_m1",
            RootFamily::Even,
            Parity::Even,
            3.672,
            3.674,
        ),
    ] {
        let oracle = transcendental_root_oracle(family, 1.0, 1)?;
        out.push(OracleResult::new(
            name,
            dynamic_frequency(1.0, 1, parity)?,
            oracle,
            "tangent-form bisection",
        ));
        let outside = (lo - oracle).max(oracle - hi).max(0.0);
        out.push(OracleResult::new(
            &format!("{name}_interval"),
            0.0,
            outside,
            "distance to the stated interval",
        ));
    }
    for m in 2..=4 {
        for kappa in [0.1, 10.0] {
            for (family, parity) in [
                (RootFamily::Odd, Parity::Odd),
                (RootFamily::Even, Parity::Even),
            ] {
                let label = if parity == Parity::Odd { "odd" } else { "even" };
                out.push(OracleResult::new(
                    &format!("root_{label}_kappa{kappa}_m{m}"),
                    dynamic_frequency(kappa, m, parity)?,
                    transcendental_root_oracle(family, kappa, m)?,
                    "tangent-form bisection",
                ));
            }
        }
    }
    // large κ: odd roots of bracket m + 1 decrease toward the Dirichlet value 2mπ
    let trend: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&k| transcendental_root_oracle(RootFamily::Odd, k, 2))
        .collect::<Result<_>>()?;
    let monotone = trend.windows(2).all(|w| w[1] < w[0]) && trend.iter().all(|&mu| mu > 2.0 * PI);
    out.push(OracleResult::new(
        "root_odd_dirichlet_trend",
        0.0,
        if monotone { 0.0 } else { 1.0 },
        "monotone decrease over kappa in {1, 10, 100}",
    ));
    out.push(OracleResult::new(
        "root_odd_dirichlet_limit_m2",
        2.0 * PI,
        transcendental_root_oracle(RootFamily::Odd, 1e9, 2)?,
        "tangent-form bisection at kappa = 1e9",
    ));
    Ok(out)
}

pub fn write_oracle_csv<W: Write>(results: &[OracleResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "name", "claimed", "oracle", "absolute", "relative", "method", "passed",
    ])?;
    for r in results {
        w.write_record([
            r.name.clone(),
            format!("{}", r.claimed),
            format!("{}", r.oracle),
            format!("{}", r.absolute),
            format!("{}", r.relative),
            r.method.clone(),
            r.passed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
