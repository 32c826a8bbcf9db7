//! Conductivity `a_ε` and capacity `b_ε` families.
//!
//! Every conductivity depends on the point only through the boundary distance
//! `d`, and is normalised so that `a_ε = 1` away from the layer. Capacities
//! are `1` on `{d ≥ ε}` and `φ(ε)` on the layer; the family of `φ` fixes
//! `κ = lim ε φ(ε)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Grid, LayerSpec};
use crate::quadrature;

#[derive(Debug, Clone, PartialEq)]
pub enum ConductivityProfile {
    /// `min(d/ε, 1)`
    Canonical,
    /// `min(1, d^α / ε^β)`
    Power { alpha: f64, beta: f64 },
    /// `a ≡ 1`
    ConstantOne,
    /// `min(1, d³/ε)`; its maximum over `[ε, 2ε]` is `8ε²`.
    DegenerateCubic,
    /// Piecewise-linear interpolation of `values` at increasing `distances`.
    Tabulated {
        distances: Vec<f64>,
        values: Vec<f64>,
    },
}

impl ConductivityProfile {
    /// `a_ε(d)`.
    pub fn at(&self, d: f64, epsilon: f64) -> Result<f64> {
        if !(0.0..=0.5).contains(&d) {
            return Err(Error::InvalidArgument(format!(
                "boundary distance {d} outside [0, 1/2]"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {epsilon} outside (0, 1/2)"
            )));
        }
        Ok(match self {
            Self::Canonical => (d / epsilon).min(1.0),
            Self::Power { alpha, beta } => (d.powf(*alpha) / epsilon.powf(*beta)).min(1.0),
            Self::ConstantOne => 1.0,
            Self::DegenerateCubic => (d * d * d / epsilon).min(1.0),
            Self::Tabulated { distances, values } => interpolate(distances, values, d)?,
        })
    }

    /// `(α, β)` when the profile is a member of the power family.
    pub fn power_exponents(&self) -> Option<(f64, f64)> {
        match self {
            Self::Canonical => Some((1.0, 1.0)),
            Self::Power { alpha, beta } => Some((*alpha, *beta)),
            Self::DegenerateCubic => Some((3.0, 1.0)),
            _ => None,
        }
    }

    /// Short name used in reports and configs.
    pub fn label(&self) -> String {
        match self {
            Self::Canonical => "canonical".into(),
            Self::Power { alpha, beta } => format!("power:{alpha}:{beta}"),
            Self::ConstantOne => "one".into(),
            Self::DegenerateCubic => "cubic".into(),
            Self::Tabulated { .. } => "tabulated".into(),
        }
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::InvalidArgument(
            "tabulated profile needs matching, non-empty tables".into(),
        ));
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if x < lo || x > hi {
        return Err(Error::TableRange { d: x, lo, hi });
    }
    let i = xs
        .partition_point(|&t| t <= x)
        .clamp(1, xs.len().max(2) - 1);
    if xs.len() == 1 {
        return Ok(ys[0]);
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
    Ok(ys[i - 1] + t * (ys[i] - ys[i - 1]))
}

/// `κ ∈ [0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Zero,
    Finite(f64),
    Infinite,
}

impl Kappa {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Kappa::Finite(k) => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Zero => write!(f, "0"),
            Kappa::Finite(k) => write!(f, "{k}"),
            Kappa::Infinite => write!(f, "inf"),
        }
    }
}

pub type PhiFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum CapacityProfile {
    /// `φ(ε) = κ/ε`
    KappaOverEps(f64),
    /// `φ(ε) = ε^{-γ}`
    Power(f64),
    /// Arbitrary `φ`; its κ has to be declared.
    Custom {
        phi: PhiFn,
        kappa: Option<Kappa>,
        label: String,
    },
}

impl fmt::Debug for CapacityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::KappaOverEps(k) => write!(f, "KappaOverEps({k})"),
            Self::Power(g) => write!(f, "Power({g})"),
            Self::Custom { kappa, label, .. } => write!(f, "Custom({label}, kappa = {kappa:?})"),
        }
    }
}

impl CapacityProfile {
    /// `φ(ε)`; rejects values below 1 or non-finite ones.
    pub fn phi(&self, epsilon: f64) -> Result<f64> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {epsilon} outside (0, 1/2)"
            )));
        }
        let phi = match self {
            Self::KappaOverEps(k) => k / epsilon,
            Self::Power(g) => epsilon.powf(-g),
            Self::Custom { phi, .. } => phi(epsilon),
        };
        if !phi.is_finite() || phi < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "phi({epsilon}) = {phi}, need a finite value >= 1"
            )));
        }
        Ok(phi)
    }

    /// `b_ε(d)`: 1 on `{d ≥ ε}`, `φ(ε)` on the layer.
    pub fn at(&self, d: f64, epsilon: f64) -> Result<f64> {
        if !(0.0..=0.5).contains(&d) {
            return Err(Error::InvalidArgument(format!(
                "boundary distance {d} outside [0, 1/2]"
            )));
        }
        let phi = self.phi(epsilon)?;
        Ok(if d >= epsilon { 1.0 } else { phi })
    }

    /// `κ = lim ε φ(ε)`.
    pub fn kappa_limit(&self) -> Result<Kappa> {
        match self {
            Self::KappaOverEps(k) if *k > 0.0 && k.is_finite() => Ok(Kappa::Finite(*k)),
            Self::KappaOverEps(k) => Err(Error::InvalidArgument(format!(
                "kappa_over_eps needs 0 < kappa < inf, got {k}"
            ))),
            Self::Power(g) if *g <= 0.0 => Err(Error::InvalidArgument(format!(
                "power family needs gamma > 0, got {g}"
            ))),
            Self::Power(g) if *g < 1.0 => Ok(Kappa::Zero),
            Self::Power(g) if *g == 1.0 => Ok(Kappa::Finite(1.0)),
            Self::Power(_) => Ok(Kappa::Infinite),
            Self::Custom { kappa, .. } => kappa.ok_or(Error::KappaUndeclared),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::KappaOverEps(k) => format!("kappa_over_eps:{k}"),
            Self::Power(g) => format!("power:{g}"),
            Self::Custom { label, .. } => label.clone(),
        }
    }
}

/// Lumped capacity of a node row: the exact integral of `b_ε` against the
/// row's hat function. Layer rows get `φ` times their trapezoid weight; the
/// interface rows `d = ε` straddle the jump and get `(1 + φ) h / 2`.
pub(crate) fn lumped_row_capacity(grid: &Grid, layer: &LayerSpec, phi: f64, row: usize) -> f64 {
    let h = grid.h();
    let k = layer.layer_cells();
    let m = grid.cells_normal();
    if row == k || row == m - k {
        0.5 * h * (1.0 + phi)
    } else if layer.is_layer_row(row) {
        phi * grid.row_weight(row)
    } else {
        grid.row_weight(row)
    }
}

/// `∫_Ω b_ε dx` from the lumped capacities. Because ε is a grid multiple the
/// lumping integrates the piecewise-constant `b_ε` exactly.
pub fn total_capacity(grid: &Grid, layer: &LayerSpec, profile: &CapacityProfile) -> Result<f64> {
    layer.check_grid(grid)?;
    let phi = profile.phi(layer.epsilon())?;
    Ok((0..grid.rows())
        .map(|j| lumped_row_capacity(grid, layer, phi, j))
        .sum())
}

/// The exponent `p` in the non-degeneracy integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NondegeneracyExponent {
    Half,
    One,
}

impl NondegeneracyExponent {
    pub fn value(self) -> f64 {
        match self {
            Self::Half => 0.5,
            Self::One => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondegeneracyReport {
    pub p: NondegeneracyExponent,
    pub epsilon: f64,
    /// `(1/ε) ∫_0^ε (∫_s^ε dσ / a_ε(σ))^p ds`; `+∞` when the integral diverges.
    pub value: f64,
    /// For power profiles: `α < 1/p + 1` and `β + 1 > α`.
    pub verdict_analytic: Option<bool>,
}

/// Evaluates the non-degeneracy integral by nested adaptive quadrature.
///
/// Both integrals are taken in logarithmic variables, `s = ε e^{-t}` and
/// `σ = ε e^{-y}`, which turns the `ln(ε/s)` singularity of the canonical
/// profile into polynomial growth in `t`. The outer integral over `t ∈ [0, ∞)`
/// is accumulated in windows of length 10; a tail that stops shrinking is
/// reported as divergence (`value = +∞`). `quadrature_nodes` caps the number
/// of Kronrod panels per adaptive call.
pub fn nondegeneracy_value(
    profile: &ConductivityProfile,
    epsilon: f64,
    p: NondegeneracyExponent,
    quadrature_nodes: usize,
) -> Result<NondegeneracyReport> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    let panels = quadrature_nodes.max(8);
    // a must stay positive on (0, ε)
    for i in 1..512 {
        let s = epsilon * i as f64 / 512.0;
        if profile.at(s, epsilon)? <= 0.0 {
            return Err(Error::NonIntegrable);
        }
    }
    let pv = p.value();
    let reciprocal = |y: f64| -> f64 {
        let sigma = epsilon * (-y).exp();
        let a = profile.at(sigma, epsilon).unwrap_or(f64::NAN);
        if a > 0.0 {
            sigma / a
        } else {
            f64::INFINITY
        }
    };
    let inner = |t: f64| -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        quadrature::integrate(reciprocal, 0.0, t, 1e-300, 1e-13, panels).value
    };
    let outer = |t: f64| -> f64 {
        let g = inner(t);
        if g <= 0.0 {
            0.0
        } else {
            g.powf(pv) * (-t).exp()
        }
    };

    const WINDOW: f64 = 10.0;
    const T_MAX: f64 = 700.0;
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    let mut growing = 0;
    let mut lo = 0.0;
    let mut value = f64::INFINITY;
    while lo < T_MAX {
        let hi = lo + WINDOW;
        let piece = quadrature::integrate(outer, lo, hi, 1e-300, 1e-12, panels).value;
        if !piece.is_finite() {
            break;
        }
        total += piece;
        if piece <= 1e-15 * total {
            value = total;
            break;
        }
        if piece >= last {
            growing += 1;
            if growing >= 3 {
                break;
            }
        } else {
            growing = 0;
        }
        last = piece;
        lo = hi;
    }
    let verdict_analytic = profile
        .power_exponents()
        .map(|(alpha, beta)| alpha < 1.0 / pv + 1.0 && beta + 1.0 > alpha)
        .or(match profile {
            ConductivityProfile::ConstantOne => Some(true),
            _ => None,
        });
    Ok(NondegeneracyReport {
        p,
        epsilon,
        value,
        verdict_analytic,
    })
}
