//! Discrete operators on a [`Grid`].
//!
//! The stiffness is kept in integrated (weak) form `K`, so that
//! `uᵀ K v = Σ_faces a_f δu δv / h · (1/P)` (+ periodic faces in 2D) holds by
//! construction. The nodal operator `A u ≈ −div(a_ε ∇u)` is `W⁻¹ K u` with the
//! trapezoid node weights `W`, and the capacity `B` is diagonal in the same
//! weighted sense. With these conventions `E = ½⟨Au, u⟩_W = ½ uᵀKu` and
//! `I = Σ (Au)² W / b = (Ku)ᵀ B⁻¹ (Ku)`.

use crate::coefficients::{lumped_row_capacity, CapacityProfile, ConductivityProfile};
use crate::error::{Error, Result};
use crate::geometry::{Grid, LayerSpec, Side};

/// Nodal field over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Mismatch(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite field value at node {i}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.node_count()],
        }
    }

    /// Samples `f(x_N, x')` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|i| {
                let (row, col) = grid.position(i);
                f(grid.x_normal(row), grid.x_periodic(col))
            })
            .collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Values of normal row `j` (length `P`).
    pub fn row(&self, j: usize) -> &[f64] {
        let p = self.grid.cells_periodic();
        &self.values[j * p..(j + 1) * p]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn difference(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Trapezoid `L²(Ω)` norm.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_rows(|_| true)
    }

    /// Trapezoid `L²` norm over the rows selected by `keep`, using the full
    /// grid weights.
    pub fn l2_norm_rows(&self, keep: impl Fn(usize) -> bool) -> f64 {
        (0..self.values.len())
            .filter(|&i| keep(self.grid.position(i).0))
            .map(|i| self.grid.node_weight(i) * self.values[i] * self.values[i])
            .sum::<f64>()
            .sqrt()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Mismatch("fields live on different grids".into()));
        }
        Ok(())
    }
}

/// Values on the two boundary components, one entry per periodic node.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
}

impl BoundaryValues {
    pub fn constant(periodic_nodes: usize, bottom: f64, top: f64) -> Self {
        Self {
            bottom: vec![bottom; periodic_nodes],
            top: vec![top; periodic_nodes],
        }
    }

    pub fn side(&self, side: Side) -> &[f64] {
        match side {
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    /// `‖w‖²_{L²(∂Ω)}` with measure `1/P` per node.
    pub fn norm_squared(&self) -> f64 {
        let m = 1.0 / self.bottom.len() as f64;
        m * self
            .bottom
            .iter()
            .chain(&self.top)
            .map(|v| v * v)
            .sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn difference(&self, other: &BoundaryValues) -> Result<BoundaryValues> {
        if self.bottom.len() != other.bottom.len() || self.top.len() != other.top.len() {
            return Err(Error::Mismatch(
                "boundary values of different lengths".into(),
            ));
        }
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Ok(Self {
            bottom: sub(&self.bottom, &other.bottom),
            top: sub(&self.top, &other.top),
        })
    }

    pub fn distance(&self, other: &BoundaryValues) -> Result<f64> {
        Ok(self.difference(other)?.norm())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            bottom: self.bottom.iter().map(|v| c * v).collect(),
            top: self.top.iter().map(|v| c * v).collect(),
        }
    }
}

/// Element `(u, w)` of `H_0^κ = L²(Ω) × L²(∂Ω)` with inner product
/// `(u₁, u₂) + κ (w₁, w₂)_{∂Ω}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState {
    pub interior: Field,
    pub boundary: BoundaryValues,
    pub kappa: f64,
}

impl CoupledState {
    pub fn norm(&self) -> f64 {
        let u = self.interior.l2_norm();
        (u * u + self.kappa * self.boundary.norm_squared()).sqrt()
    }

    pub fn distance(&self, other: &CoupledState) -> Result<f64> {
        let du = self.interior.difference(&other.interior)?.l2_norm();
        let dw = self.boundary.difference(&other.boundary)?.norm_squared();
        Ok((du * du + self.kappa * dw).sqrt())
    }
}

/// Stiffness `K` (integrated form) and lumped capacity `B`.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    grid: Grid,
    layer: Option<LayerSpec>,
    face_conductivity: Vec<f64>,
    row_conductivity: Vec<f64>,
    capacity: Vec<f64>,
    pinned_boundary: bool,
}

/// Assembles the boundary-layer operators.
///
/// Normal faces use `a_ε` at the face midpoint; periodic faces in row `j` use
/// `a_ε(d_j)`. `B` holds the exact integral of `b_ε` against each hat
/// function, so boundary nodes carry `φ h/2` and interface nodes `(1+φ) h/2`.
pub fn assemble(
    grid: &Grid,
    layer: &LayerSpec,
    a: &ConductivityProfile,
    b: &CapacityProfile,
) -> Result<OperatorPair> {
    layer.check_grid(grid)?;
    let eps = layer.epsilon();
    let m = grid.cells_normal();
    let h = grid.h();
    let face_conductivity = (0..m)
        .map(|j| {
            let mid = ((j as f64 + 0.5) * h).min(1.0 - (j as f64 + 0.5) * h);
            a.at(mid, eps)
        })
        .collect::<Result<Vec<_>>>()?;
    let row_conductivity = (0..grid.rows())
        .map(|j| a.at(grid.row_distance(j), eps))
        .collect::<Result<Vec<_>>>()?;
    let phi = b.phi(eps)?;
    let hp = grid.periodic_spacing();
    let capacity = (0..grid.node_count())
        .map(|i| lumped_row_capacity(grid, layer, phi, grid.position(i).0) * hp)
        .collect();
    Ok(OperatorPair {
        grid: *grid,
        layer: Some(*layer),
        face_conductivity,
        row_conductivity,
        capacity,
        pinned_boundary: false,
    })
}

/// Stiffness of `a_ε` paired with the unit capacity (`B = W`).
pub fn assemble_stiffness(
    grid: &Grid,
    layer: &LayerSpec,
    a: &ConductivityProfile,
) -> Result<OperatorPair> {
    let unit = CapacityProfile::Custom {
        phi: std::sync::Arc::new(|_| 1.0),
        kappa: Some(crate::coefficients::Kappa::Zero),
        label: "one".into(),
    };
    assemble(grid, layer, a, &unit)
}

impl OperatorPair {
    /// Unit-conductivity stiffness with an arbitrary diagonal mass; used by
    /// the limit problems. With `pinned_boundary` the boundary rows are
    /// excluded from the unknowns.
    pub fn unit(grid: &Grid, mass: Vec<f64>, pinned_boundary: bool) -> Result<Self> {
        if mass.len() != grid.node_count() || mass.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::InvalidArgument(
                "mass must be positive, one entry per node".into(),
            ));
        }
        Ok(Self {
            grid: *grid,
            layer: None,
            face_conductivity: vec![1.0; grid.cells_normal()],
            row_conductivity: vec![1.0; grid.rows()],
            capacity: mass,
            pinned_boundary,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn layer(&self) -> Option<&LayerSpec> {
        self.layer.as_ref()
    }

    /// Diagonal of `B`.
    pub fn capacity(&self) -> &[f64] {
        &self.capacity
    }

    /// `a` at the normal faces `j + ½`.
    pub fn face_conductivity(&self) -> &[f64] {
        &self.face_conductivity
    }

    /// `a` at node rows; weights the periodic faces.
    pub fn row_conductivity(&self) -> &[f64] {
        &self.row_conductivity
    }

    pub fn pinned_boundary(&self) -> bool {
        self.pinned_boundary
    }

    /// True for nodes that are unknowns of the evolution.
    #[inline]
    pub fn is_free(&self, index: usize) -> bool {
        if !self.pinned_boundary {
            return true;
        }
        let row = self.grid.position(index).0;
        row != 0 && row != self.grid.cells_normal()
    }

    /// `Σ_faces a_f δu δv / h` with the `1/P` boundary measure, plus periodic
    /// faces in 2D.
    pub fn stiffness_form(&self, u: &[f64], v: &[f64]) -> f64 {
        let g = &self.grid;
        let p = g.cells_periodic();
        let h = g.h();
        let hp = g.periodic_spacing();
        let mut s = 0.0;
        for j in 0..g.cells_normal() {
            let c = self.face_conductivity[j] * hp / h;
            for col in 0..p {
                let (i0, i1) = (g.index(j, col), g.index(j + 1, col));
                s += c * (u[i1] - u[i0]) * (v[i1] - v[i0]);
            }
        }
        if g.dimension() == 2 {
            for j in 0..g.rows() {
                let c = g.row_weight(j) * self.row_conductivity[j] / hp;
                for col in 0..p {
                    let (i0, i1) = (g.index(j, col), g.index(j, (col + 1) % p));
                    s += c * (u[i1] - u[i0]) * (v[i1] - v[i0]);
                }
            }
        }
        s
    }

    /// `K u` (integrated form); entries of pinned rows are zeroed.
    pub fn apply_stiffness(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.add_stiffness(u, 1.0, &mut out);
        if self.pinned_boundary {
            for (i, o) in out.iter_mut().enumerate() {
                if !self.is_free(i) {
                    *o = 0.0;
                }
            }
        }
        out
    }

    /// `out += scale · K u` over all rows.
    pub(crate) fn add_stiffness(&self, u: &[f64], scale: f64, out: &mut [f64]) {
        let g = &self.grid;
        let p = g.cells_periodic();
        let h = g.h();
        let hp = g.periodic_spacing();
        for j in 0..g.cells_normal() {
            let c = scale * self.face_conductivity[j] * hp / h;
            for col in 0..p {
                let (i0, i1) = (g.index(j, col), g.index(j + 1, col));
                let flux = c * (u[i1] - u[i0]);
                out[i0] -= flux;
                out[i1] += flux;
            }
        }
        if g.dimension() == 2 {
            for j in 0..g.rows() {
                let c = scale * g.row_weight(j) * self.row_conductivity[j] / hp;
                for col in 0..p {
                    let (i0, i1) = (g.index(j, col), g.index(j, (col + 1) % p));
                    let flux = c * (u[i1] - u[i0]);
                    out[i0] -= flux;
                    out[i1] += flux;
                }
            }
        }
    }

    /// Diagonal of `K`.
    pub(crate) fn stiffness_diagonal(&self) -> Vec<f64> {
        let g = &self.grid;
        let p = g.cells_periodic();
        let h = g.h();
        let hp = g.periodic_spacing();
        let mut d = vec![0.0; g.node_count()];
        for j in 0..g.cells_normal() {
            let c = self.face_conductivity[j] * hp / h;
            for col in 0..p {
                d[g.index(j, col)] += c;
                d[g.index(j + 1, col)] += c;
            }
        }
        if g.dimension() == 2 {
            for j in 0..g.rows() {
                let c = 2.0 * g.row_weight(j) * self.row_conductivity[j] / hp;
                for col in 0..p {
                    d[g.index(j, col)] += c;
                }
            }
        }
        d
    }

    /// Nodal operator `A u = W⁻¹ K u ≈ −div(a_ε ∇u)`.
    pub fn apply_nodal(&self, u: &Field) -> Field {
        let ku = self.apply_stiffness(u.values());
        let values = ku
            .iter()
            .enumerate()
            .map(|(i, k)| k / self.grid.node_weight(i))
            .collect();
        Field::from_raw(self.grid, values)
    }

    /// `⟨B u, v⟩`.
    pub fn capacity_form(&self, u: &[f64], v: &[f64]) -> f64 {
        self.capacity
            .iter()
            .zip(u)
            .zip(v)
            .map(|((b, x), y)| b * x * y)
            .sum()
    }

    /// `(K u)ᵀ B⁻¹ (K u)` over the free rows.
    pub fn dissipation_of(&self, u: &[f64]) -> f64 {
        let ku = self.apply_stiffness(u);
        ku.iter()
            .zip(&self.capacity)
            .enumerate()
            .filter(|(i, _)| self.is_free(*i))
            .map(|(_, (k, b))| k * k / b)
            .sum()
    }
}

/// Layer average `m_ε u`: per periodic column, the trapezoid mean of `u` over
/// the `k` layer cells next to each boundary component.
pub fn average_m_eps(field: &Field, layer: &LayerSpec) -> Result<BoundaryValues> {
    layer.check_grid(field.grid())?;
    let g = field.grid();
    let k = layer.layer_cells();
    let m = g.cells_normal();
    let mean = |col: usize, rows: &mut dyn Iterator<Item = usize>| {
        let mut s = 0.0;
        for (n, j) in rows.enumerate() {
            let w = if n == 0 || n == k { 0.5 } else { 1.0 };
            s += w * field.values()[g.index(j, col)];
        }
        s / k as f64
    };
    let p = g.cells_periodic();
    Ok(BoundaryValues {
        bottom: (0..p).map(|c| mean(c, &mut (0..=k))).collect(),
        top: (0..p).map(|c| mean(c, &mut (m - k..=m).rev())).collect(),
    })
}

/// Nodal read of `u` at `x_N = δ` and `x_N = 1 − δ`.
pub fn trace_at_depth(field: &Field, delta: f64) -> Result<BoundaryValues> {
    let g = field.grid();
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::InvalidArgument(format!(
            "trace depth {delta} outside [0, 1/2)"
        )));
    }
    let k = g.cells_in(delta).ok_or(Error::NotAligned {
        epsilon: delta,
        h: g.h(),
    })?;
    Ok(BoundaryValues {
        bottom: field.row(k).to_vec(),
        top: field.row(g.cells_normal() - k).to_vec(),
    })
}

/// `E_ε(u) = ½ ⟨A u, u⟩`.
pub fn energy(field: &Field, pair: &OperatorPair) -> f64 {
    0.5 * pair.stiffness_form(field.values(), field.values())
}

/// `I_ε(u) = Σ (A u)²_j / b_j · w_j`.
pub fn dissipation_i(field: &Field, pair: &OperatorPair) -> f64 {
    pair.dissipation_of(field.values())
}

/// `ι_ε(u) = (u, m_ε u)`.
pub fn embed_iota(field: &Field, layer: &LayerSpec, kappa: f64) -> Result<CoupledState> {
    Ok(CoupledState {
        interior: field.clone(),
        boundary: average_m_eps(field, layer)?,
        kappa,
    })
}

/// `F_ε = ½ Σ_n dt ⟨B v_n, v_n⟩` with forward quotients `v_n`.
pub fn functional_f(trajectory: &[Field], dt: f64, pair: &OperatorPair) -> Result<f64> {
    if trajectory.len() < 2 {
        return Err(Error::InvalidArgument(
            "F needs at least two snapshots".into(),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let mut total = 0.0;
    for w in trajectory.windows(2) {
        let v: Vec<f64> = w[1]
            .values()
            .iter()
            .zip(w[0].values())
            .map(|(b, a)| (b - a) / dt)
            .collect();
        total += dt * pair.capacity_form(&v, &v);
    }
    Ok(0.5 * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical(m: usize, eps: f64, kappa: f64) -> (Grid, LayerSpec, OperatorPair) {
        let g = Grid::one_dimensional(m).unwrap();
        let l = LayerSpec::new(&g, eps).unwrap();
        let pair = assemble(
            &g,
            &l,
            &ConductivityProfile::Canonical,
            &CapacityProfile::KappaOverEps(kappa),
        )
        .unwrap();
        (g, l, pair)
    }

    #[test]
    fn constants_are_in_the_null_space() {
        let g = Grid::new(2, 16, Some(6)).unwrap();
        let l = LayerSpec::new(&g, 0.25).unwrap();
        let pair = assemble(
            &g,
            &l,
            &ConductivityProfile::Canonical,
            &CapacityProfile::KappaOverEps(1.0),
        )
        .unwrap();
        let one = Field::constant(g, 3.0);
        assert!(pair.apply_stiffness(one.values()).iter().all(|&v| v == 0.0));
        assert_eq!(energy(&one, &pair), 0.0);
        assert_eq!(dissipation_i(&one, &pair), 0.0);
    }

    #[test]
    fn unit_conductivity_is_second_difference() {
        let g = Grid::one_dimensional(10).unwrap();
        let pair = OperatorPair::unit(&g, g.weights(), false).unwrap();
        let u = Field::from_fn(g, |x, _| x - 0.5);
        let au = pair.apply_nodal(&u);
        for j in 1..10 {
            assert!(au.values()[j].abs() < 1e-12);
        }
        assert!((au.values()[0] + 2.0 * 10.0).abs() < 1e-9);
    }

    #[test]
    fn linear_field_energy() {
        let (g, _, pair) = canonical(40, 0.1, 1.0);
        let u = Field::from_fn(g, |x, _| x);
        assert!((energy(&u, &pair) - 0.45).abs() < 1e-12);
        let unit = OperatorPair::unit(&g, g.weights(), false).unwrap();
        assert!((energy(&u, &unit) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nodal_operator_converges_on_the_layer() {
        let mut errs = Vec::new();
        for m in [64, 128, 256] {
            let (g, _, pair) = canonical(m, 0.25, 1.0);
            let u = Field::from_fn(g, |x, _| x * x);
            let au = pair.apply_nodal(&u);
            let j = m / 8; // x = 0.125
            errs.push((au.values()[j] + 16.0 * g.x_normal(j)).abs());
        }
        assert!(errs[2] < 1e-9 || errs[1] / errs[2] > 3.0, "{errs:?}");
    }

    #[test]
    fn layer_average_examples() {
        let (g, l, _) = canonical(40, 0.1, 1.0);
        let m = average_m_eps(&Field::from_fn(g, |x, _| x), &l).unwrap();
        assert!((m.bottom[0] - 0.05).abs() < 1e-14 && (m.top[0] - 0.95).abs() < 1e-14);
        let (g2, l2, _) = canonical(80, 0.2, 1.0);
        let sq = average_m_eps(&Field::from_fn(g2, |x, _| x * x), &l2).unwrap();
        assert!((sq.bottom[0] - 0.04 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn trace_examples() {
        let g = Grid::one_dimensional(10).unwrap();
        let t = trace_at_depth(&Field::from_fn(g, |x, _| x), 0.1).unwrap();
        assert!((t.bottom[0] - 0.1).abs() < 1e-15 && (t.top[0] - 0.9).abs() < 1e-15);
        let s = trace_at_depth(
            &Field::from_fn(g, |x, _| (std::f64::consts::PI * x).sin()),
            0.0,
        )
        .unwrap();
        assert!(s.bottom[0].abs() < 1e-15 && s.top[0].abs() < 1e-15);
        assert!(matches!(
            trace_at_depth(&Field::constant(g, 1.0), 0.15),
            Err(Error::NotAligned { .. })
        ));
    }

    #[test]
    fn embedding_norm() {
        let (g, l, _) = canonical(40, 0.1, 1.0);
        let s = embed_iota(&Field::constant(g, 1.0), &l, 2.0).unwrap();
        assert!((s.norm() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn f_of_linear_in_time_trajectory() {
        let (g, _, pair) = canonical(40, 0.1, 1.0);
        let traj: Vec<Field> = (0..=10)
            .map(|n| Field::constant(g, n as f64 * 0.1))
            .collect();
        assert!((functional_f(&traj, 0.1, &pair).unwrap() - 1.4).abs() < 1e-12);
        assert!(functional_f(&traj[..1], 0.1, &pair).is_err());
    }

    #[test]
    fn bulk_bump_dissipation_matches_laplacian() {
        use std::f64::consts::PI;
        let bump = |x: f64| {
            if (0.3..=0.7).contains(&x) {
                (PI * (x - 0.3) / 0.4).sin().powi(4)
            } else {
                0.0
            }
        };
        let exact = {
            // ∫ |u''|² for u = sin⁴(π s / L) on [0, L], by fine midpoint sums
            let n = 200_000;
            let l = 0.4;
            let k = PI / l;
            (0..n)
                .map(|i| {
                    let s = (i as f64 + 0.5) * l / n as f64;
                    let (sn, cs) = ((k * s).sin(), (k * s).cos());
                    let d2 = k * k * (12.0 * sn * sn * cs * cs - 4.0 * sn.powi(4));
                    d2 * d2 * l / n as f64
                })
                .sum::<f64>()
        };
        let (g, _, pair) = canonical(400, 0.1, 1.0);
        let u = Field::from_fn(g, |x, _| bump(x));
        let i = dissipation_i(&u, &pair);
        assert!((i - exact).abs() / exact < 1e-3, "{i} vs {exact}");
        assert!((dissipation_i(&u.scaled(3.0), &pair) - 9.0 * i).abs() < 1e-9 * i);
    }
}
