//! Linear solvers for the implicit step.

use crate::error::{Error, Result};

/// Thomas elimination for a tridiagonal system. `lower[i]` couples row `i`
/// to `i - 1` (`lower[0]` unused), `upper[i]` couples row `i` to `i + 1`.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(Error::Mismatch(
            "tridiagonal bands of different lengths".into(),
        ));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::InvalidArgument("singular tridiagonal system".into()));
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == 0.0 {
            return Err(Error::InvalidArgument("singular tridiagonal system".into()));
        }
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final `‖r‖ / ‖b‖`.
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients for an SPD operator given as
/// `apply(x, out)`; stops at `‖r‖ ≤ tol ‖b‖`.
pub fn conjugate_gradient<F>(
    apply: F,
    diagonal: &[f64],
    rhs: &[f64],
    initial: &[f64],
    tol: f64,
    max_iterations: usize,
) -> Result<CgOutcome>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let b_norm = dot(rhs, rhs).sqrt();
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            solution: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut x = initial.to_vec();
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(diagonal).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut res = dot(&r, &r).sqrt() / b_norm;
    for it in 0..max_iterations {
        if res <= tol {
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
                relative_residual: res,
            });
        }
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = dot(&r, &r).sqrt() / b_norm;
        for i in 0..n {
            z[i] = r[i] / diagonal[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if res <= tol {
        return Ok(CgOutcome {
            solution: x,
            iterations: max_iterations,
            relative_residual: res,
        });
    }
    Err(Error::CgNotConverged {
        residual: res,
        iterations: max_iterations,
    })
}
