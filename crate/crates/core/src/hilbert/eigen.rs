//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! grouped spectral form `A = Σ_i λ_i Π_i` built on top of it.
//!
//! Each rotation first removes the phase of the pivot `a_pq = r·e^{iφ}` with
//! `D = diag(1, e^{-iφ})` on the `(p, q)` plane, then applies the real
//! symmetric Jacobi rotation that annihilates the now-real pivot. Sweeps
//! repeat until the off-diagonal Frobenius norm drops below
//! [`JACOBI_TOL`] (scaled by `max(1, ‖A‖_F)`).

use num_complex::Complex64;

use super::matrix::Matrix;
use super::observable::{Observable, HERMITIAN_TOL};
use crate::error::{Error, Result};

pub const JACOBI_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 100;
/// Default relative tolerance for merging eigenvalues into one degenerate level.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `k` is the normalized eigenvector for `values[k]`.
    pub vectors: Matrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim())
            .map(|r| self.vectors.get(r, k))
            .collect()
    }
}

/// Diagonalizes a Hermitian matrix.
pub fn hermitian_eigen(m: &Matrix) -> Result<Eigen> {
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.dim();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let threshold = JACOBI_TOL * m.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = Matrix::from_fn(n, |r, c| v.get(r, order[c]));
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a.get(r, c).norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = D·P restricted to the (p, q) plane.
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = a.dim();
    // A ← A U
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * upp + akq * uqp);
        a.set(k, q, akp * upq + akq * uqq);
    }
    // A ← U† A
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, upp.conj() * apk + uqp.conj() * aqk);
        a.set(q, k, upq.conj() * apk + uqq.conj() * aqk);
    }
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
    // V ← V U
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * upp + vkq * uqp);
        v.set(k, q, vkp * upq + vkq * uqq);
    }
}

/// Distinct eigenvalues (ascending) with their eigenspace projectors.
#[derive(Clone, Debug)]
pub struct SpectralForm {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<Matrix>,
    ranks: Vec<usize>,
}

impl SpectralForm {
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Σ_i λ_i Π_i`.
    pub fn reconstruct(&self) -> Matrix {
        let dim = self.projectors.first().map_or(0, Matrix::dim);
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(Matrix::zeros(dim), |acc, (&l, p)| {
                &acc + &p.scale(Complex64::new(l, 0.0))
            })
    }
}

/// Groups the spectrum of `obs` into degenerate levels.
///
/// Eigenvalues closer than `degeneracy_tol · ρ` (ρ the spectral radius, or 1
/// for the zero operator) to their sorted neighbour share one level whose
/// eigenvalue is the cluster mean.
pub fn spectral_decompose(obs: &Observable, degeneracy_tol: f64) -> Result<SpectralForm> {
    spectral_decompose_matrix(obs.matrix(), degeneracy_tol)
}

pub fn spectral_decompose_matrix(m: &Matrix, degeneracy_tol: f64) -> Result<SpectralForm> {
    let eig = hermitian_eigen(m)?;
    let radius = eig.values.iter().fold(0.0_f64, |r, v| r.max(v.abs()));
    let scale = if radius > 0.0 { radius } else { 1.0 };
    let tol = degeneracy_tol * scale;

    let n = m.dim();
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut ranks = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= tol {
            end += 1;
        }
        let mean = eig.values[start..end].iter().sum::<f64>() / (end - start) as f64;
        let mut proj = Matrix::zeros(n);
        for k in start..end {
            proj = &proj + &Matrix::outer(&eig.vector(k));
        }
        eigenvalues.push(mean);
        projectors.push(proj);
        ranks.push(end - start);
        start = end;
    }
    Ok(SpectralForm {
        eigenvalues,
        projectors,
        ranks,
    })
}
