use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::matrix::Matrix;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Entrywise Hermiticity tolerance accepted by [`Observable::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Hermitian operator on a finite-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: Matrix,
}

impl Observable {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: Matrix::identity(dim),
        }
    }

    /// Projector `|ψ⟩⟨ψ|` onto a normalized state.
    pub fn projector(state: &StateVector) -> Self {
        Self {
            matrix: Matrix::outer(state.amplitudes()),
        }
    }

    /// Real diagonal observable, e.g. a box-occupation projector.
    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            matrix: Matrix::diagonal(values),
        }
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        Self {
            matrix: Matrix::from_row_major(2, vec![o, l, l, o]).unwrap(),
        }
    }

    pub fn pauli_y() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        Self {
            matrix: Matrix::from_row_major(2, vec![o, -i, i, o]).unwrap(),
        }
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(Complex64::new(factor, 0.0)),
        }
    }

    /// Lifts a single-site operator into a multi-site space with site dimensions `dims`.
    pub fn embed(&self, site: usize, dims: &[usize]) -> Result<Self> {
        if site >= dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                found: site + 1,
            });
        }
        if dims[site] != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: dims[site],
                found: self.dim(),
            });
        }
        let mut out = Matrix::identity(1);
        for (k, &d) in dims.iter().enumerate() {
            let factor = if k == site {
                self.matrix.clone()
            } else {
                Matrix::identity(d)
            };
            out = out.kron(&factor);
        }
        Ok(Self { matrix: out })
    }

    /// Expectation value `⟨ψ|A|ψ⟩` (real for Hermitian `A`).
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        check_dim(self.dim(), state.dim())?;
        Ok(self
            .matrix
            .sandwich(state.amplitudes(), state.amplitudes())
            .re)
    }

    /// `A|ψ⟩` as raw amplitudes.
    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        check_dim(self.dim(), state.dim())?;
        Ok(self.matrix.apply(state.amplitudes()))
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

impl Add for &Observable {
    type Output = Observable;

    fn add(self, rhs: &Observable) -> Observable {
        Observable {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Observable {
    type Output = Observable;

    fn sub(self, rhs: &Observable) -> Observable {
        Observable {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

/// Operator product. The product of two Hermitian operators is Hermitian only
/// when they commute, so the result is a bare [`Matrix`].
impl Mul for &Observable {
    type Output = Matrix;

    fn mul(self, rhs: &Observable) -> Matrix {
        &self.matrix * &rhs.matrix
    }
}

/// Kronecker product `a ⊗ b`; Hermitian whenever both inputs are.
pub fn tensor_op(a: &Observable, b: &Observable) -> Observable {
    Observable {
        matrix: a.matrix.kron(&b.matrix),
    }
}

/// Spin component `σ·n̂` along `n̂ = (sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn spin_observable(theta: f64, phi: f64) -> Observable {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let nx = st * cp;
    let ny = st * sp;
    let nz = ct;
    let m = Matrix::from_row_major(
        2,
        vec![
            Complex64::new(nz, 0.0),
            Complex64::new(nx, -ny),
            Complex64::new(nx, ny),
            Complex64::new(-nz, 0.0),
        ],
    )
    .unwrap();
    Observable { matrix: m }
}
