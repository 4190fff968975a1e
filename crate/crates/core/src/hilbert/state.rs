use num_complex::Complex64;

use crate::error::{Error, Result};

/// Normalized pure state over a finite-dimensional Hilbert space.
///
/// Basis convention: index 0 is spin up along z. Multi-particle indices are
/// big-endian in particle order, so `|↑↓⟩` sits at index 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Normalizes `amplitudes` into a state.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyState);
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Like [`StateVector::new`] for real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Spin-½ "up" along the direction with polar angle `theta` and azimuth `phi`.
    pub fn spin_up(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            amplitudes: vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
        }
    }

    /// Spin-½ "down" along the direction `(theta, phi)`; orthogonal to [`StateVector::spin_up`].
    pub fn spin_down(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            amplitudes: vec![Complex64::new(s, 0.0), -Complex64::from_polar(c, phi)],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest amplitude difference after removing the global phase relative to `other`.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let overlap: Complex64 = other
            .amplitudes
            .iter()
            .zip(&self.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max)
    }
}

/// `⟨bra|ket⟩ = Σ_k conj(bra_k)·ket_k`.
pub fn inner(bra: &StateVector, ket: &StateVector) -> Result<Complex64> {
    if bra.dim() != ket.dim() {
        return Err(Error::DimensionMismatch {
            expected: bra.dim(),
            found: ket.dim(),
        });
    }
    Ok(bra
        .amplitudes
        .iter()
        .zip(&ket.amplitudes)
        .map(|(b, k)| b.conj() * k)
        .sum())
}

/// Kronecker product `|a⟩ ⊗ |b⟩`, big-endian. Only produces product states;
/// entangled states such as the GHZ state go through [`StateVector::new`].
pub fn tensor_state(a: &StateVector, b: &StateVector) -> StateVector {
    let amplitudes = a
        .amplitudes
        .iter()
        .flat_map(|x| b.amplitudes.iter().map(move |y| x * y))
        .collect();
    StateVector::new(amplitudes).expect("product of normalized states has unit norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn up() -> StateVector {
        StateVector::basis(2, 0)
    }

    fn down() -> StateVector {
        StateVector::basis(2, 1)
    }

    #[test]
    fn inner_identity_and_orthogonality() {
        assert!((inner(&up(), &up()).unwrap() - 1.0).norm() < 1e-15);
        assert!(inner(&up(), &down()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn inner_of_three_box_states_is_one_third() {
        let post = StateVector::from_real(&[1.0, 1.0, -1.0]).unwrap();
        let pre = StateVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let z = inner(&post, &pre).unwrap();
        assert!((z.re - 1.0 / 3.0).abs() < 1e-15 && z.im.abs() < 1e-15);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let three = StateVector::basis(3, 0);
        assert!(matches!(
            inner(&up(), &three),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn tensor_of_basis_states() {
        let ud = tensor_state(&up(), &down());
        assert_eq!(ud.dim(), 4);
        assert_eq!(ud.amplitudes()[1], Complex64::new(1.0, 0.0));
        assert_eq!(ud, StateVector::basis(4, 1));
    }

    #[test]
    fn new_rejects_empty_and_zero() {
        assert_eq!(StateVector::new(vec![]), Err(Error::EmptyState));
        assert_eq!(StateVector::from_real(&[0.0, 0.0]), Err(Error::ZeroNorm));
    }

    #[test]
    fn new_normalizes() {
        let s = StateVector::from_real(&[3.0, 4.0]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn spin_up_and_down_are_orthonormal() {
        for &(t, p) in &[(0.0, 0.0), (PI / 3.0, 1.2), (2.0, -0.7), (PI, 0.0)] {
            let u = StateVector::spin_up(t, p);
            let d = StateVector::spin_down(t, p);
            assert!((u.norm() - 1.0).abs() < 1e-15);
            assert!((d.norm() - 1.0).abs() < 1e-15);
            assert!(inner(&u, &d).unwrap().norm() < 1e-15);
        }
    }
}
