//! Random instances for property suites: Haar-like states, GUE-like
//! Hermitian matrices, and projective measurements with random eigenbases.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{hermitian_eigen, Matrix, Observable, StateVector};
use crate::measurement::{Outcome, ProjectiveMeasurement};

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized state with i.i.d. complex Gaussian amplitudes.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let amps = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if let Ok(s) = StateVector::new(amps) {
            return s;
        }
    }
}

/// `(X + X†)/2` for a complex Gaussian `X`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Observable {
    let x = Matrix::from_fn(dim, |_, _| gaussian_complex(rng));
    let h = Matrix::from_fn(dim, |r, c| (x.get(r, c) + x.get(c, r).conj()) * 0.5);
    Observable::new(h).expect("symmetrized matrix is Hermitian")
}

/// Projective measurement over a random orthonormal basis, with the basis
/// vectors grouped into `levels` consecutive blocks (`1 ≤ levels ≤ dim`).
/// Outcome `k` has eigenvalue `k` and label `"m{k}"`.
pub fn random_measurement<R: Rng + ?Sized>(
    rng: &mut R,
    label: &str,
    dim: usize,
    levels: usize,
) -> ProjectiveMeasurement {
    let levels = levels.clamp(1, dim);
    let eig = hermitian_eigen(random_hermitian(rng, dim).matrix()).expect("hermitian");
    // split points: level k takes a nonempty contiguous block of basis vectors
    let mut cuts: Vec<usize> = (1..dim).collect();
    while cuts.len() > levels - 1 {
        let i = rng.random_range(0..cuts.len());
        cuts.remove(i);
    }
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(dim);

    let outcomes = bounds
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let mut proj = Matrix::zeros(dim);
            for col in w[0]..w[1] {
                proj = &proj + &Matrix::outer(&eig.vector(col));
            }
            Outcome::new(format!("m{k}"), k as f64, proj)
        })
        .collect();
    ProjectiveMeasurement::new(label, outcomes)
        .expect("eigenbasis projectors form a valid measurement")
}
