//! Finite-dimensional complex Hilbert-space kernel: states, Hermitian
//! observables, tensor products, and spectral decomposition.

mod eigen;
mod matrix;
mod observable;
mod state;

pub use eigen::{
    hermitian_eigen, spectral_decompose, spectral_decompose_matrix, Eigen, SpectralForm,
    DEFAULT_DEGENERACY_TOL, JACOBI_TOL, MAX_SWEEPS,
};
pub use matrix::Matrix;
pub use observable::{spin_observable, tensor_op, Observable, HERMITIAN_TOL};
pub use state::{inner, tensor_state, StateVector};

pub(crate) use observable::check_dim;
