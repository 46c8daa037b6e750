//! Exact statevector and operator core.
//!
//! Registers carry 0-based basis indices. Domain code working with the
//! 1-based labels of `[M]` converts at the register boundary with
//! `index = label - 1`; the helpers here that take a [`Permutation`] do that
//! conversion themselves.

pub mod dense;
pub mod dyadic;
pub mod eigen;
pub mod expm;
pub mod permutation;
pub mod sparse;
pub mod state;

pub use dense::DenseMatrix;
pub use dyadic::Dyadic;
pub use eigen::{extremal_eigen, EigenOptions, EigenPair, Extremal, HermitianOperator};
pub use expm::{hermitian_exponential, unitary_exponential};
pub use permutation::Permutation;
pub use sparse::{HamiltonianTerm, SparseHamiltonian, SparseHamiltonianBuilder};
pub use state::Statevector;

pub use num_complex::Complex64 as C64;

/// Largest dimension handled by dense linear algebra.
pub const DEFAULT_DENSE_CUTOFF: usize = 4096;

/// Norm tolerance kept by every unitary operation.
pub const NORM_TOL: f64 = 1e-10;

/// Frobenius deviation `‖U†U − I‖_F` above which an operator is rejected.
pub const UNITARY_TOL: f64 = 1e-8;
