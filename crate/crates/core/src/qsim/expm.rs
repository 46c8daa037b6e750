use nalgebra::SymmetricEigen;

use super::dense::{unitary_deviation, DenseMatrix};
use super::sparse::SparseHamiltonian;
use super::{C64, DEFAULT_DENSE_CUTOFF};
use crate::error::{Error, Result};

/// `e^{iHt}` for a dense Hermitian `H`, by diagonalization.
pub fn hermitian_exponential(h: &DenseMatrix, t: f64) -> DenseMatrix {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&l| C64::from_polar(1.0, l * t))
        .collect();
    let mut scaled = v.clone();
    for j in 0..n {
        let p = phases[j];
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= p);
    }
    scaled * v.adjoint()
}

/// `e^{iHt}` for a sparse Hamiltonian no larger than the dense cutoff.
pub fn unitary_exponential(h: &SparseHamiltonian, t: f64) -> Result<DenseMatrix> {
    unitary_exponential_with_cutoff(h, t, DEFAULT_DENSE_CUTOFF)
}

pub fn unitary_exponential_with_cutoff(h: &SparseHamiltonian, t: f64, cutoff: usize) -> Result<DenseMatrix> {
    if h.dim() > cutoff {
        return Err(Error::CutoffExceeded { dim: h.dim(), cutoff });
    }
    let u = hermitian_exponential(&h.to_dense(), t);
    let deviation = unitary_deviation(&u);
    if deviation > 1e-9 {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(u)
}
