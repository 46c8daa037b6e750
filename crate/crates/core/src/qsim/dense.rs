//! Small dense complex matrices and the standard gates built from them.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type DenseMatrix = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(dim: usize) -> DenseMatrix {
    DenseMatrix::identity(dim, dim)
}

pub fn pauli_x() -> DenseMatrix {
    DenseMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn hadamard() -> DenseMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DenseMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])
}

/// `H^{⊗k}`.
pub fn hadamard_power(k: usize) -> DenseMatrix {
    (0..k).fold(identity(1), |acc, _| kron(&acc, &hadamard()))
}

/// Kronecker product with `a` on the more significant factor.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.kronecker(b)
}

/// Permutation matrix sending basis index `i` to `map[i]`.
pub fn permutation_matrix(map: &[usize]) -> DenseMatrix {
    let d = map.len();
    let mut m = DenseMatrix::zeros(d, d);
    for (i, &j) in map.iter().enumerate() {
        m[(j, i)] = c(1.0);
    }
    m
}

/// `‖U†U − I‖_F`.
pub fn unitary_deviation(op: &DenseMatrix) -> f64 {
    if !op.is_square() {
        return f64::INFINITY;
    }
    let n = op.nrows();
    (op.adjoint() * op - identity(n)).norm()
}

/// Largest singular value.
pub fn operator_norm(op: &DenseMatrix) -> f64 {
    if op.is_empty() {
        return 0.0;
    }
    op.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DenseMatrix {
    let g = DenseMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random normalized complex vector.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn standard_gates_are_unitary() {
        assert!(unitary_deviation(&pauli_x()) < 1e-15);
        assert!(unitary_deviation(&hadamard_power(3)) < 1e-12);
        assert!(unitary_deviation(&permutation_matrix(&[2, 0, 1])) < 1e-15);
    }

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = seeded(3);
        for d in [1, 2, 5, 8] {
            assert!(unitary_deviation(&random_unitary(d, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn operator_norm_of_scaled_identity() {
        let m = identity(4) * c(2.5);
        assert!((operator_norm(&m) - 2.5).abs() < 1e-12);
    }
}
