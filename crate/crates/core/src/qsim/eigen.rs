//! Extremal eigenpairs: dense diagonalization below the cutoff, restarted
//! Lanczos above it.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use super::dense::DenseMatrix;
use super::sparse::SparseHamiltonian;
use super::{C64, DEFAULT_DENSE_CUTOFF};
use crate::error::{Error, Result};
use crate::rng::seeded;

pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[C64]) -> Vec<C64>;
    fn to_dense(&self) -> DenseMatrix;
}

impl HermitianOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (self * x).as_slice().to_vec()
    }

    fn to_dense(&self) -> DenseMatrix {
        self.clone()
    }
}

impl HermitianOperator for SparseHamiltonian {
    fn dim(&self) -> usize {
        SparseHamiltonian::dim(self)
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        SparseHamiltonian::apply(self, v)
    }

    fn to_dense(&self) -> DenseMatrix {
        SparseHamiltonian::to_dense(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    pub dense_cutoff: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            dense_cutoff: DEFAULT_DENSE_CUTOFF,
            krylov_dim: 64,
            max_restarts: 400,
            tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

pub fn extremal_eigen<H: HermitianOperator + ?Sized>(
    op: &H,
    which: Extremal,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty operator".into()));
    }
    if n <= opts.dense_cutoff {
        dense_extremal(op, which, opts)
    } else {
        lanczos_extremal(op, which, opts)
    }
}

/// All eigenvalues in ascending order (dense path only).
pub fn spectrum<H: HermitianOperator + ?Sized>(op: &H, cutoff: usize) -> Result<Vec<f64>> {
    if op.dim() > cutoff {
        return Err(Error::CutoffExceeded { dim: op.dim(), cutoff });
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn dense_extremal<H: HermitianOperator + ?Sized>(op: &H, which: Extremal, opts: &EigenOptions) -> Result<EigenPair> {
    let eig = SymmetricEigen::new(op.to_dense());
    let values = eig.eigenvalues.as_slice();
    let pick = (0..values.len())
        .reduce(|a, b| {
            let better = match which {
                Extremal::Min => values[b] < values[a],
                Extremal::Max => values[b] > values[a],
            };
            if better { b } else { a }
        })
        .unwrap();
    let mut vector: Vec<C64> = eig.eigenvectors.column(pick).iter().copied().collect();
    normalize(&mut vector);
    fix_phase(&mut vector);
    let value = values[pick];
    let residual = residual(op, value, &vector);
    if residual > opts.tolerance {
        return Err(Error::NoConvergence { iterations: 0, residual });
    }
    Ok(EigenPair { value, vector, residual })
}

fn lanczos_extremal<H: HermitianOperator + ?Sized>(op: &H, which: Extremal, opts: &EigenOptions) -> Result<EigenPair> {
    let n = op.dim();
    let k = opts.krylov_dim.clamp(2, n);
    let mut rng = seeded(0x1a2c_7e55);
    let mut start: Vec<C64> = (0..n)
        .map(|_| C64::new(1.0 + 0.5 * rng.random::<f64>(), 0.0))
        .collect();
    normalize(&mut start);
    let mut last_residual = f64::INFINITY;
    for _ in 0..opts.max_restarts {
        let (value, vector) = lanczos_pass(op, &start, k, which);
        let r = residual(op, value, &vector);
        if r <= opts.tolerance {
            let mut vector = vector;
            fix_phase(&mut vector);
            return Ok(EigenPair { value, vector, residual: r });
        }
        last_residual = r;
        start = vector;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_restarts,
        residual: last_residual,
    })
}

/// One Lanczos pass with full reorthogonalization; returns the extremal Ritz pair.
fn lanczos_pass<H: HermitianOperator + ?Sized>(op: &H, start: &[C64], k: usize, which: Extremal) -> (f64, Vec<C64>) {
    let mut basis: Vec<Vec<C64>> = vec![start.to_vec()];
    let mut alpha = Vec::with_capacity(k);
    let mut beta: Vec<f64> = Vec::with_capacity(k);
    for j in 0..k {
        let mut w = op.apply(&basis[j]);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(&mut w, -c, q);
            }
        }
        let b = norm(&w);
        if j + 1 == k || b < 1e-13 {
            break;
        }
        w.iter_mut().for_each(|x| *x /= b);
        beta.push(b);
        basis.push(w);
    }
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let vals = eig.eigenvalues.as_slice();
    let pick = (0..m)
        .reduce(|a, b| match which {
            Extremal::Min if vals[b] < vals[a] => b,
            Extremal::Max if vals[b] > vals[a] => b,
            _ => a,
        })
        .unwrap();
    let y = eig.eigenvectors.column(pick);
    let mut v = vec![C64::new(0.0, 0.0); start.len()];
    for (q, &c) in basis.iter().zip(y.iter()) {
        axpy(&mut v, C64::new(c, 0.0), q);
    }
    normalize(&mut v);
    let value = dot(&v, &op.apply(&v)).re;
    (value, v)
}

pub(crate) fn residual<H: HermitianOperator + ?Sized>(op: &H, value: f64, v: &[C64]) -> f64 {
    op.apply(v)
        .iter()
        .zip(v)
        .map(|(hv, x)| (hv - x * value).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Rotates the global phase so the largest-magnitude entry is real positive.
fn fix_phase(v: &mut [C64]) {
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .unwrap_or(C64::new(1.0, 0.0));
    if big.norm() > 0.0 {
        let p = big.conj() / big.norm();
        v.iter_mut().for_each(|x| *x *= p);
    }
}
