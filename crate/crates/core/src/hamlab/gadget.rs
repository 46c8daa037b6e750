use std::cell::Cell;

use crate::error::{Error, Result};
use crate::qsim::dense::{c, identity, kron, operator_norm, permutation_matrix, unitary_deviation};
use crate::qsim::{DenseMatrix, Permutation, Statevector, C64, UNITARY_TOL};

/// The unitary `U` to be controlled.
#[derive(Clone, Debug)]
pub enum OracleUnitary {
    Dense(DenseMatrix),
    Permutation(Permutation),
}

impl OracleUnitary {
    pub fn dim(&self) -> usize {
        match self {
            OracleUnitary::Dense(m) => m.nrows(),
            OracleUnitary::Permutation(p) => p.size(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            OracleUnitary::Dense(m) => m.clone(),
            OracleUnitary::Permutation(p) => {
                let map: Vec<usize> = p.forward().iter().map(|&y| y - 1).collect();
                permutation_matrix(&map)
            }
        }
    }

    fn apply(&self, state: &mut Statevector, register: &str) -> Result<()> {
        match self {
            OracleUnitary::Dense(m) => state.apply_dense(m, &[register]),
            OracleUnitary::Permutation(p) => state.apply_inplace_oracle(p, register),
        }
    }
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U`.
pub fn direct_controlled(u: &DenseMatrix) -> DenseMatrix {
    let d = u.nrows();
    let mut m = DenseMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(&identity(d));
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

/// Uniform superposition, the fixed point of every permutation.
pub fn uniform_mu(dim: usize) -> Vec<C64> {
    vec![c(1.0 / (dim as f64).sqrt()); dim]
}

/// `CSWAP · U_anc · CSWAP` with an ancilla held in a fixed point `|μ⟩` of `U`.
#[derive(Debug)]
pub struct ControlledOracle {
    unitary: OracleUnitary,
    mu: Vec<C64>,
    uses: Cell<u64>,
}

impl ControlledOracle {
    pub fn new(unitary: OracleUnitary, mu: Vec<C64>) -> Result<Self> {
        let d = unitary.dim();
        if mu.len() != d {
            return Err(Error::DimensionMismatch(format!("ancilla of length {} for U of dimension {d}", mu.len())));
        }
        let norm: f64 = mu.iter().map(C64::norm_sqr).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm_sqr: norm });
        }
        if let OracleUnitary::Dense(m) = &unitary {
            let deviation = unitary_deviation(m);
            if deviation > UNITARY_TOL {
                return Err(Error::NotUnitary { deviation });
            }
        }
        let v = nalgebra::DVector::from_column_slice(&mu);
        let deviation = (unitary.to_dense() * &v - &v).norm();
        if deviation > 1e-10 {
            return Err(Error::NotFixedPoint { deviation });
        }
        Ok(ControlledOracle { unitary, mu, uses: Cell::new(0) })
    }

    pub fn for_permutation(perm: Permutation) -> Result<Self> {
        let mu = uniform_mu(perm.size());
        ControlledOracle::new(OracleUnitary::Permutation(perm), mu)
    }

    pub fn unitary(&self) -> &OracleUnitary {
        &self.unitary
    }

    pub fn mu(&self) -> &[C64] {
        &self.mu
    }

    /// Applications of `U` so far.
    pub fn uses(&self) -> u64 {
        self.uses.get()
    }

    /// Weight of the state on `… ⊗ |μ⟩_ancilla`.
    fn ancilla_overlap(&self, state: &Statevector, ancilla: &str) -> Result<f64> {
        let regs = state.registers();
        let pos = regs.iter().position(|r| r.name == ancilla).ok_or_else(|| Error::UnknownRegister(ancilla.into()))?;
        let stride: usize = regs[pos + 1..].iter().map(|r| r.dim).product();
        let d = regs[pos].dim;
        let mut acc = vec![C64::new(0.0, 0.0); state.len()];
        for (flat, amp) in state.amplitudes().iter().enumerate() {
            let a = (flat / stride) % d;
            acc[flat - a * stride] += self.mu[a].conj() * amp;
        }
        Ok(acc.iter().map(C64::norm_sqr).sum())
    }

    /// Applies the gadget to `state`, whose `ancilla` register must hold `|μ⟩`.
    pub fn apply(&self, state: &mut Statevector, control: &str, target: &str, ancilla: &str) -> Result<()> {
        if state.dim_of(control)? != 2 {
            return Err(Error::DimensionMismatch(format!("control `{control}` must be a qubit")));
        }
        let d = self.mu.len();
        for r in [target, ancilla] {
            if state.dim_of(r)? != d {
                return Err(Error::DimensionMismatch(format!("register `{r}` does not match U of dimension {d}")));
            }
        }
        let overlap = self.ancilla_overlap(state, ancilla)?;
        if (overlap - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("ancilla `{ancilla}` is not in |μ⟩ (overlap {overlap:.3e})")));
        }
        let cswap = |s: &mut Statevector| {
            s.apply_basis_map(&[control, target, ancilla], |k| {
                let (cb, t, a) = (k / (d * d), (k / d) % d, k % d);
                if cb == 1 {
                    d * d + a * d + t
                } else {
                    k
                }
            })
        };
        cswap(state)?;
        self.unitary.apply(state, ancilla)?;
        self.uses.set(self.uses.get() + 1);
        cswap(state)
    }

    /// Full operator of the gadget on `control ⊗ target ⊗ ancilla`.
    pub fn operator(&self) -> DenseMatrix {
        let d = self.mu.len();
        let mut map = vec![0; 2 * d * d];
        for (k, slot) in map.iter_mut().enumerate() {
            let (cb, t, a) = (k / (d * d), (k / d) % d, k % d);
            *slot = if cb == 1 { cb * d * d + a * d + t } else { k };
        }
        let sw = permutation_matrix(&map);
        let ua = kron(&identity(2 * d), &self.unitary.to_dense());
        &sw * ua * &sw
    }
}

/// Gadget audit against the directly built controlled unitary.
#[derive(Clone, Copy, Debug)]
pub struct GadgetReport {
    /// `‖(I ⊗ ⟨μ|) V (I ⊗ |μ⟩) − U′‖`.
    pub operator_defect: f64,
    /// `‖(I ⊗ (I − |μ⟩⟨μ|)) V (I ⊗ |μ⟩)‖`.
    pub ancilla_leak: f64,
}

pub fn gadget_report(gadget: &ControlledOracle) -> GadgetReport {
    let d = gadget.mu.len();
    let v = gadget.operator();
    let mu = DenseMatrix::from_column_slice(d, 1, &gadget.mu);
    let embed = kron(&identity(2 * d), &mu);
    let vm = &v * &embed;
    let eff = embed.adjoint() * &vm;
    let direct = direct_controlled(&gadget.unitary.to_dense());
    let proj = kron(&identity(2 * d), &(&mu * mu.adjoint()));
    GadgetReport {
        operator_defect: operator_norm(&(eff - direct)),
        ancilla_leak: operator_norm(&(&vm - proj * &vm)),
    }
}

/// `U′ = U ⊗ |t−1⟩⟨t−1| + I ⊗ |t⟩⟨t|` on `data ⊗ slot`, slot 0 standing for
/// clock value `t − 1` and slot 1 for `t`.
pub fn propagation_basis_change(u: &DenseMatrix) -> DenseMatrix {
    let d = u.nrows();
    let p0 = DenseMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let p1 = DenseMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
    kron(u, &p0) + kron(&identity(d), &p1)
}

/// `H_t` on `data ⊗ slot`.
pub fn two_slot_term(u: &DenseMatrix) -> DenseMatrix {
    let d = u.nrows();
    let up = DenseMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(0.0)]);
    let down = up.adjoint();
    (identity(2 * d) - kron(u, &up) - kron(&u.adjoint(), &down)) * c(0.5)
}

/// `‖2 U′ H_t U′† − I ⊗ (|t−1⟩ − |t⟩)(⟨t−1| − ⟨t|)‖`.
pub fn basis_change_defect(u: &DenseMatrix) -> f64 {
    let d = u.nrows();
    let up = propagation_basis_change(u);
    let lhs = &up * two_slot_term(u) * up.adjoint() * c(2.0);
    let minus = DenseMatrix::from_row_slice(2, 2, &[c(1.0), c(-1.0), c(-1.0), c(1.0)]);
    operator_norm(&(lhs - kron(&identity(d), &minus)))
}

/// `U′` through the gadget: the control fires on slot 0, so the slot is
/// flipped around one controlled use.
pub fn apply_basis_change(gadget: &ControlledOracle, state: &mut Statevector, data: &str, slot: &str, ancilla: &str) -> Result<()> {
    let x = crate::qsim::dense::pauli_x();
    state.apply_dense(&x, &[slot])?;
    gadget.apply(state, slot, data, ancilla)?;
    state.apply_dense(&x, &[slot])
}
