use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::compile::HamiltonianBundle;
use crate::error::{Error, Result};
use crate::qsim::{extremal_eigen, EigenOptions, Extremal, HamiltonianTerm, SparseHamiltonian, Statevector, C64};

/// Tolerance for positive semidefiniteness and for a zero ground energy.
pub const FRUSTRATION_TOL: f64 = 1e-9;

pub fn sparsity(h: &SparseHamiltonian) -> usize {
    h.sparsity()
}

pub fn ground_energy(h: &SparseHamiltonian) -> Result<f64> {
    Ok(extremal_eigen(h, Extremal::Min, &EigenOptions::default())?.value)
}

/// Every term is PSD and `λ₀(H) ≤ 1e-9`.
pub fn frustration_free(h: &SparseHamiltonian) -> Result<bool> {
    let terms = h.terms().ok_or_else(|| Error::InvalidArgument("Hamiltonian carries no term list".into()))?;
    let opts = EigenOptions::default();
    for t in terms {
        if t.op.nnz() > 0 && extremal_eigen(&t.op, Extremal::Min, &opts)?.value < -FRUSTRATION_TOL {
            return Ok(false);
        }
    }
    Ok(ground_energy(h)? <= FRUSTRATION_TOL)
}

#[derive(Clone, Debug, Serialize)]
pub struct TermOutcome {
    pub term: usize,
    pub label: String,
    pub reject_probability: f64,
    pub accept: bool,
    /// Oracle uses consumed by the measurement.
    pub queries: u64,
}

fn check_state(bundle: &HamiltonianBundle, state: &Statevector) -> Result<()> {
    if state.len() != bundle.dim() {
        return Err(Error::DimensionMismatch(format!("state of length {} for H of dimension {}", state.len(), bundle.dim())));
    }
    Ok(())
}

/// Rejection probability of term `k`, measured the physical way: diagonal
/// terms in the computational basis, `H_t` through `U_t′` followed by an
/// `X`-basis measurement of the `{t−1, t}` clock slots.
pub fn term_reject_probability(bundle: &HamiltonianBundle, state: &Statevector, k: usize) -> Result<f64> {
    check_state(bundle, state)?;
    let terms = bundle.terms();
    let term = terms.get(k).ok_or_else(|| Error::InvalidArgument(format!("term {k} of {}", terms.len())))?;
    let amps = state.amplitudes();
    let cd = bundle.clock_dim();
    if let Some(t) = term.label.strip_prefix("prop").and_then(|s| s.parse::<usize>().ok()) {
        let c = &bundle.circuit;
        let slice = |s: usize| -> Vec<C64> { (0..c.data_dim()).map(|x| amps[x * cd + s]).collect() };
        let before = c.apply_step(t, &slice(t - 1));
        let after = slice(t);
        return Ok(before.iter().zip(&after).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / 2.0);
    }
    Ok((0..term.op.dim()).map(|i| term.op.entry(i, i).to_f64() * amps[i].norm_sqr()).sum())
}

/// One term test: a uniformly random term, measured, accepting on the
/// kernel outcome.
pub fn term_test<R: Rng + ?Sized>(state: &Statevector, bundle: &HamiltonianBundle, rng: &mut R) -> Result<TermOutcome> {
    let k = rng.random_range(0..bundle.term_count());
    let p = term_reject_probability(bundle, state, k)?.clamp(0.0, 1.0);
    let label = bundle.terms()[k].label.clone();
    let queries = match label.strip_prefix("prop").and_then(|s| s.parse::<usize>().ok()) {
        Some(t) if bundle.circuit.gates()[t - 1].is_oracle() => 1,
        _ => 0,
    };
    let accept = !(p > 0.0 && rng.random::<f64>() < p);
    Ok(TermOutcome { term: k, label, reject_probability: p, accept, queries })
}

/// Exact single-shot acceptance of [`term_test`], from the physical route.
pub fn term_test_acceptance(state: &Statevector, bundle: &HamiltonianBundle) -> Result<f64> {
    let m = bundle.term_count();
    let mut rej = 0.0;
    for k in 0..m {
        rej += term_reject_probability(bundle, state, k)?;
    }
    Ok(1.0 - rej / m as f64)
}

/// `1 − ⟨ψ|H̄|ψ⟩` with `H̄` the uniform term average, from the sparse matrix.
pub fn term_average_acceptance(state: &Statevector, bundle: &HamiltonianBundle) -> Result<f64> {
    Ok(1.0 - bundle.energy(state)? / bundle.term_count() as f64)
}

/// `c` with `T = c P` for a projector `P`; errors if `T` is not of that form.
pub fn projector_scale(term: &HamiltonianTerm) -> Result<f64> {
    let op = &term.op;
    let Some(i) = (0..op.dim()).find(|&i| !op.row(i).is_empty()) else {
        return Ok(1.0);
    };
    let diag = op.entry(i, i).to_f64();
    let sq: f64 = op.row(i).iter().map(|(_, v)| v.to_f64().powi(2)).sum();
    if diag <= 0.0 {
        return Err(Error::InvalidArgument(format!("term `{}` is not a scaled projector", term.label)));
    }
    let c = sq / diag;
    let mut worst: f64 = 0.0;
    for r in 0..op.dim() {
        let mut row: BTreeMap<usize, f64> = BTreeMap::new();
        for &(k, a) in op.row(r) {
            for &(j, b) in op.row(k) {
                *row.entry(j).or_default() += a.to_f64() * b.to_f64();
            }
        }
        for &(j, v) in op.row(r) {
            *row.entry(j).or_default() -= c * v.to_f64();
        }
        worst = row.values().fold(worst, |w, v| w.max(v.abs()));
    }
    if worst > 1e-9 {
        return Err(Error::InvalidArgument(format!("term `{}` is not a scaled projector (defect {worst:.3e})", term.label)));
    }
    Ok(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelEstimate {
    pub trials: u64,
    pub rejections: u64,
    pub frequency: f64,
    /// Exact single-shot rejection probability `Σ_k ⟨T_k⟩ / (c_k m)`.
    pub exact: f64,
    /// `⟨H⟩`.
    pub energy: f64,
    /// `α = β` when every term shares one scale, else the range `[α, β]`.
    pub alpha: f64,
    pub beta: f64,
}

impl KernelEstimate {
    pub fn sigma(&self) -> f64 {
        (self.exact * (1.0 - self.exact) / self.trials.max(1) as f64).sqrt()
    }
}

/// Kernel tester: uniform term choice, projector measurement, reject on the
/// non-kernel outcome, repeated `trials` times.
pub fn kernel_test<R: Rng + ?Sized>(h: &SparseHamiltonian, state: &Statevector, trials: u64, rng: &mut R) -> Result<KernelEstimate> {
    let terms = h.terms().ok_or_else(|| Error::InvalidArgument("Hamiltonian carries no term list".into()))?;
    if terms.is_empty() {
        return Err(Error::InvalidArgument("empty term list".into()));
    }
    if state.len() != h.dim() {
        return Err(Error::DimensionMismatch(format!("state of length {} for H of dimension {}", state.len(), h.dim())));
    }
    let m = terms.len() as f64;
    let amps = state.amplitudes();
    let mut probs = Vec::with_capacity(terms.len());
    let (mut alpha, mut beta) = (f64::INFINITY, 0.0f64);
    for t in terms {
        let c = projector_scale(t)?;
        alpha = alpha.min(1.0 / (c * m));
        beta = beta.max(1.0 / (c * m));
        probs.push((t.op.expectation(amps) / c).clamp(0.0, 1.0));
    }
    let mut rejections = 0;
    for _ in 0..trials {
        let k = rng.random_range(0..probs.len());
        if probs[k] > 0.0 && rng.random::<f64>() < probs[k] {
            rejections += 1;
        }
    }
    Ok(KernelEstimate {
        trials,
        rejections,
        frequency: rejections as f64 / trials.max(1) as f64,
        exact: probs.iter().sum::<f64>() / m,
        energy: h.expectation(amps),
        alpha,
        beta,
    })
}
