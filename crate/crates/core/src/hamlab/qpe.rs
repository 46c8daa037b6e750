use std::f64::consts::PI;

use rand::Rng;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::adaptive::DEFAULT_STATE_CUTOFF;
use crate::error::{Error, Result};
use crate::qsim::{extremal_eigen, unitary_exponential, EigenOptions, Extremal, SparseHamiltonian, Statevector, C64};

/// `m = ⌈log₂(Λ/(ε/4))⌉ + ⌈log₂(2 + 1/(2p))⌉` with `p = ε/(4Λ)`, at least 1.
pub fn control_qubits(lambda: f64, epsilon: f64) -> u32 {
    let p = epsilon / (4.0 * lambda);
    let a = (lambda / (epsilon / 4.0)).log2().ceil().max(0.0);
    let b = (2.0 + 1.0 / (2.0 * p)).log2().ceil();
    ((a + b) as u32).max(1)
}

/// `K = ⌈8 (Λ/ε)² ln(2/δ)⌉`.
pub fn repetitions(lambda: f64, epsilon: f64, delta: f64) -> u64 {
    (8.0 * (lambda / epsilon).powi(2) * (2.0 / delta).ln()).ceil().max(1.0) as u64
}

/// Phase-estimation outcome distribution for one copy of `|ψ⟩`.
#[derive(Clone, Debug, Serialize)]
pub struct QpeDistribution {
    pub lambda: f64,
    pub control_qubits: u32,
    pub probabilities: Vec<f64>,
    /// Abstract simulation-oracle queries per copy: `Σ_t ⌈‖H‖_max d τ_t⌉`.
    pub queries_per_copy: u64,
}

impl QpeDistribution {
    /// Energy read from outcome `k`: phase `k/2^m` (wrapped to `k/2^m − 1`
    /// when `≥ 3/4`) times `2Λ`, clamped to `[0, Λ]`.
    pub fn energy_of(&self, k: usize) -> f64 {
        let mut phi = k as f64 / self.probabilities.len() as f64;
        if phi >= 0.75 {
            phi -= 1.0;
        }
        (2.0 * self.lambda * phi).clamp(0.0, self.lambda)
    }

    pub fn mean_energy(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(k, p)| p * self.energy_of(k)).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, cdf: &[f64], rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
        cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
    }

    pub fn cdf(&self) -> Vec<f64> {
        self.probabilities
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

fn spectral_radius(h: &SparseHamiltonian) -> Result<f64> {
    let opts = EigenOptions::default();
    let lo = extremal_eigen(h, Extremal::Min, &opts)?.value;
    if lo < -1e-9 {
        return Err(Error::InvalidArgument(format!("H is not positive semidefinite (λ_min = {lo:.3e})")));
    }
    Ok(extremal_eigen(h, Extremal::Max, &opts)?.value.max(0.0))
}

/// Textbook phase estimation of `e^{2πiH/(2Λ)}` on `|ψ⟩`: uniform control
/// register, controlled powers `U^{2^t}`, inverse QFT on the control.
pub fn qpe_distribution(h: &SparseHamiltonian, state: &Statevector, epsilon: f64) -> Result<QpeDistribution> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("accuracy ε = {epsilon} must be positive")));
    }
    let d = h.dim();
    if state.len() != d {
        return Err(Error::DimensionMismatch(format!("state of length {} for H of dimension {d}", state.len())));
    }
    let lambda = spectral_radius(h)?;
    if lambda == 0.0 {
        return Ok(QpeDistribution { lambda, control_qubits: 0, probabilities: vec![1.0], queries_per_copy: 0 });
    }
    let m = control_qubits(lambda, epsilon);
    let size = 1usize << m;
    if size.saturating_mul(d) > DEFAULT_STATE_CUTOFF {
        return Err(Error::CutoffExceeded { dim: size * d, cutoff: DEFAULT_STATE_CUTOFF });
    }
    let sparsity = h.sparsity() as f64;
    let hmax = h.max_abs_entry();
    let mut queries = 0u64;
    // columns[x] holds the data part attached to control value x
    let mut columns: Vec<Vec<C64>> = vec![state.amplitudes().to_vec(); size];
    let mut power = unitary_exponential(h, PI / lambda)?;
    for t in 0..m {
        let tau = PI * (1u64 << t) as f64 / lambda;
        queries += (hmax * sparsity * tau).ceil() as u64;
        for (x, col) in columns.iter_mut().enumerate() {
            if (x >> t) & 1 == 1 {
                let v = nalgebra::DVector::from_column_slice(col);
                *col = (&power * v).as_slice().to_vec();
            }
        }
        if t + 1 < m {
            power = &power * &power;
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let mut probabilities = vec![0.0; size];
    let mut buf = vec![C64::new(0.0, 0.0); size];
    let norm = 1.0 / size as f64;
    for a in 0..d {
        for (x, b) in buf.iter_mut().enumerate() {
            *b = columns[x][a];
        }
        fft.process(&mut buf);
        for (k, b) in buf.iter().enumerate() {
            probabilities[k] += b.norm_sqr() * norm * norm;
        }
    }
    Ok(QpeDistribution { lambda, control_qubits: m, probabilities, queries_per_copy: queries })
}

#[derive(Clone, Debug, Serialize)]
pub struct QpeEstimate {
    pub estimate: f64,
    pub lambda: f64,
    pub control_qubits: u32,
    pub repetitions: u64,
    pub queries: u64,
}

/// Plain average of `K` phase-estimation energies; with probability at
/// least `1 − δ` within `ε` of `⟨ψ|H|ψ⟩`.
pub fn qpe_energy<R: Rng + ?Sized>(h: &SparseHamiltonian, state: &Statevector, epsilon: f64, delta: f64, rng: &mut R) -> Result<QpeEstimate> {
    let dist = qpe_distribution(h, state, epsilon)?;
    estimate_from(&dist, epsilon, delta, rng)
}

/// The averaging stage alone, reusing a precomputed distribution.
pub fn estimate_from<R: Rng + ?Sized>(dist: &QpeDistribution, epsilon: f64, delta: f64, rng: &mut R) -> Result<QpeEstimate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("failure probability δ = {delta} outside (0, 1)")));
    }
    if dist.lambda == 0.0 {
        return Ok(QpeEstimate { estimate: 0.0, lambda: 0.0, control_qubits: 0, repetitions: 0, queries: 0 });
    }
    let k = repetitions(dist.lambda, epsilon, delta);
    let cdf = dist.cdf();
    let sum: f64 = (0..k).map(|_| dist.energy_of(dist.sample(&cdf, rng))).sum();
    Ok(QpeEstimate {
        estimate: sum / k as f64,
        lambda: dist.lambda,
        control_qubits: dist.control_qubits,
        repetitions: k,
        queries: dist.queries_per_copy.saturating_mul(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::Dyadic;
    use crate::rng::seeded;

    #[test]
    fn parameter_formulas() {
        // Λ = 4, ε = 0.1: ⌈log₂ 160⌉ = 8, ⌈log₂ 82⌉ = 7
        assert_eq!(control_qubits(4.0, 0.1), 15);
        assert_eq!(repetitions(1.0, 1.0, 0.5), (8.0 * 4f64.ln()).ceil() as u64);
    }

    #[test]
    fn zero_hamiltonian() {
        let h = SparseHamiltonian::zero(2);
        let s = Statevector::basis(&[("d", 2)], &[1]).unwrap();
        let e = qpe_energy(&h, &s, 0.1, 0.1, &mut seeded(1)).unwrap();
        assert_eq!(e.estimate, 0.0);
    }

    #[test]
    fn exact_eigenphase() {
        let h = SparseHamiltonian::diagonal(&[Dyadic::ZERO, Dyadic::integer(4)]).unwrap();
        let s = Statevector::basis(&[("d", 2)], &[1]).unwrap();
        let dist = qpe_distribution(&h, &s, 0.5).unwrap();
        let k = dist.probabilities.len() / 2;
        assert!((dist.probabilities[k] - 1.0).abs() < 1e-9);
        assert!((dist.energy_of(k) - 4.0).abs() < 1e-12);
        let s0 = Statevector::basis(&[("d", 2)], &[0]).unwrap();
        let e = qpe_energy(&h, &s0, 0.5, 0.1, &mut seeded(2)).unwrap();
        assert!(e.estimate.abs() < 1e-9);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut b = crate::qsim::SparseHamiltonianBuilder::new(2);
        b.add(0, 0, Dyadic::ONE).unwrap().add_symmetric(0, 1, Dyadic::HALF).unwrap().add(1, 1, Dyadic::ONE).unwrap();
        let h = b.build().unwrap();
        let s = Statevector::basis(&[("d", 2)], &[0]).unwrap();
        let dist = qpe_distribution(&h, &s, 0.2).unwrap();
        let total: f64 = dist.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!((dist.mean_energy() - 1.0).abs() < 0.15);
        assert!(dist.queries_per_copy > 0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let h = SparseHamiltonian::diagonal(&[Dyadic::ONE]).unwrap();
        let s = Statevector::basis(&[("d", 1)], &[0]).unwrap();
        assert!(qpe_energy(&h, &s, 0.0, 0.1, &mut seeded(0)).is_err());
        let neg = SparseHamiltonian::diagonal(&[Dyadic::integer(-1)]).unwrap();
        assert!(qpe_energy(&neg, &s, 0.1, 0.1, &mut seeded(0)).is_err());
    }
}
