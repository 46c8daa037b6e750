use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{Permutation, Statevector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HybridReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `p_j = ⟨φ|Π_j|φ⟩` per query register.
    pub masses: Vec<f64>,
}

/// Both sides of `‖(O_π^{⊗q} − O_{π′}^{⊗q})|φ⟩‖ ≤ 2√(Σ_j p_j)`.
pub fn hybrid_check(pi: &Permutation, pi2: &Permutation, state: &Statevector, registers: &[&str]) -> Result<HybridReport> {
    if pi.size() != pi2.size() {
        return Err(Error::DimensionMismatch("permutations of different sizes".into()));
    }
    let mut a = state.clone();
    let mut b = state.clone();
    for r in registers {
        a.apply_inplace_oracle(pi, r)?;
        b.apply_inplace_oracle(pi2, r)?;
    }
    let lhs = a.distance(&b)?;
    let bad = pi.disagreement(pi2);
    let masses: Vec<f64> = registers
        .iter()
        .map(|r| {
            let p = state.marginal(r)?;
            Ok(bad.iter().map(|&x| p[x - 1]).sum())
        })
        .collect::<Result<_>>()?;
    let rhs = 2.0 * masses.iter().sum::<f64>().sqrt();
    Ok(HybridReport { lhs, rhs, masses })
}

/// `(eN/(δεB))^{δN}`.
pub fn too_heavy_bound(n: usize, b: usize, epsilon: f64, delta: f64) -> f64 {
    let base = std::f64::consts::E * n as f64 / (delta * epsilon * b as f64);
    base.powf(delta * n as f64)
}

/// `r·b·(4eN/(δεB))^{δN}`.
pub fn bad_transcript_bound(r: usize, b: usize, n: usize, bucket: usize, epsilon: f64, delta: f64) -> f64 {
    let base = 4.0 * std::f64::consts::E * n as f64 / (delta * epsilon * bucket as f64);
    (r * b) as f64 * base.powf(delta * n as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TooHeavyEstimate {
    pub frequency: f64,
    pub heavy_size: usize,
    pub threshold: usize,
    pub trials: usize,
}

impl TooHeavyEstimate {
    /// Binomial standard deviation at success probability `p` (clamped).
    pub fn sigma_at(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Frequency of `|S ∩ H| ≥ ⌈δN⌉` over uniform `N`-subsets `S` of a size-`B`
/// universe, with `H = {x : μ(x) ≥ ε/N}` and `mu.len() = B`.
pub fn too_heavy_empirical<R: Rng + ?Sized>(
    n: usize,
    mu: &[f64],
    epsilon: f64,
    delta: f64,
    trials: usize,
    rng: &mut R,
) -> Result<TooHeavyEstimate> {
    let b = mu.len();
    if n == 0 || n > b {
        return Err(Error::InvalidArgument(format!("need 0 < N = {n} ≤ B = {b}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("zero trials".into()));
    }
    let cut = epsilon / n as f64;
    let heavy: Vec<bool> = mu.iter().map(|&m| m >= cut).collect();
    let threshold = (delta * n as f64 - 1e-12).ceil().max(0.0) as usize;
    let hits = (0..trials)
        .filter(|_| index::sample(rng, b, n).into_iter().filter(|&k| heavy[k]).count() >= threshold)
        .count();
    Ok(TooHeavyEstimate {
        frequency: hits as f64 / trials as f64,
        heavy_size: heavy.iter().filter(|&&h| h).count(),
        threshold,
        trials,
    })
}
