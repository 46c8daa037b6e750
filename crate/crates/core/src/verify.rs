//! The perfect-completeness verifier and its analysis.

use std::cell::Cell;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcp::{is_even, PointerChasingInstance, WITNESS_REGISTER};
use crate::qsim::dense::hadamard_power;
use crate::qsim::eigen::{extremal_eigen, EigenOptions, Extremal};
use crate::qsim::{DenseMatrix, Permutation, Statevector, C64, DEFAULT_DENSE_CUTOFF, NORM_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifierReport {
    pub p_a: f64,
    pub p_b: f64,
    pub accept: f64,
    pub s: f64,
}

const PROB_SLACK: f64 = 1e-12;

/// Exact acceptance of the two-subroutine verifier on `witness`.
///
/// Subroutine (a) is simulated: `O_π`, then `H^{⊗n}` on the low `n` bits,
/// then projection on the all-zeros outcome. Subroutine (b) is the classical
/// post-measurement check, summed over outcomes.
pub fn qma1_accept(instance: &PointerChasingInstance, witness: &Statevector) -> Result<VerifierReport> {
    let bk = instance.buckets();
    check_witness(witness, bk.m)?;
    let reg = witness.registers()[0].name.clone();
    let mut a = witness.clone();
    a.apply_inplace_oracle(instance.perm(), &reg)?;
    let low: Vec<usize> = (0..bk.n as usize).rev().collect();
    a.apply_on_bits_unchecked(&hadamard_power(bk.n as usize), &reg, &low)?;
    let p_a = a.amplitudes()[0].norm_sqr();

    let p_b = witness
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|&(k, _)| is_even(k + 1) && instance.perm().apply(k + 1) <= bk.big_n)
        .map(|(_, z)| z.norm_sqr())
        .sum();

    let report = VerifierReport {
        p_a: clamp_prob(p_a)?,
        p_b: clamp_prob(p_b)?,
        accept: 0.0,
        s: instance.s(),
    };
    Ok(VerifierReport {
        accept: (report.p_a + report.p_b) / 2.0,
        ..report
    })
}

/// Closed forms `p_a = |Σ_{S_b} α|²/N` and `p_b = Σ_{S_b^even} |α|²`.
pub fn closed_form_probabilities(instance: &PointerChasingInstance, witness: &Statevector) -> Result<(f64, f64)> {
    let bk = instance.buckets();
    check_witness(witness, bk.m)?;
    let amps = witness.amplitudes();
    let sum: C64 = instance.last_level().iter().map(|&o| amps[o - 1]).sum();
    let p_a = sum.norm_sqr() / bk.big_n as f64;
    let p_b = instance
        .last_level()
        .iter()
        .filter(|&&o| is_even(o))
        .map(|&o| amps[o - 1].norm_sqr())
        .sum();
    Ok((p_a, p_b))
}

fn check_witness(witness: &Statevector, m: usize) -> Result<()> {
    if witness.registers().len() != 1 || witness.registers()[0].dim != m {
        return Err(Error::DimensionMismatch(format!(
            "witness must be a single register of dimension M = {m}"
        )));
    }
    let norm_sqr = witness.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

fn clamp_prob(p: f64) -> Result<f64> {
    if !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `λ_max` of `A = ½(O_π†|[N]⟩⟨[N]|O_π + Π_b)` and a maximizing witness.
pub fn optimal_quantum_witness(instance: &PointerChasingInstance) -> Result<(f64, Statevector)> {
    optimal_quantum_witness_with_cutoff(instance, DEFAULT_DENSE_CUTOFF)
}

pub fn optimal_quantum_witness_with_cutoff(
    instance: &PointerChasingInstance,
    cutoff: usize,
) -> Result<(f64, Statevector)> {
    let a = acceptance_operator(instance, cutoff)?;
    let pair = extremal_eigen(&a, Extremal::Max, &EigenOptions { dense_cutoff: cutoff, ..Default::default() })?;
    let m = instance.buckets().m;
    let state = Statevector::normalized(&[(WITNESS_REGISTER, m)], pair.vector)?;
    Ok((pair.value, state))
}

/// Dense acceptance operator on the `M`-dimensional witness space.
pub fn acceptance_operator(instance: &PointerChasingInstance, cutoff: usize) -> Result<DenseMatrix> {
    let bk = instance.buckets();
    let m = bk.m;
    if m > cutoff {
        return Err(Error::CutoffExceeded { dim: m, cutoff });
    }
    let pi = instance.perm();
    // v = O_π†|[N]⟩, so v[x] = ⟨[N]|π(x)⟩
    let amp = 1.0 / (bk.big_n as f64).sqrt();
    let v: Vec<f64> = (1..=m)
        .map(|x| if pi.apply(x) <= bk.big_n { amp } else { 0.0 })
        .collect();
    let mut a = DenseMatrix::zeros(m, m);
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        for (j, &vj) in v.iter().enumerate() {
            a[(i, j)] = C64::new(0.5 * vi * vj, 0.0);
        }
    }
    for x in 1..=m {
        if is_even(x) && pi.apply(x) <= bk.big_n {
            a[(x - 1, x - 1)] += C64::new(0.5, 0.0);
        }
    }
    Ok(a)
}

/// `(1 + √s) / 2`.
pub fn soundness_envelope(s: f64) -> f64 {
    (1.0 + s.sqrt()) / 2.0
}

/// Classical evaluation access to `π` that counts calls.
#[derive(Debug)]
pub struct CountingOracle<'a> {
    perm: &'a Permutation,
    calls: Cell<usize>,
}

impl<'a> CountingOracle<'a> {
    pub fn new(perm: &'a Permutation) -> Self {
        CountingOracle { perm, calls: Cell::new(0) }
    }

    pub fn query(&self, x: usize) -> usize {
        self.calls.set(self.calls.get() + 1);
        self.perm.apply(x)
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CorpRun {
    pub accept: bool,
    pub start: usize,
    pub end: usize,
    pub queries: usize,
}

/// Samples `j ∈ [N]`, walks `b − 1` steps of `π` and accepts iff the end
/// point `f_b(j)` is even.
pub fn corp_decider<R: Rng + ?Sized>(instance: &PointerChasingInstance, rng: &mut R) -> CorpRun {
    let bk = instance.buckets();
    let oracle = CountingOracle::new(instance.perm());
    let start = rng.random_range(1..=bk.big_n);
    let mut x = start;
    for _ in 1..bk.b {
        x = oracle.query(x);
    }
    CorpRun {
        accept: is_even(x),
        start,
        end: x,
        queries: oracle.calls(),
    }
}

/// A verifier family indexed by `w`-bit classical witnesses.
pub trait WitnessFamily {
    /// Exact acceptance probability on `witness ∈ [0, 2^w)`.
    fn accept_probability(&self, instance: &PointerChasingInstance, witness: u64) -> Result<f64>;

    /// Rough simulation cost of one evaluation, in amplitude updates.
    fn cost(&self, instance: &PointerChasingInstance) -> u64;
}

impl<F> WitnessFamily for F
where
    F: Fn(&PointerChasingInstance, u64) -> Result<f64>,
{
    fn accept_probability(&self, instance: &PointerChasingInstance, witness: u64) -> Result<f64> {
        self(instance, witness)
    }

    fn cost(&self, _: &PointerChasingInstance) -> u64 {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BruteForceResult {
    pub witness: u64,
    pub probability: f64,
    pub evaluated: u64,
}

/// Exhaustive search over all `2^w` witnesses; ties go to the smallest.
pub fn qcma_bruteforce<V: WitnessFamily + ?Sized>(
    instance: &PointerChasingInstance,
    verifier: &V,
    w: u32,
    budget: u64,
) -> Result<BruteForceResult> {
    if w >= 40 {
        return Err(Error::BudgetExceeded(format!("2^{w} witnesses")));
    }
    let count = 1u64 << w;
    let total = count.saturating_mul(verifier.cost(instance).max(1));
    if total > budget {
        return Err(Error::BudgetExceeded(format!(
            "{count} witnesses at cost {} exceed budget {budget}",
            verifier.cost(instance)
        )));
    }
    let mut best = BruteForceResult { witness: 0, probability: f64::NEG_INFINITY, evaluated: 0 };
    for x in 0..count {
        let p = verifier.accept_probability(instance, x)?;
        best.evaluated += 1;
        if p > best.probability {
            best.witness = x;
            best.probability = p;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcp::{bucket_layout, sample_no, sample_with_even_count, sample_yes, Label};
    use crate::qsim::dense::random_vector;
    use crate::rng::seeded;

    #[test]
    fn canonical_witness_is_accepted_with_certainty() {
        let b = bucket_layout(2, 3, 3).unwrap();
        let mut rng = seeded(1);
        for _ in 0..10 {
            let inst = sample_yes(&b, &mut rng).unwrap();
            let r = qma1_accept(&inst, &inst.witness_state()).unwrap();
            assert!((r.p_a - 1.0).abs() < 1e-12 && (r.p_b - 1.0).abs() < 1e-12);
            assert!((r.accept - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn junk_witness_is_rejected() {
        let b = bucket_layout(1, 4, 3).unwrap();
        assert_eq!(b.junk_size(), 2);
        let inst = sample_yes(&b, &mut seeded(2)).unwrap();
        let w = Statevector::basis(&[("w", 16)], &[15]).unwrap();
        let r = qma1_accept(&inst, &w).unwrap();
        assert_eq!((r.p_a, r.p_b), (0.0, 0.0));
    }

    #[test]
    fn no_instance_uniform_witness() {
        let b = bucket_layout(2, 3, 3).unwrap();
        let inst = sample_no(&b, &mut seeded(3)).unwrap();
        let w = inst.witness_state();
        let r = qma1_accept(&inst, &w).unwrap();
        let (pa, pb) = closed_form_probabilities(&inst, &w).unwrap();
        assert!((r.p_a - pa).abs() < 1e-10 && (r.p_b - pb).abs() < 1e-10);
        assert!((pa - 1.0).abs() < 1e-12 && (pb - 0.5).abs() < 1e-12);
    }

    #[test]
    fn simulation_matches_closed_forms_on_random_witnesses() {
        let b = bucket_layout(2, 3, 2).unwrap();
        let mut rng = seeded(4);
        let inst = sample_no(&b, &mut rng).unwrap();
        for _ in 0..50 {
            let w = Statevector::from_amplitudes(&[("w", b.m)], random_vector(b.m, &mut rng)).unwrap();
            let r = qma1_accept(&inst, &w).unwrap();
            let (pa, pb) = closed_form_probabilities(&inst, &w).unwrap();
            assert!((r.p_a - pa).abs() < 1e-10 && (r.p_b - pb).abs() < 1e-10);
        }
    }

    #[test]
    fn unnormalized_witness_rejected() {
        let b = bucket_layout(1, 4, 2).unwrap();
        let inst = sample_yes(&b, &mut seeded(0)).unwrap();
        let w = Statevector::basis(&[("w", 8)], &[0]).unwrap();
        assert!(qma1_accept(&inst, &w).is_err());
    }

    #[test]
    fn optimal_witness_values() {
        let b = bucket_layout(2, 3, 3).unwrap();
        let mut rng = seeded(5);
        let yes = sample_yes(&b, &mut rng).unwrap();
        let (v, state) = optimal_quantum_witness(&yes).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        for (k, a) in state.amplitudes().iter().enumerate() {
            assert_eq!(a.norm() > 1e-9, yes.last_level().contains(&(k + 1)));
        }
        let no = sample_no(&b, &mut rng).unwrap();
        let (v, state) = optimal_quantum_witness(&no).unwrap();
        assert!((v - soundness_envelope(0.5)).abs() < 1e-9);
        assert!((qma1_accept(&no, &state).unwrap().accept - v).abs() < 1e-9);
        let odd = sample_with_even_count(&b, 0, &mut rng).unwrap();
        let (v, _) = optimal_quantum_witness(&odd).unwrap();
        assert!(v <= 0.5 + 1e-9);
    }

    #[test]
    fn envelope_values() {
        assert_eq!(soundness_envelope(0.0), 0.5);
        assert_eq!(soundness_envelope(1.0), 1.0);
        assert!((soundness_envelope(0.5) - 0.853_553_390_593).abs() < 1e-12);
    }

    #[test]
    fn corp_is_one_sided_and_counts_queries() {
        let b = bucket_layout(2, 3, 3).unwrap();
        let mut rng = seeded(6);
        let yes = sample_yes(&b, &mut rng).unwrap();
        for _ in 0..200 {
            let run = corp_decider(&yes, &mut rng);
            assert!(run.accept);
            assert_eq!(run.queries, 2);
            assert_eq!(run.end, yes.f(3, run.start));
        }
        let no = sample_no(&b, &mut rng).unwrap();
        let acc = (0..2000).filter(|_| corp_decider(&no, &mut rng).accept).count();
        assert!(acc as f64 / 2000.0 <= 0.55);
    }

    #[test]
    fn bruteforce_cases() {
        let b = bucket_layout(1, 4, 2).unwrap();
        let inst = sample_yes(&b, &mut seeded(8)).unwrap();
        assert_eq!(inst.label(), Label::Yes);
        let constant = |_: &PointerChasingInstance, _: u64| Ok(0.25);
        let r = qcma_bruteforce(&inst, &constant, 3, 100).unwrap();
        assert_eq!((r.witness, r.probability, r.evaluated), (0, 0.25, 8));
        let r0 = qcma_bruteforce(&inst, &constant, 0, 100).unwrap();
        assert_eq!(r0.evaluated, 1);
        let pointer = |i: &PointerChasingInstance, x: u64| Ok(if x as usize + 1 == i.f(2, 1) { 1.0 } else { 0.0 });
        let r = qcma_bruteforce(&inst, &pointer, 4, 100).unwrap();
        assert_eq!((r.witness as usize + 1, r.probability), (inst.f(2, 1), 1.0));
        assert!(matches!(qcma_bruteforce(&inst, &constant, 8, 100), Err(Error::BudgetExceeded(_))));
    }
}
