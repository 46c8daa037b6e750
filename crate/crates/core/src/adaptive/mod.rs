//! Bounded-adaptivity query algorithms and the transcript machinery built on
//! top of them.
//!
//! An algorithm is a list `U_0, …, U_R` of gate sequences over the registers
//! `q0 … q{q-1}` (queries, dimension `query_dim`), optionally `y0 …` (XOR
//! answers), `w` (classical witness) and `a` (workspace). Round `r ≥ 1`
//! applies `O^{⊗q}` before `U_r`.

mod bounds;
mod guesser;
mod noinst;
mod transcript;

pub use bounds::{bad_transcript_bound, hybrid_check, too_heavy_bound, too_heavy_empirical, HybridReport, TooHeavyEstimate};
pub use guesser::{guesser, guesser_lower_bound, GuesserRun};
pub use noinst::{build_no_instance, check_slack, fixed_indices, NoTransform};
pub use transcript::{
    canonical_completion, heavy_set, is_good, query_mass, root_function, run_transcripts, BucketSets, HeavyParams,
    Transcript, TranscriptDump, TranscriptRun,
};

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcp::PointerChasingInstance;
use crate::qsim::dense::unitary_deviation;
use crate::qsim::{DenseMatrix, Permutation, Statevector, C64};
use crate::verify::WitnessFamily;

/// Largest statevector the adaptive simulator will allocate.
pub const DEFAULT_STATE_CUTOFF: usize = 1 << 22;

pub const WITNESS: &str = "w";
pub const WORKSPACE: &str = "a";

pub fn query_register(j: usize) -> String {
    format!("q{j}")
}

pub fn answer_register(j: usize) -> String {
    format!("y{j}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleMode {
    InPlace,
    Xor,
}

/// How a query round touches the registers.
#[derive(Clone, Copy, Debug)]
pub enum Oracle<'a> {
    InPlace(&'a Permutation),
    /// Writes `enc(π(x))` into the answer register.
    Xor(&'a Permutation),
    /// `|k, y⟩ ↦ |k, y ⊕ 1[k ∈ S]⟩` on basis index `k`.
    Membership(&'a HashSet<usize>),
}

impl<'a> Oracle<'a> {
    pub fn for_mode(mode: OracleMode, perm: &'a Permutation) -> Self {
        match mode {
            OracleMode::InPlace => Oracle::InPlace(perm),
            OracleMode::Xor => Oracle::Xor(perm),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Gate {
    Dense { op: DenseMatrix, targets: Vec<String> },
    Bits { op: DenseMatrix, register: String, bits: Vec<usize> },
    /// Basis permutation of the joint index of `targets`.
    Map { targets: Vec<String>, table: Vec<usize> },
    Phase(C64),
}

impl Gate {
    pub fn dense(op: DenseMatrix, targets: &[&str]) -> Self {
        Gate::Dense { op, targets: targets.iter().map(|s| s.to_string()).collect() }
    }

    pub fn bits(op: DenseMatrix, register: &str, bits: &[usize]) -> Self {
        Gate::Bits { op, register: register.to_string(), bits: bits.to_vec() }
    }

    pub fn map(targets: &[&str], table: Vec<usize>) -> Self {
        Gate::Map { targets: targets.iter().map(|s| s.to_string()).collect(), table }
    }

    fn check(&self) -> Result<()> {
        match self {
            Gate::Dense { op, .. } | Gate::Bits { op, .. } => {
                let deviation = unitary_deviation(op);
                if deviation > 1e-10 {
                    return Err(Error::NotUnitary { deviation });
                }
            }
            Gate::Map { table, .. } => {
                let mut seen = vec![false; table.len()];
                for &t in table {
                    if t >= table.len() || std::mem::replace(&mut seen[t], true) {
                        return Err(Error::InvalidArgument("map gate is not a permutation".into()));
                    }
                }
            }
            Gate::Phase(p) => {
                if (p.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::NotUnitary { deviation: (p.norm() - 1.0).abs() });
                }
            }
        }
        Ok(())
    }

    fn apply(&self, state: &mut Statevector) -> Result<()> {
        match self {
            Gate::Dense { op, targets } => {
                let t: Vec<&str> = targets.iter().map(String::as_str).collect();
                state.apply_dense_unchecked(op, &t)
            }
            Gate::Bits { op, register, bits } => state.apply_on_bits_unchecked(op, register, bits),
            Gate::Map { targets, table } => {
                let t: Vec<&str> = targets.iter().map(String::as_str).collect();
                state.apply_basis_map(&t, |k| table[k])
            }
            Gate::Phase(p) => {
                state.scale_phase(*p);
                Ok(())
            }
        }
    }
}

/// Acceptance is the probability that `register` reads `value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptRule {
    pub register: String,
    pub value: usize,
}

#[derive(Clone, Debug)]
pub struct AdaptiveAlgorithm {
    q: usize,
    query_dim: usize,
    answer_dim: Option<usize>,
    witness_bits: u32,
    workspace_dim: usize,
    rounds: Vec<Vec<Gate>>,
    accept: Option<AcceptRule>,
    state_cutoff: usize,
}

impl AdaptiveAlgorithm {
    /// `rounds[r]` is `U_r`; there are `rounds.len() − 1` query rounds.
    pub fn new(
        q: usize,
        query_dim: usize,
        answer_dim: Option<usize>,
        witness_bits: u32,
        workspace_dim: usize,
        rounds: Vec<Vec<Gate>>,
    ) -> Result<Self> {
        if q == 0 || query_dim == 0 || workspace_dim == 0 {
            return Err(Error::InvalidArgument("q, query_dim and workspace_dim must be positive".into()));
        }
        if rounds.is_empty() {
            return Err(Error::InvalidArgument("an algorithm needs at least U_0".into()));
        }
        if witness_bits > 20 {
            return Err(Error::InvalidArgument(format!("witness of {witness_bits} bits is too wide")));
        }
        let alg = AdaptiveAlgorithm {
            q,
            query_dim,
            answer_dim,
            witness_bits,
            workspace_dim,
            rounds,
            accept: None,
            state_cutoff: DEFAULT_STATE_CUTOFF,
        };
        for g in alg.rounds.iter().flatten() {
            g.check()?;
        }
        let probe = alg.initial_state(0)?;
        let mut s = probe;
        for g in alg.rounds.iter().flatten() {
            g.apply(&mut s)?;
        }
        Ok(alg)
    }

    pub fn with_accept(mut self, register: &str, value: usize) -> Self {
        self.accept = Some(AcceptRule { register: register.to_string(), value });
        self
    }

    pub fn with_state_cutoff(mut self, cutoff: usize) -> Self {
        self.state_cutoff = cutoff;
        self
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn rounds(&self) -> usize {
        self.rounds.len() - 1
    }

    pub fn query_dim(&self) -> usize {
        self.query_dim
    }

    pub fn answer_dim(&self) -> Option<usize> {
        self.answer_dim
    }

    pub fn witness_bits(&self) -> u32 {
        self.witness_bits
    }

    pub fn unitary(&self, r: usize) -> &[Gate] {
        &self.rounds[r]
    }

    pub fn query_registers(&self) -> Vec<String> {
        (0..self.q).map(query_register).collect()
    }

    pub fn layout(&self) -> Vec<(String, usize)> {
        let mut regs: Vec<(String, usize)> = (0..self.q).map(|j| (query_register(j), self.query_dim)).collect();
        if let Some(d) = self.answer_dim {
            regs.extend((0..self.q).map(|j| (answer_register(j), d)));
        }
        regs.push((WITNESS.to_string(), 1 << self.witness_bits));
        regs.push((WORKSPACE.to_string(), self.workspace_dim));
        regs
    }

    pub fn state_dim(&self) -> usize {
        self.layout().iter().map(|(_, d)| d).product()
    }

    /// `|0⟩|witness⟩|0⟩` before `U_0`.
    pub fn initial_state(&self, witness: u64) -> Result<Statevector> {
        let dim = self.state_dim();
        if dim > self.state_cutoff {
            return Err(Error::CutoffExceeded { dim, cutoff: self.state_cutoff });
        }
        if witness >= 1u64 << self.witness_bits {
            return Err(Error::InvalidArgument(format!("witness {witness} exceeds {} bits", self.witness_bits)));
        }
        let layout = self.layout();
        let regs: Vec<(&str, usize)> = layout.iter().map(|(n, d)| (n.as_str(), *d)).collect();
        let idx: Vec<usize> = layout.iter().map(|(n, _)| if n == WITNESS { witness as usize } else { 0 }).collect();
        Statevector::basis(&regs, &idx)
    }

    pub fn apply_unitary(&self, r: usize, state: &mut Statevector) -> Result<()> {
        for g in &self.rounds[r] {
            g.apply(state)?;
        }
        Ok(())
    }

    /// `O^{⊗q}` on all query registers.
    pub fn apply_oracle(&self, oracle: Oracle<'_>, state: &mut Statevector) -> Result<()> {
        for j in 0..self.q {
            let x = query_register(j);
            match oracle {
                Oracle::InPlace(p) => state.apply_inplace_oracle(p, &x)?,
                Oracle::Xor(p) => {
                    self.require_answers("XOR")?;
                    state.apply_xor_oracle(p, &x, &answer_register(j))?
                }
                Oracle::Membership(set) => {
                    let d = self.require_answers("membership")?;
                    if d != 2 {
                        return Err(Error::DimensionMismatch("membership answers need a qubit".into()));
                    }
                    let y = answer_register(j);
                    state.apply_basis_map(&[x.as_str(), y.as_str()], |k| {
                        let (xi, yi) = (k / 2, k % 2);
                        xi * 2 + (yi ^ usize::from(set.contains(&xi)))
                    })?;
                }
            }
        }
        Ok(())
    }

    fn require_answers(&self, what: &str) -> Result<usize> {
        self.answer_dim
            .ok_or_else(|| Error::InvalidArgument(format!("{what} oracle needs answer registers")))
    }

    /// States `ψ_0, …, ψ_R` where `ψ_r` follows `U_r` and `oracles[r−1]`
    /// is used in round `r`.
    pub fn run_with(&self, oracles: &[Oracle<'_>], witness: u64) -> Result<Vec<Statevector>> {
        if oracles.len() != self.rounds() {
            return Err(Error::InvalidArgument(format!(
                "{} oracles for {} query rounds",
                oracles.len(),
                self.rounds()
            )));
        }
        let mut s = self.initial_state(witness)?;
        self.apply_unitary(0, &mut s)?;
        let mut out = vec![s.clone()];
        for (r, o) in oracles.iter().enumerate() {
            self.apply_oracle(*o, &mut s)?;
            self.apply_unitary(r + 1, &mut s)?;
            out.push(s.clone());
        }
        Ok(out)
    }

    pub fn accept_probability(&self, state: &Statevector) -> Result<f64> {
        let rule = self
            .accept
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("algorithm has no accept rule".into()))?;
        Ok(state.marginal(&rule.register)?[rule.value])
    }
}

/// `U_R O^{⊗q} … U_1 O^{⊗q} U_0 |0⟩|witness⟩` with a fixed oracle.
pub fn run_adaptive(alg: &AdaptiveAlgorithm, oracle: &Permutation, mode: OracleMode, witness: u64) -> Result<Statevector> {
    let o = Oracle::for_mode(mode, oracle);
    let oracles = vec![o; alg.rounds()];
    Ok(alg.run_with(&oracles, witness)?.pop().expect("at least U_0"))
}

/// A witness-indexed verifier family backed by one adaptive algorithm.
#[derive(Clone, Debug)]
pub struct AdaptiveVerifier {
    pub algorithm: AdaptiveAlgorithm,
    pub mode: OracleMode,
}

impl WitnessFamily for AdaptiveVerifier {
    fn accept_probability(&self, instance: &PointerChasingInstance, witness: u64) -> Result<f64> {
        let s = run_adaptive(&self.algorithm, instance.perm(), self.mode, witness)?;
        self.algorithm.accept_probability(&s)
    }

    fn cost(&self, _: &PointerChasingInstance) -> u64 {
        (self.algorithm.state_dim() * (self.algorithm.rounds() + 1)) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::dense::{c, identity, random_unitary};
    use crate::rng::seeded;

    fn shift_table(m: usize, by: usize) -> Vec<usize> {
        (0..m).map(|k| (k + by) % m).collect()
    }

    #[test]
    fn zero_rounds_applies_only_u0() {
        let alg = AdaptiveAlgorithm::new(1, 4, None, 0, 1, vec![vec![Gate::map(&["q0"], shift_table(4, 2))]]).unwrap();
        let s = run_adaptive(&alg, &Permutation::cycle(4), OracleMode::InPlace, 0).unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0));
    }

    #[test]
    fn identity_rounds_walk_the_permutation() {
        let m = 8;
        let mut rng = seeded(2);
        let pi = Permutation::random(m, &mut rng);
        let r = 3;
        let mut rounds = vec![vec![Gate::map(&["q0"], shift_table(m, 4))]];
        rounds.extend((0..r).map(|_| Vec::new()));
        let alg = AdaptiveAlgorithm::new(1, m, None, 0, 1, rounds).unwrap();
        let s = run_adaptive(&alg, &pi, OracleMode::InPlace, 0).unwrap();
        let mut x = 5;
        for _ in 0..r {
            x = pi.apply(x);
        }
        assert!((s.amplitudes()[x - 1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_phase_does_not_change_acceptance() {
        let mut rng = seeded(3);
        let pi = Permutation::random(4, &mut rng);
        let u0 = random_unitary(8, &mut rng);
        let u1 = random_unitary(8, &mut rng);
        let build = |phase: C64| {
            AdaptiveAlgorithm::new(
                1,
                4,
                None,
                1,
                1,
                vec![
                    vec![Gate::dense(u0.clone(), &["q0", "w"])],
                    vec![Gate::dense(u1.clone(), &["q0", "w"]), Gate::Phase(phase)],
                ],
            )
            .unwrap()
            .with_accept("q0", 1)
        };
        let a = build(c(1.0));
        let b = build(C64::from_polar(1.0, 0.7));
        for w in 0..2 {
            let pa = a.accept_probability(&run_adaptive(&a, &pi, OracleMode::InPlace, w).unwrap()).unwrap();
            let pb = b.accept_probability(&run_adaptive(&b, &pi, OracleMode::InPlace, w).unwrap()).unwrap();
            assert!((pa - pb).abs() < 1e-12);
        }
    }

    #[test]
    fn xor_mode_writes_answers() {
        let pi = Permutation::cycle(4);
        let alg = AdaptiveAlgorithm::new(1, 4, Some(4), 0, 1, vec![vec![Gate::map(&["q0"], shift_table(4, 1))], vec![]]).unwrap();
        let s = run_adaptive(&alg, &pi, OracleMode::Xor, 0).unwrap();
        // x = label 2, answer enc(3) = 2
        assert_eq!(s.amplitudes()[4 + 2], c(1.0));
        assert!(run_adaptive(&AdaptiveAlgorithm::new(1, 4, None, 0, 1, vec![vec![], vec![]]).unwrap(), &pi, OracleMode::Xor, 0).is_err());
    }

    #[test]
    fn membership_oracle_flips_answer() {
        let set: HashSet<usize> = [3].into_iter().collect();
        let alg = AdaptiveAlgorithm::new(1, 4, Some(2), 0, 1, vec![vec![Gate::map(&["q0"], shift_table(4, 3))], vec![]]).unwrap();
        let s = alg.run_with(&[Oracle::Membership(&set)], 0).unwrap().pop().unwrap();
        assert_eq!(s.amplitudes()[3 * 2 + 1], c(1.0));
    }

    #[test]
    fn rejects_non_unitary_and_oversized() {
        let bad = identity(4) * c(2.0);
        assert!(AdaptiveAlgorithm::new(1, 4, None, 0, 1, vec![vec![Gate::dense(bad, &["q0"])]]).is_err());
        let alg = AdaptiveAlgorithm::new(2, 64, None, 0, 1, vec![vec![]]).unwrap().with_state_cutoff(1000);
        assert!(matches!(alg.initial_state(0), Err(Error::CutoffExceeded { .. })));
    }
}
