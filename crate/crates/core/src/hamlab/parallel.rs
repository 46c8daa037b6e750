use rand::Rng;
use serde::Serialize;

use super::circuit::ClockCircuit;
use super::compile::{compile_to_hamiltonian, HamiltonianBundle};
use super::tester::{term_test, term_test_acceptance};
use crate::error::Result;
use crate::qsim::Statevector;

/// One-round tester: `(L + 2)^4` independent term tests on copies of the
/// proof, all oracle uses issued in parallel, accepting iff every test
/// passes.
#[derive(Clone, Debug)]
pub struct ParallelTester {
    pub bundle: HamiltonianBundle,
    pub repetitions: u64,
    /// Propagation terms whose gate is an oracle gate.
    pub oracle_terms: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParallelReport {
    pub per_test_acceptance: f64,
    pub acceptance: f64,
    pub repetitions: u64,
    /// `(1 − per-test acceptance) (L + 2)^4`.
    pub gap_constant: f64,
    pub parallel_queries: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParallelRun {
    pub accepted: bool,
    pub passes: u64,
    pub repetitions: u64,
    pub queries: u64,
}

pub fn parallelize(circuit: &ClockCircuit) -> Result<ParallelTester> {
    let bundle = compile_to_hamiltonian(circuit)?;
    let l = circuit.steps() as u64;
    Ok(ParallelTester {
        bundle,
        repetitions: (l + 2).pow(4),
        oracle_terms: circuit.gates().iter().filter(|g| g.is_oracle()).count(),
    })
}

impl ParallelTester {
    /// Query count when every repetition checks every oracle term once.
    pub fn parallel_queries(&self) -> u64 {
        self.oracle_terms as u64 * self.repetitions
    }

    pub fn report(&self, state: &Statevector) -> Result<ParallelReport> {
        let per = term_test_acceptance(state, &self.bundle)?.clamp(0.0, 1.0);
        let l = self.bundle.steps() as f64;
        Ok(ParallelReport {
            per_test_acceptance: per,
            acceptance: per.powf(self.repetitions as f64),
            repetitions: self.repetitions,
            gap_constant: (1.0 - per) * (l + 2.0).powi(4),
            parallel_queries: self.parallel_queries(),
        })
    }

    /// Samples every repetition.
    pub fn run<R: Rng + ?Sized>(&self, state: &Statevector, rng: &mut R) -> Result<ParallelRun> {
        let mut passes = 0;
        let mut queries = 0;
        for _ in 0..self.repetitions {
            let o = term_test(state, &self.bundle, rng)?;
            queries += o.queries;
            passes += u64::from(o.accept);
        }
        Ok(ParallelRun { accepted: passes == self.repetitions, passes, repetitions: self.repetitions, queries })
    }
}
