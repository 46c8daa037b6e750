//! Circuit-to-Hamiltonian tooling over a binary clock.
//!
//! Data qubit 0 is the most significant bit of the data index; the clock is
//! the least significant register, so `|x⟩|t⟩` sits at `x · 2^w + t`.

mod circuit;
mod compile;
mod gadget;
mod parallel;
mod qpe;
mod rowcol;
mod tester;

pub use circuit::{CircuitGate, ClockCircuit};
pub use compile::{compile_to_hamiltonian, history_state, sparsity_bound, HamiltonianBundle};
pub use gadget::{
    apply_basis_change, basis_change_defect, direct_controlled, gadget_report, propagation_basis_change, two_slot_term,
    uniform_mu, ControlledOracle, GadgetReport, OracleUnitary,
};
pub use parallel::{parallelize, ParallelReport, ParallelRun, ParallelTester};
pub use qpe::{control_qubits, estimate_from, qpe_distribution, qpe_energy, repetitions, QpeDistribution, QpeEstimate};
pub use rowcol::{row_column_oracle, EntryEncoding, RowColumnOracle};
pub use tester::{
    frustration_free, ground_energy, kernel_test, projector_scale, sparsity, term_average_acceptance, term_reject_probability,
    term_test, term_test_acceptance, KernelEstimate, TermOutcome, FRUSTRATION_TOL,
};
