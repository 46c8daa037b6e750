//! A desk-scale laboratory for quantum-witness verification with perfect
//! completeness against permutation oracles.
//!
//! The crate is organised bottom-up:
//!
//! - [`qsim`]: exact statevector and operator core (registers, oracles,
//!   measurement, eigenpairs, matrix exponentials, exact dyadic sparse
//!   Hamiltonians).
//! - [`pcp`]: permutation pointer-chasing instances, their sampling,
//!   validation and file format.
//! - [`verify`]: the perfect-completeness verifier, exact optimal witnesses,
//!   the soundness envelope, the one-sided classical decider and brute-force
//!   classical witness search.
//! - [`adaptive`]: bounded-adaptivity query algorithms, transcripts, heavy
//!   sets, canonical completions, the NO-instance transformation, the hybrid
//!   and too-heavy bounds, and the Guesser.
//! - [`hamlab`]: controlled-oracle gadgets, the binary-clock
//!   circuit-to-Hamiltonian compiler, history states, term and kernel tests,
//!   row-column oracles, phase-estimation energy estimates and
//!   parallelisation of adaptive verifiers.
//! - [`workloads`]: reusable random and toy workloads shared by the
//!   experiment harness, the acceptance suite and the browser demo.

pub mod adaptive;
pub mod error;
pub mod hamlab;
pub mod pcp;
pub mod qsim;
pub mod rng;
pub mod verify;
pub mod workloads;

pub use error::{Error, Result};

/// Library version embedded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
