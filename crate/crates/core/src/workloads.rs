//! Reusable workloads: random bounded-adaptivity algorithms, toy clock
//! verifiers, random PSD Hamiltonians and the planted Guesser relation.

use nalgebra::DVector;
use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::adaptive::{answer_register, query_register, AdaptiveAlgorithm, Gate, GuesserRun, WITNESS};
use crate::error::Result;
use crate::hamlab::{CircuitGate, ClockCircuit};
use crate::pcp::PointerChasingInstance;
use crate::qsim::dense::{c, identity, random_unitary, random_vector};
use crate::qsim::{DenseMatrix, Dyadic, SparseHamiltonian, SparseHamiltonianBuilder, C64};

/// Householder reflection swapping `|0⟩` and the normalized `target`.
pub fn reflection_to(target: &[C64]) -> DenseMatrix {
    let d = target.len();
    let mut u = DVector::from_column_slice(target);
    u[0] -= c(1.0);
    let n = u.norm();
    if n < 1e-12 {
        return identity(d);
    }
    u /= c(n);
    identity(d) - (&u * u.adjoint()) * c(2.0)
}

/// Normalized state supported on `k` random basis indices below `limit`.
pub fn random_sparse_state<R: Rng + ?Sized>(dim: usize, limit: usize, k: usize, rng: &mut R) -> Vec<C64> {
    let limit = limit.min(dim);
    let mut v = vec![c(0.0); dim];
    let amps = random_vector(k.min(limit).max(1), rng);
    for (slot, a) in sample(rng, limit, k.min(limit).max(1)).into_iter().zip(amps) {
        v[slot] = a;
    }
    v
}

/// Block-diagonal `Σ_w |w⟩⟨w| ⊗ blocks[w]`.
fn witness_controlled(blocks: &[DenseMatrix]) -> DenseMatrix {
    let d = blocks[0].nrows();
    let mut m = DenseMatrix::zeros(d * blocks.len(), d * blocks.len());
    for (w, b) in blocks.iter().enumerate() {
        m.view_mut((w * d, w * d), (d, d)).copy_from(b);
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AlgorithmKind {
    /// Independent Haar unitaries on each query register.
    Haar,
    /// Reflections onto random sparse states, witness-controlled in `U_0`.
    Sparse,
    /// Uniform superposition over `[N]`, then idle so queries chase `π`.
    Chasing,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlgorithmShape {
    pub q: usize,
    pub rounds: usize,
    pub query_dim: usize,
    pub answer_dim: Option<usize>,
    pub witness_bits: u32,
    /// Support size for [`AlgorithmKind::Sparse`] and `N` for chasing.
    pub support: usize,
}

pub fn random_algorithm<R: Rng + ?Sized>(kind: AlgorithmKind, shape: AlgorithmShape, rng: &mut R) -> Result<AdaptiveAlgorithm> {
    let d = shape.query_dim;
    let wd = 1usize << shape.witness_bits;
    let mut rounds: Vec<Vec<Gate>> = Vec::with_capacity(shape.rounds + 1);
    for r in 0..=shape.rounds {
        let mut gates = Vec::new();
        for j in 0..shape.q {
            let x = query_register(j);
            match kind {
                AlgorithmKind::Haar => gates.push(Gate::dense(random_unitary(d, rng), &[&x])),
                AlgorithmKind::Sparse => {
                    if r == 0 && shape.witness_bits > 0 {
                        let blocks: Vec<DenseMatrix> =
                            (0..wd).map(|_| reflection_to(&random_sparse_state(d, d, shape.support, rng))).collect();
                        gates.push(Gate::dense(witness_controlled(&blocks), &[WITNESS, &x]));
                    } else {
                        gates.push(Gate::dense(reflection_to(&random_sparse_state(d, d, shape.support, rng)), &[&x]));
                    }
                }
                AlgorithmKind::Chasing => {
                    if r == 0 {
                        let n = shape.support.clamp(1, d);
                        let amp = c(1.0 / (n as f64).sqrt());
                        let mut v = vec![c(0.0); d];
                        v[..n].iter_mut().for_each(|a| *a = amp);
                        gates.push(Gate::dense(reflection_to(&v), &[&x]));
                    }
                }
            }
            if shape.answer_dim.is_some() && kind != AlgorithmKind::Chasing && r > 0 && rng.random_bool(0.5) {
                // fold answers back into the query register
                let y = answer_register(j);
                let ad = shape.answer_dim.unwrap_or(1);
                let table: Vec<usize> = (0..d * ad).map(|k| ((k / ad) ^ (k % ad)) % d * ad + k % ad).collect();
                if is_permutation(&table) {
                    gates.push(Gate::map(&[&x, &y], table));
                }
            }
        }
        rounds.push(gates);
    }
    AdaptiveAlgorithm::new(shape.q, d, shape.answer_dim, shape.witness_bits, 1, rounds)
}

fn is_permutation(table: &[usize]) -> bool {
    let mut seen = vec![false; table.len()];
    table.iter().all(|&t| t < table.len() && !std::mem::replace(&mut seen[t], true))
}

const TOY_GATES: [CircuitGate; 6] = [
    CircuitGate::Cnot { control: 0, target: 3 },
    CircuitGate::Cnot { control: 0, target: 1 },
    CircuitGate::Toffoli { controls: [0, 1], target: 2 },
    CircuitGate::X(1),
    CircuitGate::Cnot { control: 1, target: 2 },
    CircuitGate::HH(1, 2),
];

/// Steps of the accepting toy verifier.
pub const TOY_STEPS: usize = 4;

/// First `steps` gates of the toy family on qubits `w, a0, a1, out`
/// (witness `w`); it accepts exactly when `w = 1`.
pub fn toy_verifier(steps: usize) -> Result<ClockCircuit> {
    let mut c = ClockCircuit::new(4, vec![0], 3)?;
    for t in 0..steps {
        c.push(toy_gate(t))?;
    }
    Ok(c)
}

/// Gate `t` of the family; later laps swap the output copy for `X(2)` so
/// the output bit is written once.
fn toy_gate(t: usize) -> CircuitGate {
    match t % TOY_GATES.len() {
        0 if t > 0 => CircuitGate::X(2),
        k => TOY_GATES[k].clone(),
    }
}

/// The toy verifier with the output copy removed, so every witness is
/// rejected.
pub fn toy_verifier_rejecting(steps: usize) -> Result<ClockCircuit> {
    let mut c = ClockCircuit::new(4, vec![0], 3)?;
    for t in 0..steps {
        c.push(if t == 0 { CircuitGate::Cnot { control: 0, target: 1 } } else { toy_gate(t) })?;
    }
    Ok(c)
}

/// Honest witness amplitudes for the toy verifier.
pub fn toy_witness() -> Vec<C64> {
    vec![c(0.0), c(1.0)]
}

/// Chases `π` for `b − 1` in-place steps on the label register, then copies
/// the evenness bit (index parity) to the output.
pub fn pointer_chasing_circuit(instance: &PointerChasingInstance) -> Result<ClockCircuit> {
    let m = instance.buckets().m;
    let k = m.next_power_of_two().trailing_zeros() as usize;
    let label: Vec<usize> = (0..k).collect();
    let mut c = ClockCircuit::new(k + 1, label.clone(), k)?;
    let id = c.add_oracle(instance.perm().clone());
    for _ in 1..instance.buckets().b {
        c.push(CircuitGate::InPlace { oracle: id, qubits: label.clone() })?;
    }
    c.push(CircuitGate::Cnot { control: k - 1, target: k })?;
    Ok(c)
}

/// Uniform witness over labels `1..=N` in the chasing circuit's label register.
pub fn pointer_chasing_witness(instance: &PointerChasingInstance) -> Vec<C64> {
    let m = instance.buckets().m.next_power_of_two();
    let n = instance.buckets().big_n;
    let mut v = vec![c(0.0); m];
    v[..n].iter_mut().for_each(|a| *a = c(1.0 / (n as f64).sqrt()));
    v
}

/// `H = AᵀA / 2` with `A` a random sparse `{−1, 0, 1}` matrix, two
/// nonzeros per row.
pub fn random_psd_hamiltonian<R: Rng + ?Sized>(qubits: u32, rng: &mut R) -> Result<SparseHamiltonian> {
    let d = 1usize << qubits;
    let mut a = vec![vec![0i64; d]; d];
    for row in a.iter_mut() {
        for col in sample(rng, d, 2.min(d)) {
            row[col] = if rng.random_bool(0.5) { 1 } else { -1 };
        }
    }
    let mut b = SparseHamiltonianBuilder::new(d);
    for i in 0..d {
        for j in 0..d {
            let v: i64 = (0..d).map(|k| a[k][i] * a[k][j]).sum();
            if v != 0 {
                b.add(i, j, Dyadic::new(v, 1))?;
            }
        }
    }
    b.build()
}

/// Planted relation `{(x, h(x))}` on 2-bit `x` and `v`, pair index `4x + v`.
#[derive(Clone, Debug)]
pub struct PlantedGuesser {
    pub algorithm: AdaptiveAlgorithm,
    pub relation: Vec<usize>,
    /// Witness under which `U_0` prepares the relation.
    pub good_witness: u64,
}

impl PlantedGuesser {
    pub fn witness_bits(&self) -> u32 {
        self.algorithm.witness_bits()
    }

    /// Total oracle queries `Q = q · r`.
    pub fn queries(&self) -> usize {
        self.algorithm.q() * self.algorithm.rounds()
    }

    /// `l` distinct valid pairs.
    pub fn success(&self, run: &GuesserRun, l: usize) -> bool {
        run.pairs.len() >= l && run.pairs.iter().filter(|k| self.relation.contains(k)).count() >= l
    }
}

pub fn planted_guesser() -> Result<PlantedGuesser> {
    let h = |x: usize| (3 * x + 1) % 4;
    let relation: Vec<usize> = (0..4).map(|x| 4 * x + h(x)).collect();
    let all = vec![c(0.25); 16];
    let mut valid = vec![c(0.0); 16];
    relation.iter().for_each(|&k| valid[k] = c(0.5));
    let u0 = witness_controlled(&[reflection_to(&all), reflection_to(&valid)]);
    // marked valid pairs step to the next valid pair
    let table: Vec<usize> = (0..32)
        .map(|k| {
            let (x, y) = (k / 2, k % 2);
            match relation.iter().position(|&p| p == x) {
                Some(i) if y == 1 => relation[(i + 1) % 4] * 2 + 1,
                _ => k,
            }
        })
        .collect();
    let algorithm = AdaptiveAlgorithm::new(
        1,
        16,
        Some(2),
        1,
        1,
        vec![
            vec![Gate::dense(u0, &[WITNESS, "q0"])],
            vec![Gate::map(&["q0", "y0"], table)],
            vec![],
        ],
    )?;
    Ok(PlantedGuesser { algorithm, relation, good_witness: 1 })
}
