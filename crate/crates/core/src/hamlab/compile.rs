use super::circuit::ClockCircuit;
use crate::error::{Error, Result};
use crate::qsim::{Dyadic, HamiltonianTerm, SparseHamiltonian, SparseHamiltonianBuilder, Statevector, C64};

/// Compiled binary-clock Hamiltonian `H = H_in + Σ_t H_t + H_out (+ H_clock)`.
///
/// Every stored part is a projector; [`HamiltonianBundle::integer`] applies
/// the `×4` scale that makes all entries integers.
#[derive(Clone, Debug)]
pub struct HamiltonianBundle {
    pub circuit: ClockCircuit,
    pub h_in: SparseHamiltonian,
    pub h_prop: Vec<SparseHamiltonian>,
    pub h_out: SparseHamiltonian,
    /// Penalty on clock values `t > L`; absent when `L + 1` is a power of two.
    pub h_clock: Option<SparseHamiltonian>,
    pub hamiltonian: SparseHamiltonian,
    pub scale_log2: u32,
}

impl HamiltonianBundle {
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn steps(&self) -> usize {
        self.circuit.steps()
    }

    pub fn clock_dim(&self) -> usize {
        self.circuit.clock_dim()
    }

    /// Flat index of `|x⟩_data |t⟩_clock`.
    pub fn index(&self, x: usize, t: usize) -> usize {
        x * self.clock_dim() + t
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        self.hamiltonian.terms().expect("compiled bundles keep their terms")
    }

    pub fn term_count(&self) -> usize {
        self.terms().len()
    }

    /// `4H`, integer-valued.
    pub fn integer(&self) -> SparseHamiltonian {
        self.hamiltonian.scaled_pow2(self.scale_log2)
    }

    /// `⟨ψ|H|ψ⟩` on the unscaled Hamiltonian.
    pub fn energy(&self, state: &Statevector) -> Result<f64> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("state of length {} for H of dimension {}", state.len(), self.dim())));
        }
        Ok(self.hamiltonian.expectation(state.amplitudes()))
    }

    /// Largest projector defect `‖P² − P‖_max` over all parts.
    pub fn projector_defect(&self) -> f64 {
        self.terms().iter().map(|t| t.op.projector_defect()).fold(0.0, f64::max)
    }
}

/// Row bound `2(c + 1) + 2` for the largest gate sparsity `c`.
pub fn sparsity_bound(circuit: &ClockCircuit) -> usize {
    let c = circuit.gates().iter().map(|g| g.sparsity()).max().unwrap_or(0);
    2 * (c + 1) + 2
}

fn step_term(circuit: &ClockCircuit, t: usize) -> Result<SparseHamiltonian> {
    let cd = circuit.clock_dim();
    let mut b = SparseHamiltonianBuilder::new(circuit.data_dim() * cd);
    for x in 0..circuit.data_dim() {
        b.add(x * cd + t - 1, x * cd + t - 1, Dyadic::HALF)?;
        b.add(x * cd + t, x * cd + t, Dyadic::HALF)?;
        for (y, u) in circuit.column(t, x) {
            let v = -(u * Dyadic::HALF);
            b.add(y * cd + t, x * cd + t - 1, v)?;
            b.add(x * cd + t - 1, y * cd + t, v)?;
        }
    }
    b.build()
}

fn diagonal<F: Fn(usize, usize) -> bool>(circuit: &ClockCircuit, keep: F) -> Result<SparseHamiltonian> {
    let cd = circuit.clock_dim();
    let mut b = SparseHamiltonianBuilder::new(circuit.data_dim() * cd);
    for x in 0..circuit.data_dim() {
        for t in 0..cd {
            if keep(x, t) {
                b.add(x * cd + t, x * cd + t, Dyadic::ONE)?;
            }
        }
    }
    b.build()
}

pub fn compile_to_hamiltonian(circuit: &ClockCircuit) -> Result<HamiltonianBundle> {
    let l = circuit.steps();
    let anc = circuit.ancillas();
    let h_in = diagonal(circuit, |x, t| t == 0 && circuit.bits(x, &anc) != 0)?;
    let h_prop = (1..=l).map(|t| step_term(circuit, t)).collect::<Result<Vec<_>>>()?;
    let h_out = diagonal(circuit, |x, t| t == l && circuit.output_bit(x) == 0)?;
    let h_clock = if circuit.clock_dim() > l + 1 { Some(diagonal(circuit, |_, t| t > l)?) } else { None };
    let mut terms = vec![HamiltonianTerm { label: "in".into(), op: h_in.clone() }];
    terms.extend(h_prop.iter().enumerate().map(|(i, h)| HamiltonianTerm { label: format!("prop{}", i + 1), op: h.clone() }));
    terms.push(HamiltonianTerm { label: "out".into(), op: h_out.clone() });
    if let Some(h) = &h_clock {
        terms.push(HamiltonianTerm { label: "clock".into(), op: h.clone() });
    }
    let hamiltonian = SparseHamiltonian::from_terms(circuit.data_dim() * circuit.clock_dim(), terms)?;
    Ok(HamiltonianBundle { circuit: circuit.clone(), h_in, h_prop, h_out, h_clock, hamiltonian, scale_log2: 2 })
}

/// `(L + 1)^{−1/2} Σ_t (U_t ⋯ U_1 |input⟩) ⊗ |t⟩` on registers `data`, `clock`.
pub fn history_state(circuit: &ClockCircuit, input: &Statevector) -> Result<Statevector> {
    let d = circuit.data_dim();
    if input.len() != d {
        return Err(Error::DimensionMismatch(format!("input of length {} for {d} data states", input.len())));
    }
    let cd = circuit.clock_dim();
    let l = circuit.steps();
    let norm = 1.0 / ((l + 1) as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); d * cd];
    let mut cur = input.amplitudes().to_vec();
    for t in 0..=l {
        if t > 0 {
            cur = circuit.apply_step(t, &cur);
        }
        for (x, a) in cur.iter().enumerate() {
            amps[x * cd + t] = a * norm;
        }
    }
    Statevector::from_amplitudes(&[("data", d), ("clock", cd)], amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamlab::circuit::CircuitGate;
    use crate::qsim::{extremal_eigen, EigenOptions, Extremal};

    fn one_x() -> ClockCircuit {
        let mut c = ClockCircuit::new(1, vec![], 0).unwrap();
        c.push(CircuitGate::X(0)).unwrap();
        c
    }

    #[test]
    fn empty_circuit() {
        let c = ClockCircuit::new(2, vec![0], 0).unwrap();
        let b = compile_to_hamiltonian(&c).unwrap();
        assert!(b.h_prop.is_empty() && b.h_clock.is_none());
        assert_eq!(b.dim(), 4);
        let input = c.input_state(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let hist = history_state(&c, &input).unwrap();
        assert_eq!(hist.amplitudes(), input.amplitudes());
        assert!(b.energy(&hist).unwrap().abs() < 1e-15);
        let g = extremal_eigen(&b.hamiltonian, Extremal::Min, &EigenOptions::default()).unwrap();
        assert!(g.value.abs() < 1e-12);
    }

    #[test]
    fn single_x_gate() {
        let c = one_x();
        let b = compile_to_hamiltonian(&c).unwrap();
        // index 2x + t; H_in at (1,0), H_out at (0,1), X couples (0,0)-(1,1) and (1,0)-(0,1)
        let h = b.hamiltonian.to_dense();
        let expect = [
            [0.5, 0.0, 0.0, -0.5],
            [0.0, 1.5, -0.5, 0.0],
            [0.0, -0.5, 1.5, 0.0],
            [-0.5, 0.0, 0.0, 0.5],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((h[(i, j)].re - expect[i][j]).abs() < 1e-15, "({i},{j})");
            }
        }
        let g = extremal_eigen(&b.hamiltonian, Extremal::Min, &EigenOptions::default()).unwrap();
        assert!(g.value.abs() < 1e-9);
        let input = c.input_state(&[C64::new(1.0, 0.0)]).unwrap();
        let hist = history_state(&c, &input).unwrap();
        let overlap: f64 = hist.amplitudes().iter().zip(&g.vector).map(|(a, b)| a.conj() * b).sum::<C64>().norm();
        assert!((overlap - 1.0).abs() < 1e-9);
        assert!(b.projector_defect() < 1e-12);
    }

    #[test]
    fn integer_entries_after_scale() {
        let mut c = ClockCircuit::new(3, vec![0], 2).unwrap();
        c.push(CircuitGate::HH(0, 1)).unwrap();
        c.push(CircuitGate::Cnot { control: 1, target: 2 }).unwrap();
        let b = compile_to_hamiltonian(&c).unwrap();
        assert!(b.h_clock.is_some());
        for row in b.integer().rows() {
            for (_, v) in row {
                assert!(v.as_integer().is_some());
            }
        }
        assert!(b.projector_defect() < 1e-12);
        assert!(b.hamiltonian.sparsity() <= sparsity_bound(&c));
    }
}
