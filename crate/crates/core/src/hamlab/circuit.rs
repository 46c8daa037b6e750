use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::qsim::{Dyadic, Permutation, Statevector, C64};

/// A gate from `{X, CNOT, Toffoli, H⊗H}` or an oracle gate referencing a
/// registered permutation. Qubit 0 is the most significant data bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitGate {
    X(usize),
    Cnot { control: usize, target: usize },
    Toffoli { controls: [usize; 2], target: usize },
    HH(usize, usize),
    /// `|x⟩ ↦ |π(x)⟩` on the listed qubits (index `k` holds label `k + 1`).
    InPlace { oracle: usize, qubits: Vec<usize> },
    /// `|x, y⟩ ↦ |x, y ⊕ (π(x) − 1)⟩`.
    Xor { oracle: usize, input: Vec<usize>, output: Vec<usize> },
}

impl CircuitGate {
    pub fn name(&self) -> &'static str {
        match self {
            CircuitGate::X(_) => "x",
            CircuitGate::Cnot { .. } => "cnot",
            CircuitGate::Toffoli { .. } => "toffoli",
            CircuitGate::HH(..) => "hh",
            CircuitGate::InPlace { .. } => "perm",
            CircuitGate::Xor { .. } => "xor",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            CircuitGate::X(a) => vec![*a],
            CircuitGate::Cnot { control, target } => vec![*control, *target],
            CircuitGate::Toffoli { controls, target } => vec![controls[0], controls[1], *target],
            CircuitGate::HH(a, b) => vec![*a, *b],
            CircuitGate::InPlace { qubits, .. } => qubits.clone(),
            CircuitGate::Xor { input, output, .. } => input.iter().chain(output).copied().collect(),
        }
    }

    pub fn oracle(&self) -> Option<usize> {
        match self {
            CircuitGate::InPlace { oracle, .. } | CircuitGate::Xor { oracle, .. } => Some(*oracle),
            _ => None,
        }
    }

    pub fn is_oracle(&self) -> bool {
        self.oracle().is_some()
    }

    /// Nonzeros per column of the gate's matrix.
    pub fn sparsity(&self) -> usize {
        match self {
            CircuitGate::HH(..) => 4,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClockCircuit {
    qubits: usize,
    witness: Vec<usize>,
    output: usize,
    gates: Vec<CircuitGate>,
    oracles: Vec<Permutation>,
}

#[inline]
fn read(x: usize, n: usize, qs: &[usize]) -> usize {
    qs.iter().fold(0, |acc, &q| (acc << 1) | ((x >> (n - 1 - q)) & 1))
}

#[inline]
fn write(x: usize, n: usize, qs: &[usize], v: usize) -> usize {
    let k = qs.len();
    qs.iter().enumerate().fold(x, |acc, (i, &q)| {
        let bit = (v >> (k - 1 - i)) & 1;
        let shift = n - 1 - q;
        (acc & !(1 << shift)) | (bit << shift)
    })
}

impl ClockCircuit {
    /// Data register of `qubits` qubits; `witness` qubits are left free by
    /// the input check and `output` reads 1 on acceptance.
    pub fn new(qubits: usize, witness: Vec<usize>, output: usize) -> Result<Self> {
        if qubits == 0 || qubits > 24 {
            return Err(Error::InvalidArgument(format!("{qubits} data qubits")));
        }
        if output >= qubits || witness.iter().any(|&q| q >= qubits) {
            return Err(Error::InvalidArgument("layout qubit out of range".into()));
        }
        let mut w = witness;
        w.sort_unstable();
        w.dedup();
        Ok(ClockCircuit { qubits, witness: w, output, gates: Vec::new(), oracles: Vec::new() })
    }

    /// Registers an oracle and returns its id.
    pub fn add_oracle(&mut self, perm: Permutation) -> usize {
        self.oracles.push(perm);
        self.oracles.len() - 1
    }

    pub fn push(&mut self, gate: CircuitGate) -> Result<&mut Self> {
        self.validate(&gate)?;
        self.gates.push(gate);
        Ok(self)
    }

    fn validate(&self, gate: &CircuitGate) -> Result<()> {
        let qs = gate.qubits();
        if qs.is_empty() {
            return Err(Error::UnsupportedGate(format!("{} on no qubits", gate.name())));
        }
        if let Some(&q) = qs.iter().find(|&&q| q >= self.qubits) {
            return Err(Error::UnsupportedGate(format!("{} touches qubit {q} of {}", gate.name(), self.qubits)));
        }
        let mut sorted = qs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qs.len() {
            return Err(Error::UnsupportedGate(format!("{} repeats a qubit", gate.name())));
        }
        match gate {
            CircuitGate::InPlace { oracle, qubits } => {
                let m = self.oracle_size(*oracle)?;
                if m > 1 << qubits.len() {
                    return Err(Error::UnsupportedGate(format!("oracle {oracle} of size {m} on {} qubits", qubits.len())));
                }
            }
            CircuitGate::Xor { oracle, input, output } => {
                let m = self.oracle_size(*oracle)?;
                if m > 1 << input.len() || m.next_power_of_two() > 1 << output.len() {
                    return Err(Error::UnsupportedGate(format!("oracle {oracle} of size {m} does not fit its registers")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn oracle_size(&self, id: usize) -> Result<usize> {
        self.oracles
            .get(id)
            .map(Permutation::size)
            .ok_or_else(|| Error::UnsupportedGate(format!("unregistered oracle {id}")))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn witness(&self) -> &[usize] {
        &self.witness
    }

    pub fn ancillas(&self) -> Vec<usize> {
        (0..self.qubits).filter(|q| !self.witness.contains(q)).collect()
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn gates(&self) -> &[CircuitGate] {
        &self.gates
    }

    pub fn oracles(&self) -> &[Permutation] {
        &self.oracles
    }

    /// `L`.
    pub fn steps(&self) -> usize {
        self.gates.len()
    }

    /// `⌈log₂(L + 1)⌉`.
    pub fn clock_width(&self) -> u32 {
        (self.steps() + 1).next_power_of_two().trailing_zeros()
    }

    pub fn clock_dim(&self) -> usize {
        1 << self.clock_width()
    }

    pub fn data_dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn bits(&self, x: usize, qs: &[usize]) -> usize {
        read(x, self.qubits, qs)
    }

    pub fn with_bits(&self, x: usize, qs: &[usize], v: usize) -> usize {
        write(x, self.qubits, qs, v)
    }

    pub fn output_bit(&self, x: usize) -> usize {
        read(x, self.qubits, &[self.output])
    }

    /// Column `U_t|x⟩` for step `t ∈ [1, L]`.
    pub fn column(&self, t: usize, x: usize) -> Vec<(usize, Dyadic)> {
        let n = self.qubits;
        let one = |y| vec![(y, Dyadic::ONE)];
        match &self.gates[t - 1] {
            CircuitGate::X(a) => one(x ^ (1 << (n - 1 - a))),
            CircuitGate::Cnot { control, target } => {
                if read(x, n, &[*control]) == 1 {
                    one(x ^ (1 << (n - 1 - target)))
                } else {
                    one(x)
                }
            }
            CircuitGate::Toffoli { controls, target } => {
                if read(x, n, controls) == 3 {
                    one(x ^ (1 << (n - 1 - target)))
                } else {
                    one(x)
                }
            }
            CircuitGate::HH(a, b) => {
                let xs = read(x, n, &[*a, *b]);
                (0..4)
                    .map(|ys: usize| {
                        let sign = if (xs & ys).count_ones().is_multiple_of(2) { 1 } else { -1 };
                        (write(x, n, &[*a, *b], ys), Dyadic::new(sign, 1))
                    })
                    .collect()
            }
            CircuitGate::InPlace { oracle, qubits } => {
                let p = &self.oracles[*oracle];
                let v = read(x, n, qubits);
                if v < p.size() {
                    one(write(x, n, qubits, p.apply(v + 1) - 1))
                } else {
                    one(x)
                }
            }
            CircuitGate::Xor { oracle, input, output } => {
                let p = &self.oracles[*oracle];
                let v = read(x, n, input);
                if v < p.size() {
                    let y = read(x, n, output) ^ (p.apply(v + 1) - 1);
                    one(write(x, n, output, y))
                } else {
                    one(x)
                }
            }
        }
    }

    /// `U_t` applied to a data-register amplitude vector.
    pub fn apply_step(&self, t: usize, amps: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (x, &a) in amps.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for (y, u) in self.column(t, x) {
                out[y] += a * u.to_f64();
            }
        }
        out
    }

    /// `U_L ⋯ U_1` applied to `amps`.
    pub fn run(&self, amps: &[C64]) -> Vec<C64> {
        (1..=self.steps()).fold(amps.to_vec(), |v, t| self.apply_step(t, &v))
    }

    /// Embeds witness amplitudes (over the witness qubits, first listed most
    /// significant) with every ancilla at zero.
    pub fn input_state(&self, witness: &[C64]) -> Result<Statevector> {
        let wd = 1usize << self.witness.len();
        if witness.len() != wd {
            return Err(Error::DimensionMismatch(format!("witness of length {} for {wd} states", witness.len())));
        }
        let mut amps = vec![C64::new(0.0, 0.0); self.data_dim()];
        for (w, &a) in witness.iter().enumerate() {
            amps[write(0, self.qubits, &self.witness, w)] = a;
        }
        Statevector::from_amplitudes(&[("data", self.data_dim())], amps)
    }

    /// Probability that the output qubit reads 1 after the run.
    pub fn accept_probability(&self, input: &Statevector) -> Result<f64> {
        if input.len() != self.data_dim() {
            return Err(Error::DimensionMismatch(format!("input of length {}", input.len())));
        }
        let out = self.run(input.amplitudes());
        Ok(out.iter().enumerate().filter(|(x, _)| self.output_bit(*x) == 1).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Line format: `qubits n`, `witness q…`, `output q`, one gate per line.
    pub fn to_text(&self) -> String {
        let join = |qs: &[usize]| qs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let mut s = format!("qubits {}\nwitness {}\noutput {}\n", self.qubits, join(&self.witness), self.output);
        for g in &self.gates {
            let _ = match g {
                CircuitGate::InPlace { oracle, qubits } => writeln!(s, "perm {oracle} {}", join(qubits)),
                CircuitGate::Xor { oracle, input, output } => writeln!(s, "xor {oracle} {} : {}", join(input), join(output)),
                other => writeln!(s, "{} {}", other.name(), join(&other.qubits())),
            };
        }
        s
    }

    /// Inverse of [`ClockCircuit::to_text`]; `oracles[id]` backs oracle id `id`.
    pub fn parse(text: &str, oracles: Vec<Permutation>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: String| Error::Parse { line, message };
        let nums = |line: usize, toks: &[&str]| -> Result<Vec<usize>> {
            toks.iter()
                .map(|t| t.parse::<usize>().map_err(|e| err(line, format!("`{t}`: {e}"))))
                .collect()
        };
        let mut header = |key: &str| -> Result<(usize, Vec<usize>)> {
            let (line, l) = lines.next().ok_or_else(|| err(0, format!("missing `{key}` header")))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks[0] != key {
                return Err(err(line, format!("expected `{key}`, found `{}`", toks[0])));
            }
            Ok((line, nums(line, &toks[1..])?))
        };
        let (line, q) = header("qubits")?;
        let (_, witness) = header("witness")?;
        let (oline, out) = header("output")?;
        if q.len() != 1 || out.len() != 1 {
            return Err(err(if q.len() != 1 { line } else { oline }, "expected a single number".into()));
        }
        let mut c = ClockCircuit::new(q[0], witness, out[0])?;
        c.oracles = oracles;
        for (line, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let arity = |k: usize| -> Result<Vec<usize>> {
                let v = nums(line, &toks[1..])?;
                if v.len() != k {
                    return Err(err(line, format!("`{}` takes {k} qubits", toks[0])));
                }
                Ok(v)
            };
            let gate = match toks[0] {
                "x" => CircuitGate::X(arity(1)?[0]),
                "cnot" => {
                    let v = arity(2)?;
                    CircuitGate::Cnot { control: v[0], target: v[1] }
                }
                "toffoli" => {
                    let v = arity(3)?;
                    CircuitGate::Toffoli { controls: [v[0], v[1]], target: v[2] }
                }
                "hh" => {
                    let v = arity(2)?;
                    CircuitGate::HH(v[0], v[1])
                }
                "perm" => {
                    let v = nums(line, &toks[1..])?;
                    if v.len() < 2 {
                        return Err(err(line, "`perm` takes an oracle id and qubits".into()));
                    }
                    CircuitGate::InPlace { oracle: v[0], qubits: v[1..].to_vec() }
                }
                "xor" => {
                    let sep = toks.iter().position(|&t| t == ":").ok_or_else(|| err(line, "`xor` needs `:`".into()))?;
                    let head = nums(line, &toks[1..sep])?;
                    if head.len() < 2 {
                        return Err(err(line, "`xor` takes an oracle id and input qubits".into()));
                    }
                    let output = nums(line, &toks[sep + 1..])?;
                    CircuitGate::Xor { oracle: head[0], input: head[1..].to_vec(), output }
                }
                other => return Err(Error::UnsupportedGate(other.to_string())),
            };
            c.push(gate).map_err(|e| err(line, e.to_string()))?;
        }
        Ok(c)
    }
}
