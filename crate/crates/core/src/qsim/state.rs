use rand::Rng;

use super::dense::{unitary_deviation, DenseMatrix};
use super::permutation::Permutation;
use super::{C64, NORM_TOL, UNITARY_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

/// Normalized complex amplitudes over an ordered list of named registers.
///
/// Amplitudes are stored row-major: the first register is the most
/// significant digit of the flat index.
#[derive(Clone, Debug)]
pub struct Statevector {
    registers: Vec<Register>,
    amps: Vec<C64>,
}

/// One tensor axis of the flat index: `digit = (index / stride) % dim`.
#[derive(Clone, Copy, Debug)]
struct Axis {
    stride: usize,
    dim: usize,
}

impl Statevector {
    /// Computational basis state with `indices[k]` in register `k`.
    pub fn basis(registers: &[(&str, usize)], indices: &[usize]) -> Result<Self> {
        let regs = make_registers(registers)?;
        if indices.len() != regs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} indices for {} registers",
                indices.len(),
                regs.len()
            )));
        }
        let mut flat = 0;
        for (r, &i) in regs.iter().zip(indices) {
            if i >= r.dim {
                return Err(Error::DimensionMismatch(format!(
                    "index {i} outside register `{}` of dimension {}",
                    r.name, r.dim
                )));
            }
            flat = flat * r.dim + i;
        }
        let total = regs.iter().map(|r| r.dim).product();
        let mut amps = vec![C64::new(0.0, 0.0); total];
        amps[flat] = C64::new(1.0, 0.0);
        Ok(Statevector { registers: regs, amps })
    }

    /// Wraps amplitudes that must already be normalized within `1e-10`.
    pub fn from_amplitudes(registers: &[(&str, usize)], amps: Vec<C64>) -> Result<Self> {
        let regs = make_registers(registers)?;
        let total: usize = regs.iter().map(|r| r.dim).product();
        if amps.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {total}",
                amps.len()
            )));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Statevector { registers: regs, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(registers: &[(&str, usize)], mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(registers, amps)
    }

    /// Uniform superposition `|S⟩` over the 1-based labels in `labels` on a
    /// single register of dimension `dim`.
    pub fn uniform_labels(name: &str, dim: usize, labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("uniform state over an empty set".into()));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let a = 1.0 / (labels.len() as f64).sqrt();
        for &x in labels {
            if x == 0 || x > dim {
                return Err(Error::DimensionMismatch(format!(
                    "label {x} outside register of dimension {dim}"
                )));
            }
            if amps[x - 1].norm_sqr() > 0.0 {
                return Err(Error::InvalidArgument(format!("label {x} repeated")));
            }
            amps[x - 1] = C64::new(a, 0.0);
        }
        Self::from_amplitudes(&[(name, dim)], amps)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Statevector) -> Result<Statevector> {
        let mut registers = self.registers.clone();
        for r in &other.registers {
            if registers.iter().any(|s| s.name == r.name) {
                return Err(Error::InvalidArgument(format!("duplicate register `{}`", r.name)));
            }
            registers.push(r.clone());
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Statevector { registers, amps })
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn dim_of(&self, name: &str) -> Result<usize> {
        Ok(self.registers[self.position(name)?].dim)
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    fn axis(&self, name: &str) -> Result<Axis> {
        let p = self.position(name)?;
        let stride = self.registers[p + 1..].iter().map(|r| r.dim).product();
        Ok(Axis {
            stride,
            dim: self.registers[p].dim,
        })
    }

    /// Basis digit of register `name` for the flat index `flat`.
    pub fn digit(&self, name: &str, flat: usize) -> Result<usize> {
        let a = self.axis(name)?;
        Ok((flat / a.stride) % a.dim)
    }

    /// Reinterprets register `name` as a row-major product of `parts`;
    /// amplitudes do not move.
    pub fn split_register(&mut self, name: &str, parts: &[(&str, usize)]) -> Result<()> {
        let p = self.position(name)?;
        let product: usize = parts.iter().map(|&(_, d)| d).product();
        if product != self.registers[p].dim {
            return Err(Error::DimensionMismatch(format!(
                "parts of `{name}` multiply to {product}, register has dimension {}",
                self.registers[p].dim
            )));
        }
        let new: Vec<Register> = make_registers(parts)?;
        for r in &new {
            if self.registers.iter().enumerate().any(|(i, s)| i != p && s.name == r.name) {
                return Err(Error::InvalidArgument(format!("duplicate register `{}`", r.name)));
            }
        }
        self.registers.splice(p..=p, new);
        Ok(())
    }

    /// Inverse of [`split_register`](Self::split_register) for adjacent registers.
    pub fn merge_registers(&mut self, names: &[&str], merged: &str) -> Result<()> {
        let first = self.position(names[0])?;
        for (k, n) in names.iter().enumerate() {
            if self.position(n)? != first + k {
                return Err(Error::InvalidArgument(format!(
                    "registers {names:?} are not adjacent and in order"
                )));
            }
        }
        let dim = self.registers[first..first + names.len()]
            .iter()
            .map(|r| r.dim)
            .product();
        self.registers.splice(
            first..first + names.len(),
            [Register {
                name: merged.to_string(),
                dim,
            }],
        );
        Ok(())
    }

    /// Applies a unitary on the listed registers (first target most
    /// significant), identity elsewhere.
    pub fn apply_dense(&mut self, op: &DenseMatrix, targets: &[&str]) -> Result<()> {
        let axes = self.target_axes(targets)?;
        check_square(op, axes.iter().map(|a| a.dim).product())?;
        let deviation = unitary_deviation(op);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        self.apply_axes(op, &axes);
        Ok(())
    }

    /// Same as [`apply_dense`](Self::apply_dense) without the unitarity check,
    /// for callers that validated the operator once up front.
    pub(crate) fn apply_dense_unchecked(&mut self, op: &DenseMatrix, targets: &[&str]) -> Result<()> {
        let axes = self.target_axes(targets)?;
        check_square(op, axes.iter().map(|a| a.dim).product())?;
        self.apply_axes(op, &axes);
        Ok(())
    }

    /// Applies a unitary on individual bits of a power-of-two register. Bit 0
    /// is the least significant bit of the register's index; `bits[0]` is the
    /// most significant factor of `op`.
    pub fn apply_on_bits(&mut self, op: &DenseMatrix, register: &str, bits: &[usize]) -> Result<()> {
        let deviation = unitary_deviation(op);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        self.apply_on_bits_unchecked(op, register, bits)
    }

    pub(crate) fn apply_on_bits_unchecked(
        &mut self,
        op: &DenseMatrix,
        register: &str,
        bits: &[usize],
    ) -> Result<()> {
        let axes = self.bit_axes(register, bits)?;
        check_square(op, 1 << bits.len())?;
        self.apply_axes(op, &axes);
        Ok(())
    }

    fn bit_axes(&self, register: &str, bits: &[usize]) -> Result<Vec<Axis>> {
        let a = self.axis(register)?;
        if !a.dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "register `{register}` of dimension {} is not a qubit register",
                a.dim
            )));
        }
        let width = a.dim.trailing_zeros() as usize;
        let mut seen = 0usize;
        bits.iter()
            .map(|&b| {
                if b >= width || seen & (1 << b) != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "bit {b} invalid or repeated for `{register}` ({width} bits)"
                    )));
                }
                seen |= 1 << b;
                Ok(Axis {
                    stride: a.stride << b,
                    dim: 2,
                })
            })
            .collect()
    }

    fn target_axes(&self, targets: &[&str]) -> Result<Vec<Axis>> {
        let mut axes = Vec::with_capacity(targets.len());
        for (k, t) in targets.iter().enumerate() {
            if targets[..k].contains(t) {
                return Err(Error::InvalidArgument(format!("register `{t}` targeted twice")));
            }
            axes.push(self.axis(t)?);
        }
        Ok(axes)
    }

    fn apply_axes(&mut self, op: &DenseMatrix, axes: &[Axis]) {
        let d: usize = axes.iter().map(|a| a.dim).product();
        // offsets[t] = flat displacement of joint target index t
        let mut offsets = vec![0usize; d];
        for (t, off) in offsets.iter_mut().enumerate() {
            let mut rem = t;
            let mut acc = 0;
            for a in axes.iter().rev() {
                acc += (rem % a.dim) * a.stride;
                rem /= a.dim;
            }
            *off = acc;
        }
        let mut dense_op = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                dense_op.push(op[(i, j)]);
            }
        }
        let mut buf_in = vec![C64::new(0.0, 0.0); d];
        let n = self.amps.len();
        for base in 0..n {
            if axes.iter().any(|a| (base / a.stride) % a.dim != 0) {
                continue;
            }
            for (t, &off) in offsets.iter().enumerate() {
                buf_in[t] = self.amps[base + off];
            }
            if buf_in.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                continue;
            }
            for (i, &off) in offsets.iter().enumerate() {
                let row = &dense_op[i * d..(i + 1) * d];
                let mut acc = C64::new(0.0, 0.0);
                for (m, x) in row.iter().zip(&buf_in) {
                    acc += m * x;
                }
                self.amps[base + off] = acc;
            }
        }
    }

    /// Applies the bijection `map` on the joint basis index of `targets`
    /// (first target most significant). `map` must be a permutation of
    /// `0..∏dims`; this is checked.
    pub fn apply_basis_map<F>(&mut self, targets: &[&str], map: F) -> Result<()>
    where
        F: Fn(usize) -> usize,
    {
        let axes = self.target_axes(targets)?;
        let d: usize = axes.iter().map(|a| a.dim).product();
        let table: Vec<usize> = (0..d).map(&map).collect();
        let mut hit = vec![false; d];
        for &y in &table {
            if y >= d || std::mem::replace(&mut hit[y], true) {
                return Err(Error::InvalidArgument(
                    "basis map is not a permutation of the target space".into(),
                ));
            }
        }
        self.permute_axes(&axes, &table);
        Ok(())
    }

    fn permute_axes(&mut self, axes: &[Axis], table: &[usize]) {
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (flat, &amp) in self.amps.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let mut joint = 0;
            let mut cleared = flat;
            for a in axes {
                let digit = (flat / a.stride) % a.dim;
                joint = joint * a.dim + digit;
                cleared -= digit * a.stride;
            }
            let mut image = table[joint];
            let mut target = cleared;
            for a in axes.iter().rev() {
                target += (image % a.dim) * a.stride;
                image /= a.dim;
            }
            out[target] = amp;
        }
        self.amps = out;
    }

    /// Forward in-place oracle `|x⟩ ↦ |π(x)⟩` on register `target`, with the
    /// register's basis index `k` holding label `k + 1`.
    pub fn apply_inplace_oracle(&mut self, perm: &Permutation, target: &str) -> Result<()> {
        let a = self.axis(target)?;
        let m = perm.size();
        if a.dim < m {
            return Err(Error::DimensionMismatch(format!(
                "register `{target}` of dimension {} is smaller than the oracle domain {m}",
                a.dim
            )));
        }
        self.check_domain(a, m)?;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (flat, &amp) in self.amps.iter().enumerate() {
            let k = (flat / a.stride) % a.dim;
            let dest = if k < m {
                flat - k * a.stride + (perm.apply(k + 1) - 1) * a.stride
            } else {
                flat
            };
            out[dest] = amp;
        }
        self.amps = out;
        Ok(())
    }

    /// Standard XOR oracle `|x, y⟩ ↦ |x, y ⊕ enc(π(x))⟩` with
    /// `enc(label) = label − 1` in binary.
    pub fn apply_xor_oracle(&mut self, perm: &Permutation, input: &str, output: &str) -> Result<()> {
        let ai = self.axis(input)?;
        let ao = self.axis(output)?;
        if input == output {
            return Err(Error::InvalidArgument("XOR oracle needs two registers".into()));
        }
        let m = perm.size();
        if !ao.dim.is_power_of_two() || ao.dim < m.next_power_of_two() {
            return Err(Error::RegisterTooNarrow {
                register: output.to_string(),
                dim: ao.dim,
                size: m,
            });
        }
        self.check_domain(ai, m)?;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (flat, &amp) in self.amps.iter().enumerate() {
            let x = (flat / ai.stride) % ai.dim;
            let dest = if x < m {
                let y = (flat / ao.stride) % ao.dim;
                let y2 = y ^ (perm.apply(x + 1) - 1);
                flat - y * ao.stride + y2 * ao.stride
            } else {
                flat
            };
            out[dest] = amp;
        }
        self.amps = out;
        Ok(())
    }

    fn check_domain(&self, a: Axis, m: usize) -> Result<()> {
        if a.dim == m {
            return Ok(());
        }
        for (flat, amp) in self.amps.iter().enumerate() {
            let k = (flat / a.stride) % a.dim;
            if k >= m && amp.norm_sqr() > NORM_TOL * NORM_TOL {
                return Err(Error::OutsideDomain { label: k + 1, size: m });
            }
        }
        Ok(())
    }

    /// Born distribution of register `name` (indexed by basis index).
    pub fn marginal(&self, name: &str) -> Result<Vec<f64>> {
        let a = self.axis(name)?;
        let mut p = vec![0.0; a.dim];
        for (flat, amp) in self.amps.iter().enumerate() {
            p[(flat / a.stride) % a.dim] += amp.norm_sqr();
        }
        Ok(p)
    }

    /// Measures register `name` in the computational basis; returns the
    /// outcome's basis index and the renormalized post-measurement state.
    pub fn measure<R: Rng + ?Sized>(&self, name: &str, rng: &mut R) -> Result<(usize, Statevector)> {
        let p = self.marginal(name)?;
        let total: f64 = p.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMarginal(name.to_string()));
        }
        let outcome = sample_index(&p, total, rng);
        Ok((outcome, self.collapse(name, outcome)?))
    }

    /// Projects register `name` onto basis index `outcome` and renormalizes.
    pub fn collapse(&self, name: &str, outcome: usize) -> Result<Statevector> {
        let a = self.axis(name)?;
        let mut amps = self.amps.clone();
        let mut mass = 0.0;
        for (flat, amp) in amps.iter_mut().enumerate() {
            if (flat / a.stride) % a.dim == outcome {
                mass += amp.norm_sqr();
            } else {
                *amp = C64::new(0.0, 0.0);
            }
        }
        if mass <= 0.0 {
            return Err(Error::ZeroMarginal(name.to_string()));
        }
        let s = 1.0 / mass.sqrt();
        amps.iter_mut().for_each(|z| *z *= s);
        Ok(Statevector {
            registers: self.registers.clone(),
            amps,
        })
    }

    pub fn inner(&self, other: &Statevector) -> Result<C64> {
        self.check_same_layout(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Statevector) -> Result<f64> {
        self.check_same_layout(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    fn check_same_layout(&self, other: &Statevector) -> Result<()> {
        if self.registers != other.registers {
            return Err(Error::DimensionMismatch("states have different register layouts".into()));
        }
        Ok(())
    }

    /// Multiplies every amplitude by `phase`.
    pub fn scale_phase(&mut self, phase: C64) {
        self.amps.iter_mut().for_each(|a| *a *= phase);
    }
}

fn check_square(op: &DenseMatrix, d: usize) -> Result<()> {
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, targets span dimension {d}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(())
}

fn make_registers(spec: &[(&str, usize)]) -> Result<Vec<Register>> {
    let mut regs: Vec<Register> = Vec::with_capacity(spec.len());
    for &(name, dim) in spec {
        if dim == 0 {
            return Err(Error::DimensionMismatch(format!("register `{name}` has dimension 0")));
        }
        if regs.iter().any(|r| r.name == name) {
            return Err(Error::InvalidArgument(format!("duplicate register `{name}`")));
        }
        regs.push(Register {
            name: name.to_string(),
            dim,
        });
    }
    Ok(regs)
}

/// Draws an index with probability `p[i] / total`.
pub(crate) fn sample_index<R: Rng + ?Sized>(p: &[f64], total: f64, rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &pi) in p.iter().enumerate() {
        if pi > 0.0 {
            last_nonzero = i;
        }
        acc += pi;
        if u < acc {
            return i;
        }
    }
    last_nonzero
}
