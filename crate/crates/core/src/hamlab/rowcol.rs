use crate::error::{Error, Result};
use crate::qsim::{SparseHamiltonian, Statevector};

/// Fixed-point entry encoding: `width`-bit two's complement of `2^scale · H_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntryEncoding {
    pub width: u32,
    pub scale_log2: u32,
}

impl Default for EntryEncoding {
    fn default() -> Self {
        EntryEncoding { width: 16, scale_log2: 2 }
    }
}

impl EntryEncoding {
    pub fn encode(&self, value: i64) -> Result<u64> {
        let half = 1i64 << (self.width - 1);
        if value < -half || value >= half {
            return Err(Error::EncodingOverflow { value: value.to_string(), width: self.width });
        }
        Ok((value as u64) & self.mask())
    }

    pub fn decode(&self, code: u64) -> i64 {
        let shift = 64 - self.width;
        ((code << shift) as i64) >> shift
    }

    fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }
}

/// Row-column access to a sparse Hamiltonian:
/// `O_H|i, j, z⟩ = |i, j, z ⊕ enc(H_ij)⟩` and `O_f|i, k⟩ = |i, f(i, k)⟩`.
///
/// Positions are 1-based: `f(i, k)` for `k ≤ occupancy` is the `k`-th
/// smallest nonzero column; beyond that come column `i` (if not already
/// listed) and then the remaining columns ascending.
#[derive(Clone, Debug)]
pub struct RowColumnOracle {
    dim: usize,
    encoding: EntryEncoding,
    codes: Vec<Vec<(usize, u64)>>,
    positions: Vec<Vec<usize>>,
}

pub fn row_column_oracle(h: &SparseHamiltonian, encoding: EntryEncoding) -> Result<RowColumnOracle> {
    if encoding.width == 0 || encoding.width > 62 {
        return Err(Error::InvalidArgument(format!("encoding width {}", encoding.width)));
    }
    let dim = h.dim();
    let mut codes = Vec::with_capacity(dim);
    let mut positions = Vec::with_capacity(dim);
    for i in 0..dim {
        let row = h.row(i);
        let mut enc = Vec::with_capacity(row.len());
        for &(j, v) in row {
            let scaled = v.scale_pow2(encoding.scale_log2);
            let int = scaled.as_integer().ok_or_else(|| Error::EncodingOverflow { value: scaled.to_string(), width: encoding.width })?;
            enc.push((j, encoding.encode(int)?));
        }
        codes.push(enc);
        let mut pos: Vec<usize> = row.iter().map(|&(j, _)| j).collect();
        let mut used = vec![false; dim];
        pos.iter().for_each(|&j| used[j] = true);
        if !used[i] {
            pos.push(i);
            used[i] = true;
        }
        pos.extend((0..dim).filter(|&j| !used[j]));
        positions.push(pos);
    }
    Ok(RowColumnOracle { dim, encoding, codes, positions })
}

impl RowColumnOracle {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn encoding(&self) -> EntryEncoding {
        self.encoding
    }

    pub fn occupancy(&self, i: usize) -> usize {
        self.codes[i].len()
    }

    pub fn entry_code(&self, i: usize, j: usize) -> u64 {
        self.codes[i].binary_search_by_key(&j, |&(c, _)| c).map(|k| self.codes[i][k].1).unwrap_or(0)
    }

    /// `H_ij` recovered from the code, in units of `2^{−scale}`.
    pub fn entry_value(&self, i: usize, j: usize) -> i64 {
        self.encoding.decode(self.entry_code(i, j))
    }

    /// `f(i, k)` for `k ∈ [1, dim]`.
    pub fn position(&self, i: usize, k: usize) -> usize {
        self.positions[i][k - 1]
    }

    /// `O_H` on registers `i`, `j` (dimension `dim`) and `z` (dimension `2^width`).
    pub fn apply_entry(&self, state: &mut Statevector, i: &str, j: &str, z: &str) -> Result<()> {
        self.check_dims(state, &[i, j])?;
        let zd = state.dim_of(z)?;
        if zd != 1usize << self.encoding.width {
            return Err(Error::RegisterTooNarrow { register: z.into(), dim: zd, size: 1 << self.encoding.width });
        }
        let d = self.dim;
        state.apply_basis_map(&[i, j, z], |k| {
            let (r, c, v) = (k / (d * zd), (k / zd) % d, k % zd);
            r * d * zd + c * zd + (v ^ self.entry_code(r, c) as usize)
        })
    }

    /// `O_f` on registers `i` and `k`, the `k` register's index `k − 1`
    /// holding position `k`.
    pub fn apply_position(&self, state: &mut Statevector, i: &str, k: &str) -> Result<()> {
        self.check_dims(state, &[i, k])?;
        let d = self.dim;
        state.apply_basis_map(&[i, k], |x| {
            let (r, p) = (x / d, x % d);
            r * d + self.position(r, p + 1)
        })
    }

    fn check_dims(&self, state: &Statevector, regs: &[&str]) -> Result<()> {
        for r in regs {
            if state.dim_of(r)? != self.dim {
                return Err(Error::DimensionMismatch(format!("register `{r}` must have dimension {}", self.dim)));
            }
        }
        Ok(())
    }
}
