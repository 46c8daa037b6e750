use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::dense::DenseMatrix;
use super::dyadic::Dyadic;
use super::C64;
use crate::error::{Error, Result};

/// Real symmetric sparse operator with exact dyadic entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHamiltonian {
    dim: usize,
    rows: Vec<Vec<(usize, Dyadic)>>,
    terms: Option<Vec<HamiltonianTerm>>,
}

/// A named positive-semidefinite summand.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTerm {
    pub label: String,
    pub op: SparseHamiltonian,
}

#[derive(Clone, Debug, Default)]
pub struct SparseHamiltonianBuilder {
    dim: usize,
    rows: Vec<BTreeMap<usize, Dyadic>>,
}

impl SparseHamiltonianBuilder {
    pub fn new(dim: usize) -> Self {
        SparseHamiltonianBuilder {
            dim,
            rows: vec![BTreeMap::new(); dim],
        }
    }

    /// Adds `value` to entry `(row, col)`.
    pub fn add(&mut self, row: usize, col: usize, value: Dyadic) -> Result<&mut Self> {
        if row >= self.dim || col >= self.dim {
            return Err(Error::DimensionMismatch(format!(
                "entry ({row}, {col}) outside dimension {}",
                self.dim
            )));
        }
        let e = self.rows[row].entry(col).or_insert(Dyadic::ZERO);
        *e = *e + value;
        Ok(self)
    }

    /// Adds `value` at `(row, col)` and at `(col, row)` (once if diagonal).
    pub fn add_symmetric(&mut self, row: usize, col: usize, value: Dyadic) -> Result<&mut Self> {
        self.add(row, col, value)?;
        if row != col {
            self.add(col, row, value)?;
        }
        Ok(self)
    }

    pub fn build(self) -> Result<SparseHamiltonian> {
        let rows: Vec<Vec<(usize, Dyadic)>> = self
            .rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        let h = SparseHamiltonian {
            dim: self.dim,
            rows,
            terms: None,
        };
        h.check_symmetric()?;
        Ok(h)
    }
}

impl SparseHamiltonian {
    pub fn zero(dim: usize) -> Self {
        SparseHamiltonian {
            dim,
            rows: vec![Vec::new(); dim],
            terms: None,
        }
    }

    pub fn diagonal(values: &[Dyadic]) -> Result<Self> {
        let mut b = SparseHamiltonianBuilder::new(values.len());
        for (i, &v) in values.iter().enumerate() {
            b.add(i, i, v)?;
        }
        b.build()
    }

    /// Sum of terms, keeping the decomposition.
    pub fn from_terms(dim: usize, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        let mut b = SparseHamiltonianBuilder::new(dim);
        for t in &terms {
            if t.op.dim != dim {
                return Err(Error::DimensionMismatch(format!(
                    "term `{}` has dimension {}, expected {dim}",
                    t.label, t.op.dim
                )));
            }
            for (i, row) in t.op.rows.iter().enumerate() {
                for &(j, v) in row {
                    b.add(i, j, v)?;
                }
            }
        }
        let mut h = b.build()?;
        h.terms = Some(terms);
        Ok(h)
    }

    fn check_symmetric(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if self.entry(j, i) != v {
                    return Err(Error::InvalidArgument(format!(
                        "not Hermitian: entry ({i}, {j}) = {v} but ({j}, {i}) = {}",
                        self.entry(j, i)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<(usize, Dyadic)>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[(usize, Dyadic)] {
        &self.rows[i]
    }

    pub fn terms(&self) -> Option<&[HamiltonianTerm]> {
        self.terms.as_deref()
    }

    pub fn entry(&self, i: usize, j: usize) -> Dyadic {
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => Dyadic::ZERO,
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Maximum number of nonzero entries in a row.
    pub fn sparsity(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `max_ij |H_ij|`.
    pub fn max_abs_entry(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|(_, v)| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn scaled_pow2(&self, k: u32) -> SparseHamiltonian {
        SparseHamiltonian {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, v.scale_pow2(k))).collect())
                .collect(),
            terms: self.terms.as_ref().map(|ts| {
                ts.iter()
                    .map(|t| HamiltonianTerm {
                        label: t.label.clone(),
                        op: t.op.scaled_pow2(k),
                    })
                    .collect()
            }),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, h)| v[j] * h.to_f64()).sum())
            .collect()
    }

    /// `⟨v|H|v⟩` for a normalized `v`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.apply(v)
            .iter()
            .zip(v)
            .map(|(hv, x)| (x.conj() * hv).re)
            .sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = C64::new(v.to_f64(), 0.0);
            }
        }
        m
    }

    /// Entry-wise `‖H² − H‖_max`, zero iff `H` is a projector.
    pub fn projector_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            let mut sq: BTreeMap<usize, Dyadic> = BTreeMap::new();
            for &(k, a) in &self.rows[i] {
                for &(j, b) in &self.rows[k] {
                    let e = sq.entry(j).or_insert(Dyadic::ZERO);
                    *e = *e + a * b;
                }
            }
            for &(j, v) in &self.rows[i] {
                sq.entry(j).or_insert(Dyadic::ZERO);
                let e = sq.get_mut(&j).unwrap();
                *e = *e - v;
            }
            for v in sq.values() {
                worst = worst.max(v.to_f64().abs());
            }
        }
        worst
    }

    /// Text form: `dim D` then one `row col num log2den` line per nonzero.
    pub fn to_triplets(&self) -> String {
        let mut s = format!("dim {}\n", self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                let _ = writeln!(s, "{i} {j} {} {}", v.numerator(), v.log2_den());
            }
        }
        s
    }

    pub fn from_triplets(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, head) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let dim = head
            .strip_prefix("dim ")
            .and_then(|d| d.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse {
                line: ln,
                message: format!("expected `dim D`, got `{head}`"),
            })?;
        let mut b = SparseHamiltonianBuilder::new(dim);
        let mut seen = std::collections::HashSet::new();
        for (ln, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            let bad = |message: String| Error::Parse { line: ln, message };
            if f.len() != 4 {
                return Err(bad(format!("expected 4 fields, got {}", f.len())));
            }
            let i: usize = f[0].parse().map_err(|_| bad("bad row".into()))?;
            let j: usize = f[1].parse().map_err(|_| bad("bad column".into()))?;
            let num: i64 = f[2].parse().map_err(|_| bad("bad numerator".into()))?;
            let k: u32 = f[3].parse().map_err(|_| bad("bad exponent".into()))?;
            if k > 62 {
                return Err(bad("exponent too large".into()));
            }
            if !seen.insert((i, j)) {
                return Err(bad(format!("duplicate entry ({i}, {j})")));
            }
            b.add(i, j, Dyadic::new(num, k)).map_err(|e| bad(e.to_string()))?;
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_x() -> SparseHamiltonian {
        let mut b = SparseHamiltonianBuilder::new(2);
        b.add_symmetric(0, 1, Dyadic::HALF).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn builder_merges_and_drops_zeros() {
        let mut b = SparseHamiltonianBuilder::new(3);
        b.add(0, 0, Dyadic::ONE).unwrap();
        b.add(0, 0, -Dyadic::ONE).unwrap();
        b.add(1, 1, Dyadic::HALF).unwrap();
        b.add(1, 1, Dyadic::HALF).unwrap();
        let h = b.build().unwrap();
        assert_eq!(h.nnz(), 1);
        assert_eq!(h.entry(1, 1), Dyadic::ONE);
        assert!(h.row(0).is_empty());
    }

    #[test]
    fn rejects_asymmetric() {
        let mut b = SparseHamiltonianBuilder::new(2);
        b.add(0, 1, Dyadic::ONE).unwrap();
        assert!(b.build().is_err());
    }

    #[test]
    fn projector_defect_detects_projectors() {
        let mut b = SparseHamiltonianBuilder::new(2);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            b.add(i, j, Dyadic::HALF).unwrap();
        }
        assert_eq!(b.build().unwrap().projector_defect(), 0.0);
        assert_eq!(half_x().projector_defect(), 0.5);
    }

    #[test]
    fn triplets_round_trip() {
        let h = half_x().scaled_pow2(1);
        let text = h.to_triplets();
        assert_eq!(text, "dim 2\n0 1 1 0\n1 0 1 0\n");
        assert_eq!(SparseHamiltonian::from_triplets(&text).unwrap(), h);
        assert!(SparseHamiltonian::from_triplets("dim 2\n0 1 1 0\n").is_err());
        assert!(SparseHamiltonian::from_triplets("dim 2\n0 0 1 0\n0 0 1 0\n").is_err());
    }

    #[test]
    fn terms_sum_to_total() {
        let t = vec![
            HamiltonianTerm { label: "a".into(), op: SparseHamiltonian::diagonal(&[Dyadic::ONE, Dyadic::ZERO]).unwrap() },
            HamiltonianTerm { label: "b".into(), op: SparseHamiltonian::diagonal(&[Dyadic::ONE, Dyadic::ONE]).unwrap() },
        ];
        let h = SparseHamiltonian::from_terms(2, t).unwrap();
        assert_eq!(h.entry(0, 0), Dyadic::integer(2));
        assert_eq!(h.terms().unwrap().len(), 2);
        let v = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        assert_eq!(h.expectation(&v), 1.0);
    }
}
