use std::fmt;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// A bijection on `{1, …, M}` stored as its forward table.
///
/// The inverse table is built on first use and cached.
pub struct Permutation {
    forward: Vec<usize>,
    inverse: OnceLock<Vec<usize>>,
}

impl Permutation {
    /// `forward[x - 1] = π(x)`.
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let m = forward.len();
        if m == 0 {
            return Err(Error::InvalidPermutation("empty domain".into()));
        }
        let mut seen = vec![false; m];
        for (i, &y) in forward.iter().enumerate() {
            if y == 0 || y > m {
                return Err(Error::InvalidPermutation(format!(
                    "image {y} of {} is outside [1, {m}]",
                    i + 1
                )));
            }
            if std::mem::replace(&mut seen[y - 1], true) {
                return Err(Error::InvalidPermutation(format!("image {y} appears twice")));
            }
        }
        Ok(Permutation {
            forward,
            inverse: OnceLock::new(),
        })
    }

    pub fn identity(m: usize) -> Self {
        Permutation {
            forward: (1..=m).collect(),
            inverse: OnceLock::new(),
        }
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut forward: Vec<usize> = (1..=m).collect();
        forward.shuffle(rng);
        Permutation {
            forward,
            inverse: OnceLock::new(),
        }
    }

    /// Cyclic shift `x ↦ x mod M + 1`.
    pub fn cycle(m: usize) -> Self {
        Permutation {
            forward: (1..=m).map(|x| x % m + 1).collect(),
            inverse: OnceLock::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.forward.len()
    }

    /// `π(x)` for a 1-based label. Panics outside `[1, M]`.
    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.forward[x - 1]
    }

    /// `π⁻¹(y)`, materialising the inverse table on first call.
    pub fn apply_inverse(&self, y: usize) -> usize {
        self.inverse_table()[y - 1]
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse_table(&self) -> &[usize] {
        self.inverse.get_or_init(|| {
            let mut inv = vec![0; self.forward.len()];
            for (i, &y) in self.forward.iter().enumerate() {
                inv[y - 1] = i + 1;
            }
            inv
        })
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            forward: self.inverse_table().to_vec(),
            inverse: OnceLock::new(),
        }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.size() != other.size() {
            return Err(Error::DimensionMismatch(format!(
                "composing permutations of sizes {} and {}",
                self.size(),
                other.size()
            )));
        }
        Ok(Permutation {
            forward: other.forward.iter().map(|&x| self.apply(x)).collect(),
            inverse: OnceLock::new(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &y)| y == i + 1)
    }

    /// Multiplicative order (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        self.cycle_lengths()
            .into_iter()
            .fold(1u64, |acc, len| lcm(acc, len as u64))
    }

    /// Lengths of all cycles, fixed points included, in order of their
    /// smallest element.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let m = self.size();
        let mut seen = vec![false; m];
        let mut lengths = Vec::new();
        for start in 1..=m {
            if seen[start - 1] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x - 1] {
                seen[x - 1] = true;
                x = self.apply(x);
                len += 1;
            }
            lengths.push(len);
        }
        lengths
    }

    /// Labels `x` with `π(x) ≠ other(x)`.
    pub fn disagreement(&self, other: &Permutation) -> Vec<usize> {
        (1..=self.size().min(other.size()))
            .filter(|&x| self.apply(x) != other.apply(x))
            .collect()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl Clone for Permutation {
    fn clone(&self) -> Self {
        Permutation {
            forward: self.forward.clone(),
            inverse: OnceLock::new(),
        }
    }
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.forward == other.forward
    }
}

impl Eq for Permutation {}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Permutation")
            .field("forward", &self.forward)
            .finish()
    }
}
