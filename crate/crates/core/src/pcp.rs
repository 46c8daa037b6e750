//! Permutation pointer-chasing instances.
//!
//! The domain `[M]` is split into buckets `I_1 = [N]`, `I_2, …, I_b` of size
//! `B` and a junk tail. An instance picks `N`-element level sets `S_i ⊆ I_i`
//! with bijections `f_i : [N] → S_i` and assembles the permutation
//! `f_i(j) ↦ f_{i+1}(j)`, `f_b(j) ↦ j`, fixing every other point.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{Permutation, Statevector};

pub const WITNESS_REGISTER: &str = "w";

pub fn is_even(label: usize) -> bool {
    label.is_multiple_of(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Buckets {
    pub n: u32,
    pub l: u32,
    pub b: usize,
    pub big_n: usize,
    pub m: usize,
    pub bucket: usize,
}

pub fn bucket_layout(n: u32, l: u32, b: usize) -> Result<Buckets> {
    if n == 0 || l == 0 {
        return Err(Error::Infeasible(format!("n = {n} and l = {l} must be positive")));
    }
    if b < 2 {
        return Err(Error::Infeasible(format!("chain length b = {b} must be at least 2")));
    }
    let bits = n.checked_mul(l).filter(|&x| x < 48).ok_or_else(|| {
        Error::Infeasible(format!("M = 2^{} does not fit the simulator", n as u64 * l as u64))
    })?;
    let big_n = 1usize << n;
    let m = 1usize << bits;
    let bucket = 2 * ((m - big_n) / (2 * (b - 1)));
    if bucket < 2 * big_n {
        return Err(Error::Infeasible(format!(
            "bucket size B = {bucket} is below 2N = {} for (n, l, b) = ({n}, {l}, {b})",
            2 * big_n
        )));
    }
    debug_assert!(big_n + (b - 1) * bucket <= m);
    Ok(Buckets { n, l, b, big_n, m, bucket })
}

impl Buckets {
    /// `(lo, hi)` of `I_i`, inclusive, for `1 ≤ i ≤ b`.
    pub fn interval(&self, i: usize) -> (usize, usize) {
        assert!((1..=self.b).contains(&i), "bucket {i} outside 1..={}", self.b);
        if i == 1 {
            (1, self.big_n)
        } else {
            (
                self.big_n + (i - 2) * self.bucket + 1,
                self.big_n + (i - 1) * self.bucket,
            )
        }
    }

    pub fn labels(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        let (lo, hi) = self.interval(i);
        lo..=hi
    }

    /// Bucket index of `x`, or `None` for junk.
    pub fn bucket_of(&self, x: usize) -> Option<usize> {
        if x == 0 || x > self.m {
            None
        } else if x <= self.big_n {
            Some(1)
        } else {
            let k = (x - self.big_n - 1) / self.bucket + 2;
            (k <= self.b).then_some(k)
        }
    }

    pub fn junk_size(&self) -> usize {
        self.m - self.big_n - (self.b - 1) * self.bucket
    }

    pub fn even_labels(&self, i: usize) -> Vec<usize> {
        self.labels(i).filter(|&x| is_even(x)).collect()
    }

    pub fn odd_labels(&self, i: usize) -> Vec<usize> {
        self.labels(i).filter(|&x| !is_even(x)).collect()
    }

    /// Departures from the asymptotic parameter regime (`l ≥ 4`, `b` well
    /// below `√N`). Desk-scale runs ignore these.
    pub fn asymptotic_regime_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.l < 4 {
            v.push(format!("l = {} < 4", self.l));
        }
        if (self.b * self.b) as f64 >= self.big_n as f64 {
            v.push(format!("b = {} is not below N^(1/2) = {}", self.b, (self.big_n as f64).sqrt()));
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Yes,
    No,
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointerChasingInstance {
    buckets: Buckets,
    level_sets: Vec<Vec<usize>>,
    bijections: Vec<Vec<usize>>,
    perm: Permutation,
    label: Label,
}

/// Builds `π` from `f_1, …, f_b` given as arrays with `f[i][j − 1] = f_{i+1}(j)`.
pub fn assemble_permutation(buckets: &Buckets, bijections: &[Vec<usize>]) -> Result<Permutation> {
    let (big_n, b) = (buckets.big_n, buckets.b);
    if bijections.len() != b {
        return Err(Error::InvalidInstance(format!("{} bijections for b = {b}", bijections.len())));
    }
    let mut used = vec![false; buckets.m + 1];
    for (i, f) in bijections.iter().enumerate() {
        if f.len() != big_n {
            return Err(Error::InvalidInstance(format!("f_{} has {} values, N = {big_n}", i + 1, f.len())));
        }
        for (j, &x) in f.iter().enumerate() {
            if i == 0 && x != j + 1 {
                return Err(Error::InvalidInstance("f_1 is not the identity".into()));
            }
            if buckets.bucket_of(x) != Some(i + 1) {
                return Err(Error::InvalidInstance(format!("f_{}({}) = {x} outside I_{}", i + 1, j + 1, i + 1)));
            }
            if std::mem::replace(&mut used[x], true) {
                return Err(Error::InvalidInstance(format!("label {x} hit twice by f_{}", i + 1)));
            }
        }
    }
    let mut forward: Vec<usize> = (1..=buckets.m).collect();
    for j in 0..big_n {
        for i in 0..b {
            let next = if i + 1 < b { bijections[i + 1][j] } else { j + 1 };
            forward[bijections[i][j] - 1] = next;
        }
    }
    Permutation::new(forward)
}

/// Recovers `f_1, …, f_b` from an assembled permutation, checking every branch.
pub fn decompose(buckets: &Buckets, perm: &Permutation) -> Result<Vec<Vec<usize>>> {
    if perm.size() != buckets.m {
        return Err(Error::InvalidInstance(format!("permutation size {} for M = {}", perm.size(), buckets.m)));
    }
    let mut f: Vec<Vec<usize>> = vec![(1..=buckets.big_n).collect()];
    for i in 1..buckets.b {
        let next: Vec<usize> = f[i - 1].iter().map(|&x| perm.apply(x)).collect();
        f.push(next);
    }
    let rebuilt = assemble_permutation(buckets, &f)?;
    if rebuilt != *perm {
        return Err(Error::InvalidInstance("permutation is not a pointer-chasing permutation".into()));
    }
    Ok(f)
}

impl PointerChasingInstance {
    pub fn from_bijections(buckets: Buckets, bijections: Vec<Vec<usize>>, label: Label) -> Result<Self> {
        let perm = assemble_permutation(&buckets, &bijections)?;
        let level_sets = bijections
            .iter()
            .map(|f| {
                let mut s = f.clone();
                s.sort_unstable();
                s
            })
            .collect();
        let inst = PointerChasingInstance { buckets, level_sets, bijections, perm, label };
        match (inst.classify(), label) {
            (Classification::Yes, Label::Yes) | (Classification::No, Label::No) => Ok(inst),
            (c, _) => Err(Error::InvalidInstance(format!("declared {label:?}, classified {c:?}"))),
        }
    }

    pub fn buckets(&self) -> &Buckets {
        &self.buckets
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn label(&self) -> Label {
        self.label
    }

    /// Sorted `S_i`, `1 ≤ i ≤ b`.
    pub fn level_set(&self, i: usize) -> &[usize] {
        &self.level_sets[i - 1]
    }

    /// `f_i(j)`, both 1-based.
    pub fn f(&self, i: usize, j: usize) -> usize {
        self.bijections[i - 1][j - 1]
    }

    pub fn bijection(&self, i: usize) -> &[usize] {
        &self.bijections[i - 1]
    }

    pub fn bijections(&self) -> &[Vec<usize>] {
        &self.bijections
    }

    pub fn last_level(&self) -> &[usize] {
        self.level_set(self.buckets.b)
    }

    pub fn even_count(&self) -> usize {
        self.last_level().iter().filter(|&&x| is_even(x)).count()
    }

    /// `s = |S_b^even| / N`.
    pub fn s(&self) -> f64 {
        self.even_count() as f64 / self.buckets.big_n as f64
    }

    /// Level of `x` if it lies on a chain.
    pub fn level_of(&self, x: usize) -> Option<usize> {
        let i = self.buckets.bucket_of(x)?;
        self.level_sets[i - 1].binary_search(&x).ok().map(|_| i)
    }

    pub fn classify(&self) -> Classification {
        if let Err(e) = self.check_structure() {
            return Classification::Invalid(e.to_string());
        }
        let n = self.buckets.big_n;
        let even = self.even_count();
        if even == n {
            Classification::Yes
        } else if 2 * even <= n {
            Classification::No
        } else {
            Classification::Invalid(format!("{even} of {n} elements of S_b are even, inside the promise gap"))
        }
    }

    fn check_structure(&self) -> Result<()> {
        let rebuilt = assemble_permutation(&self.buckets, &self.bijections)?;
        if rebuilt != self.perm {
            return Err(Error::InvalidInstance("stored permutation disagrees with the bijections".into()));
        }
        for (i, s) in self.level_sets.iter().enumerate() {
            let mut img = self.bijections[i].clone();
            img.sort_unstable();
            if &img != s {
                return Err(Error::InvalidInstance(format!("S_{} is not the image of f_{}", i + 1, i + 1)));
            }
        }
        Ok(())
    }

    /// `|S_b⟩ = |π⁻¹([N])⟩` on an `M`-dimensional register.
    pub fn witness_state(&self) -> Statevector {
        Statevector::uniform_labels(WITNESS_REGISTER, self.buckets.m, self.last_level())
            .expect("level sets are non-empty and inside [M]")
    }

    /// `g, π⁻¹(g), …` down to level 1.
    pub fn chain(&self, g: usize) -> Result<Vec<usize>> {
        let level = self
            .level_of(g)
            .ok_or_else(|| Error::InvalidArgument(format!("label {g} is not on any chain")))?;
        let mut out = Vec::with_capacity(level);
        let mut x = g;
        out.push(x);
        for _ in 1..level {
            x = self.perm.apply_inverse(x);
            out.push(x);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.into_instance()
    }
}

/// On-disk form. The permutation is re-assembled on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct InstanceFile {
    n: u32,
    l: u32,
    b: usize,
    #[serde(rename = "N")]
    big_n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "B")]
    bucket: usize,
    level_sets: Vec<Vec<usize>>,
    bijections: Vec<Vec<usize>>,
    label: Label,
}

impl From<&PointerChasingInstance> for InstanceFile {
    fn from(i: &PointerChasingInstance) -> Self {
        let b = i.buckets;
        InstanceFile {
            n: b.n,
            l: b.l,
            b: b.b,
            big_n: b.big_n,
            m: b.m,
            bucket: b.bucket,
            level_sets: i.level_sets.clone(),
            bijections: i.bijections.clone(),
            label: i.label,
        }
    }
}

impl InstanceFile {
    fn into_instance(self) -> Result<PointerChasingInstance> {
        let buckets = bucket_layout(self.n, self.l, self.b)?;
        if (buckets.big_n, buckets.m, buckets.bucket) != (self.big_n, self.m, self.bucket) {
            return Err(Error::InvalidInstance("stored N, M or B disagree with (n, l, b)".into()));
        }
        let inst = PointerChasingInstance::from_bijections(buckets, self.bijections, self.label)?;
        if inst.level_sets != self.level_sets {
            return Err(Error::InvalidInstance("stored level sets disagree with the bijections".into()));
        }
        Ok(inst)
    }
}

fn random_subset<R: Rng + ?Sized>(pool: &[usize], k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if pool.len() < k {
        return Err(Error::Infeasible(format!("need {k} labels from a pool of {}", pool.len())));
    }
    Ok(index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect())
}

fn middle_levels<R: Rng + ?Sized>(buckets: &Buckets, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    let mut f = vec![(1..=buckets.big_n).collect::<Vec<_>>()];
    for i in 2..buckets.b {
        let pool: Vec<usize> = buckets.labels(i).collect();
        let mut s = random_subset(&pool, buckets.big_n, rng)?;
        s.shuffle(rng);
        f.push(s);
    }
    Ok(f)
}

/// YES sample: `S_b` a uniform `N`-subset of the even labels of `I_b`.
pub fn sample_yes<R: Rng + ?Sized>(buckets: &Buckets, rng: &mut R) -> Result<PointerChasingInstance> {
    sample_with_even_count(buckets, buckets.big_n, rng)
}

/// NO sample with exactly `N/2` even and `N/2` odd labels in `S_b`.
pub fn sample_no<R: Rng + ?Sized>(buckets: &Buckets, rng: &mut R) -> Result<PointerChasingInstance> {
    sample_with_even_count(buckets, buckets.big_n / 2, rng)
}

/// Sample with exactly `even` even labels in `S_b`; the label follows from
/// the count and counts inside the promise gap are rejected.
pub fn sample_with_even_count<R: Rng + ?Sized>(
    buckets: &Buckets,
    even: usize,
    rng: &mut R,
) -> Result<PointerChasingInstance> {
    let n = buckets.big_n;
    let label = if even == n {
        Label::Yes
    } else if 2 * even <= n {
        Label::No
    } else {
        return Err(Error::Infeasible(format!("{even} even of {n} violates the promise")));
    };
    let mut f = middle_levels(buckets, rng)?;
    let b = buckets.b;
    let mut last = random_subset(&buckets.even_labels(b), even, rng)?;
    last.extend(random_subset(&buckets.odd_labels(b), n - even, rng)?);
    last.shuffle(rng);
    f.push(last);
    PointerChasingInstance::from_bijections(*buckets, f, label)
}
