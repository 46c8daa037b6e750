use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::{AdaptiveAlgorithm, Oracle, OracleMode};
use crate::error::{Error, Result};
use crate::pcp::{Buckets, PointerChasingInstance};
use crate::qsim::{Permutation, Statevector};

/// Threshold scale `ε` and goodness scale `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeavyParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl HeavyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0 && delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidArgument(format!("ε = {epsilon}, δ = {delta} must lie in (0, 1]")));
        }
        Ok(HeavyParams { epsilon, delta })
    }

    /// `ε = 1/(10⁴ q b²)`, `δ = 1/(64 b²)`.
    pub fn defaults(q: usize, b: usize) -> Self {
        let b2 = (b * b) as f64;
        HeavyParams {
            epsilon: 1.0 / (1e4 * q as f64 * b2),
            delta: 1.0 / (64.0 * b2),
        }
    }
}

/// Per-register Born marginals of the query registers, by label.
fn query_marginals(state: &Statevector, q: usize) -> Result<Vec<Vec<f64>>> {
    (0..q).map(|j| state.marginal(&super::query_register(j))).collect()
}

/// `⟨ψ|Π_{[lo,hi]}^{(j)}|ψ⟩`.
pub fn query_mass(state: &Statevector, bucket: (usize, usize), j: usize) -> Result<f64> {
    let p = state.marginal(&super::query_register(j))?;
    let hi = bucket.1.min(p.len());
    Ok(if bucket.0 == 0 || bucket.0 > hi { 0.0 } else { p[bucket.0 - 1..hi].iter().sum() })
}

/// `H_i = {x ∈ I_i : μ_i(x) ≥ ε/N}` with `μ_i = 0` when `p_i = 0`.
pub fn heavy_set(state: &Statevector, buckets: &Buckets, i: usize, q: usize, params: &HeavyParams) -> Result<Vec<usize>> {
    let marg = query_marginals(state, q)?;
    Ok(heavy_from_marginals(&marg, buckets, i, params))
}

fn heavy_from_marginals(marg: &[Vec<f64>], buckets: &Buckets, i: usize, params: &HeavyParams) -> Vec<usize> {
    let mass = |x: usize| -> f64 { marg.iter().map(|p| p.get(x - 1).copied().unwrap_or(0.0)).sum() };
    let p_i: f64 = buckets.labels(i).map(mass).sum();
    if p_i <= 0.0 {
        return Vec::new();
    }
    // relative slack so exact ties survive rounding
    let threshold = params.epsilon / buckets.big_n as f64 * (1.0 - 1e-12);
    buckets.labels(i).filter(|&x| mass(x) / p_i >= threshold).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BucketSets {
    pub discovered: BTreeSet<usize>,
    /// `x ↦ π(x)` for `x ∈ Q_i`.
    pub committed: BTreeMap<usize, usize>,
    pub unexplored: BTreeSet<usize>,
}

impl BucketSets {
    pub fn frontier(&self) -> BTreeSet<usize> {
        self.discovered
            .iter()
            .filter(|x| !self.committed.contains_key(x))
            .copied()
            .collect()
    }

    pub fn excluded(&self, lo: usize, hi: usize) -> BTreeSet<usize> {
        (lo..=hi)
            .filter(|x| !self.unexplored.contains(x) && !self.discovered.contains(x))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    round: usize,
    buckets: Buckets,
    sets: Vec<BucketSets>,
    heavy: Vec<Vec<usize>>,
}

impl Transcript {
    pub fn initial(buckets: &Buckets) -> Self {
        let mut sets = vec![BucketSets::default(); buckets.b];
        sets[0].discovered = (1..=buckets.big_n).collect();
        for (k, s) in sets.iter_mut().enumerate().skip(1) {
            s.unexplored = buckets.labels(k + 1).collect();
        }
        Transcript { round: 0, buckets: *buckets, sets, heavy: vec![Vec::new(); buckets.b] }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn buckets(&self) -> &Buckets {
        &self.buckets
    }

    /// Sets of bucket `i`, `1 ≤ i ≤ b`.
    pub fn bucket(&self, i: usize) -> &BucketSets {
        &self.sets[i - 1]
    }

    pub fn bucket_mut(&mut self, i: usize) -> &mut BucketSets {
        &mut self.sets[i - 1]
    }

    /// Heavy sets that produced this round (empty at round 0).
    pub fn heavy(&self, i: usize) -> &[usize] {
        &self.heavy[i - 1]
    }

    pub fn discovered(&self, i: usize) -> &BTreeSet<usize> {
        &self.sets[i - 1].discovered
    }

    pub fn committed(&self, i: usize) -> &BTreeMap<usize, usize> {
        &self.sets[i - 1].committed
    }

    pub fn frontier(&self, i: usize) -> BTreeSet<usize> {
        self.sets[i - 1].frontier()
    }

    pub fn unexplored(&self, i: usize) -> &BTreeSet<usize> {
        &self.sets[i - 1].unexplored
    }

    pub fn excluded(&self, i: usize) -> BTreeSet<usize> {
        let (lo, hi) = self.buckets.interval(i);
        self.sets[i - 1].excluded(lo, hi)
    }

    /// `I_i = Q_i ⊔ F_i ⊔ U_i ⊔ E_i`, `Q_i ⊆ D_i ⊆ I_i`, `U_i ⊆ I_i ∖ D_i`,
    /// and committed values are injective.
    pub fn check_partition(&self) -> Result<()> {
        let mut images = BTreeSet::new();
        for i in 1..=self.buckets.b {
            let (lo, hi) = self.buckets.interval(i);
            let s = &self.sets[i - 1];
            let inside = |x: &usize| (lo..=hi).contains(x);
            if !s.discovered.iter().all(inside) || !s.unexplored.iter().all(inside) {
                return Err(Error::Transcript(format!("bucket {i}: sets leave I_{i}")));
            }
            if s.committed.keys().any(|x| !s.discovered.contains(x)) {
                return Err(Error::Transcript(format!("bucket {i}: Q ⊄ D")));
            }
            if s.unexplored.iter().any(|x| s.discovered.contains(x)) {
                return Err(Error::Transcript(format!("bucket {i}: U meets D")));
            }
            let total = s.committed.len() + s.frontier().len() + s.unexplored.len() + s.excluded(lo, hi).len();
            if total != hi - lo + 1 {
                return Err(Error::Transcript(format!("bucket {i}: parts cover {total} of {}", hi - lo + 1)));
            }
            for &v in s.committed.values() {
                if !images.insert(v) {
                    return Err(Error::Transcript(format!("committed value {v} repeated")));
                }
            }
        }
        Ok(())
    }

    /// One round of the update rules with heavy sets `heavy[i − 1] = H_i`.
    pub fn update(&self, instance: &PointerChasingInstance, heavy: &[Vec<usize>]) -> Result<Transcript> {
        let bk = &self.buckets;
        if instance.buckets() != bk {
            return Err(Error::Transcript("transcript and instance have different layouts".into()));
        }
        if heavy.len() != bk.b {
            return Err(Error::Transcript(format!("{} heavy sets for b = {}", heavy.len(), bk.b)));
        }
        self.check_partition()?;
        let b = bk.b;
        let pi = instance.perm();
        let heavy_sets: Vec<BTreeSet<usize>> = heavy.iter().map(|h| h.iter().copied().collect()).collect();

        // G_i = H_i ∩ S_i ∩ U_i^{(r−1)}
        let mut hits: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); b];
        for i in 2..=b {
            hits[i - 1] = heavy_sets[i - 1]
                .iter()
                .filter(|x| self.sets[i - 1].unexplored.contains(x) && instance.level_of(**x) == Some(i))
                .copied()
                .collect();
        }
        // P_i from chains of heavy hits at deeper levels
        let mut path: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); b];
        for k in 2..=b {
            for &g in &hits[k - 1] {
                let chain = instance.chain(g)?;
                for (offset, &z) in chain.iter().enumerate().skip(1) {
                    path[k - offset - 1].insert(z);
                }
            }
        }

        let mut next = self.clone();
        next.round = self.round + 1;
        next.heavy = heavy_sets.iter().map(|h| h.iter().copied().collect()).collect();
        next.sets[0].committed = (1..=bk.big_n).map(|j| (j, pi.apply(j))).collect();
        for i in 2..=b {
            let old = &self.sets[i - 1];
            let mut q: BTreeSet<usize> = old.committed.keys().copied().collect();
            q.extend(&old.discovered);
            q.extend(&hits[i - 1]);
            q.extend(&path[i - 1]);
            next.sets[i - 1].committed = q.into_iter().map(|x| (x, pi.apply(x))).collect();
        }
        for i in 2..=b {
            let mut d = self.sets[i - 1].discovered.clone();
            d.extend(&hits[i - 1]);
            d.extend(&path[i - 1]);
            d.extend(next.sets[i - 2].committed.values().copied());
            let u: BTreeSet<usize> = self.sets[i - 1]
                .unexplored
                .iter()
                .filter(|x| !heavy_sets[i - 1].contains(x) && !d.contains(x))
                .copied()
                .collect();
            next.sets[i - 1].discovered = d;
            next.sets[i - 1].unexplored = u;
        }
        next.check_partition()?;
        Ok(next)
    }

    /// `key=value` lines for this round, sorted sets, `x:π(x)` commitments.
    pub fn dump(&self, params: &HeavyParams) -> String {
        let mut s = String::new();
        let r = self.round;
        let _ = writeln!(s, "r={r} good={}", is_good(self, params));
        for i in 1..=self.buckets.b {
            let st = &self.sets[i - 1];
            let _ = writeln!(s, "r={r} i={i} H={}", join(self.heavy(i).iter()));
            let _ = writeln!(s, "r={r} i={i} D={}", join(st.discovered.iter()));
            let q: Vec<String> = st.committed.iter().map(|(x, v)| format!("{x}:{v}")).collect();
            let _ = writeln!(s, "r={r} i={i} Q={}", q.join(","));
            let _ = writeln!(s, "r={r} i={i} F={}", join(st.frontier().iter()));
            let _ = writeln!(s, "r={r} i={i} U={}", join(st.unexplored.iter()));
            let _ = writeln!(s, "r={r} i={i} E={}", join(self.excluded(i).iter()));
        }
        s
    }
}

fn join<'a, I: Iterator<Item = &'a usize>>(it: I) -> String {
    it.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Parsed transcript dump: line key (everything left of the value) to value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranscriptDump {
    pub entries: BTreeMap<String, String>,
}

impl TranscriptDump {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.rsplit_once('=').ok_or_else(|| Error::Parse {
                line: k + 1,
                message: "missing `=`".into(),
            })?;
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Parse { line: k + 1, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(TranscriptDump { entries })
    }

    /// Keys whose values differ or that appear on one side only.
    pub fn diff(&self, other: &TranscriptDump) -> Vec<String> {
        let keys: BTreeSet<&String> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .filter_map(|k| {
                let (a, b) = (self.entries.get(k), other.entries.get(k));
                (a != b).then(|| {
                    format!(
                        "{k}: {} | {}",
                        a.map_or("<missing>", String::as_str),
                        b.map_or("<missing>", String::as_str)
                    )
                })
            })
            .collect()
    }
}

/// `f^{(r)}`: ascending frontier points paired with ascending free targets
/// `[N] ∖ π(Q_b)`.
pub fn root_function(tr: &Transcript) -> Result<Vec<(usize, usize)>> {
    let bk = tr.buckets();
    let mut frontier: Vec<usize> = (1..=bk.b).flat_map(|i| tr.frontier(i)).collect();
    frontier.sort_unstable();
    let used: BTreeSet<usize> = tr.committed(bk.b).values().copied().collect();
    let targets: Vec<usize> = (1..=bk.big_n).filter(|j| !used.contains(j)).collect();
    if frontier.len() != targets.len() {
        return Err(Error::Transcript(format!(
            "{} frontier points for {} free targets",
            frontier.len(),
            targets.len()
        )));
    }
    Ok(frontier.into_iter().zip(targets).collect())
}

/// `π̃_r`: committed values on `Q`, the root function on `F`, identity elsewhere.
pub fn canonical_completion(tr: &Transcript) -> Result<Permutation> {
    let bk = tr.buckets();
    let mut forward: Vec<usize> = (1..=bk.m).collect();
    let mut assigned = vec![false; bk.m + 1];
    let mut set = |x: usize, v: usize, forward: &mut Vec<usize>| -> Result<()> {
        if std::mem::replace(&mut assigned[x], true) {
            return Err(Error::Transcript(format!("completion branches overlap at {x}")));
        }
        forward[x - 1] = v;
        Ok(())
    };
    for i in 1..=bk.b {
        for (&x, &v) in tr.committed(i) {
            set(x, v, &mut forward)?;
        }
    }
    for (x, v) in root_function(tr)? {
        set(x, v, &mut forward)?;
    }
    Permutation::new(forward).map_err(|e| Error::Transcript(format!("completion is not a permutation: {e}")))
}

/// `|D_i| ≤ 4rbδN` for `i ≥ r+2` and `|Q_i| ≤ 4rbδN` for `i ≥ r+1`.
pub fn is_good(tr: &Transcript, params: &HeavyParams) -> bool {
    let bk = tr.buckets();
    let r = tr.round();
    let cap = 4.0 * r as f64 * bk.b as f64 * params.delta * bk.big_n as f64;
    let d_ok = (r + 2..=bk.b).all(|i| tr.discovered(i).len() as f64 <= cap);
    let q_ok = (r + 1..=bk.b).all(|i| tr.committed(i).len() as f64 <= cap);
    d_ok && q_ok
}

/// Everything produced by running the transcript machinery alongside an
/// algorithm on one instance.
#[derive(Clone, Debug)]
pub struct TranscriptRun {
    pub transcripts: Vec<Transcript>,
    pub completions: Vec<Permutation>,
    /// `ψ′_0, …, ψ′_R`.
    pub canonical: Vec<Statevector>,
    /// `ψ_0^π, …, ψ_R^π`.
    pub real: Vec<Statevector>,
}

impl TranscriptRun {
    pub fn last(&self) -> &Transcript {
        self.transcripts.last().expect("round 0 is always present")
    }

    pub fn all_good(&self, params: &HeavyParams) -> bool {
        self.transcripts.iter().all(|t| is_good(t, params))
    }

    pub fn dump(&self, params: &HeavyParams) -> String {
        self.transcripts.iter().map(|t| t.dump(params)).collect()
    }

    /// Points where `π` and `π̃_t` differ outside `∪(S_i^{(t)} ∖ H_i^{(t)})`.
    pub fn uncontained_disagreements(&self, instance: &PointerChasingInstance, t: usize) -> Vec<usize> {
        let tr = &self.transcripts[t];
        let prev = &self.transcripts[t - 1];
        self.completions[t]
            .disagreement(instance.perm())
            .into_iter()
            .filter(|&x| {
                let Some(i) = instance.level_of(x) else { return true };
                let undiscovered = prev.unexplored(i).contains(&x);
                let heavy = tr.heavy(i).contains(&x);
                !(undiscovered && !heavy)
            })
            .collect()
    }
}

/// Runs rounds `1..=R`: heavy sets from `ψ′_{r−1}`, transcript update, the
/// completion `π̃_r`, then `ψ′_r = U_r O_{π̃_r}^{⊗q} ψ′_{r−1}`.
pub fn run_transcripts(
    alg: &AdaptiveAlgorithm,
    instance: &PointerChasingInstance,
    mode: OracleMode,
    witness: u64,
    params: &HeavyParams,
) -> Result<TranscriptRun> {
    let bk = instance.buckets();
    if alg.query_dim() < bk.m {
        return Err(Error::DimensionMismatch(format!(
            "query registers of dimension {} cannot hold [M] with M = {}",
            alg.query_dim(),
            bk.m
        )));
    }
    let rounds = alg.rounds();
    let mut tr = Transcript::initial(bk);
    let mut completion = canonical_completion(&tr)?;
    let mut psi = alg.initial_state(witness)?;
    alg.apply_unitary(0, &mut psi)?;
    let mut run = TranscriptRun {
        transcripts: vec![tr.clone()],
        completions: vec![completion.clone()],
        canonical: vec![psi.clone()],
        real: Vec::new(),
    };
    for r in 1..=rounds {
        let marg = query_marginals(&psi, alg.q())?;
        let heavy: Vec<Vec<usize>> = (1..=bk.b).map(|i| heavy_from_marginals(&marg, bk, i, params)).collect();
        tr = tr.update(instance, &heavy)?;
        completion = canonical_completion(&tr)?;
        alg.apply_oracle(Oracle::for_mode(mode, &completion), &mut psi)?;
        alg.apply_unitary(r, &mut psi)?;
        run.transcripts.push(tr.clone());
        run.completions.push(completion.clone());
        run.canonical.push(psi.clone());
    }
    let oracles = vec![Oracle::for_mode(mode, instance.perm()); rounds];
    run.real = alg.run_with(&oracles, witness)?;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive::Gate;
    use crate::pcp::{bucket_layout, sample_yes, Label};
    use crate::qsim::C64;
    use crate::rng::seeded;

    fn tiny_b3() -> PointerChasingInstance {
        // N = 2, M = 16, B = 6: I_2 = [3, 8], I_3 = [9, 14], junk {15, 16}
        let b = bucket_layout(1, 4, 3).unwrap();
        PointerChasingInstance::from_bijections(b, vec![vec![1, 2], vec![5, 3], vec![12, 10]], Label::Yes).unwrap()
    }

    fn none(b: usize) -> Vec<Vec<usize>> {
        vec![Vec::new(); b]
    }

    #[test]
    fn initial_transcript() {
        let inst = tiny_b3();
        let t = Transcript::initial(inst.buckets());
        t.check_partition().unwrap();
        assert_eq!(t.frontier(1), (1..=2).collect());
        assert!(t.committed(1).is_empty());
        assert_eq!(t.unexplored(2).len(), 6);
        assert!(is_good(&t, &HeavyParams::defaults(1, 3)));
    }

    #[test]
    fn first_round_without_heavy_points_discovers_level_two() {
        let inst = tiny_b3();
        let t1 = Transcript::initial(inst.buckets()).update(&inst, &none(3)).unwrap();
        assert_eq!(t1.discovered(2), &[3, 5].into_iter().collect());
        assert_eq!(t1.unexplored(2), &[4, 6, 7, 8].into_iter().collect());
        assert_eq!(t1.committed(1).get(&1), Some(&5));
        assert!(t1.committed(2).is_empty());
        assert_eq!(t1.frontier(2), [3, 5].into_iter().collect());
        // idempotent second pass with the same (empty) heavy sets at the next round
        let t2 = t1.update(&inst, &none(3)).unwrap();
        assert_eq!(t2.committed(2).len(), 2);
        assert_eq!(t2.discovered(3), &[10, 12].into_iter().collect());
    }

    #[test]
    fn heavy_hit_commits_its_chain() {
        let inst = tiny_b3();
        let mut heavy = none(3);
        heavy[2] = vec![12, 13];
        let t1 = Transcript::initial(inst.buckets()).update(&inst, &heavy).unwrap();
        assert!(t1.committed(3).contains_key(&12));
        assert!(t1.committed(2).contains_key(&5));
        assert_eq!(t1.committed(3)[&12], 1);
        // 13 is heavy but off-chain: excluded
        assert!(t1.excluded(3).contains(&13));
        let f: Vec<(usize, usize)> = root_function(&t1).unwrap();
        assert_eq!(f, vec![(3, 2)]);
        let c = canonical_completion(&t1).unwrap();
        assert_eq!((c.apply(1), c.apply(5), c.apply(12), c.apply(3), c.apply(2)), (5, 12, 1, 2, 3));
    }

    #[test]
    fn round_zero_completion() {
        let inst = tiny_b3();
        let t = Transcript::initial(inst.buckets());
        assert_eq!(root_function(&t).unwrap(), vec![(1, 1), (2, 2)]);
        assert!(canonical_completion(&t).unwrap().is_identity());
    }

    #[test]
    fn sort_and_pair_rule() {
        let b = bucket_layout(2, 3, 2).unwrap();
        let mut t = Transcript::initial(&b);
        t.bucket_mut(1).discovered = [3].into_iter().collect();
        let two = t.bucket_mut(2);
        two.discovered.extend([5, 7, 9]);
        two.committed.insert(5, 3);
        two.committed.insert(9, 4);
        two.unexplored.retain(|x| ![5, 7, 9].contains(x));
        assert_eq!(t.frontier(1).len() + t.frontier(2).len(), 2);
        assert_eq!(root_function(&t).unwrap(), vec![(3, 1), (7, 2)]);
        t.bucket_mut(1).discovered.clear();
        assert!(root_function(&t).is_err());
    }

    #[test]
    fn fully_committed_completion_is_the_permutation() {
        let inst = tiny_b3();
        let mut t = Transcript::initial(inst.buckets());
        for _ in 0..3 {
            t = t.update(&inst, &none(3)).unwrap();
        }
        assert_eq!(canonical_completion(&t).unwrap(), *inst.perm());
    }

    #[test]
    fn goodness_thresholds() {
        let inst = tiny_b3();
        let p = HeavyParams::new(0.5, 0.01).unwrap();
        let mut heavy = none(3);
        heavy[2] = vec![10, 12];
        let t1 = Transcript::initial(inst.buckets()).update(&inst, &heavy).unwrap();
        assert_eq!(t1.committed(3).len(), 2);
        assert!(!is_good(&t1, &p));
        let mut bigger = t1.clone();
        bigger.bucket_mut(3).discovered.insert(9);
        assert!(!is_good(&bigger, &p));
        let lax = HeavyParams::new(0.5, 1.0).unwrap();
        assert!(is_good(&t1, &lax));
    }

    #[test]
    fn masses_and_heavy_sets() {
        let b = bucket_layout(1, 4, 3).unwrap();
        let regs = [("q0", 16)];
        let basis = Statevector::basis(&regs, &[4]).unwrap();
        assert_eq!(query_mass(&basis, b.interval(2), 0).unwrap(), 1.0);
        assert_eq!(query_mass(&basis, b.interval(3), 0).unwrap(), 0.0);
        let p = HeavyParams::defaults(1, 3);
        assert_eq!(heavy_set(&basis, &b, 2, 1, &p).unwrap(), vec![5]);
        assert!(heavy_set(&basis, &b, 3, 1, &p).unwrap().is_empty());
        let labels: Vec<usize> = vec![3, 4, 9, 10];
        let u = Statevector::uniform_labels("q0", 16, &labels).unwrap();
        assert!((query_mass(&u, b.interval(2), 0).unwrap() - 0.5).abs() < 1e-12);
        let total: f64 = (1..=3).map(|i| query_mass(&u, b.interval(i), 0).unwrap()).sum::<f64>()
            + query_mass(&u, (15, 16), 0).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
        let wide = Statevector::uniform_labels("q0", 16, &[3, 4, 5, 6]).unwrap();
        let eps = HeavyParams::new(0.4, 0.1).unwrap();
        assert_eq!(heavy_set(&wide, &b, 2, 1, &eps).unwrap(), vec![3, 4, 5, 6]);
    }

    #[test]
    fn dump_round_trips_and_diffs() {
        let inst = tiny_b3();
        let p = HeavyParams::defaults(1, 3);
        let t1 = Transcript::initial(inst.buckets()).update(&inst, &none(3)).unwrap();
        let text = t1.dump(&p);
        assert!(text.contains("r=1 i=2 D=3,5\n"));
        let d = TranscriptDump::parse(&text).unwrap();
        assert!(d.diff(&d).is_empty());
        let mut heavy = none(3);
        heavy[2] = vec![12];
        let other = TranscriptDump::parse(&Transcript::initial(inst.buckets()).update(&inst, &heavy).unwrap().dump(&p)).unwrap();
        assert!(!d.diff(&other).is_empty());
    }

    #[test]
    fn run_transcripts_on_sampled_instance() {
        let b = bucket_layout(1, 4, 3).unwrap();
        let mut rng = seeded(4);
        let inst = sample_yes(&b, &mut rng).unwrap();
        let prep: Vec<usize> = (0..16).map(|k| (k + 8) % 16).collect();
        let h = crate::qsim::dense::hadamard();
        let alg = AdaptiveAlgorithm::new(
            1,
            16,
            None,
            0,
            1,
            vec![vec![Gate::map(&["q0"], prep), Gate::bits(h, "q0", &[0])], vec![]],
        )
        .unwrap();
        let params = HeavyParams::defaults(1, 3);
        let run = run_transcripts(&alg, &inst, OracleMode::InPlace, 0, &params).unwrap();
        assert_eq!(run.transcripts.len(), 2);
        assert_eq!(run.last().heavy(3), &[9, 10]);
        for t in 1..run.transcripts.len() {
            assert!(run.uncontained_disagreements(&inst, t).is_empty());
        }
        let overlap: C64 = run.real[0].inner(&run.canonical[0]).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }
}
