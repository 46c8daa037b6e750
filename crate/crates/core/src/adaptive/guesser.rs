use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use serde::Serialize;

use super::{query_register, AdaptiveAlgorithm, Oracle};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GuesserRun {
    pub witness: u64,
    /// Accumulated query outcomes as query-register basis indices.
    pub pairs: BTreeSet<usize>,
    pub draws: Vec<usize>,
}

/// Zero-query guesser: random witness, then `l` times pick `j ∈ [0, r−1]`,
/// run `U_j O_S … O_S U_0` with the accumulated set `S`, measure a query
/// register and add the outcome to `S`.
pub fn guesser<R: Rng + ?Sized>(alg: &AdaptiveAlgorithm, l: usize, rng: &mut R) -> Result<GuesserRun> {
    let r = alg.rounds();
    if l > 0 && r == 0 {
        return Err(Error::InvalidArgument("the guesser needs at least one query round".into()));
    }
    if alg.answer_dim() != Some(2) {
        return Err(Error::InvalidArgument("the guesser needs one answer qubit per query".into()));
    }
    let witness = if alg.witness_bits() == 0 { 0 } else { rng.random_range(0..1u64 << alg.witness_bits()) };
    let mut set: HashSet<usize> = HashSet::new();
    let mut draws = Vec::with_capacity(l);
    for _ in 0..l {
        let j = rng.random_range(0..r);
        let mut psi = alg.initial_state(witness)?;
        alg.apply_unitary(0, &mut psi)?;
        for t in 1..=j {
            alg.apply_oracle(Oracle::Membership(&set), &mut psi)?;
            alg.apply_unitary(t, &mut psi)?;
        }
        let reg = query_register(if alg.q() == 1 { 0 } else { rng.random_range(0..alg.q()) });
        let (k, _) = psi.measure(&reg, rng)?;
        draws.push(k);
        set.insert(k);
    }
    Ok(GuesserRun { witness, pairs: set.into_iter().collect(), draws })
}

/// `2^{−w} (δ² / (16 Q²))^l`.
pub fn guesser_lower_bound(w: u32, delta: f64, queries: usize, l: usize) -> f64 {
    let per = delta * delta / (16.0 * (queries * queries) as f64);
    2f64.powi(-(w as i32)) * per.powi(l as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive::Gate;
    use crate::rng::seeded;

    fn fixed_query(k0: usize) -> AdaptiveAlgorithm {
        let table: Vec<usize> = (0..16).map(|k| (k + k0) % 16).collect();
        let back: Vec<usize> = (0..16).map(|k| (k + 16 - k0) % 16).collect();
        let fwd = table.clone();
        AdaptiveAlgorithm::new(
            1,
            16,
            Some(2),
            1,
            1,
            vec![
                vec![Gate::map(&["q0"], table)],
                vec![Gate::map(&["q0"], back), Gate::map(&["q0"], fwd)],
                vec![],
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_iterations() {
        let run = guesser(&fixed_query(5), 0, &mut seeded(1)).unwrap();
        assert!(run.pairs.is_empty());
    }

    #[test]
    fn deterministic_query() {
        let mut rng = seeded(2);
        for _ in 0..20 {
            let run = guesser(&fixed_query(5), 4, &mut rng).unwrap();
            assert_eq!(run.pairs, [5].into_iter().collect());
        }
    }

    #[test]
    fn bound_formula() {
        assert_eq!(guesser_lower_bound(0, 1.0, 1, 0), 1.0);
        assert!((guesser_lower_bound(1, 1.0, 2, 2) - 0.5 / 4096.0).abs() < 1e-15);
    }
}
