use std::collections::BTreeSet;

use serde::Serialize;

use super::transcript::{is_good, HeavyParams, Transcript};
use crate::error::{Error, Result};
use crate::pcp::{is_even, Buckets, Label, PointerChasingInstance};

/// `8Rbδ ≤ 1/4` and `(1/ε + 4bδ)RN ≤ B/4`.
pub fn check_slack(buckets: &Buckets, rounds: usize, params: &HeavyParams) -> Result<()> {
    let (r, b, n) = (rounds as f64, buckets.b as f64, buckets.big_n as f64);
    let first = 8.0 * r * b * params.delta;
    if first > 0.25 {
        return Err(Error::SlackViolated(format!("8Rbδ = {first} exceeds 1/4")));
    }
    let second = (1.0 / params.epsilon + 4.0 * b * params.delta) * r * n;
    let room = buckets.bucket as f64 / 4.0;
    if second > room {
        return Err(Error::SlackViolated(format!("(1/ε + 4bδ)RN = {second} exceeds B/4 = {room}")));
    }
    Ok(())
}

/// `J_fix = {j : f_{b−1}(j) ∈ Q_{b−1}} ∪ {j : f_b(j) ∈ D_b}`, ascending.
pub fn fixed_indices(yes: &PointerChasingInstance, tr: &Transcript) -> Vec<usize> {
    let b = yes.buckets().b;
    let big_n = yes.buckets().big_n;
    (1..=big_n)
        .filter(|&j| {
            (b >= 2 && tr.committed(b - 1).contains_key(&yes.f(b - 1, j))) || tr.discovered(b).contains(&yes.f(b, j))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct NoTransform {
    #[serde(skip)]
    pub instance: PointerChasingInstance,
    pub fixed: Vec<usize>,
    pub kept: Vec<usize>,
    pub even_added: Vec<usize>,
    pub odd_added: Vec<usize>,
}

/// NO instance agreeing with `yes` on `f_1, …, f_{b−1}` and on `f_b` over
/// `J_fix`, with `N/2` odd labels drawn (smallest first) from `U_b^{(R)}`.
pub fn build_no_instance(yes: &PointerChasingInstance, history: &[Transcript], params: &HeavyParams) -> Result<NoTransform> {
    if yes.label() != Label::Yes {
        return Err(Error::InvalidArgument("the NO transformation starts from a YES instance".into()));
    }
    let tr = history.last().ok_or_else(|| Error::InvalidArgument("empty transcript history".into()))?;
    let bk = *yes.buckets();
    for t in history {
        if t.buckets() != &bk {
            return Err(Error::Transcript("transcript layout differs from the instance".into()));
        }
        if !is_good(t, params) {
            return Err(Error::InvalidArgument(format!("transcript at round {} is bad", t.round())));
        }
    }
    check_slack(&bk, tr.round(), params)?;
    let n = bk.big_n;
    let b = bk.b;
    let fixed = fixed_indices(yes, tr);
    let kept: Vec<usize> = fixed.iter().map(|&j| yes.f(b, j)).collect();
    if 2 * kept.len() > n {
        return Err(Error::Infeasible(format!("|F| = {} exceeds N/2 = {}", kept.len(), n / 2)));
    }
    let pool = tr.unexplored(b);
    let odd_added: Vec<usize> = pool.iter().copied().filter(|&x| !is_even(x)).take(n / 2).collect();
    let even_added: Vec<usize> = pool.iter().copied().filter(|&x| is_even(x)).take(n / 2 - kept.len()).collect();
    if odd_added.len() < n / 2 || even_added.len() < n / 2 - kept.len() {
        return Err(Error::Infeasible("U_b holds too few labels of the needed parity".into()));
    }
    let fresh: BTreeSet<usize> = odd_added.iter().chain(&even_added).copied().collect();
    let mut fresh = fresh.into_iter();
    let fixed_set: BTreeSet<usize> = fixed.iter().copied().collect();
    let last: Vec<usize> = (1..=n)
        .map(|j| {
            if fixed_set.contains(&j) {
                yes.f(b, j)
            } else {
                fresh.next().expect("sizes match")
            }
        })
        .collect();
    let mut bij: Vec<Vec<usize>> = yes.bijections()[..b - 1].to_vec();
    bij.push(last);
    let instance = PointerChasingInstance::from_bijections(bk, bij, Label::No)?;
    Ok(NoTransform { instance, fixed, kept, even_added, odd_added })
}
