use proptest::prelude::*;
use qmalab::adaptive::{build_no_instance, check_slack, run_transcripts, HeavyParams, OracleMode, TranscriptDump};
use qmalab::pcp::{bucket_layout, sample_yes, Classification};
use qmalab::qsim::Permutation;
use qmalab::rng::seeded;
use qmalab::workloads::{random_algorithm, AlgorithmKind, AlgorithmShape};
use rand::Rng;

fn kind(k: u8) -> AlgorithmKind {
    [AlgorithmKind::Haar, AlgorithmKind::Sparse, AlgorithmKind::Chasing][k as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn completions_respect_commitments(seed in any::<u64>(), k in 0u8..3, xor in any::<bool>(), eps in 0.15f64..0.6) {
        let bk = bucket_layout(1, 4, 3).unwrap();
        let mut rng = seeded(seed);
        let inst = sample_yes(&bk, &mut rng).unwrap();
        let mode = if xor { OracleMode::Xor } else { OracleMode::InPlace };
        let shape = AlgorithmShape {
            q: rng.random_range(1..=2),
            rounds: rng.random_range(0..=1),
            query_dim: bk.m,
            answer_dim: xor.then_some(bk.m),
            witness_bits: 1,
            support: 3,
        };
        let alg = random_algorithm(kind(k), shape, &mut rng).unwrap();
        let params = HeavyParams::new(eps, HeavyParams::defaults(shape.q, bk.b).delta).unwrap();
        let run = run_transcripts(&alg, &inst, mode, 1, &params).unwrap();
        prop_assert_eq!(run.transcripts.len(), shape.rounds + 1);
        for (tr, comp) in run.transcripts.iter().zip(&run.completions) {
            tr.check_partition().unwrap();
            prop_assert!(Permutation::new(comp.forward().to_vec()).is_ok());
            for i in 1..=bk.b {
                for (&x, &y) in tr.committed(i) {
                    prop_assert_eq!(comp.apply(x), y);
                    prop_assert_eq!(inst.perm().apply(x), y);
                }
            }
            for x in 1..=bk.m {
                if inst.perm().apply(x) == x {
                    prop_assert_eq!(comp.apply(x), x);
                }
            }
        }
        let dump = run.dump(&params);
        let parsed = TranscriptDump::parse(&dump).unwrap();
        prop_assert!(parsed.diff(&TranscriptDump::parse(&dump).unwrap()).is_empty());
    }

    #[test]
    fn no_transform_keeps_transcripts(seed in any::<u64>(), k in 0u8..3) {
        let bk = bucket_layout(1, 7, 3).unwrap();
        let mut rng = seeded(seed);
        let inst = sample_yes(&bk, &mut rng).unwrap();
        let shape = AlgorithmShape { q: 1, rounds: 1, query_dim: bk.m, answer_dim: None, witness_bits: 0, support: 2 };
        let alg = random_algorithm(kind(k), shape, &mut rng).unwrap();
        let params = HeavyParams::new(0.5, HeavyParams::defaults(1, bk.b).delta).unwrap();
        prop_assume!(check_slack(&bk, 1, &params).is_ok());
        let run = run_transcripts(&alg, &inst, OracleMode::InPlace, 0, &params).unwrap();
        prop_assume!(run.all_good(&params));
        let out = build_no_instance(&inst, &run.transcripts, &params).unwrap();
        prop_assert_eq!(out.instance.classify(), Classification::No);
        let again = run_transcripts(&alg, &out.instance, OracleMode::InPlace, 0, &params).unwrap();
        prop_assert_eq!(again.dump(&params), run.dump(&params));
    }
}
