use std::fs;
use std::path::Path;

use qmalab::adaptive::{
    build_no_instance, check_slack, guesser, guesser_lower_bound, hybrid_check, run_transcripts, too_heavy_bound,
    too_heavy_empirical, HeavyParams, OracleMode,
};
use qmalab::hamlab::{
    compile_to_hamiltonian, frustration_free, ground_energy, history_state, kernel_test, parallelize, qpe_energy, sparsity,
    sparsity_bound, ClockCircuit,
};
use qmalab::pcp::{bucket_layout, sample_no, sample_with_even_count, sample_yes, Buckets, Classification, Label, PointerChasingInstance};
use qmalab::qsim::dense::random_vector;
use qmalab::qsim::{Permutation, Statevector};
use qmalab::rng::{trial_rng, LabRng};
use qmalab::verify::{corp_decider, optimal_quantum_witness, qma1_accept, soundness_envelope};
use qmalab::workloads::{
    planted_guesser, pointer_chasing_circuit, pointer_chasing_witness, random_algorithm, random_psd_hamiltonian,
    toy_verifier, toy_verifier_rejecting, toy_witness, AlgorithmKind, AlgorithmShape,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::report::{jnum, num, Report};
use crate::CliError;

/// Runs `f` for every trial on its own stream; rows come back in trial order.
fn trials<T, F>(cfg: &ExperimentConfig, count: u64, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(u64, &mut LabRng) -> qmalab::Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|t| f(t, &mut trial_rng(cfg.seed, &cfg.experiment, t)))
        .collect::<qmalab::Result<Vec<T>>>()
        .map_err(CliError::from)
}

fn layout(cfg: &ExperimentConfig) -> Result<Buckets, CliError> {
    let p = &cfg.instance;
    Ok(bucket_layout(p.n, p.l, p.b)?)
}

fn fixed_instance(cfg: &ExperimentConfig) -> Result<Option<PointerChasingInstance>, CliError> {
    match &cfg.instance.file {
        Some(path) => Ok(Some(PointerChasingInstance::from_json(&fs::read_to_string(path)?)?)),
        None => Ok(None),
    }
}

fn instance_for(fixed: &Option<PointerChasingInstance>, bk: &Buckets, yes: bool, rng: &mut LabRng) -> qmalab::Result<PointerChasingInstance> {
    match fixed {
        Some(inst) => Ok(inst.clone()),
        None if yes => sample_yes(bk, rng),
        None => sample_no(bk, rng),
    }
}

fn params(cfg: &ExperimentConfig, b: usize) -> Result<HeavyParams, CliError> {
    let d = HeavyParams::defaults(cfg.algorithm.q, b);
    Ok(HeavyParams::new(cfg.algorithm.epsilon.unwrap_or(d.epsilon), cfg.algorithm.delta.unwrap_or(d.delta))?)
}

fn mode(cfg: &ExperimentConfig) -> OracleMode {
    if cfg.algorithm.mode == "xor" {
        OracleMode::Xor
    } else {
        OracleMode::InPlace
    }
}

fn kind(cfg: &ExperimentConfig) -> AlgorithmKind {
    match cfg.algorithm.kind.as_str() {
        "sparse" => AlgorithmKind::Sparse,
        "chasing" => AlgorithmKind::Chasing,
        _ => AlgorithmKind::Haar,
    }
}

fn shape(cfg: &ExperimentConfig, bk: &Buckets) -> AlgorithmShape {
    let a = &cfg.algorithm;
    AlgorithmShape {
        q: a.q,
        rounds: a.rounds,
        query_dim: bk.m,
        answer_dim: (mode(cfg) == OracleMode::Xor).then_some(bk.m.next_power_of_two()),
        witness_bits: a.witness_bits,
        support: if a.kind == "chasing" { bk.big_n } else { a.support },
    }
}

fn circuit(cfg: &ExperimentConfig, rng: &mut LabRng) -> Result<(ClockCircuit, Vec<qmalab::qsim::C64>), CliError> {
    let steps = cfg.algorithm.steps;
    Ok(match cfg.circuit.as_str() {
        "toy" => (toy_verifier(steps)?, toy_witness()),
        "toy-reject" => (toy_verifier_rejecting(steps)?, toy_witness()),
        "chasing" => {
            let inst = instance_for(&fixed_instance(cfg)?, &layout(cfg)?, true, rng)?;
            (pointer_chasing_circuit(&inst)?, pointer_chasing_witness(&inst))
        }
        path => {
            let c = ClockCircuit::parse(&fs::read_to_string(path)?, Vec::new())?;
            let mut w = vec![qmalab::qsim::C64::new(0.0, 0.0); 1 << c.witness().len()];
            w[0] = qmalab::qsim::C64::new(1.0, 0.0);
            (c, w)
        }
    })
}

fn write_dump(cfg: &ExperimentConfig, name: &str, text: &str) -> Result<(), CliError> {
    if let Some(dir) = &cfg.dumps {
        fs::create_dir_all(dir)?;
        fs::write(Path::new(dir).join(name), text)?;
    }
    Ok(())
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    match cfg.experiment.as_str() {
        "completeness" => completeness(cfg),
        "soundness-sweep" => soundness_sweep(cfg),
        "hybrid-audit" => hybrid_audit(cfg),
        "transcript-attack" => transcript_attack(cfg),
        "no-transform" => no_transform(cfg),
        "too-heavy" => too_heavy(cfg),
        "corp" => corp(cfg),
        "guesser" => guesser_exp(cfg),
        "compile-ham" => compile_ham(cfg),
        "qpe-bench" => qpe_bench(cfg),
        "kernel-bench" => kernel_bench(cfg),
        "parallelize" => parallel(cfg),
        other => Err(CliError::Config(format!("unknown experiment `{other}`"))),
    }
}

fn completeness(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let bk = layout(cfg)?;
    let fixed = fixed_instance(cfg)?;
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let inst = instance_for(&fixed, &bk, true, rng)?;
        let r = qma1_accept(&inst, &inst.witness_state())?;
        Ok((r.accept, vec![t.to_string(), num(r.p_a), num(r.p_b), num(r.accept)]))
    })?;
    let min = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let mut rep = Report::new(&["trial", "p_a", "p_b", "accept"]);
    rep.set("trials", json!(cfg.trials));
    rep.set("min_accept", jnum(min));
    rep.check((min - 1.0).abs() <= 1e-12, format!("minimum acceptance {} differs from 1", num(min)));
    rep.rows = rows.into_iter().map(|r| r.1).collect();
    Ok(rep)
}

fn soundness_sweep(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let bk = layout(cfg)?;
    let mut rep = Report::new(&["s", "trial", "value", "envelope"]);
    for (k, &s) in cfg.s_values.iter().enumerate() {
        let even = s * bk.big_n as f64;
        if (even - even.round()).abs() > 1e-9 {
            return Err(CliError::Config(format!("s = {s} is not a multiple of 1/N with N = {}", bk.big_n)));
        }
        let even = even.round() as usize;
        let env = soundness_envelope(s);
        let rows = trials(cfg, cfg.trials, |t, _| {
            let mut rng = trial_rng(cfg.seed, &format!("{}/{k}", cfg.experiment), t);
            let inst = sample_with_even_count(&bk, even, &mut rng)?;
            Ok(optimal_quantum_witness(&inst)?.0)
        })?;
        let max = rows.iter().copied().fold(0.0, f64::max);
        rep.set(&format!("max_value[s={}]", num(s)), jnum(max));
        rep.set(&format!("envelope[s={}]", num(s)), jnum(env));
        rep.check(max <= env + 1e-9, format!("s = {}: optimal value {} above envelope {}", num(s), num(max), num(env)));
        rep.rows.extend(rows.iter().enumerate().map(|(t, v)| vec![num(s), t.to_string(), num(*v), num(env)]));
    }
    Ok(rep)
}

fn hybrid_audit(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let m = layout(cfg)?.m;
    let qmax = cfg.algorithm.q;
    if m.pow(qmax as u32) > 1 << 20 {
        return Err(CliError::Budget(format!("{m}^{qmax} amplitudes")));
    }
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let q = rng.random_range(1..=qmax);
        let pi = Permutation::random(m, rng);
        let mut table = pi.forward().to_vec();
        let mut moved: Vec<usize> = (0..m).collect();
        moved.shuffle(rng);
        moved.truncate(rng.random_range(0..=m));
        let mut images: Vec<usize> = moved.iter().map(|&i| table[i]).collect();
        images.shuffle(rng);
        moved.iter().zip(images).for_each(|(&i, y)| table[i] = y);
        let pi2 = Permutation::new(table)?;
        let names: Vec<String> = (0..q).map(|j| format!("q{j}")).collect();
        let regs: Vec<(&str, usize)> = names.iter().map(|n| (n.as_str(), m)).collect();
        let state = Statevector::from_amplitudes(&regs, random_vector(m.pow(q as u32), rng))?;
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let r = hybrid_check(&pi, &pi2, &state, &refs)?;
        Ok((r.lhs - r.rhs, vec![t.to_string(), q.to_string(), num(r.lhs), num(r.rhs)]))
    })?;
    let worst = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let mut rep = Report::new(&["trial", "q", "lhs", "rhs"]);
    rep.set("m", json!(m));
    rep.set("max_lhs_minus_rhs", jnum(worst));
    rep.check(worst <= 1e-9, format!("hybrid bound exceeded by {}", num(worst)));
    rep.rows = rows.into_iter().map(|r| r.1).collect();
    Ok(rep)
}

fn transcript_attack(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let bk = layout(cfg)?;
    let fixed = fixed_instance(cfg)?;
    let p = params(cfg, bk.b)?;
    let sh = shape(cfg, &bk);
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let inst = instance_for(&fixed, &bk, true, rng)?;
        let alg = random_algorithm(kind(cfg), sh, rng)?;
        let w = rng.random_range(0..1u64 << sh.witness_bits);
        let run = run_transcripts(&alg, &inst, mode(cfg), w, &p)?;
        let partition = run.transcripts.iter().all(|tr| tr.check_partition().is_ok());
        let perms = run.completions.iter().all(|c| Permutation::new(c.forward().to_vec()).is_ok());
        let fixed_ok = run
            .completions
            .iter()
            .all(|c| (1..=bk.m).all(|x| inst.perm().apply(x) != x || c.apply(x) == x));
        let committed: usize = (1..=bk.b).map(|i| run.last().committed(i).len()).sum();
        Ok((partition && perms && fixed_ok, run.dump(&p), vec![
            t.to_string(),
            run.all_good(&p).to_string(),
            partition.to_string(),
            perms.to_string(),
            fixed_ok.to_string(),
            committed.to_string(),
        ]))
    })?;
    let mut rep = Report::new(&["trial", "good", "partition", "permutation", "fixed_points", "committed"]);
    let broken = rows.iter().filter(|r| !r.0).count();
    rep.set("rounds", json!(cfg.algorithm.rounds));
    rep.set("good_runs", json!(rows.iter().filter(|r| r.2[1] == "true").count()));
    rep.set("broken_runs", json!(broken));
    rep.check(broken == 0, format!("{broken} runs broke a transcript invariant"));
    for (t, r) in rows.iter().enumerate() {
        write_dump(cfg, &format!("trial-{t}.txt"), &r.1)?;
    }
    rep.rows = rows.into_iter().map(|r| r.2).collect();
    Ok(rep)
}

fn no_transform(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let bk = layout(cfg)?;
    let fixed = fixed_instance(cfg)?;
    let p = params(cfg, bk.b)?;
    let sh = shape(cfg, &bk);
    let slack = check_slack(&bk, sh.rounds, &p).is_ok();
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let yes = instance_for(&fixed, &bk, true, rng)?;
        if yes.label() != Label::Yes {
            return Err(qmalab::Error::InvalidInstance("the NO transform needs a YES instance".into()));
        }
        let alg = random_algorithm(kind(cfg), sh, rng)?;
        let run = run_transcripts(&alg, &yes, mode(cfg), 0, &p)?;
        if !slack || !run.all_good(&p) {
            return Ok((true, None, vec![t.to_string(), "false".into(), String::new(), String::new(), String::new(), String::new()]));
        }
        let out = build_no_instance(&yes, &run.transcripts, &p)?;
        let again = run_transcripts(&alg, &out.instance, mode(cfg), 0, &p)?;
        let (a, b) = (run.dump(&p), again.dump(&p));
        let dist = run.real.last().zip(again.real.last()).map(|(x, y)| x.distance(y)).transpose()?.unwrap_or(0.0);
        let bound = 4.0 * sh.rounds as f64 * (sh.q as f64 * p.epsilon).sqrt();
        let is_no = out.instance.classify() == Classification::No;
        let ok = is_no && a == b && dist <= bound + 1e-9;
        Ok((ok, Some((a, b)), vec![t.to_string(), "true".into(), is_no.to_string(), (run.dump(&p) == again.dump(&p)).to_string(), num(dist), num(bound)]))
    })?;
    let mut rep = Report::new(&["trial", "qualified", "classified_no", "identical", "distance", "bound"]);
    let qualified = rows.iter().filter(|r| r.1.is_some()).count();
    let failed = rows.iter().filter(|r| !r.0).count();
    rep.set("slack_holds", json!(slack));
    rep.set("qualified", json!(qualified));
    rep.set("failed", json!(failed));
    rep.check(failed == 0, format!("{failed} qualifying runs failed the NO transform checks"));
    for (t, r) in rows.iter().enumerate() {
        if let Some((a, b)) = &r.1 {
            write_dump(cfg, &format!("trial-{t}-yes.txt"), a)?;
            write_dump(cfg, &format!("trial-{t}-no.txt"), b)?;
        }
    }
    rep.rows = rows.into_iter().map(|r| r.2).collect();
    Ok(rep)
}

fn too_heavy(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let n = layout(cfg)?.big_n;
    let b = cfg.universe;
    let eps = cfg.algorithm.epsilon.unwrap_or(1.0);
    let delta = cfg.algorithm.delta.unwrap_or(0.5);
    if b < n {
        return Err(CliError::Config(format!("universe {b} smaller than N = {n}")));
    }
    let bound = too_heavy_bound(n, b, eps, delta);
    let heavy = ((n as f64 / eps).floor() as usize).min(b);
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let mut mu = vec![0.0; b];
        let mut slots: Vec<usize> = (0..b).collect();
        slots.shuffle(rng);
        slots[..heavy].iter().for_each(|&s| mu[s] = 1.0 / heavy as f64);
        let est = too_heavy_empirical(n, &mu, eps, delta, cfg.samples as usize, rng)?;
        Ok((est.frequency, vec![t.to_string(), est.heavy_size.to_string(), est.threshold.to_string(), num(est.frequency)]))
    })?;
    let mean = rows.iter().map(|r| r.0).sum::<f64>() / rows.len() as f64;
    let shots = (cfg.samples * cfg.trials) as f64;
    let sigma = (bound.clamp(1e-12, 1.0) * (1.0 - bound.min(1.0)) / shots).sqrt();
    let mut rep = Report::new(&["trial", "heavy_size", "threshold", "frequency"]);
    rep.set("n", json!(n));
    rep.set("universe", json!(b));
    rep.set("bound", jnum(bound));
    rep.set("mean_frequency", jnum(mean));
    rep.set("sigma", jnum(sigma));
    rep.check(bound >= 1.0 || mean <= bound + 3.0 * sigma, format!("frequency {} above bound {}", num(mean), num(bound)));
    rep.rows = rows.into_iter().map(|r| r.1).collect();
    Ok(rep)
}

fn corp(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let bk = layout(cfg)?;
    let fixed = fixed_instance(cfg)?;
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let inst = instance_for(&fixed, &bk, t % 2 == 0, rng)?;
        let r = corp_decider(&inst, rng);
        Ok((inst.label(), r))
    })?;
    let mut rep = Report::new(&["trial", "label", "accept", "start", "end", "queries"]);
    let yes_rejects = rows.iter().filter(|(l, r)| *l == Label::Yes && !r.accept).count();
    let no_total = rows.iter().filter(|(l, _)| *l == Label::No).count();
    let no_accepts = rows.iter().filter(|(l, r)| *l == Label::No && r.accept).count();
    let off = rows.iter().filter(|(_, r)| r.queries != bk.b - 1).count();
    rep.set("yes_rejections", json!(yes_rejects));
    rep.set("no_acceptance", jnum(no_accepts as f64 / no_total.max(1) as f64));
    rep.set("queries_per_trial", json!(bk.b - 1));
    rep.check(yes_rejects == 0, format!("{yes_rejects} YES instances rejected"));
    rep.check(off == 0, format!("{off} trials used other than b - 1 queries"));
    rep.rows = rows
        .iter()
        .enumerate()
        .map(|(t, (l, r))| vec![t.to_string(), format!("{l:?}"), r.accept.to_string(), r.start.to_string(), r.end.to_string(), r.queries.to_string()])
        .collect();
    Ok(rep)
}

fn guesser_exp(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let planted = planted_guesser()?;
    let l = cfg.algorithm.guesses;
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let run = guesser(&planted.algorithm, l, rng)?;
        let ok = planted.success(&run, l);
        let pairs: Vec<String> = run.pairs.iter().map(usize::to_string).collect();
        Ok((ok, vec![t.to_string(), run.witness.to_string(), pairs.join(" "), ok.to_string()]))
    })?;
    let freq = rows.iter().filter(|r| r.0).count() as f64 / rows.len() as f64;
    let bound = guesser_lower_bound(planted.witness_bits(), 1.0, planted.queries(), l);
    let sigma = (freq * (1.0 - freq) / rows.len() as f64).sqrt();
    let mut rep = Report::new(&["trial", "witness", "pairs", "success"]);
    rep.set("guesses", json!(l));
    rep.set("success_frequency", jnum(freq));
    rep.set("lower_bound", jnum(bound));
    rep.check(freq >= bound - 3.0 * sigma, format!("success {} below bound {}", num(freq), num(bound)));
    rep.rows = rows.into_iter().map(|r| r.1).collect();
    Ok(rep)
}

fn compile_ham(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let (c, witness) = circuit(cfg, &mut trial_rng(cfg.seed, &cfg.experiment, 0))?;
    let bundle = compile_to_hamiltonian(&c)?;
    let input = c.input_state(&witness)?;
    let hist = history_state(&c, &input)?;
    let lambda0 = ground_energy(&bundle.hamiltonian)?;
    let mut rep = Report::new(&["term", "label", "nnz", "projector_defect"]);
    rep.set("dim", json!(bundle.dim()));
    rep.set("steps", json!(c.steps()));
    rep.set("clock_width", json!(c.clock_width()));
    rep.set("terms", json!(bundle.term_count()));
    let s = sparsity(&bundle.hamiltonian);
    rep.set("sparsity", json!(s));
    rep.set("sparsity_bound", json!(sparsity_bound(&c)));
    rep.set("lambda0", jnum(lambda0));
    rep.set("history_energy", jnum(bundle.energy(&hist)?));
    rep.set("accept_probability", jnum(c.accept_probability(&input)?));
    rep.set("frustration_free", json!(frustration_free(&bundle.hamiltonian)?));
    rep.check(s <= sparsity_bound(&c), format!("sparsity {s} above {}", sparsity_bound(&c)));
    for (k, term) in bundle.terms().iter().enumerate() {
        let defect = term.op.projector_defect();
        rep.check(defect <= 1e-9, format!("term {} is not a projector", term.label));
        rep.rows.push(vec![k.to_string(), term.label.clone(), term.op.nnz().to_string(), num(defect)]);
    }
    Ok(rep)
}

fn qpe_bench(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let eps = cfg.algorithm.epsilon.unwrap_or(0.1);
    let delta = cfg.algorithm.delta.unwrap_or(0.1);
    let qubits = cfg.algorithm.qubits;
    if qubits > 6 {
        return Err(CliError::Budget(format!("{qubits} system qubits")));
    }
    let d = 1usize << qubits;
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let h = random_psd_hamiltonian(qubits, rng)?;
        let state = Statevector::from_amplitudes(&[("d", d)], random_vector(d, rng))?;
        let exact = h.expectation(state.amplitudes());
        let est = qpe_energy(&h, &state, eps, delta, rng)?;
        let within = (est.estimate - exact).abs() <= eps;
        Ok((within, vec![t.to_string(), num(exact), num(est.estimate), num(est.lambda), est.repetitions.to_string(), est.queries.to_string(), within.to_string()]))
    })?;
    let hits = rows.iter().filter(|r| r.0).count() as f64 / rows.len() as f64;
    let sigma = (delta * (1.0 - delta) / rows.len() as f64).sqrt();
    let mut rep = Report::new(&["trial", "exact", "estimate", "lambda", "repetitions", "queries", "within"]);
    rep.set("within_fraction", jnum(hits));
    rep.set("floor", jnum(1.0 - delta - 3.0 * sigma));
    rep.check(hits >= 1.0 - delta - 3.0 * sigma, format!("only {} of estimates within {eps}", num(hits)));
    rep.rows = rows.into_iter().map(|r| r.1).collect();
    Ok(rep)
}

fn kernel_bench(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let (c, witness) = circuit(cfg, &mut trial_rng(cfg.seed, &cfg.experiment, u64::MAX))?;
    let bundle = compile_to_hamiltonian(&c)?;
    let m = bundle.term_count() as f64;
    let input = c.input_state(&witness)?;
    let hist = history_state(&c, &input)?;
    let accepting = (c.accept_probability(&input)? - 1.0).abs() < 1e-12;
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let s = if t == 0 {
            hist.clone()
        } else {
            Statevector::from_amplitudes(&[("all", bundle.dim())], random_vector(bundle.dim(), rng))?
        };
        let est = kernel_test(&bundle.hamiltonian, &s, cfg.samples, rng)?;
        let target = bundle.hamiltonian.expectation(s.amplitudes()) / m;
        let sigma = (target * (1.0 - target) / cfg.samples as f64).sqrt();
        let z = if sigma > 0.0 { (est.frequency - target) / sigma } else { 0.0 };
        Ok((est.rejections, (est.exact - target).abs(), vec![t.to_string(), num(target), num(est.exact), num(est.frequency), num(z)]))
    })?;
    let mut rep = Report::new(&["trial", "energy_over_m", "exact", "frequency", "z"]);
    let route_gap = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    rep.set("terms", json!(bundle.term_count()));
    rep.set("history_rejections", json!(rows[0].0));
    rep.set("route_gap", jnum(route_gap));
    rep.check(!accepting || rows[0].0 == 0, "accepting history state was rejected");
    rep.check(route_gap <= 1e-10, format!("kernel probability differs from E/m by {}", num(route_gap)));
    rep.rows = rows.into_iter().map(|r| r.2).collect();
    Ok(rep)
}

fn parallel(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let (c, witness) = circuit(cfg, &mut trial_rng(cfg.seed, &cfg.experiment, u64::MAX))?;
    let tester = parallelize(&c)?;
    let input = c.input_state(&witness)?;
    let accepting = (c.accept_probability(&input)? - 1.0).abs() < 1e-12;
    let hist = history_state(&c, &input)?;
    let report = tester.report(&hist)?;
    let rows = trials(cfg, cfg.trials, |t, rng| {
        let run = tester.run(&hist, rng)?;
        Ok((run.accepted, vec![t.to_string(), run.accepted.to_string(), run.passes.to_string(), run.repetitions.to_string(), run.queries.to_string()]))
    })?;
    let rejected = rows.iter().filter(|r| !r.0).count();
    let mut rep = Report::new(&["trial", "accepted", "passes", "repetitions", "queries"]);
    rep.set("repetitions", json!(report.repetitions));
    rep.set("per_test_acceptance", jnum(report.per_test_acceptance));
    rep.set("acceptance", jnum(report.acceptance));
    rep.set("gap_constant", jnum(report.gap_constant));
    rep.set("parallel_queries", json!(report.parallel_queries));
    rep.set("oracle_terms", json!(tester.oracle_terms));
    rep.check(!accepting || rejected == 0, format!("{rejected} runs rejected an accepting history state"));
    rep.rows = rows.into_iter().map(|r| r.1).collect();
    Ok(rep)
}
