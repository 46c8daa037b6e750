//! wasm-bindgen exports for the static demo page. Every export returns a
//! JSON string; the page does the drawing.

use nalgebra::SymmetricEigen;
use qmalab::hamlab::{compile_to_hamiltonian, history_state, qpe_distribution, sparsity};
use qmalab::pcp::{bucket_layout, sample_with_even_count};
use qmalab::qsim::dense::random_vector;
use qmalab::qsim::Statevector;
use qmalab::rng::trial_rng;
use qmalab::verify::{optimal_quantum_witness, soundness_envelope};
use qmalab::workloads::{random_psd_hamiltonian, toy_verifier, toy_verifier_rejecting, toy_witness};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: u32 = 64;
const BINS: usize = 48;

/// Best quantum-witness acceptance for every NO fraction `s = e/N`,
/// alongside `(1 + √s) / 2`.
pub fn soundness_curve_json(n: u32, l: u32, b: usize, seed: u64, samples: u32) -> qmalab::Result<String> {
    let bk = bucket_layout(n, l, b)?;
    if bk.m > 256 {
        return Err(qmalab::Error::BudgetExceeded(format!("M = {} is too large for the page", bk.m)));
    }
    let mut points = Vec::new();
    for even in 0..=bk.big_n / 2 {
        let mut best: f64 = 0.0;
        for t in 0..samples.clamp(1, MAX_SAMPLES) {
            let inst = sample_with_even_count(&bk, even, &mut trial_rng(seed, "soundness-curve", (even as u64) << 32 | t as u64))?;
            best = best.max(optimal_quantum_witness(&inst)?.0);
        }
        let s = even as f64 / bk.big_n as f64;
        points.push(json!({ "s": s, "value": best, "envelope": soundness_envelope(s) }));
    }
    Ok(json!({ "n": bk.big_n, "m": bk.m, "b": bk.b, "points": points }).to_string())
}

/// Phase-estimation output distribution for a random PSD Hamiltonian and a
/// random state, binned over `[0, Λ]`.
pub fn qpe_histogram_json(qubits: u32, seed: u64, epsilon: f64) -> qmalab::Result<String> {
    if !(1..=4).contains(&qubits) || !(0.02..=1.0).contains(&epsilon) {
        return Err(qmalab::Error::InvalidArgument("qubits in 1..=4 and epsilon in [0.02, 1]".into()));
    }
    let mut rng = trial_rng(seed, "qpe-histogram", 0);
    let h = random_psd_hamiltonian(qubits, &mut rng)?;
    let d = 1usize << qubits;
    let state = Statevector::from_amplitudes(&[("d", d)], random_vector(d, &mut rng))?;
    let dist = qpe_distribution(&h, &state, epsilon)?;
    let mut bins = vec![0.0; BINS];
    for (k, p) in dist.probabilities.iter().enumerate() {
        let e = dist.energy_of(k);
        let slot = ((e / dist.lambda) * BINS as f64).floor() as usize;
        bins[slot.min(BINS - 1)] += p;
    }
    let spectrum = SymmetricEigen::new(h.to_dense()).eigenvalues.iter().copied().collect::<Vec<f64>>();
    Ok(json!({
        "lambda": dist.lambda,
        "control_qubits": dist.control_qubits,
        "exact": h.expectation(state.amplitudes()),
        "mean": dist.mean_energy(),
        "spectrum": spectrum,
        "bins": bins,
    })
    .to_string())
}

/// Spectrum of the compiled toy verifier with `steps` gates, plus the
/// energy of its honest history state.
pub fn clock_spectrum_json(steps: usize, reject: bool) -> qmalab::Result<String> {
    if !(1..=8).contains(&steps) {
        return Err(qmalab::Error::InvalidArgument("steps in 1..=8".into()));
    }
    let circuit = if reject { toy_verifier_rejecting(steps)? } else { toy_verifier(steps)? };
    let bundle = compile_to_hamiltonian(&circuit)?;
    let hist = history_state(&circuit, &circuit.input_state(&toy_witness())?)?;
    let mut eig: Vec<f64> = SymmetricEigen::new(bundle.hamiltonian.to_dense()).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok(json!({
        "steps": steps,
        "dim": bundle.dim(),
        "clock_width": circuit.clock_width(),
        "sparsity": sparsity(&bundle.hamiltonian),
        "terms": bundle.term_count(),
        "history_energy": bundle.energy(&hist)?,
        "eigenvalues": eig,
        "gates": circuit.gates().iter().map(|g| g.name()).collect::<Vec<_>>(),
    })
    .to_string())
}

fn js(r: qmalab::Result<String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn soundness_curve(n: u32, l: u32, b: usize, seed: u64, samples: u32) -> Result<String, JsValue> {
    js(soundness_curve_json(n, l, b, seed, samples))
}

#[wasm_bindgen]
pub fn qpe_histogram(qubits: u32, seed: u64, epsilon: f64) -> Result<String, JsValue> {
    js(qpe_histogram_json(qubits, seed, epsilon))
}

#[wasm_bindgen]
pub fn clock_spectrum(steps: usize, reject: bool) -> Result<String, JsValue> {
    js(clock_spectrum_json(steps, reject))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn curve_stays_under_envelope() {
        let v: Value = serde_json::from_str(&soundness_curve_json(2, 3, 3, 1, 4).unwrap()).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 3);
        for p in pts {
            assert!(p["value"].as_f64().unwrap() <= p["envelope"].as_f64().unwrap() + 1e-9);
        }
    }

    #[test]
    fn histogram_is_a_distribution() {
        let v: Value = serde_json::from_str(&qpe_histogram_json(2, 3, 0.1).unwrap()).unwrap();
        let total: f64 = v["bins"].as_array().unwrap().iter().map(|b| b.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!((v["mean"].as_f64().unwrap() - v["exact"].as_f64().unwrap()).abs() < 0.1);
        assert!(qpe_histogram_json(7, 0, 0.1).is_err());
    }

    #[test]
    fn accepting_spectrum_has_zero_ground_energy() {
        let v: Value = serde_json::from_str(&clock_spectrum_json(4, false).unwrap()).unwrap();
        assert!(v["eigenvalues"][0].as_f64().unwrap().abs() < 1e-9);
        assert!(v["history_energy"].as_f64().unwrap().abs() < 1e-12);
        let r: Value = serde_json::from_str(&clock_spectrum_json(4, true).unwrap()).unwrap();
        assert!(r["eigenvalues"][0].as_f64().unwrap() > 1e-4);
    }
}
