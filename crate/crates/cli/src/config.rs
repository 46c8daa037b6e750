use serde::{Deserialize, Serialize};

use crate::CliError;

pub const EXPERIMENTS: [&str; 12] = [
    "completeness",
    "soundness-sweep",
    "hybrid-audit",
    "transcript-attack",
    "no-transform",
    "too-heavy",
    "corp",
    "guesser",
    "compile-ham",
    "qpe-bench",
    "kernel-bench",
    "parallelize",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceParams {
    pub n: u32,
    pub l: u32,
    pub b: usize,
    /// JSON instance file; overrides sampling where an experiment uses one
    /// fixed instance.
    pub file: Option<String>,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams { n: 2, l: 3, b: 3, file: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgorithmParams {
    pub rounds: usize,
    pub q: usize,
    pub witness_bits: u32,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    /// `haar`, `sparse` or `chasing`.
    pub kind: String,
    /// `in-place` or `xor`.
    pub mode: String,
    pub support: usize,
    /// Circuit length for the toy verifier family.
    pub steps: usize,
    pub qubits: u32,
    /// Guesser iterations.
    pub guesses: usize,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        AlgorithmParams {
            rounds: 1,
            q: 1,
            witness_bits: 1,
            epsilon: None,
            delta: None,
            kind: "haar".into(),
            mode: "in-place".into(),
            support: 3,
            steps: 4,
            qubits: 3,
            guesses: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub instance: InstanceParams,
    pub algorithm: AlgorithmParams,
    pub trials: u64,
    /// Inner Monte-Carlo shots per trial.
    pub samples: u64,
    pub seed: u64,
    pub out: Option<String>,
    /// Directory for transcript dumps.
    pub dumps: Option<String>,
    pub s_values: Vec<f64>,
    /// Universe size `B` for the too-heavy experiment.
    pub universe: usize,
    /// `toy`, `toy-reject`, `chasing`, or a circuit text file.
    pub circuit: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: String::new(),
            instance: InstanceParams::default(),
            algorithm: AlgorithmParams::default(),
            trials: 100,
            samples: 10_000,
            seed: 1,
            out: None,
            dumps: None,
            s_values: vec![0.0, 0.25, 0.5],
            universe: 256,
            circuit: "toy".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Canonical bytes hashed into the report header.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return bad(format!("unknown experiment `{}`; expected one of {}", self.experiment, EXPERIMENTS.join(", ")));
        }
        if self.trials == 0 || self.samples == 0 {
            return bad("trials and samples must be positive".into());
        }
        if !["haar", "sparse", "chasing"].contains(&self.algorithm.kind.as_str()) {
            return bad(format!("unknown algorithm kind `{}`", self.algorithm.kind));
        }
        if !["in-place", "xor"].contains(&self.algorithm.mode.as_str()) {
            return bad(format!("unknown oracle mode `{}`", self.algorithm.mode));
        }
        if self.algorithm.q == 0 {
            return bad("q must be at least 1".into());
        }
        if let Some(e) = self.algorithm.epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return bad(format!("epsilon {e} outside (0, 1]"));
            }
        }
        if let Some(d) = self.algorithm.delta {
            if !(d > 0.0 && d < 1.0) {
                return bad(format!("delta {d} outside (0, 1)"));
            }
        }
        if self.s_values.iter().any(|s| !(0.0..=0.5).contains(s)) {
            return bad("s values must lie in [0, 1/2]".into());
        }
        Ok(())
    }
}
