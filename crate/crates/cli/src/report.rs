use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// Floating value with 12 significant digits, trailing zeros trimmed.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// JSON number rounded to the report precision.
pub fn jnum(x: f64) -> Value {
    num(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: BTreeMap<String, Value>,
    /// Invariants the run falsified.
    pub violations: Vec<String>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Report { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.violations.push(what.into());
        }
    }

    pub fn falsified(&self) -> bool {
        !self.violations.is_empty()
    }

    /// One JSON header line, then CSV.
    pub fn render(&self, config: &ExperimentConfig) -> String {
        let canonical = config.canonical();
        let hash = Sha256::digest(canonical.as_bytes());
        let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
        let header = json!({
            "experiment": config.experiment,
            "config_sha256": hex,
            "config": serde_json::from_str::<Value>(&canonical).expect("canonical config is JSON"),
            "versions": { "qmalab": qmalab::VERSION, "qmalab-cli": env!("CARGO_PKG_VERSION") },
            "status": if self.falsified() { "falsified" } else { "ok" },
            "violations": self.violations,
            "summary": self.summary,
        });
        let mut out = String::new();
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.853_553_390_593_273_7), "0.853553390593");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(123_456.789_012_345), "123456.789012");
        assert_eq!(num(1e-9), "1.00000000000e-9");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn header_hash_tracks_config() {
        let a = ExperimentConfig { experiment: "corp".into(), ..Default::default() };
        let b = ExperimentConfig { seed: 2, ..a.clone() };
        let r = Report::new(&["trial"]);
        assert_eq!(r.render(&a), r.render(&a));
        assert_ne!(r.render(&a).lines().next(), r.render(&b).lines().next());
    }
}
