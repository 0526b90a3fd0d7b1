//! JSON run reports and their replay.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::commands::{self, CliError, Outcome};
use crate::config::Config;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, BTreeMap<String, String>>,
    pub outputs: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub status: String,
    /// Wall time; informational and ignored on replay.
    pub elapsed_seconds: f64,
}

pub fn build(command: &str, cfg: &Config, outcome: &Outcome, elapsed: f64) -> Report {
    let mut inputs = cfg.sections().clone();
    let seed = commands::seed_of(command, cfg);
    if let Some(s) = seed {
        inputs.entry("mc".into()).or_default().insert("seed".into(), s.to_string());
    }
    Report {
        tool: "voltail".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        seed,
        inputs,
        outputs: outcome.outputs.clone(),
        tolerances: outcome.tolerances.clone(),
        status: match &outcome.failure {
            None => "ok".into(),
            Some(f) => format!("failed: {f}"),
        },
        elapsed_seconds: elapsed,
    }
}

/// Re-runs the recorded command with the embedded inputs and seed; succeeds
/// only if every output matches.
pub fn replay(text: &str) -> Result<String, CliError> {
    let rep: Report =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("report: line {}, column {}: {e}", e.line(), e.column())))?;
    let cfg = Config::from_sections(rep.inputs.clone());
    let outcome = commands::run(&rep.command, &cfg)?;
    let mismatched: Vec<&String> = rep
        .outputs
        .keys()
        .chain(outcome.outputs.keys())
        .filter(|k| rep.outputs.get(*k) != outcome.outputs.get(*k))
        .collect();
    if mismatched.is_empty() {
        Ok(format!(
            "reproduced {} (seed {}): {} outputs match\n",
            rep.command,
            rep.seed.map_or("none".into(), |s| s.to_string()),
            rep.outputs.len()
        ))
    } else {
        let mut keys: Vec<&str> = mismatched.iter().map(|s| s.as_str()).collect();
        keys.sort();
        keys.dedup();
        Err(CliError::Numerical(format!("replay of {} differs in {}", rep.command, keys.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_replays() {
        let cfg = Config::parse("[mc]\npaths=500\nsteps=10\nseed=3\n").unwrap();
        let out = commands::run("mc-cir", &cfg).unwrap();
        let rep = build("mc-cir", &cfg, &out, 0.1);
        assert_eq!(rep.seed, Some(3));
        let text = serde_json::to_string(&rep).unwrap();
        assert!(replay(&text).unwrap().starts_with("reproduced mc-cir"));
        let mut bad = rep.clone();
        bad.outputs.insert("checksum".into(), Value::from("0"));
        let e = replay(&serde_json::to_string(&bad).unwrap()).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn default_seed_is_recorded() {
        let cfg = Config::parse("[mc]\npaths=10\nsteps=2\n").unwrap();
        let out = commands::run("mc-cev", &cfg).unwrap();
        let rep = build("mc-cev", &cfg, &out, 0.0);
        assert_eq!(rep.seed, Some(commands::DEFAULT_SEED));
        assert_eq!(rep.inputs["mc"]["seed"], commands::DEFAULT_SEED.to_string());
    }

    #[test]
    fn malformed_report() {
        assert_eq!(replay("{").unwrap_err().exit_code(), 2);
    }
}
