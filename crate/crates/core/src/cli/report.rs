//! JSON reports.
//!
//! ```json
//! {
//!   "command": "rigidity",
//!   "digest": "sha256:<hex of the scene file bytes>",
//!   "residuals": { "<name>": <number>, ... },
//!   "runtime": { "nodes": <int>, "grid": [N_s, N_1, ...] },
//!   "scene": "<path as given>",
//!   "timestamp": { "elapsed_seconds": <number>, "unix_seconds": <int> },
//!   "verdicts": {
//!     "<name>": { "pass": <bool>, "residual": "<name>", "rule": "<rule>",
//!                 "tolerance": <number> }, ...
//!   }
//! }
//! ```
//!
//! Keys are sorted at every level and numbers are written with 17
//! significant digits (`{:.16e}`), so two runs of the same scene and flags
//! differ only inside `timestamp`. Non-finite residuals are written as the
//! strings `"NaN"`, `"inf"` or `"-inf"`.

use std::collections::BTreeMap;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

/// How a residual is compared against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `residual ≤ tol`.
    AtMost,
    /// `residual ≥ −tol` (margins and minima).
    AtLeastMinusTol,
    /// `residual ≥ tol` (observed orders).
    AtLeast,
}

impl Rule {
    fn name(self) -> &'static str {
        match self {
            Rule::AtMost => "residual <= tolerance",
            Rule::AtLeastMinusTol => "residual >= -tolerance",
            Rule::AtLeast => "residual >= tolerance",
        }
    }

    pub fn check(self, residual: f64, tol: f64) -> bool {
        match self {
            Rule::AtMost => residual <= tol,
            Rule::AtLeastMinusTol => residual >= -tol,
            Rule::AtLeast => residual >= tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub residual: String,
    pub tolerance: f64,
    pub rule: Rule,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub scene: String,
    pub digest: String,
    pub residuals: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub grid: Vec<usize>,
    pub elapsed: Duration,
}

pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn number(v: f64) -> Value {
    if v.is_finite() {
        let n: Number = serde_json::from_str(&format!("{v:.16e}")).expect("finite float literal");
        Value::Number(n)
    } else {
        Value::String(format!("{v}"))
    }
}

impl Report {
    /// Records a residual.
    pub fn put(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.insert(name.into(), value);
    }

    /// Records a residual and a verdict on it under the same name.
    pub fn judge(&mut self, name: &str, value: f64, tol: f64, rule: Rule) {
        self.put(name, value);
        self.verdict(name, name, tol, rule);
    }

    /// Adds a verdict on an already recorded residual.
    pub fn verdict(&mut self, name: &str, residual: &str, tol: f64, rule: Rule) {
        let value = self.residuals[residual];
        self.verdicts.insert(
            name.to_string(),
            Verdict {
                residual: residual.to_string(),
                tolerance: tol,
                rule,
                pass: rule.check(value, tol),
            },
        );
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }

    /// Names of residuals that are NaN or infinite.
    pub fn non_finite(&self) -> Vec<&str> {
        self.residuals
            .iter()
            .filter(|(_, v)| !v.is_finite())
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.clone()));
        root.insert("digest".into(), Value::String(self.digest.clone()));
        root.insert("scene".into(), Value::String(self.scene.clone()));
        let residuals: Map<String, Value> =
            self.residuals.iter().map(|(k, v)| (k.clone(), number(*v))).collect();
        root.insert("residuals".into(), Value::Object(residuals));
        let verdicts: Map<String, Value> = self
            .verdicts
            .iter()
            .map(|(k, v)| {
                let mut m = Map::new();
                m.insert("pass".into(), Value::Bool(v.pass));
                m.insert("residual".into(), Value::String(v.residual.clone()));
                m.insert("rule".into(), Value::String(v.rule.name().into()));
                m.insert("tolerance".into(), number(v.tolerance));
                (k.clone(), Value::Object(m))
            })
            .collect();
        root.insert("verdicts".into(), Value::Object(verdicts));
        let mut runtime = Map::new();
        runtime.insert("nodes".into(), Value::from(self.grid.iter().product::<usize>()));
        runtime.insert("grid".into(), Value::from(self.grid.clone()));
        root.insert("runtime".into(), Value::Object(runtime));
        let unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut ts = Map::new();
        ts.insert("elapsed_seconds".into(), number(self.elapsed.as_secs_f64()));
        ts.insert("unix_seconds".into(), Value::from(unix));
        root.insert("timestamp".into(), Value::Object(ts));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }
}
