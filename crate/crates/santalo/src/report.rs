use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How the compared quantities were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    MonteCarlo,
    Grid,
}

/// Outcome of one numerical inequality or identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    /// The inequality or identity under test.
    pub anchor: String,
    pub inputs: BTreeMap<String, Value>,
    #[serde(with = "extended_float")]
    pub lhs: f64,
    #[serde(with = "extended_float")]
    pub rhs: f64,
    #[serde(with = "extended_float")]
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub provenance: Provenance,
    pub seed: Option<u64>,
    pub runtime_ms: u64,
}

impl CheckReport {
    pub fn builder(check_id: impl Into<String>, anchor: impl Into<String>) -> CheckBuilder {
        CheckBuilder {
            report: CheckReport {
                check_id: check_id.into(),
                anchor: anchor.into(),
                inputs: BTreeMap::new(),
                lhs: f64::NAN,
                rhs: f64::NAN,
                margin: f64::NAN,
                tolerance: 0.0,
                passed: false,
                provenance: Provenance::Quadrature,
                seed: None,
                runtime_ms: 0,
            },
            started: Instant::now(),
        }
    }

    /// `lhs / rhs - 1`, invariant under rescaling both sides.
    pub fn margin_ratio(&self) -> f64 {
        self.lhs / self.rhs - 1.0
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {:<40} lhs={:<14.8e} rhs={:<14.8e} margin={:+.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.check_id,
            self.lhs,
            self.rhs,
            self.margin,
            self.tolerance
        )
    }
}

pub struct CheckBuilder {
    report: CheckReport,
    started: Instant,
}

impl CheckBuilder {
    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.report.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn provenance(mut self, p: Provenance) -> Self {
        self.report.provenance = p;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.report.seed = Some(seed);
        self
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.report.tolerance = tol;
        self
    }

    /// Inequality `lhs >= rhs`, tolerance scaled by `max(1, |rhs|)`.
    pub fn at_least(self, lhs: f64, rhs: f64) -> CheckReport {
        let tol = self.report.tolerance * rhs.abs().max(1.0);
        let margin = lhs - rhs;
        self.finish(lhs, rhs, margin, margin >= -tol)
    }

    /// Inequality `lhs <= rhs`, tolerance scaled by `max(1, |rhs|)`.
    pub fn at_most(self, lhs: f64, rhs: f64) -> CheckReport {
        let tol = self.report.tolerance * rhs.abs().max(1.0);
        let margin = rhs - lhs;
        self.finish(lhs, rhs, margin, margin >= -tol)
    }

    /// Identity `lhs == rhs` up to a relative tolerance; margin is minus the relative gap.
    pub fn equal(self, lhs: f64, rhs: f64) -> CheckReport {
        let gap = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
        let passed = gap <= self.report.tolerance;
        self.finish(lhs, rhs, -gap, passed)
    }

    /// Caller-supplied verdict.
    pub fn verdict(self, lhs: f64, rhs: f64, margin: f64, passed: bool) -> CheckReport {
        self.finish(lhs, rhs, margin, passed)
    }

    fn finish(mut self, lhs: f64, rhs: f64, margin: f64, passed: bool) -> CheckReport {
        self.report.lhs = lhs;
        self.report.rhs = rhs;
        self.report.margin = margin;
        self.report.passed = passed && !margin.is_nan();
        self.report.runtime_ms = self.started.elapsed().as_millis() as u64;
        self.report
    }
}

/// JSON has no infinities; non-finite floats travel as strings.
pub mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad float {other}"))),
            },
        }
    }
}
