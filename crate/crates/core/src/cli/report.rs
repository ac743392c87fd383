//! Report envelope, verdicts and the tolerance table.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::Value;

use crate::linalg::row_major;
use crate::structures::{Check, Relation};

/// Default tolerance for every named verdict, before `--tol-scale`.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("decomposition", 1e-12),
    ("weyl_trace", 1e-9),
    ("weyl_invariance", 1e-8),
    ("transport_invariance", 1e-6),
    ("tractor_curvature", 1e-8),
    ("tractor_t_part", 1e-9),
    ("connection_trace", 1e-12),
    ("transport_det", 1e-6),
    ("bracket_closure", 1e-8),
    ("projectively_flat", 1e-9),
    ("flat_holonomy", 1e-6),
    ("einstein.nabla_ric", 1e-8),
    ("einstein.parallel", 1e-6),
    ("einstein.metric_block", 1e-9),
    ("einstein.mixed_block", 1e-9),
    ("einstein.line_entry", 1e-9),
    ("einstein.candidate", 1e-8),
    ("converse.invariance", 1e-8),
    ("converse.path", 1e-6),
    ("converse.consistency", 1e-8),
    ("contact.path", 1e-6),
    ("contact.theta_on_h", 1e-9),
    ("contact.theta_of_reeb", 1e-9),
    ("contact.dtheta_vs_omega", 1e-6),
    ("contact.dtheta_reeb", 1e-6),
    ("contact.vtheta_ratio", 0.0),
    ("contact.weyl_in_h", 1e-7),
    ("complex.path", 1e-6),
    ("complex.preserves_h", 1e-9),
    ("complex.square", 1e-7),
    ("complex.lie_invariance", 1e-4),
    ("complex.nijenhuis", 1e-6),
    ("foliation.path", 1e-6),
    ("foliation.integrability", 1e-6),
    ("foliation.geodesy", 1e-6),
    ("foliation.preserves_k", 1e-7),
    ("foliation.rho", 1e-7),
    ("foliation.ricci_on_k", 1e-7),
    ("foliation.leaf_trace", 1e-7),
    ("decomposition.t_star_row", 1e-9),
    ("decomposition.gl_in_affine", 1e-7),
];

/// Verdicts without a numeric tolerance.
const BOOLEAN_VERDICTS: &[&str] = &[
    "einstein.signature",
    "expect.einstein",
    "expect.holonomy_rank",
    "expect.label",
    "precondition",
];

/// Whether `name` is a verdict with a numeric tolerance that a manifest may override.
pub fn has_tolerance(name: &str) -> bool {
    DEFAULT_TOLERANCES.iter().any(|(n, _)| *n == name)
}

/// Tolerances after manifest overrides and the global scale.
#[derive(Debug, Clone)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
    pub scale: f64,
}

impl Tolerances {
    pub fn new(overrides: BTreeMap<String, f64>, scale: f64) -> Tolerances {
        Tolerances { overrides, scale }
    }

    pub fn get(&self, name: &str) -> f64 {
        let base = self.overrides.get(name).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, t)| *t)
                .unwrap_or_else(|| panic!("no default tolerance for `{name}`"))
        });
        base * self.scale
    }

    pub fn at_most(&self, name: &str, subject: &str, value: f64) -> Verdict {
        Verdict::judged(name, subject, Check::at_most(value, self.get(name)))
    }

    /// Re-judge a check computed elsewhere against this table.
    pub fn rejudge(&self, name: &str, subject: &str, check: Check) -> Verdict {
        Verdict::judged(name, subject, check.with_tol(self.get(name)))
    }
}

/// One accept/reject decision.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    /// What was checked: a command stage, curve, structure or point set.
    pub subject: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn judged(name: &str, subject: &str, c: Check) -> Verdict {
        Verdict {
            name: name.into(),
            subject: subject.into(),
            value: Some(c.value),
            tol: Some(c.tol),
            relation: Some(c.relation),
            pass: c.pass,
            detail: None,
        }
    }

    pub fn holds(name: &str, subject: &str, pass: bool, detail: impl Into<String>) -> Verdict {
        debug_assert!(BOOLEAN_VERDICTS.contains(&name));
        Verdict {
            name: name.into(),
            subject: subject.into(),
            value: None,
            tol: None,
            relation: None,
            pass,
            detail: Some(detail.into()),
        }
    }
}

/// A stage that did not run, and why.
#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub subject: String,
    pub reason: String,
}

/// Row-major matrix with its shape.
#[derive(Debug, Clone, Serialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&DMatrix<f64>> for Matrix {
    fn from(m: &DMatrix<f64>) -> Matrix {
        Matrix {
            rows: m.nrows(),
            cols: m.ncols(),
            data: row_major(m),
        }
    }
}

/// Tensor components at a point with their index shape, row-major.
#[derive(Debug, Clone, Serialize)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn new(n: usize, rank: usize, data: Vec<f64>) -> Tensor {
        Tensor {
            shape: vec![n; rank],
            data,
        }
    }
}

/// Result of one command on one manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema_version: u32,
    pub command: String,
    pub manifest: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub pass: bool,
    pub failed: Vec<String>,
    /// Per-stage results keyed by stage name.
    pub sections: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    pub skipped: Vec<Skipped>,
}

/// Reports for several manifests (a corpus directory).
#[derive(Debug, Clone, Serialize)]
pub struct CorpusReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub tol_scale: f64,
    pub pass: bool,
    pub reports: Vec<Report>,
}
