//! Input state files and serializable report types.
//!
//! State files are UTF-8 JSON, either canonical parameters
//!
//! ```json
//! { "a": [0.0, 0.0, 0.3], "T": [-0.4, -0.4, -0.4] }
//! ```
//!
//! or a density matrix as nested `[re, im]` pairs, row-major in the product
//! basis |00>, |01>, |10>, |11>:
//!
//! ```json
//! { "rho": [[[0.25, 0.0], ...], ...] }
//! ```
//!
//! Density-matrix inputs are rotated into canonical form; states with a
//! nonzero Bloch vector on Bob's side are rejected.

use nalgebra::{Complex, Matrix4};
use serde::{Deserialize, Serialize};
use steerlab_core::criteria::{ClassifyReport, CriterionReport};
use steerlab_core::pauli_core::{
    decompose, to_canonical, BlochVector, CanonicalState, CorrelationDiag, DensityMatrix4,
};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default)]
    pub a: Option<[f64; 3]>,
    #[serde(default, rename = "T")]
    pub t: Option<[f64; 3]>,
    #[serde(default)]
    pub rho: Option<[[[f64; 2]; 4]; 4]>,
}

impl StateFile {
    pub fn load(path: &str) -> Result<CanonicalState, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read state file {path}: {e}")))?;
        let file: StateFile = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("state file {path} does not match the schema: {e}")))?;
        file.into_state()
    }

    pub fn into_state(self) -> Result<CanonicalState, CliError> {
        match (self.a, self.t, self.rho) {
            (Some(a), Some(t), None) => {
                let state = CanonicalState::new(
                    BlochVector::new(a[0], a[1], a[2]),
                    CorrelationDiag::new(t[0], t[1], t[2]),
                );
                state
                    .validate()
                    .map_err(|e| CliError::usage(format!("state is unphysical: {e}")))?;
                Ok(state)
            }
            (None, None, Some(rho)) => {
                let m = Matrix4::from_fn(|i, j| Complex::new(rho[i][j][0], rho[i][j][1]));
                let dm = DensityMatrix4::validated(m)
                    .map_err(|e| CliError::usage(format!("invalid density matrix: {e}")))?;
                let dec = decompose(&dm)
                    .map_err(|e| CliError::usage(format!("invalid density matrix: {e}")))?;
                to_canonical(&dec)
                    .map_err(|e| CliError::usage(format!("cannot canonicalize state: {e}")))
            }
            _ => Err(CliError::usage(
                "state file must contain either both \"a\" and \"T\", or \"rho\"".to_string(),
            )),
        }
    }
}

/// Rounds to 9 significant digits; every number the tool emits goes through
/// this so reports are stable and diffable.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("round-trip of formatted float")
}

pub fn sig9_arr(v: [f64; 3]) -> [f64; 3] {
    [sig9(v[0]), sig9(v[1]), sig9(v[2])]
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub order: usize,
    pub grid_points: usize,
    pub seed: u64,
    pub tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct CriterionJson {
    pub id: &'static str,
    pub satisfied: bool,
    pub margin: f64,
    pub witness: [f64; 3],
}

impl CriterionJson {
    pub fn from_report(rep: &CriterionReport) -> Self {
        Self {
            id: rep.kind.id(),
            satisfied: rep.satisfied,
            margin: sig9(rep.margin),
            witness: sig9_arr(rep.witness.as_array()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ModelParamsJson {
    pub t0: [f64; 3],
    pub t: f64,
    pub c: f64,
}

#[derive(Debug, Serialize)]
pub struct CertificateJson {
    pub criterion: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelParamsJson>,
}

#[derive(Debug, Serialize)]
pub struct ClassifyJson {
    pub command: &'static str,
    pub verdict: &'static str,
    pub bell_diagonal: bool,
    pub degenerate: bool,
    pub octahedron_sum: f64,
    pub visibility: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bowles: Option<CriterionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zhang: Option<CriterionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    pub config: ConfigEcho,
}

impl ClassifyJson {
    pub fn from_report(report: &ClassifyReport, config: ConfigEcho) -> Self {
        Self {
            command: "classify",
            verdict: report.verdict.id(),
            bell_diagonal: report.bell_diagonal,
            degenerate: report.degenerate,
            octahedron_sum: sig9(report.octahedron_sum),
            visibility: sig9(report.visibility),
            bowles: report.bowles.as_ref().map(CriterionJson::from_report),
            zhang: report.zhang.as_ref().map(CriterionJson::from_report),
            certificate: report.certificate.as_ref().map(|c| CertificateJson {
                criterion: c.criterion.id(),
                model: c.model.as_ref().map(|m| ModelParamsJson {
                    t0: sig9_arr(m.t0.as_array()),
                    t: sig9(m.t),
                    c: sig9(m.c),
                }),
            }),
            config,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundaryJson {
    pub command: &'static str,
    pub t_star: f64,
    pub t_critical: [f64; 3],
    pub surface_norm_residual: f64,
    pub config: ConfigEcho,
}

#[derive(Debug, Serialize)]
pub struct ResidualsJson {
    pub normalization: f64,
    pub alice_marginal: f64,
    pub hidden_mean: f64,
    pub correlation: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyJson {
    pub command: &'static str,
    pub model: ModelDescJson,
    pub residuals: ResidualsJson,
    pub tolerance: f64,
    pub pass: bool,
    pub probes: usize,
    pub config: ConfigEcho,
}

#[derive(Debug, Serialize)]
pub struct ModelDescJson {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 3]>,
}

#[derive(Debug, Serialize)]
pub struct SimulateDirectionJson {
    pub x: [f64; 3],
    pub probability_plus: f64,
    pub distance_plus: f64,
    pub distance_minus: f64,
    pub clt_bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Serialize)]
pub struct SimulateJson {
    pub command: &'static str,
    pub model: ModelDescJson,
    pub shots: u64,
    pub seed: u64,
    pub directions: Vec<SimulateDirectionJson>,
    pub config: ConfigEcho,
}

#[derive(Debug, Serialize)]
pub struct Figure1SidecarJson {
    pub command: &'static str,
    pub panel: String,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossover_abscissa: Option<f64>,
    pub csv: String,
    pub config: ConfigEcho,
}

/// Flattens a JSON report into deterministic `key,value` CSV lines.
pub fn flatten_csv(value: &serde_json::Value) -> String {
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

fn walk(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                walk(&key, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}
