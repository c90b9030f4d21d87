//! Implementations of the five subcommands.

use crate::schema::{
    flatten_csv, sig9, sig9_arr, BoundaryJson, ClassifyJson, ConfigEcho, Figure1SidecarJson,
    ModelDescJson, ResidualsJson, SimulateDirectionJson, SimulateJson, StateFile, VerifyJson,
};
use crate::{CliError, RunSettings};
use steerlab_core::assemblage::{Measurement, Outcome};
use steerlab_core::criteria::{
    classify, critical_scaling, crossover_abscissa, figure1_data, surface_norm, ClassifyConfig,
    CriteriaError, OptimizerConfig, Panel,
};
use steerlab_core::lhs_models::{
    bell_diagonal_model, canonical_model_with, simulate_protocol, verify_requirements, LhsError,
    LhsModel,
};
use steerlab_core::pauli_core::{BlochVector, CorrelationDiag};
use steerlab_core::sphere_quad::{build_rule, fibonacci_sphere};

pub fn parse_triple(text: &str, what: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "{what} must be three comma-separated numbers, got {text:?}"
        )));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| {
            CliError::usage(format!("{what}: cannot parse {part:?} as a number"))
        })?;
    }
    Ok(out)
}

fn parse_correlation(text: &str, what: &str) -> Result<CorrelationDiag, CliError> {
    if text == "iso" {
        return Ok(CorrelationDiag::isotropic(0.5));
    }
    let v = parse_triple(text, what)?;
    Ok(CorrelationDiag::new(v[0], v[1], v[2]))
}

fn construction_error(err: LhsError) -> CliError {
    match err {
        LhsError::ParamOutOfRange { .. } => CliError::usage(err.to_string()),
        _ => CliError::construction(err.to_string()),
    }
}

impl RunSettings {
    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            order: self.order,
            grid_points: self.grid_points,
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }

    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            grid_points: self.grid_points,
            ..OptimizerConfig::default()
        }
    }
}

/// Arguments that select either a state file or an explicit model.
pub struct ModelSelection {
    pub state: Option<String>,
    pub model: Option<String>,
    pub q: Option<f64>,
    pub t0: Option<String>,
    pub t: Option<f64>,
    pub a: Option<String>,
}

fn resolve_model(
    sel: &ModelSelection,
    settings: &RunSettings,
) -> Result<(LhsModel, ModelDescJson), CliError> {
    match (&sel.state, &sel.model) {
        (Some(path), None) => {
            let state = StateFile::load(path)?;
            if state.t.is_singular() {
                return Err(CliError::construction(
                    "correlation matrix is singular; the state is separable and needs no model"
                        .to_string(),
                ));
            }
            let rule = build_rule(settings.order);
            let t = surface_norm(&state.t, &rule);
            if t > 1.0 + 1e-9 {
                return Err(CliError::construction(format!(
                    "state lies beyond the unsteerable boundary (visibility {t:.6}); \
                     no LHS model exists"
                )));
            }
            let t0 = state.t.scaled(1.0 / t);
            let model = canonical_model_with(
                &t0,
                t.min(1.0),
                &state.a,
                settings.tolerance,
                &settings.optimizer(),
                settings.order,
            )
            .map_err(construction_error)?;
            let desc = ModelDescJson {
                kind: "canonical".to_string(),
                q: None,
                t0: Some(sig9_arr(t0.as_array())),
                t: Some(sig9(t)),
                a: Some(sig9_arr(state.a.as_array())),
            };
            Ok((model, desc))
        }
        (None, Some(kind)) => match kind.as_str() {
            "werner" => {
                let q = sel
                    .q
                    .ok_or_else(|| CliError::usage("--model werner requires --q".to_string()))?;
                if !(0.0..=1.0).contains(&q) {
                    return Err(CliError::usage(format!("--q must be in [0, 1], got {q}")));
                }
                let model = steerlab_core::lhs_models::werner_model(q)
                    .map_err(construction_error)?;
                let desc = ModelDescJson {
                    kind: "werner".to_string(),
                    q: Some(sig9(q)),
                    t0: None,
                    t: None,
                    a: None,
                };
                Ok((model, desc))
            }
            "bell-diagonal" => {
                let t0_text = sel.t0.as_ref().ok_or_else(|| {
                    CliError::usage("--model bell-diagonal requires --T0".to_string())
                })?;
                let t0 = parse_correlation(t0_text, "--T0")?;
                let model = bell_diagonal_model(&t0).map_err(construction_error)?;
                let desc = ModelDescJson {
                    kind: "bell_diagonal".to_string(),
                    q: None,
                    t0: Some(sig9_arr(t0.as_array())),
                    t: None,
                    a: None,
                };
                Ok((model, desc))
            }
            "canonical" => {
                let t0_text = sel.t0.as_ref().ok_or_else(|| {
                    CliError::usage("--model canonical requires --T0".to_string())
                })?;
                let t0 = parse_correlation(t0_text, "--T0")?;
                let t = sel
                    .t
                    .ok_or_else(|| CliError::usage("--model canonical requires --t".to_string()))?;
                let a_text = sel
                    .a
                    .as_ref()
                    .ok_or_else(|| CliError::usage("--model canonical requires --a".to_string()))?;
                let a = parse_triple(a_text, "--a")?;
                let a = BlochVector::new(a[0], a[1], a[2]);
                let model = canonical_model_with(
                    &t0,
                    t,
                    &a,
                    settings.tolerance,
                    &settings.optimizer(),
                    settings.order,
                )
                .map_err(construction_error)?;
                let desc = ModelDescJson {
                    kind: "canonical".to_string(),
                    q: None,
                    t0: Some(sig9_arr(t0.as_array())),
                    t: Some(sig9(t)),
                    a: Some(sig9_arr(a.as_array())),
                };
                Ok((model, desc))
            }
            other => Err(CliError::usage(format!(
                "unknown model {other:?}; expected werner, bell-diagonal or canonical"
            ))),
        },
        _ => Err(CliError::usage(
            "provide exactly one of --state or --model".to_string(),
        )),
    }
}

fn render(value: impl serde::Serialize, settings: &RunSettings) -> Result<String, CliError> {
    let json = serde_json::to_value(&value)
        .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?;
    Ok(match settings.format {
        crate::Format::Json => {
            let mut text = serde_json::to_string_pretty(&json)
                .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?;
            text.push('\n');
            text
        }
        crate::Format::Csv => flatten_csv(&json),
    })
}

pub fn cmd_classify(state_path: &str, settings: &RunSettings) -> Result<String, CliError> {
    let state = StateFile::load(state_path)?;
    let config = ClassifyConfig {
        order: settings.order,
        opt: settings.optimizer(),
    };
    let report = classify(&state, &config)
        .map_err(|e| CliError::usage(format!("classification failed: {e}")))?;
    render(ClassifyJson::from_report(&report, settings.echo()), settings)
}

pub fn cmd_boundary(t_dir_text: &str, settings: &RunSettings) -> Result<String, CliError> {
    let t_dir = parse_correlation(t_dir_text, "--T")?;
    let rule = build_rule(settings.order);
    let result = critical_scaling(&t_dir, &rule).map_err(|e| match e {
        CriteriaError::SingularT => CliError::usage("--T direction is singular".to_string()),
        other => CliError::usage(other.to_string()),
    })?;
    let residual = (surface_norm(&result.t_critical, &rule) - 1.0).abs();
    let report = BoundaryJson {
        command: "boundary",
        t_star: sig9(result.t_star),
        t_critical: sig9_arr(result.t_critical.as_array()),
        surface_norm_residual: sig9(residual),
        config: settings.echo(),
    };
    render(report, settings)
}

pub fn cmd_verify_lhs(
    sel: &ModelSelection,
    probes: usize,
    settings: &RunSettings,
) -> Result<String, CliError> {
    let (model, desc) = resolve_model(sel, settings)?;
    let rule = build_rule(settings.order);
    let dirs: Vec<Measurement> = fibonacci_sphere(probes)
        .into_iter()
        .map(|v| Measurement::new(v).expect("lattice nodes are unit"))
        .collect();
    let report = verify_requirements(&model, &rule, &dirs).map_err(construction_error)?;
    let pass = report.max_residual() <= settings.tolerance;
    let out = VerifyJson {
        command: "verify-lhs",
        model: desc,
        residuals: ResidualsJson {
            normalization: sig9(report.normalization),
            alice_marginal: sig9(report.alice_marginal),
            hidden_mean: sig9(report.hidden_mean),
            correlation: sig9(report.correlation),
        },
        tolerance: settings.tolerance,
        pass,
        probes,
        config: settings.echo(),
    };
    render(out, settings)
}

pub fn cmd_simulate(
    sel: &ModelSelection,
    directions: &[String],
    settings: &RunSettings,
) -> Result<String, CliError> {
    if settings.shots == 0 {
        return Err(CliError::usage("--shots must be at least 1".to_string()));
    }
    let (model, desc) = resolve_model(sel, settings)?;
    let dirs: Vec<BlochVector> = if directions.is_empty() {
        vec![BlochVector::e_x(), BlochVector::e_y(), BlochVector::e_z()]
    } else {
        directions
            .iter()
            .map(|text| {
                let v = parse_triple(text, "--x")?;
                BlochVector::new(v[0], v[1], v[2])
                    .normalized()
                    .ok_or_else(|| CliError::usage("--x direction cannot be zero".to_string()))
            })
            .collect::<Result<_, _>>()?
    };
    let clt_bound = 5.0 / (settings.shots as f64).sqrt();
    let mut rows = Vec::with_capacity(dirs.len());
    for (i, dir) in dirs.iter().enumerate() {
        let x = Measurement::new(*dir)
            .map_err(|e| CliError::usage(format!("--x is not a direction: {e}")))?;
        // Independent deterministic substream per direction.
        let seed = settings.seed.wrapping_add(i as u64);
        let emp =
            simulate_protocol(&model, &x, settings.shots, seed).map_err(construction_error)?;
        let dist = emp.distances_to_quantum(&model.target, &x);
        rows.push(SimulateDirectionJson {
            x: sig9_arr(dir.as_array()),
            probability_plus: sig9(emp.probability(Outcome::Plus)),
            distance_plus: sig9(dist[0]),
            distance_minus: sig9(dist[1]),
            clt_bound: sig9(clt_bound),
            within_bound: dist[0] <= clt_bound && dist[1] <= clt_bound,
        });
    }
    let out = SimulateJson {
        command: "simulate",
        model: desc,
        shots: settings.shots,
        seed: settings.seed,
        directions: rows,
        config: settings.echo(),
    };
    render(out, settings)
}

pub struct Figure1Output {
    pub csv: String,
    pub sidecar: String,
}

pub fn cmd_figure1(
    panel_text: &str,
    samples: usize,
    csv_path: &str,
    settings: &RunSettings,
) -> Result<Figure1Output, CliError> {
    let panel = match panel_text {
        "a" => Panel::A,
        "b" => Panel::B,
        other => {
            return Err(CliError::usage(format!(
                "--panel must be 'a' or 'b', got {other:?}"
            )))
        }
    };
    if samples < 5 {
        return Err(CliError::usage("--samples must be at least 5".to_string()));
    }
    let rows = figure1_data(panel, samples, &settings.optimizer(), settings.order)
        .map_err(|e| CliError::usage(format!("sweep failed: {e}")))?;

    let mut csv = String::from("abscissa,amax_bowles,amax_zhang,amax_psd\n");
    for row in &rows {
        csv.push_str(&format!(
            "{:.8e},{:.8e},{:.8e},{:.8e}\n",
            row.abscissa, row.amax_bowles, row.amax_zhang, row.amax_psd
        ));
    }

    let crossover = match panel {
        Panel::B => crossover_abscissa(&rows),
        Panel::A => None,
    };
    let sidecar = Figure1SidecarJson {
        command: "figure1",
        panel: panel_text.to_string(),
        samples,
        crossover_abscissa: crossover.map(sig9),
        csv: csv_path.to_string(),
        config: settings.echo(),
    };
    let mut sidecar_text = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?;
    sidecar_text.push('\n');
    Ok(Figure1Output {
        csv,
        sidecar: sidecar_text,
    })
}
