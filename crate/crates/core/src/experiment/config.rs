use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environments::{AdversaryRule, IncrementSpec, RayAxis, TraceMode, TraceSpec};
use crate::error::Error;
use crate::linalg::Matrix;
use crate::montecarlo::Statistic;
use crate::policies::PolicySpec;
use crate::spectral::SpectralMatrix;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl ExperimentError {
    pub(crate) fn config(field: impl Into<String>, message: impl ToString) -> Self {
        Self::Config {
            field: field.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Self::Config { .. })
    }
}

/// The hitting-cost matrix: either a dense symmetric matrix or an eigenvalue
/// list (diagonal `A`, identity eigenvectors).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<Vec<f64>>>,
}

impl MatrixConfig {
    pub fn eigenvalues(values: Vec<f64>) -> Self {
        Self {
            eigenvalues: Some(values),
            dense: None,
        }
    }

    pub fn resolve(&self) -> Result<SpectralMatrix<f64>, ExperimentError> {
        match (&self.eigenvalues, &self.dense) {
            (Some(e), None) => SpectralMatrix::diagonal(e).map_err(|e| ExperimentError::config("matrix.eigenvalues", e)),
            (None, Some(rows)) => {
                let m = Matrix::from_rows(rows)
                    .ok_or_else(|| ExperimentError::config("matrix.dense", "rows have different lengths"))?;
                SpectralMatrix::decompose(&m).map_err(|e| ExperimentError::config("matrix.dense", e))
            }
            _ => Err(ExperimentError::config(
                "matrix",
                "give exactly one of `eigenvalues` or `dense`",
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversaryConfig {
    AlternatingRay {
        amplitude: f64,
        #[serde(default = "default_axis")]
        axis: RayAxis,
    },
    FixedPoints { points: Vec<Vec<f64>> },
}

fn default_axis() -> RayAxis {
    RayAxis::Min
}

impl AdversaryConfig {
    fn resolve(&self, a: &SpectralMatrix<f64>) -> AdversaryRule {
        match self {
            Self::AlternatingRay { amplitude, axis } => AdversaryRule::alternating_ray(a, *amplitude, *axis),
            Self::FixedPoints { points } => AdversaryRule::FixedPoints { points: points.clone() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    Martingale {
        increments: IncrementSpec,
        /// Covariance over the concatenated `d·T` increments.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        correlation: Option<Vec<Vec<f64>>>,
    },
    ShiftSchedule {
        segments: Vec<IncrementSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        correlation: Option<Vec<Vec<Vec<f64>>>>,
    },
    Mixed {
        base: IncrementSpec,
        adversary: AdversaryConfig,
        /// Required unless the sweep runs over adversarial percentages.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        adversarial_pct: Option<f64>,
    },
    PureAdversarial { adversary: AdversaryConfig },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    /// Start point; defaults to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub mode: ModeConfig,
}

/// Exactly one axis: `horizons` / `horizon_range`, or `adversarial_pcts`
/// together with a fixed `horizon`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<usize>>,
    /// Inclusive `[first, last]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_range: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversarial_pcts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub policies: Vec<PolicySpec>,
    pub statistic: Statistic,
    pub runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub matrix: MatrixConfig,
    pub trace: TraceConfig,
    pub sweep: SweepConfig,
}

/// A config reduced to the hitting-cost matrix and one trace spec per
/// sweep value.
#[derive(Clone, Debug)]
pub struct ResolvedExperiment {
    pub a: SpectralMatrix<f64>,
    pub points: Vec<(f64, TraceSpec)>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::config("<file>", e.message().to_string() + &span_hint(text, e.span())))
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    pub fn resolve(&self) -> Result<ResolvedExperiment, ExperimentError> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(ExperimentError::config("name", "must be a non-empty file stem"));
        }
        if self.policies.is_empty() {
            return Err(ExperimentError::config("policies", "list at least one policy"));
        }
        if self.runs == 0 {
            return Err(ExperimentError::config("runs", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(ExperimentError::config("workers", "must be at least 1"));
        }
        let a = self.matrix.resolve()?;
        let d = a.dim();
        let x0 = self.trace.x0.clone().unwrap_or_else(|| vec![0.0; d]);
        if x0.len() != d {
            return Err(ExperimentError::config(
                "trace.x0",
                format!("has {} entries, matrix dimension is {d}", x0.len()),
            ));
        }
        for (i, p) in self.policies.iter().enumerate() {
            p.prepare(&a, 1)
                .map_err(|e| ExperimentError::config(format!("policies[{i}]"), format!("`{p}`: {e}")))?;
        }

        let s = &self.sweep;
        let axes = [s.horizons.is_some(), s.horizon_range.is_some(), s.adversarial_pcts.is_some()];
        if axes.iter().filter(|&&x| x).count() != 1 {
            return Err(ExperimentError::config(
                "sweep",
                "set exactly one of `horizons`, `horizon_range`, `adversarial_pcts`",
            ));
        }
        let horizons: Option<Vec<usize>> = match (&s.horizons, s.horizon_range) {
            (Some(h), _) => Some(h.clone()),
            (None, Some([lo, hi])) if lo <= hi => Some((lo..=hi).collect()),
            (None, Some(_)) => return Err(ExperimentError::config("sweep.horizon_range", "first exceeds last")),
            _ => None,
        };
        let mut points = Vec::new();
        match (horizons, &s.adversarial_pcts) {
            (Some(hs), _) => {
                if s.horizon.is_some() {
                    return Err(ExperimentError::config("sweep.horizon", "only used with `adversarial_pcts`"));
                }
                let pct = match &self.trace.mode {
                    ModeConfig::Mixed { adversarial_pct, .. } => Some(adversarial_pct.ok_or_else(|| {
                        ExperimentError::config("trace.mode.adversarial_pct", "required for a horizon sweep")
                    })?),
                    _ => None,
                };
                for h in hs {
                    if h == 0 {
                        return Err(ExperimentError::config("sweep", "horizons must be positive"));
                    }
                    points.push((h as f64, self.trace_spec(&a, &x0, h, pct)?));
                }
            }
            (None, Some(pcts)) => {
                if !matches!(self.trace.mode, ModeConfig::Mixed { .. }) {
                    return Err(ExperimentError::config(
                        "sweep.adversarial_pcts",
                        "needs a `mixed` trace mode",
                    ));
                }
                let h = s
                    .horizon
                    .filter(|&h| h > 0)
                    .ok_or_else(|| ExperimentError::config("sweep.horizon", "a positive horizon is required"))?;
                for &p in pcts {
                    points.push((p, self.trace_spec(&a, &x0, h, Some(p))?));
                }
            }
            (None, None) => unreachable!("exactly one axis checked above"),
        }
        if points.is_empty() {
            return Err(ExperimentError::config("sweep", "no sweep values"));
        }
        Ok(ResolvedExperiment { a, points })
    }

    fn trace_spec(
        &self,
        a: &SpectralMatrix<f64>,
        x0: &[f64],
        horizon: usize,
        pct: Option<f64>,
    ) -> Result<TraceSpec, ExperimentError> {
        let dense = |rows: &Vec<Vec<f64>>, field: &str| {
            Matrix::from_rows(rows).ok_or_else(|| ExperimentError::config(field, "rows have different lengths"))
        };
        let mode = match &self.trace.mode {
            ModeConfig::Martingale { increments, correlation } => TraceMode::Martingale {
                increments: increments.clone(),
                correlation: correlation
                    .as_ref()
                    .map(|c| dense(c, "trace.mode.correlation"))
                    .transpose()?,
            },
            ModeConfig::ShiftSchedule { segments, correlation } => TraceMode::ShiftSchedule {
                segments: segments.clone(),
                correlation: correlation
                    .as_ref()
                    .map(|blocks| {
                        blocks
                            .iter()
                            .map(|b| dense(b, "trace.mode.correlation"))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?,
            },
            ModeConfig::Mixed { base, adversary, .. } => TraceMode::Mixed {
                base: base.clone(),
                adversarial_pct: pct.expect("percentage resolved by caller"),
                adversary: adversary.resolve(a),
            },
            ModeConfig::PureAdversarial { adversary } => TraceMode::PureAdversarial {
                adversary: adversary.resolve(a),
            },
        };
        let spec = TraceSpec {
            dim: a.dim(),
            horizon,
            x0: x0.to_vec(),
            mode,
            seed: self.master_seed,
        };
        spec.validate().map_err(|e| ExperimentError::config("trace", e))?;
        Ok(spec)
    }
}

fn span_hint(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let line = text[..r.start.min(text.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        None => String::new(),
    }
}
