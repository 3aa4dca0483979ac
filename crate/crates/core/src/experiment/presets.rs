use crate::environments::{IncrementFamily, IncrementSpec, RayAxis};
use crate::montecarlo::Statistic;
use crate::policies::PolicySpec;

use super::config::{AdversaryConfig, ExperimentConfig, MatrixConfig, ModeConfig, SweepConfig, TraceConfig};

const RATIOS: [&str; 3] = ["0.3", "0.45", "0.5"];
const DIM: i32 = 10;
const RUNS: usize = 1000;
const FIG2_HORIZON: usize = 100;
const FIG2_AMPLITUDE: f64 = 10.0;
/// Lomax shape of the symmetrized Pareto increments.
pub const PARETO_ALPHA: f64 = 3.0;
/// Log-scale spread of the symmetrized log-normal increments.
pub const LOGNORMAL_SIGMA: f64 = 1.0;

fn unit(family: IncrementFamily) -> IncrementSpec {
    IncrementSpec::new(family, 1.0)
}

fn heavy(kind: &str) -> IncrementFamily {
    match kind {
        "lognormal" => IncrementFamily::LognormalSym {
            sigma_ln: LOGNORMAL_SIGMA,
        },
        _ => IncrementFamily::LomaxSym { alpha: PARETO_ALPHA },
    }
}

/// All preset names, figure by figure.
pub fn preset_names() -> Vec<String> {
    let mut names = Vec::new();
    for env in ["light", "lognormal", "pareto"] {
        for r in RATIOS {
            names.push(format!("fig1-{env}-{r}"));
        }
    }
    for env in ["normal", "lognormal", "pareto"] {
        for r in RATIOS {
            names.push(format!("fig2-{env}-{r}"));
        }
    }
    names
}

/// Looks up a preset. `fig2-<env>` without a ratio means ratio 0.3.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let parts: Vec<&str> = name.split('-').collect();
    let (fig, env, ratio) = match parts.as_slice() {
        [fig, env, r] => (*fig, *env, *r),
        [fig, env] => (*fig, *env, RATIOS[0]),
        _ => return None,
    };
    if !RATIOS.contains(&ratio) {
        return None;
    }
    let r: f64 = ratio.parse().ok()?;
    let matrix = MatrixConfig::eigenvalues((0..DIM).map(|i| r.powi(i)).collect());
    let policies = vec![PolicySpec::Robd, PolicySpec::LaiGamma(1.0)];
    let full = format!("{fig}-{env}-{ratio}");

    match (fig, env) {
        ("fig1", "light" | "lognormal" | "pareto") => {
            let mode = if env == "light" {
                ModeConfig::ShiftSchedule {
                    segments: IncrementFamily::LIGHT_TAILED.iter().cloned().map(unit).collect(),
                    correlation: None,
                }
            } else {
                ModeConfig::Martingale {
                    increments: unit(heavy(env)),
                    correlation: None,
                }
            };
            Some(ExperimentConfig {
                name: full,
                description: Some(format!(
                    "regret against the adaptive policy, {env} increments, eigenvalues {r}^i (i = 0..9), \
                     identity eigenvectors, per-coordinate increment variance 1, uncorrelated"
                )),
                policies,
                statistic: Statistic::RegretVsLai,
                runs: RUNS,
                master_seed: 1,
                workers: None,
                out: None,
                matrix,
                trace: TraceConfig { x0: None, mode },
                sweep: SweepConfig {
                    horizon_range: Some([1, 100]),
                    ..SweepConfig::default()
                },
            })
        }
        ("fig2", "normal" | "lognormal" | "pareto") => {
            let base = if env == "normal" {
                unit(IncrementFamily::Normal)
            } else {
                unit(heavy(env))
            };
            Some(ExperimentConfig {
                name: full,
                description: Some(format!(
                    "cost ratio to the adaptive policy, {env} martingale with an alternating adversary \
                     (amplitude {FIG2_AMPLITUDE}, top eigenvector), eigenvalues {r}^i (i = 0..9), T = {FIG2_HORIZON}"
                )),
                policies,
                statistic: Statistic::RatioVsLai,
                runs: RUNS,
                master_seed: 1,
                workers: None,
                out: None,
                matrix,
                trace: TraceConfig {
                    x0: None,
                    mode: ModeConfig::Mixed {
                        base,
                        adversary: AdversaryConfig::AlternatingRay {
                            amplitude: FIG2_AMPLITUDE,
                            axis: RayAxis::Max,
                        },
                        adversarial_pct: None,
                    },
                },
                sweep: SweepConfig {
                    adversarial_pcts: Some((0..=10).map(|k| 10.0 * k as f64).collect()),
                    horizon: Some(FIG2_HORIZON),
                    ..SweepConfig::default()
                },
            })
        }
        _ => None,
    }
}
