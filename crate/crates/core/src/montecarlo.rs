//! Seeded Monte Carlo estimates of policy performance.
//!
//! Each replication generates one trace and feeds the same trace to every
//! policy and to the comparator, so regret and ratio statistics are paired.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environments::{TraceGenerator, TraceSpec};
use crate::error::{Error, Result};
use crate::policies::{offline_optimal, PolicySpec, PreparedPolicy};
use crate::spectral::SpectralMatrix;
use crate::trace::MinimizerTrace;

/// Offline costs below this make a ratio to the optimum meaningless.
pub const ZERO_COST: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    TotalCost,
    RegretVsLai,
    RatioVsLai,
    RatioVsOffline,
}

impl FromStr for Statistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "total_cost" => Self::TotalCost,
            "regret_vs_lai" => Self::RegretVsLai,
            "ratio_vs_lai" => Self::RatioVsLai,
            "ratio_vs_offline" => Self::RatioVsOffline,
            _ => return Err(Error::InvalidParameter(format!("unknown statistic `{s}`"))),
        })
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TotalCost => "total_cost",
            Self::RegretVsLai => "regret_vs_lai",
            Self::RatioVsLai => "ratio_vs_lai",
            Self::RatioVsOffline => "ratio_vs_offline",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub p95: f64,
    pub n_runs: usize,
}

impl MonteCarloEstimate {
    /// Sample mean, `s/√n` with the unbiased `s`, and the linearly
    /// interpolated 95th percentile.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::EmptyInput("no Monte Carlo samples"));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_error,
            p95: percentile(samples, 0.95),
            n_runs: n,
        })
    }
}

/// Linear-interpolation percentile at position `q (n - 1)` of the sorted data.
pub fn percentile(samples: &[f64], q: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Paired per-replication value of `statistic` for a policy cost.
fn score(statistic: Statistic, cost: f64, reference: f64) -> Option<f64> {
    match statistic {
        Statistic::TotalCost => Some(cost),
        Statistic::RegretVsLai => Some(cost - reference),
        Statistic::RatioVsLai | Statistic::RatioVsOffline => {
            if reference.abs() < ZERO_COST {
                // 0/0 counts as a tie; x/0 carries no information.
                (cost.abs() < ZERO_COST).then_some(1.0)
            } else {
                Some(cost / reference)
            }
        }
    }
}

/// Runs a fixed set of policies against one trace family.
pub struct MonteCarlo<'a> {
    a: &'a SpectralMatrix<f64>,
    generator: TraceGenerator,
    policies: Vec<PreparedPolicy<f64>>,
    lai: PreparedPolicy<f64>,
    statistic: Statistic,
}

impl<'a> MonteCarlo<'a> {
    pub fn new(a: &'a SpectralMatrix<f64>, policies: &[PolicySpec], trace: &TraceSpec, statistic: Statistic) -> Result<Self> {
        if trace.dim != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: trace.dim,
            });
        }
        let prepared = policies
            .iter()
            .map(|p| p.prepare(a, trace.horizon))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            a,
            generator: trace.generator()?,
            policies: prepared,
            lai: PolicySpec::Lai.prepare(a, trace.horizon)?,
            statistic,
        })
    }

    pub fn generator(&self) -> &TraceGenerator {
        &self.generator
    }

    fn reference(&self, trace: &MinimizerTrace<f64>) -> Result<f64> {
        Ok(match self.statistic {
            Statistic::TotalCost => 0.0,
            Statistic::RegretVsLai | Statistic::RatioVsLai => self.lai.run(trace, None)?.total,
            Statistic::RatioVsOffline => offline_optimal(self.a, trace)?.run.total,
        })
    }

    /// Per-replication scores, `out[policy][k]` for the k-th retained
    /// replication of that policy. Deterministic for any worker count.
    pub fn samples(&self, runs: usize, workers: Option<usize>) -> Result<Vec<Vec<f64>>> {
        let one = |r: usize| -> Result<Vec<Option<f64>>> {
            let trace = self.generator.generate(r as u64)?;
            let reference = self.reference(&trace)?;
            self.policies
                .iter()
                .map(|p| Ok(score(self.statistic, p.run(&trace, None)?.total, reference)))
                .collect()
        };
        let rows: Vec<Vec<Option<f64>>> = match workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
                .install(|| (0..runs).into_par_iter().map(one).collect::<Result<_>>())?,
            None => (0..runs).into_par_iter().map(one).collect::<Result<_>>()?,
        };
        Ok((0..self.policies.len())
            .map(|p| rows.iter().filter_map(|row| row[p]).collect())
            .collect())
    }

    /// One estimate per policy, in the order given to [`new`](Self::new).
    pub fn estimate(&self, runs: usize, workers: Option<usize>) -> Result<Vec<MonteCarloEstimate>> {
        self.samples(runs, workers)?
            .iter()
            .map(|s| MonteCarloEstimate::from_samples(s))
            .collect()
    }
}

/// Estimate of `statistic` for a single policy over `runs` replications.
pub fn monte_carlo(
    a: &SpectralMatrix<f64>,
    policy: &PolicySpec,
    trace: &TraceSpec,
    runs: usize,
    statistic: Statistic,
    workers: Option<usize>,
) -> Result<MonteCarloEstimate> {
    if runs < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 runs, got {runs}")));
    }
    let mc = MonteCarlo::new(a, std::slice::from_ref(policy), trace, statistic)?;
    Ok(mc.estimate(runs, workers)?.remove(0))
}
