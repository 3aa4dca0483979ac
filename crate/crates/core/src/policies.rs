//! Online decision rules and the hindsight baselines.
//!
//! Every interpolation policy plays `x_t = C_t x_{t-1} + (I - C_t) v_t`,
//! evaluated as `x_{t-1} - P (1 - ρᵗ) ⊙ Pᵀ(x_{t-1} - v_t)` in the eigenbasis
//! shared by `A` and the schedule.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, Matrix};
use crate::scalar::{lit, to_f64, Real};
use crate::schedules::CoefficientSchedule;
use crate::spectral::SpectralMatrix;
use crate::trace::MinimizerTrace;

/// A named policy with its parameters, e.g. `lai-gamma:0.5` or `fi:0.3,0.6`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicySpec {
    Lai,
    LaiGamma(f64),
    Robd,
    /// Fixed interpolation; eigenvalues follow `A`'s ascending eigenvalue order.
    Fi(Vec<f64>),
    Ftm,
    StaticOpt,
    OfflineOpt,
    GeneralOpt,
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let bad = || Error::InvalidParameter(format!("unrecognized policy `{s}`"));
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        Ok(match (name, arg) {
            ("lai", None) => Self::Lai,
            ("lai-gamma", Some(g)) => Self::LaiGamma(num(g)?),
            ("robd", None) => Self::Robd,
            ("fi", Some(list)) => Self::Fi(list.split(',').map(num).collect::<Result<_>>()?),
            ("ftm", None) => Self::Ftm,
            ("static-opt", None) => Self::StaticOpt,
            ("offline-opt", None) => Self::OfflineOpt,
            ("general-opt", None) => Self::GeneralOpt,
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lai => f.write_str("lai"),
            Self::LaiGamma(g) => write!(f, "lai-gamma:{g}"),
            Self::Robd => f.write_str("robd"),
            Self::Fi(c) => {
                let list: Vec<String> = c.iter().map(f64::to_string).collect();
                write!(f, "fi:{}", list.join(","))
            }
            Self::Ftm => f.write_str("ftm"),
            Self::StaticOpt => f.write_str("static-opt"),
            Self::OfflineOpt => f.write_str("offline-opt"),
            Self::GeneralOpt => f.write_str("general-opt"),
        }
    }
}

impl TryFrom<String> for PolicySpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicySpec> for String {
    fn from(p: PolicySpec) -> String {
        p.to_string()
    }
}

/// Forecasts of future minimizer increments `E[v_s - v_{s-1} | F_t]`,
/// `s = t+1..=T`.
pub trait DriftOracle<T> {
    /// `history` holds `v_1..v_t`. Must return `horizon - t` vectors.
    fn forecast(&self, t: usize, history: &[Vec<T>], horizon: usize) -> Vec<Vec<T>>;
}

/// The martingale oracle: every forecast increment is zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroDrift;

impl<T: Real> DriftOracle<T> for ZeroDrift {
    fn forecast(&self, t: usize, history: &[Vec<T>], horizon: usize) -> Vec<Vec<T>> {
        let d = history.last().map_or(0, Vec::len);
        vec![vec![T::zero(); d]; horizon.saturating_sub(t)]
    }
}

/// Perfect foresight of a deterministic path.
#[derive(Clone, Debug)]
pub struct KnownPath<T> {
    trace: MinimizerTrace<T>,
}

impl<T: Real> KnownPath<T> {
    pub fn new(trace: MinimizerTrace<T>) -> Self {
        Self { trace }
    }
}

impl<T: Real> DriftOracle<T> for KnownPath<T> {
    fn forecast(&self, t: usize, _history: &[Vec<T>], horizon: usize) -> Vec<Vec<T>> {
        (t + 1..=horizon.min(self.trace.horizon()))
            .map(|s| self.trace.increment(s))
            .collect()
    }
}

/// Running state of an interpolation policy.
#[derive(Clone, Debug)]
pub struct PolicyState<'a, T> {
    schedule: &'a CoefficientSchedule<T>,
    x_prev: Vec<T>,
    round: usize,
    history: Vec<Vec<T>>,
}

impl<'a, T: Real> PolicyState<'a, T> {
    pub fn new(schedule: &'a CoefficientSchedule<T>, x0: Vec<T>) -> Result<Self> {
        if x0.len() != schedule.dim() {
            return Err(Error::DimensionMismatch {
                expected: schedule.dim(),
                got: x0.len(),
            });
        }
        Ok(Self {
            schedule,
            x_prev: x0,
            round: 0,
            history: Vec::new(),
        })
    }

    /// Rounds played so far.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn x_prev(&self) -> &[T] {
        &self.x_prev
    }

    fn check(&self, v: &[T]) -> Result<usize> {
        if v.len() != self.x_prev.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x_prev.len(),
                got: v.len(),
            });
        }
        let t = self.round + 1;
        if t > self.schedule.horizon() {
            return Err(Error::HorizonMismatch {
                expected: self.schedule.horizon(),
                got: t,
            });
        }
        Ok(t)
    }

    /// `(1 - ρᵗ) ⊙ Pᵀ(x_{t-1} - v_t)`.
    fn pull(&self, t: usize, v: &[T]) -> Vec<T> {
        let a = self.schedule.hitting_matrix();
        let gap: Vec<T> = self.x_prev.iter().zip(v).map(|(&x, &y)| x - y).collect();
        a.to_eigen(&gap)
            .into_iter()
            .zip(self.schedule.rho(t))
            .map(|(y, &r)| (T::one() - r) * y)
            .collect()
    }

    fn advance(&mut self, eigen_step: Vec<T>) -> Vec<T> {
        let delta = self.schedule.hitting_matrix().from_eigen(&eigen_step);
        for (x, d) in self.x_prev.iter_mut().zip(delta) {
            *x = *x - d;
        }
        self.round += 1;
        self.x_prev.clone()
    }

    /// `x_t = C_t x_{t-1} + (I - C_t) v_t`.
    pub fn step(&mut self, v: &[T]) -> Result<Vec<T>> {
        let t = self.check(v)?;
        let step = self.pull(t, v);
        Ok(self.advance(step))
    }

    /// The interpolation step plus the forecast correction
    /// `Σ_{s>t} (Π_{q=t}^{s-1} C_q)(I - C_s) E[v_s - v_{s-1} | F_t]`.
    pub fn step_general_optimal(&mut self, v: &[T], drift: &dyn DriftOracle<T>) -> Result<Vec<T>> {
        let t = self.check(v)?;
        let horizon = self.schedule.horizon();
        self.history.push(v.to_vec());
        let forecast = drift.forecast(t, &self.history, horizon);
        if forecast.len() != horizon - t {
            return Err(Error::HorizonMismatch {
                expected: horizon - t,
                got: forecast.len(),
            });
        }
        let a = self.schedule.hitting_matrix();
        let mut step = self.pull(t, v);
        let mut prod = self.schedule.rho(t).to_vec();
        for (k, delta) in forecast.iter().enumerate() {
            if delta.len() != v.len() {
                return Err(Error::DimensionMismatch {
                    expected: v.len(),
                    got: delta.len(),
                });
            }
            let s = t + 1 + k;
            let rho_s = self.schedule.rho(s);
            for (i, y) in a.to_eigen(delta).into_iter().enumerate() {
                step[i] = step[i] - prod[i] * (T::one() - rho_s[i]) * y;
                prod[i] = prod[i] * rho_s[i];
            }
        }
        Ok(self.advance(step))
    }
}

/// Per-round ledger of one policy on one trace.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyRun<T> {
    pub actions: Vec<Vec<T>>,
    pub hit_costs: Vec<T>,
    pub switch_costs: Vec<T>,
    pub total: T,
}

impl<T: Real> PolicyRun<T> {
    /// Prices a given action sequence on `trace`.
    pub fn evaluate(a: &SpectralMatrix<T>, trace: &MinimizerTrace<T>, actions: Vec<Vec<T>>) -> Result<Self> {
        if actions.len() != trace.horizon() {
            return Err(Error::HorizonMismatch {
                expected: trace.horizon(),
                got: actions.len(),
            });
        }
        let half = lit::<T>(0.5);
        let mut hit_costs = Vec::with_capacity(actions.len());
        let mut switch_costs = Vec::with_capacity(actions.len());
        let mut prev = trace.x0();
        for (t, x) in actions.iter().enumerate() {
            if x.len() != trace.dim() {
                return Err(Error::DimensionMismatch {
                    expected: trace.dim(),
                    got: x.len(),
                });
            }
            let gap: Vec<T> = x.iter().zip(trace.v(t + 1)).map(|(&a, &b)| a - b).collect();
            hit_costs.push(half * a.quad_form(&gap));
            switch_costs.push(half * x.iter().zip(prev).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>());
            prev = x;
        }
        let total = hit_costs.iter().copied().sum::<T>() + switch_costs.iter().copied().sum::<T>();
        Ok(Self {
            actions,
            hit_costs,
            switch_costs,
            total,
        })
    }

    pub fn horizon(&self) -> usize {
        self.actions.len()
    }
}

/// Hindsight optimum together with the first-order residual it achieved.
#[derive(Clone, Debug)]
pub struct OfflineSolution<T> {
    pub run: PolicyRun<T>,
    pub kkt_residual: T,
}

/// Exact minimizer of `Σ_t ½(x_t - v_t)ᵀA(x_t - v_t) + ½‖x_t - x_{t-1}‖²`
/// by block elimination of the tridiagonal stationarity system
/// `(A + 2I)x_t - x_{t-1} - x_{t+1} = A v_t` (`t < T`),
/// `(A + I)x_T - x_{T-1} = A v_T`.
pub fn offline_optimal<T: Real>(a: &SpectralMatrix<T>, trace: &MinimizerTrace<T>) -> Result<OfflineSolution<T>> {
    check_dims(a, trace)?;
    let dense = a.reconstruct();
    let (d, horizon) = (a.dim(), trace.horizon());
    let eye = Matrix::identity(d);
    let not_pd = || Error::NotPositiveDefinite(f64::NAN);

    // Forward sweep: D_t = B_t - D_{t-1}⁻¹, g_t = r_t + D_{t-1}⁻¹ g_{t-1}.
    let mut factors: Vec<Matrix<T>> = Vec::with_capacity(horizon);
    let mut g: Vec<Vec<T>> = Vec::with_capacity(horizon);
    let mut prev_inv: Option<Matrix<T>> = None;
    for t in 1..=horizon {
        let mut block = dense.add(&eye);
        if t < horizon {
            block = block.add(&eye);
        }
        let mut rhs = dense.matvec(trace.v(t));
        match &prev_inv {
            None => rhs.iter_mut().zip(trace.x0()).for_each(|(r, &x)| *r = *r + x),
            Some(inv) => {
                block = block.sub(inv);
                let carry = inv.matvec(&g[t - 2]);
                rhs.iter_mut().zip(carry).for_each(|(r, c)| *r = *r + c);
            }
        }
        block.symmetrize();
        let l = block.cholesky().ok_or_else(not_pd)?;
        prev_inv = Some(block.spd_inverse().ok_or_else(not_pd)?);
        factors.push(l);
        g.push(rhs);
    }

    // Back substitution: x_t = D_t⁻¹ (g_t + x_{t+1}).
    let mut actions = vec![Vec::new(); horizon];
    for t in (0..horizon).rev() {
        let mut rhs = g[t].clone();
        if t + 1 < horizon {
            rhs.iter_mut().zip(&actions[t + 1]).for_each(|(r, &x)| *r = *r + x);
        }
        actions[t] = cholesky_solve(&factors[t], &rhs);
    }

    let kkt_residual = kkt_residual(&dense, trace, &actions);
    let scale = trace
        .minimizers()
        .iter()
        .flatten()
        .chain(trace.x0())
        .fold(T::zero(), |m, &x| m.max(x.abs()));
    let tolerance = T::MATRIX_TOL * (T::one() + scale);
    if !(kkt_residual <= tolerance) {
        return Err(Error::SolveFailure {
            residual: to_f64(kkt_residual),
            tolerance: to_f64(tolerance),
        });
    }
    Ok(OfflineSolution {
        run: PolicyRun::evaluate(a, trace, actions)?,
        kkt_residual,
    })
}

/// Largest entry of the gradient of the full objective at `actions`.
pub fn kkt_residual<T: Real>(a: &Matrix<T>, trace: &MinimizerTrace<T>, actions: &[Vec<T>]) -> T {
    let horizon = actions.len();
    let mut worst = T::zero();
    for t in 0..horizon {
        let prev = if t == 0 { trace.x0() } else { &actions[t - 1][..] };
        let gap: Vec<T> = actions[t].iter().zip(trace.v(t + 1)).map(|(&x, &v)| x - v).collect();
        let hit = a.matvec(&gap);
        for i in 0..actions[t].len() {
            let mut grad = hit[i] + actions[t][i] - prev[i];
            if t + 1 < horizon {
                grad = grad + actions[t][i] - actions[t + 1][i];
            }
            worst = worst.max(grad.abs());
        }
    }
    worst
}

/// Best single action in hindsight when `A = λI`:
/// `x* = (x₀ + λ Σ v_t) / (1 + λT)`.
pub fn static_optimal_action<T: Real>(a: &SpectralMatrix<T>, trace: &MinimizerTrace<T>) -> Result<Vec<T>> {
    check_dims(a, trace)?;
    if !a.is_scalar() {
        return Err(Error::NotScalarMatrix);
    }
    let lambda = a.min_eigval();
    let n = lit::<T>(trace.horizon() as f64);
    let denom = T::one() + lambda * n;
    Ok((0..trace.dim())
        .map(|i| {
            let sum: T = trace.minimizers().iter().map(|v| v[i]).sum();
            (trace.x0()[i] + lambda * sum) / denom
        })
        .collect())
}

/// Expected total cost of the best static action on a martingale with
/// increment variance `σ²` (trace of the covariance) and `A = λI`.
pub fn static_optimal_expected_cost<T: Real>(lambda: T, sigma2: T, horizon: usize) -> T {
    let n = lit::<T>(horizon as f64);
    let (one, two) = (T::one(), lit::<T>(2.0));
    let denom = (one + lambda * n).powi(2);
    let spread = sigma2 * lambda * lambda / lit(12.0) * ((lambda * n + two) * (n - one) * n * (n + one)) / denom;
    let pull = lambda * sigma2 / (two * denom) * (n * (n + one) / two);
    let start = lit::<T>(0.5) * (lambda * lambda * sigma2 / denom) * (n * (n + one) * (two * n + one) / lit(6.0));
    spread + pull + start
}

/// A policy bound to a hitting-cost matrix and horizon, ready to run on
/// many traces.
#[derive(Clone, Debug)]
pub struct PreparedPolicy<T> {
    a: SpectralMatrix<T>,
    horizon: usize,
    kind: Prepared<T>,
}

#[derive(Clone, Debug)]
enum Prepared<T> {
    Interpolation(CoefficientSchedule<T>),
    GeneralOptimal(CoefficientSchedule<T>),
    FollowMinimizer,
    StaticOptimal,
    OfflineOptimal,
}

impl PolicySpec {
    pub fn prepare<T: Real>(&self, a: &SpectralMatrix<T>, horizon: usize) -> Result<PreparedPolicy<T>> {
        let kind = match self {
            Self::Lai => Prepared::Interpolation(CoefficientSchedule::lai(a, horizon)?),
            Self::LaiGamma(g) => Prepared::Interpolation(CoefficientSchedule::lai_gamma(a, horizon, lit(*g))?),
            Self::Robd => Prepared::Interpolation(CoefficientSchedule::robd(a, horizon)?),
            Self::Fi(c) => {
                let c: Vec<T> = c.iter().map(|&x| lit(x)).collect();
                Prepared::Interpolation(CoefficientSchedule::fixed(a, &c, horizon)?)
            }
            Self::Ftm => Prepared::FollowMinimizer,
            Self::StaticOpt => {
                if !a.is_scalar() {
                    return Err(Error::NotScalarMatrix);
                }
                Prepared::StaticOptimal
            }
            Self::OfflineOpt => Prepared::OfflineOptimal,
            Self::GeneralOpt => Prepared::GeneralOptimal(CoefficientSchedule::lai(a, horizon)?),
        };
        Ok(PreparedPolicy {
            a: a.clone(),
            horizon,
            kind,
        })
    }
}

impl<T: Real> PreparedPolicy<T> {
    /// Plays the policy on `trace`. `drift` is consulted only by the
    /// general optimal policy and defaults to [`ZeroDrift`].
    pub fn run(&self, trace: &MinimizerTrace<T>, drift: Option<&dyn DriftOracle<T>>) -> Result<PolicyRun<T>> {
        check_dims(&self.a, trace)?;
        if trace.horizon() != self.horizon {
            return Err(Error::HorizonMismatch {
                expected: self.horizon,
                got: trace.horizon(),
            });
        }
        let actions = match &self.kind {
            Prepared::Interpolation(s) => {
                let mut state = PolicyState::new(s, trace.x0().to_vec())?;
                trace
                    .minimizers()
                    .iter()
                    .map(|v| state.step(v))
                    .collect::<Result<Vec<_>>>()?
            }
            Prepared::GeneralOptimal(s) => {
                let mut state = PolicyState::new(s, trace.x0().to_vec())?;
                let drift = drift.unwrap_or(&ZeroDrift);
                trace
                    .minimizers()
                    .iter()
                    .map(|v| state.step_general_optimal(v, drift))
                    .collect::<Result<Vec<_>>>()?
            }
            Prepared::FollowMinimizer => trace.minimizers().to_vec(),
            Prepared::StaticOptimal => vec![static_optimal_action(&self.a, trace)?; trace.horizon()],
            Prepared::OfflineOptimal => return Ok(offline_optimal(&self.a, trace)?.run),
        };
        PolicyRun::evaluate(&self.a, trace, actions)
    }

    /// The coefficient schedule, for interpolation policies.
    pub fn schedule(&self) -> Option<&CoefficientSchedule<T>> {
        match &self.kind {
            Prepared::Interpolation(s) | Prepared::GeneralOptimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Builds `spec` for `trace`'s horizon and runs it once.
pub fn run_policy<T: Real>(
    spec: &PolicySpec,
    a: &SpectralMatrix<T>,
    trace: &MinimizerTrace<T>,
    drift: Option<&dyn DriftOracle<T>>,
) -> Result<PolicyRun<T>> {
    spec.prepare(a, trace.horizon())?.run(trace, drift)
}

fn check_dims<T: Real>(a: &SpectralMatrix<T>, trace: &MinimizerTrace<T>) -> Result<()> {
    if a.dim() != trace.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: trace.dim(),
        });
    }
    Ok(())
}
