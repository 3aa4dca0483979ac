//! Closed-form costs, regret bounds and competitive-ratio bounds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{lit, to_f64, Real};
use crate::schedules::{fixed_point_eigvals, CoefficientSchedule};
use crate::spectral::{fixed_point_eigval, robd_regularizer, SpectralMatrix};

/// Increment covariances, either shared by every round or one per round.
#[derive(Clone, Debug)]
pub enum Covariances<'a, T> {
    Constant(&'a Matrix<T>),
    PerRound(&'a [Matrix<T>]),
}

impl<T: Real> Covariances<'_, T> {
    fn at(&self, t: usize) -> &Matrix<T> {
        match self {
            Self::Constant(m) => m,
            Self::PerRound(ms) => &ms[t - 1],
        }
    }
}

/// Expected total cost of the adaptive policy and its upper bound with
/// every `C_t` replaced by `C_L`:
/// `Σ_t ½ tr((I - C_t) Σ_t) + ½ gapᵀ (I - C_1) gap`, where `gap` is the
/// deterministic part of `v_1 - x₀` (zero under `v₀ = x₀`).
pub fn lai_expected_cost<T: Real>(
    a: &SpectralMatrix<T>,
    cov: &Covariances<'_, T>,
    horizon: usize,
    x0_gap: &[T],
) -> Result<(T, T)> {
    let d = a.dim();
    if x0_gap.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x0_gap.len(),
        });
    }
    if let Covariances::PerRound(ms) = cov {
        if ms.len() != horizon {
            return Err(Error::HorizonMismatch {
                expected: horizon,
                got: ms.len(),
            });
        }
    }
    let schedule = CoefficientSchedule::lai(a, horizon)?;
    let fixed = fixed_point_eigvals(a);
    let half = lit::<T>(0.5);
    let (mut exact, mut upper) = (T::zero(), T::zero());
    for t in 1..=horizon {
        let s = cov.at(t);
        if s.rows() != d || s.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.rows(),
            });
        }
        let spread = a.project_diagonal(s);
        for i in 0..d {
            exact = exact + half * (T::one() - schedule.rho(t)[i]) * spread[i];
            upper = upper + half * (T::one() - fixed[i]) * spread[i];
        }
    }
    let gap = a.to_eigen(x0_gap);
    for i in 0..d {
        exact = exact + half * (T::one() - schedule.rho(1)[i]) * gap[i] * gap[i];
        upper = upper + half * (T::one() - fixed[i]) * gap[i] * gap[i];
    }
    Ok((exact, upper))
}

/// `w(α, c) = (αc² + (1 - c)²) / (1 - c²)`.
pub fn w<T: Real>(alpha: T, c: T) -> T {
    (alpha * c * c + (T::one() - c) * (T::one() - c)) / (T::one() - c * c)
}

/// Lower bound on the regret of fixed interpolation with coefficient
/// eigenvalues `c` (aligned with `A`'s eigenvalues):
/// `(T/2) Σ_{j∉Z} (w(λⱼ, cⱼ) - (1 - λⱼᴸ)) (PᵀΣP)ⱼⱼ - c_max²/(1 - c_max²) · σ²/2`
/// where `Z` collects the directions with `cⱼ = λⱼᴸ`.
pub fn fi_regret_lower<T: Real>(a: &SpectralMatrix<T>, sigma: &Matrix<T>, c: &[T], horizon: usize) -> Result<T> {
    check_fi(a, sigma, c)?;
    let fixed = fixed_point_eigvals(a);
    let excluded: Vec<bool> = c
        .iter()
        .zip(&fixed)
        .map(|(&ci, &li)| (ci - li).abs() <= T::SCALAR_TOL)
        .collect();
    Ok(fi_lower_with(a, sigma, c, &excluded, horizon))
}

/// [`fi_regret_lower`] at the regularized balanced-descent coefficient,
/// with the excluded set taken as the minimum-eigenvalue directions.
pub fn robd_regret_lower<T: Real>(a: &SpectralMatrix<T>, sigma: &Matrix<T>, horizon: usize) -> Result<T> {
    let schedule = CoefficientSchedule::robd(a, 1)?;
    let c = schedule.rho(1);
    check_fi(a, sigma, c)?;
    let lmin = a.min_eigval();
    let excluded: Vec<bool> = a.eigvals().iter().map(|&l| (l - lmin).abs() <= T::SCALAR_TOL).collect();
    Ok(fi_lower_with(a, sigma, c, &excluded, horizon))
}

/// The constant `c_max²/(1 - c_max²) · σ²/2` subtracted in the FI bound.
pub fn fi_correction<T: Real>(sigma: &Matrix<T>, c: &[T]) -> T {
    let cmax = c.iter().fold(T::zero(), |m, &x| m.max(x));
    cmax * cmax / (T::one() - cmax * cmax) * sigma.trace() * lit(0.5)
}

fn fi_lower_with<T: Real>(a: &SpectralMatrix<T>, sigma: &Matrix<T>, c: &[T], excluded: &[bool], horizon: usize) -> T {
    let spread = a.project_diagonal(sigma);
    let mut linear = T::zero();
    for j in 0..a.dim() {
        if excluded[j] {
            continue;
        }
        let l = a.eigvals()[j];
        linear = linear + (w(l, c[j]) - (T::one() - fixed_point_eigval(l))) * spread[j];
    }
    lit::<T>(horizon as f64) * lit(0.5) * linear - fi_correction(sigma, c)
}

fn check_fi<T: Real>(a: &SpectralMatrix<T>, sigma: &Matrix<T>, c: &[T]) -> Result<()> {
    if c.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: c.len(),
        });
    }
    if sigma.rows() != a.dim() || sigma.cols() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: sigma.rows(),
        });
    }
    if let Some((index, &value)) = c.iter().enumerate().find(|(_, &x)| !(x > T::zero() && x < T::one())) {
        return Err(Error::EigvalOutOfRange {
            index,
            value: to_f64(value),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretVariant {
    /// Uses only the smallest eigenvalue; requires identical covariances.
    MinEig,
    /// Sums over every eigen-direction.
    DimSum,
}

/// Constant upper bound on the regret of the γ-family against the adaptive
/// policy: `σ²/4 · ((1 + 4/λ)^(γ/2) - 1) / (λ + 2)` at `λ_min`, or summed
/// over all eigenvalues. For `MinEig`, `sigma2` is `tr(Σ)`; for `DimSum` it
/// is the variance along each eigen-direction.
pub fn lai_gamma_regret_upper<T: Real>(a: &SpectralMatrix<T>, sigma2: T, gamma: T, variant: RegretVariant) -> Result<T> {
    check_gamma(gamma)?;
    let term = |l: T| {
        let grown = (gamma * lit(0.5) * (lit::<T>(4.0) / l).ln_1p()).exp_m1();
        grown / (l + lit(2.0))
    };
    let quarter = sigma2 * lit(0.25);
    Ok(match variant {
        RegretVariant::MinEig => quarter * term(a.min_eigval()),
        RegretVariant::DimSum => quarter * a.eigvals().iter().map(|&l| term(l)).sum::<T>(),
    })
}

/// `1 + ½(sqrt(1 + 4/λ_min) - 1)`.
pub fn robd_cr<T: Real>(lambda_min: T) -> T {
    T::one() + robd_regularizer(lambda_min) / lambda_min
}

/// `1 + 1/λ_min`.
pub fn lai_cr_upper<T: Real>(lambda_min: T) -> T {
    T::one() + lambda_min.recip()
}

/// `1 + max{½(sqrt(κ² + 4κ/λ_min) - κ), (2/λ_min)/((1 + 4/λ_min)^(γ/2) + 1)}`.
pub fn lai_gamma_cr_upper<T: Real>(a: &SpectralMatrix<T>, gamma: T) -> Result<T> {
    check_gamma(gamma)?;
    let (lmin, kappa) = (a.min_eigval(), a.condition_number());
    let four = lit::<T>(4.0);
    let tracking = lit::<T>(0.5) * ((kappa * kappa + four * kappa / lmin).sqrt() - kappa);
    let pull = (lit::<T>(2.0) / lmin) / ((gamma * lit(0.5) * (four / lmin).ln_1p()).exp() + T::one());
    Ok(T::one() + tracking.max(pull))
}

/// `1 + sqrt(κ/λ_min)`, the small-eigenvalue form for γ = 1.
pub fn lai1_cr_small_lambda<T: Real>(a: &SpectralMatrix<T>) -> T {
    T::one() + (a.condition_number() / a.min_eigval()).sqrt()
}

/// `1 + max{sqrt(κ/λ_min), 2^(1-γ) / λ_min^(1-γ/2)}`, the small-eigenvalue
/// form for general γ.
pub fn lai_gamma_cr_small_lambda<T: Real>(a: &SpectralMatrix<T>, gamma: T) -> Result<T> {
    check_gamma(gamma)?;
    let (lmin, kappa) = (a.min_eigval(), a.condition_number());
    let two = lit::<T>(2.0);
    let pull = two.powf(T::one() - gamma) / lmin.powf(T::one() - gamma / two);
    Ok(T::one() + (kappa / lmin).sqrt().max(pull))
}

/// Competitive ratio of any policy written as
/// `argmin f_t(x) + D_h(x‖x_{t-1}) + D_{g_t}(x‖v_t)`:
/// `1 + max{β′_max/m, (β²/α)/(α′_min + m)}`.
pub fn framework_cr<T: Real>(m: T, alpha: T, beta: T, alpha_prime_min: T, beta_prime_max: T) -> Result<T> {
    let ok = m > T::zero()
        && alpha > T::zero()
        && beta >= alpha
        && alpha_prime_min >= T::zero()
        && beta_prime_max >= alpha_prime_min
        && [m, alpha, beta, beta_prime_max].iter().all(|x| x.is_finite());
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "framework parameters need m > 0, 0 < α ≤ β, 0 ≤ α′ ≤ β′ (got m={}, α={}, β={}, α′={}, β′={})",
            to_f64(m),
            to_f64(alpha),
            to_f64(beta),
            to_f64(alpha_prime_min),
            to_f64(beta_prime_max)
        )));
    }
    let pull = beta * beta / alpha / (alpha_prime_min + m);
    Ok(T::one() + (beta_prime_max / m).max(pull))
}

/// `(α′_min, β′_max)`: the extreme eigenvalues of `C_t⁻¹ - I - A` over all
/// rounds of `schedule`. Round-off below zero is clamped.
pub fn framework_params<T: Real>(schedule: &CoefficientSchedule<T>) -> (T, T) {
    let a = schedule.hitting_matrix();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for row in schedule.rows() {
        for (&rho, &l) in row.iter().zip(a.eigvals()) {
            let g = rho.recip() - T::one() - l;
            lo = lo.min(g);
            hi = hi.max(g);
        }
    }
    (lo.max(T::zero()), hi.max(T::zero()))
}

/// Framework bound for an interpolation schedule with quadratic costs
/// (`m = λ_min`, `α = β = 1`).
pub fn schedule_cr<T: Real>(schedule: &CoefficientSchedule<T>) -> Result<T> {
    let (lo, hi) = framework_params(schedule);
    framework_cr(schedule.hitting_matrix().min_eigval(), T::one(), T::one(), lo, hi)
}

/// `λᴸ(λ_max) σ² T / 2`.
pub fn ftm_regret_lower<T: Real>(lambda_max: T, sigma2: T, horizon: usize) -> T {
    fixed_point_eigval(lambda_max) * sigma2 * lit(0.5) * lit(horizon as f64)
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if gamma >= T::zero() && gamma <= T::one() {
        Ok(())
    } else {
        Err(Error::GammaOutOfRange(to_f64(gamma)))
    }
}

/// Every closed-form quantity that applies to one configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub lai_cost_exact: Option<f64>,
    pub lai_cost_upper: Option<f64>,
    pub fi_regret_lower: Option<f64>,
    pub lai_gamma_regret_upper: Option<f64>,
    pub lai_gamma_regret_upper_dimsum: Option<f64>,
    pub robd_cr: Option<f64>,
    pub lai_cr_upper: Option<f64>,
    pub lai_gamma_cr_upper: Option<f64>,
    pub lai1_cr_smalllambda: Option<f64>,
    pub lai_gamma_cr_smalllambda: Option<f64>,
    pub ftm_regret_lower: Option<f64>,
    pub framework_cr: Option<f64>,
}

/// Inputs for [`BoundReport::evaluate`]; missing entries switch off the
/// quantities that need them.
#[derive(Clone, Debug, Default)]
pub struct BoundInputs {
    pub gamma: Option<f64>,
    pub horizon: Option<usize>,
    /// Covariance of every increment.
    pub sigma: Option<Matrix<f64>>,
}

impl BoundReport {
    pub fn evaluate(a: &SpectralMatrix<f64>, inputs: &BoundInputs) -> Result<Self> {
        let lmin = a.min_eigval();
        let mut r = BoundReport {
            robd_cr: Some(robd_cr(lmin)),
            lai_cr_upper: Some(lai_cr_upper(lmin)),
            lai1_cr_smalllambda: Some(lai1_cr_small_lambda(a)),
            ..Self::default()
        };
        if let Some(g) = inputs.gamma {
            r.lai_gamma_cr_upper = Some(lai_gamma_cr_upper(a, g)?);
            r.lai_gamma_cr_smalllambda = Some(lai_gamma_cr_small_lambda(a, g)?);
        }
        let horizon = inputs.horizon;
        if let Some(h) = horizon {
            let schedule = match inputs.gamma {
                Some(g) => CoefficientSchedule::lai_gamma(a, h, g)?,
                None => CoefficientSchedule::lai(a, h)?,
            };
            r.framework_cr = Some(schedule_cr(&schedule)?);
        }
        if let Some(sigma) = &inputs.sigma {
            let sigma2 = sigma.trace();
            if let Some(g) = inputs.gamma {
                r.lai_gamma_regret_upper = Some(lai_gamma_regret_upper(a, sigma2, g, RegretVariant::MinEig)?);
                // The summed variant wants a common per-direction variance; the
                // largest one keeps it an upper bound for anisotropic Σ.
                let per_dir = a.project_diagonal(sigma).into_iter().fold(0.0, f64::max);
                r.lai_gamma_regret_upper_dimsum = Some(lai_gamma_regret_upper(a, per_dir, g, RegretVariant::DimSum)?);
            }
            if let Some(h) = horizon {
                let (exact, upper) = lai_expected_cost(a, &Covariances::Constant(sigma), h, &vec![0.0; a.dim()])?;
                r.lai_cost_exact = Some(exact);
                r.lai_cost_upper = Some(upper);
                r.fi_regret_lower = Some(robd_regret_lower(a, sigma, h)?);
                r.ftm_regret_lower = Some(ftm_regret_lower(a.max_eigval(), sigma2, h));
            }
        }
        Ok(r)
    }
}
