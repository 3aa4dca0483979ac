//! Time-indexed interpolation coefficients.
//!
//! A schedule stores, for every round `t = 1..=T`, the eigenvalues `ρᵢᵗ` of
//! the coefficient matrix `C_t = P diag(ρᵗ) Pᵀ`, where `P` is the eigenbasis
//! of the hitting-cost matrix `A`. Eigenvalue index `i` follows the
//! (ascending) order of `A.eigvals()`.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{fixed_point_eigval, gamma_regularizer, robd_regularizer, SpectralMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleKind<T> {
    /// Backward recursion from `C_T = (I + A)⁻¹`.
    Lai,
    /// Backward recursion from the γ-shifted terminal coefficient.
    LaiGamma(T),
    /// A constant, user-supplied coefficient matrix.
    Fixed,
    /// The constant tuned regularized-balanced-descent coefficient.
    Robd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSchedule<T> {
    a: SpectralMatrix<T>,
    kind: ScheduleKind<T>,
    per_round: Vec<Vec<T>>,
}

impl<T: Real> CoefficientSchedule<T> {
    /// `C_T = (I + A)⁻¹` and `C_t⁻¹ = 2I + A - C_{t+1}`.
    pub fn lai(a: &SpectralMatrix<T>, horizon: usize) -> Result<Self> {
        check_horizon(horizon)?;
        let terminal = a.eigvals().iter().map(|&l| (T::one() + l).recip()).collect();
        Ok(Self::backward(a, horizon, terminal, ScheduleKind::Lai))
    }

    /// Terminal eigenvalues `(1 + λᵢ + (λᵢ/2)((1 + 4/λᵢ)^(γ/2) - 1))⁻¹`
    /// followed by the same backward recursion as [`lai`](Self::lai).
    pub fn lai_gamma(a: &SpectralMatrix<T>, horizon: usize, gamma: T) -> Result<Self> {
        check_horizon(horizon)?;
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(Error::GammaOutOfRange(to_f64(gamma)));
        }
        let terminal = a
            .eigvals()
            .iter()
            .map(|&l| (T::one() + l + gamma_regularizer(l, gamma)).recip())
            .collect();
        Ok(Self::backward(a, horizon, terminal, ScheduleKind::LaiGamma(gamma)))
    }

    /// Constant `(A + (1 + μ₂*(λ_min)) I)⁻¹`.
    pub fn robd(a: &SpectralMatrix<T>, horizon: usize) -> Result<Self> {
        check_horizon(horizon)?;
        let mu = robd_regularizer(a.min_eigval());
        let rho: Vec<T> = a.eigvals().iter().map(|&l| (l + T::one() + mu).recip()).collect();
        Ok(Self {
            a: a.clone(),
            kind: ScheduleKind::Robd,
            per_round: vec![rho; horizon],
        })
    }

    /// Constant coefficient with the supplied eigenvalues (aligned with
    /// `a.eigvals()`), each strictly inside (0, 1).
    pub fn fixed(a: &SpectralMatrix<T>, eigvals: &[T], horizon: usize) -> Result<Self> {
        check_horizon(horizon)?;
        if eigvals.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: eigvals.len(),
            });
        }
        if let Some((index, &value)) = eigvals
            .iter()
            .enumerate()
            .find(|(_, &c)| !(c > T::zero() && c < T::one()))
        {
            return Err(Error::EigvalOutOfRange {
                index,
                value: to_f64(value),
            });
        }
        Ok(Self {
            a: a.clone(),
            kind: ScheduleKind::Fixed,
            per_round: vec![eigvals.to_vec(); horizon],
        })
    }

    /// The fixed interpolation at `C_L`.
    pub fn fixed_point(a: &SpectralMatrix<T>, horizon: usize) -> Result<Self> {
        Self::fixed(a, &fixed_point_eigvals(a), horizon)
    }

    fn backward(a: &SpectralMatrix<T>, horizon: usize, terminal: Vec<T>, kind: ScheduleKind<T>) -> Self {
        let two = lit::<T>(2.0);
        let mut per_round = vec![terminal; horizon];
        for t in (0..horizon - 1).rev() {
            let next = per_round[t + 1].clone();
            per_round[t] = a
                .eigvals()
                .iter()
                .zip(&next)
                .map(|(&l, &rho)| (two + l - rho).recip())
                .collect();
        }
        Self {
            a: a.clone(),
            kind,
            per_round,
        }
    }

    pub fn horizon(&self) -> usize {
        self.per_round.len()
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn kind(&self) -> ScheduleKind<T> {
        self.kind
    }

    pub fn hitting_matrix(&self) -> &SpectralMatrix<T> {
        &self.a
    }

    /// Eigenvalues of `C_t` for the 1-based round `t`.
    pub fn rho(&self, t: usize) -> &[T] {
        &self.per_round[t - 1]
    }

    /// All rounds, `rows()[t - 1]` being round `t`.
    pub fn rows(&self) -> &[Vec<T>] {
        &self.per_round
    }

    /// `C_t` as a spectral matrix.
    pub fn coefficient_matrix(&self, t: usize) -> SpectralMatrix<T> {
        self.a
            .with_eigvals(self.rho(t).to_vec())
            .expect("schedule eigenvalues lie in (0, 1)")
    }

    /// `max |1/ρᵢᵗ - (2 + λᵢ - ρᵢᵗ⁺¹)|` over `t < T`.
    pub fn recursion_residual(&self) -> T {
        let two = lit::<T>(2.0);
        let mut worst = T::zero();
        for t in 0..self.horizon().saturating_sub(1) {
            for ((&l, &rho), &next) in self.a.eigvals().iter().zip(&self.per_round[t]).zip(&self.per_round[t + 1]) {
                worst = worst.max((rho.recip() - (two + l - next)).abs());
            }
        }
        worst
    }

    /// `max |(ρᵢᵗ - λᵢᴸ) - (ρᵢᵗ⁺¹ - λᵢᴸ) ρᵢᵗ λᵢᴸ|` over `t < T`.
    pub fn contraction_residual(&self) -> T {
        let fixed = fixed_point_eigvals(&self.a);
        let mut worst = T::zero();
        for t in 0..self.horizon().saturating_sub(1) {
            for i in 0..self.dim() {
                let (rho, next, cl) = (self.per_round[t][i], self.per_round[t + 1][i], fixed[i]);
                worst = worst.max(((rho - cl) - (next - cl) * rho * cl).abs());
            }
        }
        worst
    }

    /// True when `λᵢᴸ < ρᵢ¹ < … < ρᵢᵀ` for every `i`.
    pub fn is_strictly_increasing_above_fixed_point(&self) -> bool {
        let fixed = fixed_point_eigvals(&self.a);
        (0..self.dim()).all(|i| {
            let mut prev = fixed[i];
            self.per_round.iter().all(|row| {
                let ok = row[i] > prev;
                prev = row[i];
                ok
            })
        })
    }

    /// True when every eigenvalue of every round lies in (0, 1).
    pub fn eigvals_in_unit_interval(&self) -> bool {
        self.per_round.iter().flatten().all(|&r| r > T::zero() && r < T::one())
    }
}

/// Eigenvalues of `C_L`, aligned with `a.eigvals()`.
pub fn fixed_point_eigvals<T: Real>(a: &SpectralMatrix<T>) -> Vec<T> {
    a.eigvals().iter().map(|&l| fixed_point_eigval(l)).collect()
}

/// Right-hand side of the eigenvalue-gap bound between the plain and the
/// γ-shifted schedules at round `t`:
/// `(λᵢ/2)((1 + 4/λᵢ)^(γ/2) - 1) · (1/(1 + λᵢ))^(2(T - t + 1))`.
pub fn eigen_gap_bound<T: Real>(a: &SpectralMatrix<T>, horizon: usize, gamma: T, t: usize) -> Result<Vec<T>> {
    if t == 0 || t > horizon {
        return Err(Error::InvalidParameter(format!("round {t} outside 1..={horizon}")));
    }
    let exponent = lit::<T>((2 * (horizon - t + 1)) as f64);
    Ok(a.eigvals()
        .iter()
        .map(|&l| gamma_regularizer(l, gamma) * (T::one() + l).recip().powf(exponent))
        .collect())
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        Err(Error::InvalidParameter("horizon must be at least 1".into()))
    } else {
        Ok(())
    }
}
