//! Symmetric positive definite matrices held in eigendecomposed form.
//!
//! Every coefficient matrix a policy uses shares its eigenvectors with the
//! hitting-cost matrix `A`, so matrix functions reduce to maps over the
//! eigenvalues and products of such matrices commute.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::{lit, to_f64, Real};

const MAX_JACOBI_SWEEPS: usize = 100;

/// `P · diag(eigvals) · Pᵀ` with orthonormal `P` and strictly positive
/// eigenvalues sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMatrix<T> {
    eigvecs: Matrix<T>,
    eigvals: Vec<T>,
}

impl<T: Real> SpectralMatrix<T> {
    /// Eigendecomposition of a symmetric positive definite matrix by cyclic
    /// Jacobi rotations.
    pub fn decompose(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                got: m.cols(),
            });
        }
        let asym = m.asymmetry();
        if asym > T::MATRIX_TOL {
            return Err(Error::NotSymmetric(to_f64(asym)));
        }
        let (eigvals, eigvecs) = jacobi_eigen(m);
        Self::from_unsorted(eigvecs, eigvals)
    }

    /// Diagonal matrix with the standard basis as eigenvectors.
    pub fn diagonal(eigvals: &[T]) -> Result<Self> {
        Self::from_unsorted(Matrix::identity(eigvals.len()), eigvals.to_vec())
    }

    /// `λ I` in dimension `dim`.
    pub fn scalar(lambda: T, dim: usize) -> Result<Self> {
        Self::diagonal(&vec![lambda; dim])
    }

    /// Assembles a matrix from an orthonormal eigenvector basis (columns) and
    /// eigenvalues, validating both.
    pub fn from_parts(eigvecs: Matrix<T>, eigvals: Vec<T>) -> Result<Self> {
        if !eigvecs.is_square() || eigvecs.rows() != eigvals.len() {
            return Err(Error::DimensionMismatch {
                expected: eigvals.len(),
                got: eigvecs.rows(),
            });
        }
        let defect = eigvecs
            .transpose()
            .matmul(&eigvecs)
            .sub(&Matrix::identity(eigvals.len()))
            .frobenius();
        if defect > T::MATRIX_TOL {
            return Err(Error::InvalidParameter(format!(
                "eigenvector basis is not orthonormal (defect {:e})",
                to_f64(defect)
            )));
        }
        Self::from_unsorted(eigvecs, eigvals)
    }

    fn from_unsorted(eigvecs: Matrix<T>, eigvals: Vec<T>) -> Result<Self> {
        let n = eigvals.len();
        if let Some(&bad) = eigvals.iter().find(|&&l| !(l > T::PD_FLOOR) || !l.is_finite()) {
            return Err(Error::NotPositiveDefinite(to_f64(bad)));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigvals[a].partial_cmp(&eigvals[b]).expect("finite eigenvalues"));
        let mut vecs = Matrix::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            // Deterministic sign: first non-negligible component positive.
            let col = eigvecs.column(old);
            let flip = col
                .iter()
                .find(|c| c.abs() > lit(1e-8))
                .is_some_and(|&c| c < T::zero());
            for i in 0..n {
                vecs[(i, new)] = if flip { -col[i] } else { col[i] };
            }
        }
        Ok(Self {
            eigvecs: vecs,
            eigvals: order.iter().map(|&i| eigvals[i]).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    pub fn eigvals(&self) -> &[T] {
        &self.eigvals
    }

    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub fn eigvecs(&self) -> &Matrix<T> {
        &self.eigvecs
    }

    pub fn min_eigval(&self) -> T {
        self.eigvals[0]
    }

    pub fn max_eigval(&self) -> T {
        self.eigvals[self.dim() - 1]
    }

    pub fn condition_number(&self) -> T {
        self.max_eigval() / self.min_eigval()
    }

    /// Eigenvector belonging to the smallest eigenvalue.
    pub fn min_eigvec(&self) -> Vec<T> {
        self.eigvecs.column(0)
    }

    pub fn max_eigvec(&self) -> Vec<T> {
        self.eigvecs.column(self.dim() - 1)
    }

    /// True when all eigenvalues agree to within the scalar tolerance.
    pub fn is_scalar(&self) -> bool {
        (self.max_eigval() - self.min_eigval()).abs() <= T::SCALAR_TOL * T::one().max(self.max_eigval())
    }

    /// `P diag(λ) Pᵀ` as a dense matrix.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = (0..n)
                    .map(|k| self.eigvecs[(i, k)] * self.eigvals[k] * self.eigvecs[(j, k)])
                    .sum::<T>();
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    /// Coordinates of `x` in the eigenbasis, `Pᵀ x`.
    pub fn to_eigen(&self, x: &[T]) -> Vec<T> {
        self.eigvecs.tr_matvec(x)
    }

    /// Inverse of [`to_eigen`](Self::to_eigen), `P y`.
    pub fn from_eigen(&self, y: &[T]) -> Vec<T> {
        self.eigvecs.matvec(y)
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        let y = self.to_eigen(x);
        y.iter().zip(&self.eigvals).map(|(&yi, &l)| l * yi * yi).sum()
    }

    /// `M x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let y: Vec<T> = self
            .to_eigen(x)
            .iter()
            .zip(&self.eigvals)
            .map(|(&yi, &l)| yi * l)
            .collect();
        self.from_eigen(&y)
    }

    /// Matrix function by eigenvalue mapping. The mapped eigenvalues must stay
    /// strictly positive and finite.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let mapped = self
            .eigvals
            .iter()
            .map(|&l| {
                let v = f(l);
                if v > T::zero() && v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::RangeViolation {
                        eigval: to_f64(l),
                        value: to_f64(v),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_eigvals(mapped)
    }

    /// Same eigenvectors, new eigenvalues (listed in this matrix's eigenvalue
    /// order). The result is re-sorted.
    pub fn with_eigvals(&self, eigvals: Vec<T>) -> Result<Self> {
        if eigvals.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: eigvals.len(),
            });
        }
        Self::from_unsorted(self.eigvecs.clone(), eigvals)
    }

    /// The fixed point `C_L = (A + 2I - sqrt(A² + 4A)) / 2` of the
    /// coefficient recursion `C⁻¹ = 2I + A - C`.
    pub fn fixed_point(&self) -> Self {
        // Each fixed-point eigenvalue is in (0, 1), so the map cannot fail.
        self.map(fixed_point_eigval)
            .expect("fixed-point eigenvalues lie in (0, 1)")
    }

    pub fn inverse(&self) -> Self {
        self.map(|l| l.recip()).expect("inverse of positive eigenvalues")
    }

    /// `e_jᵀ Pᵀ S P e_j` for every eigen-direction `j`: the variance of a
    /// vector with covariance `S` along each eigenvector.
    pub fn project_diagonal(&self, s: &Matrix<T>) -> Vec<T> {
        (0..self.dim())
            .map(|j| {
                let col = self.eigvecs.column(j);
                dot(&col, &s.matvec(&col))
            })
            .collect()
    }

    /// `‖PᵀP - I‖_F`.
    pub fn orthonormality_defect(&self) -> T {
        self.eigvecs
            .transpose()
            .matmul(&self.eigvecs)
            .sub(&Matrix::identity(self.dim()))
            .frobenius()
    }
}

/// Eigenvalue of `C_L` for hitting-cost eigenvalue `lambda`, in the
/// cancellation-free form `2 / (λ + 2 + sqrt(λ² + 4λ))`.
pub fn fixed_point_eigval<T: Real>(lambda: T) -> T {
    let two = lit::<T>(2.0);
    two / (lambda + two + (lambda * lambda + lit::<T>(4.0) * lambda).sqrt())
}

/// The tuned regularizer weight `μ₂*(λ) = (λ/2)(sqrt(1 + 4/λ) - 1)`,
/// evaluated as `2λ / (λ + sqrt(λ² + 4λ))`.
pub fn robd_regularizer<T: Real>(lambda: T) -> T {
    let two = lit::<T>(2.0);
    two * lambda / (lambda + (lambda * lambda + lit::<T>(4.0) * lambda).sqrt())
}

/// `(λ/2)((1 + 4/λ)^(γ/2) - 1)`, the terminal shift used by the γ-family.
/// Computed through `exp_m1` / `ln_1p` so it stays accurate for `λ ≪ 1`.
pub fn gamma_regularizer<T: Real>(lambda: T, gamma: T) -> T {
    let half = lit::<T>(0.5);
    lambda * half * (gamma * half * (lit::<T>(4.0) / lambda).ln_1p()).exp_m1()
}

/// Cyclic Jacobi eigenvalue iteration. Returns eigenvalues (unsorted) and the
/// matching eigenvectors as columns.
fn jacobi_eigen<T: Real>(m: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let n = m.rows();
    let mut a = m.clone();
    a.symmetrize();
    let mut v = Matrix::identity(n);
    let tol = T::SCALAR_TOL * T::one().max(m.frobenius());
    let two = lit::<T>(2.0);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}
