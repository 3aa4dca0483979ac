//! Seeded generators of minimizer traces.
//!
//! Randomness comes from ChaCha12 streams keyed by `(seed, tag)` with the
//! replication index selecting the stream, so every replication can be
//! generated independently and in any order.

use rand::distr::{Distribution, Open01};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Gumbel, Pareto, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::spectral::SpectralMatrix;
use crate::trace::{MinimizerTrace, Provenance};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ADVERSARY_TAG: u64 = 0xad5e_0000_0000_0000;

/// Zero-mean increment distributions. Heavy-tailed families are symmetrized
/// by an independent fair sign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum IncrementFamily {
    Uniform,
    Normal,
    Laplace,
    Logistic,
    /// Centered by subtracting the Euler-Mascheroni multiple of the scale.
    Gumbel,
    /// `± exp(σ_ln Z)`, rescaled.
    LognormalSym {
        #[serde(default = "default_sigma_ln")]
        sigma_ln: f64,
    },
    /// `± Lomax(α)`, rescaled; needs `α > 2` for a finite variance.
    LomaxSym { alpha: f64 },
}

fn default_sigma_ln() -> f64 {
    1.0
}

impl IncrementFamily {
    pub const LIGHT_TAILED: [IncrementFamily; 5] = [
        IncrementFamily::Uniform,
        IncrementFamily::Normal,
        IncrementFamily::Laplace,
        IncrementFamily::Logistic,
        IncrementFamily::Gumbel,
    ];
}

/// A family together with the per-coordinate variance of its draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementSpec {
    #[serde(flatten)]
    pub family: IncrementFamily,
    pub variance: f64,
}

impl IncrementSpec {
    pub fn new(family: IncrementFamily, variance: f64) -> Self {
        Self { family, variance }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.variance >= 0.0 && self.variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "increment variance must be finite and non-negative, got {}",
                self.variance
            )));
        }
        match self.family {
            IncrementFamily::LomaxSym { alpha } if !(alpha > 2.0 && alpha.is_finite()) => Err(
                Error::InvalidParameter(format!("lomax shape must exceed 2 for finite variance, got {alpha}")),
            ),
            IncrementFamily::LognormalSym { sigma_ln } if !(sigma_ln > 0.0 && sigma_ln.is_finite()) => Err(
                Error::InvalidParameter(format!("log-normal sigma must be positive, got {sigma_ln}")),
            ),
            _ => Ok(()),
        }
    }

    fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        let v = self.variance;
        if v == 0.0 {
            return Ok(Sampler::Zero);
        }
        let pi = std::f64::consts::PI;
        Ok(match self.family {
            IncrementFamily::Uniform => Sampler::Uniform((3.0 * v).sqrt()),
            IncrementFamily::Normal => Sampler::Normal(v.sqrt()),
            IncrementFamily::Laplace => Sampler::Laplace((v / 2.0).sqrt()),
            IncrementFamily::Logistic => Sampler::Logistic((3.0 * v).sqrt() / pi),
            IncrementFamily::Gumbel => {
                let beta = (6.0 * v).sqrt() / pi;
                Sampler::Gumbel(Gumbel::new(-EULER_GAMMA * beta, beta).expect("positive scale"))
            }
            // E[exp(2σZ)] = exp(2σ²), so k² exp(2σ²) = v.
            IncrementFamily::LognormalSym { sigma_ln } => Sampler::LognormalSym {
                sigma: sigma_ln,
                k: v.sqrt() * (-sigma_ln * sigma_ln).exp(),
            },
            // A Lomax(λ, α) draw has E[X²] = 2λ² / ((α-1)(α-2)).
            IncrementFamily::LomaxSym { alpha } => {
                let lambda = (v * (alpha - 1.0) * (alpha - 2.0) / 2.0).sqrt();
                Sampler::LomaxSym {
                    pareto: Pareto::new(lambda, alpha).expect("positive parameters"),
                    lambda,
                }
            }
        })
    }
}

#[derive(Clone, Debug)]
enum Sampler {
    Zero,
    Uniform(f64),
    Normal(f64),
    Laplace(f64),
    Logistic(f64),
    Gumbel(Gumbel<f64>),
    LognormalSym { sigma: f64, k: f64 },
    LomaxSym { pareto: Pareto<f64>, lambda: f64 },
}

impl Sampler {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Uniform(a) => rng.random_range(-*a..*a),
            Self::Normal(s) => s * rng.sample::<f64, _>(StandardNormal),
            Self::Laplace(b) => {
                let u: f64 = rng.sample(Open01);
                if u < 0.5 {
                    b * (2.0 * u).ln()
                } else {
                    -b * (2.0 * (1.0 - u)).ln()
                }
            }
            Self::Logistic(s) => {
                let u: f64 = rng.sample(Open01);
                s * (u / (1.0 - u)).ln()
            }
            Self::Gumbel(g) => g.sample(rng),
            Self::LognormalSym { sigma, k } => {
                let z: f64 = rng.sample(StandardNormal);
                signed(rng, k * (sigma * z).exp())
            }
            Self::LomaxSym { pareto, lambda } => {
                let x = pareto.sample(rng) - lambda;
                signed(rng, x)
            }
        }
    }
}

fn signed<R: Rng + ?Sized>(rng: &mut R, x: f64) -> f64 {
    if rng.random::<bool>() {
        x
    } else {
        -x
    }
}

/// `count` i.i.d. vectors of dimension `dim` with independent coordinates.
pub fn sample_increments<R: Rng + ?Sized>(
    spec: &IncrementSpec,
    count: usize,
    dim: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let sampler = spec.sampler()?;
    Ok((0..count)
        .map(|_| (0..dim).map(|_| sampler.draw(rng)).collect())
        .collect())
}

/// Maps unit-variance increments `z` (concatenated over the segment) to
/// `L z` where `L Lᵀ = sigma_block`.
pub fn correlate(increments: &[Vec<f64>], sigma_block: &Matrix<f64>) -> Result<Vec<Vec<f64>>> {
    let factor = block_factor(sigma_block)?;
    apply_factor(increments, &factor)
}

fn block_factor(sigma_block: &Matrix<f64>) -> Result<Matrix<f64>> {
    if !sigma_block.is_square() {
        return Err(Error::DimensionMismatch {
            expected: sigma_block.rows(),
            got: sigma_block.cols(),
        });
    }
    sigma_block
        .cholesky()
        .ok_or(Error::NotPositiveDefinite(f64::NAN))
}

fn apply_factor(increments: &[Vec<f64>], factor: &Matrix<f64>) -> Result<Vec<Vec<f64>>> {
    let dim = increments.first().map_or(0, Vec::len);
    let flat: Vec<f64> = increments.iter().flatten().copied().collect();
    if flat.len() != factor.rows() || increments.iter().any(|u| u.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: factor.rows(),
            got: flat.len(),
        });
    }
    let out = factor.matvec(&flat);
    Ok(out.chunks(dim.max(1)).map(<[f64]>::to_vec).collect())
}

/// Direction of the alternating adversary in terms of `A`'s eigenbasis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayAxis {
    /// Eigenvector of the smallest eigenvalue.
    Min,
    /// Eigenvector of the largest eigenvalue.
    Max,
    /// Equal weight on every eigenvector.
    Uniform,
}

/// How adversarial minimizers are chosen. The sequence is fixed in advance
/// and does not react to the player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum AdversaryRule {
    /// `x₀ + R·u, x₀ - R·u, x₀ + R·u, …` over successive adversarial rounds.
    AlternatingRay { amplitude: f64, direction: Vec<f64> },
    /// The k-th adversarial round plays `points[k]`.
    FixedPoints { points: Vec<Vec<f64>> },
}

impl AdversaryRule {
    pub fn alternating_ray(a: &SpectralMatrix<f64>, amplitude: f64, axis: RayAxis) -> Self {
        let direction = match axis {
            RayAxis::Min => a.min_eigvec(),
            RayAxis::Max => a.max_eigvec(),
            RayAxis::Uniform => {
                let w = (a.dim() as f64).sqrt().recip();
                a.from_eigen(&vec![w; a.dim()])
            }
        };
        Self::AlternatingRay { amplitude, direction }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Self::AlternatingRay { amplitude, direction } => {
                if !(*amplitude >= 0.0 && amplitude.is_finite()) {
                    return Err(Error::InvalidParameter(format!("amplitude must be non-negative, got {amplitude}")));
                }
                if direction.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: direction.len(),
                    });
                }
                if direction.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("ray direction must be finite".into()));
                }
            }
            Self::FixedPoints { points } => {
                if let Some(p) = points.iter().find(|p| p.len() != dim) {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: p.len(),
                    });
                }
                if points.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("adversary points must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Minimizer for the `k`-th (0-based) adversarial round.
    fn point(&self, k: usize, x0: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::AlternatingRay { amplitude, direction } => {
                let s = if k % 2 == 0 { *amplitude } else { -amplitude };
                Ok(x0.iter().zip(direction).map(|(&x, &u)| x + s * u).collect())
            }
            Self::FixedPoints { points } => points.get(k).cloned().ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "fixed_points supplies {} points but round {} is adversarial",
                    points.len(),
                    k + 1
                ))
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TraceMode {
    /// `v_t = x₀ + Σ_{s≤t} u_s`. An optional covariance over the
    /// concatenated `d·T` increments correlates them across rounds.
    Martingale {
        increments: IncrementSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        correlation: Option<Matrix<f64>>,
    },
    /// Five consecutive segments with their own increment law. Segment `i`
    /// covers rounds `⌊iT/5⌋ + 1 ..= ⌊(i+1)T/5⌋`. Optional covariances act
    /// within a segment only.
    ShiftSchedule {
        segments: Vec<IncrementSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        correlation: Option<Vec<Matrix<f64>>>,
    },
    /// A martingale in which a fixed random subset of rounds is replaced by
    /// adversarial minimizers.
    Mixed {
        base: IncrementSpec,
        adversarial_pct: f64,
        adversary: AdversaryRule,
    },
    PureAdversarial { adversary: AdversaryRule },
}

pub const SHIFT_SEGMENTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSpec {
    pub dim: usize,
    pub horizon: usize,
    pub x0: Vec<f64>,
    pub mode: TraceMode,
    pub seed: u64,
}

impl TraceSpec {
    /// A trace spec starting at the origin.
    pub fn new(dim: usize, horizon: usize, mode: TraceMode, seed: u64) -> Self {
        Self {
            dim,
            horizon,
            x0: vec![0.0; dim],
            mode,
            seed,
        }
    }

    pub fn with_horizon(&self, horizon: usize) -> Self {
        Self {
            horizon,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.horizon == 0 {
            return Err(Error::InvalidParameter("trace dimension and horizon must be positive".into()));
        }
        if self.x0.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.x0.len(),
            });
        }
        match &self.mode {
            TraceMode::Martingale { increments, correlation } => {
                increments.validate()?;
                if let Some(c) = correlation {
                    self.check_block(c, self.horizon)?;
                }
            }
            TraceMode::ShiftSchedule { segments, correlation } => {
                if segments.len() != SHIFT_SEGMENTS {
                    return Err(Error::InvalidParameter(format!(
                        "shift schedule needs {SHIFT_SEGMENTS} segments, got {}",
                        segments.len()
                    )));
                }
                segments.iter().try_for_each(IncrementSpec::validate)?;
                if let Some(blocks) = correlation {
                    if blocks.len() != SHIFT_SEGMENTS {
                        return Err(Error::InvalidParameter(format!(
                            "shift schedule needs {SHIFT_SEGMENTS} correlation blocks, got {}",
                            blocks.len()
                        )));
                    }
                    for (block, range) in blocks.iter().zip(segment_bounds(self.horizon)) {
                        self.check_block(block, range.1 - range.0)?;
                    }
                }
            }
            TraceMode::Mixed {
                base,
                adversarial_pct,
                adversary,
            } => {
                base.validate()?;
                if !(0.0..=100.0).contains(adversarial_pct) {
                    return Err(Error::InvalidParameter(format!(
                        "adversarial percentage must lie in [0, 100], got {adversarial_pct}"
                    )));
                }
                adversary.validate(self.dim)?;
            }
            TraceMode::PureAdversarial { adversary } => adversary.validate(self.dim)?,
        }
        Ok(())
    }

    fn check_block(&self, block: &Matrix<f64>, rounds: usize) -> Result<()> {
        let n = self.dim * rounds;
        if block.rows() != n || block.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: block.rows(),
            });
        }
        Ok(())
    }

    /// Validates this TraceSpec and factors any covariance blocks once.
    pub fn generator(&self) -> Result<TraceGenerator> {
        self.validate()?;
        let factors = match &self.mode {
            TraceMode::Martingale {
                correlation: Some(c), ..
            } => vec![Some(block_factor(c)?)],
            TraceMode::ShiftSchedule {
                correlation: Some(blocks),
                ..
            } => blocks.iter().map(|b| block_factor(b).map(Some)).collect::<Result<_>>()?,
            _ => Vec::new(),
        };
        Ok(TraceGenerator {
            spec: self.clone(),
            factors,
            adversarial: self.adversarial_rounds(),
        })
    }

    /// The 1-based adversarial rounds, sorted. Depends only on `(seed, p)`.
    pub fn adversarial_rounds(&self) -> Vec<usize> {
        match &self.mode {
            TraceMode::Mixed { adversarial_pct, .. } => {
                let count = ((adversarial_pct / 100.0) * self.horizon as f64).round() as usize;
                let mut rng = substream(self.seed, ADVERSARY_TAG ^ adversarial_pct.to_bits(), 0);
                let mut rounds: Vec<usize> = index::sample(&mut rng, self.horizon, count.min(self.horizon))
                    .into_iter()
                    .map(|i| i + 1)
                    .collect();
                rounds.sort_unstable();
                rounds
            }
            TraceMode::PureAdversarial { .. } => (1..=self.horizon).collect(),
            _ => Vec::new(),
        }
    }
}

/// Half-open 0-based round ranges of the shift segments.
pub fn segment_bounds(horizon: usize) -> Vec<(usize, usize)> {
    (0..SHIFT_SEGMENTS)
        .map(|i| (i * horizon / SHIFT_SEGMENTS, (i + 1) * horizon / SHIFT_SEGMENTS))
        .collect()
}

/// ChaCha12 stream for `(seed, tag)`, stream number `replication`.
pub fn substream(seed: u64, tag: u64, replication: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..].copy_from_slice(b"soqo-trace-strm\0");
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(replication);
    rng
}

/// A validated [`TraceSpec`] with its covariance factors cached.
#[derive(Clone, Debug)]
pub struct TraceGenerator {
    spec: TraceSpec,
    factors: Vec<Option<Matrix<f64>>>,
    adversarial: Vec<usize>,
}

impl TraceGenerator {
    pub fn spec(&self) -> &TraceSpec {
        &self.spec
    }

    pub fn adversarial_rounds(&self) -> &[usize] {
        &self.adversarial
    }

    /// Replication `replication` of this trace. Bit-identical across calls.
    pub fn generate(&self, replication: u64) -> Result<MinimizerTrace<f64>> {
        let spec = &self.spec;
        let (d, horizon, seed) = (spec.dim, spec.horizon, spec.seed);
        let increments = match &spec.mode {
            TraceMode::Martingale { increments, .. } => {
                self.segment(increments, 0, horizon, self.factors.first(), seed, replication)?
            }
            TraceMode::ShiftSchedule { segments, .. } => {
                let mut all = Vec::with_capacity(horizon);
                for (i, ((lo, hi), law)) in segment_bounds(horizon).into_iter().zip(segments).enumerate() {
                    all.extend(self.segment(law, i as u64, hi - lo, self.factors.get(i), seed, replication)?);
                }
                all
            }
            TraceMode::Mixed { base, .. } => self.segment(base, 0, horizon, None, seed, replication)?,
            TraceMode::PureAdversarial { .. } => vec![vec![0.0; d]; horizon],
        };

        let mut v = Vec::with_capacity(horizon);
        let mut level = spec.x0.clone();
        for u in &increments {
            level.iter_mut().zip(u).for_each(|(x, du)| *x += du);
            v.push(level.clone());
        }
        if let TraceMode::Mixed { adversary, .. } | TraceMode::PureAdversarial { adversary } = &spec.mode {
            for (k, &t) in self.adversarial.iter().enumerate() {
                v[t - 1] = adversary.point(k, &spec.x0)?;
            }
        }
        Ok(MinimizerTrace::new(spec.x0.clone(), v)?.with_provenance(Provenance {
            spec: spec.clone(),
            replication,
        }))
    }

    fn segment(
        &self,
        law: &IncrementSpec,
        tag: u64,
        rounds: usize,
        factor: Option<&Option<Matrix<f64>>>,
        seed: u64,
        replication: u64,
    ) -> Result<Vec<Vec<f64>>> {
        let mut rng = substream(seed, tag, replication);
        match factor.and_then(Option::as_ref) {
            Some(l) => {
                let unit = IncrementSpec::new(law.family.clone(), 1.0);
                apply_factor(&sample_increments(&unit, rounds, self.spec.dim, &mut rng)?, l)
            }
            None => sample_increments(law, rounds, self.spec.dim, &mut rng),
        }
    }
}

/// Convenience wrapper: validate, generate one replication.
pub fn generate_trace(spec: &TraceSpec, replication: u64) -> Result<MinimizerTrace<f64>> {
    spec.generator()?.generate(replication)
}

/// JSON sidecar describing a trace's provenance.
pub fn provenance_json(trace: &MinimizerTrace<f64>) -> Option<String> {
    trace
        .provenance()
        .map(|p| serde_json::to_string_pretty(p).expect("provenance serializes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(v: f64) -> IncrementSpec {
        IncrementSpec::new(IncrementFamily::Normal, v)
    }

    #[test]
    fn zero_variance_gives_zero_increments() {
        let mut rng = substream(1, 0, 0);
        for fam in IncrementFamily::LIGHT_TAILED.iter().cloned().chain([
            IncrementFamily::LognormalSym { sigma_ln: 1.0 },
            IncrementFamily::LomaxSym { alpha: 3.0 },
        ]) {
            let u = sample_increments(&IncrementSpec::new(fam, 0.0), 10, 3, &mut rng).unwrap();
            assert!(u.iter().flatten().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn lomax_needs_finite_variance() {
        let mut rng = substream(1, 0, 0);
        let bad = IncrementSpec::new(IncrementFamily::LomaxSym { alpha: 2.0 }, 1.0);
        assert!(matches!(sample_increments(&bad, 1, 1, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(IncrementSpec::new(IncrementFamily::Normal, -1.0).validate().is_err());
    }

    #[test]
    fn correlate_identity_and_scaled_identity() {
        let z = vec![vec![0.5, -1.0], vec![2.0, 0.25]];
        assert_eq!(correlate(&z, &Matrix::identity(4)).unwrap(), z);
        let four = Matrix::identity(4).scale(4.0);
        let doubled: Vec<Vec<f64>> = z.iter().map(|r| r.iter().map(|x| 2.0 * x).collect()).collect();
        assert_eq!(correlate(&z, &four).unwrap(), doubled);
        let indefinite = Matrix::from_diagonal(&[1.0, -1.0, 1.0, 1.0]);
        assert!(matches!(correlate(&z, &indefinite), Err(Error::NotPositiveDefinite(_))));
        assert!(correlate(&z, &Matrix::identity(3)).is_err());
    }

    #[test]
    fn segment_bounds_cover_horizon() {
        for horizon in 1..40 {
            let b = segment_bounds(horizon);
            assert_eq!(b[0].0, 0);
            assert_eq!(b[4].1, horizon);
            assert!(b.windows(2).all(|w| w[0].1 == w[1].0));
        }
        assert_eq!(segment_bounds(10), vec![(0, 2), (2, 4), (4, 6), (6, 8), (8, 10)]);
    }

    #[test]
    fn alternating_ray_examples() {
        let a = SpectralMatrix::diagonal(&[1.0]).unwrap();
        let rule = AdversaryRule::alternating_ray(&a, 10.0, RayAxis::Min);
        let mut spec = TraceSpec::new(1, 2, TraceMode::PureAdversarial { adversary: rule }, 3);
        spec.x0 = vec![1.0];
        let tr = generate_trace(&spec, 0).unwrap();
        assert_eq!(tr.minimizers(), &[vec![11.0], vec![-9.0]]);

        let zero = AdversaryRule::alternating_ray(&a, 0.0, RayAxis::Min);
        let spec = TraceSpec::new(1, 3, TraceMode::PureAdversarial { adversary: zero }, 3);
        assert!(generate_trace(&spec, 0).unwrap().minimizers().iter().all(|v| v == &[0.0]));
    }

    #[test]
    fn ray_axes_resolve_from_eigenbasis() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let a = SpectralMatrix::decompose(&m).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let dir = |axis| match AdversaryRule::alternating_ray(&a, 1.0, axis) {
            AdversaryRule::AlternatingRay { direction, .. } => direction,
            _ => unreachable!(),
        };
        let min = dir(RayAxis::Min);
        assert!((min[0] - r).abs() < 1e-12 && (min[1] + r).abs() < 1e-12);
        let max = dir(RayAxis::Max);
        assert!((max[0] - r).abs() < 1e-12 && (max[1] - r).abs() < 1e-12);
        let uni = dir(RayAxis::Uniform);
        assert!((uni[0] * uni[0] + uni[1] * uni[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_points_need_enough_points() {
        let rule = AdversaryRule::FixedPoints {
            points: vec![vec![1.0], vec![2.0]],
        };
        let spec = TraceSpec::new(1, 3, TraceMode::PureAdversarial { adversary: rule.clone() }, 0);
        assert!(generate_trace(&spec, 0).is_err());
        let spec = TraceSpec::new(1, 2, TraceMode::PureAdversarial { adversary: rule }, 0);
        assert_eq!(generate_trace(&spec, 0).unwrap().minimizers(), &[vec![1.0], vec![2.0]]);
    }

    #[test]
    fn mixed_extremes() {
        let a = SpectralMatrix::diagonal(&[0.5, 1.0]).unwrap();
        let adversary = AdversaryRule::alternating_ray(&a, 5.0, RayAxis::Max);
        let mixed = |p| {
            TraceSpec::new(
                2,
                20,
                TraceMode::Mixed {
                    base: normal(1.0),
                    adversarial_pct: p,
                    adversary: adversary.clone(),
                },
                9,
            )
        };
        let mart = TraceSpec::new(
            2,
            20,
            TraceMode::Martingale {
                increments: normal(1.0),
                correlation: None,
            },
            9,
        );
        for r in 0..3 {
            assert_eq!(
                generate_trace(&mixed(0.0), r).unwrap().minimizers(),
                generate_trace(&mart, r).unwrap().minimizers()
            );
        }
        assert_eq!(mixed(100.0).adversarial_rounds(), (1..=20).collect::<Vec<_>>());
        assert_eq!(mixed(30.0).adversarial_rounds().len(), 6);
        assert!(mixed(101.0).validate().is_err());
    }

    #[test]
    fn shift_schedule_needs_five_segments() {
        let spec = TraceSpec::new(
            1,
            10,
            TraceMode::ShiftSchedule {
                segments: vec![normal(1.0); 4],
                correlation: None,
            },
            0,
        );
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = TraceSpec::new(
            2,
            7,
            TraceMode::ShiftSchedule {
                segments: vec![
                    normal(1.0),
                    IncrementSpec::new(IncrementFamily::LognormalSym { sigma_ln: 0.5 }, 2.0),
                    IncrementSpec::new(IncrementFamily::LomaxSym { alpha: 3.0 }, 1.0),
                    IncrementSpec::new(IncrementFamily::Gumbel, 1.0),
                    IncrementSpec::new(IncrementFamily::Uniform, 1.0),
                ],
                correlation: None,
            },
            42,
        );
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<TraceSpec>(&json).unwrap(), spec);
        let tr = generate_trace(&spec, 5).unwrap();
        let side = provenance_json(&tr).unwrap();
        let back: Provenance = serde_json::from_str(&side).unwrap();
        assert_eq!(back.replication, 5);
        assert_eq!(back.spec, spec);
    }
}
