//! Oracle distributions with exact entropies, CDFs and ball masses.

use std::f64::consts::{LN_2, PI, SQRT_2};

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{IntervalSet, LogPoint, PointSample};
use crate::numeric;
use crate::rng;

/// A named distribution with a known density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Uniform on `[0, side]^dim`.
    UniformCube { dim: usize, side: f64 },
    /// `N(0, sigma² I)` in `dim` dimensions.
    IsotropicGaussian { dim: usize, sigma: f64 },
    /// Exponential with the given rate on `[0, ∞)`.
    Exponential { rate: f64 },
    /// Cauchy centred at 0: unbounded, `E|X| = ∞`, but `E[(ln|X|)^+] < ∞`.
    Cauchy { scale: f64 },
    /// Uniform density on the interval union `∪_j [2^(2^j), 2^(2^j) + 1/(j(j+1))]`,
    /// truncated at interval `clamp`, which absorbs the tail mass `1/clamp`.
    Counterexample { clamp: u32 },
}

/// Draws from a [`DistributionSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Points(PointSample),
    /// Interval-union draws, kept in `(interval, offset)` form.
    Structured(StructuredSample),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuredSample {
    pub points: Vec<LogPoint>,
    pub intervals: IntervalSet,
}

impl Sample {
    pub fn len(&self) -> usize {
        match self {
            Sample::Points(s) => s.len(),
            Sample::Structured(s) => s.points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Sample::Points(s) => s.dim(),
            Sample::Structured(_) => 1,
        }
    }

    pub fn as_points(&self) -> Result<&PointSample> {
        match self {
            Sample::Points(s) => Ok(s),
            Sample::Structured(_) => Err(Error::WrongSampleKind { expected: "raw point" }),
        }
    }

    pub fn as_structured(&self) -> Result<&StructuredSample> {
        match self {
            Sample::Structured(s) => Ok(s),
            Sample::Points(_) => Err(Error::WrongSampleKind { expected: "interval-union" }),
        }
    }
}

/// Monte Carlo control for ball masses without a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallMassPrecision {
    /// Target standard error of the estimated mass.
    pub target_se: f64,
    /// Maximum number of draws.
    pub budget: usize,
    pub seed: u64,
}

impl Default for BallMassPrecision {
    fn default() -> Self {
        BallMassPrecision {
            target_se: 1e-3,
            budget: 1_000_000,
            seed: 0,
        }
    }
}

/// A ball mass and its standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallMass {
    pub mass: f64,
    pub std_error: f64,
}

impl BallMass {
    fn exact(mass: f64) -> Self {
        BallMass {
            mass: mass.clamp(0.0, 1.0),
            std_error: 0.0,
        }
    }
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        match *self {
            DistributionSpec::UniformCube { dim, side } => {
                if dim == 0 {
                    return Err(Error::InvalidDimension(dim));
                }
                if !(side > 0.0 && side.is_finite()) {
                    return bad("side must be positive and finite");
                }
            }
            DistributionSpec::IsotropicGaussian { dim, sigma } => {
                if dim == 0 {
                    return Err(Error::InvalidDimension(dim));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return bad("sigma must be positive and finite");
                }
            }
            DistributionSpec::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return bad("rate must be positive and finite");
                }
            }
            DistributionSpec::Cauchy { scale } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return bad("scale must be positive and finite");
                }
            }
            DistributionSpec::Counterexample { clamp } => {
                IntervalSet::new(clamp)?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match *self {
            DistributionSpec::UniformCube { dim, .. } | DistributionSpec::IsotropicGaussian { dim, .. } => dim,
            _ => 1,
        }
    }

    /// Short identifier, e.g. `gaussian(d=1,sigma=1)`.
    pub fn label(&self) -> String {
        match *self {
            DistributionSpec::UniformCube { dim, side } => format!("uniform_cube(d={dim},side={side})"),
            DistributionSpec::IsotropicGaussian { dim, sigma } => {
                format!("isotropic_gaussian(d={dim},sigma={sigma})")
            }
            DistributionSpec::Exponential { rate } => format!("exponential(rate={rate})"),
            DistributionSpec::Cauchy { scale } => format!("cauchy(scale={scale})"),
            DistributionSpec::Counterexample { clamp } => format!("counterexample(clamp={clamp})"),
        }
    }

    /// Interval family of the counterexample.
    pub fn intervals(&self) -> Option<IntervalSet> {
        match *self {
            DistributionSpec::Counterexample { clamp } => IntervalSet::new(clamp).ok(),
            _ => None,
        }
    }

    /// `n` iid draws from the stream keyed by `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        self.sample_with(n, &mut rng::stream(seed, &[rng::purpose::SAMPLE]))
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        self.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter("sample size must be at least 1".into()));
        }
        let coords: Vec<f64> = match *self {
            DistributionSpec::UniformCube { dim, side } => {
                (0..n * dim).map(|_| rng.random::<f64>() * side).collect()
            }
            DistributionSpec::IsotropicGaussian { dim, sigma } => (0..n * dim)
                .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            DistributionSpec::Exponential { rate } => {
                let law = Exp::new(rate).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                (0..n).map(|_| law.sample(rng)).collect()
            }
            DistributionSpec::Cauchy { scale } => {
                let law = Cauchy::new(0.0, scale).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                (0..n).map(|_| law.sample(rng)).collect()
            }
            DistributionSpec::Counterexample { clamp } => {
                let intervals = IntervalSet::new(clamp)?;
                let points = (0..n).map(|_| draw_counterexample(clamp, rng)).collect();
                return Ok(Sample::Structured(StructuredSample { points, intervals }));
            }
        };
        Ok(Sample::Points(PointSample::new(self.dim(), coords)?))
    }

    /// Differential entropy in nats.
    ///
    /// For the counterexample this is the entropy of the untruncated law,
    /// uniform on a set of total length one, hence zero.
    pub fn exact_entropy(&self) -> f64 {
        match *self {
            DistributionSpec::UniformCube { dim, side } => dim as f64 * side.ln(),
            DistributionSpec::IsotropicGaussian { dim, sigma } => {
                0.5 * dim as f64 * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln()
            }
            DistributionSpec::Exponential { rate } => 1.0 - rate.ln(),
            DistributionSpec::Cauchy { scale } => (4.0 * PI * scale).ln(),
            DistributionSpec::Counterexample { .. } => 0.0,
        }
    }

    /// CDF at `x` for the one-dimensional families with raw coordinates.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match *self {
            DistributionSpec::UniformCube { dim: 1, side } => Ok((x / side).clamp(0.0, 1.0)),
            DistributionSpec::IsotropicGaussian { dim: 1, sigma } => Ok(numeric::normal_cdf(x / sigma)),
            DistributionSpec::Exponential { rate } => Ok(if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() }),
            DistributionSpec::Cauchy { scale } => Ok(0.5 + (x / scale).atan() / PI),
            DistributionSpec::Counterexample { .. } => Err(Error::WrongSampleKind { expected: "interval-union" }),
            _ => Err(Error::DimensionMismatch {
                expected: 1,
                got: self.dim(),
            }),
        }
    }

    /// Whether [`ball_mass`](Self::ball_mass) is exact for this family.
    pub fn has_exact_ball_mass(&self) -> bool {
        !matches!(self, DistributionSpec::UniformCube { dim, .. } if *dim > 1)
    }

    /// `μ(B(x, r))`.
    ///
    /// Exact for one-dimensional families and for the isotropic Gaussian in
    /// any dimension (a noncentral chi-square CDF). The uniform cube in
    /// `d > 1` falls back to Monte Carlo under `precision`. The
    /// counterexample takes structured points, see
    /// [`IntervalSet::ball_mass_through`].
    pub fn ball_mass(&self, x: &[f64], r: f64, precision: &BallMassPrecision) -> Result<BallMass> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!("radius {r} must be nonnegative")));
        }
        if r == 0.0 {
            return Ok(BallMass::exact(0.0));
        }
        match *self {
            DistributionSpec::UniformCube { dim: 1, side } => {
                let x = x[0];
                Ok(BallMass::exact(((x + r).min(side) - (x - r).max(0.0)).max(0.0) / side))
            }
            DistributionSpec::UniformCube { .. } => self.ball_mass_monte_carlo(x, r, precision),
            DistributionSpec::IsotropicGaussian { dim: 1, sigma } => {
                Ok(BallMass::exact(gaussian_interval_mass(x[0].abs() / sigma, r / sigma)))
            }
            DistributionSpec::IsotropicGaussian { dim, sigma } => {
                let lambda = x.iter().map(|c| (c / sigma) * (c / sigma)).sum::<f64>();
                let t = (r / sigma) * (r / sigma);
                Ok(BallMass::exact(numeric::noncentral_chi2_cdf(t, dim as f64, lambda)))
            }
            DistributionSpec::Exponential { rate } => {
                let (lo, hi) = ((x[0] - r).max(0.0), x[0] + r);
                if hi <= 0.0 {
                    return Ok(BallMass::exact(0.0));
                }
                Ok(BallMass::exact((-rate * lo).exp() * -(-rate * (hi - lo)).exp_m1()))
            }
            DistributionSpec::Cauchy { scale } => {
                let (a, b) = ((x[0] + r) / scale, (x[0] - r) / scale);
                let angle = if a * b > -1.0 {
                    ((a - b) / (1.0 + a * b)).atan()
                } else {
                    a.atan() - b.atan()
                };
                Ok(BallMass::exact(angle / PI))
            }
            DistributionSpec::Counterexample { .. } => Err(Error::WrongSampleKind { expected: "interval-union" }),
        }
    }

    fn ball_mass_monte_carlo(&self, x: &[f64], r: f64, precision: &BallMassPrecision) -> Result<BallMass> {
        const BATCH: usize = 10_000;
        let mut stream = rng::stream(precision.seed, &[rng::purpose::BALL_MASS]);
        let r2 = r * r;
        let (mut hits, mut draws) = (0usize, 0usize);
        let mut se = f64::INFINITY;
        while draws < precision.budget {
            let batch = BATCH.min(precision.budget - draws);
            let Sample::Points(s) = self.sample_with(batch, &mut stream)? else {
                unreachable!("cube draws are raw points")
            };
            hits += s
                .points()
                .filter(|p| crate::nn::squared_distance(p, x) <= r2)
                .count();
            draws += batch;
            // smoothed proportion so an all-miss batch does not report zero error
            let p = (hits as f64 + 1.0) / (draws as f64 + 2.0);
            se = (p * (1.0 - p) / draws as f64).sqrt();
            if se <= precision.target_se {
                return Ok(BallMass {
                    mass: hits as f64 / draws as f64,
                    std_error: se,
                });
            }
        }
        Err(Error::PrecisionUnachievable {
            target: precision.target_se,
            achieved: se,
            draws,
        })
    }

    /// `E[(ln ‖X‖)^+]`; infinite for the untruncated counterexample.
    pub fn exact_log_tail_moment(&self) -> f64 {
        const TOL: f64 = 1e-12;
        match *self {
            DistributionSpec::UniformCube { dim: 1, side } => {
                if side <= 1.0 {
                    0.0
                } else {
                    (side * side.ln() - side + 1.0) / side
                }
            }
            DistributionSpec::UniformCube { dim, side } => {
                if side * (dim as f64).sqrt() <= 1.0 {
                    0.0
                } else {
                    cube_log_tail_qmc(dim, side)
                }
            }
            DistributionSpec::IsotropicGaussian { dim, sigma } => {
                // ‖X‖² = σ² T with T ~ χ²_dim
                let k = dim as f64;
                let log_norm = -(0.5 * k) * LN_2 - libm::lgamma(0.5 * k);
                let density = |t: f64| ((0.5 * k - 1.0) * t.ln() - 0.5 * t + log_norm).exp();
                let lower = 1.0 / (sigma * sigma);
                numeric::integrate_to_infinity(|t| (0.5 * t.ln() + sigma.ln()) * density(t), lower, TOL)
            }
            DistributionSpec::Exponential { rate } => numeric::exp_integral_e1(rate),
            DistributionSpec::Cauchy { scale } => {
                // x = e^t on [1, ∞): 2 ∫_0^∞ t · s e^t / (π (s² + e^{2t})) dt
                numeric::integrate_to_infinity(
                    |t| 2.0 * t * scale * (-t).exp() / (PI * (scale * scale * (-2.0 * t).exp() + 1.0)),
                    0.0,
                    TOL,
                )
            }
            DistributionSpec::Counterexample { .. } => f64::INFINITY,
        }
    }
}

/// Mass of `[x − r, x + r]` under `N(0, 1)` for `x ≥ 0`.
fn gaussian_interval_mass(x: f64, r: f64) -> f64 {
    let (hi, lo) = ((x + r) / SQRT_2, (x - r) / SQRT_2);
    if lo >= 1.0 {
        // deep in the right tail: difference of complementary errors
        0.5 * (libm::erfc(lo) - libm::erfc(hi))
    } else {
        0.5 * (libm::erf(hi) - libm::erf(lo))
    }
}

/// One counterexample draw: `P{j} = 1/(j(j+1))` by inversion of
/// `P{interval ≥ j} = 1/j`, capped at `clamp`.
fn draw_counterexample<R: Rng + ?Sized>(clamp: u32, rng: &mut R) -> LogPoint {
    let v = 1.0 - rng.random::<f64>(); // (0, 1]
    let j = (1.0 / v).floor().min(clamp as f64) as u32;
    LogPoint {
        interval: j.max(1),
        offset: rng.random::<f64>(),
    }
}

fn cube_log_tail_qmc(dim: usize, side: f64) -> f64 {
    const POINTS: u64 = 1 << 18;
    let primes = numeric::first_primes(dim);
    let values: Vec<f64> = (1..=POINTS)
        .map(|i| {
            let sq: f64 = primes
                .iter()
                .map(|&p| {
                    let c = side * numeric::radical_inverse(i, p);
                    c * c
                })
                .sum();
            (0.5 * sq.ln()).max(0.0)
        })
        .collect();
    numeric::neumaier_sum(&values) / POINTS as f64
}
