//! Proof-level statistics for a single sample drawn from a known law.
//!
//! With `μ` the sampling law and `R_i` the nearest-neighbor distance of
//! `X_i`, the estimate splits as `H_n = H̃_n + M_n + C_E`, where
//!
//! - `M_n = (1/n) Σ ln((n−1) μ(B(X_i, R_i)))` has a law that does not depend
//!   on `μ`, with mean `−C_E + O(1/n)`;
//! - `H̃_n = −(1/n) Σ ln(μ(B(X_i, R_i)) / λ(B(X_i, R_i)))` is a plug-in
//!   entropy of the local averages of the density.
//!
//! The ball masses themselves obey `Σ_i μ(B(X_i, R_i)) → 1`, and for a fixed
//! centre `x` the masses `μ(B(x, ‖x − X_i‖))` are iid Uniform[0, 1].

pub mod ks;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{BallMassPrecision, DistributionSpec, Sample};
use crate::error::{Error, Result};
use crate::estimators::{kl_from_log_distances, ln_unit_ball_volume, EULER_MASCHERONI};
use crate::nn::{self, Backend};
use crate::numeric::{neumaier_sum, sorted_mean};
use crate::rng;

/// Smallest sample accepted by [`uniform_ball_mass_check`].
pub const MIN_UNIFORMITY_SAMPLE: usize = 50;

/// Significance level used for reported critical values.
pub const ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsOptions {
    pub backend: Backend,
    /// Allow Monte Carlo ball masses where no exact form exists. The
    /// Monte Carlo error then enters every statistic built on `μ`.
    pub monte_carlo: Option<BallMassPrecision>,
}

/// All diagnostics of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub spec: String,
    pub n: usize,
    pub d: usize,
    pub h_n: f64,
    pub m_n: f64,
    pub tilde_h_n: f64,
    pub ball_mass_sum: f64,
    pub empirical_log_tail: f64,
    /// `None` below [`MIN_UNIFORMITY_SAMPLE`] points.
    pub ks_ball_mass_uniform: Option<f64>,
    /// `h_n − tilde_h_n − m_n − C_E`; zero up to rounding.
    pub decomposition_residual: f64,
}

/// Outcome of [`uniform_ball_mass_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMassUniformity {
    /// KS distance of the `n − 1` masses from Uniform[0, 1].
    pub ks_statistic: f64,
    /// Asymptotic critical value at [`ALPHA`].
    pub critical_value: f64,
    /// `(n−1) · min_i μ(B(X_n, ‖X_i − X_n‖))`, the centre's own nearest-ball
    /// mass rescaled; distributed as `(n−1)` times a minimum of `n−1` uniforms.
    pub scaled_min: f64,
    pub masses: Vec<f64>,
}

impl BallMassUniformity {
    pub fn rejects(&self) -> bool {
        self.ks_statistic >= self.critical_value
    }
}

/// Nearest-neighbor log-distances and the masses of the matching balls.
struct NnBalls {
    d: usize,
    ln_r: Vec<f64>,
    mass: Vec<f64>,
}

fn check_dims(sample: &Sample, spec: &DistributionSpec) -> Result<()> {
    spec.validate()?;
    if sample.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: sample.dim(),
        });
    }
    Ok(())
}

fn ball_precision(spec: &DistributionSpec, opts: &DiagnosticsOptions) -> Result<BallMassPrecision> {
    match opts.monte_carlo {
        Some(p) => Ok(p),
        None if spec.has_exact_ball_mass() => Ok(BallMassPrecision::default()),
        None => Err(Error::BallMassUnavailable(spec.label())),
    }
}

/// Monte Carlo streams differ per ball, keyed by the point index.
fn per_point(precision: &BallMassPrecision, i: usize) -> BallMassPrecision {
    BallMassPrecision {
        seed: rng::derive_seed(precision.seed, &[i as u64]),
        ..*precision
    }
}

fn nn_balls(sample: &Sample, spec: &DistributionSpec, opts: &DiagnosticsOptions) -> Result<NnBalls> {
    check_dims(sample, spec)?;
    let balls = match sample {
        Sample::Points(points) => {
            if matches!(spec, DistributionSpec::Counterexample { .. }) {
                return Err(Error::WrongSampleKind { expected: "interval-union" });
            }
            let precision = ball_precision(spec, opts)?;
            let nn = nn::nn_distances(points, opts.backend)?;
            let mass = (0..points.len())
                .into_par_iter()
                .map(|i| {
                    spec.ball_mass(points.point(i), nn.r[i], &per_point(&precision, i))
                        .map(|b| b.mass)
                })
                .collect::<Result<Vec<f64>>>()?;
            NnBalls {
                d: points.dim(),
                ln_r: nn.log_r(),
                mass,
            }
        }
        Sample::Structured(s) => {
            let intervals = spec
                .intervals()
                .ok_or(Error::WrongSampleKind { expected: "raw point" })?;
            let (ln_r, neighbor) = nn::log_nn_neighbors_1d(&s.points, &intervals)?;
            let mass = s
                .points
                .iter()
                .zip(&neighbor)
                .map(|(&p, &j)| intervals.ball_mass_through(p, s.points[j]))
                .collect();
            NnBalls { d: 1, ln_r, mass }
        }
    };
    if let Some(i) = balls.mass.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "ball mass of point {i} is zero; increase Monte Carlo precision"
        )));
    }
    Ok(balls)
}

impl NnBalls {
    fn n(&self) -> usize {
        self.ln_r.len()
    }

    fn m_statistic(&self) -> f64 {
        let logs: Vec<f64> = self.mass.iter().map(|m| m.ln()).collect();
        ((self.n() - 1) as f64).ln() + sorted_mean(&logs)
    }

    fn tilde_h(&self) -> Result<f64> {
        let ln_vd = ln_unit_ball_volume(self.d)?;
        let d = self.d as f64;
        let terms: Vec<f64> = self
            .ln_r
            .iter()
            .zip(&self.mass)
            .map(|(lr, m)| d * lr + ln_vd - m.ln())
            .collect();
        Ok(sorted_mean(&terms))
    }

    fn mass_sum(&self) -> f64 {
        let mut sorted = self.mass.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        neumaier_sum(&sorted)
    }
}

/// `M_n = (1/n) Σ ln((n−1) μ(B(X_i, R_i)))`.
pub fn m_statistic(sample: &Sample, spec: &DistributionSpec, opts: &DiagnosticsOptions) -> Result<f64> {
    Ok(nn_balls(sample, spec, opts)?.m_statistic())
}

/// `H̃_n = −(1/n) Σ ln(μ(B(X_i, R_i)) / λ(B(X_i, R_i)))`, with
/// `ln λ(B(x, h)) = ln v_d + d ln h`.
pub fn tilde_h(sample: &Sample, spec: &DistributionSpec, opts: &DiagnosticsOptions) -> Result<f64> {
    nn_balls(sample, spec, opts)?.tilde_h()
}

/// `Σ_i μ(B(X_i, R_i))`.
pub fn ball_mass_sum(sample: &Sample, spec: &DistributionSpec, opts: &DiagnosticsOptions) -> Result<f64> {
    Ok(nn_balls(sample, spec, opts)?.mass_sum())
}

/// `(1/n) Σ (ln ‖X_i‖)^+`, the empirical counterpart of `E[(ln ‖X‖)^+]`.
pub fn empirical_log_tail(sample: &Sample) -> f64 {
    let terms: Vec<f64> = match sample {
        Sample::Points(points) => points.points().map(|p| ln_norm(p).max(0.0)).collect(),
        Sample::Structured(s) => s
            .points
            .iter()
            .map(|&p| s.intervals.ln_abs(s.intervals.clamp_point(p)).max(0.0))
            .collect(),
    };
    sorted_mean(&terms)
}

/// `ln ‖x‖`, scaled by the largest coordinate so huge vectors do not overflow.
fn ln_norm(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return f64::NEG_INFINITY;
    }
    let sq: f64 = x.iter().map(|c| (c / scale) * (c / scale)).sum();
    scale.ln() + 0.5 * sq.ln()
}

/// Masses `μ(B(X_n, ‖X_i − X_n‖))`, `i < n`, around the last point, with
/// their KS distance from Uniform[0, 1].
pub fn uniform_ball_mass_check(
    sample: &Sample,
    spec: &DistributionSpec,
    opts: &DiagnosticsOptions,
) -> Result<BallMassUniformity> {
    check_dims(sample, spec)?;
    let n = sample.len();
    if n < MIN_UNIFORMITY_SAMPLE {
        return Err(Error::SampleTooSmall {
            required: MIN_UNIFORMITY_SAMPLE,
            got: n,
        });
    }
    let masses: Vec<f64> = match sample {
        Sample::Points(points) => {
            if matches!(spec, DistributionSpec::Counterexample { .. }) {
                return Err(Error::WrongSampleKind { expected: "interval-union" });
            }
            let precision = ball_precision(spec, opts)?;
            let center = points.point(n - 1);
            (0..n - 1)
                .into_par_iter()
                .map(|i| {
                    let r = nn::squared_distance(center, points.point(i)).sqrt();
                    spec.ball_mass(center, r, &per_point(&precision, i)).map(|b| b.mass)
                })
                .collect::<Result<_>>()?
        }
        Sample::Structured(s) => {
            let intervals = spec
                .intervals()
                .ok_or(Error::WrongSampleKind { expected: "raw point" })?;
            let center = s.points[n - 1];
            s.points[..n - 1]
                .iter()
                .map(|&p| intervals.ball_mass_through(center, p))
                .collect()
        }
    };
    let min = masses.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BallMassUniformity {
        ks_statistic: ks::uniform_statistic(&masses),
        critical_value: ks::one_sample_critical_value(ALPHA, masses.len()),
        scaled_min: (n - 1) as f64 * min,
        masses,
    })
}

/// `H_n` and the three ball statistics from one nearest-neighbor pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallStatistics {
    pub h_n: f64,
    pub m_n: f64,
    pub tilde_h_n: f64,
    pub ball_mass_sum: f64,
}

pub fn ball_statistics(sample: &Sample, spec: &DistributionSpec, opts: &DiagnosticsOptions) -> Result<BallStatistics> {
    let balls = nn_balls(sample, spec, opts)?;
    Ok(BallStatistics {
        h_n: kl_from_log_distances(&balls.ln_r, balls.d)?,
        m_n: balls.m_statistic(),
        tilde_h_n: balls.tilde_h()?,
        ball_mass_sum: balls.mass_sum(),
    })
}

/// Every diagnostic at once.
pub fn diagnose(sample: &Sample, spec: &DistributionSpec, opts: &DiagnosticsOptions) -> Result<DiagnosticsReport> {
    let BallStatistics {
        h_n,
        m_n,
        tilde_h_n,
        ball_mass_sum,
    } = ball_statistics(sample, spec, opts)?;
    let ks_ball_mass_uniform = if sample.len() >= MIN_UNIFORMITY_SAMPLE {
        Some(uniform_ball_mass_check(sample, spec, opts)?.ks_statistic)
    } else {
        None
    };
    Ok(DiagnosticsReport {
        spec: spec.label(),
        n: sample.len(),
        d: sample.dim(),
        h_n,
        m_n,
        tilde_h_n,
        ball_mass_sum,
        empirical_log_tail: empirical_log_tail(sample),
        ks_ball_mass_uniform,
        decomposition_residual: h_n - tilde_h_n - m_n - EULER_MASCHERONI,
    })
}
