//! The Kozachenko–Leonenko estimate and the statistics built from the same
//! nearest-neighbor distances.
//!
//! Every estimate is assembled from `d·ln R` terms rather than `R^d`, which
//! would underflow for large `d` and overflow on the interval-union samples.
//! Per-point terms are summed in sorted order, so estimates are invariant
//! under reordering of the sample to the last bit.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{self, Backend, IntervalSet, LogPoint, PointSample};
use crate::numeric::sorted_mean;

/// Euler–Mascheroni constant `-∫_0^∞ e^{-t} ln t dt`.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Volume `π^{d/2} / Γ(d/2 + 1)` of the unit Euclidean ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if d <= 170 {
        let half = d as f64 / 2.0;
        Ok(PI.powf(half) / libm::tgamma(half + 1.0))
    } else {
        Ok(ln_unit_ball_volume(d)?.exp())
    }
}

/// `ln v_d`, finite for every `d ≥ 1`.
pub fn ln_unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let half = d as f64 / 2.0;
    Ok(half * PI.ln() - libm::lgamma(half + 1.0))
}

/// An entropy estimate in nats with the settings that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub n: usize,
    pub d: usize,
    /// `None` for the sorted log-domain path, which needs no search backend.
    pub backend: Option<Backend>,
    pub euler_mascheroni: f64,
    pub log_domain: bool,
}

/// `(1/n) Σ [ln(n−1) + d ln R_i + ln v_d] + C_E` from precomputed `ln R_i`.
pub fn kl_from_log_distances(ln_r: &[f64], d: usize) -> Result<f64> {
    let n = ln_r.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { required: 2, got: n });
    }
    let mean_ln_r = sorted_mean(ln_r);
    Ok(d as f64 * mean_ln_r + ((n - 1) as f64).ln() + ln_unit_ball_volume(d)? + EULER_MASCHERONI)
}

/// Kozachenko–Leonenko differential entropy estimate of `sample`.
pub fn kl_entropy(sample: &PointSample, backend: Backend) -> Result<EntropyEstimate> {
    let ln_r = nn::nn_distances(sample, backend)?.log_r();
    Ok(EntropyEstimate {
        value: kl_from_log_distances(&ln_r, sample.dim())?,
        n: sample.len(),
        d: sample.dim(),
        backend: Some(backend),
        euler_mascheroni: EULER_MASCHERONI,
        log_domain: false,
    })
}

/// The same estimate for points of the interval union, computed from
/// log-distances so that astronomically spread samples stay finite.
pub fn kl_entropy_logdomain(points: &[LogPoint], intervals: &IntervalSet) -> Result<EntropyEstimate> {
    let ln_r = nn::log_nn_distances_1d(points, intervals)?;
    Ok(EntropyEstimate {
        value: kl_from_log_distances(&ln_r, 1)?,
        n: points.len(),
        d: 1,
        backend: None,
        euler_mascheroni: EULER_MASCHERONI,
        log_domain: true,
    })
}

/// Leave-one-out 1-NN density values `f_{n,i}(X_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneNnDensity {
    pub values: Vec<f64>,
}

impl OneNnDensity {
    /// `-(1/n) Σ ln f_{n,i}(X_i)`, the leave-one-out entropy of these values.
    pub fn leave_one_out_entropy(&self) -> f64 {
        let logs: Vec<f64> = self.values.iter().map(|v| -v.ln()).collect();
        sorted_mean(&logs)
    }
}

/// `f_{n,i}(X_i) = 1 / ((n−1) R_i^d v_d e^{C_E})`.
pub fn one_nn_density(sample: &PointSample, backend: Backend) -> Result<OneNnDensity> {
    let n = sample.len();
    let d = sample.dim() as f64;
    let ln_r = nn::nn_distances(sample, backend)?.log_r();
    let offset = ((n - 1) as f64).ln() + ln_unit_ball_volume(sample.dim())? + EULER_MASCHERONI;
    Ok(OneNnDensity {
        values: ln_r.iter().map(|l| (-(d * l + offset)).exp()).collect(),
    })
}

/// `ℓ_n = (1/n) Σ log₂(1 / (n Z_i))` in bits, with `Z_i` the nearest-neighbor
/// distance. Diagnostic only: it omits the bias correction, and for `d = 1`
/// `H_n = −(ln 2) ℓ_n + ln(2(n−1)/n) + C_E`.
pub fn ell_statistic(sample: &PointSample, backend: Backend) -> Result<f64> {
    if sample.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: sample.dim(),
        });
    }
    let ln_z = nn::nn_distances(sample, backend)?.log_r();
    Ok(ell_from_log_distances(&ln_z))
}

/// [`ell_statistic`] for interval-union points.
pub fn ell_statistic_logdomain(points: &[LogPoint], intervals: &IntervalSet) -> Result<f64> {
    let ln_z = nn::log_nn_distances_1d(points, intervals)?;
    Ok(ell_from_log_distances(&ln_z))
}

fn ell_from_log_distances(ln_z: &[f64]) -> f64 {
    let n = ln_z.len() as f64;
    -(n.ln() + sorted_mean(ln_z)) / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2).unwrap() - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert_eq!(unit_ball_volume(0), Err(Error::InvalidDimension(0)));
        // recurrence v_d = 2π/d · v_{d−2}, across the log-gamma switch
        for d in [5usize, 40, 171, 172, 300] {
            let lhs = ln_unit_ball_volume(d).unwrap();
            let rhs = (2.0 * PI / d as f64).ln() + ln_unit_ball_volume(d - 2).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "d = {d}");
        }
        assert!(unit_ball_volume(400).unwrap() > 0.0);
    }

    #[test]
    fn two_point_estimate() {
        let s = PointSample::from_values(&[0.0, 1.0]).unwrap();
        let h = kl_entropy(&s, Backend::Index).unwrap();
        assert!((h.value - (2f64.ln() + EULER_MASCHERONI)).abs() < 1e-12);
        assert!((h.value - 1.270_362_845_461_478).abs() < 1e-12);
        assert_eq!((h.n, h.d, h.log_domain), (2, 1, false));
        assert_eq!(h.euler_mascheroni, 0.5772156649015329);
    }

    #[test]
    fn three_point_estimate() {
        // (1/3)(ln 4 + ln 4 + ln 8) + C_E
        let s = PointSample::from_values(&[0.0, 1.0, 3.0]).unwrap();
        let h = kl_entropy(&s, Backend::Brute).unwrap();
        let want = (4f64.ln() * 2.0 + 8f64.ln()) / 3.0 + EULER_MASCHERONI;
        assert!((h.value - want).abs() < 1e-12);
        assert!((h.value - 2.194_559_086_208_072).abs() < 1e-12);
    }

    #[test]
    fn logdomain_examples() {
        let set = IntervalSet::default();
        let p = |j, u| LogPoint::new(j, u).unwrap();
        let h = kl_entropy_logdomain(&[p(1, 0.0), p(1, 0.5)], &set).unwrap();
        assert!((h.value - (0.5f64.ln() + EULER_MASCHERONI)).abs() < 1e-12);
        assert!(h.log_domain && h.backend.is_none());
        let h = kl_entropy_logdomain(&[p(1, 0.0), p(2, 0.0)], &set).unwrap();
        assert!((h.value - (24f64.ln() + EULER_MASCHERONI)).abs() < 1e-12);
        assert!((h.value - 3.755_269_495_249_478).abs() < 1e-12);
    }

    #[test]
    fn density_two_points() {
        let s = PointSample::from_values(&[0.0, 1.0]).unwrap();
        let f = one_nn_density(&s, Backend::Index).unwrap();
        let want = 1.0 / (2.0 * EULER_MASCHERONI.exp());
        for v in &f.values {
            assert!((v - want).abs() < 1e-15);
        }
        assert!((f.values[0] - 0.280_729_741_783_442_6).abs() < 1e-15);
    }

    #[test]
    fn ell_examples() {
        let s = PointSample::from_values(&[0.0, 1.0]).unwrap();
        assert!((ell_statistic(&s, Backend::Index).unwrap() + 1.0).abs() < 1e-15);
        let s = PointSample::from_values(&[0.0, 0.5]).unwrap();
        assert!(ell_statistic(&s, Backend::Index).unwrap().abs() < 1e-15);
        let s = PointSample::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        assert_eq!(
            ell_statistic(&s, Backend::Index),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn duplicates_propagate() {
        let s = PointSample::from_values(&[0.1, 0.2, 0.1]).unwrap();
        assert_eq!(
            kl_entropy(&s, Backend::Index),
            Err(Error::DuplicatePoints { first: 0, second: 2 })
        );
    }

    #[test]
    fn high_dimension_stays_finite() {
        // R^d underflows here; d·ln R does not
        let d = 40;
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..d).map(|k| if k == 0 { i as f64 * 1e-3 } else { 0.0 }).collect())
            .collect();
        let s = PointSample::from_rows(&rows).unwrap();
        let h = kl_entropy(&s, Backend::Index).unwrap();
        assert!(h.value.is_finite());
        let want = d as f64 * 1e-3f64.ln() + 4f64.ln() + ln_unit_ball_volume(d).unwrap() + EULER_MASCHERONI;
        assert!((h.value - want).abs() < 1e-9);
    }
}
