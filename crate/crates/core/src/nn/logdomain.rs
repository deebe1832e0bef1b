//! Points on the union of intervals `A = ∪_{j≥1} [a_j, a_j + w_j]` with
//! `a_j = 2^(2^j)` and `w_j = 1/(j(j+1))`, handled in log coordinates.
//!
//! `a_j` leaves double range at `j = 10`, so a point is kept as the pair
//! `(j, u)` standing for `a_j + w_j·u` and every distance is produced as its
//! natural logarithm.

use std::cmp::Ordering;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The point `a_j + w_j·u` of interval `j = interval`, offset `u = offset ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPoint {
    pub interval: u32,
    pub offset: f64,
}

impl LogPoint {
    pub fn new(interval: u32, offset: f64) -> Result<Self> {
        let p = LogPoint { interval, offset };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.interval == 0 {
            return Err(Error::InvalidParameter("interval index starts at 1".into()));
        }
        if !(0.0..=1.0).contains(&self.offset) {
            return Err(Error::InvalidParameter(format!(
                "offset {} outside [0, 1]",
                self.offset
            )));
        }
        Ok(())
    }

    fn cmp_position(&self, other: &Self) -> Ordering {
        self.interval
            .cmp(&other.interval)
            .then(self.offset.total_cmp(&other.offset))
    }
}

/// The interval family truncated at a clamp index `J`: indices above `J`
/// are mapped onto interval `J`, which then carries probability `1/J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSet {
    clamp: u32,
}

impl Default for IntervalSet {
    fn default() -> Self {
        IntervalSet {
            clamp: Self::DEFAULT_CLAMP,
        }
    }
}

impl IntervalSet {
    pub const DEFAULT_CLAMP: u32 = 512;
    /// `ln a_J = 2^J ln 2` must leave headroom for sums of many such terms.
    pub const MAX_CLAMP: u32 = 1000;

    pub fn new(clamp: u32) -> Result<Self> {
        if !(1..=Self::MAX_CLAMP).contains(&clamp) {
            return Err(Error::InvalidParameter(format!(
                "clamp {clamp} outside [1, {}]",
                Self::MAX_CLAMP
            )));
        }
        Ok(IntervalSet { clamp })
    }

    pub fn clamp(&self) -> u32 {
        self.clamp
    }

    /// `ln a_j = 2^j · ln 2`.
    pub fn ln_left(&self, j: u32) -> f64 {
        (j as f64).exp2() * LN_2
    }

    /// Interval length `w_j = 1/(j(j+1))`.
    pub fn width(&self, j: u32) -> f64 {
        let j = j as f64;
        1.0 / (j * (j + 1.0))
    }

    pub fn ln_width(&self, j: u32) -> f64 {
        let j = j as f64;
        -(j.ln() + (j + 1.0).ln())
    }

    /// Probability of interval `j` under the clamped law.
    pub fn mass(&self, j: u32) -> f64 {
        match j.cmp(&self.clamp) {
            Ordering::Less => self.width(j),
            Ordering::Equal => 1.0 / self.clamp as f64,
            Ordering::Greater => 0.0,
        }
    }

    /// `P{interval < j}` under the clamped law.
    pub fn mass_below(&self, j: u32) -> f64 {
        if j > self.clamp {
            1.0
        } else {
            1.0 - 1.0 / j as f64
        }
    }

    /// `P{k < interval ≤ j}`, summed without cancellation.
    fn mass_between(&self, k: u32, j: u32) -> f64 {
        if j <= k {
            return 0.0;
        }
        if j >= self.clamp {
            1.0 / (k as f64 + 1.0)
        } else {
            1.0 / (k as f64 + 1.0) - 1.0 / (j as f64 + 1.0)
        }
    }

    /// `p` with its interval index capped at the clamp.
    pub fn clamp_point(&self, p: LogPoint) -> LogPoint {
        LogPoint {
            interval: p.interval.min(self.clamp),
            offset: p.offset,
        }
    }

    /// The raw coordinate `a_j + w_j·u`; infinite for `j ≥ 10`.
    pub fn raw(&self, p: LogPoint) -> f64 {
        self.ln_left(p.interval).exp() + self.width(p.interval) * p.offset
    }

    /// `ln(a_j + w_j·u)`.
    pub fn ln_abs(&self, p: LogPoint) -> f64 {
        let ln_a = self.ln_left(p.interval);
        ln_a + (self.width(p.interval) * p.offset * (-ln_a).exp()).ln_1p()
    }

    /// CDF of the clamped law at `p`.
    pub fn cdf(&self, p: LogPoint) -> f64 {
        let p = self.clamp_point(p);
        self.mass_below(p.interval) + self.mass(p.interval) * p.offset
    }

    /// `ln(hi − lo)` for points with `lo` strictly left of `hi`.
    pub fn ln_gap(&self, lo: LogPoint, hi: LogPoint) -> f64 {
        let (j, k) = (lo.interval, hi.interval);
        if j == k {
            return self.ln_width(j) + (hi.offset - lo.offset).ln();
        }
        // hi − lo = a_k · (1 − c), c = (a_j + w_j u_j − w_k u_k) / a_k ≤ 0.28
        let ln_ak = self.ln_left(k);
        let inv_ak = (-ln_ak).exp();
        let c = (self.ln_left(j) - ln_ak).exp()
            + (self.width(j) * lo.offset - self.width(k) * hi.offset) * inv_ak;
        ln_ak + (-c).ln_1p()
    }

    /// Mass of the ball centred at `center` whose boundary passes through
    /// `boundary`, i.e. `μ(B(center, |center − boundary|))`, under the
    /// clamped law.
    ///
    /// Exact: because `a_{k+1} = a_k²`, a ball reaching a different interval
    /// either covers everything below its centre or nothing beyond the
    /// centre's own interval on the far side.
    pub fn ball_mass_through(&self, center: LogPoint, boundary: LogPoint) -> f64 {
        let c = self.clamp_point(center);
        let b = self.clamp_point(boundary);
        let (k, t) = (c.interval, b.interval);
        match t.cmp(&k) {
            Ordering::Equal => {
                let half = (c.offset - b.offset).abs();
                let covered = (c.offset + half).min(1.0) - (c.offset - half).max(0.0);
                self.mass(k) * covered
            }
            // [boundary, 2c − boundary]: rest of interval t, t+1..k whole.
            Ordering::Less => self.mass(t) * (1.0 - b.offset) + self.mass_between(t, k),
            // [2c − boundary < 0, boundary]: everything up to the boundary.
            Ordering::Greater => self.cdf(b),
        }
    }
}

/// `ln R` for every point, where `R` is the distance to the nearest other
/// point. Points above the clamp are moved onto the clamp interval first.
pub fn log_nn_distances_1d(points: &[LogPoint], intervals: &IntervalSet) -> Result<Vec<f64>> {
    Ok(log_nn_neighbors_1d(points, intervals)?.0)
}

/// As [`log_nn_distances_1d`], also returning each point's neighbor index
/// (the smaller index on ties).
pub fn log_nn_neighbors_1d(
    points: &[LogPoint],
    intervals: &IntervalSet,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let n = points.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { required: 2, got: n });
    }
    for p in points {
        p.validate()?;
    }
    let pts: Vec<LogPoint> = points.iter().map(|&p| intervals.clamp_point(p)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pts[a].cmp_position(&pts[b]).then(a.cmp(&b)));

    let duplicate = order
        .windows(2)
        .filter(|w| pts[w[0]].cmp_position(&pts[w[1]]) == Ordering::Equal)
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .min();
    if let Some((first, second)) = duplicate {
        return Err(Error::DuplicatePoints { first, second });
    }

    let gaps: Vec<f64> = order
        .windows(2)
        .map(|w| intervals.ln_gap(pts[w[0]], pts[w[1]]))
        .collect();
    let mut ln_r = vec![0.0; n];
    let mut neighbor = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        let left = (pos > 0).then(|| (gaps[pos - 1], order[pos - 1]));
        let right = (pos + 1 < n).then(|| (gaps[pos], order[pos + 1]));
        let (g, j) = match (left, right) {
            (Some(l), Some(r)) => {
                if l.0 < r.0 || (l.0 == r.0 && l.1 < r.1) {
                    l
                } else {
                    r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => unreachable!("n ≥ 2"),
        };
        ln_r[i] = g;
        neighbor[i] = j;
    }
    Ok((ln_r, neighbor))
}
