//! Exact nearest-neighbor distances within a sample.
//!
//! Two backends compute the same thing: an `O(n²)` scan and a kd-tree.
//! Both compare squared distances produced by the same function and take
//! the square root once at the end, so their outputs agree bit for bit.
//! Ties are broken towards the smaller neighbor index.

mod kdtree;
mod logdomain;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kdtree::KdTree;
pub use logdomain::{log_nn_distances_1d, log_nn_neighbors_1d, IntervalSet, LogPoint};

/// `n` points of dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSample {
    /// Builds a sample from flat row-major coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                point: pos / dim,
                axis: pos % dim,
            });
        }
        Ok(Self { dim, coords })
    }

    /// One-dimensional sample.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(1, values.to_vec())
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyInput)?;
        let mut coords = Vec::with_capacity(dim * rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Every point shifted by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: shift.len(),
            });
        }
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(k, c)| c + shift[k % self.dim])
            .collect();
        Self::new(self.dim, coords)
    }

    /// Every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.coords.iter().map(|c| c * factor).collect())
    }

    /// Points reordered so that point `k` of the result is point `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::InvalidParameter("permutation length differs from sample size".into()));
        }
        let mut coords = Vec::with_capacity(self.coords.len());
        for &i in order {
            coords.extend_from_slice(self.point(i));
        }
        Self::new(self.dim, coords)
    }
}

/// Nearest-neighbor search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Exhaustive pairwise scan.
    Brute,
    /// kd-tree search.
    #[default]
    Index,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Brute => "brute",
            Backend::Index => "index",
        })
    }
}

/// Per-point nearest-neighbor distances `r[i] = min_{j≠i} ‖x_i − x_j‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct NnDistances {
    pub r: Vec<f64>,
    /// Index of the nearest other point; the smallest index on ties.
    pub neighbor: Vec<usize>,
}

impl NnDistances {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Natural logarithm of each distance.
    pub fn log_r(&self) -> Vec<f64> {
        self.r.iter().map(|r| r.ln()).collect()
    }
}

/// Squared Euclidean distance, accumulated in axis order.
///
/// Both backends must go through this function: backend equivalence is
/// bit-exact only because every candidate distance is rounded the same way.
#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

/// Nearest-neighbor distance of every point.
pub fn nn_distances(sample: &PointSample, backend: Backend) -> Result<NnDistances> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { required: 2, got: n });
    }
    let nearest: Vec<(f64, usize)> = match backend {
        Backend::Brute => (0..n)
            .into_par_iter()
            .map(|i| brute_nearest(sample, i))
            .collect(),
        Backend::Index => {
            let tree = KdTree::build(sample);
            (0..n)
                .into_par_iter()
                .map(|i| tree.nearest_excluding(sample.point(i), i))
                .collect()
        }
    };
    if let Some(first) = nearest.iter().position(|&(d2, _)| d2 == 0.0) {
        return Err(Error::DuplicatePoints {
            first,
            second: nearest[first].1,
        });
    }
    let (r, neighbor) = nearest.into_iter().map(|(d2, j)| (d2.sqrt(), j)).unzip();
    Ok(NnDistances { r, neighbor })
}

fn brute_nearest(sample: &PointSample, i: usize) -> (f64, usize) {
    let q = sample.point(i);
    let mut best = (f64::INFINITY, usize::MAX);
    for (j, p) in sample.points().enumerate() {
        if j == i {
            continue;
        }
        let d2 = squared_distance(q, p);
        if d2 < best.0 {
            best = (d2, j);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn two_points_symmetric() {
        let s = PointSample::from_values(&[0.0, 1.0]).unwrap();
        for b in [Backend::Brute, Backend::Index] {
            let nn = nn_distances(&s, b).unwrap();
            assert_eq!(nn.r, vec![1.0, 1.0]);
            assert_eq!(nn.neighbor, vec![1, 0]);
        }
    }

    #[test]
    fn three_points_by_hand() {
        let s = PointSample::from_values(&[0.0, 1.0, 3.0]).unwrap();
        for b in [Backend::Brute, Backend::Index] {
            assert_eq!(nn_distances(&s, b).unwrap().r, vec![1.0, 1.0, 2.0]);
        }
    }

    #[test]
    fn too_small() {
        let s = PointSample::from_values(&[0.5]).unwrap();
        assert_eq!(
            nn_distances(&s, Backend::Index),
            Err(Error::SampleTooSmall { required: 2, got: 1 })
        );
    }

    #[test]
    fn duplicates_report_first_pair() {
        let s = PointSample::from_values(&[0.3, 5.0, 1.0, 5.0, 0.3]).unwrap();
        for b in [Backend::Brute, Backend::Index] {
            assert_eq!(
                nn_distances(&s, b),
                Err(Error::DuplicatePoints { first: 0, second: 4 })
            );
        }
    }

    #[test]
    fn ties_pick_smaller_index() {
        // point 1 is equidistant from 0 and 2
        let s = PointSample::from_values(&[0.0, 1.0, 2.0]).unwrap();
        for b in [Backend::Brute, Backend::Index] {
            assert_eq!(nn_distances(&s, b).unwrap().neighbor, vec![1, 0, 1]);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(PointSample::new(0, vec![1.0]), Err(Error::InvalidDimension(0)));
        assert!(matches!(PointSample::new(2, vec![1.0, 2.0, 3.0]), Err(Error::InvalidParameter(_))));
        assert_eq!(
            PointSample::new(2, vec![1.0, 2.0, f64::NAN, 0.0]),
            Err(Error::NonFinite { point: 1, axis: 0 })
        );
        assert!(matches!(
            PointSample::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn index_matches_brute_uniform_cube() {
        let mut rng = crate::rng::stream(11, &[3]);
        let coords: Vec<f64> = (0..600).map(|_| rng.random()).collect();
        let s = PointSample::new(3, coords).unwrap();
        assert_eq!(
            nn_distances(&s, Backend::Index).unwrap(),
            nn_distances(&s, Backend::Brute).unwrap()
        );
    }
}
