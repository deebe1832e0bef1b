use entropykit::distributions::DistributionSpec;
use entropykit::error::Error;
use entropykit::nn::{self, log_nn_distances_1d, Backend, IntervalSet, KdTree, LogPoint, PointSample};
use rand::seq::SliceRandom;
use rand::Rng;

fn cube(d: usize, n: usize, seed: u64) -> PointSample {
    DistributionSpec::UniformCube { dim: d, side: 1.0 }
        .sample(n, seed)
        .unwrap()
        .as_points()
        .unwrap()
        .clone()
}

#[test]
fn hand_examples() {
    let s = PointSample::from_values(&[0.0, 1.0, 3.0]).unwrap();
    for backend in [Backend::Brute, Backend::Index] {
        assert_eq!(nn::nn_distances(&s, backend).unwrap().r, vec![1.0, 1.0, 2.0]);
    }
}

#[test]
fn index_matches_brute_in_three_dimensions() {
    let s = cube(3, 200, 11);
    assert_eq!(
        nn::nn_distances(&s, Backend::Brute).unwrap(),
        nn::nn_distances(&s, Backend::Index).unwrap()
    );
}

#[test]
fn kd_tree_queries_arbitrary_points() {
    let s = cube(2, 500, 3);
    let tree = KdTree::build(&s);
    let mut r = entropykit::rng::stream(9, &[]);
    for _ in 0..50 {
        let q = [r.random::<f64>(), r.random::<f64>()];
        let (d2, idx) = tree.nearest_excluding(&q, usize::MAX);
        let best = s
            .points()
            .map(|p| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2))
            .fold(f64::INFINITY, f64::min);
        assert!((d2 - best).abs() <= 1e-15);
        let p = s.point(idx);
        assert!(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) - best).abs() <= 1e-15);
    }
}

#[test]
fn permutation_equivariance() {
    let s = cube(2, 300, 5);
    let mut order: Vec<usize> = (0..300).collect();
    order.shuffle(&mut entropykit::rng::stream(1, &[]));
    let base = nn::nn_distances(&s, Backend::Index).unwrap();
    let perm = nn::nn_distances(&s.permuted(&order).unwrap(), Backend::Index).unwrap();
    for (k, &i) in order.iter().enumerate() {
        assert_eq!(perm.r[k].to_bits(), base.r[i].to_bits());
    }
}

#[test]
fn translation_exact_on_dyadic_grid() {
    let mut r = entropykit::rng::stream(2, &[]);
    let coords: Vec<f64> = (0..600).map(|_| r.random_range(0..1u32 << 16) as f64 / 256.0).collect();
    let s = PointSample::new(3, coords).unwrap();
    let t = s.translated(&[-512.0, 7.0, 1024.0]).unwrap();
    let (a, b) = (nn::nn_distances(&s, Backend::Index), nn::nn_distances(&t, Backend::Index));
    assert_eq!(a, b);
}

#[test]
fn translation_arbitrary_shift_within_rounding() {
    let s = cube(2, 400, 8);
    let t = s.translated(&[0.123_456_789, -3.3]).unwrap();
    let a = nn::nn_distances(&s, Backend::Index).unwrap().r;
    let b = nn::nn_distances(&t, Backend::Index).unwrap().r;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-12 + 1e-9 * x, "{x} vs {y}");
    }
}

#[test]
fn scaling_equivariance() {
    let s = cube(3, 400, 4);
    let base = nn::nn_distances(&s, Backend::Index).unwrap().r;
    for factor in [0.5, 2.0, 3.7, 1e5] {
        let scaled = nn::nn_distances(&s.scaled(factor).unwrap(), Backend::Index).unwrap().r;
        for (x, y) in base.iter().zip(&scaled) {
            assert!((y / (factor * x) - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn duplicates_reported_by_both_backends() {
    let s = PointSample::from_rows(&[[0.0, 0.0], [1.0, 2.0], [3.0, 3.0], [1.0, 2.0]]).unwrap();
    for backend in [Backend::Brute, Backend::Index] {
        assert_eq!(nn::nn_distances(&s, backend), Err(Error::DuplicatePoints { first: 1, second: 3 }));
    }
}

#[test]
fn log_domain_examples() {
    let set = IntervalSet::default();
    let p = |j, u| LogPoint::new(j, u).unwrap();
    let l = log_nn_distances_1d(&[p(1, 0.0), p(1, 0.5)], &set).unwrap();
    assert!((l[0] - 0.25f64.ln()).abs() < 1e-15 && l[0] == l[1]);
    let l = log_nn_distances_1d(&[p(1, 0.0), p(2, 0.0)], &set).unwrap();
    assert!((l[0] - 12f64.ln()).abs() < 1e-15);
    // ln(2^1024 − 4), checked against arbitrary precision
    let l = log_nn_distances_1d(&[p(1, 0.0), p(10, 0.0)], &set).unwrap();
    assert!((l[0] - 709.782_712_893_384).abs() < 1e-9);
}

#[test]
fn log_domain_stays_finite_at_the_clamp() {
    let set = IntervalSet::new(IntervalSet::MAX_CLAMP).unwrap();
    let pts = [
        LogPoint::new(1, 0.2).unwrap(),
        LogPoint::new(999, 0.5).unwrap(),
        LogPoint::new(5000, 0.5001).unwrap(),
    ];
    let l = log_nn_distances_1d(&pts, &set).unwrap();
    assert!(l.iter().all(|v| v.is_finite()));
    // 5000 clamps to 1000, whose nearest neighbor lies in interval 999
    assert!(l[2] > 999f64.exp2() * std::f64::consts::LN_2 * 0.99);
}

#[test]
fn log_domain_counterexample_sample() {
    let spec = DistributionSpec::Counterexample { clamp: 512 };
    let s = spec.sample(10_000, 42).unwrap();
    let s = s.as_structured().unwrap();
    let l = log_nn_distances_1d(&s.points, &s.intervals).unwrap();
    assert!(l.iter().all(|v| v.is_finite()));
    assert!(l.iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 1e100);
}
