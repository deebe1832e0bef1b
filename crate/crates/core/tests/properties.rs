use entropykit::diagnostics::{self, DiagnosticsOptions};
use entropykit::distributions::{BallMassPrecision, DistributionSpec, Sample};
use entropykit::error::Error;
use entropykit::estimators::{ell_statistic, kl_entropy, kl_entropy_logdomain, one_nn_density, EULER_MASCHERONI};
use entropykit::experiments::{lower_median, sample_sd, summarize, ResultRow};
use entropykit::nn::{self, Backend, IntervalSet, LogPoint, PointSample};
use proptest::prelude::*;

/// Samples of `2..max` distinct points in `d` dimensions.
fn sample(d: usize, max: usize) -> impl Strategy<Value = PointSample> {
    prop::collection::vec(prop::collection::vec(-1e3..1e3f64, d), 2..max)
        .prop_filter_map("duplicate points", |rows| {
            let s = PointSample::from_rows(&rows).ok()?;
            nn::nn_distances(&s, Backend::Brute).ok().map(|_| s)
        })
}

fn any_sample() -> impl Strategy<Value = PointSample> {
    (1usize..=5).prop_flat_map(|d| sample(d, 200))
}

fn one_dimensional_spec() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (0.1..10.0f64).prop_map(|side| DistributionSpec::UniformCube { dim: 1, side }),
        (0.1..10.0f64).prop_map(|sigma| DistributionSpec::IsotropicGaussian { dim: 1, sigma }),
        (0.1..10.0f64).prop_map(|rate| DistributionSpec::Exponential { rate }),
        (0.1..10.0f64).prop_map(|scale| DistributionSpec::Cauchy { scale }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn backends_agree_bitwise(s in any_sample()) {
        prop_assert_eq!(nn::nn_distances(&s, Backend::Brute), nn::nn_distances(&s, Backend::Index));
    }

    #[test]
    fn lattice_ties_agree(cells in prop::collection::btree_set((0i32..12, 0i32..12), 2..100)) {
        let rows: Vec<[f64; 2]> = cells.iter().map(|&(a, b)| [a as f64, b as f64]).collect();
        let s = PointSample::from_rows(&rows).unwrap();
        prop_assert_eq!(nn::nn_distances(&s, Backend::Brute), nn::nn_distances(&s, Backend::Index));
    }

    #[test]
    fn permutation_invariance(s in any_sample(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.shuffle(&mut entropykit::rng::stream(seed, &[]));
        let a = kl_entropy(&s, Backend::Index).unwrap().value;
        let b = kl_entropy(&s.permuted(&order).unwrap(), Backend::Index).unwrap().value;
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn scaling_covariance(s in any_sample(), factor in prop::sample::select(vec![0.5, 2.0, 10.0, 0.013, 77.0])) {
        let a = kl_entropy(&s, Backend::Index).unwrap().value;
        let b = kl_entropy(&s.scaled(factor).unwrap(), Backend::Index).unwrap().value;
        prop_assert!((b - a - s.dim() as f64 * f64::ln(factor)).abs() < 1e-9);
    }

    #[test]
    fn dyadic_translation_is_exact(
        rows in prop::collection::vec(prop::collection::vec(0u32..1 << 16, 3), 2..150),
        shift in prop::collection::vec(-4096i32..4096, 3),
    ) {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&c| c as f64 / 64.0).collect()).collect();
        let s = PointSample::from_rows(&rows).unwrap();
        let shift: Vec<f64> = shift.iter().map(|&c| c as f64).collect();
        let t = s.translated(&shift).unwrap();
        prop_assert_eq!(nn::nn_distances(&s, Backend::Index), nn::nn_distances(&t, Backend::Index));
    }

    #[test]
    fn density_and_ell_identities(s in sample(1, 300)) {
        let n = s.len() as f64;
        let h = kl_entropy(&s, Backend::Index).unwrap().value;
        let loo = one_nn_density(&s, Backend::Index).unwrap().leave_one_out_entropy();
        prop_assert!((h - loo).abs() < 1e-10);
        let l = ell_statistic(&s, Backend::Index).unwrap();
        let via_ell = -std::f64::consts::LN_2 * l + (2.0 * (n - 1.0) / n).ln() + EULER_MASCHERONI;
        prop_assert!((h - via_ell).abs() < 1e-10);
    }

    #[test]
    fn decomposition_identity(spec in one_dimensional_spec(), n in 2usize..400, seed in any::<u64>()) {
        let s = spec.sample(n, seed).unwrap();
        match diagnostics::diagnose(&s, &spec, &DiagnosticsOptions::default()) {
            Ok(r) => {
                prop_assert!(r.decomposition_residual.abs() < 1e-8);
                prop_assert!(r.ball_mass_sum >= 0.0 && r.ball_mass_sum <= n as f64);
            }
            // a far Cauchy outlier can have a ball mass below f64 resolution
            Err(Error::InvalidParameter(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn ball_mass_monotone(spec in one_dimensional_spec(), x in -20.0..20.0f64, r1 in 0.0..50.0f64, r2 in 0.0..50.0f64) {
        let p = BallMassPrecision::default();
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        let a = spec.ball_mass(&[x], lo, &p).unwrap().mass;
        let b = spec.ball_mass(&[x], hi, &p).unwrap().mass;
        prop_assert!((0.0..=1.0).contains(&a) && a <= b && b <= 1.0);
    }

    /// Holds when at most one point reaches the lower clamp; see
    /// `clamp_can_widen_a_shared_gap` for why it cannot hold in general.
    #[test]
    fn clamp_monotone(
        (low, high, below) in (2u32..60).prop_flat_map(|low| (
            Just(low),
            low..=80,
            prop::collection::vec((1..low, 0.0..=1.0f64), 1..60),
        )),
        top in prop::option::of((0u32..100, 0.0..=1.0f64)),
    ) {
        let mut pts: Vec<LogPoint> = below.iter().map(|&(j, u)| LogPoint::new(j, u).unwrap()).collect();
        if let Some((extra, u)) = top {
            pts.push(LogPoint::new(low + extra, u).unwrap());
        }
        let a = kl_entropy_logdomain(&pts, &IntervalSet::new(low).unwrap());
        let b = kl_entropy_logdomain(&pts, &IntervalSet::new(high).unwrap());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(a.value <= b.value, "{} > {}", a.value, b.value);
        }
    }

    #[test]
    fn ball_mass_through_is_a_probability(points in prop::collection::vec((1u32..40, 0.0..=1.0f64), 2..=2)) {
        let set = IntervalSet::new(32).unwrap();
        let c = LogPoint::new(points[0].0, points[0].1).unwrap();
        let b = LogPoint::new(points[1].0, points[1].1).unwrap();
        let m = set.ball_mass_through(c, b);
        prop_assert!((0.0..=1.0).contains(&m));
    }

    #[test]
    fn summary_statistics(h in prop::collection::vec(-1e6..1e6f64, 1..40)) {
        let rows: Vec<ResultRow> = h
            .iter()
            .enumerate()
            .map(|(i, &v)| ResultRow {
                n: 10, replicate: i, h_n: Some(v), true_entropy: 0.0, abs_error: Some(v.abs()),
                m_n: None, tilde_h_n: None, ball_mass_sum: None, log_tail: None, ell_n: None,
                wall_time_ms: None, error: None,
            })
            .collect();
        let s = &summarize(&rows).unwrap()[0];
        let (lo, hi) = h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        prop_assert!(s.mean_h >= lo - 1e-9 && s.mean_h <= hi + 1e-9);
        prop_assert!(h.contains(&s.median_h));
        prop_assert_eq!(Some(s.median_h), lower_median(&h));
        prop_assert!(s.sd_h >= 0.0 && s.sd_h == sample_sd(&h));
        prop_assert_eq!(s.count, h.len());
    }
}

#[test]
fn sampled_points_never_duplicate_in_practice() {
    for spec in [
        DistributionSpec::UniformCube { dim: 1, side: 1.0 },
        DistributionSpec::Exponential { rate: 1.0 },
    ] {
        let s = spec.sample(50_000, 1).unwrap();
        let Sample::Points(p) = s else { unreachable!() };
        assert!(nn::nn_distances(&p, Backend::Index).is_ok());
    }
}

#[test]
fn clamp_can_widen_a_shared_gap() {
    // Two points collapsed into the clamp interval J sit Δ_J·|u − u'| apart,
    // and Δ_J = 1/(J(J+1)) grows as J falls.
    let pts = [LogPoint::new(38, 0.0).unwrap(), LogPoint::new(38, 0.5).unwrap()];
    let h = |j| kl_entropy_logdomain(&pts, &IntervalSet::new(j).unwrap()).unwrap().value;
    assert!(h(2) > h(3));
    assert!((h(2) - h(3) - 2f64.ln()).abs() < 1e-12);
}
