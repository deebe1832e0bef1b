// Estimate the entropy of a sample, with both nearest-neighbor backends.
//
// `cargo run --example estimate_from_sample`

use entropykit::distributions::DistributionSpec;
use entropykit::estimators::{ell_statistic, kl_entropy, one_nn_density};
use entropykit::nn::{Backend, PointSample};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tiny = PointSample::from_values(&[0.0, 1.0, 3.0])?;
    let h = kl_entropy(&tiny, Backend::Brute)?;
    println!("H({{0, 1, 3}}) = {:.12} nats", h.value);

    let spec = DistributionSpec::IsotropicGaussian { dim: 2, sigma: 1.0 };
    let sample = spec.sample(5000, 7)?;
    let points = sample.as_points()?;
    for backend in [Backend::Brute, Backend::Index] {
        let start = std::time::Instant::now();
        let h = kl_entropy(points, backend)?;
        println!(
            "{backend:>5}: H_n = {:.5} (exact {:.5}) in {:.0?}",
            h.value,
            spec.exact_entropy(),
            start.elapsed()
        );
    }

    let density = one_nn_density(points, Backend::Index)?;
    println!("leave-one-out entropy of the 1-NN densities: {:.5}", density.leave_one_out_entropy());

    let line = DistributionSpec::UniformCube { dim: 1, side: 1.0 }.sample(1000, 1)?;
    println!("ell_n on 1000 uniform points: {:.5} bits", ell_statistic(line.as_points()?, Backend::Index)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
