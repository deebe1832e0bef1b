// Distribution-free laws of nearest-neighbor ball masses: masses around a
// fixed centre are Uniform[0, 1], and the masses of all nearest-neighbor
// balls sum to about one.
//
// `cargo run --example ball_mass_laws`

use entropykit::diagnostics::{self, DiagnosticsOptions};
use entropykit::distributions::DistributionSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opts = DiagnosticsOptions::default();
    for spec in [
        DistributionSpec::UniformCube { dim: 1, side: 1.0 },
        DistributionSpec::IsotropicGaussian { dim: 1, sigma: 1.0 },
        DistributionSpec::Cauchy { scale: 1.0 },
        DistributionSpec::Counterexample { clamp: 512 },
    ] {
        let sample = spec.sample(2000, 11)?;
        let u = diagnostics::uniform_ball_mass_check(&sample, &spec, &opts)?;
        let sum = diagnostics::ball_mass_sum(&sample, &spec, &opts)?;
        println!(
            "{:<32} KS {:.4} (reject at {:.4}: {}), (n-1)·min {:.3}, ball sum {:.4}",
            spec.label(),
            u.ks_statistic,
            u.critical_value,
            u.rejects(),
            u.scaled_min,
            sum
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
