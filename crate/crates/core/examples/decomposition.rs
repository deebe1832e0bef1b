// Split an estimate into a plug-in entropy term and a distribution-free
// term: `H_n = H̃_n + M_n + C_E`.
//
// `cargo run --example decomposition`

use entropykit::diagnostics::{self, DiagnosticsOptions};
use entropykit::distributions::DistributionSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let specs = [
        DistributionSpec::UniformCube { dim: 1, side: 1.0 },
        DistributionSpec::IsotropicGaussian { dim: 1, sigma: 1.0 },
        DistributionSpec::Exponential { rate: 1.0 },
        DistributionSpec::Cauchy { scale: 1.0 },
        DistributionSpec::IsotropicGaussian { dim: 3, sigma: 1.0 },
    ];
    println!("{:<32} {:>9} {:>9} {:>9} {:>9} {:>10}", "law", "H_n", "H~_n", "M_n", "exact", "residual");
    for (k, spec) in specs.into_iter().enumerate() {
        let sample = spec.sample(5000, k as u64)?;
        let r = diagnostics::diagnose(&sample, &spec, &DiagnosticsOptions::default())?;
        println!(
            "{:<32} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>10.1e}",
            r.spec,
            r.h_n,
            r.tilde_h_n,
            r.m_n,
            spec.exact_entropy(),
            r.decomposition_residual
        );
    }
    println!("M_n fluctuates around -C_E = -0.57722 whatever the law");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
