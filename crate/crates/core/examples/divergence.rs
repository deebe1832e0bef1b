// The estimate diverges on a law of zero entropy spread over intervals at
// `2^(2^j)`. Points stay in `(interval, offset)` form so nothing overflows.
//
// `cargo run --example divergence`

use entropykit::distributions::DistributionSpec;
use entropykit::experiments::{self, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig {
        spec: DistributionSpec::Counterexample { clamp: 512 },
        n_grid: vec![100, 1000, 10_000],
        replicates: 20,
        seed: 1,
        backend: Default::default(),
        diagnostics: Default::default(),
        output_path: "divergence.csv".into(),
        record_wall_time: false,
    };
    let rows = experiments::run_divergence(&config, 0)?;
    println!("{:>7} {:>14} {:>14}", "n", "median H_n", "median ell_n");
    for s in experiments::summarize(&rows)? {
        println!("{:>7} {:>14.4e} {:>14.4e}", s.n, s.median_h, s.median_ell.unwrap_or(f64::NAN));
    }
    println!("true entropy: {}", config.spec.exact_entropy());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
