// A config-driven experiment: write the CSV and manifest, then read the
// CSV back and summarize it.
//
// `cargo run --example convergence_experiment`

use entropykit::experiments::{self, ExperimentConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let output = dir.path().join("gaussian.csv");
    let config = ExperimentConfig::from_json(&format!(
        r#"{{
            "spec": {{"family": "isotropic_gaussian", "dim": 1, "sigma": 1.0}},
            "n_grid": [100, 1000, 10000],
            "replicates": 10,
            "seed": 42,
            "diagnostics": {{"m_n": true, "ball_mass_sum": true, "log_tail": true}},
            "output_path": {}
        }}"#,
        serde_json::to_string(&output)?
    ))?;
    let run = experiments::execute(&config, 0)?;
    println!("wrote {} and {}", run.csv_path.display(), run.manifest_path.display());

    let rows = experiments::read_csv(&run.csv_path)?;
    println!("{:>6} {:>10} {:>10} {:>10}", "n", "mean H_n", "sd", "mean |err|");
    for s in experiments::summarize(&rows)? {
        println!(
            "{:>6} {:>10.5} {:>10.5} {:>10.5}",
            s.n,
            s.mean_h,
            s.sd_h,
            s.mean_abs_error.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
