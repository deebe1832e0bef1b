macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(estimate_from_sample);
example!(decomposition);
example!(ball_mass_laws);
example!(tail_regimes);
example!(divergence);
example!(convergence_experiment);

#[test]
fn estimate_from_sample_runs() {
    estimate_from_sample::run_example().expect("example runs");
}

#[test]
fn decomposition_runs() {
    decomposition::run_example().expect("example runs");
}

#[test]
fn ball_mass_laws_runs() {
    ball_mass_laws::run_example().expect("example runs");
}

#[test]
fn tail_regimes_runs() {
    tail_regimes::run_example().expect("example runs");
}

#[test]
fn divergence_runs() {
    divergence::run_example().expect("example runs");
}

#[test]
fn convergence_experiment_runs() {
    convergence_experiment::run_example().expect("example runs");
}
