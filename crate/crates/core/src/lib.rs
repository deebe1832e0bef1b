//! Nearest-neighbor (Kozachenko-Leonenko) differential entropy estimation.
//!
//! The estimate for a sample `X_1..X_n` in `R^d` is
//! `H_n = (1/n) Σ ln((n-1) R_i^d v_d) + C_E`, where `R_i` is the distance from
//! `X_i` to its nearest other point. Beyond the estimator the crate ships
//! reference laws with exact entropies and ball masses, diagnostics built on
//! those masses, and a seeded experiment runner.
//!
//! Runnable examples:
//!
//! - `estimate_from_sample`: brute vs kd-tree, 1-NN densities, `ell_n`
//! - `decomposition`: `H_n = H̃_n + M_n + C_E` across laws
//! - `ball_mass_laws`: uniformity of ball masses, their sum
//! - `tail_regimes`: the log-tail moment on light and heavy tails
//! - `divergence`: the estimate running away on a zero-entropy law
//! - `convergence_experiment`: config, CSV, manifest, summary

pub mod cli;
pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod nn;
pub mod numeric;
pub mod rng;
