//! Nonparametric change-point detection for univariate series.
//!
//! The centerpiece is a scan test: slide a split point `τ` across the
//! series, compare the two segments with the Wilcoxon–Mann–Whitney test at
//! every split, and summarize the profile by its minimum p-value. Because
//! the minimum of dependent p-values has no closed-form law, significance
//! comes from a simulated null distribution ([`generate_null`]) that can be
//! persisted to disk and reused ([`EmpiricalNull::save`] / `load`). The same
//! machinery drives four competitor statistics (Pettitt's statistic, its
//! standardized variant, two t-statistic scans, and a Gaussian
//! log-likelihood-ratio scan), two bootstrap confidence-interval procedures
//! for the change *location*, and a simulation harness for power and
//! coverage studies.
//!
//! # Example
//!
//! ```
//! use cpscan::{
//!     detect_change_point, generate_null, GeneratorDist, NullGenSpec, PValuePolicy, Statistic,
//!     TimeSeries,
//! };
//!
//! // A step change after the 20th observation.
//! let mut values: Vec<f64> = (0..20).map(|i| (i % 7) as f64).collect();
//! values.extend((0..37).map(|i| (14 - i % 5) as f64));
//! let x = TimeSeries::new(values)?;
//!
//! // Simulate the null once; in real use, save it and reload it.
//! let spec = NullGenSpec {
//!     statistic: Statistic::WmwMinP,
//!     n: x.len(),
//!     b: 6,
//!     nsim: 2000,
//!     generator_dist: GeneratorDist::StandardNormal,
//!     policy: PValuePolicy::ReferenceCompatible,
//!     master_seed: 1,
//! };
//! let null = generate_null(&spec)?;
//!
//! let outcome = detect_change_point(&x, &null, &spec.scan_config())?;
//! assert_eq!(outcome.tau_hat, 20);
//! assert!(outcome.p_value < 0.01);
//! # Ok::<(), cpscan::Error>(())
//! ```
//!
//! # Determinism
//!
//! Every Monte Carlo routine takes a `u64` seed and assigns one independent
//! RNG substream per replicate, so results are bit-identical across runs,
//! thread counts, and the two execution modes ([`ExecMode`]). The `parallel`
//! cargo feature (on by default) runs replicates on a rayon thread pool;
//! without it the same code runs sequentially.

// Frozen reference values (distribution coefficients, test oracles) keep
// their full published decimal expansions even where f64 rounds them.
#![allow(clippy::excessive_precision)]

pub mod bootstrap;
pub mod detect;
pub mod dist;
pub mod error;
pub mod exec;
pub mod null_dist;
pub mod rng;
pub mod scan;
pub mod series;
pub mod sim;
pub mod two_sample;

pub use bootstrap::{
    bootstrap_ci, bootstrap_ci_mode, icboot1, icboot2, quantile_type7, BootMethod, BootstrapCI,
    BootstrapSpec,
};
pub use detect::{
    detect_change_point, detect_change_point_max, detect_with_options, DetectOptions,
    DetectionOutcome,
};
pub use error::{Error, Result};
pub use exec::ExecMode;
pub use null_dist::{
    generate_null, generate_null_mode, EmpiricalNull, GeneratorDist, NullGenSpec,
};
pub use scan::{
    compute_profile, scan_gaussian_lr, scan_pettitt, scan_t, scan_wmw_pvalues, Objective,
    ScanConfig, ScanProfile, Statistic, TFlavor,
};
pub use series::TimeSeries;
pub use sim::{
    estimate_coverage, estimate_coverage_mode, estimate_power, estimate_power_mode,
    simulate_h1_series, CoverageResult, H1Family, H1Scenario, PowerResult, StudyConfig,
};
pub use two_sample::{
    mann_whitney_u, midranks, t_two_sample, wmw_p_two_sided, PValuePolicy, EXACT_SIZE_LIMIT,
};
