//! Resampling confidence intervals for the change-point location.
//!
//! Both procedures start from the WMW scan's estimate `τ̂` on the original
//! series and rebuild `nboot` series by resampling the two segments with
//! replacement, re-estimating the change point on each:
//!
//! * **Boot1** resamples `x₁…x_τ̂` (size `τ̂`) and `x_τ̂₊₁…x_n` (size `n−τ̂`)
//!   around the fixed split `τ̂`.
//! * **Boot2** first draws a jittered split `τ̂′` uniformly from
//!   `{τ̂−1, τ̂, τ̂+1}` and resamples around `τ̂′` — acknowledging that the
//!   split itself is estimated, at the price of slightly wider intervals.
//!
//! The interval is the pair of type-7 empirical quantiles (`alpha/2`,
//! `1−alpha/2`) of the replicate estimates. Replicate `j` draws from RNG
//! substream `(seed, j)`; in Boot2 the `τ̂′` draw comes first on that
//! substream, then the resampling draws, left segment before right.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::rng::replicate_rng;
use crate::scan::scan_wmw_pvalues;
use crate::series::TimeSeries;
use crate::two_sample::PValuePolicy;

/// Which resampling procedure to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BootMethod {
    /// Fixed split at `τ̂`.
    #[serde(rename = "boot1")]
    Boot1,
    /// Split jittered to `τ̂′ ∈ {τ̂−1, τ̂, τ̂+1}` per replicate.
    #[serde(rename = "boot2")]
    Boot2,
}

impl BootMethod {
    pub const ALL: [BootMethod; 2] = [BootMethod::Boot1, BootMethod::Boot2];

    /// Stable lowercase code: `boot1` / `boot2`.
    pub fn code(&self) -> &'static str {
        match self {
            BootMethod::Boot1 => "boot1",
            BootMethod::Boot2 => "boot2",
        }
    }

    /// Inverse of [`BootMethod::code`].
    pub fn from_code(code: &str) -> Option<Self> {
        BootMethod::ALL.into_iter().find(|m| m.code() == code)
    }
}

impl std::fmt::Display for BootMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for BootMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BootMethod::from_code(s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown bootstrap method {s:?} (expected \"boot1\" or \"boot2\")"
            ))
        })
    }
}

/// Parameters of a bootstrap run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapSpec {
    pub method: BootMethod,
    /// Number of resampled series.
    pub nboot: usize,
    /// Interval level is `1 − alpha`; quantiles at `alpha/2`, `1 − alpha/2`.
    /// Must lie in `(0, 1]` (`alpha = 1` collapses both quantiles to the
    /// median, a zero-length interval).
    pub alpha: f64,
    /// Window margin of the underlying WMW scan.
    pub b: usize,
    pub policy: PValuePolicy,
    pub seed: u64,
}

impl BootstrapSpec {
    /// Spec with the conventional defaults: `nboot = 1000`, `alpha = 0.05`,
    /// `b = 6`, reference-compatible p-values.
    pub fn new(method: BootMethod, seed: u64) -> Self {
        BootstrapSpec {
            method,
            nboot: 1000,
            alpha: 0.05,
            b: 6,
            policy: PValuePolicy::default(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nboot == 0 {
            return Err(Error::invalid("nboot must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if self.b == 0 {
            return Err(Error::invalid("window margin b must be at least 1"));
        }
        Ok(())
    }
}

/// A bootstrap confidence interval for the change-point location.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCI {
    /// `alpha/2` empirical quantile of the replicate estimates (type-7
    /// interpolation, so generally not an integer).
    pub lower: f64,
    /// `1 − alpha/2` empirical quantile.
    pub upper: f64,
    /// The point estimate on the original series.
    pub tau_hat: usize,
    /// All `nboot` replicate estimates, in replicate order.
    pub replicate_estimates: Vec<usize>,
}

/// Empirical quantile with type-7 (linear interpolation) semantics, the
/// convention of most statistical environments: `h = (m−1)p + 1`, linear
/// between the `⌊h⌋`-th and `⌊h⌋+1`-th order statistics.
///
/// `sorted` must be non-empty and ascending, `p` in `[0, 1]`; violations
/// panic (callers in this crate validate upstream).
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&p), "quantile level {p} outside [0, 1]");
    let m = sorted.len();
    let h = (m - 1) as f64 * p; // 0-based index with fractional part
    let j = h.floor() as usize;
    let g = h - j as f64;
    if g == 0.0 || j + 1 >= m {
        sorted[j.min(m - 1)]
    } else {
        sorted[j] + g * (sorted[j + 1] - sorted[j])
    }
}

/// Boot1 interval (fixed split). Equivalent to
/// [`bootstrap_ci`] with `spec.method = Boot1`.
pub fn icboot1(x: &TimeSeries, spec: &BootstrapSpec) -> Result<BootstrapCI> {
    run(x, spec, BootMethod::Boot1, ExecMode::Parallel)
}

/// Boot2 interval (jittered split). Equivalent to
/// [`bootstrap_ci`] with `spec.method = Boot2`.
pub fn icboot2(x: &TimeSeries, spec: &BootstrapSpec) -> Result<BootstrapCI> {
    run(x, spec, BootMethod::Boot2, ExecMode::Parallel)
}

/// Bootstrap interval with the method named in `spec`.
pub fn bootstrap_ci(x: &TimeSeries, spec: &BootstrapSpec) -> Result<BootstrapCI> {
    run(x, spec, spec.method, ExecMode::Parallel)
}

/// As [`bootstrap_ci`], with explicit execution mode. Results are
/// identical in both modes and for any worker count.
pub fn bootstrap_ci_mode(
    x: &TimeSeries,
    spec: &BootstrapSpec,
    mode: ExecMode,
) -> Result<BootstrapCI> {
    run(x, spec, spec.method, mode)
}

fn run(x: &TimeSeries, spec: &BootstrapSpec, method: BootMethod, mode: ExecMode) -> Result<BootstrapCI> {
    spec.validate()?;
    let n = x.len();
    let base = scan_wmw_pvalues(x, spec.b, spec.policy)?;
    let tau_hat = base.tau_hat();
    if method == BootMethod::Boot2 && (tau_hat < 2 || tau_hat > n - 2) {
        return Err(Error::invalid(format!(
            "Boot2 needs τ̂±1 to be valid split points, but τ̂ = {tau_hat} with n = {n}"
        )));
    }
    let values = x.values();
    let replicate_estimates = map_indexed(mode, spec.nboot, |j| {
        let mut rng = replicate_rng(spec.seed, j as u64);
        let split = match method {
            BootMethod::Boot1 => tau_hat,
            // The jitter draw deliberately precedes the resampling draws on
            // this replicate's substream; reordering would silently change
            // archived results.
            BootMethod::Boot2 => tau_hat - 1 + rng.random_range(0u64..3) as usize,
        };
        let mut xb = Vec::with_capacity(n);
        for _ in 0..split {
            xb.push(values[rng.random_range(0..split as u64) as usize]);
        }
        let right = (n - split) as u64;
        for _ in 0..n - split {
            xb.push(values[split + rng.random_range(0..right) as usize]);
        }
        let xb = TimeSeries::new(xb).expect("resampled values are finite");
        scan_wmw_pvalues(&xb, spec.b, spec.policy)
            .expect("resampled series keeps the original length")
            .tau_hat()
    });
    let mut sorted: Vec<f64> = replicate_estimates.iter().map(|&e| e as f64).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(BootstrapCI {
        lower: quantile_type7(&sorted, spec.alpha / 2.0),
        upper: quantile_type7(&sorted, 1.0 - spec.alpha / 2.0),
        tau_hat,
        replicate_estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn step_series() -> TimeSeries {
        // 20 zeros then 37 ones: the paper-shaped clean step.
        let mut v = vec![0.0; 20];
        v.extend(vec![1.0; 37]);
        TimeSeries::new(v).unwrap()
    }

    #[test]
    fn quantile_type7_matches_reference_values() {
        let s: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_abs_diff_eq!(quantile_type7(&s, 0.025), 1.225, epsilon = 1e-12);
        assert_abs_diff_eq!(quantile_type7(&s, 0.975), 9.775, epsilon = 1e-12);
        assert_abs_diff_eq!(quantile_type7(&s, 0.25), 3.25, epsilon = 1e-12);
        assert_eq!(quantile_type7(&s, 0.0), 1.0);
        assert_eq!(quantile_type7(&s, 1.0), 10.0);
        let one = [7.5];
        assert_eq!(quantile_type7(&one, 0.33), 7.5);
        // Median of [1,2,3,4] interpolates.
        let four: Vec<f64> = (1..=4).map(f64::from).collect();
        assert_eq!(quantile_type7(&four, 0.5), 2.5);
    }

    #[test]
    fn quantile_is_monotone_in_p_and_bounded() {
        let s: Vec<f64> = vec![2.0, 3.0, 3.0, 7.0, 11.0, 20.0];
        let mut last = f64::NEG_INFINITY;
        for i in 0..=100 {
            let q = quantile_type7(&s, i as f64 / 100.0);
            assert!(q >= last);
            assert!((2.0..=20.0).contains(&q));
            last = q;
        }
    }

    #[test]
    fn boot1_on_clean_step_collapses_to_zero_length() {
        // Resampling a constant segment reproduces it, so every replicate
        // series equals the original and every estimate equals τ̂.
        let x = step_series();
        let spec = BootstrapSpec {
            nboot: 200,
            ..BootstrapSpec::new(BootMethod::Boot1, 42)
        };
        let ci = icboot1(&x, &spec).unwrap();
        assert_eq!(ci.tau_hat, 20);
        assert!(ci.replicate_estimates.iter().all(|&e| e == 20));
        assert_eq!(ci.lower, 20.0);
        assert_eq!(ci.upper, 20.0);
    }

    #[test]
    fn boot2_on_clean_step_stays_within_one_of_tau_hat() {
        let x = step_series();
        let spec = BootstrapSpec {
            nboot: 500,
            ..BootstrapSpec::new(BootMethod::Boot2, 42)
        };
        let ci = icboot2(&x, &spec).unwrap();
        assert_eq!(ci.tau_hat, 20);
        assert!(
            ci.lower >= 19.0 && ci.upper <= 21.0,
            "interval [{}, {}]",
            ci.lower,
            ci.upper
        );
        assert!(ci.lower <= ci.upper);
        // The jitter actually moves the split: not all estimates equal τ̂.
        assert!(ci.replicate_estimates.iter().any(|&e| e != 20));
    }

    #[test]
    fn endpoints_stay_inside_the_scan_window() {
        // Pure noise: estimates scatter, but always within [b, n−b].
        let v: Vec<f64> = (0..30).map(|i| ((i * 2654435761_usize) % 97) as f64).collect();
        let x = TimeSeries::new(v).unwrap();
        for method in BootMethod::ALL {
            let spec = BootstrapSpec {
                nboot: 300,
                b: 4,
                ..BootstrapSpec::new(method, 7)
            };
            let ci = bootstrap_ci(&x, &spec).unwrap();
            assert!(ci.replicate_estimates.iter().all(|&e| (4..=26).contains(&e)));
            assert!(ci.lower >= 4.0 && ci.upper <= 26.0);
            assert!(ci.lower <= ci.upper);
        }
    }

    #[test]
    fn alpha_one_collapses_to_the_median() {
        let x = step_series();
        let spec = BootstrapSpec {
            alpha: 1.0,
            nboot: 101,
            ..BootstrapSpec::new(BootMethod::Boot2, 3)
        };
        let ci = bootstrap_ci(&x, &spec).unwrap();
        assert_eq!(ci.lower, ci.upper);
    }

    #[test]
    fn nboot_one_collapses_to_single_estimate() {
        let x = step_series();
        let spec = BootstrapSpec {
            nboot: 1,
            ..BootstrapSpec::new(BootMethod::Boot1, 11)
        };
        let ci = bootstrap_ci(&x, &spec).unwrap();
        assert_eq!(ci.replicate_estimates.len(), 1);
        assert_eq!(ci.lower, ci.replicate_estimates[0] as f64);
        assert_eq!(ci.lower, ci.upper);
    }

    #[test]
    fn deterministic_across_modes_and_runs() {
        let v: Vec<f64> = (0..40)
            .map(|i| if i < 15 { (i % 5) as f64 } else { 8.0 + (i % 7) as f64 })
            .collect();
        let x = TimeSeries::new(v).unwrap();
        for method in BootMethod::ALL {
            let spec = BootstrapSpec {
                nboot: 120,
                b: 3,
                ..BootstrapSpec::new(method, 123)
            };
            let a = bootstrap_ci_mode(&x, &spec, ExecMode::Parallel).unwrap();
            let b = bootstrap_ci_mode(&x, &spec, ExecMode::Parallel).unwrap();
            let c = bootstrap_ci_mode(&x, &spec, ExecMode::Sequential).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn estimates_invariant_under_monotone_scaling() {
        // Rank-based core + identical resampling indices ⇒ identical
        // replicate estimates when the data are scaled by a power of two.
        let v: Vec<f64> = (0..28)
            .map(|i| ((i * 37) % 23) as f64 + if i >= 14 { 40.0 } else { 0.0 })
            .collect();
        let scaled: Vec<f64> = v.iter().map(|a| a * 0.25).collect();
        let spec = BootstrapSpec {
            nboot: 150,
            b: 3,
            ..BootstrapSpec::new(BootMethod::Boot2, 55)
        };
        let ci_a = bootstrap_ci(&TimeSeries::new(v).unwrap(), &spec).unwrap();
        let ci_b = bootstrap_ci(&TimeSeries::new(scaled).unwrap(), &spec).unwrap();
        assert_eq!(ci_a, ci_b);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let x = step_series();
        let mut spec = BootstrapSpec::new(BootMethod::Boot1, 1);
        spec.nboot = 0;
        assert!(bootstrap_ci(&x, &spec).is_err());
        let mut spec = BootstrapSpec::new(BootMethod::Boot1, 1);
        spec.alpha = 0.0;
        assert!(bootstrap_ci(&x, &spec).is_err());
        let mut spec = BootstrapSpec::new(BootMethod::Boot1, 1);
        spec.alpha = 1.5;
        assert!(bootstrap_ci(&x, &spec).is_err());
        // Series shorter than 2b.
        let short = TimeSeries::new(vec![1.0; 11]).unwrap();
        assert!(bootstrap_ci(&short, &BootstrapSpec::new(BootMethod::Boot1, 1)).is_err());
    }

    #[test]
    fn method_codes_round_trip() {
        for m in BootMethod::ALL {
            assert_eq!(BootMethod::from_code(m.code()), Some(m));
            assert_eq!(m.code().parse::<BootMethod>().unwrap(), m);
        }
        assert!("boot3".parse::<BootMethod>().is_err());
    }
}
