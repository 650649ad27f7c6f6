//! The change-point test itself: scan the series, compare the profile
//! extremum against an empirical null, report a Monte Carlo p-value and the
//! estimated change location.

use crate::error::{Error, Result};
use crate::null_dist::EmpiricalNull;
use crate::scan::{compute_profile, Objective, ScanConfig, ScanProfile};
use crate::series::TimeSeries;

/// Knobs for the p-value estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DetectOptions {
    /// Estimate `p = (k + 1) / (nsim + 1)` instead of `k / nsim`, where `k`
    /// counts null values strictly more extreme than the observation. The
    /// corrected estimator never returns exactly zero; the uncorrected one
    /// is the classical plug-in. Off by default.
    pub add_one_correction: bool,
}

/// Result of a change-point test.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutcome {
    /// Monte Carlo p-value: the fraction of null draws strictly more
    /// extreme than the observed scan extremum.
    pub p_value: f64,
    /// Estimated change point (1-based last index of the left segment).
    pub tau_hat: usize,
    /// The full per-split profile, for reporting.
    pub profile: ScanProfile,
}

/// Test for a change point with a statistic whose profile is *minimized*
/// (min-p statistics). `p = #{null < observed} / nsim`: the smaller the
/// observed minimum p-value, the fewer null draws undercut it.
pub fn detect_change_point(
    x: &TimeSeries,
    null: &EmpiricalNull,
    cfg: &ScanConfig,
) -> Result<DetectionOutcome> {
    expect_objective(cfg, Objective::Minimize, "detect_change_point_max")?;
    detect_with_options(x, null, cfg, &DetectOptions::default())
}

/// Test for a change point with a statistic whose profile is *maximized*
/// (Pettitt, |t|, likelihood ratio). `p = #{null > observed} / nsim`.
pub fn detect_change_point_max(
    x: &TimeSeries,
    null: &EmpiricalNull,
    cfg: &ScanConfig,
) -> Result<DetectionOutcome> {
    expect_objective(cfg, Objective::Maximize, "detect_change_point")?;
    detect_with_options(x, null, cfg, &DetectOptions::default())
}

fn expect_objective(cfg: &ScanConfig, want: Objective, other_fn: &str) -> Result<()> {
    if cfg.statistic.objective() != want {
        return Err(Error::invalid(format!(
            "statistic {} is summarized by its {}; use {other_fn} (or detect_with_options)",
            cfg.statistic,
            cfg.statistic.objective().code()
        )));
    }
    Ok(())
}

/// Detection with explicit options; dispatches on the statistic's
/// objective. [`detect_change_point`] / [`detect_change_point_max`] are the
/// plain entry points for the two directions.
pub fn detect_with_options(
    x: &TimeSeries,
    null: &EmpiricalNull,
    cfg: &ScanConfig,
    opts: &DetectOptions,
) -> Result<DetectionOutcome> {
    check_compatible(x, null, cfg)?;
    let profile = compute_profile(x, cfg)?;
    let observed = profile.extremum_value();
    let more_extreme = match profile.objective() {
        Objective::Minimize => null.count_below(observed),
        Objective::Maximize => null.count_above(observed),
    };
    let p_value = if opts.add_one_correction {
        (more_extreme + 1) as f64 / (null.len() + 1) as f64
    } else {
        more_extreme as f64 / null.len() as f64
    };
    Ok(DetectionOutcome {
        p_value,
        tau_hat: profile.tau_hat(),
        profile,
    })
}

/// A null is only meaningful for data of the exact shape it was simulated
/// for; refuse anything else rather than silently mis-calibrate.
fn check_compatible(x: &TimeSeries, null: &EmpiricalNull, cfg: &ScanConfig) -> Result<()> {
    let spec = null.spec();
    if spec.statistic != cfg.statistic
        || spec.b != cfg.b
        || spec.policy != cfg.policy
        || spec.n != x.len()
    {
        return Err(Error::mismatch(format!(
            "null was simulated for (statistic={}, n={}, b={}, policy={}) but the request is \
             (statistic={}, n={}, b={}, policy={})",
            spec.statistic,
            spec.n,
            spec.b,
            spec.policy,
            cfg.statistic,
            x.len(),
            cfg.b,
            cfg.policy
        )));
    }
    Ok(())
}
