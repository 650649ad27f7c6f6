//! Change-point scan statistics over all admissible split points.
//!
//! A series of length `n` is split at every `τ ∈ {b, …, n−b}` (1-based: the
//! left segment is `x₁…x_τ`), a two-sample statistic is evaluated at each
//! split, and the profile is summarized by its extremum. The window margin
//! `b` keeps degenerate tiny segments out of the scan.
//!
//! Six statistics share this skeleton:
//!
//! | code           | per-split value                        | summary |
//! |----------------|----------------------------------------|---------|
//! | `v`            | two-sided WMW p-value                  | min     |
//! | `pettitt`      | `|U_τ − n₁n₂/2|`                       | max     |
//! | `pettitt-std`  | the same over `√(n₁n₂(n+1)/12)`        | max     |
//! | `tmax`         | pooled-variance `|t|`                  | max     |
//! | `tminp`        | two-sided t p-value                    | min     |
//! | `lr`           | Gaussian mean-shift log-likelihood ratio | max   |
//!
//! The WMW and Pettitt scans rank the pooled series once and read every
//! split's rank sum off a prefix-sum table (`O(n log n + n·L)` for `L`
//! splits, plus the p-value transform); the t and likelihood-ratio scans
//! recompute segment sums per split in a numerically safe two-pass form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::two_sample::{midranks, t_two_sample, tie_term, wmw_p_from_u, PValuePolicy};

/// Whether a profile is summarized by its smallest or largest value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

impl Objective {
    /// Stable code used in null-distribution files: `min` / `max`.
    pub fn code(&self) -> &'static str {
        match self {
            Objective::Minimize => "min",
            Objective::Maximize => "max",
        }
    }

    /// Inverse of [`Objective::code`].
    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "min" => Some(Objective::Minimize),
            "max" => Some(Objective::Maximize),
            _ => None,
        }
    }
}

/// The scan statistic to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistic {
    /// Minimum over splits of the two-sided WMW p-value.
    #[serde(rename = "v")]
    WmwMinP,
    /// Maximum absolute deviation of U from its null mean.
    #[serde(rename = "pettitt")]
    Pettitt,
    /// The same deviation standardized by the (tie-free) null sd.
    #[serde(rename = "pettitt-std")]
    PettittStd,
    /// Maximum absolute pooled-variance t statistic.
    #[serde(rename = "tmax")]
    TMaxAbs,
    /// Minimum two-sided t p-value.
    #[serde(rename = "tminp")]
    TMinP,
    /// Maximum Gaussian mean-shift log-likelihood ratio.
    #[serde(rename = "lr")]
    GaussianLr,
}

impl Statistic {
    /// All statistics, in canonical order.
    pub const ALL: [Statistic; 6] = [
        Statistic::WmwMinP,
        Statistic::Pettitt,
        Statistic::PettittStd,
        Statistic::TMaxAbs,
        Statistic::TMinP,
        Statistic::GaussianLr,
    ];

    /// Whether small or large values of the profile indicate a change.
    pub fn objective(&self) -> Objective {
        match self {
            Statistic::WmwMinP | Statistic::TMinP => Objective::Minimize,
            _ => Objective::Maximize,
        }
    }

    /// Short lowercase code used on the command line and in configs.
    pub fn cli_code(&self) -> &'static str {
        match self {
            Statistic::WmwMinP => "v",
            Statistic::Pettitt => "pettitt",
            Statistic::PettittStd => "pettitt-std",
            Statistic::TMaxAbs => "tmax",
            Statistic::TMinP => "tminp",
            Statistic::GaussianLr => "lr",
        }
    }

    /// Uppercase code used in null-distribution file headers.
    pub fn file_code(&self) -> &'static str {
        match self {
            Statistic::WmwMinP => "V",
            Statistic::Pettitt => "PETTITT",
            Statistic::PettittStd => "PETTITT_STD",
            Statistic::TMaxAbs => "TMAX",
            Statistic::TMinP => "TMINP",
            Statistic::GaussianLr => "LR",
        }
    }

    /// Inverse of [`Statistic::cli_code`].
    pub fn from_cli_code(code: &str) -> Option<Self> {
        Statistic::ALL.into_iter().find(|s| s.cli_code() == code)
    }

    /// Inverse of [`Statistic::file_code`].
    pub fn from_file_code(code: &str) -> Option<Self> {
        Statistic::ALL.into_iter().find(|s| s.file_code() == code)
    }

    /// Smallest admissible window margin: the t scans need two values per
    /// segment for a pooled variance, everything else works from one.
    pub fn min_margin(&self) -> usize {
        match self {
            Statistic::TMaxAbs | Statistic::TMinP => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.cli_code())
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::from_cli_code(s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown statistic {s:?} (expected one of: v, pettitt, pettitt-std, tmax, tminp, lr)"
            ))
        })
    }
}

/// Scan parameters: which statistic, the window margin, and the WMW
/// p-value policy (ignored by the non-WMW statistics).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub statistic: Statistic,
    /// Window margin: splits run over `τ ∈ {b, …, n−b}`.
    pub b: usize,
    pub policy: PValuePolicy,
}

impl ScanConfig {
    pub fn new(statistic: Statistic, b: usize) -> Self {
        ScanConfig {
            statistic,
            b,
            policy: PValuePolicy::default(),
        }
    }

    pub fn with_policy(mut self, policy: PValuePolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Check the margin against the statistic and a series length.
    pub(crate) fn validate_for_len(&self, n: usize) -> Result<()> {
        let min_b = self.statistic.min_margin();
        if self.b < min_b {
            return Err(Error::invalid(format!(
                "window margin b={} is too small for statistic {} (minimum {min_b})",
                self.b, self.statistic
            )));
        }
        if n < 2 * self.b {
            return Err(Error::invalid(format!(
                "series of length {n} admits no split with window margin b={} (need length ≥ {})",
                self.b,
                2 * self.b
            )));
        }
        Ok(())
    }
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig::new(Statistic::WmwMinP, 6)
    }
}

/// Per-split values of a scan statistic, with the extremal summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanProfile {
    taus: Vec<usize>,
    values: Vec<f64>,
    objective: Objective,
    extremum_value: f64,
    tau_hat: usize,
}

impl ScanProfile {
    fn new(taus: Vec<usize>, values: Vec<f64>, objective: Objective) -> Self {
        debug_assert_eq!(taus.len(), values.len());
        debug_assert!(!values.is_empty());
        // First extremal index wins on ties, matching the convention that a
        // change is dated as early as the evidence allows.
        let mut best = 0;
        for (i, v) in values.iter().enumerate().skip(1) {
            let better = match objective {
                Objective::Minimize => *v < values[best],
                Objective::Maximize => *v > values[best],
            };
            if better {
                best = i;
            }
        }
        ScanProfile {
            extremum_value: values[best],
            tau_hat: taus[best],
            taus,
            values,
            objective,
        }
    }

    /// Split points scanned, ascending: `b, b+1, …, n−b` (1-based left-
    /// segment lengths).
    pub fn taus(&self) -> &[usize] {
        &self.taus
    }

    /// Statistic value at each split, aligned with [`ScanProfile::taus`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    /// The profile's extremal value (minimum or maximum per the objective).
    pub fn extremum_value(&self) -> f64 {
        self.extremum_value
    }

    /// Split point achieving the extremum; the earliest split wins ties.
    pub fn tau_hat(&self) -> usize {
        self.tau_hat
    }

    /// Splits whose value is infinite (e.g. a zero-variance segment under
    /// the likelihood-ratio statistic). Empty for well-behaved data.
    pub fn non_finite_taus(&self) -> Vec<usize> {
        self.taus
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| !v.is_finite())
            .map(|(t, _)| *t)
            .collect()
    }
}

/// Scan `x` with the statistic selected by `cfg`.
pub fn compute_profile(x: &TimeSeries, cfg: &ScanConfig) -> Result<ScanProfile> {
    cfg.validate_for_len(x.len())?;
    match cfg.statistic {
        Statistic::WmwMinP => scan_wmw_pvalues(x, cfg.b, cfg.policy),
        Statistic::Pettitt => scan_pettitt(x, cfg.b, false),
        Statistic::PettittStd => scan_pettitt(x, cfg.b, true),
        Statistic::TMaxAbs => scan_t(x, cfg.b, TFlavor::MaxAbsT),
        Statistic::TMinP => scan_t(x, cfg.b, TFlavor::MinP),
        Statistic::GaussianLr => scan_gaussian_lr(x, cfg.b),
    }
}

/// Iterator over admissible splits with the whole-series rank prefix sums.
///
/// The pooled sample at every split is the whole series, so one global
/// midranking serves all splits: `R₁(τ)` is a prefix sum of ranks and
/// `U_τ = R₁(τ) − τ(τ+1)/2`.
struct RankScan {
    prefix: Vec<f64>,
    tie_term: f64,
    n: usize,
    b: usize,
}

impl RankScan {
    fn new(x: &TimeSeries, b: usize) -> Self {
        let ranks = midranks(x.values());
        let mut prefix = Vec::with_capacity(ranks.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for r in &ranks {
            acc += r;
            prefix.push(acc);
        }
        RankScan {
            prefix,
            tie_term: tie_term(x.values()),
            n: x.len(),
            b,
        }
    }

    fn taus(&self) -> std::ops::RangeInclusive<usize> {
        self.b..=(self.n - self.b)
    }

    /// `U_τ` for the left segment of length `tau`.
    fn u_at(&self, tau: usize) -> f64 {
        let t = tau as f64;
        self.prefix[tau] - t * (t + 1.0) / 2.0
    }
}

/// WMW p-value profile; small values indicate a change.
pub fn scan_wmw_pvalues(x: &TimeSeries, b: usize, policy: PValuePolicy) -> Result<ScanProfile> {
    ScanConfig::new(Statistic::WmwMinP, b).validate_for_len(x.len())?;
    let scan = RankScan::new(x, b);
    let mut taus = Vec::new();
    let mut values = Vec::new();
    for tau in scan.taus() {
        let p = wmw_p_from_u(scan.u_at(tau), tau, scan.n - tau, scan.tie_term, policy)?;
        taus.push(tau);
        values.push(p);
    }
    Ok(ScanProfile::new(taus, values, Objective::Minimize))
}

/// Pettitt profile `|U_τ − n₁n₂/2|`, optionally standardized by the
/// tie-free null sd `√(n₁n₂(n+1)/12)`; large values indicate a change.
pub fn scan_pettitt(x: &TimeSeries, b: usize, standardized: bool) -> Result<ScanProfile> {
    let stat = if standardized {
        Statistic::PettittStd
    } else {
        Statistic::Pettitt
    };
    ScanConfig::new(stat, b).validate_for_len(x.len())?;
    let scan = RankScan::new(x, b);
    let n = scan.n as f64;
    let mut taus = Vec::new();
    let mut values = Vec::new();
    for tau in scan.taus() {
        let n1 = tau as f64;
        let n2 = n - n1;
        let mut dev = (scan.u_at(tau) - n1 * n2 / 2.0).abs();
        if standardized {
            dev /= (n1 * n2 * (n + 1.0) / 12.0).sqrt();
        }
        taus.push(tau);
        values.push(dev);
    }
    Ok(ScanProfile::new(taus, values, Objective::Maximize))
}

/// How a t-statistic profile is summarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TFlavor {
    /// `|t_τ|`, maximized.
    MaxAbsT,
    /// The two-sided p-value of `t_τ`, minimized.
    MinP,
}

/// Pooled-variance t profile: `|t_τ|` (maximize) or its two-sided p-value
/// (minimize). Requires `b ≥ 2` so both segments have a variance.
pub fn scan_t(x: &TimeSeries, b: usize, flavor: TFlavor) -> Result<ScanProfile> {
    let stat = match flavor {
        TFlavor::MaxAbsT => Statistic::TMaxAbs,
        TFlavor::MinP => Statistic::TMinP,
    };
    ScanConfig::new(stat, b).validate_for_len(x.len())?;
    let values_all = x.values();
    let n = values_all.len();
    let mut taus = Vec::new();
    let mut values = Vec::new();
    for tau in b..=(n - b) {
        let (t, p) = t_two_sample(&values_all[..tau], &values_all[tau..])?;
        taus.push(tau);
        values.push(match flavor {
            TFlavor::MaxAbsT => t.abs(),
            TFlavor::MinP => p,
        });
    }
    let objective = match flavor {
        TFlavor::MaxAbsT => Objective::Maximize,
        TFlavor::MinP => Objective::Minimize,
    };
    Ok(ScanProfile::new(taus, values, objective))
}

/// Gaussian mean-shift log-likelihood-ratio profile
/// `λ_τ = (n/2)(ln s² − ln s_τ²)`, where `s²` is the whole-series variance
/// and `s_τ²` the split-wise residual variance (both with denominator `n`);
/// large values indicate a change.
///
/// A split whose residual variance is exactly zero (the change explains the
/// data perfectly) scores `+∞`, visible via
/// [`ScanProfile::non_finite_taus`]. A constant series has `s² = 0` and no
/// meaningful ratio at all, which is an error.
pub fn scan_gaussian_lr(x: &TimeSeries, b: usize) -> Result<ScanProfile> {
    ScanConfig::new(Statistic::GaussianLr, b).validate_for_len(x.len())?;
    let v = x.values();
    let n = v.len();
    let nf = n as f64;
    let mean = v.iter().sum::<f64>() / nf;
    let ss_total: f64 = v.iter().map(|a| (a - mean) * (a - mean)).sum();
    if ss_total == 0.0 {
        return Err(Error::degenerate(
            "constant series has zero variance; likelihood ratio is undefined",
        ));
    }
    let ln_s2 = (ss_total / nf).ln();
    let mut taus = Vec::new();
    let mut values = Vec::new();
    for tau in b..=(n - b) {
        let (left, right) = v.split_at(tau);
        let ss_split = segment_ss(left) + segment_ss(right);
        let lambda = if ss_split == 0.0 {
            f64::INFINITY
        } else {
            nf / 2.0 * (ln_s2 - (ss_split / nf).ln())
        };
        taus.push(tau);
        values.push(lambda);
    }
    Ok(ScanProfile::new(taus, values, Objective::Maximize))
}

/// Two-pass sum of squared deviations from the segment mean.
fn segment_ss(seg: &[f64]) -> f64 {
    let m = seg.iter().sum::<f64>() / seg.len() as f64;
    seg.iter().map(|a| (a - m) * (a - m)).sum()
}
