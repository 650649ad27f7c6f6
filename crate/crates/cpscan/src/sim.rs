//! Simulation studies: power curves under configurable one-change
//! alternatives and coverage/length curves for the bootstrap intervals.
//!
//! Both studies walk a parameter grid. Power simulates `nsim2` series per
//! grid cell and reports, per requested statistic, the fraction of series
//! whose Monte Carlo p-value falls *strictly below* `alpha`. Coverage is
//! conditional: only series on which the detection fires (`p ≤ alpha`) enter
//! the interval study, so each (cell, replicate) slot keeps drawing fresh
//! series until one is accepted or its attempt budget runs out.
//!
//! Determinism: cell `c`, replicate `r` uses RNG substream `(c << 32) | r` of
//! the study seed, and every bootstrap run inside coverage gets a seed
//! derived from `(seed, c, r, method_index)`. Results are identical across
//! runs, execution modes, and worker counts.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_ci_mode, BootMethod, BootstrapSpec};
use crate::detect::{detect_with_options, DetectOptions};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::null_dist::EmpiricalNull;
use crate::rng::{derive_seed, exponential, open_unit, replicate_rng, standard_normal};
use crate::scan::{ScanConfig, Statistic};
use crate::series::TimeSeries;
use crate::two_sample::PValuePolicy;

/// Alternative-hypothesis family: what changes at `τ`, parameterized by one
/// real per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum H1Family {
    /// `N(0, 1)` before the change, `N(m₁, 1)` after; `m₁` is the grid
    /// parameter (0 recovers the null).
    #[serde(rename = "normal-shift")]
    NormalShift,
    /// `U(0, 4)` before, `U(m₁, 4 + m₁)` after: same length-4 support,
    /// shifted by the grid parameter.
    #[serde(rename = "uniform-shift")]
    UniformShift,
    /// Exponential with mean 1 before, mean `ratio` after; the grid
    /// parameter is the mean ratio (1 recovers the null).
    #[serde(rename = "exponential-scale")]
    ExponentialScale,
}

impl H1Family {
    pub const ALL: [H1Family; 3] = [
        H1Family::NormalShift,
        H1Family::UniformShift,
        H1Family::ExponentialScale,
    ];

    /// Stable kebab-case code, also the JSON spelling.
    pub fn code(&self) -> &'static str {
        match self {
            H1Family::NormalShift => "normal-shift",
            H1Family::UniformShift => "uniform-shift",
            H1Family::ExponentialScale => "exponential-scale",
        }
    }

    /// Inverse of [`H1Family::code`].
    pub fn from_code(code: &str) -> Option<Self> {
        H1Family::ALL.into_iter().find(|f| f.code() == code)
    }

    /// The parameter value at which the family degenerates to "no change".
    pub fn null_param(&self) -> f64 {
        match self {
            H1Family::NormalShift | H1Family::UniformShift => 0.0,
            H1Family::ExponentialScale => 1.0,
        }
    }

    fn check_param(&self, param: f64) -> Result<()> {
        if !param.is_finite() {
            return Err(Error::invalid(format!(
                "grid parameter {param} is not finite"
            )));
        }
        if *self == H1Family::ExponentialScale && param <= 0.0 {
            return Err(Error::invalid(format!(
                "exponential-scale mean ratio must be positive, got {param}"
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for H1Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for H1Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        H1Family::from_code(s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown alternative family {s:?} (expected \"normal-shift\", \
                 \"uniform-shift\" or \"exponential-scale\")"
            ))
        })
    }
}

/// One simulation scenario: a family, the true change location, the series
/// length, the grid of effect parameters, and the per-cell replicate count.
#[derive(Debug, Clone, PartialEq)]
pub struct H1Scenario {
    pub family: H1Family,
    /// True change point: the last index (1-based) drawn from the
    /// pre-change distribution.
    pub tau: usize,
    pub n: usize,
    pub param_grid: Vec<f64>,
    /// Replicates per grid cell.
    pub nsim2: usize,
    /// Test level for power; acceptance threshold *and* interval level for
    /// coverage.
    pub alpha: f64,
}

impl H1Scenario {
    /// Scenario with the conventional `alpha = 0.05`.
    pub fn new(family: H1Family, tau: usize, n: usize, param_grid: Vec<f64>, nsim2: usize) -> Self {
        H1Scenario {
            family,
            tau,
            n,
            param_grid,
            nsim2,
            alpha: 0.05,
        }
    }

    /// Validity of everything except the window margin, which belongs to the
    /// null distribution this scenario will be paired with.
    fn validate_core(&self) -> Result<()> {
        if self.param_grid.is_empty() {
            return Err(Error::invalid("parameter grid must be nonempty"));
        }
        for &p in &self.param_grid {
            self.family.check_param(p)?;
        }
        if self.nsim2 == 0 {
            return Err(Error::invalid("nsim2 must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        // Replicate indices are packed into the low 32 bits of the stream id.
        if self.nsim2 > u32::MAX as usize || self.param_grid.len() > u32::MAX as usize {
            return Err(Error::invalid(
                "nsim2 and grid size must each fit in 32 bits",
            ));
        }
        Ok(())
    }

    /// Full validation against the window margin of the paired null.
    fn validate_with_margin(&self, b: usize) -> Result<()> {
        self.validate_core()?;
        if self.tau < b || self.tau + b > self.n {
            return Err(Error::invalid(format!(
                "true change point tau={} lies outside the scan window [{}, {}]",
                self.tau,
                b,
                self.n.saturating_sub(b)
            )));
        }
        Ok(())
    }
}

/// One series under the alternative: `x₁…x_τ` from the pre-change
/// distribution, `x_{τ+1}…x_n` from the post-change one, drawn in index
/// order with exactly one generator word per observation.
///
/// `param` is intended to be one of `scn.param_grid`; the routine itself
/// accepts any value that is valid for the family.
pub fn simulate_h1_series(scn: &H1Scenario, param: f64, rng: &mut impl rand::Rng) -> TimeSeries {
    let mut values = Vec::with_capacity(scn.n);
    for i in 1..=scn.n {
        let after = i > scn.tau;
        let x = match scn.family {
            H1Family::NormalShift => {
                let z = standard_normal(rng);
                if after {
                    param + z
                } else {
                    z
                }
            }
            H1Family::UniformShift => {
                let u = 4.0 * open_unit(rng);
                if after {
                    param + u
                } else {
                    u
                }
            }
            H1Family::ExponentialScale => exponential(rng, if after { param } else { 1.0 }),
        };
        values.push(x);
    }
    TimeSeries::new(values).expect("simulated draws are finite")
}

/// Power study output: `rejection_rates[i][j]` is the rejection fraction at
/// grid parameter `params[i]` under `statistics[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub params: Vec<f64>,
    pub statistics: Vec<Statistic>,
    pub rejection_rates: Vec<Vec<f64>>,
}

/// Coverage study output: `coverage[i][j]` is the fraction of accepted
/// replicates at `params[i]` whose `methods[j]` interval contains the true
/// `τ` (inclusive); `avg_length[i][j]` the mean of `upper − lower`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageResult {
    pub params: Vec<f64>,
    pub methods: Vec<BootMethod>,
    pub coverage: Vec<Vec<f64>>,
    pub avg_length: Vec<Vec<f64>>,
}

/// Power curves with the default (parallel) execution mode.
pub fn estimate_power(
    scn: &H1Scenario,
    statistics: &[Statistic],
    null_bank: &HashMap<Statistic, EmpiricalNull>,
    seed: u64,
) -> Result<PowerResult> {
    estimate_power_mode(scn, statistics, null_bank, seed, ExecMode::Parallel)
}

/// Power curves: for each grid cell, `nsim2` fresh series, each tested once
/// per requested statistic against its null; a rejection is `p < alpha`.
///
/// Every (cell, replicate) pair owns one RNG substream, and the same series
/// is used for all statistics, so adding a statistic to the request never
/// changes another statistic's column.
pub fn estimate_power_mode(
    scn: &H1Scenario,
    statistics: &[Statistic],
    null_bank: &HashMap<Statistic, EmpiricalNull>,
    seed: u64,
    mode: ExecMode,
) -> Result<PowerResult> {
    if statistics.is_empty() {
        return Err(Error::invalid("at least one statistic is required"));
    }
    if let Some(dup) = first_duplicate(statistics) {
        return Err(Error::invalid(format!(
            "statistic {dup} is requested more than once"
        )));
    }
    let configs = power_bank_configs(scn, statistics, null_bank)?;
    let ncells = scn.param_grid.len();
    let per_rep: Vec<Result<Vec<bool>>> = map_indexed(mode, ncells * scn.nsim2, |k| {
        let cell = k / scn.nsim2;
        let rep = k % scn.nsim2;
        let mut rng = replicate_rng(seed, ((cell as u64) << 32) | rep as u64);
        let x = simulate_h1_series(scn, scn.param_grid[cell], &mut rng);
        statistics
            .iter()
            .zip(&configs)
            .map(|(s, cfg)| {
                let out = detect_with_options(&x, &null_bank[s], cfg, &DetectOptions::default())?;
                Ok(out.p_value < scn.alpha)
            })
            .collect()
    });
    let mut rejection_rates = vec![vec![0.0; statistics.len()]; ncells];
    for (k, rep_result) in per_rep.into_iter().enumerate() {
        let rejects = rep_result?;
        for (j, rejected) in rejects.into_iter().enumerate() {
            if rejected {
                rejection_rates[k / scn.nsim2][j] += 1.0;
            }
        }
    }
    for row in &mut rejection_rates {
        for r in row.iter_mut() {
            *r /= scn.nsim2 as f64;
        }
    }
    Ok(PowerResult {
        params: scn.param_grid.clone(),
        statistics: statistics.to_vec(),
        rejection_rates,
    })
}

/// Check the bank covers the request coherently and return each statistic's
/// scan configuration.
fn power_bank_configs(
    scn: &H1Scenario,
    statistics: &[Statistic],
    null_bank: &HashMap<Statistic, EmpiricalNull>,
) -> Result<Vec<ScanConfig>> {
    let mut configs = Vec::with_capacity(statistics.len());
    let mut shared: Option<(usize, PValuePolicy)> = None;
    for s in statistics {
        let null = null_bank
            .get(s)
            .ok_or_else(|| Error::mismatch(format!("no null distribution provided for statistic {s}")))?;
        let spec = null.spec();
        if spec.n != scn.n {
            return Err(Error::mismatch(format!(
                "null for {s} was simulated for n={} but the scenario has n={}",
                spec.n, scn.n
            )));
        }
        match shared {
            None => shared = Some((spec.b, spec.policy)),
            Some((b, policy)) if b != spec.b || policy != spec.policy => {
                return Err(Error::mismatch(format!(
                    "nulls disagree on scan parameters: (b={}, policy={}) vs (b={}, policy={}) for {s}",
                    b, policy, spec.b, spec.policy
                )));
            }
            Some(_) => {}
        }
        configs.push(spec.scan_config());
    }
    let (b, _) = shared.expect("statistics is nonempty");
    scn.validate_with_margin(b)?;
    Ok(configs)
}

fn first_duplicate<T: PartialEq + Copy>(items: &[T]) -> Option<T> {
    for (i, a) in items.iter().enumerate() {
        if items[..i].contains(a) {
            return Some(*a);
        }
    }
    None
}

/// Coverage/length curves with the default (parallel) execution mode.
pub fn estimate_coverage(
    scn: &H1Scenario,
    methods: &[BootMethod],
    v_null: &EmpiricalNull,
    nboot: usize,
    attempt_budget: usize,
    seed: u64,
) -> Result<CoverageResult> {
    estimate_coverage_mode(scn, methods, v_null, nboot, attempt_budget, seed, ExecMode::Parallel)
}

/// Coverage study, conditional on detection: each of the `nsim2` replicate
/// slots per grid cell draws series until one is detected (`p ≤ alpha`
/// against `v_null`, which must be a min-p WMW null), then computes every
/// requested bootstrap interval on the accepted series.
///
/// `attempt_budget` caps the *total* draws per grid cell: each slot may use
/// at most `attempt_budget / nsim2` attempts before the study aborts with
/// [`Error::AttemptBudget`] — which is the expected outcome when the effect
/// is too small to detect reliably.
pub fn estimate_coverage_mode(
    scn: &H1Scenario,
    methods: &[BootMethod],
    v_null: &EmpiricalNull,
    nboot: usize,
    attempt_budget: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<CoverageResult> {
    if methods.is_empty() {
        return Err(Error::invalid("at least one interval method is required"));
    }
    if let Some(dup) = first_duplicate(methods) {
        return Err(Error::invalid(format!(
            "interval method {dup} is requested more than once"
        )));
    }
    let spec = v_null.spec();
    if spec.statistic != Statistic::WmwMinP {
        return Err(Error::invalid(format!(
            "coverage conditions on the min-p WMW detection, but the null is for {}",
            spec.statistic
        )));
    }
    if spec.n != scn.n {
        return Err(Error::mismatch(format!(
            "null was simulated for n={} but the scenario has n={}",
            spec.n, scn.n
        )));
    }
    scn.validate_with_margin(spec.b)?;
    if nboot == 0 {
        return Err(Error::invalid("nboot must be at least 1"));
    }
    let per_slot_budget = attempt_budget / scn.nsim2;
    if per_slot_budget == 0 {
        return Err(Error::invalid(format!(
            "attempt budget {attempt_budget} is smaller than nsim2={}, leaving no attempts per replicate",
            scn.nsim2
        )));
    }
    let (b, policy) = (spec.b, spec.policy);
    let ncells = scn.param_grid.len();
    struct SlotOutcome {
        covered: Vec<bool>,
        lengths: Vec<f64>,
    }
    let per_slot: Vec<Result<SlotOutcome>> = map_indexed(mode, ncells * scn.nsim2, |k| {
        let cell = k / scn.nsim2;
        let slot = k % scn.nsim2;
        let (x, _, _) = accept_series(scn, v_null, cell, slot, per_slot_budget, seed)?;
        let mut covered = Vec::with_capacity(methods.len());
        let mut lengths = Vec::with_capacity(methods.len());
        for (m_idx, &method) in methods.iter().enumerate() {
            let boot_spec = BootstrapSpec {
                method,
                nboot,
                alpha: scn.alpha,
                b,
                policy,
                seed: derive_seed(seed, &[cell as u64, slot as u64, m_idx as u64]),
            };
            // Slots are the parallel grain; the inner bootstrap is
            // sequential (its output is mode-independent anyway).
            let ci = bootstrap_ci_mode(&x, &boot_spec, ExecMode::Sequential)?;
            let t = scn.tau as f64;
            covered.push(ci.lower <= t && t <= ci.upper);
            lengths.push(ci.upper - ci.lower);
        }
        Ok(SlotOutcome { covered, lengths })
    });
    let mut coverage = vec![vec![0.0; methods.len()]; ncells];
    let mut avg_length = vec![vec![0.0; methods.len()]; ncells];
    for (k, slot_result) in per_slot.into_iter().enumerate() {
        let outcome = slot_result?;
        let cell = k / scn.nsim2;
        for j in 0..methods.len() {
            if outcome.covered[j] {
                coverage[cell][j] += 1.0;
            }
            avg_length[cell][j] += outcome.lengths[j];
        }
    }
    for cell in 0..ncells {
        for j in 0..methods.len() {
            coverage[cell][j] /= scn.nsim2 as f64;
            avg_length[cell][j] /= scn.nsim2 as f64;
        }
    }
    Ok(CoverageResult {
        params: scn.param_grid.clone(),
        methods: methods.to_vec(),
        coverage,
        avg_length,
    })
}

/// Draw series on slot `(cell, slot)`'s substream until the min-p WMW
/// detection fires (`p ≤ alpha`); return the accepted series, its p-value,
/// and how many attempts it took (1-based). Attempts consume the slot's
/// substream sequentially, so the accepted series is a pure function of
/// `(seed, cell, slot)`.
pub(crate) fn accept_series(
    scn: &H1Scenario,
    v_null: &EmpiricalNull,
    cell: usize,
    slot: usize,
    budget: usize,
    seed: u64,
) -> Result<(TimeSeries, f64, usize)> {
    let cfg = v_null.spec().scan_config();
    let mut rng = replicate_rng(seed, ((cell as u64) << 32) | slot as u64);
    let param = scn.param_grid[cell];
    for attempt in 1..=budget {
        let x = simulate_h1_series(scn, param, &mut rng);
        let out = detect_with_options(&x, v_null, &cfg, &DetectOptions::default())?;
        if out.p_value <= scn.alpha {
            return Ok((x, out.p_value, attempt));
        }
    }
    Err(Error::AttemptBudget(format!(
        "no detection at level {} within {budget} attempts at parameter {param} \
         (grid cell {cell}, replicate {slot}); the effect may be too small to condition on",
        scn.alpha
    )))
}

fn default_nboot() -> usize {
    1000
}

fn default_attempt_budget() -> usize {
    1_000_000
}

/// A full study description, deserializable from a JSON file. Power studies
/// read `statistics`; coverage studies read `ci_methods` and `nboot`; both
/// share the scenario fields and the seed.
///
/// `nboot`, `attempt_budget` and `policy` are optional in the file and
/// default to 1000, 1 000 000 and `refcompat`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub family: H1Family,
    pub tau: usize,
    pub grid: Vec<f64>,
    pub n: usize,
    /// Window margin used both for the scan nulls and the intervals.
    pub b: usize,
    pub nsim2: usize,
    pub alpha: f64,
    pub statistics: Vec<Statistic>,
    pub ci_methods: Vec<BootMethod>,
    pub seed: u64,
    #[serde(default = "default_nboot")]
    pub nboot: usize,
    #[serde(default = "default_attempt_budget")]
    pub attempt_budget: usize,
    #[serde(default)]
    pub policy: PValuePolicy,
}

impl StudyConfig {
    /// The scenario part of the config.
    pub fn scenario(&self) -> H1Scenario {
        H1Scenario {
            family: self.family,
            tau: self.tau,
            n: self.n,
            param_grid: self.grid.clone(),
            nsim2: self.nsim2,
            alpha: self.alpha,
        }
    }

    /// Check everything that can be checked without running: scenario
    /// validity, margin admissibility for every requested statistic, no
    /// duplicate columns, positive budgets.
    pub fn validate(&self) -> Result<()> {
        self.scenario().validate_with_margin(self.b)?;
        for &s in &self.statistics {
            ScanConfig::new(s, self.b).validate_for_len(self.n)?;
        }
        if let Some(dup) = first_duplicate(&self.statistics) {
            return Err(Error::invalid(format!(
                "statistic {dup} is listed more than once"
            )));
        }
        if let Some(dup) = first_duplicate(&self.ci_methods) {
            return Err(Error::invalid(format!(
                "interval method {dup} is listed more than once"
            )));
        }
        if self.nboot == 0 {
            return Err(Error::invalid("nboot must be at least 1"));
        }
        if self.attempt_budget == 0 {
            return Err(Error::invalid("attempt_budget must be at least 1"));
        }
        Ok(())
    }
}
