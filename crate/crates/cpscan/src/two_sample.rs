//! Two-sample location tests: Wilcoxon–Mann–Whitney and pooled-variance t.
//!
//! The WMW machinery is split into small pieces (`midranks`,
//! [`mann_whitney_u`], [`moments_of_u`], [`exact_u_cdf`]) because the scan
//! layer recombines them: for a length-`n` series it ranks the pooled sample
//! once and derives every split's U statistic from prefix sums of ranks,
//! instead of re-ranking per split.
//!
//! Two-sided p-values come in two flavors selected by [`PValuePolicy`]:
//!
//! * the exact permutation null of U (tie-free samples only), computed by
//!   dynamic programming on probabilities and cached per sample-size pair;
//! * the normal approximation with tie-corrected variance and a continuity
//!   correction of 1/2 applied toward the mean.
//!
//! [`PValuePolicy::ReferenceCompatible`] reproduces the switching rule used
//!   by the long-standing R implementation (`wilcox.test`): exact only when
//!   both samples have at most [`EXACT_SIZE_LIMIT`] observations *and* the
//!   pooled sample is tie-free. [`PValuePolicy::ExactWhenNoTies`] drops the
//!   size cap and is the better default for fresh analyses; the compatible
//!   rule matters when comparing against archived results.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::dist::{normal_sf, t_two_sided_p};
use crate::error::{Error, Result};

/// Largest per-sample size at which [`PValuePolicy::ReferenceCompatible`]
/// still uses the exact U distribution (the reference implementation
/// switches to the normal approximation at 50).
pub const EXACT_SIZE_LIMIT: usize = 49;

/// How a two-sided WMW p-value is computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PValuePolicy {
    /// Exact permutation distribution whenever the pooled sample has no
    /// ties, regardless of sample sizes.
    #[serde(rename = "exact")]
    ExactWhenNoTies,
    /// Exact only when tie-free and both sample sizes are at most
    /// [`EXACT_SIZE_LIMIT`]; otherwise the continuity-corrected normal
    /// approximation. Matches the reference R behavior bit for bit in
    /// either branch.
    #[default]
    #[serde(rename = "refcompat")]
    ReferenceCompatible,
}

impl PValuePolicy {
    /// Short stable code used in null-distribution files and on the
    /// command line.
    pub fn code(&self) -> &'static str {
        match self {
            PValuePolicy::ExactWhenNoTies => "exact",
            PValuePolicy::ReferenceCompatible => "refcompat",
        }
    }

    /// Inverse of [`PValuePolicy::code`].
    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "exact" => Some(PValuePolicy::ExactWhenNoTies),
            "refcompat" => Some(PValuePolicy::ReferenceCompatible),
            _ => None,
        }
    }

    fn chooses_exact(&self, n1: usize, n2: usize, has_ties: bool) -> bool {
        match self {
            PValuePolicy::ExactWhenNoTies => !has_ties,
            PValuePolicy::ReferenceCompatible => {
                !has_ties && n1 <= EXACT_SIZE_LIMIT && n2 <= EXACT_SIZE_LIMIT
            }
        }
    }
}

impl std::fmt::Display for PValuePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for PValuePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PValuePolicy::from_code(s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown p-value policy {s:?} (expected \"exact\" or \"refcompat\")"
            ))
        })
    }
}

/// Ranks of `values` (1-based), with tied observations sharing the average
/// of the ranks they span. Ties are exact floating-point equality.
///
/// Values must be finite; the ordering uses IEEE total order, so non-finite
/// input would rank rather than panic, but every public caller validates
/// finiteness first.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) hold ranks i+1 ..= j; their mean is
        // (i + 1 + j) / 2.
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Tie correction term `Σ (t³ − t)` over the tie groups of `values`.
/// Zero exactly when all values are distinct.
pub fn tie_term(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        term += t * t * t - t;
        i = j;
    }
    term
}

/// Mann–Whitney U statistic of `x` against `y`: the number of pairs
/// `(xᵢ, yⱼ)` with `xᵢ > yⱼ`, counting ties as 1/2. Computed through
/// midranks: `U = R₁ − n₁(n₁+1)/2` with `R₁` the rank sum of `x` in the
/// pooled sample.
pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> Result<f64> {
    validate_sample("x", x, 1)?;
    validate_sample("y", y, 1)?;
    let mut pooled = Vec::with_capacity(x.len() + y.len());
    pooled.extend_from_slice(x);
    pooled.extend_from_slice(y);
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..x.len()].iter().sum();
    let n1 = x.len() as f64;
    Ok(r1 - n1 * (n1 + 1.0) / 2.0)
}

/// Mean and standard deviation of U under the null, with the variance
/// tie-corrected by `tie_term` (= `Σ (t³ − t)` over pooled tie groups):
///
/// `E U = n₁n₂/2`,
/// `sd² = n₁n₂/12 · [(N+1) − tie_term / (N(N−1))]`, `N = n₁+n₂`.
///
/// The sd is exactly zero when all pooled values are identical.
pub fn moments_of_u(n1: usize, n2: usize, tie_term: f64) -> (f64, f64) {
    let (n1, n2) = (n1 as f64, n2 as f64);
    let n = n1 + n2;
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    (mean, var.max(0.0).sqrt())
}

/// Exact null CDF of U: `P(U ≤ u)` for two tie-free samples of sizes
/// `n1`, `n2`. `u` outside `[0, n1·n2]` clamps to 0 or 1; fractional `u`
/// floors to the lattice.
///
/// The distribution is computed once per size pair (up to order, since the
/// law is symmetric) and cached for the life of the process.
pub fn exact_u_cdf(u: f64, n1: usize, n2: usize) -> Result<f64> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::invalid(format!(
            "exact U distribution requires non-empty samples, got sizes {n1} and {n2}"
        )));
    }
    if u.is_nan() {
        return Err(Error::invalid("exact U distribution: u is NaN"));
    }
    if u < 0.0 {
        return Ok(0.0);
    }
    let cdf = cached_u_cdf(n1, n2);
    let k = u.floor() as usize;
    Ok(cdf[k.min(cdf.len() - 1)])
}

/// Two-sided WMW p-value of `x` against `y` under `policy`.
///
/// Exact branch: `p = min(1, 2 · min(P(U ≤ u), P(U ≥ u)))` with
/// `P(U ≥ u) = P(U ≤ n₁n₂ − u)` by symmetry of the null law.
/// Approximate branch: tie-corrected normal with continuity correction 1/2
/// toward the mean; a zero null sd (all pooled values identical) yields
/// `p = 1` rather than an error.
pub fn wmw_p_two_sided(x: &[f64], y: &[f64], policy: PValuePolicy) -> Result<f64> {
    validate_sample("x", x, 1)?;
    validate_sample("y", y, 1)?;
    let mut pooled = Vec::with_capacity(x.len() + y.len());
    pooled.extend_from_slice(x);
    pooled.extend_from_slice(y);
    let ranks = midranks(&pooled);
    let r1: f64 = ranks[..x.len()].iter().sum();
    let n1f = x.len() as f64;
    let u = r1 - n1f * (n1f + 1.0) / 2.0;
    let ties = tie_term(&pooled);
    wmw_p_from_u(u, x.len(), y.len(), ties, policy)
}

/// p-value from a precomputed U and pooled tie term — the scan fast path.
pub(crate) fn wmw_p_from_u(
    u: f64,
    n1: usize,
    n2: usize,
    tie_term: f64,
    policy: PValuePolicy,
) -> Result<f64> {
    let has_ties = tie_term > 0.0;
    if policy.chooses_exact(n1, n2, has_ties) {
        // Tie-free, so U sits on the integer lattice.
        debug_assert!((u - u.round()).abs() < 1e-6);
        let mn = (n1 * n2) as f64;
        let p_low = exact_u_cdf(u, n1, n2)?;
        let p_high = exact_u_cdf(mn - u, n1, n2)?;
        Ok((2.0 * p_low.min(p_high)).min(1.0))
    } else {
        let (mean, sd) = moments_of_u(n1, n2, tie_term);
        if sd == 0.0 {
            return Ok(1.0);
        }
        let diff = u - mean;
        let correction = if diff > 0.0 {
            0.5
        } else if diff < 0.0 {
            -0.5
        } else {
            0.0
        };
        let z = (diff - correction) / sd;
        Ok((2.0 * normal_sf(z.abs())).min(1.0))
    }
}

/// Pooled-variance two-sample t test. Returns `(t, two_sided_p)` with
/// `df = n₁ + n₂ − 2`.
///
/// Degenerate inputs: when the pooled within-segment variance is zero the
/// statistic is `±∞` with `p = 0` if the means differ (a deterministic
/// level shift), and an error if the two samples are identical constants.
pub fn t_two_sample(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    validate_sample("x", x, 2)?;
    validate_sample("y", y, 2)?;
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let m1 = x.iter().sum::<f64>() / n1;
    let m2 = y.iter().sum::<f64>() / n2;
    let ss1: f64 = x.iter().map(|v| (v - m1) * (v - m1)).sum();
    let ss2: f64 = y.iter().map(|v| (v - m2) * (v - m2)).sum();
    let df = n1 + n2 - 2.0;
    let pooled_var = (ss1 + ss2) / df;
    let diff = m1 - m2;
    if pooled_var == 0.0 {
        if diff == 0.0 {
            return Err(Error::degenerate(
                "both samples are the same constant; t statistic is undefined",
            ));
        }
        return Ok((diff.signum() * f64::INFINITY, 0.0));
    }
    let se = (pooled_var * (1.0 / n1 + 1.0 / n2)).sqrt();
    let t = diff / se;
    let p = t_two_sided_p(t, df)?;
    Ok((t, p))
}

fn validate_sample(name: &str, sample: &[f64], min_len: usize) -> Result<()> {
    if sample.len() < min_len {
        return Err(Error::invalid(format!(
            "sample {name} needs at least {min_len} value(s), got {}",
            sample.len()
        )));
    }
    if let Some(pos) = sample.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "sample {name} has a non-finite value at index {pos}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Exact U distribution: probability-space dynamic programming.
// ---------------------------------------------------------------------------

type CdfCache = RwLock<HashMap<(u32, u32), Arc<Vec<f64>>>>;

fn cdf_cache() -> &'static CdfCache {
    static CACHE: OnceLock<CdfCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached CDF vector of length `n1·n2 + 1`. The null law is symmetric in
/// the sample sizes, so the cache key orders them.
fn cached_u_cdf(n1: usize, n2: usize) -> Arc<Vec<f64>> {
    let key = (n1.min(n2) as u32, n1.max(n2) as u32);
    if let Some(hit) = cdf_cache().read().expect("cdf cache poisoned").get(&key) {
        return Arc::clone(hit);
    }
    let cdf = Arc::new(u_cdf_vector(key.0 as usize, key.1 as usize));
    let mut map = cdf_cache().write().expect("cdf cache poisoned");
    Arc::clone(map.entry(key).or_insert(cdf))
}

/// Build `P(U ≤ u)` for `u = 0..=m·n` from the probability recurrence
///
/// `p(u; m, n) = m/(m+n) · p(u−n; m−1, n) + n/(m+n) · p(u; m, n−1)`,
///
/// i.e. conditioning on whether the largest pooled observation belongs to
/// the first or the second sample. Working on probabilities rather than
/// permutation counts keeps every intermediate in `[0, 1]` — counts would
/// overflow u64 near balanced splits of a hundred observations — and the
/// recurrence has no subtractions, so there is no cancellation.
///
/// Memory is one row of sub-distributions at a time: O(m·n²) floats.
fn u_cdf_vector(m: usize, n: usize) -> Vec<f64> {
    // prev[j] = pmf of U for sizes (i−1, j); cur[j] for (i, j).
    let mut prev: Vec<Vec<f64>> = (0..=n).map(|_| vec![1.0]).collect();
    for i in 1..=m {
        let mut cur: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        cur.push(vec![1.0]);
        for j in 1..=n {
            let w_first = i as f64 / (i + j) as f64;
            let w_second = j as f64 / (i + j) as f64;
            let from_smaller_i = &prev[j]; // sizes (i−1, j), length (i−1)j + 1
            let from_smaller_j = &cur[j - 1]; // sizes (i, j−1), length i(j−1) + 1
            let len = i * j + 1;
            let mut pmf = vec![0.0; len];
            for (u, slot) in pmf.iter_mut().enumerate() {
                let mut acc = 0.0;
                if u >= j {
                    acc += w_first * from_smaller_i[u - j];
                }
                if u < from_smaller_j.len() {
                    acc += w_second * from_smaller_j[u];
                }
                *slot = acc;
            }
            cur.push(pmf);
        }
        prev = cur;
    }
    let pmf = prev.pop().expect("pmf row for target sizes");
    let mut cdf = pmf;
    let mut running = 0.0;
    for v in cdf.iter_mut() {
        running += *v;
        *v = running;
    }
    // The recurrence preserves total mass up to rounding; pin the upper end
    // to exactly 1 so complements are clean.
    let total = running;
    for v in cdf.iter_mut() {
        *v /= total;
    }
    cdf
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Brute-force U: count pairs directly.
    fn u_by_pair_counting(x: &[f64], y: &[f64]) -> f64 {
        let mut u = 0.0;
        for &a in x {
            for &b in y {
                if a > b {
                    u += 1.0;
                } else if a == b {
                    u += 0.5;
                }
            }
        }
        u
    }

    /// Exact null CDF by full enumeration of rank assignments (oracle for
    /// small sizes: ranks 1..=N, choose which belong to the first sample).
    fn cdf_by_enumeration(n1: usize, n2: usize) -> Vec<f64> {
        let n = n1 + n2;
        assert!(n <= 16);
        let mn = n1 * n2;
        let mut counts = vec![0u64; mn + 1];
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n1 {
                continue;
            }
            let rank_sum: usize = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| i + 1).sum();
            counts[rank_sum - n1 * (n1 + 1) / 2] += 1;
        }
        let total: u64 = counts.iter().sum();
        let mut cdf = Vec::with_capacity(mn + 1);
        let mut acc = 0u64;
        for c in counts {
            acc += c;
            cdf.push(acc as f64 / total as f64);
        }
        cdf
    }

    #[test]
    fn u_statistic_matches_pair_counting() {
        let cases: [(&[f64], &[f64]); 4] = [
            (&[1.0, 2.0, 3.0], &[4.0, 5.0]),
            (&[1.0, 2.0, 2.0, 4.0], &[2.0, 3.0, 5.0, 6.0]),
            (&[5.0, 5.0, 5.0], &[5.0, 5.0]),
            (&[-1.0, 0.5, 2.25, 7.0], &[0.5, 0.5, 3.0]),
        ];
        for (x, y) in cases {
            assert_eq!(mann_whitney_u(x, y).unwrap(), u_by_pair_counting(x, y));
        }
    }

    #[test]
    fn exact_cdf_matches_enumeration() {
        for (n1, n2) in [(1, 1), (2, 3), (3, 3), (4, 4), (5, 5), (2, 7), (6, 4)] {
            let oracle = cdf_by_enumeration(n1, n2);
            for (u, want) in oracle.iter().enumerate() {
                let got = exact_u_cdf(u as f64, n1, n2).unwrap();
                assert_abs_diff_eq!(got, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn exact_cdf_handles_out_of_range_and_fractional_u() {
        assert_eq!(exact_u_cdf(-0.5, 3, 3).unwrap(), 0.0);
        assert_eq!(exact_u_cdf(9.0, 3, 3).unwrap(), 1.0);
        assert_eq!(exact_u_cdf(250.0, 3, 3).unwrap(), 1.0);
        // Fractional u floors: P(U ≤ 2.7) = P(U ≤ 2).
        assert_eq!(
            exact_u_cdf(2.7, 4, 4).unwrap(),
            exact_u_cdf(2.0, 4, 4).unwrap()
        );
        assert!(exact_u_cdf(1.0, 0, 3).is_err());
    }

    #[test]
    fn exact_cdf_spot_values() {
        // P(U ≤ 0) with sizes (5,5) = 1/252; (4,4): P(U ≤ 6) = 24/70.
        assert_abs_diff_eq!(
            exact_u_cdf(0.0, 5, 5).unwrap(),
            1.0 / 252.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            exact_u_cdf(6.0, 4, 4).unwrap(),
            24.0 / 70.0,
            epsilon = 1e-14
        );
        // Symmetric law: P(U ≤ 12) at (5,5) is exactly 1/2 (mean 12.5).
        assert_abs_diff_eq!(exact_u_cdf(12.0, 5, 5).unwrap(), 0.5, epsilon = 1e-13);
    }

    #[test]
    fn exact_p_matches_reference_values() {
        // No overlap: U = 0, p = 2/C(10,5).
        let p = wmw_p_two_sided(
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            &[6.0, 7.0, 8.0, 9.0, 10.0],
            PValuePolicy::ReferenceCompatible,
        )
        .unwrap();
        assert_abs_diff_eq!(p, 0.007936507936507936, epsilon = 1e-15);

        // Interleaved: U = 6 at sizes (4,4), p = 48/70.
        let p = wmw_p_two_sided(
            &[1.0, 2.0, 3.0, 4.0],
            &[1.5, 2.5, 3.5, 4.5],
            PValuePolicy::ReferenceCompatible,
        )
        .unwrap();
        assert_abs_diff_eq!(p, 0.6857142857142857, epsilon = 1e-14);
    }

    #[test]
    fn tied_data_uses_corrected_normal_approximation() {
        // U = 3, tie group of three 2s: reference two-sided p with tie
        // correction and continuity correction.
        let p = wmw_p_two_sided(
            &[1.0, 2.0, 2.0, 4.0],
            &[2.0, 3.0, 5.0, 6.0],
            PValuePolicy::ReferenceCompatible,
        )
        .unwrap();
        assert_abs_diff_eq!(p, 0.183150203156622, epsilon = 1e-13);
        // Same data under ExactWhenNoTies: still tied, still approximate.
        let p2 = wmw_p_two_sided(
            &[1.0, 2.0, 2.0, 4.0],
            &[2.0, 3.0, 5.0, 6.0],
            PValuePolicy::ExactWhenNoTies,
        )
        .unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn policy_branches_diverge_above_size_cap() {
        // Sizes (6, 51), tie-free. ReferenceCompatible must take the
        // approximate branch (51 > 49); ExactWhenNoTies the exact one.
        // Reference values from an independent implementation.
        let x = [
            -1.423825, 1.263728, -0.870662, -0.259173, -0.075343, -0.740885,
        ];
        let y = [
            -0.567793, 1.448893, 1.161058, -1.152863, 3.14741, 1.768497, 0.040613, 1.702198,
            0.333047, 0.73931, 1.588844, -0.456668, 1.375858, 2.198979, 2.122298, 0.500301,
            1.702919, -0.821583, 0.641811, 1.249484, -0.543601, 0.718312, 2.52474, 3.418159,
            1.577361, 1.628633, -0.158988, -0.409388, -0.612292, 1.341547, 1.551939, 0.14124,
            -0.428675, 1.057558, 1.112903, 0.669188, 2.069983, 0.707038, 0.733849, -0.308214,
            0.935957, 2.147078, 0.861144, 0.870915, 1.233655, 1.077484, 1.330252, 1.336721,
            1.41835, 0.004983, 1.100031,
        ];
        assert_eq!(mann_whitney_u(&x, &y).unwrap(), 53.0);
        let p_ref = wmw_p_two_sided(&x, &y, PValuePolicy::ReferenceCompatible).unwrap();
        assert_abs_diff_eq!(p_ref, 0.009674437067717713, epsilon = 1e-14);
        let p_exact = wmw_p_two_sided(&x, &y, PValuePolicy::ExactWhenNoTies).unwrap();
        assert_abs_diff_eq!(p_exact, 0.0071018025337787, epsilon = 1e-13);
    }

    #[test]
    fn constant_pooled_sample_gives_p_one() {
        let p = wmw_p_two_sided(
            &[3.0, 3.0, 3.0],
            &[3.0, 3.0],
            PValuePolicy::ReferenceCompatible,
        )
        .unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn midranks_average_tie_groups() {
        assert_eq!(midranks(&[10.0, 20.0, 30.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(midranks(&[2.0, 1.0, 2.0]), vec![2.5, 1.0, 2.5]);
        assert_eq!(
            midranks(&[1.0, 2.0, 2.0, 2.0, 3.0]),
            vec![1.0, 3.0, 3.0, 3.0, 5.0]
        );
        assert_eq!(midranks(&[5.0, 5.0, 5.0, 5.0]), vec![2.5; 4]);
    }

    #[test]
    fn tie_term_counts_groups() {
        assert_eq!(tie_term(&[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(tie_term(&[1.0, 2.0, 2.0, 3.0]), 6.0); // 2³−2
        assert_eq!(tie_term(&[7.0; 4]), 60.0); // 4³−4
    }

    #[test]
    fn moments_match_closed_forms() {
        let (mean, sd) = moments_of_u(6, 51, 0.0);
        assert_eq!(mean, 153.0);
        assert_abs_diff_eq!(sd, (6.0 * 51.0 * 58.0 / 12.0_f64).sqrt(), epsilon = 1e-12);
        // All-identical pooled sample: sd exactly 0.
        let n = 8.0;
        let (_, sd0) = moments_of_u(4, 4, n * n * n - n);
        assert_eq!(sd0, 0.0);
    }

    #[test]
    fn t_matches_hand_computed_example() {
        let (t, p) = t_two_sample(&[1.0, 2.0, 3.0, 4.0], &[3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_abs_diff_eq!(t, -2.190890230020664454, epsilon = 1e-13);
        assert_abs_diff_eq!(p, 0.07098765432098765432, epsilon = 1e-12);
    }

    #[test]
    fn t_degenerate_cases() {
        // Deterministic level shift: infinite t, zero p.
        let (t, p) = t_two_sample(&[1.0, 1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!(t, f64::NEG_INFINITY);
        assert_eq!(p, 0.0);
        // Identical constants: no direction, undefined.
        assert!(t_two_sample(&[2.0, 2.0], &[2.0, 2.0]).is_err());
        // Too small.
        assert!(t_two_sample(&[1.0], &[2.0, 3.0]).is_err());
    }

    proptest! {
        /// Exact CDF is a proper CDF and symmetric about n₁n₂/2.
        #[test]
        fn exact_cdf_is_monotone_and_symmetric(n1 in 1usize..8, n2 in 1usize..8) {
            let mn = n1 * n2;
            let mut last = 0.0;
            for u in 0..=mn {
                let c = exact_u_cdf(u as f64, n1, n2).unwrap();
                prop_assert!(c >= last - 1e-15);
                last = c;
            }
            prop_assert!((last - 1.0).abs() < 1e-12);
            for u in 0..mn {
                // P(U ≤ u) = P(U ≥ mn − u) = 1 − P(U ≤ mn − u − 1)
                let lhs = exact_u_cdf(u as f64, n1, n2).unwrap();
                let rhs = 1.0 - exact_u_cdf((mn - u - 1) as f64, n1, n2).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }
        }

        /// U statistics of the two orientations always sum to n₁n₂.
        #[test]
        fn u_orientations_sum_to_product(
            x in prop::collection::vec(-50.0f64..50.0, 1..12),
            y in prop::collection::vec(-50.0f64..50.0, 1..12),
        ) {
            let uxy = mann_whitney_u(&x, &y).unwrap();
            let uyx = mann_whitney_u(&y, &x).unwrap();
            prop_assert_eq!(uxy + uyx, (x.len() * y.len()) as f64);
        }

        /// Swapping the samples leaves the two-sided p-value bit-identical.
        #[test]
        fn p_is_symmetric_in_sample_order(
            x in prop::collection::vec(-50.0f64..50.0, 1..12),
            y in prop::collection::vec(-50.0f64..50.0, 1..12),
            exact_policy in prop::bool::ANY,
        ) {
            let policy = if exact_policy {
                PValuePolicy::ExactWhenNoTies
            } else {
                PValuePolicy::ReferenceCompatible
            };
            let pxy = wmw_p_two_sided(&x, &y, policy).unwrap();
            let pyx = wmw_p_two_sided(&y, &x, policy).unwrap();
            prop_assert_eq!(pxy, pyx);
            prop_assert!(pxy > 0.0 && pxy <= 1.0);
        }

        /// The p-value depends on the data only through ranks: scaling by a
        /// positive power of two (an exactly order-preserving f64 map)
        /// changes nothing, bit for bit.
        #[test]
        fn p_depends_only_on_ranks(
            x in prop::collection::vec(-50.0f64..50.0, 2..12),
            y in prop::collection::vec(-50.0f64..50.0, 2..12),
        ) {
            let scale = |v: &f64| *v * 0.25;
            let xs: Vec<f64> = x.iter().map(scale).collect();
            let ys: Vec<f64> = y.iter().map(scale).collect();
            let policy = PValuePolicy::ExactWhenNoTies;
            prop_assert_eq!(
                wmw_p_two_sided(&x, &y, policy).unwrap(),
                wmw_p_two_sided(&xs, &ys, policy).unwrap()
            );
        }

        /// Rank-based U equals the pairwise counting definition.
        #[test]
        fn u_equals_pair_counting(
            x in prop::collection::vec(-8i32..8, 1..10),
            y in prop::collection::vec(-8i32..8, 1..10),
        ) {
            // Integer-valued floats force plenty of ties.
            let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            prop_assert_eq!(
                mann_whitney_u(&xf, &yf).unwrap(),
                u_by_pair_counting(&xf, &yf)
            );
        }
    }
}
