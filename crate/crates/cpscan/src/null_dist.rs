//! Monte Carlo estimation of a scan statistic's null distribution, with a
//! persistent text format.
//!
//! Under the null the series is i.i.d. from a continuous distribution, and
//! for the rank-based statistics the scan value's law does not depend on
//! which continuous distribution — so a bank of simulated nulls keyed by
//! `(statistic, n, b, policy)` serves any data of that shape.
//!
//! Generation is replicate-parallel and deterministic: replicate `i` draws
//! from the substream `(master_seed, i)`, so the sorted output is
//! byte-identical no matter how many worker threads run.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::rng::{open_unit, replicate_rng, standard_normal};
use crate::scan::{compute_profile, Objective, ScanConfig, Statistic};
use crate::series::TimeSeries;
use crate::two_sample::PValuePolicy;

/// File magic for the null-distribution format.
const MAGIC: &str = "#cpscan-null v1";

/// Distribution the null series are drawn from.
///
/// For rank-based statistics the choice is irrelevant by construction (the
/// scan value depends on ranks alone); offering both makes that property
/// checkable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorDist {
    StandardNormal,
    Uniform01,
}

impl GeneratorDist {
    /// Stable code used in null files and on the command line.
    pub fn code(&self) -> &'static str {
        match self {
            GeneratorDist::StandardNormal => "normal",
            GeneratorDist::Uniform01 => "uniform01",
        }
    }

    /// Inverse of [`GeneratorDist::code`].
    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "normal" => Some(GeneratorDist::StandardNormal),
            "uniform01" => Some(GeneratorDist::Uniform01),
            _ => None,
        }
    }
}

impl std::fmt::Display for GeneratorDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for GeneratorDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorDist::from_code(s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown generator distribution {s:?} (expected \"normal\" or \"uniform01\")"
            ))
        })
    }
}

/// Everything that determines a simulated null, and therefore everything a
/// stored null is keyed by.
#[derive(Debug, Clone, PartialEq)]
pub struct NullGenSpec {
    pub statistic: Statistic,
    pub n: usize,
    /// Window margin of the scan.
    pub b: usize,
    pub nsim: usize,
    pub generator_dist: GeneratorDist,
    pub policy: PValuePolicy,
    pub master_seed: u64,
}

impl NullGenSpec {
    /// Validate internal consistency (margin vs statistic, length vs margin,
    /// at least one replicate).
    pub fn validate(&self) -> Result<()> {
        self.scan_config().validate_for_len(self.n)?;
        if self.nsim == 0 {
            return Err(Error::invalid("nsim must be at least 1"));
        }
        Ok(())
    }

    /// The scan configuration this null is for.
    pub fn scan_config(&self) -> ScanConfig {
        ScanConfig::new(self.statistic, self.b).with_policy(self.policy)
    }
}

/// A sorted Monte Carlo sample of a scan statistic under the null, plus the
/// spec that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalNull {
    spec: NullGenSpec,
    objective: Objective,
    values: Vec<f64>,
}

impl EmpiricalNull {
    pub fn spec(&self) -> &NullGenSpec {
        &self.spec
    }

    /// Whether small or large observed values are extreme for this null.
    pub fn objective(&self) -> Objective {
        self.objective
    }

    /// The simulated statistic values, sorted ascending, length `nsim`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of null values strictly below `v`.
    pub fn count_below(&self, v: f64) -> usize {
        self.values.partition_point(|x| *x < v)
    }

    /// Number of null values strictly above `v`.
    pub fn count_above(&self, v: f64) -> usize {
        self.values.len() - self.values.partition_point(|x| *x <= v)
    }

    /// Serialize to the versioned text format (see module docs of the file
    /// layout below):
    ///
    /// ```text
    /// #cpscan-null v1
    /// #statistic=V objective=min
    /// #n=57 b=6 nsim=10000 dist=normal policy=refcompat seed=1
    /// <nsim sorted values, one per line, 17 significant digits>
    /// ```
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(32 + 26 * self.values.len());
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(
            out,
            "#statistic={} objective={}",
            self.spec.statistic.file_code(),
            self.objective.code()
        );
        let _ = writeln!(
            out,
            "#n={} b={} nsim={} dist={} policy={} seed={}",
            self.spec.n,
            self.spec.b,
            self.spec.nsim,
            self.spec.generator_dist.code(),
            self.spec.policy.code(),
            self.spec.master_seed
        );
        for v in &self.values {
            let _ = writeln!(out, "{v:.16e}");
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Parse a file written by [`EmpiricalNull::save`], validating the
    /// header, the value count, and sortedness. Errors carry the 1-based
    /// line number of the offending line.
    pub fn load(path: &Path) -> Result<EmpiricalNull> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut lines = text.lines();

        let first = lines.next().ok_or_else(|| Error::format(1, "empty file"))?;
        if first != MAGIC {
            return Err(Error::format(
                1,
                format!("expected header {MAGIC:?}, found {first:?}"),
            ));
        }

        let stat_line = lines
            .next()
            .ok_or_else(|| Error::format(2, "missing statistic line"))?;
        let (statistic, objective) = parse_statistic_line(stat_line)?;
        if objective != statistic.objective() {
            return Err(Error::format(
                2,
                format!(
                    "objective \"{}\" does not match statistic {} (expected \"{}\")",
                    objective.code(),
                    statistic.file_code(),
                    statistic.objective().code()
                ),
            ));
        }

        let meta_line = lines
            .next()
            .ok_or_else(|| Error::format(3, "missing metadata line"))?;
        let spec = parse_meta_line(meta_line, statistic)?;
        spec.validate()
            .map_err(|e| Error::format(3, format!("inconsistent metadata: {e}")))?;

        let mut values = Vec::with_capacity(spec.nsim);
        for (i, line) in lines.enumerate() {
            let line_no = 4 + i;
            if values.len() == spec.nsim {
                return Err(Error::format(
                    line_no,
                    format!("more than the declared nsim={} values", spec.nsim),
                ));
            }
            let v: f64 = line.trim().parse().map_err(|_| {
                Error::format(line_no, format!("cannot parse value {line:?}"))
            })?;
            if v.is_nan() {
                return Err(Error::format(line_no, "value is NaN"));
            }
            if let Some(prev) = values.last() {
                if v < *prev {
                    return Err(Error::format(
                        line_no,
                        format!("values not sorted ascending ({v} after {prev})"),
                    ));
                }
            }
            values.push(v);
        }
        if values.len() != spec.nsim {
            return Err(Error::format(
                4 + values.len(),
                format!("expected nsim={} values, found {}", spec.nsim, values.len()),
            ));
        }
        Ok(EmpiricalNull {
            spec,
            objective,
            values,
        })
    }
}

fn parse_statistic_line(line: &str) -> Result<(Statistic, Objective)> {
    let body = line
        .strip_prefix("#statistic=")
        .ok_or_else(|| Error::format(2, format!("expected \"#statistic=...\", found {line:?}")))?;
    let (stat_code, rest) = body
        .split_once(' ')
        .ok_or_else(|| Error::format(2, "missing objective field"))?;
    let statistic = Statistic::from_file_code(stat_code)
        .ok_or_else(|| Error::format(2, format!("unknown statistic code {stat_code:?}")))?;
    let obj_code = rest
        .strip_prefix("objective=")
        .ok_or_else(|| Error::format(2, format!("expected \"objective=...\", found {rest:?}")))?;
    let objective = Objective::from_code(obj_code)
        .ok_or_else(|| Error::format(2, format!("unknown objective {obj_code:?}")))?;
    Ok((statistic, objective))
}

fn parse_meta_line(line: &str, statistic: Statistic) -> Result<NullGenSpec> {
    let err = |msg: String| Error::format(3, msg);
    let mut fields = line.split(' ');
    let mut expect = |key: &str| -> Result<&str> {
        let tok = fields
            .next()
            .ok_or_else(|| err(format!("missing field {key}=")))?;
        let tok = tok.strip_prefix('#').unwrap_or(tok);
        tok.strip_prefix(key)
            .and_then(|t| t.strip_prefix('='))
            .ok_or_else(|| err(format!("expected field {key}=..., found {tok:?}")))
    };
    let n: usize = expect("n")?
        .parse()
        .map_err(|_| err("cannot parse n".into()))?;
    let b: usize = expect("b")?
        .parse()
        .map_err(|_| err("cannot parse b".into()))?;
    let nsim: usize = expect("nsim")?
        .parse()
        .map_err(|_| err("cannot parse nsim".into()))?;
    let dist_code = expect("dist")?;
    let generator_dist = GeneratorDist::from_code(dist_code)
        .ok_or_else(|| err(format!("unknown dist code {dist_code:?}")))?;
    let policy_code = expect("policy")?;
    let policy = PValuePolicy::from_code(policy_code)
        .ok_or_else(|| err(format!("unknown policy code {policy_code:?}")))?;
    let master_seed: u64 = expect("seed")?
        .parse()
        .map_err(|_| err("cannot parse seed".into()))?;
    Ok(NullGenSpec {
        statistic,
        n,
        b,
        nsim,
        generator_dist,
        policy,
        master_seed,
    })
}

/// One i.i.d. series from the generator distribution.
pub(crate) fn draw_null_series(
    dist: GeneratorDist,
    n: usize,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> TimeSeries {
    let values: Vec<f64> = match dist {
        GeneratorDist::StandardNormal => (0..n).map(|_| standard_normal(rng)).collect(),
        GeneratorDist::Uniform01 => (0..n).map(|_| open_unit(rng)).collect(),
    };
    TimeSeries::new(values).expect("generated draws are finite and non-empty")
}

/// Simulate the null with the default (parallel) execution mode.
pub fn generate_null(spec: &NullGenSpec) -> Result<EmpiricalNull> {
    generate_null_mode(spec, ExecMode::Parallel)
}

/// Simulate the null: `nsim` independent series, one scan each, sorted
/// extremum values. Byte-identical output for a fixed spec regardless of
/// `mode` or worker count.
pub fn generate_null_mode(spec: &NullGenSpec, mode: ExecMode) -> Result<EmpiricalNull> {
    spec.validate()?;
    let cfg = spec.scan_config();
    let mut values = map_indexed(mode, spec.nsim, |i| {
        let mut rng = replicate_rng(spec.master_seed, i as u64);
        let x = draw_null_series(spec.generator_dist, spec.n, &mut rng);
        compute_profile(&x, &cfg)
            .expect("spec validated and continuous draws are non-degenerate")
            .extremum_value()
    });
    values.sort_by(|a, b| a.total_cmp(b));
    Ok(EmpiricalNull {
        spec: spec.clone(),
        objective: spec.statistic.objective(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn small_spec() -> NullGenSpec {
        NullGenSpec {
            statistic: Statistic::WmwMinP,
            n: 12,
            b: 6,
            nsim: 1000,
            generator_dist: GeneratorDist::StandardNormal,
            policy: PValuePolicy::ReferenceCompatible,
            master_seed: 99,
        }
    }

    #[test]
    fn generation_is_deterministic_across_modes_and_runs() {
        let spec = small_spec();
        let a = generate_null_mode(&spec, ExecMode::Parallel).unwrap();
        let b = generate_null_mode(&spec, ExecMode::Parallel).unwrap();
        let c = generate_null_mode(&spec, ExecMode::Sequential).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.values(), c.values());
    }

    #[test]
    fn single_split_p_values_are_sub_uniform() {
        // n = 12, b = 6: exactly one split, so the null sample is the exact
        // two-sided p-value of a (6,6) WMW test on white noise. Its CDF at
        // 0.5 is 16/33 ≈ 0.485; check the simulation tracks it.
        let null = generate_null(&small_spec()).unwrap();
        assert!(null.values().iter().all(|&v| v > 0.0 && v <= 1.0));
        let frac_below_half =
            null.values().iter().filter(|&&v| v <= 0.5).count() as f64 / null.len() as f64;
        assert!(
            (frac_below_half - 0.5).abs() < 0.05,
            "P(p <= 0.5) = {frac_below_half}"
        );
    }

    #[test]
    fn seeds_and_streams_matter() {
        let spec = small_spec();
        let other = NullGenSpec {
            master_seed: 100,
            ..spec.clone()
        };
        let a = generate_null(&spec).unwrap();
        let b = generate_null(&other).unwrap();
        assert_ne!(a.values(), b.values());
    }

    #[test]
    fn rank_statistics_are_generator_free_with_shared_seed() {
        // The scan sees only ranks, and the inverse-CDF samplers are
        // strictly increasing maps of the same uniform draws — so normal
        // and uniform generators with one seed give bit-identical nulls
        // for rank statistics. This is the distribution-free property in
        // its sharpest form.
        for statistic in [Statistic::WmwMinP, Statistic::Pettitt, Statistic::PettittStd] {
            let base = NullGenSpec {
                statistic,
                n: 20,
                b: 3,
                nsim: 50,
                generator_dist: GeneratorDist::StandardNormal,
                policy: PValuePolicy::ReferenceCompatible,
                master_seed: 7,
            };
            let normal = generate_null(&base).unwrap();
            let uniform = generate_null(&NullGenSpec {
                generator_dist: GeneratorDist::Uniform01,
                ..base
            })
            .unwrap();
            assert_eq!(normal.values(), uniform.values());
        }
    }

    #[test]
    fn degenerate_sizes_and_specs_are_rejected() {
        let mut spec = small_spec();
        spec.nsim = 0;
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.n = 11; // < 2b
        assert!(generate_null(&spec).is_err());
        let mut spec = small_spec();
        spec.statistic = Statistic::TMaxAbs;
        spec.b = 1;
        spec.n = 10;
        assert!(generate_null(&spec).is_err());
    }

    #[test]
    fn single_replicate_null_works() {
        let spec = NullGenSpec {
            nsim: 1,
            ..small_spec()
        };
        let null = generate_null(&spec).unwrap();
        assert_eq!(null.len(), 1);
        // Downstream p-value estimates from a 1-value null are 0 or 1.
        let v = null.values()[0];
        assert!(null.count_below(v) == 0 && null.count_below(v + 1.0) == 1);
    }

    #[test]
    fn count_helpers_are_strict() {
        let null = generate_null(&NullGenSpec {
            nsim: 10,
            ..small_spec()
        })
        .unwrap();
        let v = null.values()[3];
        // Neither side counts any copy of v itself. (This null draws its
        // values from a small p-value lattice, so duplicates are expected.)
        let copies = null.values().iter().filter(|x| **x == v).count();
        assert!(copies >= 1);
        assert_eq!(null.count_below(v) + null.count_above(v) + copies, 10);
        assert!(null.count_below(v) <= 3);
        assert!(null.values()[..null.count_below(v)].iter().all(|x| *x < v));
    }

    #[test]
    fn save_load_round_trip_preserves_everything() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("trip.null");
        for statistic in [Statistic::WmwMinP, Statistic::GaussianLr] {
            let null = generate_null(&NullGenSpec {
                statistic,
                b: 2,
                nsim: 200,
                ..small_spec()
            })
            .unwrap();
            null.save(&path).unwrap();
            let back = EmpiricalNull::load(&path).unwrap();
            assert_eq!(back, null);
        }
    }

    #[test]
    fn rewriting_is_byte_identical() {
        let dir = tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a.null"), dir.path().join("b.null"));
        let null = generate_null(&small_spec()).unwrap();
        null.save(&p1).unwrap();
        null.save(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn malformed_files_name_the_offending_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.null");
        // A continuous-valued statistic, so the five values are distinct
        // almost surely and the unsorted check has something to bite on.
        let null = generate_null(&NullGenSpec {
            statistic: Statistic::GaussianLr,
            b: 2,
            nsim: 5,
            ..small_spec()
        })
        .unwrap();
        null.save(&path).unwrap();
        let good = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = good.lines().collect();
        assert_eq!(lines.len(), 8); // 3 header lines + 5 values
        assert!(lines[6] != lines[7], "need distinct values for this test");

        let check = |content: String, want_line: usize, want_msg: &str| {
            std::fs::write(&path, content).unwrap();
            match EmpiricalNull::load(&path) {
                Err(Error::Format { line, msg }) => {
                    assert_eq!(line, want_line, "wrong line for {want_msg:?}: {msg}");
                    assert!(
                        msg.contains(want_msg),
                        "message {msg:?} should mention {want_msg:?}"
                    );
                }
                other => panic!("expected format error, got {other:?}"),
            }
        };

        // Wrong magic.
        check(good.replace("v1", "v9"), 1, "header");
        // Objective inconsistent with the statistic (LR maximizes).
        check(
            good.replace("objective=max", "objective=min"),
            2,
            "does not match",
        );
        // Value count below the declared nsim: drop the last value line.
        let mut short = lines[..7].join("\n");
        short.push('\n');
        check(short, 8, "expected nsim=5 values, found 4");
        // Unsorted values: swapping the last two puts the smaller one at
        // file line 8, where the parser notices.
        let mut swapped: Vec<&str> = lines.clone();
        swapped.swap(6, 7);
        check(swapped.join("\n") + "\n", 8, "not sorted");
        // Unparseable value.
        let mut bad_val: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        bad_val[5] = "not-a-number".into();
        check(bad_val.join("\n") + "\n", 6, "cannot parse value");
        // Inconsistent metadata (n < 2b).
        check(good.replace("#n=12 ", "#n=3 "), 3, "inconsistent metadata");
        // Too many values.
        check(good.clone() + "9.9e99\n", 9, "more than the declared");
    }

    #[test]
    fn generator_codes_round_trip() {
        for d in [GeneratorDist::StandardNormal, GeneratorDist::Uniform01] {
            assert_eq!(GeneratorDist::from_code(d.code()), Some(d));
        }
        assert!(GeneratorDist::from_code("cauchy").is_none());
    }
}
