//! `cpscan` — change-point scanning from the command line.
//!
//! Subcommands: `null` (simulate and store a null distribution), `scan`
//! (export a per-split profile), `detect` (test a series, optionally with a
//! bootstrap interval), `power` and `coverage` (simulation studies driven by
//! a JSON config against a directory of stored nulls).
//!
//! Exit codes: 0 success, 2 argument or validation problems, 3 I/O failures.

mod input;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use cpscan::{
    bootstrap_ci, detect_with_options, estimate_coverage, estimate_power, generate_null,
    BootMethod, BootstrapSpec, DetectOptions, EmpiricalNull, Error as CoreError, GeneratorDist,
    NullGenSpec, PValuePolicy, Statistic, StudyConfig,
};

use input::{load_null_bank, read_series, select_null};

/// CLI-level error: a message plus the exit code class it belongs to.
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    /// Classify a core error: real I/O failures exit 3, everything else is
    /// a validation problem (exit 2).
    fn from_core(err: CoreError) -> Self {
        let code = match err {
            CoreError::Io { .. } => 3,
            _ => 2,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }

    fn prefixed(mut self, prefix: &str) -> Self {
        self.message = format!("{prefix}{}", self.message);
        self
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        CliError::from_core(err)
    }
}

#[derive(Parser)]
#[command(
    name = "cpscan",
    version,
    about = "Nonparametric change-point detection via scanned rank tests"
)]
struct Cli {
    /// Worker threads for Monte Carlo work (default: all cores). Results do
    /// not depend on this.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scan statistic's null distribution and save it.
    Null(NullArgs),
    /// Export the per-split profile of a series as CSV.
    Scan(ScanArgs),
    /// Test a series against a stored null; print a JSON verdict.
    Detect(DetectArgs),
    /// Power study over a parameter grid (JSON config + null directory).
    Power(StudyArgs),
    /// Bootstrap coverage study over a parameter grid.
    Coverage(StudyArgs),
}

#[derive(Args)]
struct NullArgs {
    /// Statistic: v | pettitt | pettitt-std | tmax | tminp | lr
    #[arg(long, value_parser = Statistic::from_str)]
    stat: Statistic,
    /// Series length the null is simulated for.
    #[arg(long)]
    n: usize,
    /// Window margin: splits run over tau in [b, n-b].
    #[arg(long, default_value_t = 6)]
    b: usize,
    /// Number of simulated series.
    #[arg(long, default_value_t = 100_000)]
    nsim: usize,
    /// Generator distribution: normal | uniform01
    #[arg(long, default_value = "normal", value_parser = GeneratorDist::from_str)]
    dist: GeneratorDist,
    /// WMW p-value policy: exact | refcompat
    #[arg(long, default_value = "refcompat", value_parser = PValuePolicy::from_str)]
    policy: PValuePolicy,
    /// Master seed; the file is a pure function of the flags.
    #[arg(long)]
    seed: u64,
    /// Output path for the null file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// Single-column CSV of the series.
    #[arg(long)]
    input: PathBuf,
    /// Statistic: v | pettitt | pettitt-std | tmax | tminp | lr
    #[arg(long, default_value = "v", value_parser = Statistic::from_str)]
    stat: Statistic,
    /// Window margin.
    #[arg(long, default_value_t = 6)]
    b: usize,
    /// WMW p-value policy: exact | refcompat
    #[arg(long, default_value = "refcompat", value_parser = PValuePolicy::from_str)]
    policy: PValuePolicy,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CiChoice {
    None,
    Boot1,
    Boot2,
}

#[derive(Args)]
struct DetectArgs {
    /// Single-column CSV of the series.
    #[arg(long)]
    input: PathBuf,
    /// Stored null file; its metadata selects the statistic, margin and
    /// policy for the scan.
    #[arg(long)]
    null: PathBuf,
    /// Confidence interval for the change location.
    #[arg(long, value_enum, default_value_t = CiChoice::None)]
    ci: CiChoice,
    /// Bootstrap replicates for --ci.
    #[arg(long, default_value_t = 1000)]
    nboot: usize,
    /// Interval level is 1 - alpha.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bootstrap seed; required when --ci is set.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct StudyArgs {
    /// JSON study configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory of *.null files simulated with `cpscan null`.
    #[arg(long, value_name = "DIR")]
    null_dir: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore the error from double initialization; the pool size is a
        // performance knob, never a correctness one.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Null(args) => cmd_null(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Power(args) => cmd_power(args),
        Command::Coverage(args) => cmd_coverage(args),
    }
}

fn cmd_null(args: NullArgs) -> Result<(), CliError> {
    let spec = NullGenSpec {
        statistic: args.stat,
        n: args.n,
        b: args.b,
        nsim: args.nsim,
        generator_dist: args.dist,
        policy: args.policy,
        master_seed: args.seed,
    };
    let start = Instant::now();
    let null = generate_null(&spec)?;
    null.save(&args.out)?;
    println!(
        "wrote {}: statistic={} n={} b={} nsim={} ({:.2}s)",
        args.out.display(),
        spec.statistic,
        spec.n,
        spec.b,
        spec.nsim,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_scan(args: ScanArgs) -> Result<(), CliError> {
    let x = read_series(&args.input)?;
    let cfg = cpscan::ScanConfig::new(args.stat, args.b).with_policy(args.policy);
    let profile = cpscan::compute_profile(&x, &cfg)?;
    let mut out = String::from("tau,value\n");
    for (tau, value) in profile.taus().iter().zip(profile.values()) {
        out.push_str(&format!("{tau},{value}\n"));
    }
    out.push_str(&format!(
        "# extremum={} tau_hat={}\n",
        profile.extremum_value(),
        profile.tau_hat()
    ));
    match &args.out {
        Some(path) => fs::write(path, out)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_detect(args: DetectArgs) -> Result<(), CliError> {
    let x = read_series(&args.input)?;
    let null = EmpiricalNull::load(&args.null)
        .map_err(|e| CliError::from_core(e).prefixed(&format!("{}: ", args.null.display())))?;
    let spec = null.spec().clone();
    let cfg = spec.scan_config();
    let outcome = detect_with_options(&x, &null, &cfg, &DetectOptions::default())?;

    let ci_json = match args.ci {
        CiChoice::None => "null".to_string(),
        choice => {
            let method = match choice {
                CiChoice::Boot1 => BootMethod::Boot1,
                CiChoice::Boot2 => BootMethod::Boot2,
                CiChoice::None => unreachable!(),
            };
            let seed = args.seed.ok_or_else(|| {
                CliError::validation("--ci needs --seed so the interval is reproducible")
            })?;
            if spec.statistic != Statistic::WmwMinP {
                return Err(CliError::validation(format!(
                    "--ci intervals are defined for the min-p WMW scan (statistic v), \
                     but the null file is for statistic {}",
                    spec.statistic
                )));
            }
            let boot = BootstrapSpec {
                method,
                nboot: args.nboot,
                alpha: args.alpha,
                b: spec.b,
                policy: spec.policy,
                seed,
            };
            let ci = bootstrap_ci(&x, &boot)?;
            format!(
                "{{\"method\":\"{}\",\"lower\":{:.16e},\"upper\":{:.16e}}}",
                method.code(),
                ci.lower,
                ci.upper
            )
        }
    };
    println!(
        "{{\"p_value\":{:.16e},\"tau_hat\":{},\"n\":{},\"b\":{},\"statistic\":\"{}\",\"ci\":{}}}",
        outcome.p_value,
        outcome.tau_hat,
        x.len(),
        spec.b,
        spec.statistic.cli_code(),
        ci_json
    );
    Ok(())
}

/// Load and validate the study config, returning it with the raw bytes that
/// were hashed into the run manifest.
fn load_config(path: &PathBuf) -> Result<(StudyConfig, String), CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let config: StudyConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    config.validate()?;
    let digest = Sha256::digest(&bytes);
    let manifest = format!("# seed={} config_sha256={:x}", config.seed, digest);
    Ok((config, manifest))
}

fn describe_missing(missing: &[Statistic], config: &StudyConfig, dir: &Path) -> CliError {
    let list: Vec<String> = missing
        .iter()
        .map(|s| format!("(statistic={s}, n={}, b={})", config.n, config.b))
        .collect();
    CliError::validation(format!(
        "no matching null file in {} for: {} (policy {}; generate them with `cpscan null`)",
        dir.display(),
        list.join(", "),
        config.policy
    ))
}

fn cmd_power(args: StudyArgs) -> Result<(), CliError> {
    let (config, manifest) = load_config(&args.config)?;
    let bank = load_null_bank(&args.null_dir)?;
    let mut nulls: HashMap<Statistic, EmpiricalNull> = HashMap::new();
    let mut missing = Vec::new();
    for &stat in &config.statistics {
        match select_null(&bank, stat, config.n, config.b, config.policy) {
            Some(null) => {
                nulls.insert(stat, null.clone());
            }
            None => missing.push(stat),
        }
    }
    if !missing.is_empty() {
        return Err(describe_missing(&missing, &config, &args.null_dir));
    }
    let result = estimate_power(&config.scenario(), &config.statistics, &nulls, config.seed)?;
    let mut out = format!("{manifest}\nparam");
    for stat in &result.statistics {
        out.push_str(&format!(",{stat}"));
    }
    out.push('\n');
    for (param, rates) in result.params.iter().zip(&result.rejection_rates) {
        out.push_str(&param.to_string());
        for rate in rates {
            out.push_str(&format!(",{rate}"));
        }
        out.push('\n');
    }
    fs::write(&args.out, out)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "wrote {}: {} grid points x {} statistics",
        args.out.display(),
        result.params.len(),
        result.statistics.len()
    );
    Ok(())
}

fn cmd_coverage(args: StudyArgs) -> Result<(), CliError> {
    let (config, manifest) = load_config(&args.config)?;
    let bank = load_null_bank(&args.null_dir)?;
    let v_null = select_null(&bank, Statistic::WmwMinP, config.n, config.b, config.policy)
        .ok_or_else(|| describe_missing(&[Statistic::WmwMinP], &config, &args.null_dir))?;
    let result = estimate_coverage(
        &config.scenario(),
        &config.ci_methods,
        v_null,
        config.nboot,
        config.attempt_budget,
        config.seed,
    )?;
    let mut out = format!("{manifest}\nparam");
    for method in &result.methods {
        out.push_str(&format!(",coverage_{method},avg_length_{method}"));
    }
    out.push('\n');
    for (i, param) in result.params.iter().enumerate() {
        out.push_str(&param.to_string());
        for j in 0..result.methods.len() {
            out.push_str(&format!(",{},{}", result.coverage[i][j], result.avg_length[i][j]));
        }
        out.push('\n');
    }
    fs::write(&args.out, out)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "wrote {}: {} grid points x {} methods",
        args.out.display(),
        result.params.len(),
        result.methods.len()
    );
    Ok(())
}
