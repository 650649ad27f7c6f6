//! File ingestion: series CSVs and directories of null-distribution files.

use std::fs;
use std::path::{Path, PathBuf};

use cpscan::{EmpiricalNull, PValuePolicy, Statistic, TimeSeries};

use crate::CliError;

/// Read a single-column CSV of decimal values.
///
/// Rules: blank lines are skipped; a leading header line is tolerated (first
/// token non-numeric); if a line has several comma-separated columns, the
/// first is used and a warning goes to stderr once; any other unparseable or
/// non-finite value fails with its 1-based physical line number.
pub fn read_series(path: &Path) -> Result<TimeSeries, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut warned_columns = false;
    let mut seen_data_line = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let first = fields.next().expect("split yields at least one field").trim();
        if fields.next().is_some() && !warned_columns {
            eprintln!(
                "warning: {}: multiple columns detected; using the first column only",
                path.display()
            );
            warned_columns = true;
        }
        match first.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(CliError::validation(format!(
                    "{}: line {line_no}: non-finite value {v}",
                    path.display()
                )))
            }
            Err(_) if !seen_data_line => {} // header line
            Err(_) => {
                return Err(CliError::validation(format!(
                    "{}: line {line_no}: cannot parse {first:?} as a number",
                    path.display()
                )))
            }
        }
        seen_data_line = true;
    }
    TimeSeries::new(values).map_err(|e| {
        CliError::validation(format!("{}: {e}", path.display()))
    })
}

/// All `*.null` files in `dir`, loaded and paired with their paths,
/// in deterministic (sorted-path) order.
pub fn load_null_bank(dir: &Path) -> Result<Vec<(PathBuf, EmpiricalNull)>, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::io(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let entry =
            entry.map_err(|e| CliError::io(format!("cannot list {}: {e}", dir.display())))?;
        let path = entry.path();
        if path.extension().is_some_and(|ext| ext == "null") && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    let mut bank = Vec::with_capacity(paths.len());
    for path in paths {
        let null = EmpiricalNull::load(&path)
            .map_err(|e| CliError::from_core(e).prefixed(&format!("{}: ", path.display())))?;
        bank.push((path, null));
    }
    Ok(bank)
}

/// Pick the bank entry for `(statistic, n, b, policy)`. When several files
/// hold a matching null, the one with the most simulations wins (ties break
/// on path order, which is already sorted).
pub fn select_null(
    bank: &[(PathBuf, EmpiricalNull)],
    statistic: Statistic,
    n: usize,
    b: usize,
    policy: PValuePolicy,
) -> Option<&EmpiricalNull> {
    bank.iter()
        .filter(|(_, null)| {
            let spec = null.spec();
            spec.statistic == statistic && spec.n == n && spec.b == b && spec.policy == policy
        })
        .max_by(|(pa, a), (pb, b)| {
            a.len().cmp(&b.len()).then_with(|| pb.cmp(pa)) // larger nsim, then earlier path
        })
        .map(|(_, null)| null)
}
