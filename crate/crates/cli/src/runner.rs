//! Executing experiments and writing their artifacts.
//!
//! A single run produces `trace.csv` (per-iteration states, deterministic
//! byte-for-byte given config + seed) and `summary.toml` (final metrics plus
//! wall time). A sweep runs the Cartesian product of the configured grids,
//! one numbered subdirectory per combination, and ranks everything into
//! `sweep_summary.csv`. All files are written atomically (temp + rename).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use simplex_md::{run, RunReport};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Outcome of one executed run, pared down to what the summary needs.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_loss: f64,
    pub iterations: u32,
    pub converged: bool,
    pub error: Option<String>,
    pub log_wealth: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    final_loss: f64,
    iterations: u32,
    converged: bool,
    wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: &'a Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_wealth: &'a Option<f64>,
    family: String,
    variant: &'a str,
    eta: f64,
}

/// Write `bytes` to `path` atomically: a temp file in the same directory is
/// renamed over the target, so concurrent runs never interleave in one file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Runtime(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

/// Render the trace CSV: header `t,loss,grad_norm,w_1..w_N`, full round-trip
/// float precision, no timestamps (used in byte-identity determinism checks).
pub fn trace_csv(report: &RunReport, dim: usize) -> String {
    let mut out = String::from("t,loss,grad_norm");
    for i in 1..=dim {
        let _ = write!(out, ",w_{i}");
    }
    out.push('\n');
    for row in &report.trace.rows {
        let _ = write!(out, "{},{},{}", row.t, row.loss, row.grad_norm);
        for w in &row.w {
            let _ = write!(out, ",{w}");
        }
        out.push('\n');
    }
    out
}

/// Execute one run and write `trace.csv` + `summary.toml` under `out_dir`.
/// Runtime failures still flush the partial trace before reporting.
pub fn execute_run(cfg: &ExperimentConfig, base: &Path, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let descent = cfg.descent_config()?;
    let problem = cfg.problem(base)?;
    let w0 = cfg.start_point(problem.dim())?;

    let started = Instant::now();
    let report = run(&descent, &problem, &w0);
    let wall_time_s = started.elapsed().as_secs_f64();

    write_atomic(
        &out_dir.join("trace.csv"),
        trace_csv(&report, problem.dim()).as_bytes(),
    )?;

    let outcome = RunOutcome {
        final_loss: report.final_loss,
        iterations: report.iterations,
        converged: report.converged,
        error: report.error.clone(),
        log_wealth: report.log_wealth,
        wall_time_s,
    };
    let summary = SummaryFile {
        final_loss: outcome.final_loss,
        iterations: outcome.iterations,
        converged: outcome.converged,
        wall_time_s,
        error: &outcome.error,
        log_wealth: &outcome.log_wealth,
        family: descent.family.describe(),
        variant: &cfg.optimizer.variant,
        eta: cfg.optimizer.eta,
    };
    let text = toml::to_string_pretty(&summary)
        .map_err(|e| CliError::Runtime(format!("summary serialization: {e}")))?;
    write_atomic(&out_dir.join("summary.toml"), text.as_bytes())?;
    Ok(outcome)
}

/// One grid combination: the overridden config and its human-readable id.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub id: String,
    pub config: ExperimentConfig,
    /// Grid key → value, in grid (alphabetical) order.
    pub assignment: Vec<(String, f64)>,
}

/// Expand the sweep grids into the full Cartesian product, in deterministic
/// order: keys alphabetical, last key fastest. Errors when the product
/// exceeds the cap.
pub fn expand_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no [sweep] section".into()))?;
    if sweep.grids.is_empty() {
        return Err(CliError::Config("sweep.grids must be nonempty".into()));
    }
    let keys: Vec<&String> = sweep.grids.keys().collect();
    let mut total = 1usize;
    for (key, values) in &sweep.grids {
        if values.is_empty() {
            return Err(CliError::Config(format!("sweep grid {key:?} has no values")));
        }
        total = total.saturating_mul(values.len());
    }
    if total > sweep.cap {
        return Err(CliError::Config(format!(
            "sweep of {total} combinations exceeds the cap of {} (raise sweep.cap to allow)",
            sweep.cap
        )));
    }

    let width = total.saturating_sub(1).to_string().len().max(3);
    let mut points = Vec::with_capacity(total);
    let mut index = vec![0usize; keys.len()];
    for i in 0..total {
        let mut combo = cfg.clone();
        combo.sweep = None;
        let mut assignment = Vec::with_capacity(keys.len());
        for (k, key) in keys.iter().enumerate() {
            let value = sweep.grids[*key][index[k]];
            assignment.push(((*key).clone(), value));
            if *key == "eta" {
                combo.optimizer.eta = value;
            } else {
                combo.family.params.insert((*key).clone(), value);
            }
        }
        points.push(SweepPoint {
            id: format!("run_{i:0width$}"),
            config: combo,
            assignment,
        });
        // odometer increment, last key fastest
        for k in (0..keys.len()).rev() {
            index[k] += 1;
            if index[k] < sweep.grids[keys[k]].len() {
                break;
            }
            index[k] = 0;
        }
    }
    Ok(points)
}

/// A sweep summary row (one per grid combination, failed runs included).
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub id: String,
    pub assignment: Vec<(String, f64)>,
    pub final_loss: f64,
    pub iterations: u32,
    pub converged: bool,
    pub error: Option<String>,
}

/// Execute every sweep point (in parallel when `jobs > 1`), write per-run
/// artifacts under `out_dir/<id>/`, rank, and write `sweep_summary.csv`.
pub fn execute_sweep(
    cfg: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
    jobs: usize,
) -> Result<Vec<SweepRow>, CliError> {
    let points = expand_sweep(cfg)?;

    let run_one = |point: &SweepPoint| -> SweepRow {
        let run_dir: PathBuf = out_dir.join(&point.id);
        match execute_run(&point.config, base, &run_dir) {
            Ok(outcome) => SweepRow {
                id: point.id.clone(),
                assignment: point.assignment.clone(),
                final_loss: outcome.final_loss,
                iterations: outcome.iterations,
                converged: outcome.converged,
                error: outcome.error,
            },
            // config-level failures for this grid point (e.g. a parameter
            // combination outside the family's valid region) become visible
            // failed rows instead of aborting the whole sweep
            Err(e) => SweepRow {
                id: point.id.clone(),
                assignment: point.assignment.clone(),
                final_loss: f64::NAN,
                iterations: 0,
                converged: false,
                error: Some(e.to_string()),
            },
        }
    };

    let mut rows: Vec<SweepRow> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            points.par_iter().map(run_one).collect()
        })
    } else {
        points.iter().map(run_one).collect()
    };

    // rank: best final loss first, ties by fewer iterations, then by id
    // (ids follow lexicographic parameter order by construction); failed
    // runs sort last
    rows.sort_by(|a, b| {
        let key = |r: &SweepRow| (r.final_loss.is_nan(), r.final_loss, r.iterations);
        let (an, af, ai) = key(a);
        let (bn, bf, bi) = key(b);
        an.cmp(&bn)
            .then(af.partial_cmp(&bf).unwrap_or(std::cmp::Ordering::Equal))
            .then(ai.cmp(&bi))
            .then(a.id.cmp(&b.id))
    });

    write_atomic(
        &out_dir.join("sweep_summary.csv"),
        sweep_summary_csv(&rows).as_bytes(),
    )?;
    Ok(rows)
}

fn sweep_summary_csv(rows: &[SweepRow]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["rank".to_string(), "run_id".to_string()];
    if let Some(first) = rows.first() {
        header.extend(first.assignment.iter().map(|(k, _)| k.clone()));
    }
    header.extend(
        ["final_loss", "iterations", "converged", "error"]
            .iter()
            .map(|s| s.to_string()),
    );
    wtr.write_record(&header).expect("csv header");
    for (rank, row) in rows.iter().enumerate() {
        let mut rec = vec![(rank + 1).to_string(), row.id.clone()];
        rec.extend(row.assignment.iter().map(|(_, v)| v.to_string()));
        rec.push(row.final_loss.to_string());
        rec.push(row.iterations.to_string());
        rec.push(row.converged.to_string());
        rec.push(row.error.clone().unwrap_or_default());
        wtr.write_record(&rec).expect("csv row");
    }
    String::from_utf8(wtr.into_inner().expect("csv flush")).expect("csv utf8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep_config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
schema_version = 1
[problem]
name = "quadratic"
target = [0.6, 0.4]
[family]
tag = "tsallis"
[family.params]
q = 0.7
[optimizer]
variant = "md"
eta = 0.5
max_iters = 50
seed = 1
[sweep]
[sweep.grids]
eta = [0.1, 0.5]
q = [0.5, 0.9, 1.3]
"#,
        )
        .unwrap()
    }

    #[test]
    fn sweep_expansion_is_the_cartesian_product_in_key_order() {
        let points = expand_sweep(&sweep_config()).unwrap();
        assert_eq!(points.len(), 6);
        assert_eq!(points[0].id, "run_000");
        // keys sorted: eta before q; q is the last key, so it cycles fastest
        assert_eq!(points[0].assignment, vec![("eta".into(), 0.1), ("q".into(), 0.5)]);
        assert_eq!(points[1].assignment, vec![("eta".into(), 0.1), ("q".into(), 0.9)]);
        assert_eq!(points[3].assignment, vec![("eta".into(), 0.5), ("q".into(), 0.5)]);
        assert_eq!(points[5].assignment, vec![("eta".into(), 0.5), ("q".into(), 1.3)]);
        assert!((points[3].config.optimizer.eta - 0.5).abs() < 1e-15);
        assert_eq!(points[5].config.family.params["q"], 1.3);
    }

    #[test]
    fn sweep_cap_is_enforced() {
        let mut cfg = sweep_config();
        cfg.sweep.as_mut().unwrap().cap = 5;
        let err = expand_sweep(&cfg).unwrap_err().to_string();
        assert!(err.contains("cap"), "{err}");
    }

    #[test]
    fn trace_csv_shape() {
        let cfg = ExperimentConfig::from_toml(
            r#"
schema_version = 1
[problem]
name = "quadratic"
target = [0.6, 0.4]
[family]
tag = "natural"
[optimizer]
variant = "md"
eta = 0.5
max_iters = 10
seed = 1
"#,
        )
        .unwrap();
        let descent = cfg.descent_config().unwrap();
        let problem = cfg.problem(Path::new(".")).unwrap();
        let w0 = cfg.start_point(2).unwrap();
        let report = simplex_md::run(&descent, &problem, &w0);
        let csv = trace_csv(&report, 2);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,loss,grad_norm,w_1,w_2");
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,"), "{first}");
        // uniform start appears in full precision
        assert!(first.contains(",0.5,0.5"), "{first}");
    }
}
