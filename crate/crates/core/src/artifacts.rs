//! On-disk layout of runs and sweeps.
//!
//! A run directory holds `config.toml` (written before the run starts),
//! `tau.txt`, `histogram.dat`, `fit.txt`, `summary.json` and `timing.json`;
//! a failed run leaves `error.txt` next to whatever was already written.
//! Everything except `timing.json` is a function of the config alone.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::runner::{RunOutcome, RunSummary, SweepEntry, SweepKind, SweepTable, TimeStats};
use crate::stats::{build_histogram, gamma_pdf, GammaFit};

pub const CONFIG_FILE: &str = "config.toml";
pub const TAU_FILE: &str = "tau.txt";
pub const HISTOGRAM_FILE: &str = "histogram.dat";
pub const FIT_FILE: &str = "fit.txt";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_FILE: &str = "timing.json";
pub const ERROR_FILE: &str = "error.txt";
pub const FRAME_FILE: &str = "frame.json";
pub const SWEEP_TABLE_FILE: &str = "sweep.dat";
pub const SWEEP_JSON_FILE: &str = "sweep.json";

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn from_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// One value per line in shortest round-trip form.
pub fn format_times(times: &[f64]) -> String {
    let mut s = String::with_capacity(times.len() * 20);
    for t in times {
        writeln!(s, "{t:?}").unwrap();
    }
    s
}

/// Reads `tau.txt`, or the `tau.txt` inside a directory.
pub fn read_times(path: &Path) -> Result<Vec<f64>> {
    let file = if path.is_dir() { path.join(TAU_FILE) } else { path.to_path_buf() };
    let text = fs::read_to_string(&file).map_err(|e| Error::Config(format!("cannot read {}: {e}", file.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| Error::Config(format!("{}: bad value {l:?}: {e}", file.display())))
        })
        .collect()
}

/// Histogram table: bin center, density per transmitted path, density per
/// ensemble path (when `n_total` is known) and raw count.
pub fn histogram_text(times: &[f64], bins: usize, n_total: Option<usize>) -> Result<String> {
    let h = build_histogram(times, bins)?;
    let mut s = String::new();
    writeln!(s, "# tunneling-time histogram, {} transmitted paths, {} bins", h.n_transmitted, h.bins()).unwrap();
    writeln!(s, "# bin_width = {:?} [1/k0^2]", h.bin_width).unwrap();
    writeln!(s, "# tau_center[1/k0^2] P_transmitted[k0^2] P_ensemble[k0^2] count").unwrap();
    let per_tx = h.heights();
    let per_ens = n_total.map(|n| h.heights_per_ensemble(n));
    for i in 0..h.bins() {
        let pe = per_ens.as_ref().map_or(f64::NAN, |v| v[i]);
        writeln!(s, "{:?} {:?} {:?} {}", h.center(i), per_tx[i], pe, h.counts[i]).unwrap();
    }
    Ok(s)
}

fn fit_lines(s: &mut String, name: &str, fit: &Option<GammaFit>) {
    match fit {
        Some(f) => {
            let se = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"));
            writeln!(s, "{name}:").unwrap();
            writeln!(s, "  alpha = {:.6}  (se {})", f.alpha, se(f.alpha_se)).unwrap();
            writeln!(s, "  beta  = {:.6} [1/k0^2]  (se {})", f.beta, se(f.beta_se)).unwrap();
            writeln!(s, "  implied mean = {:.6}, sd = {:.6} [1/k0^2]", f.implied_mean(), f.implied_sd()).unwrap();
            writeln!(s, "  objective = {:.6e}, iterations = {}", f.residual, f.iterations).unwrap();
        }
        None => writeln!(s, "{name}: not available").unwrap(),
    }
}

/// Plain-text fit report for a list of times.
pub fn fit_report(stats: &TimeStats) -> String {
    let mut s = String::new();
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"));
    writeln!(s, "Gamma fit P(tau) = tau^alpha exp(-tau/beta) / (beta^(alpha+1) Gamma(alpha+1))").unwrap();
    writeln!(s, "samples = {}, bins = {}", stats.n, stats.bins).unwrap();
    writeln!(s, "<tau> = {} [1/k0^2], Delta tau = {} [1/k0^2], skewness = {}", opt(stats.mean), opt(stats.sd), opt(stats.skewness)).unwrap();
    fit_lines(&mut s, "least squares", &stats.least_squares);
    fit_lines(&mut s, "maximum likelihood", &stats.mle);
    for e in &stats.fit_errors {
        writeln!(s, "failed: {e}").unwrap();
    }
    s
}

/// Config echo; written first so a failed run can be rerun as is.
pub fn write_config(dir: &Path, config: &SimulationConfig) -> Result<()> {
    write_atomic(&dir.join(CONFIG_FILE), config.to_text().as_bytes())
}

/// Everything a finished run produces.
pub fn write_run(dir: &Path, outcome: &RunOutcome) -> Result<()> {
    let summary = &outcome.summary;
    write_config(dir, &summary.config)?;
    write_atomic(&dir.join(TAU_FILE), format_times(&outcome.times).as_bytes())?;
    if !outcome.times.is_empty() {
        let hist = histogram_text(&outcome.times, summary.times.bins, Some(summary.config.n_paths))?;
        write_atomic(&dir.join(HISTOGRAM_FILE), hist.as_bytes())?;
    }
    write_atomic(&dir.join(FIT_FILE), fit_report(&summary.times).as_bytes())?;
    write_atomic(&dir.join(SUMMARY_FILE), to_json(summary)?.as_bytes())?;
    let timing = serde_json::json!({ "wall_clock_s": outcome.wall_clock.as_secs_f64() });
    write_atomic(&dir.join(TIMING_FILE), to_json(&timing)?.as_bytes())?;
    Ok(())
}

pub fn write_error(dir: &Path, err: &Error) -> Result<()> {
    write_atomic(&dir.join(ERROR_FILE), format!("{err}\n").as_bytes())
}

pub fn read_summary(dir: &Path) -> Result<RunSummary> {
    from_json(&dir.join(SUMMARY_FILE))
}

/// Directory name of one sweep point, e.g. `03_d=1.5`.
pub fn sweep_run_dir(kind: SweepKind, index: usize, value: f64) -> String {
    format!("{index:02}_{}={value}", kind.label())
}

/// Per-point artifacts of a sweep, under `root/<sweep_run_dir>`.
pub fn write_sweep_entry(root: &Path, kind: SweepKind, entry: &SweepEntry) -> Result<PathBuf> {
    let dir = root.join(sweep_run_dir(kind, entry.index, entry.row.value));
    fs::create_dir_all(&dir)?;
    if let Some(c) = &entry.config {
        write_config(&dir, c)?;
    }
    if let Some(frame) = &entry.frame {
        write_atomic(&dir.join(FRAME_FILE), to_json(frame)?.as_bytes())?;
    }
    if let Some(o) = &entry.outcome {
        write_run(&dir, o)?;
    }
    if let Some(e) = &entry.row.error {
        write_atomic(&dir.join(ERROR_FILE), format!("{e}\n").as_bytes())?;
    }
    Ok(dir)
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| format!("{x:?}"))
}

pub fn sweep_table_text(table: &SweepTable) -> String {
    let k = table.kind;
    let mut s = String::new();
    let frame = if k == SweepKind::Epsilon { " (times are tau~ = eps tau)" } else { "" };
    writeln!(s, "# {} sweep{frame}", k.label()).unwrap();
    writeln!(
        s,
        "# {}[{}] n_paths n_transmitted <tau>[1/k0^2] Delta_tau[1/k0^2] alpha alpha_se beta[1/k0^2] beta_se kappa2_beta[1] kappa_d[1] tau_wkb[1/k0^2]",
        k.label(),
        k.unit()
    )
    .unwrap();
    for r in &table.rows {
        writeln!(
            s,
            "{:?} {} {} {} {} {} {} {} {} {} {} {}",
            r.value,
            r.n_paths,
            r.n_transmitted,
            cell(r.mean_tau),
            cell(r.sd_tau),
            cell(r.alpha),
            cell(r.alpha_se),
            cell(r.beta),
            cell(r.beta_se),
            cell(r.kappa2_beta),
            cell(r.kappa_d),
            cell(r.tau_wkb)
        )
        .unwrap();
    }
    s
}

pub fn write_sweep(root: &Path, table: &SweepTable) -> Result<()> {
    write_atomic(&root.join(SWEEP_TABLE_FILE), sweep_table_text(table).as_bytes())?;
    write_atomic(&root.join(SWEEP_JSON_FILE), to_json(table)?.as_bytes())
}

pub fn read_sweep(root: &Path) -> Result<SweepTable> {
    from_json(&root.join(SWEEP_JSON_FILE))
}

/// Gamma density column for a fitted histogram (NaN where undefined).
pub(crate) fn fitted_density(fit: &GammaFit, tau: f64) -> f64 {
    gamma_pdf(fit.alpha, fit.beta, tau).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let times = vec![0.1, 1.0 / 3.0, 12.345678901234567, 1e-7, 0.0];
        write_atomic(&dir.path().join(TAU_FILE), format_times(&times).as_bytes()).unwrap();
        assert_eq!(read_times(dir.path()).unwrap(), times);
        assert!(!dir.path().join(".tau.txt.tmp").exists());
    }

    #[test]
    fn bad_tau_file_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(TAU_FILE), "1.0\nabc\n").unwrap();
        assert!(matches!(read_times(dir.path()), Err(Error::Config(_))));
        assert!(matches!(read_times(&dir.path().join("missing")), Err(Error::Config(_))));
    }

    #[test]
    fn histogram_table_columns() {
        let text = histogram_text(&[1.0, 1.5, 2.0, 2.5], 2, Some(8)).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 2);
        let w = rows[1][0] - rows[0][0];
        let area: f64 = rows.iter().map(|r| r[1] * w).sum();
        assert!((area - 1.0).abs() < 1e-12);
        assert!((rows[0][2] - rows[0][1] / 2.0).abs() < 1e-12);
    }
}
