//! Single runs and parameter sweeps, with the statistics reported for them.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::config::{FitMethod, SimulationConfig, Weighting};
use crate::error::{Error, Result};
use crate::lockstep::{Lockstep, RunDiagnostics};
use crate::paths::PathStatus;
use crate::scaling::{scaled_config, scaled_frame, unscale_times, ScaledFrame, ScalingSpec};
use crate::stats::{
    bootstrap_least_squares, build_histogram, default_bins, fit_gamma_least_squares, fit_gamma_mle, moments,
    skewness, wkb_time, GammaFit,
};

/// How a list of tunneling times is binned and fitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub bins: Option<usize>,
    pub method: FitMethod,
    pub weighting: Weighting,
    pub n_bootstrap: usize,
    pub seed: u64,
}

impl FitOptions {
    pub fn from_config(c: &SimulationConfig) -> Self {
        Self {
            bins: c.bins,
            method: c.fit_method,
            weighting: c.ls_weighting,
            n_bootstrap: c.n_bootstrap,
            seed: c.master_seed,
        }
    }
}

/// Statistics of one list of tunneling times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeStats {
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub skewness: Option<f64>,
    pub bins: usize,
    pub least_squares: Option<GammaFit>,
    pub mle: Option<GammaFit>,
    /// Requested fits that failed, with the reason.
    pub fit_errors: Vec<String>,
}

pub fn analyze_times(times: &[f64], opts: &FitOptions) -> TimeStats {
    let n = times.len();
    let (mean, sd) = match moments(times) {
        Ok((m, s)) => (Some(m), Some(s)),
        Err(_) => (times.first().copied(), None),
    };
    let bins = opts.bins.unwrap_or_else(|| default_bins(n));
    let mut out = TimeStats {
        n,
        mean,
        sd,
        skewness: skewness(times).ok(),
        bins,
        least_squares: None,
        mle: None,
        fit_errors: Vec::new(),
    };
    if matches!(opts.method, FitMethod::LeastSquares | FitMethod::Both) {
        let fit = build_histogram(times, bins).and_then(|h| fit_gamma_least_squares(&h, opts.weighting));
        match fit {
            Ok(mut f) => {
                if opts.n_bootstrap > 0 {
                    match bootstrap_least_squares(times, Some(bins), opts.weighting, opts.n_bootstrap, opts.seed) {
                        Ok((a, b)) => {
                            f.alpha_se = Some(a);
                            f.beta_se = Some(b);
                        }
                        Err(e) => out.fit_errors.push(format!("bootstrap: {e}")),
                    }
                }
                out.least_squares = Some(f);
            }
            Err(e) => out.fit_errors.push(format!("least squares: {e}")),
        }
    }
    if matches!(opts.method, FitMethod::Mle | FitMethod::Both) {
        match fit_gamma_mle(times) {
            Ok(f) => out.mle = Some(f),
            Err(e) => out.fit_errors.push(format!("mle: {e}")),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: SimulationConfig,
    pub transmitted: usize,
    pub reflected: usize,
    pub undecided: usize,
    pub transmitted_fraction: f64,
    /// `int_{d/2}^inf |psi(t_f)|^2 dx`.
    pub pde_transmitted_probability: f64,
    pub kappa: f64,
    pub kappa_d: f64,
    pub tau_wkb: f64,
    /// Mean starting position of the transmitted paths.
    pub mean_x_init_transmitted: Option<f64>,
    pub times: TimeStats,
    pub diagnostics: RunDiagnostics,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    /// Tunneling times of the transmitted paths, in path order.
    pub times: Vec<f64>,
    pub wall_clock: Duration,
}

/// Runs the full pipeline for one config.
pub fn simulate(config: &SimulationConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let kappa = config.kappa()?;
    let tau_wkb = wkb_time(&config.barrier()?, config.e0())?;
    let (ens, diagnostics, _) = Lockstep::new(config)?.run_to_end()?;
    let transmitted: Vec<_> = ens.paths.iter().filter(|p| p.status == PathStatus::Transmitted).collect();
    let times: Vec<f64> = transmitted.iter().map(|p| p.tau).collect();
    let mean_x_init_transmitted = if transmitted.is_empty() {
        None
    } else {
        Some(transmitted.iter().map(|p| p.x_init).sum::<f64>() / transmitted.len() as f64)
    };
    let c = diagnostics.classification;
    let summary = RunSummary {
        config: config.clone(),
        transmitted: c.transmitted,
        reflected: c.reflected,
        undecided: c.undecided,
        transmitted_fraction: c.transmitted_fraction(),
        pde_transmitted_probability: diagnostics.transmitted_probability_final,
        kappa,
        kappa_d: kappa * config.d,
        tau_wkb,
        mean_x_init_transmitted,
        times: analyze_times(&times, &FitOptions::from_config(config)),
        diagnostics,
    };
    Ok(RunOutcome {
        summary,
        times,
        wall_clock: start.elapsed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Barrier width `d`.
    Width,
    /// Packet width `Delta x`.
    Packet,
    /// Barrier height as a multiple of `E0`.
    Height,
    /// Planck-constant scale `eps`.
    Epsilon,
}

impl SweepKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Width => "d",
            Self::Packet => "delta_x",
            Self::Height => "v0_over_e0",
            Self::Epsilon => "epsilon",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Self::Width | Self::Packet => "1/k0",
            Self::Height | Self::Epsilon => "1",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            Self::Width => vec![0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
            Self::Packet => vec![10.0, 20.0, 50.0],
            Self::Height => vec![1.25, 1.5, 2.0, 3.0, 4.0],
            Self::Epsilon => crate::scaling::DEFAULT_EPSILONS.to_vec(),
        }
    }
}

/// Path-count policy for sweeps. With `min_transmitted` set, each run uses
/// enough paths to expect that many transmissions at the plane-wave
/// coefficient for `E0`, never fewer than the config's `n_paths` and never
/// more than `max_paths`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathBudget {
    pub min_transmitted: Option<usize>,
    pub max_paths: usize,
}

impl Default for PathBudget {
    fn default() -> Self {
        Self {
            min_transmitted: None,
            max_paths: 1_000_000,
        }
    }
}

impl PathBudget {
    pub fn paths_for(&self, config: &SimulationConfig) -> Result<usize> {
        let Some(k) = self.min_transmitted else {
            return Ok(config.n_paths);
        };
        let t = config.barrier()?.transmission(config.e0())?;
        let want = (k as f64 / t).ceil();
        let n = if want.is_finite() && want < self.max_paths as f64 {
            want as usize
        } else {
            self.max_paths
        };
        Ok(n.max(config.n_paths).min(self.max_paths.max(config.n_paths)))
    }
}

/// Config for one sweep value, before the path budget is applied.
pub fn sweep_config(kind: SweepKind, base: &SimulationConfig, value: f64) -> Result<SimulationConfig> {
    let mut c = base.clone();
    match kind {
        SweepKind::Width => c.d = value,
        SweepKind::Packet => c.delta_x = value,
        SweepKind::Height => c = c.with_height_ratio(value),
        SweepKind::Epsilon => c = scaled_config(&ScalingSpec::new(value, base.clone())?)?,
    }
    c.validate()?;
    Ok(c)
}

/// One row of a sweep table. Times are in the base frame (for `eps`
/// sweeps they are already multiplied by `eps`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub n_paths: usize,
    pub n_transmitted: usize,
    pub transmitted_fraction: Option<f64>,
    pub mean_tau: Option<f64>,
    pub sd_tau: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_se: Option<f64>,
    pub beta: Option<f64>,
    pub beta_se: Option<f64>,
    pub kappa2_beta: Option<f64>,
    pub kappa2_beta_se: Option<f64>,
    pub kappa_d: Option<f64>,
    pub tau_wkb: Option<f64>,
    pub error: Option<String>,
}

/// A finished sweep point, handed to the caller as soon as it completes.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub index: usize,
    pub row: SweepRow,
    /// Run config (X-T frame for `eps` sweeps); absent if it was invalid.
    pub config: Option<SimulationConfig>,
    pub outcome: Option<RunOutcome>,
    pub frame: Option<ScaledFrame>,
    /// Times reported in the row (unscaled for `eps` sweeps).
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub base: SimulationConfig,
    pub budget: PathBudget,
    pub rows: Vec<SweepRow>,
}

/// Runs every value in order; a failed run becomes a row with `error` set.
pub fn run_sweep(
    kind: SweepKind,
    base: &SimulationConfig,
    values: &[f64],
    budget: PathBudget,
    mut sink: impl FnMut(&SweepEntry) -> Result<()>,
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    base.validate()?;
    let mut rows = Vec::with_capacity(values.len());
    for (index, &value) in values.iter().enumerate() {
        let entry = sweep_point(kind, base, value, budget, index);
        if let Some(e) = &entry.row.error {
            log::warn!("{} = {value}: {e}", kind.label());
        }
        sink(&entry)?;
        rows.push(entry.row);
    }
    Ok(SweepTable {
        kind,
        base: base.clone(),
        budget,
        rows,
    })
}

fn sweep_point(kind: SweepKind, base: &SimulationConfig, value: f64, budget: PathBudget, index: usize) -> SweepEntry {
    let mut row = SweepRow {
        value,
        n_paths: 0,
        n_transmitted: 0,
        transmitted_fraction: None,
        mean_tau: None,
        sd_tau: None,
        alpha: None,
        alpha_se: None,
        beta: None,
        beta_se: None,
        kappa2_beta: None,
        kappa2_beta_se: None,
        kappa_d: None,
        tau_wkb: None,
        error: None,
    };
    let mut entry = SweepEntry {
        index,
        row: row.clone(),
        config: None,
        outcome: None,
        frame: None,
        times: Vec::new(),
    };
    let prepared = sweep_config(kind, base, value).and_then(|mut c| {
        c.n_paths = budget.paths_for(&c)?;
        Ok(c)
    });
    let config = match prepared {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            entry.row = row;
            return entry;
        }
    };
    row.n_paths = config.n_paths;
    let epsilon = if kind == SweepKind::Epsilon { value } else { 1.0 };
    if kind == SweepKind::Epsilon {
        let spec = ScalingSpec::new(value, base.clone());
        entry.frame = spec.as_ref().ok().and_then(|s| scaled_frame(s).ok());
        if let Ok(s) = spec {
            row.kappa_d = s.effective_kappa_d().ok();
            row.tau_wkb = s.tau_wkb_tilde().ok();
        }
    }
    entry.config = Some(config.clone());
    match simulate(&config) {
        Ok(outcome) => {
            let s = &outcome.summary;
            if kind != SweepKind::Epsilon {
                row.kappa_d = Some(s.kappa_d);
                row.tau_wkb = Some(s.tau_wkb);
            }
            row.n_transmitted = s.transmitted;
            row.transmitted_fraction = Some(s.transmitted_fraction);
            let times = unscale_times(&outcome.times, epsilon);
            let stats = if epsilon == 1.0 {
                s.times.clone()
            } else {
                analyze_times(&times, &FitOptions::from_config(&config))
            };
            row.mean_tau = stats.mean;
            row.sd_tau = stats.sd;
            if let Some(f) = &stats.least_squares {
                let k2 = s.kappa * s.kappa;
                row.alpha = Some(f.alpha);
                row.alpha_se = f.alpha_se;
                row.beta = Some(f.beta);
                row.beta_se = f.beta_se;
                row.kappa2_beta = Some(k2 * f.beta);
                row.kappa2_beta_se = f.beta_se.map(|b| k2 * b);
            }
            if !stats.fit_errors.is_empty() && row.error.is_none() && s.transmitted > 0 {
                row.error = Some(stats.fit_errors.join("; "));
            }
            if s.transmitted == 0 {
                row.error = Some(Error::NoTransmittedPaths.to_string());
            }
            entry.times = times;
            entry.outcome = Some(outcome);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    entry.row = row;
    entry
}
