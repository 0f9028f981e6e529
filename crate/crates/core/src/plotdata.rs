//! Whitespace-separated data files for the standard figures.
//!
//! `fig2` and `fig7` read a run directory; the others read a sweep
//! directory (`width` sweeps for 3-6, 8, 9; `epsilon` sweeps for 10, 11).
//! Rows whose statistics are missing are listed in the header and skipped.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::artifacts::{fitted_density, read_summary, read_sweep, read_times, write_atomic};
use crate::error::{Error, Result};
use crate::runner::{SweepKind, SweepRow, SweepTable};
use crate::scaling::deviation_crossover;
use crate::stats::{build_histogram, log_log_slope, REGIME_SPLIT_KAPPA_D};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Tunneling-time distribution.
    Fig2,
    /// `<tau>` against `d`.
    Fig3,
    /// `Delta tau` against `d`.
    Fig4,
    /// `<tau>` against `d` for `d <= 4`.
    Fig5,
    /// `Delta tau` against `<tau>`.
    Fig6,
    /// Distribution with its least-squares Gamma fit.
    Fig7,
    /// `alpha` against `kappa d`.
    Fig8,
    /// `kappa^2 beta` against `kappa d`.
    Fig9,
    /// `<tau~>` against `eps`.
    Fig10,
    /// `Delta tau~` against `eps`.
    Fig11,
}

pub const ALL_FIGURES: [FigureId; 10] = [
    FigureId::Fig2,
    FigureId::Fig3,
    FigureId::Fig4,
    FigureId::Fig5,
    FigureId::Fig6,
    FigureId::Fig7,
    FigureId::Fig8,
    FigureId::Fig9,
    FigureId::Fig10,
    FigureId::Fig11,
];

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig8 => "fig8",
            Self::Fig9 => "fig9",
            Self::Fig10 => "fig10",
            Self::Fig11 => "fig11",
        }
    }

    fn from_run(self) -> bool {
        matches!(self, Self::Fig2 | Self::Fig7)
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        ALL_FIGURES
            .iter()
            .copied()
            .find(|f| f.name() == key || f.name()[3..] == key)
            .ok_or_else(|| {
                let names: Vec<_> = ALL_FIGURES.iter().map(|f| f.name()).collect();
                Error::Config(format!("unknown figure {s:?} (expected one of {})", names.join(", ")))
            })
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Text of the data file for `fig`, read from `artifact`.
pub fn emit_plot_data(artifact: &Path, fig: FigureId) -> Result<String> {
    if !artifact.is_dir() {
        return Err(Error::Config(format!("artifact directory {} does not exist", artifact.display())));
    }
    if fig.from_run() {
        return run_figure(artifact, fig);
    }
    let table = read_sweep(artifact)?;
    let need = match fig {
        FigureId::Fig10 | FigureId::Fig11 => SweepKind::Epsilon,
        _ => SweepKind::Width,
    };
    if table.kind != need {
        return Err(Error::Config(format!(
            "{fig} needs a {:?} sweep, {} holds a {:?} sweep",
            need,
            artifact.display(),
            table.kind
        )));
    }
    Ok(match fig {
        FigureId::Fig3 => width_figure(&table, "<tau>[1/k0^2] tau_wkb[1/k0^2]", None, |r| {
            Some(vec![r.mean_tau?, r.tau_wkb?])
        }),
        FigureId::Fig4 => width_figure(&table, "Delta_tau[1/k0^2]", None, |r| Some(vec![r.sd_tau?])),
        FigureId::Fig5 => width_figure(&table, "<tau>[1/k0^2] tau_wkb[1/k0^2]", Some(4.0), |r| {
            Some(vec![r.mean_tau?, r.tau_wkb?])
        }),
        FigureId::Fig6 => fig6(&table),
        FigureId::Fig8 => kappa_d_figure(&table, "alpha[1] alpha_se[1]", |r| Some(vec![r.alpha?, se(r.alpha_se)])),
        FigureId::Fig9 => kappa_d_figure(&table, "kappa2_beta[1] kappa2_beta_se[1]", |r| {
            Some(vec![r.kappa2_beta?, se(r.kappa2_beta_se)])
        }),
        FigureId::Fig10 => epsilon_figure(&table, "<tau~>[1/k0^2] tau~_wkb[1/k0^2]", |r| {
            Some(vec![r.mean_tau?, r.tau_wkb?])
        }),
        FigureId::Fig11 => fig11(&table),
        FigureId::Fig2 | FigureId::Fig7 => unreachable!(),
    })
}

/// Writes `<out_dir>/<fig>.dat` and returns its path.
pub fn write_plot_data(artifact: &Path, fig: FigureId, out_dir: &Path) -> Result<PathBuf> {
    let text = emit_plot_data(artifact, fig)?;
    let path = out_dir.join(format!("{}.dat", fig.name()));
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

fn se(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn row_line(s: &mut String, cols: &[f64]) {
    let line: Vec<String> = cols.iter().map(|x| format!("{x:?}")).collect();
    writeln!(s, "{}", line.join(" ")).unwrap();
}

fn skipped(s: &mut String, label: &str, r: &SweepRow) {
    let why = r.error.as_deref().unwrap_or("statistic unavailable");
    writeln!(s, "# skipped {label} = {:?}: {why}", r.value).unwrap();
}

fn run_figure(dir: &Path, fig: FigureId) -> Result<String> {
    let summary = read_summary(dir)?;
    let times = read_times(dir)?;
    let h = build_histogram(&times, summary.times.bins)?;
    let c = &summary.config;
    let mut s = String::new();
    writeln!(
        s,
        "# V0/E0 = {:?}, d = {:?} [1/k0], delta_x = {:?} [1/k0], N = {}, transmitted = {}",
        c.v0 / c.e0(),
        c.d,
        c.delta_x,
        c.n_paths,
        times.len()
    )
    .unwrap();
    let heights = h.heights();
    match fig {
        FigureId::Fig2 => {
            writeln!(s, "# P(tau) normalized over transmitted paths").unwrap();
            writeln!(s, "# tau[1/k0^2] P[k0^2]").unwrap();
            for (i, p) in heights.iter().enumerate() {
                row_line(&mut s, &[h.center(i), *p]);
            }
        }
        _ => {
            let fit = summary
                .times
                .least_squares
                .as_ref()
                .ok_or_else(|| Error::Degenerate("run has no least-squares fit".into()))?;
            writeln!(s, "# least-squares Gamma fit: alpha = {:?}, beta = {:?} [1/k0^2]", fit.alpha, fit.beta).unwrap();
            writeln!(s, "# tau[1/k0^2] P[k0^2] P_fit[k0^2]").unwrap();
            for (i, p) in heights.iter().enumerate() {
                let t = h.center(i);
                row_line(&mut s, &[t, *p, fitted_density(fit, t)]);
            }
        }
    }
    Ok(s)
}

fn width_figure(
    table: &SweepTable,
    columns: &str,
    max_d: Option<f64>,
    pick: impl Fn(&SweepRow) -> Option<Vec<f64>>,
) -> String {
    let c = &table.base;
    let mut s = String::new();
    writeln!(s, "# V0/E0 = {:?}, delta_x = {:?} [1/k0]", c.v0 / c.e0(), c.delta_x).unwrap();
    writeln!(s, "# d[1/k0] {columns}").unwrap();
    let mut body = String::new();
    for r in table.rows.iter().filter(|r| max_d.is_none_or(|m| r.value <= m)) {
        match pick(r) {
            Some(v) => row_line(&mut body, &[[r.value].as_slice(), &v].concat()),
            None => skipped(&mut s, "d", r),
        }
    }
    s + &body
}

fn kappa_d_figure(table: &SweepTable, columns: &str, pick: impl Fn(&SweepRow) -> Option<Vec<f64>>) -> String {
    let c = &table.base;
    let mut s = String::new();
    writeln!(s, "# V0 = {:?} [k0^2], E0 = {:?} [k0^2], kappa = {:?} [k0]", c.v0, c.e0(), c.kappa().unwrap_or(f64::NAN))
        .unwrap();
    writeln!(s, "# kappa_d[1] {columns}").unwrap();
    let mut body = String::new();
    for r in &table.rows {
        match r.kappa_d.zip(pick(r)) {
            Some((kd, v)) => row_line(&mut body, &[[kd].as_slice(), &v].concat()),
            None => skipped(&mut s, "d", r),
        }
    }
    s + &body
}

fn epsilon_figure(table: &SweepTable, columns: &str, pick: impl Fn(&SweepRow) -> Option<Vec<f64>>) -> String {
    let c = &table.base;
    let mut s = String::new();
    writeln!(
        s,
        "# base frame: V0/E0 = {:?}, d = {:?} [1/k0], kappa d = {:?}",
        c.v0 / c.e0(),
        c.d,
        c.kappa().unwrap_or(f64::NAN) * c.d
    )
    .unwrap();
    writeln!(s, "# epsilon[1] {columns}").unwrap();
    let mut body = String::new();
    for r in &table.rows {
        match pick(r) {
            Some(v) => row_line(&mut body, &[[r.value].as_slice(), &v].concat()),
            None => skipped(&mut s, "epsilon", r),
        }
    }
    s + &body
}

/// Geometric-mean coefficient `c` of `y = c f(x)` over the points.
fn through_origin(points: &[(f64, f64)], f: impl Fn(f64) -> f64) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    let sum: f64 = points.iter().map(|&(x, y)| (y / f(x)).ln()).sum();
    Some((sum / points.len() as f64).exp())
}

/// `(kappa d, <tau>, Delta tau)` for rows where all three are known.
fn regime_points(table: &SweepTable) -> Vec<(f64, f64, f64)> {
    table
        .rows
        .iter()
        .filter_map(|r| Some((r.kappa_d?, r.mean_tau?, r.sd_tau?)))
        .filter(|&(_, m, s)| m > 0.0 && s > 0.0)
        .collect()
}

fn fig6(table: &SweepTable) -> String {
    let pts = regime_points(table);
    let thin: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 <= REGIME_SPLIT_KAPPA_D).map(|p| (p.1, p.2)).collect();
    let thick: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 >= REGIME_SPLIT_KAPPA_D).map(|p| (p.1, p.2)).collect();
    let fmt = |v: Option<f64>| v.map_or_else(|| "nan".into(), |x| format!("{x:?}"));
    let mut s = String::new();
    writeln!(s, "# delta_x = {:?} [1/k0], V0/E0 = {:?}", table.base.delta_x, table.base.v0 / table.base.e0()).unwrap();
    writeln!(
        s,
        "# wave-mode reference: Delta_tau = a <tau>, a = {} (kappa d <= {REGIME_SPLIT_KAPPA_D})",
        fmt(through_origin(&thin, |x| x))
    )
    .unwrap();
    writeln!(
        s,
        "# particle-mode reference: Delta_tau = b sqrt(<tau>), b = {} [1/k0] (kappa d >= {REGIME_SPLIT_KAPPA_D})",
        fmt(through_origin(&thick, f64::sqrt))
    )
    .unwrap();
    writeln!(
        s,
        "# log-log slopes: translucent = {}, opaque = {}",
        fmt(log_log_slope(&thin).ok()),
        fmt(log_log_slope(&thick).ok())
    )
    .unwrap();
    writeln!(s, "# <tau>[1/k0^2] Delta_tau[1/k0^2] kappa_d[1]").unwrap();
    for (kd, m, sd) in pts {
        row_line(&mut s, &[m, sd, kd]);
    }
    s
}

fn fig11(table: &SweepTable) -> String {
    let pts: Vec<(f64, f64, f64)> = table
        .rows
        .iter()
        .filter_map(|r| Some((r.value, r.mean_tau?, r.sd_tau?)))
        .filter(|&(_, m, s)| m > 0.0 && s > 0.0)
        .collect();
    let fmt = |v: Option<f64>| v.map_or_else(|| "nan".into(), |x| format!("{x:?}"));
    let hi = pts.iter().copied().max_by(|a, b| a.0.total_cmp(&b.0));
    let lo = pts.iter().copied().min_by(|a, b| a.0.total_cmp(&b.0));
    let c_w = hi.map(|(_, m, s)| s / m);
    let c_p = lo.map(|(e, m, s)| s / (e * m).sqrt());
    let mut s = String::new();
    writeln!(s, "# wave mode: Delta_tau~ = c_w <tau~>, c_w = {} (anchored at the largest eps)", fmt(c_w)).unwrap();
    writeln!(
        s,
        "# particle mode: Delta_tau~ = c_p sqrt(eps <tau~>), c_p = {} [1/k0] (anchored at the smallest eps)",
        fmt(c_p)
    )
    .unwrap();
    writeln!(s, "# crossover eps = {}", fmt(deviation_crossover(&pts).ok())).unwrap();
    writeln!(s, "# epsilon[1] Delta_tau~[1/k0^2] wave_ref[1/k0^2] particle_ref[1/k0^2]").unwrap();
    for r in &table.rows {
        if !pts.iter().any(|p| p.0 == r.value) {
            skipped(&mut s, "epsilon", r);
        }
    }
    for &(e, m, sd) in &pts {
        let w = c_w.map_or(f64::NAN, |c| c * m);
        let p = c_p.map_or(f64::NAN, |c| c * (e * m).sqrt());
        row_line(&mut s, &[e, sd, w, p]);
    }
    s
}
