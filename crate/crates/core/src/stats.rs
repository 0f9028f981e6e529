//! Tunneling-time statistics: histogram, moments, Gamma fits and the regime
//! diagnostics built on them.
//!
//! The Gamma family is parameterized as
//! `P(tau) = tau^alpha exp(-tau/beta) / (beta^(alpha+1) Gamma(alpha+1))`,
//! so the mean is `beta (alpha+1)` and the variance `beta^2 (alpha+1)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::config::Weighting;
use crate::error::{Error, Result};
use crate::field::BarrierSpec;
use crate::rng::PathStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelingHistogram {
    pub bin_width: f64,
    pub t_min: f64,
    pub counts: Vec<u64>,
    pub n_transmitted: u64,
}

impl TunnelingHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.t_min + (i as f64 + 0.5) * self.bin_width
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins()).map(|i| self.center(i)).collect()
    }

    /// `counts / (n_transmitted * bin_width)`: a unit-area density over the
    /// transmitted paths.
    pub fn heights(&self) -> Vec<f64> {
        let norm = self.n_transmitted as f64 * self.bin_width;
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    /// Heights divided by the total ensemble size instead, `dn / (N dtau)`.
    pub fn heights_per_ensemble(&self, n_total: usize) -> Vec<f64> {
        let norm = n_total as f64 * self.bin_width;
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    pub fn non_empty_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Index of the tallest bin.
    pub fn mode_bin(&self) -> usize {
        self.counts
            .iter()
            .enumerate()
            .max_by_key(|&(i, &c)| (c, std::cmp::Reverse(i)))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// `max(20, ceil(sqrt(n)))`.
pub fn default_bins(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(20)
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::Domain(format!("tunneling time {t} is not a finite non-negative value")));
    }
    Ok(())
}

/// Equal-width bins on `[0, max * (1 + 1e-9)]`.
pub fn build_histogram(times: &[f64], bins: usize) -> Result<TunnelingHistogram> {
    if times.is_empty() {
        return Err(Error::NoTransmittedPaths);
    }
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    check_times(times)?;
    let max = times.iter().cloned().fold(0.0, f64::max);
    let upper = if max > 0.0 { max * (1.0 + 1e-9) } else { 1.0 };
    let width = upper / bins as f64;
    let mut counts = vec![0u64; bins];
    for &t in times {
        let i = ((t / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    Ok(TunnelingHistogram {
        bin_width: width,
        t_min: 0.0,
        counts,
        n_transmitted: times.len() as u64,
    })
}

/// Sample mean and standard deviation (`n - 1` denominator).
pub fn moments(times: &[f64]) -> Result<(f64, f64)> {
    if times.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: times.len() });
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

/// Sample skewness (biased, `m3 / m2^1.5`).
pub fn skewness(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::TooFewSamples { need: 3, got: times.len() });
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let m2 = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
    let m3 = times.iter().map(|t| (t - mean).powi(3)).sum::<f64>() / n;
    if m2 == 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok(m3 / m2.powf(1.5))
}

fn check_params(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "gamma parameters must be positive (alpha={alpha}, beta={beta})"
        )));
    }
    Ok(())
}

#[inline]
fn gamma_pdf_raw(alpha: f64, beta: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let k = alpha + 1.0;
    (alpha * tau.ln() - tau / beta - k * beta.ln() - ln_gamma(k)).exp()
}

pub fn gamma_pdf(alpha: f64, beta: f64, tau: f64) -> Result<f64> {
    check_params(alpha, beta)?;
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive (got {tau})")));
    }
    Ok(gamma_pdf_raw(alpha, beta, tau))
}

/// `(beta (alpha+1), beta sqrt(alpha+1))`.
pub fn gamma_moments(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    check_params(alpha, beta)?;
    Ok((beta * (alpha + 1.0), beta * (alpha + 1.0).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitKind {
    LeastSquares,
    Mle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub alpha: f64,
    pub beta: f64,
    /// Sum of squared residuals (least squares) or negative mean
    /// log-likelihood (MLE) at the optimum.
    pub residual: f64,
    pub method: FitKind,
    pub iterations: usize,
    /// Standard errors when available (Fisher information for MLE,
    /// bootstrap when requested).
    pub alpha_se: Option<f64>,
    pub beta_se: Option<f64>,
}

impl GammaFit {
    pub fn implied_mean(&self) -> f64 {
        self.beta * (self.alpha + 1.0)
    }

    pub fn implied_sd(&self) -> f64 {
        self.beta * (self.alpha + 1.0).sqrt()
    }
}

/// Bounded Nelder-Mead on two variables.
struct NelderMead {
    max_iter: usize,
    f_tol: f64,
    x_tol: f64,
}

struct NmResult {
    x: [f64; 2],
    f: f64,
    iterations: usize,
    converged: bool,
}

impl NelderMead {
    fn minimize(&self, f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64) -> NmResult {
        let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
        let mut values = simplex.map(&f);
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            iterations += 1;
            let mut order = [0usize, 1, 2];
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.map(|i| simplex[i]);
            values = order.map(|i| values[i]);

            let spread = (values[2] - values[0]).abs();
            let size = simplex[1..]
                .iter()
                .map(|p| (p[0] - simplex[0][0]).abs().max((p[1] - simplex[0][1]).abs()))
                .fold(0.0, f64::max);
            if spread <= self.f_tol * (values[0].abs() + 1e-300) + 1e-300 && size < self.x_tol {
                converged = true;
                break;
            }

            let centroid = [
                0.5 * (simplex[0][0] + simplex[1][0]),
                0.5 * (simplex[0][1] + simplex[1][1]),
            ];
            let along = |t: f64| {
                [
                    centroid[0] + t * (simplex[2][0] - centroid[0]),
                    centroid[1] + t * (simplex[2][1] - centroid[1]),
                ]
            };
            let reflected = along(-1.0);
            let fr = f(reflected);
            if fr < values[0] {
                let expanded = along(-2.0);
                let fe = f(expanded);
                if fe < fr {
                    simplex[2] = expanded;
                    values[2] = fe;
                } else {
                    simplex[2] = reflected;
                    values[2] = fr;
                }
            } else if fr < values[1] {
                simplex[2] = reflected;
                values[2] = fr;
            } else {
                let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
                let fc = f(contracted);
                if fc < values[2].min(fr) {
                    simplex[2] = contracted;
                    values[2] = fc;
                } else {
                    for i in 1..3 {
                        simplex[i] = [
                            simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                            simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                        ];
                        values[i] = f(simplex[i]);
                    }
                }
            }
        }
        let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
        NmResult {
            x: simplex[best],
            f: values[best],
            iterations,
            converged,
        }
    }
}

/// Shape beyond which a fit is treated as a point mass.
const ALPHA_DIVERGED: f64 = 1e6;

/// Method-of-moments start: invert `<tau> = beta (alpha+1)`,
/// `Delta tau^2 = beta^2 (alpha+1)`.
fn moment_start(mean: f64, var: f64) -> (f64, f64) {
    let beta = (var / mean).max(1e-12);
    let alpha = (mean * mean / var - 1.0).max(0.1);
    (alpha, beta)
}

/// Least-squares fit of the Gamma density to the normalized histogram
/// heights, searched over `(ln alpha, ln beta)`.
pub fn fit_gamma_least_squares(hist: &TunnelingHistogram, weighting: Weighting) -> Result<GammaFit> {
    let filled = hist.non_empty_bins();
    if filled < 5 {
        return Err(Error::Degenerate(format!(
            "least-squares fit needs at least 5 non-empty bins, histogram has {filled}"
        )));
    }
    let centers = hist.centers();
    let heights = hist.heights();
    let norm = hist.n_transmitted as f64 * hist.bin_width;
    let weights: Vec<f64> = match weighting {
        Weighting::Unweighted => vec![1.0; hist.bins()],
        // Poisson variance of a height: counts / norm^2 (floored at one count).
        Weighting::Poisson => hist.counts.iter().map(|&c| norm * norm / (c.max(1) as f64)).collect(),
    };

    // histogram moments for the start point
    let total: f64 = heights.iter().sum::<f64>() * hist.bin_width;
    let mean = centers.iter().zip(&heights).map(|(c, h)| c * h).sum::<f64>() * hist.bin_width / total;
    let var = centers
        .iter()
        .zip(&heights)
        .map(|(c, h)| (c - mean).powi(2) * h)
        .sum::<f64>()
        * hist.bin_width
        / total;
    let var = var.max(hist.bin_width * hist.bin_width / 12.0);
    let (a0, b0) = moment_start(mean, var);

    let objective = |p: [f64; 2]| {
        let (alpha, beta) = (p[0].exp(), p[1].exp());
        if !alpha.is_finite() || !beta.is_finite() || alpha > ALPHA_DIVERGED {
            return f64::MAX;
        }
        centers
            .iter()
            .zip(&heights)
            .zip(&weights)
            .map(|((&c, &h), &w)| w * (h - gamma_pdf_raw(alpha, beta, c)).powi(2))
            .sum::<f64>()
    };
    let nm = NelderMead {
        max_iter: 4000,
        f_tol: 1e-12,
        x_tol: 1e-9,
    };
    let mut best = nm.minimize(objective, [a0.ln(), b0.ln()], 0.2);
    let mut iterations = best.iterations;
    // one restart from the optimum guards against a collapsed simplex
    if best.converged {
        let again = nm.minimize(objective, best.x, 0.05);
        iterations += again.iterations;
        if again.f <= best.f {
            best = NmResult { iterations: again.iterations, ..again };
        }
    }
    let (alpha, beta) = (best.x[0].exp(), best.x[1].exp());
    if !best.converged {
        return Err(Error::FitNonConvergence { iterations, alpha, beta });
    }
    if alpha >= 0.5 * ALPHA_DIVERGED {
        return Err(Error::Degenerate(format!("shape parameter diverged (alpha={alpha})")));
    }
    Ok(GammaFit {
        alpha,
        beta,
        residual: best.f,
        method: FitKind::LeastSquares,
        iterations,
        alpha_se: None,
        beta_se: None,
    })
}

/// Trigamma by recurrence up to `x >= 12` and the asymptotic series.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x + x2 / 2.0
        + (1.0 / x) * x2 * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 * (1.0 / 30.0))))
}

/// Maximum-likelihood Gamma fit. Solves `ln k - digamma(k) = ln(mean) -
/// mean(ln tau)` for the shape `k = alpha + 1` by Newton iteration.
pub fn fit_gamma_mle(times: &[f64]) -> Result<GammaFit> {
    if times.len() < 10 {
        return Err(Error::TooFewSamples { need: 10, got: times.len() });
    }
    if let Some(t) = times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::Domain(format!("MLE needs positive times (got {t})")));
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let mean_ln = times.iter().map(|t| t.ln()).sum::<f64>() / n;
    let s = mean.ln() - mean_ln;
    if !(s > 1e-12) {
        return Err(Error::Degenerate("all samples equal; the shape parameter diverges".into()));
    }
    let mut k = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < 100 {
        iterations += 1;
        let f = k.ln() - digamma(k) - s;
        let df = 1.0 / k - trigamma(k);
        // Newton in ln k keeps the iterate positive
        let step = f / (df * k);
        let next = k * (-step).exp();
        if (next - k).abs() <= 1e-13 * k {
            k = next;
            converged = true;
            break;
        }
        k = next;
    }
    let beta = mean / k;
    let alpha = k - 1.0;
    if !converged {
        return Err(Error::FitNonConvergence { iterations, alpha, beta });
    }
    if alpha <= 0.0 {
        return Err(Error::Domain(format!("MLE shape alpha={alpha} is not positive")));
    }
    // Fisher information of (k, beta) per sample: [[trigamma(k), 1/beta], [1/beta, k/beta^2]]
    let (i11, i12, i22) = (trigamma(k), 1.0 / beta, k / (beta * beta));
    let det = n * (i11 * i22 - i12 * i12);
    let nll = -(alpha * mean_ln - mean / beta - k * beta.ln() - ln_gamma(k));
    Ok(GammaFit {
        alpha,
        beta,
        residual: nll,
        method: FitKind::Mle,
        iterations,
        alpha_se: Some((i22 / det).sqrt()),
        beta_se: Some((i11 / det).sqrt()),
    })
}

/// Bootstrap standard errors `(alpha, beta)` of the least-squares fit,
/// resampling `times` with replacement `n_boot` times.
pub fn bootstrap_least_squares(
    times: &[f64],
    bins: Option<usize>,
    weighting: Weighting,
    n_boot: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let n = times.len();
    let nb = bins.unwrap_or_else(|| default_bins(n));
    let mut alphas = Vec::with_capacity(n_boot);
    let mut betas = Vec::with_capacity(n_boot);
    let mut sample = vec![0.0; n];
    for b in 0..n_boot {
        let stream = PathStream::new(seed, b as u64);
        for (j, slot) in sample.iter_mut().enumerate() {
            let u = stream.uniform(j as u64, 0);
            *slot = times[((u * n as f64) as usize).min(n - 1)];
        }
        if let Ok(fit) = fit_gamma_least_squares(&build_histogram(&sample, nb)?, weighting) {
            alphas.push(fit.alpha);
            betas.push(fit.beta);
        }
    }
    if alphas.len() < 2 {
        return Err(Error::Degenerate("bootstrap produced fewer than two fits".into()));
    }
    Ok((moments(&alphas)?.1, moments(&betas)?.1))
}

/// `kappa d` dividing the translucent (below) and opaque (above) regimes.
pub const REGIME_SPLIT_KAPPA_D: f64 = 2.0;

/// `m d / (hbar kappa)`.
pub fn wkb_time(barrier: &BarrierSpec, e0: f64) -> Result<f64> {
    let kappa = barrier.kappa(e0)?;
    Ok(barrier.m * barrier.d / (barrier.hbar * kappa))
}

/// `sqrt(m / (2 (V0 - E0))) d`, the same time written in classical terms.
pub fn wkb_time_classical(barrier: &BarrierSpec, e0: f64) -> Result<f64> {
    if e0 >= barrier.v0 {
        return Err(Error::AboveBarrier { e0, v0: barrier.v0 });
    }
    Ok((barrier.m / (2.0 * (barrier.v0 - e0))).sqrt() * barrier.d)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::TooFewSamples { need: 3, got: points.len() });
    }
    if let Some(p) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Domain(format!("log-log slope needs positive values (got {p:?})")));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Slope of `ln Delta tau` versus `ln <tau>` over `(mean, deviation)` points.
pub fn regime_slope(points: &[(f64, f64)]) -> Result<f64> {
    log_log_slope(points)
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value `sqrt(-ln(a/2)/2) / sqrt(n)` at level `a`.
pub fn ks_critical(n: usize, level: f64) -> f64 {
    (-0.5 * (0.5 * level).ln()).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn histogram_partitions_samples() {
        let h = build_histogram(&[1.0, 1.0, 3.0], 2).unwrap();
        assert_eq!(h.counts, vec![2, 1]);
        assert_eq!(h.n_transmitted, 3);
        assert!(matches!(build_histogram(&[], 4), Err(Error::NoTransmittedPaths)));
        assert!(build_histogram(&[1.0, -1.0], 4).is_err());
        let area: f64 = h.heights().iter().sum::<f64>() * h.bin_width;
        assert_abs_diff_eq!(area, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn default_bin_rule() {
        assert_eq!(default_bins(10), 20);
        assert_eq!(default_bins(10_000), 100);
        assert_eq!(default_bins(10_001), 101);
    }

    #[test]
    fn moments_small_cases() {
        assert_eq!(moments(&[2.0, 2.0, 2.0]).unwrap(), (2.0, 0.0));
        let (m, s) = moments(&[0.0, 2.0]).unwrap();
        assert_eq!(m, 1.0);
        assert_abs_diff_eq!(s, 2f64.sqrt(), epsilon = 1e-15);
        assert!(moments(&[1.0]).is_err());
    }

    #[test]
    fn gamma_pdf_limits_and_mode() {
        let beta = 0.7;
        for tau in [0.1, 1.0, 3.0] {
            let p = gamma_pdf(1e-12, beta, tau).unwrap();
            assert_abs_diff_eq!(p, (-tau / beta).exp() / beta, epsilon = 1e-9);
        }
        let (a, b) = (11.3, 0.79);
        let mode = a * b;
        let p0 = gamma_pdf(a, b, mode).unwrap();
        assert!(p0 > gamma_pdf(a, b, mode * 1.001).unwrap());
        assert!(p0 > gamma_pdf(a, b, mode * 0.999).unwrap());
        assert!(gamma_pdf(0.0, 1.0, 1.0).is_err());
        assert!(gamma_pdf(1.0, -1.0, 1.0).is_err());
        assert!(gamma_pdf(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn gamma_moment_values() {
        let (m, s) = gamma_moments(11.3, 0.79).unwrap();
        assert_abs_diff_eq!(m, 9.717, epsilon = 1e-3);
        assert_abs_diff_eq!(s, 2.771, epsilon = 1e-3);
        let (m, s) = gamma_moments(1e-14, 2.0).unwrap();
        assert_abs_diff_eq!(m, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn trigamma_known_values() {
        assert_abs_diff_eq!(trigamma(1.0), std::f64::consts::PI.powi(2) / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trigamma(0.5), std::f64::consts::PI.powi(2) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trigamma(10.0), 0.10516633568168575, epsilon = 1e-13);
    }

    #[test]
    fn point_mass_is_degenerate() {
        let times = vec![4.2; 1000];
        let h = build_histogram(&times, 30).unwrap();
        assert!(fit_gamma_least_squares(&h, Weighting::Unweighted).is_err());
        assert!(matches!(fit_gamma_mle(&times), Err(Error::Degenerate(_))));
        assert!(fit_gamma_mle(&times[..5]).is_err());
    }

    #[test]
    fn wkb_forms_agree() {
        let b = BarrierSpec::new(1.0, 10.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(wkb_time(&b, 0.5).unwrap(), 10.0, epsilon = 1e-12);
        for (v0, d, m, e0) in [(1.0, 3.0, 1.0, 0.2), (2.5, 0.4, 2.0, 1.1), (7.0, 12.0, 0.5, 6.9)] {
            let b = BarrierSpec::new(v0, d, m, 1.0).unwrap();
            assert_abs_diff_eq!(wkb_time(&b, e0).unwrap(), wkb_time_classical(&b, e0).unwrap(), epsilon = 1e-12);
        }
        assert!(matches!(wkb_time(&b, 1.0), Err(Error::AboveBarrier { .. })));
        // d -> 0
        let b = BarrierSpec { d: 0.0, ..b };
        assert_eq!(wkb_time_classical(&b, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn slopes_of_power_laws() {
        let lin: Vec<_> = (1..8).map(|i| (i as f64, 0.3 * i as f64)).collect();
        assert_abs_diff_eq!(regime_slope(&lin).unwrap(), 1.0, epsilon = 1e-9);
        let sq: Vec<_> = (1..8).map(|i| (i as f64, 1.7 * (i as f64).sqrt())).collect();
        assert_abs_diff_eq!(regime_slope(&sq).unwrap(), 0.5, epsilon = 1e-9);
        assert!(regime_slope(&lin[..2]).is_err());
        assert!(regime_slope(&[(1.0, 1.0), (0.0, 2.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert_abs_diff_eq!(d, 0.5 / n as f64, epsilon = 1e-12);
        assert_abs_diff_eq!(ks_critical(10_000, 0.01), 0.016276, epsilon = 1e-6);
    }
}
