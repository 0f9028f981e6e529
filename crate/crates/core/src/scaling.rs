//! Runs with a scaled Planck constant `hbar~ = eps hbar`.
//!
//! Substituting `X = x/eps`, `T = t/eps` turns the scaled equation into the
//! ordinary one with the barrier widened to `D = d/eps`. Mass, `V0` and `E0`
//! are fixed, so the X-frame packet keeps the base momentum and `kappa` is
//! unchanged while the effective opacity grows to `kappa d / eps`. Times
//! measured in the X-T frame map back as `tau~ = eps tau`.

use serde::{Deserialize, Serialize};

use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::stats::{moments, wkb_time_classical};

/// Largest grid the scaled frame may use before `dx` is coarsened.
pub const MAX_SCALED_POINTS: usize = 400_001;

pub const DEFAULT_EPSILONS: [f64; 8] = [1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub epsilon: f64,
    pub base: SimulationConfig,
}

impl ScalingSpec {
    pub fn new(epsilon: f64, base: SimulationConfig) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Domain(format!("epsilon must lie in (0, 1] (got {epsilon})")));
        }
        Ok(Self { epsilon, base })
    }

    pub fn hbar_tilde(&self) -> f64 {
        self.epsilon * self.base.hbar
    }

    /// `kappa D = kappa d / eps` in the X-T frame.
    pub fn effective_kappa_d(&self) -> Result<f64> {
        Ok(self.base.kappa()? * self.base.d / self.epsilon)
    }

    /// `sqrt(m / (2 (V0 - E0))) d`, independent of `eps`.
    pub fn tau_wkb_tilde(&self) -> Result<f64> {
        wkb_time_classical(&self.base.barrier()?, self.base.e0())
    }
}

/// Parameters of both frames, stored next to each scaled run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledFrame {
    pub epsilon: f64,
    pub hbar_tilde: f64,
    pub base_d: f64,
    pub base_dx: f64,
    pub base_dt: f64,
    pub scaled_d: f64,
    pub scaled_dx: f64,
    pub scaled_dt: f64,
    pub n_points: usize,
    pub effective_kappa_d: f64,
    /// True when `dx` was coarsened to respect [`MAX_SCALED_POINTS`].
    pub dx_coarsened: bool,
}

/// Ordinary-`hbar` config in the X-T frame. Lengths and times are divided
/// by `eps`; `m`, `V0`, `<p>` (hence `E0` and `k0`) are kept. The grid keeps
/// the base `dx`, so the resolution per wavelength is unchanged, unless that
/// would exceed [`MAX_SCALED_POINTS`].
pub fn scaled_config(spec: &ScalingSpec) -> Result<SimulationConfig> {
    Ok(scale(spec)?.0)
}

pub fn scaled_frame(spec: &ScalingSpec) -> Result<ScaledFrame> {
    Ok(scale(spec)?.1)
}

fn scale(spec: &ScalingSpec) -> Result<(SimulationConfig, ScaledFrame)> {
    let b = &spec.base;
    b.validate()?;
    let e = spec.epsilon;
    let mut c = b.clone();
    c.x_min = b.x_min / e;
    c.x_max = b.x_max / e;
    c.x_mean = b.x_mean / e;
    c.delta_x = b.delta_x / e;
    c.d = b.d / e;
    c.dt = b.dt / e;
    c.t_final = b.t_final.map(|t| t / e);
    c.tf_cap = b.tf_cap / e;
    let span = c.x_max - c.x_min;
    let mut coarsened = false;
    if (span / c.dx).round() as usize + 1 > MAX_SCALED_POINTS {
        c.dx = span / (MAX_SCALED_POINTS - 1) as f64;
        coarsened = true;
        log::warn!(
            "epsilon = {e}: grid capped at {MAX_SCALED_POINTS} points, dx coarsened to {} (fewer points per wavelength)",
            c.dx
        );
    }
    c.validate()?;
    let frame = ScaledFrame {
        epsilon: e,
        hbar_tilde: spec.hbar_tilde(),
        base_d: b.d,
        base_dx: b.dx,
        base_dt: b.dt,
        scaled_d: c.d,
        scaled_dx: c.dx,
        scaled_dt: c.dt,
        n_points: c.grid()?.n_points(),
        effective_kappa_d: spec.effective_kappa_d()?,
        dx_coarsened: coarsened,
    };
    Ok((c, frame))
}

/// `tau~ = eps tau`, element by element.
pub fn unscale_times(times: &[f64], epsilon: f64) -> Vec<f64> {
    times.iter().map(|t| epsilon * t).collect()
}

/// Where the two deviation laws cross.
///
/// Each point is `(eps, <tau~>, Delta tau~)`. The wave-mode law
/// `Delta tau~ = c_w <tau~>` is anchored at the largest `eps`, the particle-mode
/// law `Delta tau~ = c_p sqrt(eps <tau~>)` at the smallest; the result is the
/// `eps` where the two predictions are equal, interpolated linearly in
/// `ln eps` between neighbouring points.
pub fn deviation_crossover(points: &[(f64, f64, f64)]) -> Result<f64> {
    let mut pts: Vec<(f64, f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(e, m, s)| e > 0.0 && m > 0.0 && s > 0.0)
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewSamples { need: 3, got: pts.len() });
    }
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (e_hi, m_hi, s_hi) = pts[0];
    let (e_lo, m_lo, s_lo) = pts[pts.len() - 1];
    let c_w = s_hi / m_hi;
    let c_p = s_lo / (e_lo * m_lo).sqrt();
    // g < 0 where the wave law predicts less spread than the particle law.
    let g = |(e, m, _): (f64, f64, f64)| (c_w * m).ln() - (c_p * (e * m).sqrt()).ln();
    for w in pts.windows(2) {
        let (g0, g1) = (g(w[0]), g(w[1]));
        if g0 == 0.0 {
            return Ok(w[0].0);
        }
        if g0.signum() != g1.signum() {
            let (l0, l1) = (w[0].0.ln(), w[1].0.ln());
            return Ok((l0 + g0 / (g0 - g1) * (l1 - l0)).exp());
        }
    }
    Err(Error::Degenerate(format!(
        "deviation laws do not cross within eps in [{e_lo}, {e_hi}]"
    )))
}

/// `(<tau~>, Delta tau~)` from X-frame times.
pub fn scaled_moments(times_xt: &[f64], epsilon: f64) -> Result<(f64, f64)> {
    moments(&unscale_times(times_xt, epsilon))
}
