//! Osmotic and current velocities extracted from a wavefunction snapshot.
//!
//! `u + i v = (hbar/m) d/dx ln psi`. Both parts are central differences
//! divided by the regularized density `rho_reg = max(|psi|^2, delta_reg * max|psi|^2)`, which
//! sidesteps the branch cut of the complex logarithm and keeps nodes finite.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::WaveState;

pub const DEFAULT_DELTA_REG: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSample {
    pub u: f64,
    pub v: f64,
    pub total: f64,
}

impl DriftSample {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v, total: u + v }
    }
}

pub fn max_density(state: &WaveState) -> f64 {
    state.psi.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max)
}

/// `max(|psi_i|^2, delta_reg * max_j |psi_j|^2)`.
pub fn regularized_density(state: &WaveState, i: usize, delta_reg: f64) -> Result<f64> {
    let peak = max_density(state);
    if !(peak > 0.0) {
        return Err(Error::Domain("wave state is identically zero".into()));
    }
    Ok(state.psi[i].norm_sqr().max(delta_reg * peak))
}

/// `(u, v) * m/hbar` at grid index `i`. The real part uses the density
/// gradient `rho'/(2 rho)`, which equals `Re psi'/psi` but carries no
/// oscillatory truncation error from the phase.
#[inline]
fn log_derivative(psi: &[Complex64], i: usize, inv_2dx: f64, floor: f64) -> (f64, f64) {
    let n = psi.len();
    if i == 0 || i + 1 >= n {
        return (0.0, 0.0);
    }
    let rho = psi[i].norm_sqr().max(floor);
    let drho = (psi[i + 1].norm_sqr() - psi[i - 1].norm_sqr()) * inv_2dx;
    let dpsi = (psi[i + 1] - psi[i - 1]) * inv_2dx;
    (0.5 * drho / rho, (psi[i].conj() * dpsi).im / rho)
}

/// Velocities tabulated on grid indices `lo..=hi` of one snapshot.
#[derive(Debug, Clone)]
pub struct DriftField {
    x_min: f64,
    dx: f64,
    lo: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    cap: f64,
}

impl DriftField {
    /// Full-grid table.
    pub fn new(state: &WaveState, hbar: f64, m: f64, delta_reg: f64, cap: f64) -> Result<Self> {
        let n = state.grid.n_points();
        Self::over_range(state, hbar, m, delta_reg, cap, 0, n - 1)
    }

    /// Table restricted to `lo..=hi` (clamped to the grid). Evaluations must
    /// stay inside `[x_lo, x_hi]` of that range.
    pub fn over_range(
        state: &WaveState,
        hbar: f64,
        m: f64,
        delta_reg: f64,
        cap: f64,
        lo: usize,
        hi: usize,
    ) -> Result<Self> {
        Self::over_range_with_peak(state, max_density(state), hbar, m, delta_reg, cap, lo, hi)
    }

    /// As [`DriftField::over_range`] with `max |psi|^2` supplied by the caller.
    #[allow(clippy::too_many_arguments)]
    pub fn over_range_with_peak(
        state: &WaveState,
        peak: f64,
        hbar: f64,
        m: f64,
        delta_reg: f64,
        cap: f64,
        lo: usize,
        hi: usize,
    ) -> Result<Self> {
        if !(peak > 0.0) {
            return Err(Error::Domain("wave state is identically zero".into()));
        }
        let n = state.grid.n_points();
        let hi = hi.min(n - 1);
        let lo = lo.min(hi);
        let floor = delta_reg * peak;
        let inv_2dx = 0.5 / state.grid.dx();
        let scale = hbar / m;
        let mut u = Vec::with_capacity(hi - lo + 1);
        let mut v = Vec::with_capacity(hi - lo + 1);
        for i in lo..=hi {
            let (lu, lv) = log_derivative(&state.psi, i, inv_2dx, floor);
            u.push(lu * scale);
            v.push(lv * scale);
        }
        Ok(Self {
            x_min: state.grid.x_min(),
            dx: state.grid.dx(),
            lo,
            u,
            v,
            cap,
        })
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    fn x_lo(&self) -> f64 {
        self.x_min + self.lo as f64 * self.dx
    }

    fn x_hi(&self) -> f64 {
        self.x_min + (self.lo + self.u.len() - 1) as f64 * self.dx
    }

    /// Raw (uncapped) grid value at absolute index `i`.
    pub fn at_index(&self, i: usize) -> DriftSample {
        DriftSample::new(self.u[i - self.lo], self.v[i - self.lo])
    }

    /// Linear interpolation in `x`, then the per-component cap. The flag is
    /// true when either component was clipped.
    #[inline]
    pub fn sample(&self, x: f64) -> Result<(DriftSample, bool)> {
        let (lo, hi) = (self.x_lo(), self.x_hi());
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain { x, x_min: lo, x_max: hi });
        }
        Ok(self.sample_unchecked(x))
    }

    #[inline]
    pub(crate) fn sample_unchecked(&self, x: f64) -> (DriftSample, bool) {
        let s = (x - self.x_min) / self.dx - self.lo as f64;
        let last = self.u.len() - 1;
        let j = (s.floor().max(0.0) as usize).min(last.saturating_sub(1));
        let f = (s - j as f64).clamp(0.0, 1.0);
        let (u, v) = if last == 0 {
            (self.u[0], self.v[0])
        } else {
            (
                self.u[j] + f * (self.u[j + 1] - self.u[j]),
                self.v[j] + f * (self.v[j + 1] - self.v[j]),
            )
        };
        let uc = u.clamp(-self.cap, self.cap);
        let vc = v.clamp(-self.cap, self.cap);
        (DriftSample::new(uc, vc), uc != u || vc != v)
    }
}

/// Drift at an arbitrary interior point of `state`, without a cap.
pub fn drift_at(state: &WaveState, x: f64, hbar: f64, m: f64) -> Result<DriftSample> {
    let g = &state.grid;
    if !(x >= g.x_min() && x <= g.x_max()) {
        return Err(Error::OutOfDomain {
            x,
            x_min: g.x_min(),
            x_max: g.x_max(),
        });
    }
    let i = (((x - g.x_min()) / g.dx()).floor() as usize).min(g.n_points() - 2);
    let field = DriftField::over_range(state, hbar, m, DEFAULT_DELTA_REG, f64::INFINITY, i, i + 1)?;
    Ok(field.sample_unchecked(x).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{init_gaussian, Grid1D, PacketSpec};

    fn gaussian() -> (WaveState, PacketSpec) {
        let g = Grid1D::with_spacing(-1000.0, 1000.0, 0.1).unwrap();
        let p = PacketSpec::new(-500.0, 1.0, 50.0, 1.0).unwrap();
        (init_gaussian(&p, &g, 1.0).unwrap(), p)
    }

    // Analytic log-derivative of the initial packet:
    // u = -hbar (x - <x>) / (2 m dx^2), v = <p>/m.
    fn analytic(p: &PacketSpec, x: f64) -> (f64, f64) {
        (-(x - p.x_mean) / (2.0 * p.delta_x * p.delta_x), p.p_mean)
    }

    #[test]
    fn gaussian_center_and_offset() {
        let (s, _) = gaussian();
        let d = drift_at(&s, -500.0, 1.0, 1.0).unwrap();
        assert!(d.u.abs() < 1e-9);
        assert!((d.v - 1.0).abs() < 5e-3);
        let d = drift_at(&s, -400.0, 1.0, 1.0).unwrap();
        let expect_u = -1.0 / 50.0;
        assert!((d.u / expect_u - 1.0).abs() < 5e-3, "u {}", d.u);
        assert!((d.v - 1.0).abs() < 5e-3);
        assert_eq!(d.total, d.u + d.v);
    }

    #[test]
    fn matches_analytic_where_density_is_resolved() {
        let (s, p) = gaussian();
        let field = DriftField::new(&s, 1.0, 1.0, DEFAULT_DELTA_REG, f64::INFINITY).unwrap();
        let peak = s.psi.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
        let mut checked = 0;
        for i in 1..s.grid.n_points() - 1 {
            if s.density(i) < 1e-6 * peak {
                continue;
            }
            let x = s.grid.x(i);
            let (ua, va) = analytic(&p, x);
            let d = field.at_index(i);
            assert!((d.v - va).abs() <= 5e-3 * va.abs(), "v at {x}: {}", d.v);
            assert!((d.u - ua).abs() <= 5e-3 * ua.abs().max(1e-12) + 1e-12, "u at {x}: {} vs {ua}", d.u);
            checked += 1;
        }
        assert!(checked > 1000);
    }

    #[test]
    fn real_state_has_no_current() {
        let (mut s, _) = gaussian();
        s.psi.iter_mut().for_each(|c| *c = Complex64::new(c.norm(), 0.0));
        let field = DriftField::new(&s, 1.0, 1.0, DEFAULT_DELTA_REG, f64::INFINITY).unwrap();
        for i in (1..s.grid.n_points() - 1).step_by(37) {
            assert_eq!(field.at_index(i).v, 0.0);
        }
    }

    #[test]
    fn osmotic_velocity_averages_to_zero() {
        let (s, _) = gaussian();
        let field = DriftField::new(&s, 1.0, 1.0, DEFAULT_DELTA_REG, f64::INFINITY).unwrap();
        let integral: f64 = (0..s.grid.n_points())
            .map(|i| field.at_index(i).u * s.density(i))
            .sum::<f64>()
            * s.grid.dx();
        assert!(integral.abs() < 1e-6, "{integral}");
    }

    #[test]
    fn regularized_density_floor() {
        let g = Grid1D::new(0.0, 1.0, 3).unwrap();
        let mut s = WaveState {
            grid: g,
            psi: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5f64.sqrt(), 0.0)],
            t: 0.0,
        };
        assert_eq!(regularized_density(&s, 0, 1e-12).unwrap(), 1e-12);
        assert!((regularized_density(&s, 2, 1e-12).unwrap() - 0.5).abs() < 1e-15);
        s.psi.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        assert!(regularized_density(&s, 1, 1e-12).is_err());
    }

    #[test]
    fn cap_clips_and_flags() {
        let (s, _) = gaussian();
        let field = DriftField::new(&s, 1.0, 1.0, DEFAULT_DELTA_REG, 0.5).unwrap();
        let (d, capped) = field.sample(-500.0).unwrap();
        assert!(capped);
        assert_eq!(d.v, 0.5);
        let field = DriftField::new(&s, 1.0, 1.0, DEFAULT_DELTA_REG, 10.0).unwrap();
        assert!(!field.sample(-500.0).unwrap().1);
    }

    #[test]
    fn outside_grid_is_an_error() {
        let (s, _) = gaussian();
        assert!(matches!(drift_at(&s, 1500.0, 1.0, 1.0), Err(Error::OutOfDomain { .. })));
        let field = DriftField::over_range(&s, 1.0, 1.0, DEFAULT_DELTA_REG, 10.0, 100, 200).unwrap();
        assert!(field.sample(s.grid.x(150)).is_ok());
        assert!(field.sample(s.grid.x(250)).is_err());
    }
}
