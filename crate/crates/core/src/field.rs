//! Spatial grid, rectangular barrier, Gaussian wave packet and the
//! Crank-Nicolson propagator for the one-dimensional Schrödinger equation.
//!
//! Lengths are in units of `1/k0`, times in `1/k0^2`, with `m = hbar = 1`
//! unless a [`BarrierSpec`] says otherwise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Uniform grid `x_i = x_min + i*dx`, `i = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Config(format!(
                "grid bounds must satisfy x_min < x_max (got {x_min}, {x_max})"
            )));
        }
        if n_points < 3 {
            return Err(Error::Config(format!(
                "grid needs at least 3 points (got {n_points})"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx: (x_max - x_min) / (n_points - 1) as f64,
        })
    }

    /// Grid with spacing as close as possible to `dx` (rounded point count).
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::Config(format!("grid spacing must be positive (got {dx})")));
        }
        let n = ((x_max - x_min) / dx).round() as usize + 1;
        Self::new(x_min, x_max, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

/// Rectangular barrier of height `v0` on `[-d/2, d/2]`, with the particle
/// mass and Planck constant that go with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub v0: f64,
    pub d: f64,
    pub m: f64,
    pub hbar: f64,
}

impl BarrierSpec {
    pub fn new(v0: f64, d: f64, m: f64, hbar: f64) -> Result<Self> {
        let b = Self { v0, d, m, hbar };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, val) in [("v0", self.v0), ("d", self.d), ("m", self.m), ("hbar", self.hbar)] {
            if !(val > 0.0) || !val.is_finite() {
                return Err(Error::Config(format!("barrier {name} must be positive (got {val})")));
            }
        }
        Ok(())
    }

    /// Θ(x): closed interval `[-d/2, d/2]`.
    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        let half = 0.5 * self.d;
        (-half..=half).contains(&x)
    }

    /// Decay constant `sqrt(2m(V0 - E))/hbar` under the barrier.
    pub fn kappa(&self, e0: f64) -> Result<f64> {
        if e0 >= self.v0 {
            return Err(Error::AboveBarrier { e0, v0: self.v0 });
        }
        Ok((2.0 * self.m * (self.v0 - e0)).sqrt() / self.hbar)
    }

    /// Plane-wave transmission coefficient at energy `e < V0`:
    /// `1 / (1 + V0^2 sinh^2(kappa d) / (4 E (V0 - E)))`.
    pub fn transmission(&self, e: f64) -> Result<f64> {
        if !(e > 0.0) {
            return Err(Error::Domain(format!("energy must be positive (got {e})")));
        }
        let kd = self.kappa(e)? * self.d;
        let s = kd.sinh();
        Ok(1.0 / (1.0 + self.v0 * self.v0 * s * s / (4.0 * e * (self.v0 - e))))
    }
}

/// Initial Gaussian wave packet parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub x_mean: f64,
    pub p_mean: f64,
    pub delta_x: f64,
    e0: f64,
}

impl PacketSpec {
    pub fn new(x_mean: f64, p_mean: f64, delta_x: f64, m: f64) -> Result<Self> {
        if !(delta_x > 0.0) {
            return Err(Error::Config(format!("packet width must be positive (got {delta_x})")));
        }
        if !(m > 0.0) {
            return Err(Error::Config(format!("mass must be positive (got {m})")));
        }
        Ok(Self {
            x_mean,
            p_mean,
            delta_x,
            e0: p_mean * p_mean / (2.0 * m),
        })
    }

    /// Kinetic energy of the mean momentum, `<p>^2 / 2m`.
    pub fn e0(&self) -> f64 {
        self.e0
    }
}

/// Potential sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl PotentialField {
    pub fn zero(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_points()],
        }
    }
}

/// Rectangular barrier on `grid`, each point weighted by the fraction of its
/// cell `[x - dx/2, x + dx/2]` inside `[-d/2, d/2]`. The discrete barrier then
/// has width exactly `d` for any alignment; a point sitting on an edge gets `V0/2`.
pub fn rect_potential(barrier: &BarrierSpec, grid: &Grid1D) -> Result<PotentialField> {
    barrier.validate()?;
    let half = 0.5 * barrier.d;
    if -half <= grid.x_min() || half >= grid.x_max() {
        return Err(Error::Config(format!(
            "barrier [-{half}, {half}] does not fit inside grid [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let dx = grid.dx();
    let values = grid
        .points()
        .map(|x| {
            let overlap = ((x + 0.5 * dx).min(half) - (x - 0.5 * dx).max(-half)).max(0.0);
            let mut frac = (overlap / dx).min(1.0);
            // absorb rounding in x_min + i*dx so aligned edges give exact halves
            let snapped = (2.0 * frac).round() / 2.0;
            if (frac - snapped).abs() < 1e-9 {
                frac = snapped;
            }
            barrier.v0 * frac
        })
        .collect();
    Ok(PotentialField { grid: *grid, values })
}

/// Complex wavefunction on a grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub grid: Grid1D,
    pub psi: Vec<Complex64>,
    pub t: f64,
}

impl WaveState {
    pub fn density(&self, i: usize) -> f64 {
        self.psi[i].norm_sqr()
    }

    /// Discrete norm `sum |psi_i|^2 dx`.
    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// `sum_{a <= x_i <= b} |psi_i|^2 dx`, clamped to the grid.
    /// `int_a^b |psi|^2 dx`, each point weighted by the overlap of its cell
    /// with `[a, b]` (the same convention as [`rect_potential`]).
    pub fn probability_in_region(&self, a: f64, b: f64) -> f64 {
        let g = &self.grid;
        let dx = g.dx();
        if !(a < b) || b < g.x_min() - 0.5 * dx || a > g.x_max() + 0.5 * dx {
            return 0.0;
        }
        let first = ((a - g.x_min()) / dx - 0.5).floor().max(0.0) as usize;
        let last = (((b - g.x_min()) / dx + 0.5).ceil().max(0.0) as usize).min(g.n_points() - 1);
        (first..=last)
            .map(|i| {
                let x = g.x(i);
                let overlap = ((x + 0.5 * dx).min(b) - (x - 0.5 * dx).max(a)).max(0.0);
                self.psi[i].norm_sqr() * overlap
            })
            .sum()
    }

    pub fn mean_x(&self) -> f64 {
        let dx = self.grid.dx();
        self.psi
            .iter()
            .enumerate()
            .map(|(i, c)| self.grid.x(i) * c.norm_sqr())
            .sum::<f64>()
            * dx
            / self.norm()
    }

    /// Position variance under `|psi|^2`.
    pub fn variance_x(&self) -> f64 {
        let mean = self.mean_x();
        let dx = self.grid.dx();
        self.psi
            .iter()
            .enumerate()
            .map(|(i, c)| (self.grid.x(i) - mean).powi(2) * c.norm_sqr())
            .sum::<f64>()
            * dx
            / self.norm()
    }

    /// `<p>` with a central-difference momentum operator.
    pub fn mean_p(&self, hbar: f64) -> f64 {
        let n = self.psi.len();
        let dx = self.grid.dx();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..n - 1 {
            let dpsi = (self.psi[i + 1] - self.psi[i - 1]) / (2.0 * dx);
            acc += self.psi[i].conj() * dpsi;
        }
        // -i hbar <psi|d/dx|psi>
        (Complex64::new(0.0, -hbar) * acc * dx).re / self.norm()
    }

    /// `<H>` for the three-point Hamiltonian used by the propagator.
    pub fn energy(&self, potential: &PotentialField, m: f64, hbar: f64) -> f64 {
        let n = self.psi.len();
        let dx = self.grid.dx();
        let kin = hbar * hbar / (2.0 * m * dx * dx);
        let mut acc = 0.0;
        for i in 1..n - 1 {
            let lap = self.psi[i + 1] - self.psi[i] * 2.0 + self.psi[i - 1];
            let h = -lap * kin + self.psi[i] * potential.values[i];
            acc += (self.psi[i].conj() * h).re;
        }
        acc * dx / self.norm()
    }

    /// Cumulative distribution of `|psi|^2` at grid points, using the
    /// trapezoid rule and normalized so the last entry is 1.
    pub fn cdf(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.psi.len());
        let mut acc = 0.0;
        out.push(0.0);
        for w in self.psi.windows(2) {
            acc += 0.5 * (w[0].norm_sqr() + w[1].norm_sqr());
            out.push(acc);
        }
        let total = acc;
        if total > 0.0 {
            out.iter_mut().for_each(|v| *v /= total);
        }
        out
    }

    /// CDF evaluated at an arbitrary `x`, with `|psi|^2` interpolated
    /// linearly between grid points. `table` must come from [`Self::cdf`].
    pub fn cdf_at(&self, table: &[f64], x: f64) -> f64 {
        let g = &self.grid;
        if x <= g.x_min() {
            return 0.0;
        }
        if x >= g.x_max() {
            return 1.0;
        }
        let s = (x - g.x_min()) / g.dx();
        let i = (s.floor() as usize).min(g.n_points() - 2);
        let f = s - i as f64;
        let r0 = self.psi[i].norm_sqr();
        let r1 = self.psi[i + 1].norm_sqr();
        let cell = 0.5 * (r0 + r1);
        if table[g.n_points() - 1] <= 0.0 {
            return 0.0;
        }
        // partial trapezoid over [x_i, x_i + f dx]
        let partial = f * r0 + 0.5 * f * f * (r1 - r0);
        let scale = if cell > 0.0 { (table[i + 1] - table[i]) / cell } else { 0.0 };
        table[i] + partial * scale
    }
}

/// Probability leaking past the grid edges for a Gaussian of width `delta_x`.
fn gaussian_mass_outside(packet: &PacketSpec, grid: &Grid1D) -> f64 {
    let s = std::f64::consts::SQRT_2 * packet.delta_x;
    0.5 * erfc((grid.x_max() - packet.x_mean) / s) + 0.5 * erfc((packet.x_mean - grid.x_min()) / s)
}

/// Samples the Gaussian packet on the grid and renormalizes it discretely.
/// Boundary samples are forced to zero (hard walls).
pub fn init_gaussian(packet: &PacketSpec, grid: &Grid1D, hbar: f64) -> Result<WaveState> {
    let lost = gaussian_mass_outside(packet, grid);
    if lost > 1e-10 {
        return Err(Error::Config(format!(
            "packet tail truncated by the box: {lost:.3e} of the probability lies outside"
        )));
    }
    let dx2 = packet.delta_x * packet.delta_x;
    let pref = (1.0 / (2.0 * std::f64::consts::PI * dx2)).powf(0.25);
    let n = grid.n_points();
    let mut psi: Vec<Complex64> = grid
        .points()
        .map(|x| {
            let y = x - packet.x_mean;
            let amp = pref * (-y * y / (4.0 * dx2)).exp();
            Complex64::from_polar(amp, packet.p_mean * y / hbar)
        })
        .collect();
    psi[0] = Complex64::new(0.0, 0.0);
    psi[n - 1] = Complex64::new(0.0, 0.0);
    let mut state = WaveState {
        grid: *grid,
        psi,
        t: 0.0,
    };
    let norm = state.norm();
    if !(norm > 0.0) {
        return Err(Error::Config("packet has zero weight on the grid".into()));
    }
    let s = 1.0 / norm.sqrt();
    state.psi.iter_mut().for_each(|c| *c *= s);
    Ok(state)
}

/// Crank-Nicolson propagator for a static potential and fixed step. The
/// left-hand tridiagonal matrix is factorized once; each step is one
/// matrix-vector product plus forward and back substitution.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    grid: Grid1D,
    dt: f64,
    /// Thomas factors for `A = 1 + i dt H / 2hbar`: modified super-diagonal.
    c_prime: Vec<Complex64>,
    /// Rows of `B = 1 - i dt H / 2hbar` divided by the pivots of `A`.
    diag_scaled: Vec<Complex64>,
    off_scaled: Vec<Complex64>,
    rhs: Vec<Complex64>,
    steps: u64,
    peak: f64,
}

impl CrankNicolson {
    pub fn new(potential: &PotentialField, dt: f64, m: f64, hbar: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive (got {dt})")));
        }
        let grid = potential.grid;
        let n = grid.n_points();
        let dx = grid.dx();
        let kin = hbar * hbar / (2.0 * m * dx * dx);
        let half = Complex64::new(0.0, dt / (2.0 * hbar));
        let a_off = half * (-kin);
        let a_diag: Vec<Complex64> = potential
            .values
            .iter()
            .map(|&v| Complex64::new(1.0, 0.0) + half * (2.0 * kin + v))
            .collect();
        let b_diag: Vec<Complex64> = potential
            .values
            .iter()
            .map(|&v| Complex64::new(1.0, 0.0) - half * (2.0 * kin + v))
            .collect();

        // Interior unknowns 1..n-1; walls stay zero.
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut diag_scaled = vec![Complex64::new(0.0, 0.0); n];
        let mut off_scaled = vec![Complex64::new(0.0, 0.0); n];
        let mut prev_c = Complex64::new(0.0, 0.0);
        for i in 1..n - 1 {
            let pivot = a_diag[i] - a_off * prev_c;
            if pivot.norm() < 1e-300 || !pivot.is_finite() {
                return Err(Error::Numerical {
                    step: 0,
                    msg: format!("singular pivot at row {i} in tridiagonal factorization"),
                });
            }
            let inv = pivot.inv();
            c_prime[i] = a_off * inv;
            diag_scaled[i] = b_diag[i] * inv;
            off_scaled[i] = -a_off * inv;
            prev_c = c_prime[i];
        }
        Ok(Self {
            grid,
            dt,
            c_prime,
            diag_scaled,
            off_scaled,
            rhs: vec![Complex64::new(0.0, 0.0); n],
            steps: 0,
            peak: f64::NAN,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps
    }

    /// `max |psi|^2` of the state produced by the last step (NaN before the first).
    pub fn peak_density(&self) -> f64 {
        self.peak
    }

    /// Advances `state` by one step in place.
    pub fn step(&mut self, state: &mut WaveState) -> Result<()> {
        if state.grid != self.grid {
            return Err(Error::Config("wave state and propagator grids differ".into()));
        }
        let n = self.grid.n_points();
        let psi = &mut state.psi;
        let rhs = &mut self.rhs;
        // Forward sweep with the right-hand side folded in: only the
        // `c_prime * prev` term sits on the dependency chain.
        let mut prev = Complex64::new(0.0, 0.0);
        for i in 1..n - 1 {
            let b = self.diag_scaled[i] * psi[i] + self.off_scaled[i] * (psi[i - 1] + psi[i + 1]);
            let d = b - self.c_prime[i] * prev;
            rhs[i] = d;
            prev = d;
        }
        // back substitution
        psi[n - 1] = Complex64::new(0.0, 0.0);
        let mut next = Complex64::new(0.0, 0.0);
        let mut peak = 0.0f64;
        for (p, (&r, &c)) in psi[1..n - 1]
            .iter_mut()
            .zip(rhs[1..n - 1].iter().zip(&self.c_prime[1..n - 1]))
            .rev()
        {
            next = r - c * next;
            *p = next;
            let rho = next.norm_sqr();
            if rho > peak {
                peak = rho;
            }
        }
        self.peak = peak;
        psi[0] = Complex64::new(0.0, 0.0);
        self.steps += 1;
        state.t += self.dt;
        if !psi[n / 2].is_finite() {
            return Err(Error::Numerical {
                step: self.steps,
                msg: "non-finite amplitude after tridiagonal solve".into(),
            });
        }
        Ok(())
    }
}

/// One Crank-Nicolson step from scratch (factorizes every call; use
/// [`CrankNicolson`] when stepping repeatedly).
pub fn step_propagator(
    state: &WaveState,
    potential: &PotentialField,
    dt: f64,
    m: f64,
    hbar: f64,
) -> Result<WaveState> {
    if state.grid != potential.grid {
        return Err(Error::Config("potential and wave state grids differ".into()));
    }
    let mut prop = CrankNicolson::new(potential, dt, m, hbar)?;
    let mut next = state.clone();
    prop.step(&mut next)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn paper_grid() -> Grid1D {
        Grid1D::with_spacing(-1000.0, 1000.0, 0.1).unwrap()
    }

    #[test]
    fn grid_invariants() {
        let g = Grid1D::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.x(4), 1.0);
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
        assert_eq!(paper_grid().n_points(), 20001);
    }

    #[test]
    fn rect_potential_regions() {
        let g = paper_grid();
        let b = BarrierSpec::new(1.0, 10.0, 1.0, 1.0).unwrap();
        let v = rect_potential(&b, &g).unwrap();
        let at = |x: f64| v.values[((x - g.x_min()) / g.dx()).round() as usize];
        assert_eq!(at(0.0), 1.0);
        assert_eq!(at(-500.0), 0.0);
        assert_eq!(at(4.9), 1.0);
        assert_eq!(at(5.0), 0.5);
        assert_eq!(at(-5.0), 0.5);
        assert_eq!(at(5.1), 0.0);
        assert_eq!(v.values.iter().filter(|&&x| x > 0.0).count(), 101);
        let area: f64 = v.values.iter().sum::<f64>() * g.dx();
        assert!((area - 10.0).abs() < 1e-9);
    }

    #[test]
    fn unaligned_barrier_keeps_its_area() {
        let g = Grid1D::with_spacing(-10.0, 10.0, 0.3).unwrap();
        let b = BarrierSpec::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let v = rect_potential(&b, &g).unwrap();
        let area: f64 = v.values.iter().sum::<f64>() * g.dx();
        assert!((area - 2.0).abs() < 1e-9, "{area}");
    }

    #[test]
    fn plane_wave_transmission() {
        let b = BarrierSpec::new(1.0, 1.0, 1.0, 1.0).unwrap();
        // V0 = 2E: the prefactor is 1, so T = 1/cosh^2(kappa d).
        assert_abs_diff_eq!(b.transmission(0.5).unwrap(), 1.0 / 1f64.cosh().powi(2), epsilon = 1e-15);
        let thin = BarrierSpec::new(1.0, 1e-6, 1.0, 1.0).unwrap();
        assert!(thin.transmission(0.5).unwrap() > 1.0 - 1e-11);
        let thick = BarrierSpec { d: 10.0, ..b };
        assert!((thick.transmission(0.5).unwrap() / (4.0 * (-20f64).exp()) - 1.0).abs() < 1e-8);
        assert!(b.transmission(1.5).is_err());
    }

    #[test]
    fn barrier_wider_than_grid_is_rejected() {
        let g = Grid1D::new(-10.0, 10.0, 201).unwrap();
        let b = BarrierSpec::new(1.0, 20.0, 1.0, 1.0).unwrap();
        assert!(matches!(rect_potential(&b, &g), Err(Error::Config(_))));
        assert!(BarrierSpec::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gaussian_is_normalized_and_centered() {
        let g = paper_grid();
        let p = PacketSpec::new(-500.0, 1.0, 50.0, 1.0).unwrap();
        assert_eq!(p.e0(), 0.5);
        let s = init_gaussian(&p, &g, 1.0).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
        assert!((s.mean_x() + 500.0).abs() < g.dx());
        assert!((s.variance_x() / 2500.0 - 1.0).abs() < 1e-3);
        assert!((s.mean_p(1.0) - 1.0).abs() < 2e-3);
        assert_abs_diff_eq!(s.probability_in_region(-1000.0, -5.0), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn truncated_packet_is_rejected() {
        let g = Grid1D::new(-100.0, 100.0, 2001).unwrap();
        let p = PacketSpec::new(-80.0, 1.0, 10.0, 1.0).unwrap();
        assert!(matches!(init_gaussian(&p, &g, 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn probability_region_edge_cases() {
        let g = paper_grid();
        let p = PacketSpec::new(-500.0, 1.0, 50.0, 1.0).unwrap();
        let s = init_gaussian(&p, &g, 1.0).unwrap();
        assert_abs_diff_eq!(s.probability_in_region(-2000.0, 2000.0), 1.0, epsilon = 1e-8);
        assert_eq!(s.probability_in_region(2000.0, 3000.0), 0.0);
        assert_eq!(s.probability_in_region(0.02, 0.01), 0.0);
        let i = 5000;
        let x = g.x(i);
        let p = s.probability_in_region(x - 0.01, x + 0.02);
        assert_abs_diff_eq!(p, 0.03 * s.density(i), epsilon = 1e-15);
    }

    #[test]
    fn single_free_step_is_unitary() {
        let g = Grid1D::with_spacing(-200.0, 200.0, 0.1).unwrap();
        let p = PacketSpec::new(0.0, 1.0, 10.0, 1.0).unwrap();
        let s = init_gaussian(&p, &g, 1.0).unwrap();
        let next = step_propagator(&s, &PotentialField::zero(g), 0.01, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(next.norm(), s.norm(), epsilon = 1e-12);
        assert_abs_diff_eq!(next.t, 0.01, epsilon = 1e-15);
    }

    #[test]
    fn cdf_is_monotone_and_matches_regions() {
        let g = Grid1D::with_spacing(-200.0, 200.0, 0.1).unwrap();
        let p = PacketSpec::new(0.0, 1.0, 10.0, 1.0).unwrap();
        let s = init_gaussian(&p, &g, 1.0).unwrap();
        let table = s.cdf();
        assert!(table.windows(2).all(|w| w[1] >= w[0]));
        assert_abs_diff_eq!(s.cdf_at(&table, 0.0), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(s.cdf_at(&table, 0.05), table[2000] + 0.5 * (table[2001] - table[2000]), epsilon = 1e-6);
        assert_eq!(s.cdf_at(&table, -300.0), 0.0);
        assert_eq!(s.cdf_at(&table, 300.0), 1.0);
    }
}
