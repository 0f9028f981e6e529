//! Run configuration and its flat `key = value` file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BarrierSpec, Grid1D, PacketSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    LeastSquares,
    Mle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Unweighted,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// N = 10,000 paths, dx = 0.1/k0.
    Desk,
    /// N = 100,000 paths, dx = 0.05/k0.
    Paper,
}

/// Everything needed to reproduce one run. Lengths in `1/k0`, times in
/// `1/k0^2`, energies in `k0^2` (with `m = hbar = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,

    pub v0: f64,
    pub d: f64,
    pub m: f64,
    pub hbar: f64,

    pub x_mean: f64,
    pub p_mean: f64,
    pub delta_x: f64,

    pub n_paths: usize,
    pub master_seed: u64,
    pub dt: f64,

    /// Fixed final time; when absent the run stops adaptively.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    pub tf_cap: f64,
    pub tf_barrier_prob: f64,
    pub tf_undecided: f64,
    pub tf_check_every: u64,

    pub delta_reg: f64,
    /// Velocity cap per component, in units of `dx/dt`.
    pub cap_factor: f64,
    pub noise: bool,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    pub fit_method: FitMethod,
    pub ls_weighting: Weighting,
    /// Bootstrap resamples for least-squares standard errors (0 = none).
    #[serde(default)]
    pub n_bootstrap: usize,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl SimulationConfig {
    /// Box `[-1000, 1000]`, packet at `-500` with `<p> = 1`, `Delta x = 50`,
    /// barrier `V0/E0 = 2`, `d = 10`.
    pub fn paper() -> Self {
        Self {
            x_min: -1000.0,
            x_max: 1000.0,
            dx: 0.05,
            v0: 1.0,
            d: 10.0,
            m: 1.0,
            hbar: 1.0,
            x_mean: -500.0,
            p_mean: 1.0,
            delta_x: 50.0,
            n_paths: 100_000,
            master_seed: 1,
            dt: 0.01,
            t_final: None,
            tf_cap: 1500.0,
            tf_barrier_prob: 1e-4,
            tf_undecided: 1e-3,
            tf_check_every: 100,
            delta_reg: crate::drift::DEFAULT_DELTA_REG,
            cap_factor: 1.0,
            noise: true,
            bins: None,
            fit_method: FitMethod::Both,
            ls_weighting: Weighting::Unweighted,
            n_bootstrap: 0,
            output_dir: None,
        }
    }

    pub fn desk() -> Self {
        Self {
            dx: 0.1,
            n_paths: 10_000,
            ..Self::paper()
        }
    }

    pub fn profile(p: Profile) -> Self {
        match p {
            Profile::Desk => Self::desk(),
            Profile::Paper => Self::paper(),
        }
    }

    pub fn e0(&self) -> f64 {
        self.p_mean * self.p_mean / (2.0 * self.m)
    }

    /// Sets `V0` as a multiple of `E0`.
    pub fn with_height_ratio(mut self, ratio: f64) -> Self {
        self.v0 = ratio * self.e0();
        self
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::with_spacing(self.x_min, self.x_max, self.dx)
    }

    pub fn barrier(&self) -> Result<BarrierSpec> {
        BarrierSpec::new(self.v0, self.d, self.m, self.hbar)
    }

    pub fn packet(&self) -> Result<PacketSpec> {
        PacketSpec::new(self.x_mean, self.p_mean, self.delta_x, self.m)
    }

    /// Decay constant under the barrier.
    pub fn kappa(&self) -> Result<f64> {
        self.barrier()?.kappa(self.e0())
    }

    /// Noise standard deviation per step, `sqrt(hbar dt / m)`.
    pub fn noise_sd(&self) -> f64 {
        if self.noise {
            (self.hbar * self.dt / self.m).sqrt()
        } else {
            0.0
        }
    }

    pub fn velocity_cap(&self) -> f64 {
        self.cap_factor * self.grid().map(|g| g.dx()).unwrap_or(self.dx) / self.dt
    }

    /// Time at which the packet's trailing `5 Delta x` edge clears the
    /// barrier at the group velocity; adaptive stopping is not checked before.
    pub fn t_clear(&self) -> f64 {
        let v = (self.p_mean / self.m).abs().max(1e-12);
        (0.5 * self.d - self.x_mean + 5.0 * self.delta_x) / v
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        self.barrier()?;
        self.packet()?;
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive (got {})", self.dt)));
        }
        if self.n_paths == 0 {
            return Err(Error::Config("n_paths must be at least 1".into()));
        }
        if !(self.tf_cap > 0.0) || self.t_final.is_some_and(|t| !(t >= 0.0)) {
            return Err(Error::Config("final time must be non-negative".into()));
        }
        if self.tf_check_every == 0 {
            return Err(Error::Config("tf_check_every must be at least 1".into()));
        }
        if !(self.cap_factor > 0.0) {
            return Err(Error::Config("cap_factor must be positive".into()));
        }
        if self.x_mean <= grid.x_min() || self.x_mean >= grid.x_max() {
            return Err(Error::Config("packet center lies outside the grid".into()));
        }
        if self.master_seed > i64::MAX as u64 {
            return Err(Error::Config("master_seed must fit in a signed 64-bit integer".into()));
        }
        if self.bins == Some(0) {
            return Err(Error::Config("bins must be positive".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let body = toml::to_string(self).expect("validated flat config serializes");
        format!(
            "# nelson-tunnel run configuration\n\
             # units: length 1/k0, time 1/k0^2, energy k0^2 (m = hbar = 1 unless set)\n\
             {body}"
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_match_the_reference_setup() {
        let c = SimulationConfig::paper();
        assert_eq!((c.x_min, c.x_max, c.x_mean, c.p_mean), (-1000.0, 1000.0, -500.0, 1.0));
        assert_eq!((c.m, c.hbar, c.n_paths), (1.0, 1.0, 100_000));
        assert_eq!(c.e0(), 0.5);
        assert_eq!(c.kappa().unwrap(), 1.0);
        let d = SimulationConfig::desk();
        assert_eq!((d.n_paths, d.dx), (10_000, 0.1));
        d.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = SimulationConfig::desk();
        c.n_paths = 0;
        assert!(c.validate().is_err());
        assert!(SimulationConfig::from_text("x_min = 1.0").is_err());
        let text = SimulationConfig::desk().to_text() + "bogus = 3\n";
        assert!(SimulationConfig::from_text(&text).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(d in 0.1f64..30.0, dx in 10.0f64..80.0, seed in 0..=i64::MAX as u64,
                           ratio in 1.1f64..4.0, t in proptest::option::of(1.0f64..2000.0),
                           bins in proptest::option::of(1usize..500)) {
            let mut c = SimulationConfig::desk().with_height_ratio(ratio);
            c.d = d;
            c.delta_x = dx;
            c.master_seed = seed;
            c.t_final = t;
            c.bins = bins;
            let back = SimulationConfig::from_text(&c.to_text()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
