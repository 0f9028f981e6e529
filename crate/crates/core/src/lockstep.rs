//! Co-evolution of the wavefunction and the path ensemble.
//!
//! Each iteration builds the drift table from `psi(t)`, moves every path
//! from `t` to `t + dt`, then advances `psi` by one Crank-Nicolson step.
//! Only the current `psi` is ever held in memory.

use serde::{Deserialize, Serialize};

use crate::config::SimulationConfig;
use crate::drift::{max_density, DriftField};
use crate::error::{Error, Result};
use crate::field::{init_gaussian, rect_potential, BarrierSpec, CrankNicolson, Grid1D, PotentialField, WaveState};
use crate::paths::{advance_paths, classify_paths, init_paths, Classification, PathEnsemble, StepCounts, StepParams};

/// Structured diagnostics of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub steps: u64,
    pub t_final: f64,
    /// True when the adaptive rule hit `tf_cap` before its criteria held.
    pub hit_tf_cap: bool,
    pub norm_initial: f64,
    pub norm_final: f64,
    /// Largest `|norm(t) - norm(0)|` seen at the sampled checkpoints.
    pub max_norm_drift: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub barrier_probability_final: f64,
    /// `int dt int_barrier |psi|^2 dx` over the run (left-point rule); by
    /// the Born rule this equals the ensemble mean of `tau` over all paths.
    pub barrier_occupancy: f64,
    pub transmitted_probability_final: f64,
    pub cap_events: u64,
    pub drift_evaluations: u64,
    pub wall_hits: u64,
    pub paths_hit_wall: usize,
    pub classification: Classification,
    pub tf_too_short: bool,
}

impl RunDiagnostics {
    pub fn cap_fraction(&self) -> f64 {
        if self.drift_evaluations == 0 {
            0.0
        } else {
            self.cap_events as f64 / self.drift_evaluations as f64
        }
    }
}

/// State sufficient to resume a run bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub state: WaveState,
    pub ensemble: PathEnsemble,
    pub counts: StepCounts,
    pub max_norm_drift: f64,
    pub occupancy: f64,
}

#[derive(Debug, Clone)]
pub struct Lockstep {
    config: SimulationConfig,
    grid: Grid1D,
    barrier: BarrierSpec,
    potential: PotentialField,
    propagator: CrankNicolson,
    state: WaveState,
    ensemble: PathEnsemble,
    counts: StepCounts,
    norm_initial: f64,
    energy_initial: f64,
    max_norm_drift: f64,
    occupancy: f64,
    peak: f64,
}

const NORM_CHECK_EVERY: u64 = 1000;

impl Lockstep {
    pub fn new(config: &SimulationConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let packet = config.packet()?;
        let state = init_gaussian(&packet, &grid, config.hbar)?;
        let ensemble = init_paths(config.n_paths, &packet, config.master_seed)?;
        Self::assemble(config, state, ensemble, StepCounts::default(), 0.0, 0.0)
    }

    /// Rebuilds the driver around a saved checkpoint.
    pub fn resume(config: &SimulationConfig, ckpt: Checkpoint) -> Result<Self> {
        config.validate()?;
        Self::assemble(config, ckpt.state, ckpt.ensemble, ckpt.counts, ckpt.max_norm_drift, ckpt.occupancy)
    }

    fn assemble(
        config: &SimulationConfig,
        state: WaveState,
        ensemble: PathEnsemble,
        counts: StepCounts,
        max_norm_drift: f64,
        occupancy: f64,
    ) -> Result<Self> {
        let grid = config.grid()?;
        if state.grid != grid {
            return Err(Error::Config("checkpoint grid does not match the config".into()));
        }
        let barrier = config.barrier()?;
        let potential = rect_potential(&barrier, &grid)?;
        let propagator = CrankNicolson::new(&potential, config.dt, config.m, config.hbar)?;
        // The reference norm and energy are those of the initial packet, so
        // a resumed run reports the same figures as an uninterrupted one.
        let initial = init_gaussian(&config.packet()?, &grid, config.hbar)?;
        let peak = max_density(&state);
        Ok(Self {
            config: config.clone(),
            grid,
            barrier,
            norm_initial: initial.norm(),
            energy_initial: initial.energy(&potential, config.m, config.hbar),
            potential,
            propagator,
            state,
            ensemble,
            counts,
            max_norm_drift,
            occupancy,
            peak,
        })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn state(&self) -> &WaveState {
        &self.state
    }

    pub fn ensemble(&self) -> &PathEnsemble {
        &self.ensemble
    }

    pub fn potential(&self) -> &PotentialField {
        &self.potential
    }

    pub fn steps(&self) -> u64 {
        self.ensemble.step
    }

    pub fn t(&self) -> f64 {
        self.ensemble.t
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            state: self.state.clone(),
            ensemble: self.ensemble.clone(),
            counts: self.counts,
            max_norm_drift: self.max_norm_drift,
            occupancy: self.occupancy,
        }
    }

    /// One ensemble step on the current snapshot, then one PDE step.
    pub fn step(&mut self) -> Result<()> {
        let g = &self.grid;
        let (xlo, xhi) = self.ensemble.extent();
        let lo = (((xlo - g.x_min()) / g.dx()).floor().max(0.0) as usize).saturating_sub(1);
        let hi = ((xhi - g.x_min()) / g.dx()).ceil() as usize + 1;
        let field = DriftField::over_range_with_peak(
            &self.state,
            self.peak,
            self.config.hbar,
            self.config.m,
            self.config.delta_reg,
            self.config.velocity_cap(),
            lo,
            hi,
        )
        .map_err(|e| Error::Numerical {
            step: self.ensemble.step,
            msg: e.to_string(),
        })?;
        let params = StepParams {
            barrier: &self.barrier,
            grid: &self.grid,
            dt: self.config.dt,
            noise_sd: self.config.noise_sd(),
        };
        self.counts = self.counts + advance_paths(&mut self.ensemble, &field, &params);
        self.occupancy += self.barrier_probability() * self.config.dt;

        self.propagator.step(&mut self.state).map_err(|e| match e {
            Error::Numerical { msg, .. } => Error::Numerical {
                step: self.ensemble.step,
                msg,
            },
            other => other,
        })?;
        self.state.t = self.ensemble.t;
        self.peak = self.propagator.peak_density();
        if self.ensemble.step % NORM_CHECK_EVERY == 0 {
            self.record_norm()?;
        }
        Ok(())
    }

    fn record_norm(&mut self) -> Result<()> {
        let norm = self.state.norm();
        if !norm.is_finite() {
            return Err(Error::Numerical {
                step: self.ensemble.step,
                msg: "wavefunction norm is not finite".into(),
            });
        }
        self.max_norm_drift = self.max_norm_drift.max((norm - self.norm_initial).abs());
        Ok(())
    }

    /// Steps until `t >= t_target` (in whole steps).
    pub fn run_until(&mut self, t_target: f64) -> Result<()> {
        let target_steps = (t_target / self.config.dt - 1e-9).ceil().max(0.0) as u64;
        while self.ensemble.step < target_steps {
            self.step()?;
        }
        Ok(())
    }

    fn barrier_probability(&self) -> f64 {
        let half = 0.5 * self.barrier.d;
        self.state.probability_in_region(-half, half)
    }

    /// Adaptive stopping rule: packet cleared, barrier nearly empty in both
    /// the wavefunction and the ensemble.
    pub fn criteria_met(&self) -> bool {
        if self.t() < self.config.t_clear() {
            return false;
        }
        let in_barrier = self.ensemble.count_in_barrier(&self.barrier) as f64 / self.ensemble.n_total() as f64;
        self.barrier_probability() < self.config.tf_barrier_prob && in_barrier < self.config.tf_undecided
    }

    /// Runs to the configured final time (fixed or adaptive) and classifies.
    pub fn run_to_end(mut self) -> Result<(PathEnsemble, RunDiagnostics, WaveState)> {
        let mut hit_cap = false;
        match self.config.t_final {
            Some(t) => self.run_until(t)?,
            None => {
                let cap_steps = (self.config.tf_cap / self.config.dt - 1e-9).ceil() as u64;
                let every = self.config.tf_check_every;
                loop {
                    if self.ensemble.step % every == 0 && self.criteria_met() {
                        break;
                    }
                    if self.ensemble.step >= cap_steps {
                        hit_cap = true;
                        break;
                    }
                    self.step()?;
                }
            }
        }
        Ok(self.finish(hit_cap))
    }

    fn finish(mut self, hit_tf_cap: bool) -> (PathEnsemble, RunDiagnostics, WaveState) {
        let norm_final = self.state.norm();
        self.max_norm_drift = self.max_norm_drift.max((norm_final - self.norm_initial).abs());
        let classification = classify_paths(&mut self.ensemble, &self.barrier);
        let half = 0.5 * self.barrier.d;
        let diag = RunDiagnostics {
            steps: self.ensemble.step,
            t_final: self.ensemble.t,
            hit_tf_cap,
            norm_initial: self.norm_initial,
            norm_final,
            max_norm_drift: self.max_norm_drift,
            energy_initial: self.energy_initial,
            energy_final: self.state.energy(&self.potential, self.config.m, self.config.hbar),
            barrier_probability_final: self.barrier_probability(),
            barrier_occupancy: self.occupancy,
            transmitted_probability_final: self.state.probability_in_region(half, f64::INFINITY),
            cap_events: self.counts.cap_events,
            drift_evaluations: self.ensemble.step * self.ensemble.n_total() as u64,
            wall_hits: self.counts.wall_hits,
            paths_hit_wall: self.ensemble.paths.iter().filter(|p| p.hit_wall).count(),
            tf_too_short: classification.tf_too_short(),
            classification,
        };
        if diag.tf_too_short {
            log::warn!(
                "{} paths still inside the barrier at t_f = {} (t_f too short)",
                classification.undecided,
                diag.t_final
            );
        }
        if diag.paths_hit_wall > 0 {
            log::warn!("{} paths reached a wall", diag.paths_hit_wall);
        }
        (self.ensemble, diag, self.state)
    }
}

/// Full run from a config: classified ensemble plus diagnostics.
pub fn run_lockstep(config: &SimulationConfig) -> Result<(PathEnsemble, RunDiagnostics)> {
    let (ens, diag, _) = Lockstep::new(config)?.run_to_end()?;
    Ok((ens, diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimulationConfig {
        SimulationConfig {
            x_min: -200.0,
            x_max: 200.0,
            x_mean: -60.0,
            delta_x: 10.0,
            n_paths: 200,
            d: 1.0,
            ..SimulationConfig::desk()
        }
    }

    #[test]
    fn split_and_resume_is_identical() {
        let mut cfg = small();
        cfg.t_final = Some(80.0);
        let (full, _) = run_lockstep(&cfg).unwrap();

        let mut a = Lockstep::new(&cfg).unwrap();
        a.run_until(37.3).unwrap();
        let ckpt = a.checkpoint();
        drop(a);
        let b = Lockstep::resume(&cfg, ckpt).unwrap();
        let (resumed, _, _) = b.run_to_end().unwrap();
        assert_eq!(full, resumed);
    }

    #[test]
    fn taus_are_bounded_by_elapsed_time() {
        let mut cfg = small();
        cfg.t_final = Some(100.0);
        let (ens, diag) = run_lockstep(&cfg).unwrap();
        assert!(ens.paths.iter().all(|p| p.tau >= 0.0 && p.tau <= diag.t_final + 1e-9));
        assert!(ens.paths.iter().any(|p| p.tau > 0.0));
        assert_eq!(diag.steps, 10_000);
    }

    #[test]
    fn single_free_path_has_zero_tau_far_from_barrier() {
        let mut cfg = small();
        cfg.n_paths = 1;
        cfg.t_final = Some(20.0);
        let (ens, diag) = run_lockstep(&cfg).unwrap();
        assert_eq!(ens.paths[0].tau, 0.0);
        assert_eq!(diag.classification.reflected, 1);
    }

    #[test]
    fn adaptive_stop_waits_for_the_packet() {
        let cfg = small();
        let (ens, diag) = run_lockstep(&cfg).unwrap();
        assert!(diag.t_final >= cfg.t_clear());
        assert!(!diag.hit_tf_cap);
        assert!(diag.barrier_probability_final < cfg.tf_barrier_prob);
        assert_eq!(diag.classification.undecided, 0);
        assert_eq!(ens.count(crate::paths::PathStatus::Undecided), 0);
    }
}
