//! Ensemble of Nelson sample paths advanced by Euler-Maruyama.
//!
//! `dx = (u + v) dt + dw`, `<dw^2> = (hbar/m) dt`. Each path carries a
//! barrier-occupancy clock `tau = sum dt * Theta(x)` evaluated at the start
//! of every step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drift::DriftField;
use crate::error::{Error, Result};
use crate::field::{BarrierSpec, Grid1D, PacketSpec, WaveState};
use crate::rng::{PathStream, INIT_COUNTER};

/// Largest tolerated fraction of paths still inside the barrier at `t_f`.
pub const MAX_UNDECIDED_FRACTION: f64 = 1e-3;

const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathStatus {
    Undecided,
    Transmitted,
    Reflected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRecord {
    pub x: f64,
    /// Position at `t = 0`.
    pub x_init: f64,
    pub tau: f64,
    pub stream: PathStream,
    pub status: PathStatus,
    pub hit_wall: bool,
}

impl PathRecord {
    pub fn new(x: f64, stream: PathStream) -> Self {
        Self {
            x,
            x_init: x,
            tau: 0.0,
            stream,
            status: PathStatus::Undecided,
            hit_wall: false,
        }
    }
}

/// `tau += dt` when `x` lies in the closed barrier interval.
#[inline]
pub fn accumulate_barrier_time(path: &mut PathRecord, barrier: &BarrierSpec, dt: f64) {
    if barrier.contains(path.x) {
        path.tau += dt;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub paths: Vec<PathRecord>,
    /// Shared clock; equals `step * dt`.
    pub t: f64,
    pub step: u64,
    pub master_seed: u64,
}

/// Per-step bookkeeping returned by [`advance_paths`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub cap_events: u64,
    pub wall_hits: u64,
}

impl std::ops::Add for StepCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            cap_events: self.cap_events + o.cap_events,
            wall_hits: self.wall_hits + o.wall_hits,
        }
    }
}

impl PathEnsemble {
    pub fn n_total(&self) -> usize {
        self.paths.len()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.x).collect()
    }

    /// Paths whose current position is inside the barrier.
    pub fn count_in_barrier(&self, barrier: &BarrierSpec) -> usize {
        self.paths.iter().filter(|p| barrier.contains(p.x)).count()
    }

    pub fn transmitted_times(&self) -> Vec<f64> {
        self.paths
            .iter()
            .filter(|p| p.status == PathStatus::Transmitted)
            .map(|p| p.tau)
            .collect()
    }

    pub fn count(&self, status: PathStatus) -> usize {
        self.paths.iter().filter(|p| p.status == status).count()
    }

    /// Smallest and largest path position.
    pub fn extent(&self) -> (f64, f64) {
        self.paths
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)))
    }
}

/// Draws `n` initial positions i.i.d. from the Gaussian `|psi(x,0)|^2`
/// (mean `x_mean`, standard deviation `delta_x`).
pub fn init_paths(n: usize, packet: &PacketSpec, master_seed: u64) -> Result<PathEnsemble> {
    if n == 0 {
        return Err(Error::Config("ensemble needs at least one path".into()));
    }
    let paths = (0..n)
        .into_par_iter()
        .with_min_len(CHUNK)
        .map(|i| {
            let i = i as u64;
            let stream = PathStream::new(master_seed, i);
            let z = stream.normal(INIT_COUNTER);
            PathRecord::new(packet.x_mean + packet.delta_x * z, stream)
        })
        .collect();
    Ok(PathEnsemble {
        paths,
        t: 0.0,
        step: 0,
        master_seed,
    })
}

/// Draws `n` positions from `|psi|^2` of an arbitrary state by inverting its
/// piecewise-linear CDF.
pub fn init_paths_from_state(n: usize, state: &WaveState, master_seed: u64) -> Result<PathEnsemble> {
    if n == 0 {
        return Err(Error::Config("ensemble needs at least one path".into()));
    }
    let table = state.cdf();
    let g = state.grid;
    let paths = (0..n as u64)
        .map(|i| {
            let stream = PathStream::new(master_seed, i);
            let u = stream.uniform(INIT_COUNTER, 0);
            let j = table.partition_point(|&c| c < u).clamp(1, g.n_points() - 1);
            let (c0, c1) = (table[j - 1], table[j]);
            let f = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
            PathRecord::new(g.x(j - 1) + f * g.dx(), stream)
        })
        .collect();
    Ok(PathEnsemble {
        paths,
        t: state.t,
        step: 0,
        master_seed,
    })
}

/// Parameters of one ensemble step.
#[derive(Debug, Clone, Copy)]
pub struct StepParams<'a> {
    pub barrier: &'a BarrierSpec,
    pub grid: &'a Grid1D,
    pub dt: f64,
    /// Standard deviation of `dw`, normally `sqrt(hbar dt / m)`; zero turns
    /// the noise off.
    pub noise_sd: f64,
}

/// Advances every path by one step through `field` (a snapshot at `ens.t`).
pub fn advance_paths(ens: &mut PathEnsemble, field: &DriftField, p: &StepParams) -> StepCounts {
    let step = ens.step;
    let (lo, hi) = (p.grid.x_min(), p.grid.x_max());
    let counts = ens
        .paths
        .par_chunks_mut(CHUNK)
        .map(|chunk| {
            let mut c = StepCounts::default();
            for path in chunk {
                accumulate_barrier_time(path, p.barrier, p.dt);
                let (drift, capped) = field.sample_unchecked(path.x);
                c.cap_events += capped as u64;
                let dw = if p.noise_sd > 0.0 {
                    p.noise_sd * path.stream.normal(step)
                } else {
                    0.0
                };
                let x = path.x + drift.total * p.dt + dw;
                if x < lo || x > hi {
                    path.x = x.clamp(lo, hi);
                    path.hit_wall = true;
                    c.wall_hits += 1;
                } else {
                    path.x = x;
                }
            }
            c
        })
        .reduce(StepCounts::default, |a, b| a + b);
    ens.step += 1;
    ens.t = ens.step as f64 * p.dt;
    counts
}

/// Outcome counts after classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub transmitted: usize,
    pub reflected: usize,
    pub undecided: usize,
}

impl Classification {
    pub fn undecided_fraction(&self) -> f64 {
        let n = self.transmitted + self.reflected + self.undecided;
        if n == 0 {
            0.0
        } else {
            self.undecided as f64 / n as f64
        }
    }

    /// True when too many paths are still in the barrier, i.e. `t_f` was short.
    pub fn tf_too_short(&self) -> bool {
        self.undecided_fraction() > MAX_UNDECIDED_FRACTION
    }

    pub fn transmitted_fraction(&self) -> f64 {
        let n = self.transmitted + self.reflected + self.undecided;
        self.transmitted as f64 / n as f64
    }
}

/// Final-time classification: beyond `d/2` is transmitted, before `-d/2`
/// reflected, inside stays undecided.
pub fn classify_paths(ens: &mut PathEnsemble, barrier: &BarrierSpec) -> Classification {
    let half = 0.5 * barrier.d;
    let mut c = Classification {
        transmitted: 0,
        reflected: 0,
        undecided: 0,
    };
    for p in &mut ens.paths {
        p.status = if p.x > half {
            c.transmitted += 1;
            PathStatus::Transmitted
        } else if p.x < -half {
            c.reflected += 1;
            PathStatus::Reflected
        } else {
            c.undecided += 1;
            PathStatus::Undecided
        };
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::DEFAULT_DELTA_REG;
    use crate::field::{init_gaussian, Grid1D};
    use num_complex::Complex64;

    fn packet() -> PacketSpec {
        PacketSpec::new(-500.0, 1.0, 50.0, 1.0).unwrap()
    }

    fn barrier() -> BarrierSpec {
        BarrierSpec::new(1.0, 10.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn init_moments_follow_the_packet() {
        let n = 100_000;
        let ens = init_paths(n, &packet(), 11).unwrap();
        let xs = ens.positions();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean + 500.0).abs() < 3.0 * 50.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var / 2500.0 - 1.0).abs() < 0.03, "var {var}");
        assert!(ens.paths.iter().all(|p| p.tau == 0.0 && p.status == PathStatus::Undecided));
    }

    #[test]
    fn init_is_deterministic_and_rejects_empty() {
        let a = init_paths(1000, &packet(), 3).unwrap();
        let b = init_paths(1000, &packet(), 3).unwrap();
        assert_eq!(a, b);
        assert!(init_paths(0, &packet(), 3).is_err());
    }

    #[test]
    fn inverse_cdf_sampler_matches_gaussian() {
        let g = Grid1D::with_spacing(-1000.0, 1000.0, 0.1).unwrap();
        let s = init_gaussian(&packet(), &g, 1.0).unwrap();
        let ens = init_paths_from_state(50_000, &s, 2).unwrap();
        let xs = ens.positions();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean + 500.0).abs() < 1.0);
    }

    #[test]
    fn barrier_clock() {
        let b = barrier();
        let s = PathStream::new(0, 0);
        let mut p = PathRecord::new(-100.0, s);
        for _ in 0..50 {
            accumulate_barrier_time(&mut p, &b, 0.01);
        }
        assert_eq!(p.tau, 0.0);

        let mut p = PathRecord::new(0.0, s);
        for _ in 0..7 {
            accumulate_barrier_time(&mut p, &b, 0.25);
        }
        assert_eq!(p.tau, 7.0 * 0.25);

        // enter, leave, re-enter
        let mut p = PathRecord::new(-6.0, s);
        let track = [-6.0, -5.0, 0.0, 4.0, 5.5, 8.0, 5.0, 2.0, 6.0];
        for x in track {
            p.x = x;
            accumulate_barrier_time(&mut p, &b, 0.5);
        }
        assert_eq!(p.tau, 5.0 * 0.5);
    }

    #[test]
    fn zero_noise_constant_drift() {
        let g = Grid1D::with_spacing(-100.0, 100.0, 0.1).unwrap();
        let v0 = 0.7;
        let psi = g.points().map(|x| Complex64::from_polar(1.0, v0 * x)).collect();
        let state = WaveState { grid: g, psi, t: 0.0 };
        let field = DriftField::new(&state, 1.0, 1.0, DEFAULT_DELTA_REG, f64::INFINITY).unwrap();
        // The phase gradient is resolved by a central difference.
        let v_grid = (v0 * g.dx()).sin() / g.dx();
        let mut ens = PathEnsemble {
            paths: vec![PathRecord::new(-20.0, PathStream::new(0, 0))],
            t: 0.0,
            step: 0,
            master_seed: 0,
        };
        let b = barrier();
        let params = StepParams { barrier: &b, grid: &g, dt: 0.01, noise_sd: 0.0 };
        advance_paths(&mut ens, &field, &params);
        assert!((ens.paths[0].x - (-20.0 + v_grid * 0.01)).abs() < 1e-13);
        assert_eq!(ens.t, 0.01);
    }

    #[test]
    fn noise_moments() {
        let dt: f64 = 0.01;
        let sd = dt.sqrt();
        let n = 1_000_000u64;
        let s = PathStream::new(17, 0);
        let (mut sum, mut sum2) = (0.0, 0.0);
        for k in 0..n {
            let dw = sd * s.normal(k);
            sum += dw;
            sum2 += dw * dw;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 * sd / (n as f64).sqrt());
        assert!((var / dt - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn wall_hits_are_clamped_and_counted() {
        let g = Grid1D::with_spacing(-10.0, 10.0, 0.1).unwrap();
        let psi = g.points().map(|x| Complex64::from_polar(1.0, 5.0 * x)).collect();
        let state = WaveState { grid: g, psi, t: 0.0 };
        let field = DriftField::new(&state, 1.0, 1.0, DEFAULT_DELTA_REG, f64::INFINITY).unwrap();
        let mut ens = PathEnsemble {
            paths: vec![PathRecord::new(9.99, PathStream::new(0, 0))],
            t: 0.0,
            step: 0,
            master_seed: 0,
        };
        let b = BarrierSpec::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let params = StepParams { barrier: &b, grid: &g, dt: 0.1, noise_sd: 0.0 };
        let c = advance_paths(&mut ens, &field, &params);
        assert_eq!(c.wall_hits, 1);
        assert_eq!(ens.paths[0].x, 10.0);
        assert!(ens.paths[0].hit_wall);
    }

    #[test]
    fn classification() {
        let s = PathStream::new(0, 0);
        let mut ens = PathEnsemble {
            paths: vec![PathRecord::new(100.0, s), PathRecord::new(-600.0, s), PathRecord::new(1.0, s)],
            t: 0.0,
            step: 0,
            master_seed: 0,
        };
        let c = classify_paths(&mut ens, &barrier());
        assert_eq!((c.transmitted, c.reflected, c.undecided), (1, 1, 1));
        assert_eq!(ens.paths[0].status, PathStatus::Transmitted);
        assert_eq!(ens.paths[1].status, PathStatus::Reflected);
        assert_eq!(ens.paths[2].status, PathStatus::Undecided);
        assert!(c.tf_too_short());
    }
}
