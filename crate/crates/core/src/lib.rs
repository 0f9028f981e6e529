//! Tunneling-time distributions from Nelson's stochastic mechanics.
//!
//! A Gaussian wave packet is propagated through a rectangular barrier with
//! Crank-Nicolson; an ensemble of Langevin sample paths is driven by the
//! osmotic and current velocities of the evolving wavefunction, and each
//! path's total time inside the barrier is its tunneling time.

pub mod artifacts;
pub mod config;
pub mod drift;
pub mod error;
pub mod field;
pub mod lockstep;
pub mod paths;
pub mod plotdata;
pub mod rng;
pub mod runner;
pub mod scaling;
pub mod stats;

pub use config::{FitMethod, Profile, SimulationConfig, Weighting};
pub use drift::{drift_at, regularized_density, DriftField, DriftSample};
pub use error::{Error, Result};
pub use field::{
    init_gaussian, rect_potential, step_propagator, BarrierSpec, CrankNicolson, Grid1D, PacketSpec,
    PotentialField, WaveState,
};
pub use lockstep::{run_lockstep, Checkpoint, Lockstep, RunDiagnostics};
pub use paths::{
    accumulate_barrier_time, advance_paths, classify_paths, init_paths, Classification, PathEnsemble,
    PathRecord, PathStatus,
};
pub use stats::{
    build_histogram, fit_gamma_least_squares, fit_gamma_mle, gamma_moments, gamma_pdf, moments,
    regime_slope, wkb_time, GammaFit, TunnelingHistogram,
};
pub use runner::{
    analyze_times, run_sweep, simulate, sweep_config, FitOptions, PathBudget, RunOutcome, RunSummary, SweepEntry,
    SweepKind, SweepRow, SweepTable, TimeStats,
};
pub use scaling::{deviation_crossover, scaled_config, scaled_frame, unscale_times, ScaledFrame, ScalingSpec};
pub use plotdata::{emit_plot_data, write_plot_data, FigureId};
