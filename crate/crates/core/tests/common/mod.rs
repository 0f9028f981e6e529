#![allow(dead_code)]

use nelson_tunnel::stats::{ks_critical, ks_statistic};
use nelson_tunnel::{SimulationConfig, WaveState};

/// Small box and narrow packet: same physics as the desk profile at a
/// fraction of the cost.
pub fn compact(d: f64, n_paths: usize) -> SimulationConfig {
    SimulationConfig {
        x_min: -200.0,
        x_max: 200.0,
        x_mean: -60.0,
        delta_x: 10.0,
        d,
        n_paths,
        master_seed: 11,
        ..SimulationConfig::desk()
    }
}

/// KS distance of `positions` against `|psi|^2`, with the 1% critical value.
pub fn ks_against_density(positions: &[f64], state: &WaveState) -> (f64, f64) {
    let table = state.cdf();
    let d = ks_statistic(positions, |x| state.cdf_at(&table, x));
    (d, ks_critical(positions.len(), 0.01))
}
