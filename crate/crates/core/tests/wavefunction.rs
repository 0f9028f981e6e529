mod common;

use approx::assert_abs_diff_eq;
use nelson_tunnel::{
    init_gaussian, rect_potential, BarrierSpec, CrankNicolson, Grid1D, Lockstep, PacketSpec, PotentialField,
};

fn free_width(delta_x: f64, t: f64) -> f64 {
    (delta_x * delta_x + t * t / (4.0 * delta_x * delta_x)).sqrt()
}

#[test]
fn free_packet_spreads_by_the_analytic_law() {
    // Spreading does not depend on <p>, so a packet at rest fits a small box.
    let delta_x = 5.0;
    let grid = Grid1D::with_spacing(-120.0, 120.0, 0.1).unwrap();
    let packet = PacketSpec::new(0.0, 0.0, delta_x, 1.0).unwrap();
    let mut state = init_gaussian(&packet, &grid, 1.0).unwrap();
    let mut cn = CrankNicolson::new(&PotentialField::zero(grid), 0.01, 1.0, 1.0).unwrap();
    let t_end = 2.0 * delta_x * delta_x;
    let checks = 10;
    let per_check = (t_end / 0.01 / checks as f64).round() as usize;
    let norm0 = state.norm();
    for k in 1..=checks {
        for _ in 0..per_check {
            cn.step(&mut state).unwrap();
        }
        let t = (k * per_check) as f64 * 0.01;
        let w = state.variance_x().sqrt();
        let rel = (w / free_width(delta_x, t) - 1.0).abs();
        assert!(rel < 0.01, "t = {t}: width {w} vs {}", free_width(delta_x, t));
    }
    assert_abs_diff_eq!(state.norm(), norm0, epsilon = 1e-8);
}

#[test]
fn initial_packet_moments() {
    let c = common::compact(1.0, 10);
    let state = init_gaussian(&c.packet().unwrap(), &c.grid().unwrap(), 1.0).unwrap();
    assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(state.mean_x(), c.x_mean, epsilon = c.dx);
    assert!((state.variance_x() / (c.delta_x * c.delta_x) - 1.0).abs() < 1e-3);
    // Central differences give sin(k dx)/dx.
    assert_abs_diff_eq!(state.mean_p(1.0), c.p_mean, epsilon = 2e-3);
    assert!(state.probability_in_region(f64::NEG_INFINITY, -0.5) > 1.0 - 1e-6);
}

#[test]
fn barrier_run_conserves_norm_energy_and_probability() {
    let c = common::compact(1.0, 10);
    let mut ls = Lockstep::new(&c).unwrap();
    let e0 = ls.state().energy(ls.potential(), 1.0, 1.0);
    let half = 0.5 * c.d;
    for _ in 0..12 {
        ls.run_until(ls.t() + 10.0).unwrap();
        let s = ls.state();
        let total = s.probability_in_region(f64::NEG_INFINITY, -half)
            + s.probability_in_region(-half, half)
            + s.probability_in_region(half, f64::INFINITY);
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
        let e = s.energy(ls.potential(), 1.0, 1.0);
        assert!((e / e0 - 1.0).abs() < 1e-3, "t = {}: energy {e} vs {e0}", ls.t());
    }
    let (_, diag, _) = ls.run_to_end().unwrap();
    assert!(diag.max_norm_drift < 1e-8, "norm drift {}", diag.max_norm_drift);
    assert!(!diag.hit_tf_cap);
}

#[test]
fn transmitted_probability_matches_plane_wave_for_a_broad_packet() {
    // A packet much wider than the barrier transmits close to T(E0).
    let mut c = common::compact(1.0, 10);
    c.x_min = -600.0;
    c.x_max = 600.0;
    c.delta_x = 40.0;
    c.x_mean = -250.0;
    let (_, diag, _) = Lockstep::new(&c).unwrap().run_to_end().unwrap();
    let t = c.barrier().unwrap().transmission(c.e0()).unwrap();
    assert!((diag.transmitted_probability_final / t - 1.0).abs() < 0.02, "{} vs {t}", diag.transmitted_probability_final);
}

#[test]
fn barrier_potential_has_the_requested_area() {
    let grid = Grid1D::with_spacing(-20.0, 20.0, 0.1).unwrap();
    for d in [0.25, 1.0, 2.37, 10.0] {
        let v = rect_potential(&BarrierSpec::new(1.0, d, 1.0, 1.0).unwrap(), &grid).unwrap();
        let area: f64 = v.values.iter().sum::<f64>() * grid.dx();
        assert_abs_diff_eq!(area, d, epsilon = 1e-9);
    }
}
