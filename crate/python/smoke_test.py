"""Smoke test for the Python bindings. Run after `pip install -e crates/py --no-build-isolation`."""

import json
import math
import random

import nelson_tunnel_py as nt


def main():
    cfg = nt.Config("desk")
    cfg.x_min, cfg.x_max = -200.0, 200.0
    cfg.x_mean, cfg.delta_x = -60.0, 10.0
    cfg.d = 1.0
    cfg.n_paths = 500
    cfg.master_seed = 3
    cfg.validate()
    assert nt.Config.from_text(cfg.to_text()).to_text() == cfg.to_text()
    assert abs(cfg.tau_wkb() - 1.0) < 1e-12

    run = nt.simulate(cfg)
    print(run)
    assert run.transmitted + run.reflected + run.undecided == 500
    assert len(run.times) == run.transmitted
    assert abs(run.transmitted_fraction - run.pde_transmitted_probability) < 0.1
    summary = json.loads(run.summary_json())
    assert summary["transmitted"] == run.transmitted

    # Gamma fits recover known parameters (alpha = shape - 1).
    rng = random.Random(0)
    sample = [rng.gammavariate(3.0, 0.5) for _ in range(20000)]
    a, b = nt.fit_mle(sample)
    assert abs(a - 2.0) < 0.1 and abs(b - 0.5) < 0.02, (a, b)
    a, b = nt.fit_least_squares(sample)
    assert abs(a - 2.0) < 0.5 and abs(b - 0.5) < 0.05, (a, b)
    mean, sd = nt.gamma_moments(2.0, 0.5)
    assert abs(mean - 1.5) < 1e-12 and abs(sd - math.sqrt(0.75)) < 1e-12
    stats = json.loads(nt.analyze(sample))
    assert stats["n"] == 20000

    t = nt.plane_wave_transmission(1.0, 1.0, 0.5)
    assert abs(t - 1.0 / math.cosh(1.0) ** 2) < 1e-12

    scaled = nt.scaled_config(cfg, 0.5)
    assert abs(scaled.d - 2.0) < 1e-12 and scaled.v0 == cfg.v0

    print("python smoke test passed")


if __name__ == "__main__":
    main()
