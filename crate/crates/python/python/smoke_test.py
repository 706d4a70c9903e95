"""Smoke test for the tabu_forge_py extension module.

Build and run:
    cargo build -p tabu-forge-py --release
    cp target/release/libtabu_forge_py.so crates/python/python/tabu_forge_py.so
    python3 crates/python/python/smoke_test.py
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import tabu_forge_py as tf


def main():
    assert "tenbar" in tf.problem_names()

    ref = tf.ten_bar_reference()
    mass = tf.ten_bar_mass(ref)
    assert abs(mass - 1598) < 0.1 * 1598, mass
    assert tf.ten_bar_violations(ref) == [0.0, 0.0, 0.0]
    sol = tf.ten_bar_solve(ref)
    assert len(sol["axial_force"]) == 10
    assert sol["residual"] < 1e-6

    p = tf.critical_buckling_load(6.88e6, math.pi, 100.0)
    assert abs(p - math.pi**2 * 6.88e6 * (math.pi / 4) / 1e4) < 1e-9 * p

    assert tf.quantize([0.0], [1.0], [0.25], [0.3]) == [0.25]

    cfg = tf.SearchConfig(seed=3, max_evaluations=2000)
    res = tf.solve_problem("twobasin", cfg)
    assert math.dist(res.best_vector, [2.0, 2.0]) < 1.0, res
    hill = tf.solve_problem("twobasin", cfg.hill_climber())
    assert math.dist(hill.best_vector, [2.0, 2.0]) > 1.0, hill
    best = res.best_so_far()
    assert all(b <= a for a, b in zip(best, best[1:]))

    def sphere(x):
        return sum((v - 1.0) ** 2 for v in x), [max(0.0, x[0] - 0.5)]

    r = tf.minimize(sphere, [-3.0, -3.0], [3.0, 3.0], [0.01, 0.01],
                    config=tf.SearchConfig(max_evaluations=3000), weights=[100.0])
    assert abs(r.best_vector[1] - 1.0) < 1e-9 and r.best_vector[0] <= 0.6, r.best_vector

    params = [4.0, 1.0, 10.0, -1.0]
    assert tf.pole_objective(params) > 0
    assert tf.pole_profile(params)[0] == (0.0, 0.0)
    br, bz = tf.pole_field(params, 2.0, 1.0)
    assert bz > 0

    try:
        tf.ten_bar_mass([1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("short vector accepted")

    print("tabu_forge_py smoke test passed:", res)


if __name__ == "__main__":
    main()
