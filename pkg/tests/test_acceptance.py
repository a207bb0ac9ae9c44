"""Exit criteria for the package, one test per criterion.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""
import json
import math
import time

import numpy as np
import pytest

from optpot import (
    SampledFunction,
    directional_derivative,
    finite_difference_check,
    gram_matrix,
    inner_product,
    lowest_eigenpairs,
    make_grid,
    minimality_oracle,
    preset_potentials,
    sample_potential,
    solve_inverse,
    system_residual,
)
from optpot.cli import main

PRESETS = ("zero", "constant", "harmonic", "square_well")


def _refinement_ratio(targets):
    r = []
    for n in (255, 511):
        g = make_grid(math.pi, n)
        V0 = SampledFunction.constant(g, 0.0)
        sol = solve_inverse(V0, targets)
        r.append(system_residual(sol.u_hat, sol.sigma, V0, targets, stencil="fourth_order").max_residual)
    return r[0] / r[1]


def test_c01_forward_accuracy():
    """Criterion 1: forward accuracy |E_k - k^2| <= k^4 h^2/6, k<=5; second-order refinement; < 2 s"""
    t0 = time.perf_counter()
    g = make_grid(math.pi, 2000)
    E = lowest_eigenpairs(SampledFunction.constant(g, 0.0), 5).eigenvalues
    for k, e in enumerate(E, start=1):
        assert abs(e - k**2) <= k**4 * g.h**2 / 6
    fine = g.refined()
    assert fine.h == pytest.approx(g.h / 2, rel=1e-15)
    e_fine = lowest_eigenpairs(SampledFunction.constant(fine, 0.0), 1)[0].E
    ratio = abs(E[0] - 1) / abs(e_fine - 1)
    assert 3.5 <= ratio <= 4.5
    assert time.perf_counter() - t0 < 2.0


def test_c02_shift_identity():
    """Criterion 2: square well + 7 shifts every eigenvalue by 7 within 1e-10"""
    g = make_grid(math.pi, 2000)
    V0 = sample_potential(preset_potentials(math.pi)["square_well"], g)
    e0 = lowest_eigenpairs(V0, 5).eigenvalues
    e7 = lowest_eigenpairs(V0 + 7.0, 5).eigenvalues
    assert np.max(np.abs(e7 - e0 - 7.0)) <= 1e-10


def test_c03_oscillation_orthonormality():
    """Criterion 3: node count k-1 and eigenfunction Gram = I within 1e-8, all presets, k<=5"""
    g = make_grid(math.pi, 2000)
    for name in PRESETS:
        spec = lowest_eigenpairs(sample_potential(preset_potentials(math.pi)[name], g), 5)
        assert [p.nodes for p in spec] == [0, 1, 2, 3, 4], name
        G = np.array([[inner_product(a.phi, b.phi) for b in spec] for a in spec])
        assert np.max(np.abs(G - np.eye(5))) <= 1e-8, name


def test_c04_derivative_validation():
    """Criterion 4: finite-difference check <= 1e-4 on 20 random cases; constant direction = 1 within 1e-10; < 10 s"""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    g = make_grid(math.pi, 2000)
    presets = preset_potentials(math.pi)
    worst = 0.0
    for _ in range(20):
        name = PRESETS[rng.integers(len(PRESETS))]
        a = rng.normal(0.0, 3.0, 3)
        V = sample_potential(presets[name], g) + SampledFunction(
            g, sum(a[j] * np.cos((j + 1) * g.x) for j in range(3)))
        b = rng.normal(size=4)
        h = SampledFunction(g, sum(b[j] * np.sin((j + 1) * g.x + b[-1]) for j in range(4)))
        k = int(rng.integers(1, 6))
        worst = max(worst, finite_difference_check(V, k, h, 1e-4))
    assert worst <= 1e-4
    one = SampledFunction.constant(g, 1.0)
    for name in PRESETS:
        V = sample_potential(presets[name], g)
        for k in (1, 3, 5):
            assert abs(directional_derivative(V, k, one) - 1.0) <= 1e-10
    assert time.perf_counter() - t0 < 10.0


def test_c05_closed_form_gram():
    """Criterion 5: free Gram matrix m=2 closed form within 1e-6; smallest eigenvalue 1/(2 pi) for m<=6"""
    g = make_grid(math.pi, 2000)
    V = SampledFunction.constant(g, 0.0)
    expected = np.array([[3 / (2 * math.pi), 1 / math.pi], [1 / math.pi, 3 / (2 * math.pi)]])
    assert np.max(np.abs(gram_matrix(V, 2).entries - expected)) <= 1e-6
    for m in range(2, 7):
        assert abs(gram_matrix(V, m).smallest_eigenvalue - 1 / (2 * math.pi)) <= 1e-6


def test_c06_trivial_case():
    """Criterion 6: targets = E(V0), harmonic, m=3 -> distance 0, sigma 0, V_hat = V0"""
    g = make_grid(math.pi, 2000)
    V0 = sample_potential(preset_potentials(math.pi)["harmonic"], g)
    sol = solve_inverse(V0, lowest_eigenpairs(V0, 3).eigenvalues)
    assert sol.distance <= 1e-8
    assert np.all(sol.sigma == 0)
    assert (sol.V_hat - V0).sup_norm() <= 1e-8


def test_c07_inverse_m1(zero_pi):
    """Criterion 7: m=1, E*=2 -> residual <= 1e-9, stationarity <= 1e-6, sigma=-1, reconstruction 1e-12, O(h^2) system residual; < 30 s"""
    t0 = time.perf_counter()
    sol = solve_inverse(zero_pi, (2.0,))
    assert sol.constraint_residuals.max() <= 1e-9
    assert sol.stationarity_residual <= 1e-6
    assert list(sol.sigma) == [-1]
    assert (sol.reconstruction() - sol.V_hat).sup_norm() <= 1e-12
    assert system_residual(sol.u_hat, sol.sigma, zero_pi, (2.0,)).max_residual <= 1e-7
    ratio = _refinement_ratio((2.0,))
    assert 3.5 <= ratio <= 4.5
    assert time.perf_counter() - t0 < 30.0


def test_c08_inverse_m2(sol_m2, zero_pi):
    """Criterion 8: m=2, targets (2,5) -> same thresholds and sum |sigma| >= 1"""
    sol = sol_m2
    assert sol.constraint_residuals.max() <= 1e-9
    assert sol.stationarity_residual <= 1e-6
    assert np.sum(np.abs(sol.sigma)) >= 1
    assert (sol.reconstruction() - sol.V_hat).sup_norm() <= 1e-12
    assert system_residual(sol.u_hat, sol.sigma, zero_pi, (2.0, 5.0)).max_residual <= 1e-7
    assert 3.5 <= _refinement_ratio((2.0, 5.0)) <= 4.5


def test_c09_minimality_vs_oracle(sol_m1, sol_m2, zero_pi):
    """Criterion 9: solver distance <= 1.02 * oracle distance (basis 32, 5 trials, fixed seed); < 5 min"""
    t0 = time.perf_counter()
    for sol, targets in ((sol_m1, (2.0,)), (sol_m2, (2.0, 5.0))):
        rep = minimality_oracle(zero_pi, targets, basis_dim=32, trials=5, seed=12345, solution=sol)
        assert rep.feasible
        assert rep.solver_distance <= rep.oracle_distance * 1.02
        assert rep.oracle_distance >= rep.solver_distance * 0.98
    assert time.perf_counter() - t0 < 300.0


def test_c10_cli_round_trip(tmp_path):
    """Criterion 10: CLI inverse -> potential.csv -> forward reproduces targets within 1e-8; report.json deterministic"""
    conf = tmp_path / "inverse.yaml"
    conf.write_text("mode: inverse\nL: pi\nn: 2000\npotential: {kind: zero}\ntargets: [2, 5]\n")
    assert main(["--config", str(conf), "--output", str(tmp_path / "run1"), "--quiet"]) == 0
    assert main(["--config", str(conf), "--output", str(tmp_path / "run2"), "--quiet"]) == 0

    fwd = tmp_path / "forward.yaml"
    fwd.write_text("mode: forward\nL: pi\nn: 2000\nm: 2\n"
                   "potential: {kind: samples, path: run1/potential.csv, column: v_hat}\n")
    assert main(["--config", str(fwd), "--output", str(tmp_path / "fwd"), "--quiet"]) == 0
    E = json.loads((tmp_path / "fwd" / "report.json").read_text())["eigenvalues"]
    assert np.max(np.abs(np.array(E) - [2.0, 5.0])) <= 1e-8

    def strip_wall_time(path):
        lines = path.read_text(encoding="utf-8").splitlines()
        return [ln for ln in lines if '"wall_time_s"' not in ln]

    assert strip_wall_time(tmp_path / "run1" / "report.json") == strip_wall_time(tmp_path / "run2" / "report.json")
