import json
import math
import os
import subprocess

import numpy as np
import pytest

import pulseforge as pf

ALPHA_HZ = -212e6


def test_fast_solution_hits_rotation_angle():
    problem = pf.heuristic_problem(ALPHA_HZ, 6e-9)
    out = pf.solve_fast(problem)
    coeffs = out["solution"]["coeffs"]
    assert len(coeffs) == problem["n_terms"]
    assert math.isclose(sum(coeffs) * 6e-9, math.pi / 2, rel_tol=1e-12)


def test_hd_first_even_coefficient():
    sol = pf.solve_hd([abs(ALPHA_HZ)], 6e-9)
    alpha = 2 * math.pi * ALPHA_HZ
    assert math.isclose(sol["beta_even"][1], 1 / alpha**2, rel_tol=1e-12)


def test_hd_spectrum_vanishes_at_anharmonicity():
    sol = pf.solve_hd([abs(ALPHA_HZ)], 6e-9)
    env = pf.envelope("hd", 6e-9, d_coeffs=sol["d_coeffs"], beta_even=sol["beta_even"])
    _, iq = pf.spectrum(env, [ALPHA_HZ, ALPHA_HZ * 1.001, 0.0], beta=1.0, alpha_hz=ALPHA_HZ)
    assert abs(iq[0]) < 1e-9 * abs(iq[2])
    assert abs(iq[1]) < 1e-4 * abs(iq[2])

    i, q = pf.sample_waveform(env, dt=10e-12)
    assert i.shape == q.shape and i.size > 500


def test_distortion_round_trip():
    line = {"kind": "intra", "terms": [{"a": -0.028, "tau_s": 8e-9}]}
    dt = 0.1e-9
    i = np.where(np.arange(3000) < 1500, 1.0, 0.0)
    q = np.zeros_like(i)
    pi, pq = pf.predistort(i, q, dt, line)
    ri, rq = pf.apply_distortion(pi, pq, dt, line)
    assert np.max(np.abs(ri - i)) < 1e-3
    assert np.max(np.abs(rq)) < 1e-12


def test_depolarizing_rb_recovers_error():
    fit = pf.depolarizing_rb(2e-3, [1, 20, 50, 100, 200], sequences=20, seed=3)
    assert fit["eps_g"] == pytest.approx(2e-3, rel=0.1)
    again = pf.depolarizing_rb(2e-3, [1, 20, 50, 100, 200], sequences=20, seed=3)
    assert again == fit


def test_readout_correction_inverts_assignment():
    matrix = [[0.98, 0.02, 0.0], [0.05, 0.93, 0.02], [0.01, 0.09, 0.90]]
    truth = np.array([0.7, 0.25, 0.05])
    measured = np.array(matrix).T @ truth
    p, negative = pf.correct_readout(measured, matrix)
    assert not negative
    assert np.allclose(p, truth, atol=1e-12)


def test_bad_input_raises_config_error():
    with pytest.raises(pf.ConfigError):
        pf.solve_fast({"duration_s": 6e-9, "intervals": [{"f_low_hz": 3e8, "f_high_hz": 2e8}]})
    with pytest.raises(ValueError):
        pf.solve_hd([212e6], -1.0)


@pytest.mark.skipif("PULSEFORGE_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_module(tmp_path):
    out = tmp_path / "fast.json"
    subprocess.run(
        [os.environ["PULSEFORGE_CLI"], "synth", "--method", "fast", "--heuristic",
         "--alpha", str(ALPHA_HZ), "--tp", "6e-9", "--out", str(out)],
        check=True,
    )
    cli = json.loads(out.read_text())
    mod = pf.solve_fast(pf.heuristic_problem(ALPHA_HZ, 6e-9))
    assert cli["solution"]["coeffs"] == pytest.approx(mod["solution"]["coeffs"], rel=1e-12)
