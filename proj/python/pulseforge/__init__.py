"""Python front end for the pulseforge core.

Structured inputs and outputs are plain dicts; they travel to the native module as JSON.
"""

import json

from . import _pulseforge as _core
from ._pulseforge import CalibrationError, ConfigError, NumericError

__all__ = [
    "CalibrationError",
    "ConfigError",
    "NumericError",
    "apply_distortion",
    "band_energy",
    "correct_readout",
    "depolarizing_rb",
    "envelope",
    "heuristic_problem",
    "predistort",
    "run_experiment",
    "sample_waveform",
    "solve_fast",
    "solve_hd",
    "spectrum",
]


def _doc(kind, fields):
    out = {"schema": _core.schema_id(kind)}
    out.update(fields)
    return json.dumps(out)


def heuristic_problem(alpha_hz, tp, theta=1.5707963267948966, variant="drag_l"):
    return json.loads(_core.heuristic_problem(alpha_hz, tp, theta, variant))


def solve_fast(problem):
    """problem: dict with duration_s, intervals and optionally n_terms, theta."""
    return json.loads(_core.solve_fast(_doc("fast_problem", _strip(problem))))


def solve_hd(suppressed_freqs_hz, duration_s):
    doc = _doc("hd_problem", {"suppressed_freqs_hz": list(suppressed_freqs_hz), "duration_s": duration_s})
    return json.loads(_core.solve_hd(doc))


def envelope(kind, duration_s, **fields):
    """Envelope document, e.g. envelope("fast", 6e-9, coeffs=[...])."""
    out = {"schema": _core.schema_id("envelope"), "kind": kind, "duration_s": duration_s}
    out.update(fields)
    return out


def sample_waveform(env, dt=10e-12, beta=0.0, alpha_hz=0.0, variant="drag_l"):
    return _core.sample_waveform(json.dumps(env), dt, beta, alpha_hz, variant)


def spectrum(env, freqs, beta=0.0, alpha_hz=0.0, variant="drag_l"):
    return _core.spectrum(json.dumps(env), list(freqs), beta, alpha_hz, variant)


def band_energy(env, f_low, f_high, component="i", beta=0.0, alpha_hz=0.0):
    return _core.band_energy(json.dumps(env), f_low, f_high, component, beta, alpha_hz)


def run_experiment(config):
    """config: experiment dict (model, pulse, calibration, run_rb, rb)."""
    return json.loads(_core.run_experiment(_doc("experiment", _strip(config))))


def depolarizing_rb(eps, lengths, sequences=25, seed=1234):
    return _core.depolarizing_rb(eps, list(lengths), sequences, seed)


def apply_distortion(i, q, dt, distortion):
    return _core.apply_distortion(i, q, dt, _doc("distortion", _strip(distortion)))


def predistort(i, q, dt, distortion, extend=0):
    return _core.predistort(i, q, dt, _doc("distortion", _strip(distortion)), extend)


def correct_readout(measured, matrix):
    return _core.correct_readout(list(measured), _doc("assignment", {"matrix": [list(r) for r in matrix]}))


def _strip(d):
    return {k: v for k, v in d.items() if k != "schema"}
