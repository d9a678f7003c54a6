"""Time evolution of vectorized states under a Liouvillian.

Raw states follow d/dt rho_vec = -i L rho_vec exactly (matrix
exponential per step); trace-normalized states divide by the trace of
the unvectorized matrix, which is what makes populations of a
non-trace-preserving evolution readable as probabilities.
"""

import numpy as np
import scipy.linalg
from dataclasses import dataclass

from .vectorize import unvec_row

DIVERGING = "Diverging"
NOT_CONVERGED = "NotConverged"

TRACE_FLOOR = 1e-12
EVOLVE_TOL = 1e-9


@dataclass
class Trajectory:
    """times, raw vectorized states (one per row), their traces, and
    trace-normalized states (NaN rows where |trace| is below floor)."""

    times: np.ndarray
    raw_states: np.ndarray
    traces: np.ndarray
    normalized_states: np.ndarray


def _trace_of(v, n):
    return np.sum(v.reshape(n, n).diagonal())


def evolve(L, rho0, times, tol=EVOLVE_TOL):
    """Propagate rho0 over an increasing time grid starting at 0.

    Each step applies expm(-i L dt); step propagators are cached for
    uniform grids.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("times must be a 1-d grid")
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must increase from 0")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (L.dim ** 2,):
        raise ValueError(
            f"initial state length {rho0.size} does not match dim^2 = {L.dim ** 2}")

    raw = np.empty((times.size, rho0.size), dtype=complex)
    raw[0] = rho0
    cache = {}
    for i in range(1, times.size):
        dt = times[i] - times[i - 1]
        key = round(dt, 15)
        if key not in cache:
            cache[key] = scipy.linalg.expm(-1j * dt * L.matrix)
        raw[i] = cache[key] @ raw[i - 1]

    n = L.dim
    traces = np.array([_trace_of(v, n) for v in raw])
    normalized = np.full_like(raw, np.nan)
    norms = np.linalg.norm(raw, axis=1)
    ok = np.abs(traces) > TRACE_FLOOR * np.maximum(norms, 1e-300)
    normalized[ok] = raw[ok] / traces[ok, None]
    return Trajectory(times=times, raw_states=raw, traces=traces,
                      normalized_states=normalized)


def observables(traj, mode="trace"):
    """Two-level observable columns: populations, coherence rho10 and the
    trace.  mode selects raw or trace-normalized matrix elements."""
    if traj.raw_states.shape[1] != 4:
        raise ValueError("matrix-element observables require a two-level trajectory")
    if mode == "trace":
        states = traj.normalized_states
    elif mode == "raw":
        states = traj.raw_states
    else:
        raise ValueError(f"unknown normalization mode {mode!r}")
    return {
        "t": traj.times.copy(),
        "rho00": states[:, 0].real,
        "rho11": states[:, 3].real,
        "re_rho10": states[:, 2].real,
        "im_rho10": states[:, 2].imag,
        "re_trace": traj.traces.real,
        "im_trace": traj.traces.imag,
    }


def steady_limit(traj, window=20, tol=1e-6):
    """Asymptotic normalized state, or Diverging / NotConverged.

    Returns the mean of the last `window` normalized states when they
    agree pairwise within tol; Diverging when |trace| grows monotonically
    beyond 1e6x its initial value.
    """
    if traj.times.size < window:
        raise ValueError("trajectory shorter than the averaging window")
    mags = np.abs(traj.traces)
    if mags[-1] > 1e6 * max(mags[0], 1e-300):
        tail = mags[-min(window, mags.size):]
        if np.all(np.diff(tail) >= 0):
            return DIVERGING
    last = traj.normalized_states[-window:]
    if np.any(np.isnan(last)):
        return NOT_CONVERGED
    spread = 0.0
    for i in range(window):
        for j in range(i + 1, window):
            spread = max(spread, float(np.linalg.norm(last[i] - last[j])))
    if spread <= tol:
        return last.mean(axis=0)
    return NOT_CONVERGED
