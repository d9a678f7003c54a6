"""Classification of Liouvillian spectra: steady-state verdicts,
exceptional-point detection, gauge fixing, coherence-phase checks,
Fermi-arc scanning and branch continuity sorting.
"""

import numpy as np
from dataclasses import dataclass, field
from scipy.optimize import linear_sum_assignment

from .densec import eig, rank_at

HAS_STEADY_STATE = "HasSteadyState"
ALL_DECAYING = "AllDecaying"
UNSTABLE = "Unstable"

HALF_PI = "HalfPi"
NOT_APPLICABLE = "NotApplicable"
VIOLATED = "Violated"

STEADY_TOL = 1e-9
# defective eigenvalues split like eps**(1/k) for a size-k Jordan block,
# so the cluster radius must sit above eps**(1/3) ~ 6e-6
EP_TOL = 1e-5
PHASE_TOL = 1e-8
ARC_TOL = 1e-9


@dataclass
class EPCluster:
    """A coalescing eigenvalue cluster: mean location, algebraic count and
    geometric multiplicity from the numerical rank test."""

    mean: complex
    algebraic: int
    geometric: int

    @property
    def is_ep(self):
        return self.geometric < self.algebraic


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    states: np.ndarray          # gauge-fixed, one per column
    verdict: str
    steady_indices: list
    ep_clusters: list
    phase_verdicts: list
    tolerances: dict = field(default_factory=dict)


def classify_steady(eigenvalues, tol_s=None):
    """Steady-state verdict from the imaginary parts of the spectrum.

    HasSteadyState: some Im(lambda) = 0 within tol and none positive;
    Unstable: some Im(lambda) > tol; AllDecaying otherwise.
    The default tolerance is relative: 1e-9 * (1 + max |lambda|).
    """
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    if eigenvalues.size == 0:
        raise ValueError("empty spectrum")
    if tol_s is None:
        tol_s = STEADY_TOL * (1.0 + np.max(np.abs(eigenvalues)))
    im = eigenvalues.imag
    if np.any(im > tol_s):
        return UNSTABLE, []
    steady = [int(j) for j in np.nonzero(np.abs(im) <= tol_s)[0]]
    if steady:
        return HAS_STEADY_STATE, steady
    return ALL_DECAYING, []


def _single_linkage_clusters(values, radius):
    order = np.argsort(values.real + 1e-9 * values.imag, kind="stable")
    clusters = []
    assigned = np.full(values.size, -1)
    for j in range(values.size):
        if assigned[j] >= 0:
            continue
        stack, members = [j], []
        assigned[j] = len(clusters)
        while stack:
            k = stack.pop()
            members.append(k)
            near = np.nonzero((np.abs(values - values[k]) <= radius) & (assigned < 0))[0]
            for n in near:
                assigned[n] = len(clusters)
                stack.append(int(n))
        clusters.append(sorted(members))
    return clusters


def detect_ep(L, tol=EP_TOL):
    """Find coalescing eigenvalue clusters of a generator and measure
    their multiplicities.  Accepts a Liouvillian or any square matrix.

    Eigenvalues are merged by single linkage at radius tol*(1 + max|lambda|);
    geometric multiplicity comes from the numerical rank at the cluster
    mean.  Only clusters of algebraic size >= 2 are returned.
    """
    matrix = L.matrix if hasattr(L, "matrix") else np.asarray(L, dtype=complex)
    res = eig(matrix)
    radius = tol * (1.0 + np.max(np.abs(res.values))) if res.values.size else tol
    clusters = []
    for members in _single_linkage_clusters(res.values, radius):
        if len(members) < 2:
            continue
        mean = complex(np.mean(res.values[members]))
        geometric = matrix.shape[0] - rank_at(matrix, mean)
        clusters.append(EPCluster(mean=mean, algebraic=len(members),
                                  geometric=min(geometric, len(members))))
    return clusters


def gauge_fix(state):
    """Scale a vectorized state so the last diagonal element (rho11 for a
    two-level system) equals 1; if that element (nearly) vanishes, scale
    so the largest-magnitude component is real positive 1.

    Idempotent and invariant under multiplication by any nonzero scalar.
    """
    v = np.asarray(state, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot gauge-fix the zero vector")
    k = v.size - 1
    if abs(v[k]) < 1e-12 * norm:
        k = int(np.argmax(np.abs(v)))
    anchor = v[k]
    if anchor == 1.0:
        return v.copy()
    out = v / anchor
    out[k] = 1.0     # pin exactly so the map is idempotent to the bit
    return out


def phase_check(state, lam, p, tol=PHASE_TOL):
    """Coherence-phase verdict for a gauge-fixed two-level eigenstate.

    On a Fermi arc (Re lambda = 0) with omega != 0 and an actual
    coherence to test, the off-diagonal element must be purely imaginary
    (phase |pi/2|).  Incoherent states and the trivial coherence branch
    (0, 1, 1, 0) report NotApplicable.
    """
    v = np.asarray(state, dtype=complex)
    if v.shape != (4,):
        raise ValueError(f"expected a 4-vector, got shape {v.shape}")
    rho00, rho01, rho10, rho11 = v
    scale = max(1.0, float(np.max(np.abs(v))))
    if abs(lam.real) > tol:
        return NOT_APPLICABLE
    if p.omega == 0:
        return NOT_APPLICABLE
    if abs(rho01) <= tol * scale and abs(rho10) <= tol * scale:
        return NOT_APPLICABLE          # incoherent state, nothing to test
    if abs(rho00) <= tol * scale and abs(rho11) <= tol * scale:
        return NOT_APPLICABLE          # trivial coherence branch (0,1,1,0)
    if abs(rho01.real) <= tol * scale and abs(rho01.imag) > tol * scale:
        return HALF_PI
    return VIOLATED


@dataclass
class ArcSegment:
    branch: int
    start_index: int
    end_index: int     # inclusive
    start_param: float
    end_param: float
    trivial: bool = False


def fermi_arc_scan(params, branches, tol=ARC_TOL, trivial_branch=None):
    """Maximal parameter intervals where a continuity-sorted branch has
    Re(lambda) = 0 within tol*(1 + |lambda|).

    `branches` is (n_points, n_branches) complex.  A branch that is on
    the arc at every point is flagged trivial (the identically-imaginary
    coherence branch) when its index matches `trivial_branch`, or when
    the arc covers the full sweep.
    """
    params = np.asarray(params, dtype=float)
    branches = np.asarray(branches, dtype=complex)
    segments = []
    for b in range(branches.shape[1]):
        on = np.abs(branches[:, b].real) <= tol * (1.0 + np.abs(branches[:, b]))
        j = 0
        while j < on.size:
            if not on[j]:
                j += 1
                continue
            k = j
            while k + 1 < on.size and on[k + 1]:
                k += 1
            trivial = (trivial_branch == b) or (j == 0 and k == on.size - 1)
            segments.append(ArcSegment(branch=b, start_index=j, end_index=k,
                                       start_param=float(params[j]),
                                       end_param=float(params[k]),
                                       trivial=bool(trivial)))
            j = k + 1
    return segments


def continuity_sort(spectra, tol=1e-10):
    """Order eigenvalue multisets along a sweep into continuous branches.

    Consecutive rows are matched by minimal-total-distance assignment;
    the first row is ordered lexicographically by (Re, Im).  Returns
    (branches, warnings): branches is (n_rows, n_branches) complex and a
    warning records every step whose matching margin falls below 10x the
    eigensolver tolerance (possible branch crossing).
    """
    rows = [np.asarray(s, dtype=complex) for s in spectra]
    n = rows[0].size
    for r in rows:
        if r.size != n:
            raise ValueError("all spectra must have the same size")
    first = rows[0][np.lexsort((rows[0].imag, rows[0].real))]
    out = np.empty((len(rows), n), dtype=complex)
    out[0] = first
    warnings = []
    for i in range(1, len(rows)):
        cost = np.abs(out[i - 1][:, None] - rows[i][None, :])
        ri, ci = linear_sum_assignment(cost)
        perm = np.empty(n, dtype=int)
        perm[ri] = ci
        out[i] = rows[i][perm]
        if n > 1:
            chosen = cost[np.arange(n), perm]
            margin = np.inf
            for j in range(n):
                others = np.delete(cost[j], perm[j])
                margin = min(margin, float(np.min(others) - chosen[j]))
            if margin < 10 * tol:
                warnings.append((i, margin))
    return out, warnings


def analyze(L, p=None, tol_s=None, ep_tol=EP_TOL, phase_tol=PHASE_TOL):
    """Full spectral report for one Liouvillian: eigenpairs (gauge-fixed),
    steady verdict, EP clusters and (for two-level systems with params
    given) coherence-phase verdicts."""
    res = eig(L.matrix)
    states = np.empty_like(res.vectors)
    for j in range(states.shape[1]):
        states[:, j] = gauge_fix(res.vectors[:, j])
    verdict, steady = classify_steady(res.values, tol_s)
    clusters = detect_ep(L, ep_tol)
    phases = []
    if p is not None and L.dim == 2:
        phases = [phase_check(states[:, j], res.values[j], p, phase_tol)
                  for j in range(states.shape[1])]
    return SpectralReport(
        eigenvalues=res.values, states=states, verdict=verdict,
        steady_indices=steady, ep_clusters=clusters, phase_verdicts=phases,
        tolerances={"steady": tol_s if tol_s is not None else STEADY_TOL,
                    "ep": ep_tol, "phase": phase_tol})
