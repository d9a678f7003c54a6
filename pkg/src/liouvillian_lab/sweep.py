"""One-parameter sweeps of the two-level Liouvillian spectrum.

Each grid point gets a numeric eigendecomposition; branches are made
continuous along the sweep by minimal-cost matching, branch 1 is pinned
to the trivial coherence eigenstate (0, 1, 1, 0), and per-row arc/EP
flags are attached.  Output is deterministic: identical specs produce
identical bytes.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import __version__
from .densec import eig
from .spectra import ARC_TOL, EP_TOL, detect_ep, gauge_fix
from .twolevel import TwoLevelParams, liouvillian

VARIED_NAMES = ("gamma1", "gamma2", "omega", "dissipation")

CSV_HEADER = ("param, re_l1, im_l1, re_l2, im_l2, re_l3, im_l3, re_l4, im_l4, "
              "re_rho10_b2, im_rho10_b2, re_rho10_b3, im_rho10_b3, "
              "re_rho10_b4, im_rho10_b4, arc_flags, ep_flag")

TRIVIAL_STATE = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)


@dataclass
class SweepSpec:
    varied: str
    start: float
    stop: float
    steps: int
    fixed: TwoLevelParams
    outputs: frozenset = frozenset({"eigenvalues", "eigenstates", "arcs", "eps"})

    def __post_init__(self):
        if self.varied not in VARIED_NAMES:
            raise ValueError(f"unknown parameter {self.varied!r}")
        if not self.start < self.stop:
            raise ValueError("sweep range must have start < stop")
        if self.steps < 2:
            raise ValueError("a sweep needs at least 2 steps")
        self.outputs = frozenset(self.outputs)

    def grid(self):
        return np.linspace(self.start, self.stop, self.steps)

    def params_at(self, value):
        return replace(self.fixed, **{self.varied: float(value)})


@dataclass
class SweepResult:
    spec: SweepSpec
    params: np.ndarray          # (steps,)
    branches: np.ndarray        # (steps, 4) complex, continuity-sorted
    rho10: np.ndarray           # (steps, 3) complex, branches 2-4 gauge-fixed
    arc_flags: list             # per row, 4-char bitstring over branches
    ep_flags: list              # per row, 0/1
    warnings: list = field(default_factory=list)   # (row, message)
    errors: list = field(default_factory=list)     # (row, message)
    tolerances: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, SweepResult):
            return NotImplemented
        return (self.spec == other.spec
                and np.array_equal(self.params, other.params)
                and np.array_equal(self.branches, other.branches)
                and np.array_equal(self.rho10, other.rho10)
                and self.arc_flags == other.arc_flags
                and self.ep_flags == other.ep_flags
                and self.warnings == other.warnings
                and self.errors == other.errors
                and self.tolerances == other.tolerances)


def _worker_count(n_workers):
    if n_workers is not None:
        return max(1, int(n_workers))
    env = os.environ.get("LIOUVILLIAN_LAB_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _row_compute(p, arc_tol, ep_tol):
    L = liouvillian(p)
    res = eig(L.matrix)
    clusters = detect_ep(L, ep_tol)
    return res.values, res.vectors, int(any(c.is_ep for c in clusters))


def run_sweep(spec, arc_tol=ARC_TOL, ep_tol=EP_TOL, n_workers=None):
    """Execute a sweep.  Per-row numeric failures are recorded in
    `errors` (the row is NaN-filled) and never abort the sweep; branch
    matching is done serially after the parallel row computations, so
    the result is independent of worker count.
    """
    grid = spec.grid()
    points = []
    for v in grid:
        try:
            points.append(spec.params_at(v))
        except Exception as exc:   # invalid parameter point, e.g. negative rate
            points.append(exc)

    def safe(p):
        if isinstance(p, Exception):
            return p
        try:
            return _row_compute(p, arc_tol, ep_tol)
        except Exception as exc:  # annotated per-row below
            return exc

    workers = _worker_count(n_workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raw_rows = list(pool.map(safe, points))
    else:
        raw_rows = [safe(p) for p in points]

    n_br = 4
    branches = np.full((spec.steps, n_br), np.nan, dtype=complex)
    rho10 = np.full((spec.steps, 3), np.nan, dtype=complex)
    arc_flags, ep_flags, warnings, errors = [], [], [], []
    prev = None
    for i, row in enumerate(raw_rows):
        if isinstance(row, Exception):
            errors.append((i, str(row)))
            arc_flags.append("----")
            ep_flags.append(0)
            prev = None
            continue
        values, vectors, ep_flag = row
        if prev is None:
            # branch 1 is the trivial coherence state, rest lexicographic
            overlap = np.abs(TRIVIAL_STATE.conj() @ vectors)
            triv = int(np.argmax(overlap))
            rest = [j for j in range(n_br) if j != triv]
            rest.sort(key=lambda j: (values[j].real, values[j].imag))
            perm = np.array([triv] + rest)
        else:
            cost = np.abs(prev[:, None] - values[None, :])
            ri, ci = linear_sum_assignment(cost)
            perm = np.empty(n_br, dtype=int)
            perm[ri] = ci
            chosen = cost[np.arange(n_br), perm]
            margin = np.inf
            for j in range(n_br):
                others = np.delete(cost[j], perm[j])
                margin = min(margin, float(np.min(others) - chosen[j]))
            if margin < 10 * 1e-10:
                warnings.append((i, f"branch matching margin {margin:.3e}"))
        branches[i] = values[perm]
        for k, j in enumerate(perm[1:]):
            try:
                rho10[i, k] = gauge_fix(vectors[:, j])[2]
            except ValueError:
                pass
        on = np.abs(branches[i].real) <= arc_tol * (1.0 + np.abs(branches[i]))
        arc_flags.append("".join("1" if f else "0" for f in on))
        ep_flags.append(ep_flag)
        prev = branches[i]

    return SweepResult(spec=spec, params=grid, branches=branches, rho10=rho10,
                       arc_flags=arc_flags, ep_flags=ep_flags,
                       warnings=warnings, errors=errors,
                       tolerances={"arc": arc_tol, "ep": ep_tol})


def find_steady_gamma2(gamma1, omega, dissipation, bracket, tol=1e-10):
    """Bisect gamma2 so the least-damped branch has Im(lambda) = 0.

    The objective is max Im over the spectrum; the bracket must change
    its sign.
    """
    lo, hi = float(bracket[0]), float(bracket[1])

    def f(g2):
        p = TwoLevelParams(gamma1=gamma1, gamma2=g2, omega=omega,
                           dissipation=dissipation)
        return float(np.max(eig(liouvillian(p).matrix).values.imag))

    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(
            f"no sign change of max Im(lambda) over [{lo}, {hi}]: "
            f"f(lo)={flo:.3e}, f(hi)={fhi:.3e}")
    while True:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if abs(fmid) <= tol or (hi - lo) < 1e-14 * max(1.0, abs(hi)):
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid


def _fmt(x):
    return repr(float(x))


def emit(result, fmt, destination):
    """Write a SweepResult as CSV or JSON.

    CSV follows the fixed two-level schema; columns whose output flag is
    off are left empty, and with no flags at all only the header is
    written.  Identical inputs produce identical bytes.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    text = _to_csv(result) if fmt == "csv" else _to_json(result)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        try:
            with open(destination, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write sweep output to {destination}: {exc}") from exc


def _to_csv(result):
    out = result.spec.outputs
    lines = [CSV_HEADER]
    if out:
        for i in range(result.params.size):
            cells = [_fmt(result.params[i])]
            if "eigenvalues" in out:
                for b in range(4):
                    cells += [_fmt(result.branches[i, b].real),
                              _fmt(result.branches[i, b].imag)]
            else:
                cells += [""] * 8
            if "eigenstates" in out:
                for k in range(3):
                    cells += [_fmt(result.rho10[i, k].real),
                              _fmt(result.rho10[i, k].imag)]
            else:
                cells += [""] * 6
            cells.append(result.arc_flags[i] if "arcs" in out else "")
            cells.append(str(result.ep_flags[i]) if "eps" in out else "")
            lines.append(", ".join(cells))
    return "\n".join(lines) + "\n"


def _to_json(result):
    spec = result.spec
    doc = {
        "metadata": {
            "artifact_version": __version__,
            "varied": spec.varied,
            "start": spec.start,
            "stop": spec.stop,
            "steps": spec.steps,
            "fixed": {
                "gamma1": spec.fixed.gamma1, "gamma2": spec.fixed.gamma2,
                "omega": spec.fixed.omega, "dissipation": spec.fixed.dissipation,
            },
            "outputs": sorted(spec.outputs),
            "tolerances": result.tolerances,
        },
        "rows": [
            {
                "param": float(result.params[i]),
                "eigenvalues": [[result.branches[i, b].real, result.branches[i, b].imag]
                                for b in range(4)],
                "rho10": [[result.rho10[i, k].real, result.rho10[i, k].imag]
                          for k in range(3)],
                "arc_flags": result.arc_flags[i],
                "ep_flag": result.ep_flags[i],
            }
            for i in range(result.params.size)
        ],
        "warnings": [[i, msg] for i, msg in result.warnings],
        "errors": [[i, msg] for i, msg in result.errors],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_json(source):
    """Parse a JSON document written by emit back into a SweepResult."""
    if hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    meta = doc["metadata"]
    spec = SweepSpec(
        varied=meta["varied"], start=meta["start"], stop=meta["stop"],
        steps=meta["steps"],
        fixed=TwoLevelParams(**meta["fixed"]),
        outputs=frozenset(meta["outputs"]))
    rows = doc["rows"]
    params = np.array([r["param"] for r in rows])
    branches = np.array([[complex(re, im) for re, im in r["eigenvalues"]]
                         for r in rows])
    rho10 = np.array([[complex(re, im) for re, im in r["rho10"]] for r in rows])
    return SweepResult(
        spec=spec, params=params, branches=branches, rho10=rho10,
        arc_flags=[r["arc_flags"] for r in rows],
        ep_flags=[r["ep_flag"] for r in rows],
        warnings=[(i, msg) for i, msg in doc["warnings"]],
        errors=[(i, msg) for i, msg in doc["errors"]],
        tolerances=meta["tolerances"])
