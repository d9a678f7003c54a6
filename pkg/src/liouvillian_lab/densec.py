"""Dense complex-matrix kernel: Kronecker products, nonsymmetric
eigendecomposition, propagator application and numerical rank tests.

All residual bounds are relative to the Frobenius norm of the input
matrix.  Functions are pure and never mutate their arguments.
"""

import numpy as np
import scipy.linalg
from dataclasses import dataclass

EIG_TOL = 1e-10
PROPAGATE_TOL = 1e-9
RANK_TOL = 1e-8


class ConvergenceError(Exception):
    """Eigensolver failed to meet the requested residual bound."""

    def __init__(self, message, achieved_residual):
        super().__init__(f"{message} (achieved residual {achieved_residual:.3e})")
        self.achieved_residual = achieved_residual


def _as_matrix(a):
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def _require_square(m):
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")


def kron(a, b):
    """Kronecker product: block (i, j) of the result is a[i, j] * b."""
    return np.kron(_as_matrix(a), _as_matrix(b))


@dataclass
class EigenResult:
    """Eigenvalues and unit-norm right eigenvectors of a dense matrix.

    ``vectors[:, j]`` belongs to ``values[j]``.  For every pair,
    ``norm(M v - lambda v) <= residual_bound * norm(M, 'fro')``.
    Defective matrices yield repeated eigenvalues and (numerically)
    parallel vectors; use ``rank_at`` to measure geometric multiplicity.
    """

    values: np.ndarray
    vectors: np.ndarray
    residual_bound: float


def _fix_vector_phase(v):
    # unit norm, largest-magnitude component rotated real positive
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    phase = v[k] / abs(v[k])
    return v / phase


def eig(m, tol=EIG_TOL):
    """All eigenpairs of a square complex matrix.

    Raises ConvergenceError if the relative residual exceeds `tol`.
    """
    m = _as_matrix(m)
    _require_square(m)
    values, vectors = scipy.linalg.eig(m)
    for j in range(vectors.shape[1]):
        vectors[:, j] = _fix_vector_phase(vectors[:, j])
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return EigenResult(values, vectors, 0.0)
    residual = np.max(np.linalg.norm(m @ vectors - vectors * values, axis=0))
    bound = residual / scale
    if bound > tol:
        raise ConvergenceError("eigendecomposition did not converge", bound)
    return EigenResult(values, vectors, bound)


def propagate(m, v, t, tol=PROPAGATE_TOL):
    """Apply exp(-i m t) to v via scaling-and-squaring."""
    m = _as_matrix(m)
    _require_square(m)
    v = np.asarray(v, dtype=complex)
    if v.shape != (m.shape[0],):
        raise ValueError(f"vector shape {v.shape} does not match matrix dimension {m.shape[0]}")
    return scipy.linalg.expm(-1j * t * m) @ v


def rank_at(m, lam, tol=RANK_TOL):
    """Numerical rank of (m - lam*I); geometric multiplicity is dim - rank."""
    m = _as_matrix(m)
    _require_square(m)
    shifted = m - lam * np.eye(m.shape[0])
    s = np.linalg.svd(shifted, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))
