"""Row-stacking vectorization of the master equation.

The generator is stored in the Hamiltonian convention: d/dt rho_vec =
-i L rho_vec, so an eigenvalue lambda contributes a phase exp(-i lambda t)
and stationarity means Im(lambda) = 0.

Under row stacking vec(A X B) = (A kron B^T) vec(X), so the dissipative
part of the superoperator uses entrywise conjugates of the jump operators
(not daggers).  Channels carry a rate r; the effective jump amplitude is
sqrt(r) * op, which makes the rate enter the generator linearly.
"""

import numpy as np
from dataclasses import dataclass, field

from .densec import _as_matrix, _require_square, kron

CONVENTION = "hamiltonian-convention-row-stacking"


@dataclass
class Channel:
    """One dissipative channel: nonnegative rate and an N x N jump operator."""

    rate: float
    op: np.ndarray

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"channel rate must be nonnegative, got {self.rate}")
        self.op = _as_matrix(self.op)
        _require_square(self.op)


@dataclass
class OpenSystem:
    """Finite-dimensional open system: a (generally non-Hermitian)
    Hamiltonian plus a list of dissipative channels."""

    hamiltonian: np.ndarray
    channels: list = field(default_factory=list)

    def __post_init__(self):
        self.hamiltonian = _as_matrix(self.hamiltonian)
        _require_square(self.hamiltonian)
        for ch in self.channels:
            if ch.op.shape != self.hamiltonian.shape:
                raise ValueError(
                    f"channel operator shape {ch.op.shape} does not match "
                    f"system dimension {self.dim}")

    @property
    def dim(self):
        return self.hamiltonian.shape[0]


@dataclass
class Liouvillian:
    """The N^2 x N^2 generator with evolution d/dt rho_vec = -i L rho_vec."""

    dim: int
    matrix: np.ndarray
    convention: str = CONVENTION


def vec_row(rho):
    """Row-stack an N x N matrix into a length-N^2 vector.

    For N = 2 the order is (rho00, rho01, rho10, rho11).
    """
    rho = _as_matrix(rho)
    _require_square(rho)
    return rho.reshape(-1).copy()


def unvec_row(v):
    """Inverse of vec_row; the input length must be a perfect square."""
    v = np.asarray(v, dtype=complex)
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape(n, n).copy()


def build_liouvillian(sys):
    """Assemble the vectorized generator of the non-Hermitian Lindblad
    equation under row stacking.

    L = (H kron I - I kron conj(H))
        + i * sum_mu r_mu * [C kron conj(C) - (C^dag C kron I)/2
                             - (I kron conj(C^dag C))/2]
    """
    n = sys.dim
    I = np.eye(n, dtype=complex)
    H = sys.hamiltonian
    L = kron(H, I) - kron(I, H.conj())
    for ch in sys.channels:
        C = ch.op
        CdC = C.conj().T @ C
        L = L + 1j * ch.rate * (
            kron(C, C.conj()) - 0.5 * kron(CdC, I) - 0.5 * kron(I, CdC.conj()))
    return Liouvillian(dim=n, matrix=L)


def rhs_direct(sys, rho):
    """Matrix-form right-hand side of the master equation; the independent
    oracle for build_liouvillian.

    Returns -i (H rho - rho H^dag)
            + sum_mu r_mu (C rho C^dag - {C^dag C, rho}/2).
    """
    rho = _as_matrix(rho)
    if rho.shape != sys.hamiltonian.shape:
        raise ValueError(
            f"density matrix shape {rho.shape} does not match system dimension {sys.dim}")
    H = sys.hamiltonian
    out = -1j * (H @ rho - rho @ H.conj().T)
    for ch in sys.channels:
        C = ch.op
        CdC = C.conj().T @ C
        out = out + ch.rate * (
            C @ rho @ C.conj().T - 0.5 * (CdC @ rho + rho @ CdC))
    return out
