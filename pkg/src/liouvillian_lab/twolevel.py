"""Closed-form results for the two-level gain/loss system with one
decay channel.

Parameters are (gamma1, gamma2, omega, dissipation): loss and gain rates,
coherent coupling, and the rate of the sigma_minus decay channel.  The
Hamiltonian is H = [[-i gamma1, omega], [omega, i gamma2]] / 2.

The quartic Liouvillian spectrum factors into the trivial coherence
eigenvalue lambda1 = i eta_minus / 2 and a cubic solved by the cube-root
intermediate Theta; Lambda(x) at x in {0, +sqrt(3), -sqrt(3)} enumerates
the three remaining roots.  All comparisons against these closed forms
must be multiset comparisons: a different cube-root branch permutes
lambda2..lambda4.

Known misprints in the source expressions, kept visible rather than
silently fixed:
  * the incoherent degeneracy at omega = 0, dissipation = gamma1 + gamma2
    is quoted as lambda = -2i gamma1, while the spectrum actually
    degenerates at -i gamma1 (nlep_incoherent returns both);
  * the first component of the second closed-form eigenstate needs
    3 eta_plus^2 (not 3 eta_plus) to be an eigenvector;
  * the quoted coherence relation Omega (rho00 - rho11) / (2 lambda -
    i eta_minus) gives rho10; rho01 is its negative.
"""

import numpy as np
from dataclasses import dataclass

from .densec import eig, rank_at
from .vectorize import Channel, OpenSystem, build_liouvillian

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


class DegenerateTheta(Exception):
    """Theta is too close to zero for the closed forms; use numeric eig."""


class OmegaZero(Exception):
    """Closed-form eigenstates 2-4 are undefined at omega = 0."""


class TrivialBranch(Exception):
    """The coherence relation does not apply on the 2 lambda = i eta_minus branch."""


class OffLocus(Exception):
    """Parameters do not satisfy the coherent degeneracy condition."""


@dataclass
class TwoLevelParams:
    gamma1: float
    gamma2: float
    omega: float
    dissipation: float

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0 or self.dissipation < 0:
            raise ValueError("gamma1, gamma2 and dissipation must be nonnegative")


class Intermediates:
    """eta_plus, eta_minus, Theta and Lambda(x) for a parameter point.

    Theta uses the principal complex square and cube roots.
    """

    def __init__(self, p):
        self.eta_plus = p.gamma1 + p.gamma2 - p.dissipation
        self.eta_minus = -p.gamma1 + p.gamma2 - p.dissipation
        G, om = p.dissipation, p.omega
        disc = complex(2916 * G**2 * om**4 - 27 * (self.eta_plus**2 - 4 * om**2) ** 3)
        self.theta = complex(54 * G * om**2 + np.sqrt(disc)) ** (1.0 / 3.0)
        self._quad = self.eta_plus**2 - 4 * om**2

    def degenerate(self, p):
        floor = 1e-6 * (1.0 + abs(self.eta_plus) + abs(p.omega) + p.dissipation)
        return abs(self.theta) < floor

    def lambda_of_x(self, x):
        th = self.theta
        return (1j + x) * th / 6.0 + (1j - x) * self._quad / (2.0 * th)


def hamiltonian(p):
    """The 2x2 non-Hermitian Hamiltonian [[-i g1, om], [om, i g2]] / 2."""
    return 0.5 * np.array(
        [[-1j * p.gamma1, p.omega], [p.omega, 1j * p.gamma2]], dtype=complex)


def open_system(p):
    """OpenSystem with the sigma_minus decay channel at the given rate."""
    channels = []
    if p.dissipation > 0:
        channels.append(Channel(rate=p.dissipation, op=SIGMA_MINUS))
    return OpenSystem(hamiltonian=hamiltonian(p), channels=channels)


def liouvillian(p):
    return build_liouvillian(open_system(p))


def analytic_eigenvalues(p):
    """The four closed-form eigenvalues, as an array (treat as a multiset).

    Raises DegenerateTheta near the 0/0 point of Lambda; callers fall
    back to numeric eig there.
    """
    inter = Intermediates(p)
    if inter.degenerate(p):
        raise DegenerateTheta(f"|Theta| = {abs(inter.theta):.3e} below floor")
    em = inter.eta_minus
    lam = inter.lambda_of_x
    return np.array([
        0.5j * em,
        0.5j * (em - 2j * lam(0.0)),
        0.5j * (em + 1j * lam(np.sqrt(3.0))),
        0.5j * (em + 1j * lam(-np.sqrt(3.0))),
    ])


def analytic_eigenstates(p):
    """The four closed-form eigenstates as rows, in the order of
    analytic_eigenvalues.  States 2-4 have last component 1; state 1 is
    (0, 1, 1, 0).
    """
    inter = Intermediates(p)
    if inter.degenerate(p):
        raise DegenerateTheta(f"|Theta| = {abs(inter.theta):.3e} below floor")
    if p.omega == 0:
        raise OmegaZero("closed-form states 2-4 are undefined at omega = 0")
    ep, th, om = inter.eta_plus, inter.theta, p.omega
    states = [np.array([0, 1, 1, 0], dtype=complex)]
    a0 = ep + 2j * inter.lambda_of_x(0.0)
    # 3*ep**2 here; the printed 3*ep fails the eigen-equation
    states.append(np.array([
        1 - a0 * (3 * ep**2 + th**2 - 12 * om**2) / (6 * om**2 * th),
        -1j * a0 / (2 * om), 1j * a0 / (2 * om), 1.0]))
    for x in (np.sqrt(3.0), -np.sqrt(3.0)):
        lx = inter.lambda_of_x(x)
        ax = ep - 1j * lx
        states.append(np.array([
            1 + ax * (-1j * lx) / (2 * om**2),
            -1j * ax / (2 * om), 1j * ax / (2 * om), 1.0]))
    return states


def coherence_relation(rho00, rho11, lam, p, tol=1e-9):
    """Predicted rho10 = omega (rho00 - rho11) / (2 lambda - i eta_minus);
    the rho01 element is the negative of the returned value.
    """
    inter = Intermediates(p)
    denom = 2 * lam - 1j * inter.eta_minus
    if abs(denom) <= tol * (1.0 + abs(lam)):
        raise TrivialBranch("2 lambda = i eta_minus: relation undefined on this branch")
    return p.omega * (rho00 - rho11) / denom


def steady_s1(gamma1, gamma2):
    """Maximally mixed steady state at dissipation = (gamma1 + gamma2) / 2.

    Returns (dissipation, state).  L @ state = 0 holds exactly only when
    gamma1 == gamma2 (the incoherent eigen-equation forces dissipation =
    gamma1 and = gamma2 simultaneously); the published average formula
    overstates the family, so callers should verify the null property at
    their parameters.
    """
    if gamma1 < 0 or gamma2 < 0:
        raise ValueError("rates must be nonnegative")
    return 0.5 * (gamma1 + gamma2), np.array([0.5, 0, 0, 0.5], dtype=complex)


def steady_s2(gamma1, dissipation):
    """Diagonal steady state of the omega = 0 system at gamma2 = dissipation.

    Returns (gamma2, state) with state = (G/(g1+g2), 0, 0, (g1+g2-G)/(g1+g2)).
    """
    gamma2 = dissipation
    total = gamma1 + gamma2
    if total <= 0:
        raise ValueError("gamma1 + dissipation must be positive")
    state = np.array([dissipation / total, 0, 0, (total - dissipation) / total],
                     dtype=complex)
    return gamma2, state


def nlep_incoherent(gamma1, gamma2):
    """Fourfold degeneracy of the omega = 0 system at dissipation =
    gamma1 + gamma2.

    Returns (dissipation, lambda_published, lambda_derived, state).  The
    quoted value is -2i gamma1; the spectrum actually degenerates at
    -i gamma1 (geometric multiplicity 3).  Both are reported.
    """
    G = gamma1 + gamma2
    lam_published = -2j * gamma1
    lam_derived = -1j * gamma1
    state = np.array([1, 0, 0, 0], dtype=complex)
    return G, lam_published, lam_derived, state


def ep_locus_gamma0(gamma1, omega):
    """The two exceptional points of the dissipation-free system:
    gamma2 = +2 omega - gamma1 and gamma2 = -2 omega - gamma1.
    """
    return 2 * omega - gamma1, -2 * omega - gamma1


def nlep_coherent_locus(omega, dissipation):
    """eta_plus values where the coherent pair degenerates:
    eta_plus = +/- sqrt(3 (4 G^2 om^4)^(1/3) + 4 om^2).

    gamma2 follows from eta_plus = gamma1 + gamma2 - dissipation.
    """
    if dissipation <= 0 or omega == 0:
        raise ValueError("requires dissipation > 0 and omega != 0")
    root = np.sqrt(3 * (4 * dissipation**2 * omega**4) ** (1.0 / 3.0) + 4 * omega**2)
    return root, -root


def nlep_coherent_pair(p, tol=1e-6):
    """Degenerate eigenvalue and eigenstate on the coherent locus:
    lambda = i [eta_minus - (2 G om^2)^(1/3)] / 2.

    Raises OffLocus when the locus condition is violated beyond tol.
    """
    inter = Intermediates(p)
    target = 3 * (4 * p.dissipation**2 * p.omega**4) ** (1.0 / 3.0) + 4 * p.omega**2
    if abs(inter.eta_plus**2 - target) > tol * (1.0 + abs(target)):
        raise OffLocus(
            f"eta_plus^2 = {inter.eta_plus**2:.6g} vs locus value {target:.6g}")
    c = (2 * p.dissipation * p.omega**2) ** (1.0 / 3.0)
    lam = 0.5j * (inter.eta_minus - c)
    ep, om = inter.eta_plus, p.omega
    state = np.array([
        1 + (ep + c) * c / (2 * om**2),
        -1j * (ep + c) / (2 * om), 1j * (ep + c) / (2 * om), 1.0])
    return lam, state
