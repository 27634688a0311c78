"""
Direct integration of U'(t) = G(t) U(t), U(0) = I on SU(N), with
G(t) = sum_j (a_j + u_j(t)) A_j, plus the product-of-exponentials map.

This is the reference route every coordinate trajectory is checked against.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_core import LieBasis, expm
from .schedule import ControlSchedule, time_grid

__all__ = [
    "UnitaryTrajectory",
    "integrate_unitary",
    "product_of_exponentials",
    "pexp",
    "apply",
    "normalize",
    "phase_distance",
    "unitarity_defect",
]


@dataclass(frozen=True)
class UnitaryTrajectory:
    times: np.ndarray
    unitaries: np.ndarray  # (M+1, N, N)

    @property
    def final(self) -> np.ndarray:
        return self.unitaries[-1]

    def states(self, psi0) -> np.ndarray:
        """|psi(t_k)> = U(t_k)|psi0> for every sample, shape (M+1, N)."""
        return self.unitaries @ normalize(psi0)


def integrate_unitary(basis: LieBasis, schedule: ControlSchedule, step: float) -> UnitaryTrajectory:
    """Exponential midpoint rule, U_{k+1} = expm(h G(t_k + h/2)) U_k.

    Each factor is an exact unitary, so unitarity holds at every sample; the
    global error is O(h^2).
    """
    if schedule.n != basis.n:
        raise ValueError(f"schedule has {schedule.n} coefficients, basis has {basis.n}")
    times = time_grid(schedule.horizon, step)
    out = np.empty((times.size, basis.N, basis.N), dtype=complex)
    u = np.eye(basis.N, dtype=complex)
    out[0] = u
    for k in range(times.size - 1):
        h = times[k + 1] - times[k]
        g = basis.matrix(schedule.coefficients(times[k] + 0.5 * h))
        u = expm(h * g) @ u
        out[k + 1] = u
    return UnitaryTrajectory(times, out)


def product_of_exponentials(basis: LieBasis, order, gamma) -> np.ndarray:
    """prod_k exp(gamma_k A_{order[k]}), leftmost factor k = 1 (labels 1-based)."""
    gamma = np.asarray(gamma, dtype=float)
    if len(order) != gamma.size:
        raise ValueError("order and gamma have different lengths")
    u = np.eye(basis.N, dtype=complex)
    for label, g in zip(order, gamma):
        u = u @ basis.exp_generator(label, g)
    return u


def pexp(chart) -> np.ndarray:
    """Group element of a coordinate chart (anything with basis, order, gamma)."""
    return product_of_exponentials(chart.basis, chart.order, chart.gamma)


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if not nrm > 0:
        raise ValueError("zero state vector")
    return psi / nrm


def apply(u, psi0) -> np.ndarray:
    u = np.asarray(u)
    psi0 = np.asarray(psi0, dtype=complex).ravel()
    if u.shape != (psi0.size, psi0.size):
        raise ValueError(f"cannot apply a {u.shape} matrix to a state of length {psi0.size}")
    return normalize(u @ psi0)


def phase_distance(phi, psi) -> float:
    """1 - |<phi|psi>| for normalized states; zero iff equal up to global phase."""
    return max(0.0, 1.0 - abs(np.vdot(normalize(phi), normalize(psi))))


def unitarity_defect(u) -> tuple[float, float]:
    """(||U^dag U - I||_F, |det U - 1|)."""
    u = np.asarray(u)
    eye = np.eye(u.shape[0])
    return float(np.linalg.norm(u.conj().T @ u - eye)), float(abs(np.linalg.det(u) - 1.0))
