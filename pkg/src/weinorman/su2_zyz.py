"""
Closed forms for SU(2) in ZYZ Euler-angle coordinates,
U(g1, g2, g3) = exp(g1 A_3) exp(g2 A_2) exp(g3 A_3), with the basis of
:func:`weinorman.lie_core.build_su_basis` (A_2 = 1/2 [[0, -1], [1, 0]]).

Singular set: sin(g2) = 0, i.e. g2 in {-pi, 0, pi, 2pi} inside (-2pi, 2pi].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .schedule import ControlSchedule
from .wei_norman import EPS_SING, ZYZ, SingularChart, XiMatrix

__all__ = [
    "ZYZ",
    "ALTERNATE_ORDER",
    "ZyzAngles",
    "u_zyz",
    "xi_zyz",
    "xi_inv_zyz",
    "spin_half_model",
]

ALTERNATE_ORDER = (1, 2, 1)


@dataclass(frozen=True)
class ZyzAngles:
    g1: float
    g2: float
    g3: float

    def __post_init__(self):
        for name in ("g1", "g2", "g3"):
            v = float(getattr(self, name))
            if not -2 * np.pi < v <= 2 * np.pi:
                raise ValueError(f"{name}={v} outside (-2pi, 2pi]")
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, angles) -> "ZyzAngles":
        if isinstance(angles, cls):
            return angles
        return cls(*np.asarray(angles, dtype=float))

    def as_array(self) -> np.ndarray:
        return np.array([self.g1, self.g2, self.g3])

    def singular(self, eps: float = EPS_SING) -> bool:
        return abs(np.sin(self.g2)) <= eps


def u_zyz(angles) -> np.ndarray:
    """Closed-form ZYZ product of exponentials."""
    a = ZyzAngles.of(angles)
    c, s = np.cos(a.g2 / 2), np.sin(a.g2 / 2)
    plus = np.exp(0.5j * (a.g1 + a.g3))
    minus = np.exp(0.5j * (a.g1 - a.g3))
    return np.array([
        [plus * c, -minus * s],
        [np.conj(minus) * s, np.conj(plus) * c],
    ])


def xi_zyz(angles) -> XiMatrix:
    a = ZyzAngles.of(angles)
    s1, c1 = np.sin(a.g1), np.cos(a.g1)
    s2, c2 = np.sin(a.g2), np.cos(a.g2)
    m = np.array([
        [0.0, -s1, c1 * s2],
        [0.0, c1, s1 * s2],
        [1.0, 0.0, c2],
    ])
    return XiMatrix(m, a.as_array())


def xi_inv_zyz(angles, eps_sing: float = EPS_SING) -> np.ndarray:
    """Closed-form inverse of :func:`xi_zyz`; raises :class:`SingularChart` on the singular set."""
    a = ZyzAngles.of(angles)
    s1, c1 = np.sin(a.g1), np.cos(a.g1)
    s2, c2 = np.sin(a.g2), np.cos(a.g2)
    if abs(s2) <= eps_sing:
        raise SingularChart(-s2, a.as_array(), ZYZ)
    cot, csc = c2 / s2, 1.0 / s2
    return np.array([
        [-c1 * cot, -s1 * cot, 1.0],
        [-s1, c1, 0.0],
        [c1 * csc, s1 * csc, 0.0],
    ])


def spin_half_model(a3: float, u1: Callable[[float], float] | None = None,
                    u2: Callable[[float], float] | None = None,
                    horizon: float = 1.0) -> ControlSchedule:
    """Spin-1/2 in a static Z field with transverse X/Y drive.

    Drift (0, 0, a3), no control along Z; ``u1``/``u2`` are the X/Y fields.
    """
    controls = {}
    if u1 is not None:
        controls[1] = u1
    if u2 is not None:
        controls[2] = u2
    return ControlSchedule(np.array([0.0, 0.0, a3]), controls, horizon)
