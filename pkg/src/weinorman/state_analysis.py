"""
Isotropy tests modulo global phase and the sufficient universality condition:
if every point of the singular set maps into the isotropy subgroup of psi0,
the singular points are invisible from the state and the gates are universal.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lie_core import LieBasis, build_su_basis
from .propagator import normalize, phase_distance, product_of_exponentials
from .wei_norman import ZYZ, GammaChart, assemble_xi

__all__ = [
    "TAU_PHASE",
    "PhaseEquivClass",
    "in_state_isotropy",
    "in_gamma_isotropy",
    "ZyzSingularSampler",
    "DetRootSampler",
    "FixedSampler",
    "IsotropyReport",
    "universality_check",
]

TAU_PHASE = 1e-9

IDENTITY = "identity"
STATE_ONLY = "state-isotropy"
OUTSIDE = "outside"


@dataclass(frozen=True)
class PhaseEquivClass:
    representative: np.ndarray
    tol: float = TAU_PHASE

    def __post_init__(self):
        object.__setattr__(self, "representative", normalize(self.representative))

    def __contains__(self, psi) -> bool:
        return phase_distance(self.representative, psi) < self.tol


def in_state_isotropy(u, psi0, tol: float = TAU_PHASE) -> bool:
    """True iff U|psi0> equals |psi0> up to a global phase."""
    psi0 = normalize(psi0)
    u = np.asarray(u)
    if u.shape != (psi0.size, psi0.size):
        raise ValueError("dimension mismatch between U and psi0")
    return phase_distance(psi0, u @ psi0) < tol


def in_gamma_isotropy(chart: GammaChart, psi0, tol: float = TAU_PHASE) -> bool:
    u = product_of_exponentials(chart.basis, chart.order, chart.gamma)
    return in_state_isotropy(u, psi0, tol)


class ZyzSingularSampler:
    """Points on the four ZYZ singular slices g2 in {-pi, 0, pi, 2pi}, cycled in turn."""

    approximate = False
    slices = (-np.pi, 0.0, np.pi, 2 * np.pi)

    def sample(self, basis, order, rng, count):
        if tuple(order) != ZYZ or basis.n != 3:
            raise ValueError("ZyzSingularSampler only applies to the su(2) ZYZ ordering")
        pts = rng.uniform(-2 * np.pi, 2 * np.pi, size=(count, 3))
        pts[:, 1] = [self.slices[k % 4] for k in range(count)]
        return pts


class DetRootSampler:
    """Zeros of det Xi found by sign-change bisection along random lines through the cube.

    Only roots where det Xi changes sign are seen, hence ``approximate``.
    """

    approximate = True

    def __init__(self, lines: int = 1000, grid: int = 64, bisections: int = 60):
        self.lines = lines
        self.grid = grid
        self.bisections = bisections

    def _det(self, basis, order, g):
        return assemble_xi(GammaChart(basis, order, g)).det

    def sample(self, basis, order, rng, count):
        n = basis.n
        half = basis.periods[np.array(order) - 1] / 2
        half = np.where(np.isfinite(half), half, 2 * np.pi)
        found = []
        for _ in range(self.lines):
            if len(found) >= count:
                break
            p = rng.uniform(-half, half)
            d = rng.normal(size=n)
            d /= np.linalg.norm(d)
            s = np.linspace(-1.0, 1.0, self.grid) * np.linalg.norm(half)
            pts = np.clip(p + s[:, None] * d, -half, half)
            dets = np.array([self._det(basis, order, g) for g in pts])
            for k in np.nonzero(np.sign(dets[:-1]) * np.sign(dets[1:]) < 0)[0]:
                lo, hi, dlo = pts[k], pts[k + 1], dets[k]
                for _ in range(self.bisections):
                    mid = 0.5 * (lo + hi)
                    dm = self._det(basis, order, mid)
                    if np.sign(dm) == np.sign(dlo):
                        lo, dlo = mid, dm
                    else:
                        hi = mid
                found.append(0.5 * (lo + hi))
                if len(found) >= count:
                    break
        if not found:
            raise RuntimeError("no sign change of det Xi found along the sampled lines")
        return np.array(found)


class FixedSampler:
    """Caller-supplied points, used as they are."""

    def __init__(self, points, approximate: bool = False):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.approximate = approximate

    def sample(self, basis, order, rng, count):
        return self.points[:count] if count else self.points


@dataclass
class IsotropyReport:
    order: tuple
    psi0: np.ndarray
    points: np.ndarray
    members: np.ndarray
    classification: list
    verdict: str
    approximate: bool
    witnesses: np.ndarray = field(default=None)

    @property
    def condition_holds(self) -> bool:
        return bool(np.all(self.members))

    def to_dict(self) -> dict:
        return {
            "order": list(self.order),
            "psi0": [[float(z.real), float(z.imag)] for z in self.psi0],
            "samples": int(len(self.points)),
            "members": int(np.count_nonzero(self.members)),
            "verdict": self.verdict,
            "approximate_sampling": self.approximate,
            "classification_counts": {
                c: self.classification.count(c) for c in (IDENTITY, STATE_ONLY, OUTSIDE)
            },
            "witnesses": self.witnesses.tolist() if self.witnesses is not None else [],
        }


def universality_check(order, psi0, sampler=None, samples: int = 100, basis: LieBasis | None = None,
                       seed: int = 0, tol: float = TAU_PHASE) -> IsotropyReport:
    """Test the sufficient condition 'singular set inside the gamma-isotropy of psi0' on samples.

    The verdict is ``"universal"`` when every sampled singular point leaves
    psi0 unchanged up to phase, and ``"inconclusive"`` otherwise (the
    condition is only sufficient, so failure never proves non-universality).
    """
    psi0 = normalize(psi0)
    if basis is None:
        basis = build_su_basis(psi0.size)
    order = tuple(order)
    if sampler is None:
        sampler = ZyzSingularSampler() if order == ZYZ and basis.n == 3 else DetRootSampler()
    rng = np.random.default_rng(seed)
    points = np.atleast_2d(sampler.sample(basis, order, rng, samples))

    members, classes = [], []
    eye = np.eye(basis.N)
    for g in points:
        u = product_of_exponentials(basis, order, g)
        inside = in_state_isotropy(u, psi0, tol)
        members.append(inside)
        if np.linalg.norm(u - eye) < 1e-10:
            classes.append(IDENTITY)
        else:
            classes.append(STATE_ONLY if inside else OUTSIDE)
    members = np.array(members, dtype=bool)
    verdict = "universal" if members.all() else "inconclusive"
    return IsotropyReport(
        order=order,
        psi0=psi0,
        points=points,
        members=members,
        classification=classes,
        verdict=verdict,
        approximate=bool(sampler.approximate),
        witnesses=points[~members],
    )
