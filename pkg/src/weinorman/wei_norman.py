"""
Product-of-exponentials coordinates and the Wei-Norman equation.

For an ordering rho of generator labels, U = prod_k exp(gamma_k A_rho(k)) and

    Xi(gamma) dgamma/dt = a + u(t),

where column i of Xi is the coordinate vector of

    exp(gamma_1 ad_A_rho(1)) ... exp(gamma_{i-1} ad_A_rho(i-1)) A_rho(i).

Near the singular set (det Xi = 0) the integrator either follows the reduced
ZYZ dynamics or re-anchors: it freezes the current group element and starts
a fresh factorization at a point where Xi is well conditioned, so that
U(t) = pexp(gamma(t)) @ anchor.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .lie_core import LieBasis
from .propagator import normalize, product_of_exponentials
from .schedule import ControlSchedule, time_grid

__all__ = [
    "EPS_SING",
    "ZYZ",
    "canonical_order",
    "SingularChart",
    "UnrecoverableSingularity",
    "NonFiniteState",
    "GammaChart",
    "XiMatrix",
    "assemble_xi",
    "xi_determinant",
    "solve_gamma_dot",
    "ReducedVelocity",
    "reduced_dynamics_step",
    "wrap_gamma",
    "ChartPolicy",
    "ChartSwitch",
    "ChartSegment",
    "GammaTrajectory",
    "integrate_gamma",
]

log = logging.getLogger(__name__)

EPS_SING = 1e-6
ZYZ = (3, 2, 3)


def canonical_order(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


class SingularChart(ArithmeticError):
    """Xi is (numerically) singular at gamma, or the reduced dynamics are locked."""

    def __init__(self, det, gamma, order=None, t=None, locked=False):
        self.det = float(det)
        self.gamma = np.array(gamma, dtype=float)
        self.order = order
        self.t = t
        self.locked = locked
        what = "coordinate lock" if locked else "singular chart"
        where = "" if t is None else f" at t={t:.6g}"
        super().__init__(f"{what}{where}: |det Xi|={abs(self.det):.3e}, gamma={self.gamma.tolist()}")


class UnrecoverableSingularity(RuntimeError):
    def __init__(self, message, t=None, gamma=None):
        self.t = t
        self.gamma = None if gamma is None else np.array(gamma, dtype=float)
        super().__init__(message)


class NonFiniteState(RuntimeError):
    def __init__(self, message, t=None, gamma=None):
        self.t = t
        self.gamma = None if gamma is None else np.array(gamma, dtype=float)
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class GammaChart:
    """A point ``gamma`` of the coordinate chart given by ``order`` (1-based labels)."""

    basis: LieBasis
    order: tuple
    gamma: np.ndarray = None

    def __post_init__(self):
        order = tuple(int(k) for k in self.order)
        if len(order) != self.basis.n:
            raise ValueError(f"ordering has {len(order)} entries, algebra dimension is {self.basis.n}")
        if any(not 1 <= k <= self.basis.n for k in order):
            raise ValueError(f"ordering {order} has labels outside 1..{self.basis.n}")
        g = np.zeros(len(order)) if self.gamma is None else np.array(self.gamma, dtype=float)
        if g.shape != (len(order),):
            raise ValueError("gamma has the wrong length")
        if not np.all(np.isfinite(g)):
            raise ValueError("gamma has non-finite entries")
        g.setflags(write=False)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "gamma", g)

    @property
    def periods(self) -> np.ndarray:
        return self.basis.periods[np.array(self.order) - 1]

    def at(self, gamma) -> "GammaChart":
        return replace(self, gamma=gamma)

    def wrapped(self) -> "GammaChart":
        return self.at(wrap_gamma(self.gamma, self.periods))

    @property
    def in_domain(self) -> bool:
        half = self.periods / 2
        return bool(np.all((self.gamma > -half) & (self.gamma <= half)))


@dataclass(frozen=True, eq=False)
class XiMatrix:
    matrix: np.ndarray
    gamma: np.ndarray
    det: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "det", float(np.linalg.det(self.matrix)))


def _xi_matrix(basis, order, gamma):
    n = basis.n
    xi = np.empty((n, n))
    acc = np.eye(n)
    for i, (label, g) in enumerate(zip(order, gamma)):
        xi[:, i] = acc[:, label - 1]
        if i < n - 1:
            acc = acc @ basis.exp_adjoint(label, g)
    return xi


def assemble_xi(chart: GammaChart) -> XiMatrix:
    return XiMatrix(_xi_matrix(chart.basis, chart.order, chart.gamma), chart.gamma)


def xi_determinant(xi: XiMatrix) -> float:
    return xi.det


def solve_gamma_dot(xi: XiMatrix, rhs, eps_sing: float = EPS_SING) -> np.ndarray:
    """dgamma/dt = Xi^{-1} rhs; raises :class:`SingularChart` when |det Xi| <= eps_sing."""
    if abs(xi.det) <= eps_sing:
        raise SingularChart(xi.det, xi.gamma)
    return np.linalg.solve(xi.matrix, np.asarray(rhs, dtype=float))


@dataclass(frozen=True)
class ReducedVelocity:
    """Velocity on the ZYZ singular set.

    ``combined_rate`` is d/dt(gamma_1 + cos(gamma_2) gamma_3), which is
    d/dt(gamma_1 + gamma_3) on the slices gamma_2 = 0, 2pi.
    """

    combined_rate: float
    gamma2_rate: float
    gamma_dot: np.ndarray


def reduced_dynamics_step(chart: GammaChart, coefficients, eps_sing: float = EPS_SING,
                          lock_tol: float = 1e-9) -> ReducedVelocity:
    """Constrained ZYZ velocity on the singular set sin(gamma_2) = 0.

    On the singular set only gamma_1 + cos(gamma_2) gamma_3 and gamma_2 are
    determined; the gauge is fixed by d(gamma_1)/dt = 0. If the drive has a
    component outside the range of Xi the coordinates are locked and
    :class:`SingularChart` is raised with ``locked=True``.
    """
    if chart.basis.n != 3 or chart.order != ZYZ:
        raise ValueError("reduced dynamics are only available for the su(2) ZYZ chart")
    g1, g2, _ = chart.gamma
    if abs(np.sin(g2)) > eps_sing:
        raise ValueError(f"gamma_2={g2} is not on the singular set")
    r1, r2, r3 = np.asarray(coefficients, dtype=float)
    s1, c1 = np.sin(g1), np.cos(g1)
    c2 = np.cos(g2)
    residual = r1 * c1 + r2 * s1
    if abs(residual) > lock_tol * max(1.0, abs(r1) + abs(r2)):
        raise SingularChart(np.sin(g2), chart.gamma, chart.order, locked=True)
    g2dot = -r1 * s1 + r2 * c1
    gdot = np.array([0.0, g2dot, r3 / c2])
    return ReducedVelocity(combined_rate=r3, gamma2_rate=g2dot, gamma_dot=gdot)


def wrap_gamma(gamma, periods=4 * np.pi) -> np.ndarray:
    """Map each component into (-P/2, P/2] by whole periods P (infinite P: untouched)."""
    gamma = np.asarray(gamma, dtype=float)
    periods = np.broadcast_to(np.asarray(periods, dtype=float), gamma.shape)
    out = gamma.copy()
    finite = np.isfinite(periods)
    p = periods[finite]
    out[finite] = p / 2 - np.mod(p / 2 - gamma[finite], p)
    return out


@dataclass(frozen=True)
class ChartPolicy:
    """How :func:`integrate_gamma` treats the singular set.

    mode:
      ``"reanchor"``  restart in the same ordering (then the alternates),
      ``"alternate"`` restart in the next alternate ordering (then the original),
      ``"reduced"``   on the su(2) ZYZ singular set follow the reduced dynamics,
                      re-anchoring only on a coordinate lock,
      ``"strict"``    never recover; raise :class:`UnrecoverableSingularity`.

    ``det_switch``: re-anchor when |det Xi| is below this and still falling.
    ``reanchor_at``: times at which a re-anchor is forced.
    ``offset_start``: allow restarts away from gamma = 0 when Xi(0) is singular.
    """

    mode: str = "reanchor"
    alternates: tuple = ()
    eps_sing: float = EPS_SING
    det_switch: float = 0.1
    max_halvings: int = 6
    defect_tol: float = 1e-9
    reanchor_at: tuple = ()
    offset_start: bool = True

    def __post_init__(self):
        if self.mode not in ("reanchor", "alternate", "reduced", "strict"):
            raise ValueError(f"unknown chart policy mode {self.mode!r}")
        object.__setattr__(self, "alternates", tuple(tuple(int(k) for k in o) for o in self.alternates))
        object.__setattr__(self, "reanchor_at", tuple(sorted(float(t) for t in self.reanchor_at)))


@dataclass(frozen=True)
class ChartSwitch:
    t: float
    old_order: tuple
    new_order: tuple
    reason: str
    det: float


@dataclass(frozen=True, eq=False)
class ChartSegment:
    """Samples from ``first_sample`` on satisfy U = pexp_order(gamma) @ anchor."""

    first_sample: int
    order: tuple
    anchor: np.ndarray
    start_gamma: np.ndarray


@dataclass(eq=False)
class GammaTrajectory:
    basis: LieBasis
    times: np.ndarray
    gammas: np.ndarray
    dets: np.ndarray
    segment_index: np.ndarray
    segments: list
    events: list
    reduced_steps: int = 0
    max_defect: float = 0.0

    @property
    def final_gamma(self) -> np.ndarray:
        return self.gammas[-1]

    @property
    def final_segment(self) -> ChartSegment:
        return self.segments[self.segment_index[-1]]

    @property
    def min_abs_det(self) -> float:
        return float(np.min(np.abs(self.dets)))

    def unitary(self, k: int) -> np.ndarray:
        seg = self.segments[self.segment_index[k]]
        return product_of_exponentials(self.basis, seg.order, self.gammas[k]) @ seg.anchor

    def unitaries(self) -> np.ndarray:
        return np.array([self.unitary(k) for k in range(self.times.size)])

    def final_unitary(self) -> np.ndarray:
        return self.unitary(self.times.size - 1)

    def states(self, psi0) -> np.ndarray:
        return self.unitaries() @ normalize(psi0)


_START_CANDIDATES = (0.0, np.pi / 2, np.pi / 4, -np.pi / 3)


def _start_points(n):
    yield np.zeros(n)
    for v in _START_CANDIDATES[1:]:
        yield np.full(n, v)
    alt = np.empty(n)
    alt[::2], alt[1::2] = np.pi / 2, -np.pi / 4
    yield alt
    # quasi-random but deterministic
    golden = (np.sqrt(5) - 1) / 2
    for m in range(1, 9):
        yield (np.mod(golden * (np.arange(n) + 1) * m, 1.0) - 0.5) * 2 * np.pi


class _StepRejected(Exception):
    pass


class _GammaIntegrator:
    def __init__(self, chart, schedule, policy):
        self.basis = chart.basis
        self.schedule = schedule
        self.policy = policy
        self.original_order = chart.order
        self.order = chart.order
        self.gamma = wrap_gamma(chart.gamma, chart.periods)
        self.anchor = np.eye(self.basis.N, dtype=complex)
        self.t = 0.0
        self.times, self.gammas, self.dets, self.seg_ids = [], [], [], []
        self.segments = [ChartSegment(0, self.order, self.anchor, self.gamma.copy())]
        self.events = []
        self.reduced_steps = 0
        self.max_defect = 0.0
        self.prev_absdet = None
        self._evaluate_here()
        self._record()

    # -- vector field -------------------------------------------------------
    def _chart(self, order, gamma):
        return GammaChart(self.basis, order, gamma)

    def _xi(self, gamma):
        return _xi_matrix(self.basis, self.order, gamma)

    def _field(self, gamma, t):
        xi = self._xi(gamma)
        det = np.linalg.det(xi)
        if abs(det) <= self.policy.eps_sing:
            raise SingularChart(det, gamma, self.order, t)
        return np.linalg.solve(xi, self.schedule.coefficients(t))

    def _evaluate_here(self, xi=None):
        """Cache Xi, det and velocity at the current point; returns the Wei-Norman defect."""
        self.xi = self._xi(self.gamma) if xi is None else xi
        self.det = float(np.linalg.det(self.xi))
        self.gdot = None
        if abs(self.det) > self.policy.eps_sing:
            rhs = self.schedule.coefficients(self.t)
            self.gdot = np.linalg.solve(self.xi, rhs)
            defect = float(np.linalg.norm(self.xi @ self.gdot - rhs))
            self.max_defect = max(self.max_defect, defect)
            return defect
        return 0.0

    def _record(self):
        self.times.append(self.t)
        self.gammas.append(self.gamma.copy())
        self.dets.append(self.det)
        self.seg_ids.append(len(self.segments) - 1)

    # -- chart switching ---------------------------------------------------
    def _candidate_orders(self):
        p = self.policy
        if p.mode == "alternate" and p.alternates:
            pool = list(p.alternates) + [self.original_order]
            if self.order in pool:
                i = pool.index(self.order)
                pool = pool[i + 1:] + pool[:i + 1]
            return pool
        return [self.order] + [o for o in p.alternates if o != self.order]

    def _best_start(self, order):
        n = self.basis.n
        points = _start_points(n) if self.policy.offset_start else iter([np.zeros(n)])
        best, best_det = None, 0.0
        for g in points:
            d = abs(np.linalg.det(_xi_matrix(self.basis, order, g)))
            if d > best_det + 1e-12:
                best, best_det = g, d
            if best_det > 0.99:
                break
        if best is None or best_det <= max(self.policy.det_switch, self.policy.eps_sing):
            return None
        return best

    def switch(self, reason):
        u_now = product_of_exponentials(self.basis, self.order, self.gamma) @ self.anchor
        for order in self._candidate_orders():
            start = self._best_start(order)
            if start is None:
                continue
            anchor = product_of_exponentials(self.basis, order, start).conj().T @ u_now
            self.events.append(ChartSwitch(float(self.t), self.order, order, reason, self.det))
            log.debug("chart switch at t=%.6g (%s): %s -> %s", self.t, reason, self.order, order)
            self.order, self.gamma, self.anchor = order, start, anchor
            self.segments.append(ChartSegment(len(self.times), order, anchor, start.copy()))
            self.prev_absdet = None
            self._evaluate_here()
            return
        raise UnrecoverableSingularity(
            f"no candidate chart is regular at t={self.t:.6g} (reason: {reason}, "
            f"|det Xi|={abs(self.det):.3e}, gamma={self.gamma.tolist()})",
            t=self.t, gamma=self.gamma)

    # -- stepping ------------------------------------------------------------
    def _rk4(self, h):
        t, g = self.t, self.gamma
        k1 = self.gdot if self.gdot is not None else self._field(g, t)
        k2 = self._field(g + 0.5 * h * k1, t + 0.5 * h)
        k3 = self._field(g + 0.5 * h * k2, t + 0.5 * h)
        k4 = self._field(g + h * k3, t + h)
        return g + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    def _try_step(self, h):
        new = self._rk4(h)
        if not np.all(np.isfinite(new)):
            raise _StepRejected("non-finite")
        new_xi = self._xi(new)
        new_det = np.linalg.det(new_xi)
        if new_det * self.det < 0 or abs(new_det) <= self.policy.eps_sing:
            raise _StepRejected("crossed singular set")
        return new, new_xi

    def _advance(self, new_gamma, h, new_xi=None):
        self.prev_absdet = abs(self.det)
        self.t = self.t + h
        self.gamma = wrap_gamma(new_gamma, self.basis.periods[np.array(self.order) - 1])
        # Xi is periodic in gamma, so the matrix at the unwrapped point is reusable
        defect = self._evaluate_here(new_xi)
        if defect > self.policy.defect_tol:
            log.warning("Wei-Norman defect %.3e at t=%.6g", defect, self.t)
        if not np.all(np.isfinite(self.gamma)):
            raise NonFiniteState(f"non-finite coordinates at t={self.t:.6g}", t=self.t, gamma=self.gamma)
        self._record()

    def _singular(self, h):
        p = self.policy
        if p.mode == "strict":
            raise UnrecoverableSingularity(
                f"singular chart at t={self.t:.6g}: |det Xi|={abs(self.det):.3e}, "
                f"gamma={self.gamma.tolist()}", t=self.t, gamma=self.gamma)
        if p.mode == "reduced" and self.basis.n == 3 and self.order == ZYZ:
            try:
                vel = reduced_dynamics_step(self._chart(self.order, self.gamma),
                                            self.schedule.coefficients(self.t), p.eps_sing)
            except SingularChart:
                self.switch("lock")
                return
            self.reduced_steps += 1
            self._advance(self.gamma + h * vel.gamma_dot, h)
            return
        self.switch("singular")

    def run(self, step):
        grid = time_grid(self.schedule.horizon, step)
        forced = list(self.policy.reanchor_at)
        tiny = 1e-12 * max(1.0, self.schedule.horizon)
        for t_end in grid[1:]:
            switches_here = 0
            while self.t < t_end - tiny:
                if switches_here > 4 * (len(self.policy.alternates) + 2):
                    raise UnrecoverableSingularity(
                        f"chart switching does not make progress at t={self.t:.6g}",
                        t=self.t, gamma=self.gamma)
                if forced and self.t >= forced[0] - tiny:
                    forced.pop(0)
                    self.switch("forced")
                    switches_here += 1
                    continue
                h = t_end - self.t
                absdet = abs(self.det)
                if absdet <= self.policy.eps_sing:
                    n_events = len(self.events)
                    self._singular(h)
                    switches_here += len(self.events) - n_events
                    continue
                if (self.policy.mode != "strict" and absdet < self.policy.det_switch
                        and self.prev_absdet is not None and absdet < self.prev_absdet):
                    self.switch("approach")
                    switches_here += 1
                    continue
                for _ in range(self.policy.max_halvings + 1):
                    try:
                        new, new_xi = self._try_step(h)
                        break
                    except (SingularChart, _StepRejected):
                        h *= 0.5
                else:
                    if self.policy.mode == "strict":
                        raise UnrecoverableSingularity(
                            f"cannot step past the singular set at t={self.t:.6g}",
                            t=self.t, gamma=self.gamma)
                    self.switch("step-failure")
                    switches_here += 1
                    continue
                self._advance(new, h, new_xi)

        return GammaTrajectory(
            basis=self.basis,
            times=np.array(self.times),
            gammas=np.array(self.gammas),
            dets=np.array(self.dets),
            segment_index=np.array(self.seg_ids),
            segments=self.segments,
            events=self.events,
            reduced_steps=self.reduced_steps,
            max_defect=self.max_defect,
        )


def integrate_gamma(chart: GammaChart, schedule: ControlSchedule, step: float,
                    policy: ChartPolicy | None = None) -> GammaTrajectory:
    """Integrate dgamma/dt = Xi(gamma)^{-1} (a + u(t)) from ``chart.gamma`` at t = 0.

    Classical RK4 on the grid of :func:`~weinorman.schedule.time_grid`; a step
    that hits or crosses the singular set is halved up to
    ``policy.max_halvings`` times before the chart is switched.
    """
    if schedule.n != chart.basis.n:
        raise ValueError(f"schedule has {schedule.n} coefficients, basis has {chart.basis.n}")
    if not step > 0:
        raise ValueError("step must be positive")
    return _GammaIntegrator(chart, schedule, policy or ChartPolicy()).run(step)
