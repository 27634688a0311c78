"""Control schedules: the coefficients of -iH(t) = sum_j (a_j + u_j(t)) A_j."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

__all__ = ["PiecewiseControl", "ControlSchedule", "time_grid"]


@dataclass(frozen=True)
class PiecewiseControl:
    """Scalar control defined on segments between ``breakpoints``.

    ``kind="constant"``: ``values[k]`` holds on (t_k, t_{k+1}], evaluated
    left-continuously (u(t_k) belongs to the segment that ends at t_k, and
    u(t_0) = values[0]).

    ``kind="linear"``: ``values`` are the nodal values at the breakpoints and
    u is linearly interpolated between them.

    Outside the breakpoint range the control is held at its end values.
    """

    breakpoints: tuple
    values: tuple
    kind: str = "constant"
    scale: float = 1.0

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least two breakpoints")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(vals)) and np.isfinite(self.scale)):
            raise ValueError("control data must be finite")
        if self.kind == "constant":
            if vals.size != bp.size - 1:
                raise ValueError("piecewise-constant control needs len(values) == len(breakpoints) - 1")
        elif self.kind == "linear":
            if vals.size != bp.size:
                raise ValueError("piecewise-linear control needs len(values) == len(breakpoints)")
        else:
            raise ValueError(f"unknown control kind {self.kind!r}")
        object.__setattr__(self, "breakpoints", tuple(bp.tolist()))
        object.__setattr__(self, "values", tuple(vals.tolist()))

    def __call__(self, t: float) -> float:
        bp = self.breakpoints
        if self.kind == "linear":
            return self.scale * float(np.interp(t, bp, self.values))
        k = int(np.searchsorted(bp, t, side="left")) - 1
        k = min(max(k, 0), len(self.values) - 1)
        return self.scale * self.values[k]

    def covers(self, horizon: float) -> bool:
        return self.breakpoints[0] <= 0.0 and self.breakpoints[-1] >= horizon


@dataclass(frozen=True)
class ControlSchedule:
    """Drift vector ``a`` plus time-varying controls on [0, horizon].

    ``controls`` maps 1-based generator labels to callables t -> u_j(t);
    channels that are absent are identically zero.
    """

    drift: np.ndarray
    controls: Mapping[int, Callable[[float], float]] = field(default_factory=dict)
    horizon: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.drift, dtype=float).copy()
        if a.ndim != 1:
            raise ValueError("drift must be a vector")
        if not np.all(np.isfinite(a)):
            raise ValueError("drift has non-finite entries")
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be positive and finite")
        for label, u in self.controls.items():
            if not 1 <= label <= a.size:
                raise ValueError(f"control channel {label} outside 1..{a.size}")
            if isinstance(u, PiecewiseControl) and not u.covers(self.horizon):
                raise ValueError(f"control channel {label} does not cover [0, {self.horizon}]")
        a.setflags(write=False)
        object.__setattr__(self, "drift", a)
        object.__setattr__(self, "controls", dict(self.controls))

    @property
    def n(self) -> int:
        return self.drift.size

    def u(self, t: float) -> np.ndarray:
        out = np.zeros(self.n)
        for label, fn in self.controls.items():
            out[label - 1] = fn(t)
        return out

    def coefficients(self, t: float) -> np.ndarray:
        """a + u(t); raises ``ValueError`` on non-finite values."""
        c = self.drift + self.u(t)
        if not np.all(np.isfinite(c)):
            raise ValueError(f"non-finite control value at t={t}")
        return c


def time_grid(horizon: float, step: float) -> np.ndarray:
    """Uniform grid 0 = t_0 < ... < t_M = horizon with spacing as close to ``step`` as allowed."""
    if not step > 0:
        raise ValueError("step must be positive")
    m = max(1, int(np.ceil(horizon / step - 1e-9)))
    return np.linspace(0.0, horizon, m + 1)
