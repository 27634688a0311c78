"""Scenario files: TOML with a few nested tables.

Example::

    N = 2
    ordering = "zyz"            # "zyz", "canonical" or a list of labels
    drift = [0.0, 0.0, 1.0]
    horizon = 3.141592653589793
    step = 1e-3
    initial_state = [[1.0, 0.0], [0.0, 0.0]]   # [re, im] per component

    [policy]
    mode = "reanchor"
    alternates = [[1, 2, 1]]

    [[controls]]
    channel = 2
    kind = "constant"
    breakpoints = [0.0, 3.2]
    values = [1.0]

    [output]
    directory = "out"
    prefix = "spin"
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from .lie_core import LieBasis, build_su_basis
from .schedule import ControlSchedule, PiecewiseControl
from .wei_norman import ZYZ, ChartPolicy, GammaChart, canonical_order

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "set_path"]

_POLICY_KEYS = {"mode", "alternates", "eps_sing", "det_switch", "max_halvings", "defect_tol",
                "reanchor_at", "offset_start"}
_TOP_KEYS = {"N", "ordering", "drift", "horizon", "step", "initial_state", "policy", "controls",
             "output", "universality"}


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    N: int
    ordering: object
    drift: list
    horizon: float
    step: float
    initial_state: list
    controls: list = field(default_factory=list)
    policy: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    universality: dict = field(default_factory=dict)

    # -- construction ------------------------------------------------------
    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        unknown = set(data) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"N", "drift", "horizon", "step"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        N = data["N"]
        cfg = cls(
            N=N,
            ordering=data.get("ordering", "canonical"),
            drift=list(data["drift"]),
            horizon=data["horizon"],
            step=data["step"],
            initial_state=data.get("initial_state", [[1.0, 0.0]] + [[0.0, 0.0]] * (int(N) - 1)),
            controls=[dict(c) for c in data.get("controls", [])],
            policy=dict(data.get("policy", {})),
            output=dict(data.get("output", {})),
            universality=dict(data.get("universality", {})),
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        d = {
            "N": self.N,
            "ordering": self.ordering,
            "drift": list(self.drift),
            "horizon": self.horizon,
            "step": self.step,
            "initial_state": [list(c) for c in self.initial_state],
        }
        for key in ("policy", "output", "universality"):
            if getattr(self, key):
                d[key] = copy.deepcopy(getattr(self, key))
        if self.controls:
            d["controls"] = copy.deepcopy(self.controls)
        return d

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    # -- validation and derived objects -------------------------------------
    def validate(self) -> None:
        if not isinstance(self.N, int) or self.N < 2:
            raise ConfigError(f"N must be an integer >= 2, got {self.N!r}")
        n = self.N ** 2 - 1
        if len(self.drift) != n:
            raise ConfigError(f"drift needs {n} entries for N={self.N}, got {len(self.drift)}")
        for name in ("horizon", "step"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not np.isfinite(v) or v <= 0:
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        order = self.order()
        if len(order) != n or any(not 1 <= k <= n for k in order):
            raise ConfigError(f"ordering {order} is not a list of {n} labels in 1..{n}")
        if len(self.initial_state) != self.N:
            raise ConfigError(f"initial_state needs {self.N} components")
        unknown = set(self.policy) - _POLICY_KEYS
        if unknown:
            raise ConfigError(f"unknown policy keys: {sorted(unknown)}")
        try:
            self.psi0()
            self.chart_policy()
            self.schedule()
        except ConfigError:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    def order(self) -> tuple:
        n = self.N ** 2 - 1
        if isinstance(self.ordering, str):
            name = self.ordering.lower()
            if name == "canonical":
                return canonical_order(n)
            if name == "zyz":
                if self.N != 2:
                    raise ConfigError("the 'zyz' ordering is only defined for N = 2")
                return ZYZ
            raise ConfigError(f"unknown ordering preset {self.ordering!r}")
        try:
            return tuple(int(k) for k in self.ordering)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad ordering {self.ordering!r}") from exc

    def basis(self) -> LieBasis:
        return build_su_basis(self.N)

    def chart(self, basis: LieBasis | None = None) -> GammaChart:
        return GammaChart(basis or self.basis(), self.order())

    def psi0(self) -> np.ndarray:
        try:
            psi = np.array([complex(re, im) for re, im in self.initial_state])
        except (TypeError, ValueError) as exc:
            raise ConfigError("initial_state must be a list of [re, im] pairs") from exc
        nrm = np.linalg.norm(psi)
        if not nrm > 0 or not np.isfinite(nrm):
            raise ConfigError("initial_state must be a nonzero finite vector")
        return psi / nrm

    def chart_policy(self) -> ChartPolicy:
        return ChartPolicy(**self.policy)

    def schedule(self) -> ControlSchedule:
        n = self.N ** 2 - 1
        controls = {}
        for entry in self.controls:
            try:
                ch = int(entry["channel"])
                ctl = PiecewiseControl(
                    breakpoints=tuple(entry["breakpoints"]),
                    values=tuple(entry["values"]),
                    kind=entry.get("kind", "constant"),
                    scale=float(entry.get("scale", 1.0)),
                )
            except KeyError as exc:
                raise ConfigError(f"control entry is missing {exc}") from exc
            if not 1 <= ch <= n:
                raise ConfigError(f"control channel {ch} outside 1..{n}")
            if ch in controls:
                raise ConfigError(f"control channel {ch} given twice")
            controls[ch] = ctl
        return ControlSchedule(np.array(self.drift, dtype=float), controls, float(self.horizon))


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return ScenarioConfig.from_dict(data)


def set_path(data: dict, path: str, value) -> dict:
    """Copy of ``data`` with the dotted ``path`` set; list indices are 0-based."""
    out = copy.deepcopy(data)
    keys = path.split(".")
    node = out
    try:
        for key in keys[:-1]:
            node = node[int(key)] if isinstance(node, list) else node[key]
        last = keys[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
    except (KeyError, IndexError, ValueError) as exc:
        raise ConfigError(f"config path {path!r} does not exist") from exc
    return out
