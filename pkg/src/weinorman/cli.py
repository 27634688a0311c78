"""
Command line front end.

    weinorman run <config>
    weinorman analyze <config> --universality [--seed S] [--samples K]
    weinorman sweep <config> --param <path> --values v1,v2,... [--param ... --values ...]

Output goes to ``[output].directory`` (default ``out``) unless the
``WEINORMAN_OUTPUT_DIR`` environment variable is set. Exit codes: 0 success,
1 configuration error, 2 unrecoverable singularity or failed integration.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ConfigError, ScenarioConfig, load_config, set_path
from .propagator import integrate_unitary, normalize, phase_distance
from .state_analysis import DetRootSampler, FixedSampler, ZyzSingularSampler, universality_check
from .wei_norman import NonFiniteState, UnrecoverableSingularity, integrate_gamma

__all__ = ["RunReport", "run", "analyze", "sweep", "main", "OUTPUT_ENV"]

log = logging.getLogger(__name__)

OUTPUT_ENV = "WEINORMAN_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_SINGULAR = 0, 1, 2


def _cplx(m):
    m = np.asarray(m)
    return np.stack([m.real, m.imag], axis=-1).tolist()


@dataclass
class RunReport:
    status: str
    final_gamma: np.ndarray = None
    final_order: tuple = None
    anchor: np.ndarray = None
    u_gamma: np.ndarray = None
    u_oracle: np.ndarray = None
    discrepancy: float = float("nan")
    state_error: float = float("nan")
    events: list = field(default_factory=list)
    min_abs_det: float = float("nan")
    wall_time: float = 0.0
    error: str = ""
    error_t: float = None
    error_gamma: list = None

    @property
    def exit_code(self) -> int:
        return {"ok": EXIT_OK, "config-error": EXIT_CONFIG}.get(self.status, EXIT_SINGULAR)

    def to_dict(self) -> dict:
        d = {"status": self.status, "wall_time": self.wall_time}
        if self.error:
            d.update(error=self.error, error_t=self.error_t, error_gamma=self.error_gamma)
        if self.final_gamma is not None:
            d.update(
                final_gamma=self.final_gamma.tolist(),
                final_order=list(self.final_order),
                anchor=_cplx(self.anchor),
                u_gamma=_cplx(self.u_gamma),
                u_oracle=_cplx(self.u_oracle),
                discrepancy_frobenius=self.discrepancy,
                state_error=self.state_error,
                min_abs_det_xi=self.min_abs_det,
                chart_switches=[
                    {"t": e.t, "old_order": list(e.old_order), "new_order": list(e.new_order),
                     "reason": e.reason, "det_xi": e.det}
                    for e in self.events
                ],
            )
        return d


def output_dir(cfg: ScenarioConfig) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or cfg.output.get("directory", "out"))


def _prefix(cfg):
    return cfg.output.get("prefix", "run")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _write_gnuplot(path, gamma_csv, n):
    cols = ", ".join(
        f"'{gamma_csv.name}' using 1:{k + 2} with lines title 'gamma_{k + 1}'" for k in range(n)
    )
    path.write_text(
        "set datafile separator ','\nset key autotitle columnhead\n"
        "set xlabel 't'\nset ylabel 'gamma'\n"
        f"plot {cols}\npause -1\n"
    )


def simulate(cfg: ScenarioConfig) -> tuple[RunReport, object]:
    """Both routes for one scenario, no file output."""
    start = time.perf_counter()
    basis = cfg.basis()
    schedule = cfg.schedule()
    psi0 = cfg.psi0()
    try:
        traj = integrate_gamma(cfg.chart(basis), schedule, cfg.step, cfg.chart_policy())
    except (UnrecoverableSingularity, NonFiniteState) as exc:
        status = "singular" if isinstance(exc, UnrecoverableSingularity) else "non-finite"
        return RunReport(status=status, error=str(exc), error_t=exc.t,
                         error_gamma=None if exc.gamma is None else exc.gamma.tolist(),
                         wall_time=time.perf_counter() - start), None
    oracle = integrate_unitary(basis, schedule, cfg.step)
    u_gamma = traj.final_unitary()
    report = RunReport(
        status="ok",
        final_gamma=traj.final_gamma,
        final_order=traj.final_segment.order,
        anchor=traj.final_segment.anchor,
        u_gamma=u_gamma,
        u_oracle=oracle.final,
        discrepancy=float(np.linalg.norm(u_gamma - oracle.final)),
        state_error=phase_distance(oracle.final @ psi0, u_gamma @ psi0),
        events=list(traj.events),
        min_abs_det=traj.min_abs_det,
        wall_time=time.perf_counter() - start,
    )
    return report, (traj, oracle)


def run(cfg: ScenarioConfig, outdir: Path | None = None) -> RunReport:
    """Run one scenario and write ``<prefix>_gamma.csv``, ``<prefix>_states.csv``
    and ``<prefix>_report.json`` into the output directory."""
    outdir = Path(outdir) if outdir is not None else output_dir(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    prefix = _prefix(cfg)
    report, routes = simulate(cfg)
    if routes is not None:
        traj, oracle = routes
        n = traj.gammas.shape[1]
        gamma_csv = outdir / f"{prefix}_gamma.csv"
        _write_csv(gamma_csv,
                   ["t"] + [f"gamma_{k + 1}" for k in range(n)] + ["det_xi"],
                   np.column_stack([traj.times, traj.gammas, traj.dets]).tolist())
        psi0 = cfg.psi0()
        state_header = ["t"] + [f"{part}(y_{k + 1})" for k in range(cfg.N) for part in ("re", "im")]

        def state_rows(times, states):
            parts = np.empty((states.shape[0], 2 * cfg.N))
            parts[:, 0::2], parts[:, 1::2] = states.real, states.imag
            return np.column_stack([times, parts]).tolist()

        _write_csv(outdir / f"{prefix}_states.csv", state_header,
                   state_rows(traj.times, traj.states(psi0)))
        _write_csv(outdir / f"{prefix}_oracle_states.csv", state_header,
                   state_rows(oracle.times, oracle.states(psi0)))
        if cfg.output.get("gnuplot", False):
            _write_gnuplot(outdir / f"{prefix}_gamma.gp", gamma_csv, n)
    (outdir / f"{prefix}_report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return report


def analyze(cfg: ScenarioConfig, seed: int | None = None, samples: int | None = None,
            outdir: Path | None = None):
    opts = cfg.universality
    seed = opts.get("seed", 0) if seed is None else seed
    samples = opts.get("samples", 100) if samples is None else samples
    kind = opts.get("sampler", "auto")
    if kind == "zyz":
        sampler = ZyzSingularSampler()
    elif kind == "det-roots":
        sampler = DetRootSampler(lines=int(opts.get("lines", 1000)))
    elif kind == "fixed":
        sampler = FixedSampler(opts["points"])
    elif kind == "auto":
        sampler = None
    else:
        raise ConfigError(f"unknown universality sampler {kind!r}")
    report = universality_check(cfg.order(), cfg.psi0(), sampler, samples, cfg.basis(), seed)
    outdir = Path(outdir) if outdir is not None else output_dir(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    data = report.to_dict()
    data["seed"] = seed
    (outdir / f"{_prefix(cfg)}_universality.json").write_text(json.dumps(data, indent=2) + "\n")
    return report


SWEEP_FIELDS = ["status", "discrepancy", "state_error", "min_abs_det", "switches", "wall_time", "error"]


def sweep(cfg: ScenarioConfig, grid: list, outdir: Path | None = None) -> list[dict]:
    """One run per point of the product grid ``[(path, values), ...]``; failures are kept as rows."""
    base = cfg.to_dict()
    paths = [p for p, _ in grid]
    rows = []
    combos = itertools.product(*[v for _, v in grid]) if grid and all(len(v) for _, v in grid) else []
    for combo in combos:
        row = dict(zip(paths, combo))
        try:
            data = base
            for p, v in zip(paths, combo):
                data = set_path(data, p, v)
            report, routes = simulate(ScenarioConfig.from_dict(data))
            row.update(status=report.status, discrepancy=report.discrepancy,
                       state_error=report.state_error, min_abs_det=report.min_abs_det,
                       switches=len(report.events), wall_time=report.wall_time, error=report.error)
        except ConfigError as exc:
            row.update(status="config-error", error=str(exc))
        rows.append(row)
    outdir = Path(outdir) if outdir is not None else output_dir(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    header = paths + SWEEP_FIELDS
    _write_csv(outdir / f"{_prefix(cfg)}_sweep.csv", header,
               [[row.get(h, "") for h in header] for row in rows])
    return rows


def _parse_values(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            out.append(int(tok))
        except ValueError:
            out.append(float(tok))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weinorman", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a scenario along both routes")
    p.add_argument("config")

    p = sub.add_parser("analyze", help="sampled universality check")
    p.add_argument("config")
    p.add_argument("--universality", action="store_true", default=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("sweep", help="run a scenario over a parameter grid")
    p.add_argument("config")
    p.add_argument("--param", action="append", required=True)
    p.add_argument("--values", action="append", required=True, type=_parse_values)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "run":
            report = run(cfg)
            if report.status != "ok":
                print(f"error: {report.error}", file=sys.stderr)
            else:
                print(f"discrepancy {report.discrepancy:.3e}  state error {report.state_error:.3e}  "
                      f"chart switches {len(report.events)}")
            return report.exit_code
        if args.command == "analyze":
            report = analyze(cfg, args.seed, args.samples)
            print(f"{report.verdict}: {int(report.members.sum())}/{len(report.members)} singular samples "
                  f"inside the isotropy set" + (" (approximate sampling)" if report.approximate else ""))
            return EXIT_OK
        if len(args.param) != len(args.values):
            raise ConfigError("each --param needs one --values list")
        if len(args.param) > 2:
            raise ConfigError("sweeps take at most two parameters")
        rows = sweep(cfg, list(zip(args.param, args.values)))
        print(f"{len(rows)} runs, {sum(r['status'] == 'ok' for r in rows)} ok")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
