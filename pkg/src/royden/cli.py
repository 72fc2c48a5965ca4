"""Command-line frontend: graph ingestion, experiments, deterministic reports.

Commands: dirichlet, capacity, capinf, extremal, decompose, probe, classify.
Exactly one input source per run (--family or --graph). Reports go to --out
(default stdout) as CSV or JSON; identical invocations produce identical
bytes, so wall-clock timing is never written to the report (set
ROYDEN_LOG=info to see timings and per-solve diagnostics on stderr).

Exit codes: 0 success, 1 input or usage error (a JSON/CSV report with an
``error`` field is still written when possible), 2 when a solve failed to
converge (the report is written with the best iterate's numbers).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .boundary import bhd_probe
from .calculus import VertexFunction
from .capacity import Condenser, capacity, capacity_at_infinity, classify_parabolicity
from .errors import RoydenError, UsageError
from .extremal import PathFamilySpec, extremal_length
from .families import build_exhaustion, default_directions, parse_family
from .graphs import VertexSet, load_graph
from .report import Report, emit_report
from .solver import DirichletProblem, royden_decompose, solve_dirichlet

logger = logging.getLogger("royden")

COMMANDS = ("dirichlet", "capacity", "capinf", "extremal", "decompose", "probe", "classify")
_FAMILY_ONLY = {"capinf", "decompose", "probe", "classify"}
_NEED_RADII_WITH_FAMILY = set(COMMANDS)


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str | None
    graph: str | None
    p: tuple[float, ...]
    radii: tuple[int, ...]
    tol: float | None
    max_iter: int | None
    fmt: str
    out: str
    seed: int

    def to_argv(self) -> list[str]:
        argv = [self.command]
        if self.family is not None:
            argv += ["--family", self.family]
        if self.graph is not None:
            argv += ["--graph", self.graph]
        argv += ["--p", ",".join(f"{p:.12g}" for p in self.p)]
        if self.radii:
            argv += ["--radii", ",".join(str(r) for r in self.radii)]
        if self.tol is not None:
            argv += ["--tol", f"{self.tol:.12g}"]
        if self.max_iter is not None:
            argv += ["--max-iter", str(self.max_iter)]
        argv += ["--format", self.fmt, "--out", self.out, "--seed", str(self.seed)]
        return argv


def _parse_radii(text: str) -> tuple[int, ...]:
    """Radius grids: 'a:b:x2' (geometric), 'a:b:+3' (arithmetic), or '2,4,8'."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad radius range {text!r}; expected start:stop:xF or start:stop:+s")
        try:
            start, stop = int(parts[0]), int(parts[1])
        except ValueError:
            raise UsageError(f"non-integer bounds in radius range {text!r}") from None
        step = parts[2]
        out = []
        r = start
        if step.startswith("x"):
            try:
                factor = float(step[1:])
            except ValueError:
                raise UsageError(f"bad geometric factor in {text!r}") from None
            if factor <= 1.0:
                raise UsageError("geometric radius factor must exceed 1")
            while r <= stop:
                out.append(int(r))
                r = int(round(r * factor)) if int(round(r * factor)) > r else r + 1
        elif step.startswith("+"):
            try:
                inc = int(step[1:])
            except ValueError:
                raise UsageError(f"bad arithmetic step in {text!r}") from None
            if inc <= 0:
                raise UsageError("arithmetic radius step must be positive")
            while r <= stop:
                out.append(r)
                r += inc
        else:
            raise UsageError(f"radius step must start with 'x' or '+', got {step!r}")
    else:
        try:
            out = [int(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise UsageError(f"non-integer radius in {text!r}") from None
    if not out:
        raise UsageError("empty radius list")
    if any(r < 1 for r in out):
        raise UsageError("radii must be >= 1")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise UsageError(f"radii must be strictly increasing, got {out}")
    return tuple(out)


def _parse_p_list(text: str) -> tuple[float, ...]:
    try:
        ps = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"non-numeric exponent in {text!r}") from None
    if not ps:
        raise UsageError("empty exponent list")
    for p in ps:
        if not p > 1.0:
            raise UsageError(f"exponents must be > 1, got {p}")
    return ps


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); input errors must be 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="royden", description=__doc__, add_help=True)
    parser.add_argument("--version", action="version", version=f"royden {__version__}")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        cmd = sub.add_parser(name, add_help=True)
        cmd.add_argument("--family", help="z | z2 | z3 | tree:<d>")
        cmd.add_argument("--graph", help="path to a JSON or edge-list graph file")
        cmd.add_argument("--p", default="2", help="comma list of exponents > 1")
        cmd.add_argument("--radii", help="radius grid: a:b:xF, a:b:+s, or comma list")
        cmd.add_argument("--tol", type=float)
        cmd.add_argument("--max-iter", type=int, dest="max_iter")
        cmd.add_argument("--format", default="csv", choices=("csv", "json"), dest="fmt")
        cmd.add_argument("--out", default="-")
        cmd.add_argument("--seed", type=int, default=0)
    return parser


def parse_args(argv) -> RunConfig:
    """Validate argv into a RunConfig; raises UsageError on any bad input."""
    ns = _build_parser().parse_args(list(argv))
    if ns.command is None:
        raise UsageError(f"missing command; expected one of {', '.join(COMMANDS)}")
    if ns.family and ns.graph:
        raise UsageError("conflicting sources: give exactly one of --family or --graph")
    if not ns.family and not ns.graph:
        raise UsageError("missing source: give exactly one of --family or --graph")
    if ns.command in _FAMILY_ONLY and not ns.family:
        raise UsageError(f"command {ns.command!r} works on a --family, not a graph file")
    p = _parse_p_list(ns.p)
    radii: tuple[int, ...] = ()
    if ns.radii:
        radii = _parse_radii(ns.radii)
    if ns.family and not radii:
        raise UsageError("--radii is required with --family")
    if ns.tol is not None and ns.tol <= 0:
        raise UsageError("--tol must be positive")
    if ns.max_iter is not None and ns.max_iter < 1:
        raise UsageError("--max-iter must be >= 1")
    return RunConfig(
        command=ns.command,
        family=ns.family,
        graph=ns.graph,
        p=p,
        radii=radii,
        tol=ns.tol,
        max_iter=ns.max_iter,
        fmt=ns.fmt,
        out=ns.out,
        seed=ns.seed,
    )


def _echo(config: RunConfig) -> dict:
    return {
        "command": config.command,
        "family": config.family,
        "graph": config.graph,
        "p": list(config.p),
        "radii": list(config.radii),
        "tol": config.tol,
        "max_iter": config.max_iter,
        "format": config.fmt,
        "out": config.out,
        "seed": config.seed,
    }


def _file_plates(g):
    A = VertexSet(g, [0])
    B = VertexSet(g, [g.n - 1])
    S = VertexSet(g, set(range(g.n)) - {0, g.n - 1})
    return A, B, S


def _cmd_capinf(config: RunConfig) -> Report:
    family = parse_family(config.family)
    ball = family.ball(max(config.radii))
    rows = []
    all_conv = True
    for p in config.p:
        seq = capacity_at_infinity(
            VertexSet(ball.graph, [0]), family, config.radii, p,
            tol=config.tol, max_iter=config.max_iter or 500, ball=ball,
        )
        all_conv &= all(seq.converged)
        for n, v, r in seq.entries():
            rows.append({"family": seq.family, "p": p, "n": n, "cap": v, "residual": r})
    rows.sort(key=lambda row: (row["family"], row["p"], row["n"]))
    return Report("capinf", _echo(config), rows, converged=all_conv, version=__version__)


def _cmd_classify(config: RunConfig) -> Report:
    family = parse_family(config.family)
    ball = family.ball(max(config.radii))
    rows = []
    all_conv = True
    for p in config.p:
        seq = capacity_at_infinity(
            VertexSet(ball.graph, [0]), family, config.radii, p,
            tol=config.tol, max_iter=config.max_iter or 500, ball=ball,
        )
        all_conv &= all(seq.converged)
        verdict = classify_parabolicity(seq)
        rows.append(
            {
                "family": seq.family,
                "p": p,
                "classification": verdict.classification,
                "fitted_exponent": verdict.fitted_exponent,
                "last_cap": verdict.last_value,
                "note": verdict.note,
            }
        )
    rows.sort(key=lambda row: (row["family"], row["p"]))
    return Report("classify", _echo(config), rows, converged=all_conv, version=__version__)


def _cmd_dirichlet(config: RunConfig) -> Report:
    rows = []
    all_conv = True
    if config.family:
        family = parse_family(config.family)
        for p in config.p:
            for n in config.radii:
                ball = family.ball(n)
                rng = np.random.default_rng([config.seed, int(round(p * 1e6)), n])
                shell = ball.boundary.ids
                data = {v: float(t) for v, t in zip(shell, rng.uniform(0.0, 1.0, len(shell)))}
                prob = DirichletProblem(ball.graph, ball.interior, VertexFunction.from_dict(ball.graph, data), p)
                _, rep = solve_dirichlet(prob, tol=config.tol, max_iter=config.max_iter or 500)
                all_conv &= rep.converged
                rows.append(
                    {
                        "source": config.family, "p": p, "n": n,
                        "iterations": rep.iterations, "residual": rep.residual,
                        "energy": rep.energy, "converged": rep.converged,
                    }
                )
    else:
        g = load_graph(config.graph)
        rng = np.random.default_rng(config.seed)
        nb = max(1, g.n // 5)
        bnd = sorted(int(v) for v in rng.choice(g.n, size=nb, replace=False))
        S = VertexSet(g, set(range(g.n)) - set(bnd))
        data = {v: float(t) for v, t in zip(bnd, rng.uniform(0.0, 1.0, nb))}
        for p in config.p:
            prob = DirichletProblem(g, S, VertexFunction.from_dict(g, data), p)
            _, rep = solve_dirichlet(prob, tol=config.tol, max_iter=config.max_iter or 500)
            all_conv &= rep.converged
            rows.append(
                {
                    "source": config.graph, "p": p, "n": g.n,
                    "iterations": rep.iterations, "residual": rep.residual,
                    "energy": rep.energy, "converged": rep.converged,
                }
            )
    rows.sort(key=lambda row: (str(row["source"]), row["p"], row["n"]))
    return Report("dirichlet", _echo(config), rows, converged=all_conv, version=__version__)


def _cmd_capacity(config: RunConfig) -> Report:
    rows = []
    all_conv = True
    if config.family:
        family = parse_family(config.family)
        for p in config.p:
            for n in config.radii:
                ball = family.ball(n)
                cond = Condenser(
                    A=VertexSet(ball.graph, [0]), B=ball.boundary, S=ball.interior
                )
                val, _, rep = capacity(cond, p, tol=config.tol, max_iter=config.max_iter or 500)
                all_conv &= rep.converged
                rows.append(
                    {
                        "source": config.family, "p": p, "n": n, "value": val,
                        "residual": rep.residual, "iterations": rep.iterations,
                        "converged": rep.converged,
                        "admissible": "no-admissible" not in rep.flags,
                    }
                )
    else:
        g = load_graph(config.graph)
        A, B, S = _file_plates(g)
        for p in config.p:
            cond = Condenser(A=A, B=B, S=S)
            val, _, rep = capacity(cond, p, tol=config.tol, max_iter=config.max_iter or 500)
            all_conv &= rep.converged
            rows.append(
                {
                    "source": config.graph, "p": p, "n": None, "value": val,
                    "residual": rep.residual, "iterations": rep.iterations,
                    "converged": rep.converged,
                    "admissible": "no-admissible" not in rep.flags,
                }
            )
    rows.sort(key=lambda row: (str(row["source"]), row["p"], row["n"] or 0))
    return Report("capacity", _echo(config), rows, converged=all_conv, version=__version__)


def _cmd_extremal(config: RunConfig) -> Report:
    rows = []
    if config.family:
        family = parse_family(config.family)
        ball = family.ball(max(config.radii))
        spec = PathFamilySpec.to_shell(ball, 0)
        source = config.family
    else:
        g = load_graph(config.graph)
        A, B, S = _file_plates(g)
        spec = PathFamilySpec.between(A, B, S.union(A).union(B))
        source = config.graph
    for p in config.p:
        lam, weight, active = extremal_length(
            spec, p, tol=config.tol or 1e-9, max_cuts=config.max_iter or 500
        )
        rows.append(
            {
                "source": source, "p": p, "lambda": lam,
                "energy": weight.energy, "cuts": len(active),
            }
        )
    rows.sort(key=lambda row: (str(row["source"]), row["p"]))
    return Report("extremal", _echo(config), rows, converged=True, version=__version__)


def _cmd_decompose(config: RunConfig) -> Report:
    family = parse_family(config.family)
    ball = family.ball(max(config.radii))
    ex = build_exhaustion(family, config.radii, ball=ball)
    f = VertexFunction.indicator(VertexSet(ball.graph, range(ball.graph.n)), [0])
    rows = []
    extra = {"splits": []}
    all_conv = True
    for p in config.p:
        split = royden_decompose(f, ex, p, tol=config.tol or 1e-4, max_iter=config.max_iter or 500)
        all_conv &= split.converged
        for i, r in enumerate(split.radii):
            rows.append(
                {
                    "family": config.family, "p": p, "level": i, "radius": r,
                    "sup_h": split.level_sups[i],
                    "drift": split.drifts[i - 1] if i > 0 else None,
                }
            )
        extra["splits"].append(
            {
                "p": p,
                "energy_harmonic": split.energy_harmonic,
                "energy_potential": split.energy_potential,
                "converged": split.converged,
            }
        )
    rows.sort(key=lambda row: (row["family"], row["p"], row["level"]))
    return Report("decompose", _echo(config), rows, extra=extra, converged=all_conv, version=__version__)


def _cmd_probe(config: RunConfig) -> Report:
    family = parse_family(config.family)
    plus, minus = default_directions(family)
    rows = []
    extra = {"verdicts": []}
    all_conv = True
    for p in config.p:
        result = bhd_probe(family, plus, minus, config.radii, p, tol=config.tol)
        for entry in result.table:
            all_conv &= entry["converged"]
            row = {"family": config.family, "p": p, "verdict": result.verdict}
            row.update({k: v for k, v in entry.items() if k != "converged"})
            rows.append(row)
        extra["verdicts"].append(
            {
                "p": p, "verdict": result.verdict,
                "oscillation": result.oscillation, "energy": result.energy,
                "plus": plus.label, "minus": minus.label,
            }
        )
    rows.sort(key=lambda row: (row["family"], row["p"], row["radius"]))
    return Report("probe", _echo(config), rows, extra=extra, converged=all_conv, version=__version__)


_DISPATCH = {
    "capinf": _cmd_capinf,
    "classify": _cmd_classify,
    "dirichlet": _cmd_dirichlet,
    "capacity": _cmd_capacity,
    "extremal": _cmd_extremal,
    "decompose": _cmd_decompose,
    "probe": _cmd_probe,
}


def _write(report: Report, config: RunConfig) -> None:
    data = emit_report(report, config.fmt)
    if config.out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(config.out, "wb") as fh:
            fh.write(data)


def run(config: RunConfig) -> int:
    """Dispatch a validated config, write its report, return the exit code."""
    try:
        report = _DISPATCH[config.command](config)
    except (RoydenError, OSError, ValueError, KeyError) as exc:
        print(f"royden: error: {exc}", file=sys.stderr)
        report = Report(
            command=config.command,
            config=_echo(config),
            results=[],
            converged=True,
            error=f"{type(exc).__name__}: {exc}",
            version=__version__,
        )
        try:
            _write(report, config)
        except OSError:
            pass
        return 1
    _write(report, config)
    return 0 if report.converged else 2


def _configure_logging() -> None:
    level_name = os.environ.get("ROYDEN_LOG", "off").strip().lower()
    if level_name in ("", "off"):
        logger.addHandler(logging.NullHandler())
        logger.setLevel(logging.CRITICAL + 1)
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("royden %(levelname)s: %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if level_name == "debug" else logging.INFO)


def main(argv=None) -> int:
    _configure_logging()
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"royden: error: {exc}", file=sys.stderr)
        return 1
    return run(config)
