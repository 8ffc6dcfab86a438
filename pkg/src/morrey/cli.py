"""Command-line front end.

Exit codes: 0 expected verdict, 2 unexpected verdict, 64 usage error, 65 bad config.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from typing import Any, Sequence

from . import numeric
from .checkers import (
    CONFIRMED,
    INCONSISTENT,
    ReproduceConfig,
    SearchConfig,
    SuiteConfig,
    default_deltas,
    falsify_strong_mqc,
    falsify_weak_mqc,
    reproduce_counterexample,
    scalar_equivalence_suite,
    validate_witness,
)
from .constructions import CompatibilityError
from .density import DimensionError, GradientPoint, SampleBudget, sublevel_midpoint_convexity
from .gallery import GALLERY, UnknownDensityError, resolve_density
from .numeric import exact
from .records import NO_VIOLATION, VIOLATED, Verdict
from .report import build_report, write_report

EXIT_OK = 0
EXIT_UNEXPECTED = 2
EXIT_USAGE = 64
EXIT_CONFIG = 65

COMMANDS = ("gallery", "check-qc", "falsify-weak", "falsify-strong", "scalar-suite", "reproduce")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str) -> None:
        super().__init__(f"field '{field_name}': {message}")
        self.field = field_name


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    density: str | None = None
    A: list | None = None
    k: int = 8
    trials: int = 10_000
    local_steps: int = 200
    seed: int = 0
    deltas: list | None = None
    eps_def: str = "1/2"
    K: str = "1"
    mode: str = "rational"
    s: str | None = None
    pairs: str = "random"
    count: int = 1000
    points: int = 1000
    expect: str | None = None
    include_zero_map: bool = True
    out: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        if "command" not in data:
            raise ConfigError("command", "missing")
        cfg = cls(**data)
        cfg.validate_types()
        return cfg

    def validate_types(self) -> None:
        for name in ("k", "trials", "local_steps", "seed", "count", "points"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(name, f"expected an integer, got {v!r}")
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command {self.command!r}")
        if self.mode not in numeric.MODES:
            raise ConfigError("mode", f"expected one of {numeric.MODES}")
        if self.pairs not in ("vertices", "random"):
            raise ConfigError("pairs", "expected 'vertices' or 'random'")
        if self.expect not in (None, "violated", "no_violation", "any"):
            raise ConfigError("expect", "expected 'violated', 'no_violation' or 'any'")
        if self.k < 1:
            raise ConfigError("k", "must be positive")
        for name in ("trials", "local_steps", "count", "points"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be nonnegative")

    def hashed(self) -> dict:
        out = self.to_dict()
        out.pop("out")
        return out


def _number(value: Any, name: str):
    try:
        return exact(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(name, f"not a number: {value!r}") from exc


def _number_list(values: Any, name: str) -> list:
    if isinstance(values, str):
        values = [v for v in values.split(",")]
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(name, "expected a nonempty list of numbers")
    return [_number(v, name) for v in values]


def _density(cfg: RunConfig):
    if not cfg.density:
        raise ConfigError("density", "a density id is required for this command")
    try:
        return resolve_density(cfg.density)
    except UnknownDensityError as exc:
        raise ConfigError("density", str(exc)) from exc


def _point(cfg: RunConfig, d) -> GradientPoint:
    if cfg.A is None:
        raise ConfigError("A", "the point A is required for this command")
    vals = _number_list(cfg.A, "A")
    if len(vals) != d.dim:
        raise ConfigError("A", f"expected {d.dim} entries for a {d.n}x{d.m} density, got {len(vals)}")
    return GradientPoint(tuple(vals), d.n, d.m)


def _deltas(cfg: RunConfig) -> tuple:
    if cfg.deltas is None:
        return default_deltas()
    vals = _number_list(cfg.deltas, "deltas")
    if any(v <= 0 for v in vals) or any(b >= a for a, b in zip(vals, vals[1:])):
        raise ConfigError("deltas", "must be positive and strictly decreasing")
    return tuple(vals)


def _positive(value: Any, name: str):
    v = _number(value, name)
    if v <= 0:
        raise ConfigError(name, "must be positive")
    return v


def _witness_checks(verdict: Verdict, d, mode: str) -> list[dict]:
    out = []
    for i, w in enumerate(([verdict.witness] if verdict.witness else []) + list(verdict.witnesses)):
        checked = replace(w, arithmetic_mode=mode)
        out.append({"index": i, "kind": w.kind, "mode": mode, "problems": validate_witness(checked, d)})
    return out


def _verdict_exit(status: str, expect: str) -> int:
    if expect == "any":
        return EXIT_OK
    if expect == "no_violation" and status == VIOLATED:
        return EXIT_UNEXPECTED
    if expect == "violated" and status != VIOLATED:
        return EXIT_UNEXPECTED
    return EXIT_OK


def _search_config(cfg: RunConfig) -> SearchConfig:
    return SearchConfig(k=cfg.k, trials=cfg.trials, local_steps=cfg.local_steps, seed=cfg.seed,
                        include_zero_map=cfg.include_zero_map)


def execute(cfg: RunConfig) -> tuple[str, dict, int, str]:
    """Run one command; returns (status, result, exit code, one-line summary)."""
    cmd = cfg.command
    if cmd == "gallery":
        if cfg.density:
            d = _density(cfg)
            return "ok", {"density": d.descriptor()}, EXIT_OK, f"{d.density_id}: n={d.n}, m={d.m}"
        result = {"densities": GALLERY,
                  "constructions": {"zigzag(eps)": "zig-zag lift x -> (eps/2) zigzag(x1/eps) (1, 1), n = m = 2",
                                    "laminate(axis,b1,...,bm,eps)": "axis-aligned laminate"}}
        return "ok", result, EXIT_OK, f"{len(GALLERY)} gallery densities"

    if cmd == "reproduce":
        strong_A = None if cfg.A is None else tuple(_number_list(cfg.A, "A"))
        if strong_A is not None and len(strong_A) != 4:
            raise ConfigError("A", "reproduce works in R^4: expected 4 entries")
        rc = ReproduceConfig(k=cfg.k, trials=cfg.trials, local_steps=cfg.local_steps, seed=cfg.seed,
                             deltas=_deltas(cfg), epsilon_def=_positive(cfg.eps_def, "eps_def"),
                             K=_positive(cfg.K, "K"), strong_A=strong_A)
        result = reproduce_counterexample(rc)
        code = EXIT_OK if result["status"] == CONFIRMED else EXIT_UNEXPECTED
        line = result["status"] + ("" if code == EXIT_OK else f" (failed: {', '.join(result['failed_stages'])})")
        return result["status"], result, code, line

    d = _density(cfg)
    expect = cfg.expect or "no_violation"
    if cmd == "check-qc":
        s = _number(cfg.s if cfg.s is not None else "1/2", "s")
        budget = SampleBudget(count=max(1, cfg.count), vertex_pairs=cfg.pairs == "vertices", mode=cfg.mode)
        v = sublevel_midpoint_convexity(d, s, budget, cfg.seed)
        result = {"verdict": v.to_dict()}
        line = v.summary()
        if v.violated:
            line += f"; midpoint {[numeric.dump_number(x) for x in v.witness.A.entries]}"
        return v.status, result, _verdict_exit(v.status, expect), line

    if cmd == "falsify-weak":
        A = _point(cfg, d)
        v = falsify_weak_mqc(d, A, _search_config(cfg))
        result = {"verdict": v.to_dict(), "witness_checks": _witness_checks(v, d, cfg.mode)}
        return v.status, result, _verdict_exit(v.status, expect), v.summary()

    if cmd == "falsify-strong":
        A = _point(cfg, d)
        v = falsify_strong_mqc(d, A, _positive(cfg.eps_def, "eps_def"), _positive(cfg.K, "K"), _deltas(cfg),
                               cfg=_search_config(cfg))
        result = {"verdict": v.to_dict(), "witness_checks": _witness_checks(v, d, cfg.mode)}
        return v.status, result, _verdict_exit(v.status, expect), v.summary()

    if cmd == "scalar-suite":
        try:
            report = scalar_equivalence_suite(d, SuiteConfig(points=cfg.points, pairs=max(1, cfg.count), seed=cfg.seed))
        except (DimensionError, ValueError) as exc:
            raise ConfigError("density", str(exc)) from exc
        code = EXIT_UNEXPECTED if report["status"] == INCONSISTENT else EXIT_OK
        return report["status"], report, code, f"{report['status']}: {report['budget']}"

    raise ConfigError("command", f"unknown command {cmd!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="morrey", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON run configuration; flags override it")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", dest="sub_config", help="JSON run configuration; flags override it")
        p.add_argument("--density")
        p.add_argument("--A", dest="A", help="comma-separated entries, e.g. 1/2,0,1/2,0")
        p.add_argument("--k", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--local-steps", dest="local_steps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--deltas", help="comma-separated decreasing deltas (default 2^-1..2^-10)")
        p.add_argument("--eps-def", dest="eps_def")
        p.add_argument("--K", dest="K")
        p.add_argument("--mode", choices=numeric.MODES)
        p.add_argument("--s")
        p.add_argument("--pairs", choices=("vertices", "random"))
        p.add_argument("--count", type=int, help="number of convexity pairs")
        p.add_argument("--points", type=int, help="sampled points for scalar-suite")
        p.add_argument("--expect", choices=("violated", "no_violation", "any"))
        p.add_argument("--no-zero-map", dest="include_zero_map", action="store_const", const=False)
        p.add_argument("--out", help="report path (JSON)")
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    return data


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.command is None:
        print("usage error: a subcommand is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        data: dict = {}
        config_path = args.sub_config or args.config
        if config_path:
            data = _load_config(config_path)
        data["command"] = args.command
        for key in ("density", "A", "k", "trials", "local_steps", "seed", "deltas", "eps_def", "K", "mode",
                    "s", "pairs", "count", "points", "expect", "include_zero_map", "out"):
            value = getattr(args, key)
            if value is not None:
                data[key] = value
        cfg = RunConfig.from_dict(data)
        start = time.perf_counter()
        status, result, code, line = execute(cfg)
    except (ConfigError, CompatibilityError, DimensionError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TypeError as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = build_report(cfg.command, cfg.hashed(), status, result, time.perf_counter() - start)
    if cfg.out:
        write_report(cfg.out, report)
    print(f"{cfg.command}: {line}")
    return code


if __name__ == "__main__":
    sys.exit(main())
