"""String ids for the built-in densities, e.g. ``square4d`` or ``segment2d(0,0,1,0):1x2``."""
from __future__ import annotations

import re
from typing import Any

from . import numeric
from .density import (
    Density,
    IndicatorDensity,
    SegmentUnionSet,
    indicator_from_descriptor,
    make_point_indicator_2d,
    make_segment_indicator_2d,
    make_square_boundary_4d,
)
from .numeric import exact, mpq

_ID = re.compile(r"^\s*(?P<name>[a-z0-9]+)\s*(?:\((?P<args>[^)]*)\))?\s*(?::\s*(?P<n>\d+)x(?P<m>\d+))?\s*$")

GALLERY = {
    "square4d": "indicator of the square boundary OMRN in R^4 (n = m = 2)",
    "segment2d(ax,ay,bx,by)": "indicator of a planar segment, default O-(1,0); suffix :1x2 or :2x1 sets (n, m)",
    "point2d(ax,ay)": "indicator of a single point in R^2",
    "twosegments2d": "indicator of (0,0)-(1,0) union (0,1)-(1,1) in R^2 (not quasiconvex)",
    "spike1d": "1 at the origin, 0 elsewhere in R^1 (upper but not lower semicontinuous)",
    "constant(c)": "constant density; suffix :nxm sets the shape (default 1x1)",
}


class UnknownDensityError(ValueError):
    pass


def _shape(match, default: tuple[int, int]) -> tuple[int, int]:
    if match.group("n") is None:
        return default
    return int(match.group("n")), int(match.group("m"))


def _numbers(args: str | None, count: int, name: str) -> list:
    if args is None or not args.strip():
        return []
    parts = [p.strip() for p in args.split(",")]
    if len(parts) != count:
        raise UnknownDensityError(f"{name} takes {count} numbers, got {len(parts)}")
    try:
        return [exact(p) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise UnknownDensityError(f"bad number in {name} arguments: {args!r}") from exc


def _spike(x: tuple) -> Any:
    return numeric.as_mode(1 if x[0] == 0 else 0, numeric.mode_of_values(x))


def resolve_density(density_id: str) -> Density:
    match = _ID.match(density_id)
    if not match:
        raise UnknownDensityError(f"malformed density id {density_id!r}")
    name, args = match.group("name"), match.group("args")
    if name == "square4d":
        if args or match.group("n"):
            raise UnknownDensityError("square4d takes no arguments")
        return make_square_boundary_4d()
    if name == "segment2d":
        vals = _numbers(args, 4, name) or [mpq(0), mpq(0), mpq(1), mpq(0)]
        n, m = _shape(match, (2, 1))
        try:
            return make_segment_indicator_2d(vals[:2], vals[2:], n, m)
        except ValueError as exc:
            raise UnknownDensityError(str(exc)) from exc
    if name == "point2d":
        vals = _numbers(args, 2, name) or [mpq(0), mpq(0)]
        n, m = _shape(match, (2, 1))
        return make_point_indicator_2d(vals, n, m)
    if name == "twosegments2d":
        n, m = _shape(match, (2, 1))
        if n * m != 2:
            raise UnknownDensityError("twosegments2d needs n*m == 2")
        S = SegmentUnionSet.exact_from([((0, 0), (1, 0)), ((0, 1), (1, 1))])
        suffix = "" if (n, m) == (2, 1) else f":{n}x{m}"
        return IndicatorDensity(S, n, m, density_id=f"twosegments2d{suffix}", description="two parallel segments")
    if name == "spike1d":
        return Density(_spike, 1, 1, claimed_lsc=False, density_id="spike1d",
                       description="1 at the origin, 0 elsewhere", sup_value=mpq(1))
    if name == "constant":
        vals = _numbers(args, 1, name) or [mpq(0)]
        n, m = _shape(match, (1, 1))
        c = vals[0]
        label = f"constant({numeric.dump_number(c)}):{n}x{m}"

        def const(x: tuple, c=c) -> Any:
            return c if numeric.mode_of_values(x) == "rational" else float(c)

        return Density(const, n, m, claimed_lsc=True, density_id=label, description="constant density", sup_value=c)
    raise UnknownDensityError(f"unknown density id {density_id!r}; known: {', '.join(GALLERY)}")


def density_from_descriptor(data: dict) -> Density:
    """Rebuild a density from its JSON descriptor (indicators) or its gallery id."""
    if "segments" in data:
        return indicator_from_descriptor(data)
    return resolve_density(data["id"])
