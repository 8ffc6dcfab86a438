"""Zig-zag profile, its lift to a laminate test map, and construction ids."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import numeric
from .mesh import CubeMesh, PwAffineMap, build_kuhn_mesh
from .numeric import exact, mpq

HALF = mpq(1, 2)


class CompatibilityError(ValueError):
    """Construction parameters do not fit the mesh exactly."""


def _floor(q) -> int:
    return int(q.numerator // q.denominator)


def zigzag(t: Any) -> Any:
    """Period-1 tent: t on [0, 1/2], 1 - t on [1/2, 1]."""
    if numeric.is_exact_scalar(t):
        t = exact(t)
        r = t - _floor(t)
        return r if r <= HALF else 1 - r
    r = float(t) % 1.0
    return r if r <= 0.5 else 1.0 - r


@dataclass(frozen=True)
class ZigZagProfile:
    """x -> (eps/2) * zigzag(x / eps) with 1/eps an even positive integer."""

    eps: Any

    def __post_init__(self) -> None:
        eps = exact(self.eps)
        object.__setattr__(self, "eps", eps)
        if eps <= 0:
            raise CompatibilityError("eps must be positive")
        inv = 1 / eps
        if inv.denominator != 1 or int(inv.numerator) % 2:
            raise CompatibilityError(f"1/eps must be an even positive integer, got eps={eps}")

    @property
    def periods(self) -> int:
        return int((1 / self.eps).numerator)

    def __call__(self, x: Any) -> Any:
        if numeric.is_exact_scalar(x):
            return self.eps / 2 * zigzag(exact(x) / self.eps)
        return float(self.eps) / 2 * zigzag(float(x) / float(self.eps))

    def compatible_k(self) -> int:
        """Smallest mesh resolution whose lines contain every kink."""
        return int((2 / self.eps).numerator)

    def check_mesh(self, k: int) -> None:
        steps = k * self.eps / 2
        if steps.denominator != 1 or steps <= 0:
            raise CompatibilityError(f"k={k} is incompatible with eps={self.eps}: k*eps/2 must be a positive integer")


@dataclass(frozen=True)
class LaminateSpec:
    """phi(x) = (eps/2) zigzag(x . a / eps) b with a an axis direction."""

    direction: tuple
    amplitude: tuple
    eps: Any

    def __post_init__(self) -> None:
        object.__setattr__(self, "direction", tuple(exact(v) for v in self.direction))
        object.__setattr__(self, "amplitude", tuple(exact(v) for v in self.amplitude))
        object.__setattr__(self, "eps", ZigZagProfile(self.eps).eps)

    @classmethod
    def along_axis(cls, axis: int, n: int, amplitude: Sequence, eps: Any) -> "LaminateSpec":
        """``axis`` is 0-based."""
        if not 0 <= axis < n:
            raise ValueError(f"axis {axis} out of range for n={n}")
        return cls(tuple(int(j == axis) for j in range(n)), tuple(amplitude), eps)

    @property
    def axis(self) -> int:
        nonzero = [j for j, v in enumerate(self.direction) if v != 0]
        if len(nonzero) != 1 or self.direction[nonzero[0]] != 1:
            raise NotImplementedError("only axis-aligned laminate directions are supported")
        return nonzero[0]

    @property
    def profile(self) -> ZigZagProfile:
        return ZigZagProfile(self.eps)

    def construction_id(self) -> str:
        parts = [str(self.axis + 1)] + [numeric.dump_number(b) for b in self.amplitude] + [numeric.dump_number(self.eps)]
        return f"laminate({','.join(parts)})"

    def boundary_sup_sq_bound(self, n: int) -> Any:
        """(eps/4)^2 |b|^2, the largest boundary value; 0 when n = 1."""
        if n == 1:
            return mpq(0)
        return (self.eps / 4) ** 2 * sum(b * b for b in self.amplitude)


def laminate_test_map(spec: LaminateSpec, mesh: CubeMesh, mode: str = "rational") -> PwAffineMap:
    if len(spec.direction) != mesh.n:
        raise ValueError(f"direction lives in R^{len(spec.direction)}, mesh is {mesh.n}-dimensional")
    axis = spec.axis
    profile = spec.profile
    profile.check_mesh(mesh.k)
    # depends on one lattice index only: evaluate once per mesh line
    column = [profile(mpq(i, mesh.k)) for i in range(mesh.k + 1)]
    b = list(spec.amplitude)
    table = np.empty((mesh.k + 1, len(b)), dtype=object)
    for i, c in enumerate(column):
        for j, bj in enumerate(b):
            table[i, j] = c * bj
    values = table[mesh.lattice[:, axis]]
    phi = PwAffineMap(mesh, values)
    return phi if mode == "rational" else phi.to_mode(mode)


def zigzag_test_map(eps: Any, mesh: CubeMesh, mode: str = "rational") -> PwAffineMap:
    """phi_1 = phi_2 = (eps/2) zigzag(x_1/eps) on the unit square."""
    if mesh.n != 2:
        raise ValueError("the zig-zag test map lives on the unit square (n=2)")
    return laminate_test_map(LaminateSpec.along_axis(0, 2, (1, 1), eps), mesh, mode)


def clamp_boundary(phi: PwAffineMap) -> PwAffineMap:
    """Same nodal values with every boundary node set to zero."""
    vals = phi.nodal_values.copy()
    vals[phi.mesh.boundary_mask] = mpq(0) if phi.mode == "rational" else 0.0
    return PwAffineMap(phi.mesh, vals)


def largest_eps_for_delta(spec_amplitude: Sequence, n: int, delta: Any) -> Any:
    """Largest eps = 1/(2p) whose laminate boundary sup is <= delta."""
    if n == 1:
        return HALF
    b_sq = sum(exact(b) ** 2 for b in spec_amplitude)
    delta = exact(delta)
    # need (eps/4)^2 |b|^2 <= delta^2 with eps = 1/(2p), i.e. 64 p^2 delta^2 >= |b|^2
    target = b_sq / (64 * delta * delta)
    p = max(1, math.isqrt(int(target.numerator // target.denominator)))
    while p * p < target:
        p += 1
    while p > 1 and (p - 1) ** 2 >= target:
        p -= 1
    return mpq(1, 2 * p)


_ID = re.compile(r"^\s*([a-z-]+)\s*\((.*)\)\s*$")


def parse_construction_id(cid: str) -> tuple[str, list[str]]:
    match = _ID.match(cid)
    if not match:
        raise ValueError(f"malformed construction id {cid!r}")
    args = [a.strip() for a in match.group(2).split(",")] if match.group(2).strip() else []
    return match.group(1), args


def construction_spec(cid: str, n: int, m: int) -> tuple[LaminateSpec, bool]:
    """Parse ``zigzag(eps)``, ``laminate(axis,b1,..,bm,eps)`` or their ``clamped-`` forms."""
    name, args = parse_construction_id(cid)
    clamped = name.startswith("clamped-")
    base = name[len("clamped-"):] if clamped else name
    try:
        if base == "zigzag":
            if len(args) != 1:
                raise ValueError("zigzag takes one argument: eps")
            if (n, m) != (2, 2):
                raise ValueError("zigzag is defined for n = m = 2")
            return LaminateSpec.along_axis(0, 2, (1, 1), exact(args[0])), clamped
        if base == "laminate":
            if len(args) != m + 2:
                raise ValueError(f"laminate takes axis, {m} amplitudes and eps")
            axis = int(args[0]) - 1
            amp = tuple(exact(a) for a in args[1:-1])
            return LaminateSpec.along_axis(axis, n, amp, exact(args[-1])), clamped
    except ZeroDivisionError as exc:
        raise ValueError(f"bad number in {cid!r}") from exc
    raise ValueError(f"unknown construction {name!r}")


def build_construction(desc: dict, n: int, m: int, mode: str = "rational") -> PwAffineMap:
    """Rebuild a test map from its serialized descriptor (used to re-check witnesses)."""
    cid = desc["id"]
    if cid == "pw_affine":
        return PwAffineMap.from_dict(desc["map"]).to_mode(mode)
    spec, clamped = construction_spec(cid, n, m)
    mesh = build_kuhn_mesh(n, int(desc["k"]))
    phi = laminate_test_map(spec, mesh)
    if clamped:
        phi = clamp_boundary(phi)
    return phi.to_mode(mode)


def describe_laminate(spec: LaminateSpec, k: int, clamped: bool = False) -> dict:
    cid = spec.construction_id()
    if spec.axis == 0 and spec.amplitude == (1, 1) and len(spec.direction) == 2:
        cid = f"zigzag({numeric.dump_number(spec.eps)})"
    return {"id": ("clamped-" if clamped else "") + cid, "k": k}
