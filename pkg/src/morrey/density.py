"""Pointwise densities on gradient space, segment-union indicators and the
sublevel-set midpoint convexity check.

A density is always built from a total function: it is evaluated at every
point, never "almost everywhere".  This matters here because the square
indicator in R^4 differs from the constant 1 only on a null set, and the two
behave differently under the strong Morrey test.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import numeric
from .numeric import FLOAT_TOLERANCE, exact, mpq
from .parallel import DEFAULT_STREAMS, ordered_map, stream_rngs
from .records import INCONCLUSIVE, NO_VIOLATION, NONCONVEX_SUBLEVEL, VIOLATED, Verdict, Witness


class DimensionError(ValueError):
    """Input dimensions do not match the object they are combined with."""


@dataclass(frozen=True)
class GradientPoint:
    """A point of R^{nm}, read as the n x m matrix of a gradient.

    Entries are stored component-major: ``entries[i*n + j]`` is the partial
    derivative of component ``i`` in direction ``j``.  For n = m = 2 the block
    split ``(P1, P2)`` is then ``(entries[:2], entries[2:])``.
    """

    entries: tuple
    n: int
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.n < 1 or self.m < 1:
            raise DimensionError("n and m must be positive")
        if len(self.entries) != self.n * self.m:
            raise DimensionError(
                f"expected {self.n * self.m} entries for n={self.n}, m={self.m}, got {len(self.entries)}"
            )

    @classmethod
    def of(cls, entries: Iterable, n: int, m: int, mode: str | None = None) -> "GradientPoint":
        vals = list(entries)
        if mode is None:
            mode = numeric.mode_of_values(vals)
        return cls(tuple(numeric.as_mode(v, mode) for v in vals), n, m)

    @classmethod
    def from_matrix(cls, G) -> "GradientPoint":
        G = np.asarray(G, dtype=object if np.asarray(G).dtype == object else float)
        n, m = G.shape
        return cls(tuple(G.T.reshape(-1).tolist()), n, m)

    def matrix(self) -> np.ndarray:
        dtype = object if self.mode == "rational" else float
        return np.array(self.entries, dtype=dtype).reshape(self.m, self.n).T

    def blocks(self) -> tuple[tuple, ...]:
        return tuple(self.entries[i * self.n : (i + 1) * self.n] for i in range(self.m))

    @property
    def mode(self) -> str:
        return numeric.mode_of_values(self.entries)

    def to_mode(self, mode: str) -> "GradientPoint":
        return GradientPoint.of(self.entries, self.n, self.m, mode)

    def as_array(self) -> np.ndarray:
        return numeric.array(self.entries, self.mode)

    def __add__(self, other: "GradientPoint") -> "GradientPoint":
        if (self.n, self.m) != (other.n, other.m):
            raise DimensionError("shape mismatch")
        return GradientPoint(tuple(a + b for a, b in zip(self.entries, other.entries)), self.n, self.m)

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "entries": [numeric.dump_number(v) for v in self.entries]}

    @classmethod
    def from_dict(cls, data: dict) -> "GradientPoint":
        return cls(tuple(numeric.load_number(v) for v in data["entries"]), int(data["n"]), int(data["m"]))


def _point_tuple(x: Any) -> tuple:
    if isinstance(x, GradientPoint):
        return x.entries
    if isinstance(x, np.ndarray):
        return tuple(x.tolist())
    return tuple(x)


@dataclass(frozen=True)
class SegmentUnionSet:
    """Finite union of closed segments [a, b] in R^dim."""

    dim: int
    segments: tuple

    def __post_init__(self) -> None:
        segs = []
        for a, b in self.segments:
            a, b = tuple(a), tuple(b)
            if len(a) != self.dim or len(b) != self.dim:
                raise DimensionError(f"segment endpoints must lie in R^{self.dim}")
            segs.append((a, b))
        if not segs:
            raise ValueError("a segment union needs at least one segment")
        object.__setattr__(self, "segments", tuple(segs))

    @classmethod
    def exact_from(cls, segments: Iterable[tuple[Sequence, Sequence]]) -> "SegmentUnionSet":
        segs = [(tuple(exact(v) for v in a), tuple(exact(v) for v in b)) for a, b in segments]
        return cls(len(segs[0][0]), tuple(segs))

    @property
    def degenerate(self) -> list[int]:
        """Indices of segments that collapse to a single point."""
        return [i for i, (a, b) in enumerate(self.segments) if a == b]

    def vertices(self) -> list[tuple]:
        seen: list[tuple] = []
        for a, b in self.segments:
            for v in (a, b):
                if v not in seen:
                    seen.append(v)
        return seen

    def bounding_box(self) -> tuple[tuple, tuple]:
        pts = self.vertices()
        lo = tuple(min(p[i] for p in pts) for i in range(self.dim))
        hi = tuple(max(p[i] for p in pts) for i in range(self.dim))
        return lo, hi

    def distance_sq(self, x: Any) -> Any:
        """Squared Euclidean distance to the set; exact for exact input."""
        x = _point_tuple(x)
        if len(x) != self.dim:
            raise DimensionError(f"point has dimension {len(x)}, set lives in R^{self.dim}")
        if numeric.mode_of_values(x) == "rational":
            x = tuple(exact(v) for v in x)
            segs = self.segments
            zero, one = mpq(0), mpq(1)
        else:
            x = tuple(float(v) for v in x)
            segs = [(tuple(map(float, a)), tuple(map(float, b))) for a, b in self.segments]
            zero, one = 0.0, 1.0
        best = None
        for a, b in segs:
            d = [bi - ai for ai, bi in zip(a, b)]
            w = [xi - ai for xi, ai in zip(x, a)]
            length_sq = sum(di * di for di in d)
            if length_sq == 0:
                t = zero
            else:
                t = sum(wi * di for wi, di in zip(w, d)) / length_sq
                t = zero if t < zero else (one if t > one else t)
            r = sum((wi - t * di) ** 2 for wi, di in zip(w, d))
            if best is None or r < best:
                best = r
        return best

    def distance_sq_batch(self, X: np.ndarray) -> np.ndarray:
        """Vectorized float version of :meth:`distance_sq` for rows of ``X``."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DimensionError(f"expected rows in R^{self.dim}")
        best = np.full(X.shape[0], np.inf)
        for a, b in self.segments:
            a = np.asarray(a, dtype=float)
            d = np.asarray(b, dtype=float) - a
            w = X - a
            length_sq = float(d @ d)
            if length_sq == 0.0:
                t = np.zeros(X.shape[0])
            else:
                t = np.clip(w @ d / length_sq, 0.0, 1.0)
            r = w - t[:, None] * d
            np.minimum(best, np.einsum("ij,ij->i", r, r), out=best)
        return best

    def sample(self, rng: np.random.Generator, mode: str, bits: int = 20) -> tuple:
        a, b = self.segments[int(rng.integers(len(self.segments)))]
        scale = 2**bits
        t = mpq(int(rng.integers(0, scale + 1)), scale)
        if mode == "float":
            t = float(t)
            return tuple(float(ai) + t * (float(bi) - float(ai)) for ai, bi in zip(a, b))
        return tuple(exact(ai) + t * (exact(bi) - exact(ai)) for ai, bi in zip(a, b))

    def to_list(self) -> list:
        return [[[numeric.dump_number(v) for v in a], [numeric.dump_number(v) for v in b]] for a, b in self.segments]


def segment_distance(S: SegmentUnionSet, x: Any) -> Any:
    """Euclidean distance from ``x`` to ``S``.

    Exact (``mpq``) when the input is exact and the squared distance is a
    rational square; otherwise a float.
    """
    r = S.distance_sq(x)
    if isinstance(r, float):
        return float(np.sqrt(r))
    return numeric.exact_sqrt(r)


@dataclass
class SublevelSampler:
    """How to draw points of a sublevel set {f <= s}.

    ``draw`` returns a point or ``None`` when it gives up; ``anchors`` are
    deterministic points (e.g. segment endpoints) used for pair enumeration.
    """

    empty: bool = False
    draw: Callable[[np.random.Generator, str], tuple | None] | None = None
    anchors: list[tuple] | None = None


class Density:
    """A total, pure function f: R^{nm} -> R with shape metadata."""

    def __init__(
        self,
        evaluator: Callable[[tuple], Any],
        n: int,
        m: int,
        *,
        claimed_lsc: bool = False,
        description: str = "",
        density_id: str | None = None,
        sup_value: Any = None,
    ) -> None:
        if not callable(evaluator):
            raise TypeError("a density is built from a total function, not from sampled data")
        if n < 1 or m < 1:
            raise DimensionError("n and m must be positive")
        self.evaluator = evaluator
        self.n = n
        self.m = m
        self.claimed_lsc = claimed_lsc
        self.description = description
        self.density_id = density_id or description or "custom"
        # Known global supremum; lets exact ess-sup evaluation stop early.
        self.sup_value = sup_value

    @property
    def dim(self) -> int:
        return self.n * self.m

    def _check(self, x: tuple) -> tuple:
        if len(x) != self.dim:
            raise DimensionError(f"density on R^{self.dim} evaluated at a point of R^{len(x)}")
        return x

    def evaluate(self, x: Any) -> Any:
        return self.evaluator(self._check(_point_tuple(x)))

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DimensionError(f"expected rows in R^{self.dim}")
        dtype = object if X.dtype == object else float
        return np.array([self.evaluator(tuple(row)) for row in X.tolist()], dtype=dtype)

    def sublevel_sampler(self, s: Any) -> SublevelSampler | None:
        return None

    def descriptor(self) -> dict:
        return {
            "id": self.density_id,
            "n": self.n,
            "m": self.m,
            "claimed_lsc": self.claimed_lsc,
            "description": self.description,
        }

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.density_id!r}, n={self.n}, m={self.m})"


class IndicatorDensity(Density):
    """``on_value`` on a closed segment union (within tolerance), ``off_value`` elsewhere.

    ``tolerance=None`` selects the per-mode default: 0 for exact input and
    1e-9 for float input.
    """

    def __init__(
        self,
        segment_set: SegmentUnionSet,
        n: int,
        m: int,
        *,
        on_value: Any = 0,
        off_value: Any = 1,
        tolerance: Any = None,
        description: str = "",
        density_id: str | None = None,
    ) -> None:
        if segment_set.dim != n * m:
            raise DimensionError(f"set lives in R^{segment_set.dim}, density needs R^{n * m}")
        on_value, off_value = exact(on_value), exact(off_value)
        if not on_value < off_value:
            raise ValueError("indicator needs on_value < off_value to be lower semicontinuous")
        if tolerance is not None and tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        self.set = segment_set
        self.on_value = on_value
        self.off_value = off_value
        self.tolerance = None if tolerance is None else exact(tolerance)
        super().__init__(
            self._evaluate_point,
            n,
            m,
            claimed_lsc=True,
            description=description or "indicator of a segment union",
            density_id=density_id,
            sup_value=off_value,
        )

    def tolerance_for(self, mode: str) -> Any:
        if mode == "rational":
            return self.tolerance if self.tolerance is not None else mpq(0)
        return float(self.tolerance) if self.tolerance is not None else FLOAT_TOLERANCE

    def _evaluate_point(self, x: tuple) -> Any:
        mode = numeric.mode_of_values(x)
        tau = self.tolerance_for(mode)
        inside = self.set.distance_sq(x) <= tau * tau
        value = self.on_value if inside else self.off_value
        return value if mode == "rational" else float(value)

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DimensionError(f"expected rows in R^{self.dim}")
        if X.dtype == object:
            return np.array([self._evaluate_point(tuple(row)) for row in X.tolist()], dtype=object)
        tau = self.tolerance_for("float")
        inside = self.set.distance_sq_batch(X) <= tau * tau
        return np.where(inside, float(self.on_value), float(self.off_value))

    def sublevel_sampler(self, s: Any) -> SublevelSampler:
        if s < self.on_value:
            return SublevelSampler(empty=True)
        if s < self.off_value:
            return SublevelSampler(draw=lambda rng, mode: self.set.sample(rng, mode), anchors=self.set.vertices())
        lo, hi = self.set.bounding_box()
        lo = tuple(v - 1 for v in lo)
        hi = tuple(v + 1 for v in hi)
        return SublevelSampler(draw=lambda rng, mode: _box_sample(rng, mode, lo, hi), anchors=self.set.vertices())

    def descriptor(self) -> dict:
        return {
            "id": self.density_id,
            "n": self.n,
            "m": self.m,
            "on_value": numeric.dump_number(self.on_value),
            "off_value": numeric.dump_number(self.off_value),
            "tolerance": None if self.tolerance is None else numeric.dump_number(self.tolerance),
            "segments": self.set.to_list(),
        }


def indicator_from_descriptor(data: dict) -> IndicatorDensity:
    segs = [(tuple(numeric.load_number(v, "rational") for v in a), tuple(numeric.load_number(v, "rational") for v in b))
            for a, b in data["segments"]]
    n, m = int(data["n"]), int(data["m"])
    tol = data.get("tolerance")
    return IndicatorDensity(
        SegmentUnionSet(n * m, tuple(segs)),
        n,
        m,
        on_value=numeric.load_number(data["on_value"], "rational"),
        off_value=numeric.load_number(data["off_value"], "rational"),
        tolerance=None if tol is None else numeric.load_number(tol, "rational"),
        density_id=data.get("id"),
    )


def eval_density(d: Density, x: Any) -> Any:
    return d.evaluate(x)


O4 = (0, 0, 0, 0)
M4 = (1, 0, 0, 0)
N4 = (0, 0, 1, 0)
R4 = (1, 0, 1, 0)
P4 = (mpq(1, 2), 0, mpq(1, 2), 0)


def make_segment_indicator_2d(a: Sequence, b: Sequence, n: int = 2, m: int = 1) -> IndicatorDensity:
    """0 on the closed segment [a, b] in R^2, 1 elsewhere.

    The (n, m) split is caller-declared metadata: (2, 1) reads the plane as
    gradients of scalar maps on a square, (1, 2) as derivatives of curves.
    """
    if n * m != 2:
        raise DimensionError("a planar density needs n*m == 2")
    a, b = tuple(exact(v) for v in a), tuple(exact(v) for v in b)
    if len(a) != 2 or len(b) != 2:
        raise DimensionError("segment endpoints must lie in R^2")
    if a == b:
        raise ValueError("degenerate segment; use make_point_indicator_2d")
    label = ",".join(numeric.dump_number(v) for v in a + b)
    return IndicatorDensity(
        SegmentUnionSet(2, ((a, b),)),
        n,
        m,
        density_id=f"segment2d({label})" + ("" if (n, m) == (2, 1) else f":{n}x{m}"),
        description="indicator of a planar segment",
    )


def make_point_indicator_2d(a: Sequence, n: int = 2, m: int = 1) -> IndicatorDensity:
    a = tuple(exact(v) for v in a)
    label = ",".join(numeric.dump_number(v) for v in a)
    return IndicatorDensity(
        SegmentUnionSet(2, ((a, a),)),
        n,
        m,
        density_id=f"point2d({label})" + ("" if (n, m) == (2, 1) else f":{n}x{m}"),
        description="indicator of a single point",
    )


def make_square_boundary_4d() -> IndicatorDensity:
    """0 on the boundary of the square O-M-R-N in R^4, 1 elsewhere (n = m = 2)."""
    S = SegmentUnionSet.exact_from([(O4, M4), (O4, N4), (M4, R4), (N4, R4)])
    return IndicatorDensity(S, 2, 2, density_id="square4d", description="indicator of the square boundary OMRN")


def _box_sample(rng: np.random.Generator, mode: str, lo: tuple, hi: tuple, bits: int = 20) -> tuple:
    scale = 2**bits
    out = []
    for a, b in zip(lo, hi):
        t = mpq(int(rng.integers(0, scale + 1)), scale)
        v = exact(a) + t * (exact(b) - exact(a))
        out.append(v if mode == "rational" else float(v))
    return tuple(out)


@dataclass(frozen=True)
class SampleBudget:
    count: int = 1000
    vertex_pairs: bool = True
    streams: int = DEFAULT_STREAMS
    box: tuple[Any, Any] = (-2, 2)
    max_rejections: int = 64
    mode: str = "rational"

    def __post_init__(self) -> None:
        if self.count <= 0:
            raise ValueError("sample budget must be positive")
        numeric.check_mode(self.mode)


def sublevel_midpoint_convexity(
    d: Density,
    s: Any,
    samples: SampleBudget,
    rng_seed: int,
    sampler: SublevelSampler | None = None,
) -> Verdict:
    """Search for x, y with f(x), f(y) <= s but f((x + y) / 2) > s.

    Deterministic anchor pairs are tried first, then ``samples.count`` random
    pairs split over independent RNG streams.  The reported witness is the
    one with the smallest (stream, draw) index.
    """
    mode = samples.mode
    s = numeric.as_mode(s, mode)
    if sampler is None:
        sampler = d.sublevel_sampler(s)
    if sampler is None:
        lo = tuple([samples.box[0]] * d.dim)
        hi = tuple([samples.box[1]] * d.dim)
        sampler = SublevelSampler(draw=lambda rng, md: _box_sample(rng, md, lo, hi))
        rejection = True
    else:
        rejection = False
    budget_text = f"{samples.count} random pairs over {samples.streams} streams (seed {rng_seed}), level s={s}"
    if sampler.empty:
        return Verdict(INCONCLUSIVE, 0, budget_text + "; sublevel set is empty",
                       notes=["sublevel set is empty: nothing to test"])

    def f(x: tuple) -> Any:
        return d.evaluate(tuple(numeric.as_mode(v, mode) for v in x))

    def witness(x: tuple, y: tuple, mid: tuple, fm: Any) -> Witness:
        return Witness(
            kind=NONCONVEX_SUBLEVEL,
            density_id=d.density_id,
            A=GradientPoint(mid, d.n, d.m),
            f_at_A=fm,
            pair=(x, y),
            level=s,
            rng_seed=rng_seed,
            arithmetic_mode=mode,
        )

    def midpoint(x: tuple, y: tuple) -> tuple:
        half = mpq(1, 2) if mode == "rational" else 0.5
        return tuple((a + b) * half for a, b in zip(x, y))

    spent = 0
    if samples.vertex_pairs and sampler.anchors:
        anchors = [tuple(numeric.as_mode(v, mode) for v in p) for p in sampler.anchors]
        anchors = [p for p in anchors if f(p) <= s]
        for x, y in itertools.combinations(anchors, 2):
            spent += 1
            mid = midpoint(x, y)
            fm = f(mid)
            if fm > s:
                return Verdict(VIOLATED, spent, budget_text, witness=witness(x, y, mid, fm),
                               notes=["found by deterministic anchor-pair enumeration"])

    counts = [samples.count // samples.streams + (1 if w < samples.count % samples.streams else 0)
              for w in range(samples.streams)]
    rngs = stream_rngs(rng_seed, samples.streams)

    def draw_point(rng: np.random.Generator) -> tuple | None:
        for _ in range(samples.max_rejections if rejection else 1):
            p = sampler.draw(rng, mode)
            if p is not None and f(p) <= s:
                return p
        return None

    def run(stream: int) -> tuple[int, int, Witness | None]:
        rng = rngs[stream]
        tested = 0
        for draw in range(counts[stream]):
            x, y = draw_point(rng), draw_point(rng)
            if x is None or y is None:
                continue
            tested += 1
            mid = midpoint(x, y)
            fm = f(mid)
            if fm > s:
                return tested, draw, witness(x, y, mid, fm)
        return tested, counts[stream], None

    results = ordered_map(run, list(range(samples.streams)))
    tested = sum(r[0] for r in results)
    spent += tested
    for stream, (_, draw, w) in enumerate(results):
        if w is not None:
            return Verdict(VIOLATED, spent, budget_text, witness=w,
                           notes=[f"found by stream {stream} at draw {draw}"])
    if spent == 0:
        return Verdict(INCONCLUSIVE, 0, budget_text + "; no sublevel points found",
                       notes=["sampler produced no sublevel points within budget"])
    return Verdict(NO_VIOLATION, spent, budget_text)
