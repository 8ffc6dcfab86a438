"""Falsification searches for weak and strong Morrey quasiconvexity, the
scalar-case consistency suite and the end-to-end counterexample pipeline.

Search runs in float arithmetic over dyadic candidates (exactly representable),
and every candidate that looks like a violation is re-evaluated in exact
rational arithmetic before a witness is emitted.  All verdicts are evidence
within a stated budget, never proofs.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from . import numeric
from .constructions import (
    LaminateSpec,
    build_construction,
    clamp_boundary,
    describe_laminate,
    largest_eps_for_delta,
    laminate_test_map,
)
from .density import (
    P4,
    Density,
    DimensionError,
    GradientPoint,
    IndicatorDensity,
    SampleBudget,
    make_square_boundary_4d,
    sublevel_midpoint_convexity,
)
from .functionals import FLOAT_MARGIN, batch_ess_sup, batch_gradients, ess_sup_shifted
from .mesh import CubeMesh, MeshSizeError, PwAffineMap, boundary_sup, boundary_sup_sq, build_kuhn_mesh, grad_sup_norm
from .numeric import exact, mpq
from .parallel import DEFAULT_STREAMS, ordered_map, stream_rngs
from .records import (
    NO_VIOLATION,
    NONCONVEX_SUBLEVEL,
    STRONG_FALSIFICATION,
    VIOLATED,
    WEAK_VIOLATION,
    Verdict,
    Witness,
)

log = logging.getLogger(__name__)

_AMPLITUDE_SCALES = (mpq(1), mpq(1, 2), mpq(2))


@dataclass(frozen=True)
class SearchConfig:
    k: int = 8
    trials: int = 10_000
    local_steps: int = 200
    local_starts: int = 4
    proposals: int = 16
    seed: int = 0
    K_search: Any = 4
    streams: int = DEFAULT_STREAMS
    batch: int = 512
    include_zero_map: bool = True
    include_families: bool = True
    strong_random_trials: int = 256

    def __post_init__(self) -> None:
        if self.k < 1 or self.trials < 0 or self.local_steps < 0 or self.streams < 1:
            raise ValueError("invalid search configuration")
        object.__setattr__(self, "K_search", exact(self.K_search))


def _extra_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(index + 1)[index])


def _amplitudes(m: int) -> list[tuple]:
    """Nonzero sign patterns in {-1,0,1}^m up to overall sign, all-ones first, times a few scales."""
    patterns = [p for p in itertools.product((1, 0, -1), repeat=m) if any(p)]
    patterns = [p for p in patterns if next(v for v in p if v) > 0]
    patterns.sort(key=lambda p: (p != (1,) * m, -sum(abs(v) for v in p), [-v for v in p]))
    return [tuple(c * v for v in p) for c in _AMPLITUDE_SCALES for p in patterns]


def _exact_point(A: Any, n: int, m: int) -> GradientPoint:
    if isinstance(A, GradientPoint):
        if (A.n, A.m) != (n, m):
            raise DimensionError(f"A is {A.n}x{A.m}, expected {n}x{m}")
        return A.to_mode("rational")
    return GradientPoint.of(A, n, m, "rational")


class SearchContext:
    """Per-(n, m, k) precomputation shared across many points A."""

    def __init__(self, n: int, m: int, k: int, K_search: Any) -> None:
        self.n, self.m, self.k = n, m, k
        self.mesh = build_kuhn_mesh(n, k)
        self.K_search = exact(K_search)
        self.interior = np.nonzero(~self.mesh.boundary_mask)[0]
        self.boundary = np.nonzero(self.mesh.boundary_mask)[0]
        self._families: list[tuple[dict | None, PwAffineMap]] | None = None
        self._laminates: dict[tuple, PwAffineMap] = {}

    @property
    def unit(self):
        return mpq(1, 2 * self.k)

    def weak_families(self) -> list[tuple[dict | None, PwAffineMap]]:
        """Deterministic zero-boundary candidates: pyramids and clamped laminates."""
        if self._families is None:
            out: list[tuple[dict | None, PwAffineMap]] = []
            k = self.k
            depth = np.minimum(self.mesh.lattice, k - self.mesh.lattice).min(axis=1)
            for b in _amplitudes(self.m):
                vals = np.empty((self.mesh.num_nodes, self.m), dtype=object)
                for i in range(self.m):
                    vals[:, i] = [mpq(int(h), k) * b[i] for h in depth]
                phi = PwAffineMap(self.mesh, vals)
                if grad_sup_norm(phi) <= self.K_search:
                    out.append((None, phi))
            for axis in range(self.n):
                for p in itertools.count(1):
                    if 4 * p > k:
                        break
                    if k % (4 * p):
                        continue
                    for b in _amplitudes(self.m):
                        spec = LaminateSpec.along_axis(axis, self.n, b, mpq(1, 2 * p))
                        phi = clamp_boundary(laminate_test_map(spec, self.mesh))
                        if grad_sup_norm(phi) <= self.K_search:
                            out.append((describe_laminate(spec, k, clamped=True), phi))
            self._families = out
        return self._families

    def random_batch(self, rng: np.random.Generator, size: int, boundary_scale: Any = None) -> np.ndarray:
        """Dyadic random maps; zero on the boundary unless ``boundary_scale`` is given."""
        r_max = max(1, int(self.K_search))
        V = np.zeros((size, self.mesh.num_nodes, self.m))
        r = rng.integers(1, r_max + 1, size=(size, 1, 1))
        density = rng.choice(np.array([0.05, 0.2, 0.5, 1.0]), size=(size, 1, 1))
        Z = np.floor(rng.random((size, self.interior.size, self.m)) * (2 * r + 1)) - r
        Z *= rng.random(Z.shape) < density
        V[:, self.interior, :] = Z * float(self.unit)
        if boundary_scale is not None and self.boundary.size:
            scale = float(boundary_scale)
            W = rng.integers(-1024, 1025, size=(size, self.boundary.size, self.m)) / 1024.0
            V[:, self.boundary, :] = W * scale
        return V

    def laminate(self, spec: LaminateSpec, k: int) -> PwAffineMap:
        key = (spec.axis, spec.amplitude, spec.eps, k)
        if key not in self._laminates:
            mesh = self.mesh if k == self.k else build_kuhn_mesh(self.n, k)
            self._laminates[key] = laminate_test_map(spec, mesh)
        return self._laminates[key]


def _pw_descriptor(phi: PwAffineMap) -> dict:
    return {"id": "pw_affine", "map": phi.to_dict()}


def _weak_witness(d: Density, A: GradientPoint, fa: Any, phi: PwAffineMap, desc: dict | None, seed: int) -> Witness:
    res = ess_sup_shifted(d, A, phi)
    return Witness(
        kind=WEAK_VIOLATION,
        density_id=d.density_id,
        A=A,
        f_at_A=fa,
        ess_sup=res.value,
        construction=desc or _pw_descriptor(phi),
        boundary_sup=boundary_sup(phi),
        boundary_sup_sq=boundary_sup_sq(phi),
        grad_norm=grad_sup_norm(phi),
        argmax_simplex=res.argmax_simplex,
        rng_seed=seed,
    )


def weak_to_strong(w: Witness, epsilon_def: Any = None, delta: Any = 0) -> Witness:
    """Reread a weak violation as a strong falsification at the given delta.

    A zero-boundary map has boundary sup 0 <= delta, so any margin
    epsilon_def < f(A) - ess_sup falsifies the strong inequality too.
    """
    gap = w.f_at_A - w.ess_sup
    if epsilon_def is None:
        epsilon_def = gap / 2
    return replace(
        w,
        kind=STRONG_FALSIFICATION,
        epsilon_def=exact(epsilon_def),
        K=w.grad_norm,
        delta=exact(delta),
    )


def validate_witness(w: Witness, d: Density) -> list[str]:
    """Recompute every stored number from the serialized construction.

    Returns a list of problems; empty means the witness is sound.
    """
    problems: list[str] = []
    mode = w.arithmetic_mode

    def same(a: Any, b: Any) -> bool:
        if mode == "rational":
            return a == b
        return abs(float(a) - float(b)) <= 1e-12

    A = w.A.to_mode(mode)
    fa = d.evaluate(A)
    if not same(fa, w.f_at_A):
        problems.append(f"f(A) recomputes to {fa}, stored {w.f_at_A}")
    if w.kind == NONCONVEX_SUBLEVEL:
        x, y = (tuple(numeric.as_mode(v, mode) for v in p) for p in w.pair)
        half = mpq(1, 2) if mode == "rational" else 0.5
        mid = tuple((a + b) * half for a, b in zip(x, y))
        if mid != A.entries:
            problems.append("stored point is not the midpoint of the pair")
        if not (d.evaluate(x) <= w.level and d.evaluate(y) <= w.level):
            problems.append("pair is not in the sublevel set")
        if not fa > w.level:
            problems.append("midpoint is in the sublevel set")
        return problems
    phi = build_construction(w.construction, d.n, d.m, mode)
    res = ess_sup_shifted(d, A, phi)
    if not same(res.value, w.ess_sup) or res.argmax_simplex != w.argmax_simplex:
        problems.append(f"ess sup recomputes to {res.value} at simplex {res.argmax_simplex}")
    bsq = boundary_sup_sq(phi)
    if not same(bsq, w.boundary_sup_sq):
        problems.append(f"boundary sup^2 recomputes to {bsq}")
    g = grad_sup_norm(phi)
    if not same(g, w.grad_norm):
        problems.append(f"gradient norm recomputes to {g}")
    if w.kind == WEAK_VIOLATION:
        if not phi.zero_boundary:
            problems.append("weak witness map does not vanish on the boundary")
        if not fa > res.value:
            problems.append("weak inequality is not violated")
    elif w.kind == STRONG_FALSIFICATION:
        if not g <= w.K:
            problems.append("gradient bound K exceeded")
        if not bsq <= w.delta * w.delta:
            problems.append("boundary bound delta exceeded")
        if not fa > res.value + w.epsilon_def:
            problems.append("strong inequality is not violated")
    return problems


def _confirm_weak(d: Density, A: GradientPoint, fa: Any, phi: PwAffineMap) -> bool:
    phi = phi.to_mode("rational")
    return phi.zero_boundary and fa > ess_sup_shifted(d, A, phi).value


def falsify_weak_mqc(
    d: Density,
    A: Any,
    cfg: SearchConfig = SearchConfig(),
    context: SearchContext | None = None,
) -> Verdict:
    """Hunt for a zero-boundary map with ess sup f(A + D phi) < f(A)."""
    A = _exact_point(A, d.n, d.m)
    if context is None:
        context = SearchContext(d.n, d.m, cfg.k, cfg.K_search)
    elif (context.n, context.m, context.k) != (d.n, d.m, cfg.k):
        raise DimensionError("search context does not match density and config")
    mesh = context.mesh
    fa = d.evaluate(A)
    fa_float = float(fa)
    a_float = [float(v) for v in A.entries]
    spent = 0

    def violated(phi: PwAffineMap, desc: dict | None, note: str) -> Verdict:
        w = _weak_witness(d, A, fa, phi.to_mode("rational"), desc, cfg.seed)
        strong = weak_to_strong(w)
        problems = validate_witness(w, d) + validate_witness(strong, d)
        if problems:
            raise AssertionError(f"unsound weak witness: {problems}")
        return Verdict(VIOLATED, spent, budget(), witness=w, witnesses=[strong],
                       notes=[note, "weak violation re-read as a strong falsification at delta=0"])

    def budget() -> str:
        return (f"{spent} candidate maps on a k={cfg.k} Kuhn mesh (zero map: {cfg.include_zero_map}, "
                f"families: {cfg.include_families}, random: {cfg.trials}, local steps: {cfg.local_steps}, "
                f"seed {cfg.seed})")

    fixed: list[tuple[dict | None, PwAffineMap]] = []
    if cfg.include_zero_map:
        fixed.append((None, PwAffineMap.zero(mesh, d.m)))
    if cfg.include_families:
        fixed.extend(context.weak_families())
    if fixed:
        V = np.stack([phi.to_mode("float").nodal_values for _, phi in fixed])
        ess, _ = batch_ess_sup(d, a_float, mesh, V)
        for i in range(len(fixed)):
            spent += 1
            desc, phi = fixed[i]
            if fa_float - ess[i] > FLOAT_MARGIN and _confirm_weak(d, A, fa, phi):
                return violated(phi, desc, f"found by deterministic family candidate {i}")

    counts = [cfg.trials // cfg.streams + (1 if s < cfg.trials % cfg.streams else 0) for s in range(cfg.streams)]
    rngs = stream_rngs(cfg.seed, cfg.streams)
    keep = max(1, cfg.local_starts)

    def run(stream: int):
        rng = rngs[stream]
        done = 0
        best: list[tuple[float, float, int, np.ndarray]] = []
        while done < counts[stream]:
            size = min(cfg.batch, counts[stream] - done)
            V = context.random_batch(rng, size)
            ess, top = batch_ess_sup(d, a_float, mesh, V)
            for i in range(size):
                if fa_float - ess[i] > FLOAT_MARGIN:
                    phi = PwAffineMap.from_values(mesh, V[i], "rational")
                    if _confirm_weak(d, A, fa, phi):
                        return done + i + 1, done + i, phi, best
            order = np.lexsort((np.arange(size), top, ess))[:keep]
            best.extend((float(ess[i]), float(top[i]), done + i, V[i]) for i in order)
            best = sorted(best, key=lambda t: t[:3])[:keep]
            done += size
        return done, None, None, best

    results = ordered_map(run, list(range(cfg.streams)))
    spent += sum(r[0] for r in results)
    for stream, (_, idx, phi, _) in enumerate(results):
        if phi is not None:
            return violated(phi, None, f"found by random stream {stream} at trial {idx}")

    starts = sorted(
        ((e, t, s, i, V) for s, r in enumerate(results) for (e, t, i, V) in r[3]),
        key=lambda x: x[:4],
    )[:keep]
    if cfg.local_steps and starts:
        rng = _extra_rng(cfg.seed, cfg.streams)
        steps_each = max(1, cfg.local_steps // len(starts))
        unit = float(context.unit)
        cap = int(context.K_search)
        interior = context.interior
        for e, t, _, _, V in starts:
            current, score = V.copy(), (e, t)
            for _ in range(steps_each):
                props = np.repeat(current[None], cfg.proposals, axis=0)
                nodes = rng.choice(interior, size=cfg.proposals) if interior.size else np.zeros(cfg.proposals, int)
                comps = rng.integers(0, d.m, size=cfg.proposals)
                moves = rng.choice(np.array([-1.0, 1.0, 0.0]), size=cfg.proposals)
                for p in range(cfg.proposals):
                    z = round(props[p, nodes[p], comps[p]] / unit)
                    z = 0 if moves[p] == 0 else int(np.clip(z + moves[p], -cap, cap))
                    props[p, nodes[p], comps[p]] = z * unit
                ess, top = batch_ess_sup(d, a_float, mesh, props)
                spent += cfg.proposals
                best = int(np.lexsort((np.arange(cfg.proposals), top, ess))[0])
                if fa_float - ess[best] > FLOAT_MARGIN:
                    phi = PwAffineMap.from_values(mesh, props[best], "rational")
                    if _confirm_weak(d, A, fa, phi):
                        return violated(phi, None, "found by local search")
                if (ess[best], top[best]) < score:
                    current, score = props[best], (ess[best], top[best])
    return Verdict(NO_VIOLATION, spent, budget())


def _rank_one_members(hints: Sequence, n: int, m: int) -> list[tuple[int, tuple]]:
    """Laminate (axis, amplitude) pairs whose gradient jump equals a hinted matrix."""
    out = []
    for D in hints:
        G = D.matrix() if isinstance(D, GradientPoint) else np.asarray(D, dtype=object)
        rows = [j for j in range(n) if any(v != 0 for v in G[j])]
        if len(rows) == 1:
            out.append((rows[0], tuple(exact(v) for v in G[rows[0]])))
    return out


def falsify_strong_mqc(
    d: Density,
    A: Any,
    epsilon_def: Any,
    K: Any,
    deltas: Sequence,
    families: Sequence[str] = ("laminate", "random"),
    cfg: SearchConfig = SearchConfig(),
    context: SearchContext | None = None,
    hints: Sequence = (),
) -> Verdict:
    """Look for a falsifying map at every delta of a decreasing sequence.

    For each delta the search wants phi with ||D phi|| <= K, boundary sup
    <= delta and f(A) > ess sup f(A + D phi) + epsilon_def.  "violated" is
    returned only if every delta admits such a map.
    """
    epsilon_def, K = exact(epsilon_def), exact(K)
    deltas = [exact(v) for v in deltas]
    if epsilon_def <= 0 or K <= 0:
        raise ValueError("epsilon_def and K must be positive")
    if not deltas or any(v <= 0 for v in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta sequence must be nonempty, positive and strictly decreasing")
    unknown = set(families) - {"laminate", "random"}
    if unknown:
        raise ValueError(f"unknown families {sorted(unknown)}")
    A = _exact_point(A, d.n, d.m)
    if context is None:
        context = SearchContext(d.n, d.m, cfg.k, cfg.K_search)
    fa = d.evaluate(A)
    a_float = [float(v) for v in A.entries]
    spent = 0
    notes: list[str] = []

    # Screen laminate members on the coarsest compatible mesh; their gradient
    # set does not depend on eps, so a member that fails here fails everywhere.
    members: list[tuple[int, tuple]] = []
    if "laminate" in families:
        candidates = _rank_one_members(hints, d.n, d.m) + [
            (axis, b) for axis in range(d.n) for b in _amplitudes(d.m)
        ]
        seen = set()
        for axis, b in candidates:
            if (axis, b) in seen or not any(b):
                continue
            seen.add((axis, b))
            coarse = context.laminate(LaminateSpec.along_axis(axis, d.n, b, mpq(1, 2)), 4)
            spent += 1
            if grad_sup_norm(coarse) <= K and fa > ess_sup_shifted(d, A, coarse).value + epsilon_def:
                members.append((axis, b))

    witnesses: list[Witness] = []
    missing: list[Any] = []
    for j, delta in enumerate(deltas):
        found = None
        for axis, b in members:
            eps = largest_eps_for_delta(b, d.n, delta)
            spec = LaminateSpec.along_axis(axis, d.n, b, eps)
            k = spec.profile.compatible_k()
            try:
                phi = context.laminate(spec, k)
            except MeshSizeError as exc:
                notes.append(f"delta={delta}: laminate {spec.construction_id()} skipped ({exc})")
                continue
            spent += 1
            res = ess_sup_shifted(d, A, phi)
            bsq, g = boundary_sup_sq(phi), grad_sup_norm(phi)
            if g <= K and bsq <= delta * delta and fa > res.value + epsilon_def:
                found = Witness(
                    kind=STRONG_FALSIFICATION, density_id=d.density_id, A=A, f_at_A=fa,
                    ess_sup=res.value, construction=describe_laminate(spec, k),
                    boundary_sup=boundary_sup(phi), boundary_sup_sq=bsq, grad_norm=g,
                    argmax_simplex=res.argmax_simplex, epsilon_def=epsilon_def, K=K, delta=delta,
                    rng_seed=cfg.seed,
                )
                break
        if found is None and "random" in families and cfg.strong_random_trials:
            found, used = _strong_random(d, A, fa, a_float, epsilon_def, K, delta, cfg, context, j)
            spent += used
        if found is None:
            missing.append(delta)
        else:
            witnesses.append(found)

    budget = (f"{len(deltas)} deltas; laminate members screened: {'laminate' in families}; "
              f"{cfg.strong_random_trials if 'random' in families else 0} random small-boundary maps per delta "
              f"on a k={cfg.k} mesh (seed {cfg.seed}); epsilon_def={epsilon_def}, K={K}")
    if missing:
        notes.append(f"no falsifying map found for {len(missing)} of {len(deltas)} deltas "
                     f"(first: {numeric.dump_number(missing[0])})")
        return Verdict(NO_VIOLATION, spent, budget, witnesses=witnesses, notes=notes)
    notes.append("every delta in the sequence admits a falsifying map: evidence that no delta(epsilon, K, A) exists")
    return Verdict(VIOLATED, spent, budget, witness=witnesses[0], witnesses=witnesses, notes=notes)


def _strong_random(d, A, fa, a_float, epsilon_def, K, delta, cfg, context, j):
    rng = _extra_rng(cfg.seed, cfg.streams + 1 + j)
    mesh = context.mesh
    used = 0
    boundary_scale = delta / max(1, d.m)
    todo = cfg.strong_random_trials
    while todo > 0:
        size = min(cfg.batch, todo)
        V = context.random_batch(rng, size, boundary_scale=boundary_scale)
        if cfg.include_zero_map and used == 0:
            V[0] = 0.0
        ess, _ = batch_ess_sup(d, a_float, mesh, V)
        grads = np.abs(batch_gradients(mesh, V)).reshape(size, -1).max(axis=1)
        for i in range(size):
            used += 1
            if grads[i] <= float(K) and float(fa) - ess[i] > float(epsilon_def) + FLOAT_MARGIN:
                phi = PwAffineMap.from_values(mesh, V[i], "rational")
                res = ess_sup_shifted(d, A, phi)
                bsq, g = boundary_sup_sq(phi), grad_sup_norm(phi)
                if g <= K and bsq <= delta * delta and fa > res.value + epsilon_def:
                    return Witness(
                        kind=STRONG_FALSIFICATION, density_id=d.density_id, A=A, f_at_A=fa,
                        ess_sup=res.value, construction=_pw_descriptor(phi),
                        boundary_sup=boundary_sup(phi), boundary_sup_sq=bsq, grad_norm=g,
                        argmax_simplex=res.argmax_simplex, epsilon_def=epsilon_def, K=K, delta=delta,
                        rng_seed=cfg.seed,
                    ), used
        todo -= size
    return None, used


# --------------------------------------------------------------------------
# scalar-case consistency suite


@dataclass(frozen=True)
class SuiteConfig:
    points: int = 1000
    pairs: int = 1000
    levels: tuple | None = None
    k: int = 4
    trials_per_point: int = 16
    deltas: tuple = (mpq(1, 2), mpq(1, 4), mpq(1, 8))
    epsilon_def: Any = None
    K_search: Any = 4
    strong_random_trials: int = 8
    seed: int = 0
    streams: int = DEFAULT_STREAMS


CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
TENSION = "inconclusive_tension"


def _default_levels(d: Density) -> list:
    if isinstance(d, IndicatorDensity):
        on, off = d.on_value, d.off_value
        return [on - 1, on, (on + off) / 2, off, off + 1]
    return [mpq(-1), mpq(0), mpq(1, 2), mpq(1), mpq(2)]


def scalar_equivalence_suite(d: Density, cfg: SuiteConfig = SuiteConfig()) -> dict:
    """Sample all three notions on a scalar-case density and cross-check them.

    With n = 1 or m = 1 and f lower semicontinuous the three notions agree, so
    a nonconvexity witness next to a clean Morrey search (or vice versa) is
    flagged.
    """
    if d.n != 1 and d.m != 1:
        raise DimensionError("scalar case requires n == 1 or m == 1")
    if not d.claimed_lsc:
        raise ValueError("the scalar-case equivalence assumes a lower semicontinuous density")
    levels = [exact(s) for s in (cfg.levels or _default_levels(d))]
    per_level = max(1, cfg.pairs // len(levels))
    qc_results = []
    nonconvex: list[Witness] = []
    for i, s in enumerate(levels):
        v = sublevel_midpoint_convexity(d, s, SampleBudget(count=per_level, streams=cfg.streams), cfg.seed + i)
        qc_results.append({"level": numeric.dump_number(s), "status": v.status, "budget_spent": v.budget_spent})
        if v.violated:
            nonconvex.append(v.witness)

    # candidate points: nonconvexity midpoints first, then on-set and box samples
    rng = _extra_rng(cfg.seed, 0)
    points: list[tuple[GradientPoint, list]] = [
        (w.A, [GradientPoint.of([b - a for a, b in zip(*w.pair)], d.n, d.m, "rational")]) for w in nonconvex
    ]
    sampler = d.sublevel_sampler(levels[len(levels) // 2]) if isinstance(d, IndicatorDensity) else None
    if isinstance(d, IndicatorDensity):
        lo, hi = d.set.bounding_box()
    else:
        lo, hi = (mpq(-2),) * d.dim, (mpq(2),) * d.dim
    scale = 2**16
    while len(points) < cfg.points:
        if sampler is not None and sampler.draw is not None and len(points) % 2 == 0:
            x = sampler.draw(rng, "rational")
        else:
            x = tuple(exact(a) - 1 + mpq(int(rng.integers(0, scale + 1)), scale) * (exact(b) - exact(a) + 2)
                      for a, b in zip(lo, hi))
        points.append((GradientPoint(x, d.n, d.m), []))

    if cfg.epsilon_def is not None:
        eps_def = exact(cfg.epsilon_def)
    elif isinstance(d, IndicatorDensity):
        eps_def = (d.off_value - d.on_value) / 2
    else:
        eps_def = mpq(1, 2)
    search = SearchConfig(k=cfg.k, trials=cfg.trials_per_point, local_steps=0, seed=cfg.seed,
                          K_search=cfg.K_search, streams=1, batch=max(1, cfg.trials_per_point),
                          strong_random_trials=cfg.strong_random_trials)
    context = SearchContext(d.n, d.m, cfg.k, cfg.K_search)
    weak_hits: list[Witness] = []
    strong_hits: list[Witness] = []
    inconsistencies: list[str] = []
    for idx, (A, hints) in enumerate(points):
        local = replace(search, seed=cfg.seed + idx)
        wv = falsify_weak_mqc(d, A, local, context)
        sv = falsify_strong_mqc(d, A, eps_def, cfg.K_search, cfg.deltas, cfg=local, context=context, hints=hints)
        if wv.violated:
            weak_hits.append(wv.witness)
            if not sv.violated:
                # strong implies weak: a weak violation is a strong falsification at every delta
                derived = [weak_to_strong(wv.witness, min(eps_def, (wv.witness.f_at_A - wv.witness.ess_sup) / 2), dl)
                           for dl in cfg.deltas]
                if any(validate_witness(w, d) for w in derived):
                    inconsistencies.append(f"point {idx}: weak violation does not re-read as strong falsification")
                else:
                    sv = Verdict(VIOLATED, sv.budget_spent, sv.budget, witness=derived[0], witnesses=derived)
        if sv.violated:
            strong_hits.append(sv.witness)

    if not nonconvex and weak_hits:
        inconsistencies.append(f"no nonconvexity witness but {len(weak_hits)} weak violations")
    if not nonconvex and strong_hits:
        inconsistencies.append(f"no nonconvexity witness but {len(strong_hits)} strong falsifications")
    if inconsistencies:
        status = INCONSISTENT
    elif nonconvex and not (weak_hits or strong_hits):
        status = TENSION
    else:
        status = CONSISTENT
    return {
        "status": status,
        "density": d.descriptor(),
        "quasiconvexity": {"levels": qc_results, "nonconvex_witnesses": [w.to_dict() for w in nonconvex[:5]]},
        "weak": {"points": len(points), "violations": len(weak_hits),
                 "examples": [w.to_dict() for w in weak_hits[:3]]},
        "strong": {"points": len(points), "falsifications": len(strong_hits),
                   "examples": [w.to_dict() for w in strong_hits[:3]],
                   "epsilon_def": numeric.dump_number(eps_def), "K": numeric.dump_number(exact(cfg.K_search)),
                   "deltas": [numeric.dump_number(exact(v)) for v in cfg.deltas]},
        "inconsistencies": inconsistencies,
        "budget": (f"{cfg.pairs} convexity pairs over {len(levels)} levels; {len(points)} points with "
                   f"{cfg.trials_per_point} random zero-boundary maps each on a k={cfg.k} mesh; seed {cfg.seed}"),
        "notes": ["sampling-based evidence only; a clean run is not a proof of quasiconvexity"]
        + (["nonconvex sublevel set found but no Morrey falsification within budget "
            "(search incompleteness, not a contradiction)"] if status == TENSION else []),
    }


# --------------------------------------------------------------------------
# end-to-end counterexample


def default_deltas(count: int = 10) -> tuple:
    return tuple(mpq(1, 2**j) for j in range(1, count + 1))


@dataclass(frozen=True)
class ReproduceConfig:
    k: int = 8
    trials: int = 10_000
    grid_trials: int = 500
    grid: tuple = (mpq(0), mpq(1, 4), mpq(1, 2), mpq(3, 4), mpq(1))
    local_steps: int = 200
    seed: int = 0
    deltas: tuple = field(default_factory=default_deltas)
    epsilon_def: Any = mpq(1, 2)
    K: Any = 1
    strong_A: tuple | None = None
    strong_random_trials: int = 64


CONFIRMED = "confirmed"
STAGE_MISMATCH = "stage-mismatch"


def reproduce_counterexample(cfg: ReproduceConfig = ReproduceConfig()) -> dict:
    """Square-boundary indicator in R^4: weak Morrey holds (within budget), strong fails."""
    f = make_square_boundary_4d()
    P = GradientPoint(P4, 2, 2)
    stages: list[dict] = []

    def stage(name: str, expected: str, observed: str, details: dict) -> None:
        stages.append({"name": name, "expected": expected, "observed": observed,
                       "ok": expected == observed, "details": details})

    fp = f.evaluate(P)
    stage("f_at_P", "1", numeric.dump_number(fp), {"P": P.to_dict()})

    qc = sublevel_midpoint_convexity(f, mpq(1, 2), SampleBudget(count=64), cfg.seed)
    mid_ok = qc.violated and qc.witness.A == P and qc.witness.f_at_A == 1
    stage("sublevel_nonconvex", "violated at midpoint P", "violated at midpoint P" if mid_ok else qc.status,
          qc.to_dict())

    search = SearchConfig(k=cfg.k, trials=cfg.trials, local_steps=cfg.local_steps, seed=cfg.seed,
                          strong_random_trials=cfg.strong_random_trials)
    context = SearchContext(2, 2, cfg.k, search.K_search)
    weak_p = falsify_weak_mqc(f, P, search, context)
    stage("weak_at_P", NO_VIOLATION, weak_p.status, weak_p.to_dict())

    grid_results = []
    grid_cfg = replace(search, trials=cfg.grid_trials, local_steps=0)
    for i, (a, c) in enumerate(itertools.product(cfg.grid, cfg.grid)):
        A = GradientPoint((exact(a), mpq(0), exact(c), mpq(0)), 2, 2)
        v = falsify_weak_mqc(f, A, replace(grid_cfg, seed=cfg.seed + 1 + i), context)
        grid_results.append({"A": A.to_dict(), "f_at_A": numeric.dump_number(f.evaluate(A)),
                             "status": v.status, "budget_spent": v.budget_spent})
    grid_status = NO_VIOLATION if all(g["status"] == NO_VIOLATION for g in grid_results) else VIOLATED
    stage("weak_on_OMxON_grid", NO_VIOLATION, grid_status, {"points": grid_results})

    A_strong = P if cfg.strong_A is None else GradientPoint.of(cfg.strong_A, 2, 2, "rational")
    strong = falsify_strong_mqc(f, A_strong, cfg.epsilon_def, cfg.K, cfg.deltas, cfg=search, context=context)
    per_delta = []
    exact_ok = strong.violated
    for w in strong.witnesses:
        ok = (w.ess_sup == 0 and w.grad_norm == mpq(1, 2) and w.boundary_sup_sq <= w.delta ** 2
              and not validate_witness(w, f))
        exact_ok = exact_ok and ok
        per_delta.append({"delta": numeric.dump_number(w.delta), "construction": w.construction,
                          "ess_sup": numeric.dump_number(w.ess_sup), "grad_norm": numeric.dump_number(w.grad_norm),
                          "boundary_sup": numeric.dump_number(w.boundary_sup),
                          "boundary_sup_sq": numeric.dump_number(w.boundary_sup_sq), "checks_pass": ok})
    observed = strong.status if not strong.violated else (VIOLATED if exact_ok else "violated-with-unsound-witness")
    stage("strong_at_P" if cfg.strong_A is None else "strong_at_A", VIOLATED, observed,
          {"A": A_strong.to_dict(), "per_delta": per_delta, "verdict": strong.to_dict()})

    failed = [s["name"] for s in stages if not s["ok"]]
    notes = ["weak Morrey quasiconvexity: no violation within the stated budgets (evidence, not proof)",
             "strong Morrey quasiconvexity: falsified at every delta in the sequence (evidence, not proof)"]
    if len(cfg.deltas) == 1:
        notes.append("weaker evidence: the delta sequence has a single element")
    return {
        "status": CONFIRMED if not failed else STAGE_MISMATCH,
        "failed_stages": failed,
        "stages": stages,
        "notes": notes,
    }


# contract name of the operation
reproduce_paper_counterexample = reproduce_counterexample
