"""Kuhn triangulation of the unit cube and piecewise-affine maps on it."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable

import numpy as np

from . import numeric
from .numeric import exact, mpq

MAX_DIM = 4
MAX_SIMPLICES = 4_000_000
_CHUNK = 131_072


class MeshSizeError(ValueError):
    """Requested mesh exceeds the dimension or memory guard."""


def _solve_exact(E: list[list[Fraction]]) -> list[list[Fraction]]:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    size = len(E)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(E)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if pivot is None:
            raise ArithmeticError("degenerate simplex: edge matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


def _det_exact(E: list[list[Fraction]]) -> Fraction:
    size = len(E)
    A = [list(row) for row in E]
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if A[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            A[col], A[pivot] = A[pivot], A[col]
            det = -det
        det *= A[col][col]
        for r in range(col + 1, size):
            factor = A[r][col] / A[col][col]
            A[r] = [a - factor * b for a, b in zip(A[r], A[col])]
    return det


@dataclass(frozen=True, eq=False)
class CubeMesh:
    """Uniform Kuhn (Freudenthal) triangulation of [0, 1]^n with k cells per axis.

    Nodes are ordered lexicographically in their lattice index (i_1, ..., i_n),
    i_1 slowest.  Simplex ``c * n! + p`` is the p-th permutation (in
    ``itertools.permutations`` order) of cell ``c``; its vertices walk from the
    cell's lower corner along the axes in permutation order.
    """

    n: int
    k: int
    lattice: np.ndarray = field(repr=False)
    simplices: np.ndarray = field(repr=False)
    simplex_type: np.ndarray = field(repr=False)
    permutations: tuple = field(repr=False)

    @property
    def num_nodes(self) -> int:
        return self.lattice.shape[0]

    @property
    def num_simplices(self) -> int:
        return self.simplices.shape[0]

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        return np.any((self.lattice == 0) | (self.lattice == self.k), axis=1)

    def nodes(self, mode: str = "rational") -> np.ndarray:
        if mode == "float":
            return self.lattice / self.k
        return numeric.array([[mpq(int(i), self.k) for i in row] for row in self.lattice], "rational")

    def node_index(self, idx) -> int:
        out = 0
        for i in idx:
            out = out * (self.k + 1) + int(i)
        return out

    @cached_property
    def edge_inverses(self) -> list[list[list[Fraction]]]:
        """Exact inverse of each simplex type's edge matrix.

        Rows of the edge matrix are v_l - v_{l-1}; the gradient G (n x m) of
        the affine interpolant solves  E G = (phi(v_l) - phi(v_{l-1}))_l.
        """
        out = []
        for perm in self.permutations:
            verts = self._reference_vertices(perm)
            E = [[Fraction(int(verts[l][j] - verts[l - 1][j]), self.k) for j in range(self.n)]
                 for l in range(1, self.n + 1)]
            out.append(_solve_exact(E))
        return out

    @cached_property
    def inverse_scale(self) -> int:
        """Common denominator of all edge-inverse entries."""
        return math.lcm(*(v.denominator for inv in self.edge_inverses for row in inv for v in row))

    @cached_property
    def _sparse_inverses(self) -> list[list[list[tuple[int, Any, float, int]]]]:
        L = self.inverse_scale
        return [
            [[(c, exact(v), float(v), int(v * L)) for c, v in enumerate(row) if v != 0] for row in inv]
            for inv in self.edge_inverses
        ]

    def _reference_vertices(self, perm: tuple) -> list[list[int]]:
        v = [0] * self.n
        verts = [list(v)]
        for axis in perm:
            v[axis] += 1
            verts.append(list(v))
        return verts

    def simplex_vertices(self, sid: int, mode: str = "rational") -> np.ndarray:
        idx = self.lattice[self.simplices[sid]]
        if mode == "float":
            return idx / self.k
        return numeric.array([[mpq(int(i), self.k) for i in row] for row in idx], "rational")

    def simplex_volume(self, sid: int) -> Fraction:
        """Exact volume |det(v_l - v_0)| / n! of one simplex."""
        idx = self.lattice[self.simplices[sid]]
        E = [[Fraction(int(idx[l][j] - idx[0][j]), self.k) for j in range(self.n)] for l in range(1, self.n + 1)]
        return abs(_det_exact(E)) / math.factorial(self.n)

    def locate(self, x) -> int:
        """Lowest-id simplex containing ``x`` in [0, 1]^n."""
        x = [exact(v) if numeric.is_exact_scalar(v) else v for v in x]
        if len(x) != self.n or any(v < 0 or v > 1 for v in x):
            raise ValueError("point outside the unit cube")
        cell_idx = [min(int(math.floor(v * self.k)), self.k - 1) for v in x]
        local = [v * self.k - c for v, c in zip(x, cell_idx)]
        # stable descending order; ties keep the smaller axis first
        order = tuple(sorted(range(self.n), key=lambda j: (-local[j], j)))
        cell = 0
        for c in cell_idx:
            cell = cell * self.k + c
        return cell * len(self.permutations) + self.permutations.index(order)


def build_kuhn_mesh(n: int, k: int) -> CubeMesh:
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if n > MAX_DIM:
        raise MeshSizeError(f"dimension n={n} exceeds the guard n <= {MAX_DIM}")
    nfact = math.factorial(n)
    if k**n * nfact > MAX_SIMPLICES:
        raise MeshSizeError(f"mesh n={n}, k={k} would have {k**n * nfact} simplices (limit {MAX_SIMPLICES})")
    lattice = np.indices((k + 1,) * n).reshape(n, -1).T.astype(np.int64)
    perms = tuple(itertools.permutations(range(n)))
    strides = np.array([(k + 1) ** (n - 1 - j) for j in range(n)], dtype=np.int64)
    corners = np.indices((k,) * n).reshape(n, -1).T.astype(np.int64)
    base = corners @ strides
    offsets = np.zeros((nfact, n + 1), dtype=np.int64)
    for p, perm in enumerate(perms):
        off = 0
        for l, axis in enumerate(perm, start=1):
            off += strides[axis]
            offsets[p, l] = off
    simplices = (base[:, None, None] + offsets[None, :, :]).reshape(-1, n + 1)
    simplex_type = np.tile(np.arange(nfact, dtype=np.int64), base.shape[0])
    return CubeMesh(n, k, lattice, simplices, simplex_type, perms)


def _gradients_of(mesh: CubeMesh, values: np.ndarray, sids: np.ndarray, scaled: bool = False) -> np.ndarray:
    """Gradients (len(sids), n, m) of the interpolant of ``values`` on the given simplices.

    With ``scaled=True`` the values are integer numerators and the result is
    multiplied by ``mesh.inverse_scale`` so that it stays integral.
    """
    slot = 3 if scaled else (1 if values.dtype == object else 2)
    simp = mesh.simplices[sids]
    diffs = values[simp[:, 1:]] - values[simp[:, :-1]]
    types = mesh.simplex_type[sids]
    m = values.shape[1]
    out = np.empty((len(sids), mesh.n, m), dtype=values.dtype)
    for t, inv in enumerate(mesh._sparse_inverses):
        rows = np.nonzero(types == t)[0]
        if rows.size == 0:
            continue
        block = diffs[rows]
        for r, terms in enumerate(inv):
            acc = None
            for term in terms:
                part = block[:, term[0], :] * term[slot]
                acc = part if acc is None else acc + part
            out[rows, r, :] = acc
    return out


def _integer_form(mesh: CubeMesh, values: np.ndarray) -> tuple[np.ndarray, int] | None:
    """(int64 numerators, common denominator) of exact nodal values, or None on overflow risk."""
    flat = values.reshape(-1)
    D = math.lcm(*{int(q.denominator) for q in flat}) if flat.size else 1
    nums = [int(q.numerator) * (D // int(q.denominator)) for q in flat]
    bound = max((abs(v) for v in nums), default=0)
    weight = max((sum(abs(t[3]) for t in row) for inv in mesh._sparse_inverses for row in inv), default=1)
    if 2 * bound * weight >= 2**62:
        return None
    return np.array(nums, dtype=np.int64).reshape(values.shape), D


@dataclass(frozen=True, eq=False)
class PwAffineMap:
    """Continuous piecewise-affine map Q -> R^m given by its nodal values."""

    mesh: CubeMesh
    nodal_values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = self.nodal_values
        if vals.ndim != 2 or vals.shape[0] != self.mesh.num_nodes:
            raise ValueError(f"nodal_values must have shape ({self.mesh.num_nodes}, m)")
        vals.setflags(write=False)

    @classmethod
    def from_values(cls, mesh: CubeMesh, values, mode: str = "rational") -> "PwAffineMap":
        arr = np.asarray(values, dtype=object if mode == "rational" else float)
        if arr.ndim == 1:
            arr = arr[:, None]
        return cls(mesh, numeric.array(arr, mode))

    @classmethod
    def zero(cls, mesh: CubeMesh, m: int, mode: str = "rational") -> "PwAffineMap":
        return cls.from_values(mesh, np.zeros((mesh.num_nodes, m), dtype=int), mode)

    @property
    def m(self) -> int:
        return self.nodal_values.shape[1]

    @property
    def n(self) -> int:
        return self.mesh.n

    @property
    def mode(self) -> str:
        return numeric.mode_of_array(self.nodal_values)

    @cached_property
    def zero_boundary(self) -> bool:
        return bool(np.all(self.nodal_values[self.mesh.boundary_mask] == 0))

    def to_mode(self, mode: str) -> "PwAffineMap":
        if mode == self.mode:
            return self
        return PwAffineMap(self.mesh, numeric.array(self.nodal_values, mode))

    def component(self, i: int) -> "PwAffineMap":
        return PwAffineMap(self.mesh, self.nodal_values[:, i : i + 1].copy())

    @cached_property
    def _scaled_values(self) -> tuple[np.ndarray, int] | None:
        if self.mode == "float":
            return None
        return _integer_form(self.mesh, self.nodal_values)

    def _from_scaled(self, G: np.ndarray) -> np.ndarray:
        nums, D = self._scaled_values
        denom = D * self.mesh.inverse_scale
        out = np.empty(G.shape, dtype=object)
        out.reshape(-1)[:] = [mpq(int(v), denom) for v in G.reshape(-1).tolist()]
        return out

    @cached_property
    def gradients(self) -> np.ndarray:
        """All simplex gradients, shape (S, n, m)."""
        sids = np.arange(self.mesh.num_simplices)
        if self._scaled_values is not None:
            return self._from_scaled(_gradients_of(self.mesh, self._scaled_values[0], sids, scaled=True))
        return _gradients_of(self.mesh, self.nodal_values, sids)

    @cached_property
    def unique_gradients(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct gradients (U, n, m) and the lowest simplex id carrying each, ordered by that id."""
        S, n, m = self.mesh.num_simplices, self.n, self.m
        sids = np.arange(S)
        if self.mode == "float" or self._scaled_values is not None:
            if self.mode == "float":
                G = self.gradients
            else:
                G = _gradients_of(self.mesh, self._scaled_values[0], sids, scaled=True)
            _, first = np.unique(G.reshape(S, n * m), axis=0, return_index=True)
            first = np.sort(first)
            U = G[first]
            return (U if self.mode == "float" else self._from_scaled(U)), first
        seen: dict[tuple, int] = {}
        for start in range(0, S, _CHUNK):
            chunk = sids[start : start + _CHUNK]
            block = _gradients_of(self.mesh, self.nodal_values, chunk)
            for off, row in enumerate(map(tuple, block.reshape(len(chunk), n * m).tolist())):
                seen.setdefault(row, start + off)
        rows = sorted(seen.items(), key=lambda kv: kv[1])
        U = numeric.array([r for r, _ in rows], "rational").reshape(len(rows), n, m)
        return U, np.array([sid for _, sid in rows], dtype=np.int64)

    def simplex_gradient(self, sid: int) -> np.ndarray:
        if not 0 <= sid < self.mesh.num_simplices:
            raise IndexError(f"simplex id {sid} out of range")
        return _gradients_of(self.mesh, self.nodal_values, np.array([sid]))[0]

    def evaluate(self, x) -> np.ndarray:
        """Value of the interpolant at ``x`` (barycentric on the containing simplex)."""
        sid = self.mesh.locate(x)
        G = self.simplex_gradient(sid)
        v0 = self.mesh.simplices[sid][0]
        mode = self.mode
        base = self.mesh.lattice[v0]
        dx = [numeric.as_mode(xi, mode) - (mpq(int(b), self.mesh.k) if mode == "rational" else b / self.mesh.k)
              for xi, b in zip(x, base)]
        return self.nodal_values[v0] + np.array(dx, dtype=G.dtype) @ G

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "k": self.mesh.k,
            "nodal_values": [[numeric.dump_number(v) for v in row] for row in self.nodal_values.tolist()],
            "zero_boundary": self.zero_boundary,
        }

    @classmethod
    def from_dict(cls, data: dict, mesh: CubeMesh | None = None) -> "PwAffineMap":
        if mesh is None:
            mesh = build_kuhn_mesh(int(data["n"]), int(data["k"]))
        rows = data["nodal_values"]
        mode = "rational" if all(isinstance(v, str) for row in rows for v in row) else "float"
        vals = [[numeric.load_number(v, mode) for v in row] for row in rows]
        phi = cls.from_values(mesh, vals, mode)
        if phi.m != int(data["m"]):
            raise ValueError("m does not match nodal values")
        if "zero_boundary" in data and bool(data["zero_boundary"]) != phi.zero_boundary:
            raise ValueError("zero_boundary flag does not match nodal values")
        return phi


def simplex_gradient(phi: PwAffineMap, sid: int) -> np.ndarray:
    return phi.simplex_gradient(sid)


def boundary_sup_sq(phi: PwAffineMap) -> Any:
    """max over boundary nodes of |phi|^2 (exact in rational mode)."""
    vals = phi.nodal_values[phi.mesh.boundary_mask]
    if vals.shape[0] == 0:
        return mpq(0) if phi.mode == "rational" else 0.0
    sq = (vals * vals).sum(axis=1)
    return sq.max()


def boundary_sup(phi: PwAffineMap) -> Any:
    """max over the boundary of the Euclidean norm of phi.

    Attained at a boundary node since phi is affine on each boundary facet.
    """
    sq = boundary_sup_sq(phi)
    if phi.mode == "float":
        return float(np.sqrt(sq))
    return numeric.exact_sqrt(sq)


def grad_sup_norm(phi: PwAffineMap) -> Any:
    """max over simplices of the max-absolute-entry norm of the gradient."""
    U, _ = phi.unique_gradients
    value = np.abs(U).max()
    return exact(value) if phi.mode == "rational" else float(value)


def interpolate(psi: Callable[[tuple], Any], mesh: CubeMesh, m: int | None = None, mode: str = "rational") -> PwAffineMap:
    """Nodal interpolant of a total function psi: Q -> R^m."""
    nodes = mesh.nodes(mode)
    vals = []
    for row in nodes.tolist():
        v = psi(tuple(row))
        v = [v] if np.ndim(v) == 0 else list(v)
        vals.append(v)
    if m is not None and any(len(v) != m for v in vals):
        raise ValueError(f"psi must return {m} components")
    return PwAffineMap.from_values(mesh, vals, mode)
