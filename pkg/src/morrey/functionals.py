"""The shifted ess-sup functional  A, phi  ->  ess sup_Q f(A + D phi).

For a piecewise-affine phi the gradient is constant on each simplex and every
simplex has positive volume, so the essential supremum is an exact maximum
over simplices.  Ties go to the lowest simplex id.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import numeric
from .density import Density, DimensionError, GradientPoint
from .mesh import CubeMesh, PwAffineMap

FLOAT_MARGIN = numeric.FLOAT_TOLERANCE


class NotZeroBoundaryError(ValueError):
    """The weak inequality only admits maps vanishing on the boundary."""


@dataclass(frozen=True)
class EssSupResult:
    value: Any
    argmax_simplex: int
    gradient_at_argmax: np.ndarray
    shifted_point: GradientPoint

    def to_dict(self) -> dict:
        return {
            "value": numeric.dump_number(self.value),
            "argmax_simplex": int(self.argmax_simplex),
            "gradient": [[numeric.dump_number(v) for v in row] for row in self.gradient_at_argmax.tolist()],
            "shifted_point": self.shifted_point.to_dict(),
        }


def _as_point(A: Any, n: int, m: int, mode: str) -> GradientPoint:
    if isinstance(A, GradientPoint):
        if (A.n, A.m) != (n, m):
            raise DimensionError(f"A is {A.n}x{A.m}, expected {n}x{m}")
        return A.to_mode(mode)
    return GradientPoint.of(A, n, m, mode)


def _check_dims(d: Density, phi: PwAffineMap) -> None:
    if (d.n, d.m) != (phi.n, phi.m):
        raise DimensionError(f"density is {d.n}x{d.m} but the test map is {phi.n}x{phi.m}")


def flatten_gradients(G: np.ndarray) -> np.ndarray:
    """(..., n, m) gradient matrices -> (..., n*m) component-major rows."""
    n, m = G.shape[-2:]
    return np.swapaxes(G, -1, -2).reshape(G.shape[:-2] + (n * m,))


def ess_sup_shifted(d: Density, A: Any, phi: PwAffineMap) -> EssSupResult:
    _check_dims(d, phi)
    mode = phi.mode
    A = _as_point(A, d.n, d.m, mode)
    U, first = phi.unique_gradients
    shifted = A.as_array()[None, :] + flatten_gradients(U)
    if mode == "float":
        values = d.evaluate_batch(shifted)
        best = int(np.argmax(values))
        value = float(values[best])
    else:
        best, value = -1, None
        for i, row in enumerate(shifted.tolist()):
            v = d.evaluate(tuple(row))
            if value is None or v > value:
                best, value = i, v
                if d.sup_value is not None and value >= d.sup_value:
                    break
    return EssSupResult(
        value=value,
        argmax_simplex=int(first[best]),
        gradient_at_argmax=U[best],
        shifted_point=GradientPoint(tuple(shifted[best].tolist()), d.n, d.m),
    )


def weak_mqc_inequality_holds(d: Density, A: Any, phi: PwAffineMap) -> tuple[bool, EssSupResult]:
    """Check f(A) <= ess sup f(A + D phi) for a zero-boundary phi."""
    if not phi.zero_boundary:
        raise NotZeroBoundaryError("test map does not vanish on the boundary of Q")
    result = ess_sup_shifted(d, A, phi)
    f_a = d.evaluate(_as_point(A, d.n, d.m, phi.mode))
    if phi.mode == "rational":
        return bool(f_a <= result.value), result
    return bool(f_a - result.value <= FLOAT_MARGIN), result


def batch_gradients(mesh: CubeMesh, V: np.ndarray) -> np.ndarray:
    """Float gradients for a stack of nodal-value arrays V (B, N, m) -> (B, S, n, m)."""
    V = np.asarray(V, dtype=float)
    simp = mesh.simplices
    diffs = V[:, simp[:, 1:]] - V[:, simp[:, :-1]]
    out = np.empty((V.shape[0], mesh.num_simplices, mesh.n, V.shape[2]))
    for t, inv in enumerate(mesh._sparse_inverses):
        rows = mesh.simplex_type == t
        block = diffs[:, rows]
        for r, terms in enumerate(inv):
            acc = 0.0
            for term in terms:
                acc = acc + block[:, :, term[0], :] * term[2]
            out[:, rows, r, :] = acc
    return out


def batch_ess_sup(d: Density, A: Sequence[float], mesh: CubeMesh, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Float ess-sup for many candidate maps at once.

    Returns ``(ess, top_fraction)``: the ess-sup per candidate and the fraction
    of simplices attaining it (a tie-breaking objective for local search).
    """
    G = batch_gradients(mesh, V)
    B, S = G.shape[:2]
    shifted = np.asarray(A, dtype=float)[None, None, :] + flatten_gradients(G)
    values = d.evaluate_batch(shifted.reshape(B * S, -1)).astype(float).reshape(B, S)
    ess = values.max(axis=1)
    top = (values >= ess[:, None] - FLOAT_MARGIN).mean(axis=1)
    return ess, top
