import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morrey.constructions import zigzag_test_map
from morrey.mesh import (
    MeshSizeError,
    PwAffineMap,
    boundary_sup,
    boundary_sup_sq,
    build_kuhn_mesh,
    grad_sup_norm,
    interpolate,
    simplex_gradient,
)
from morrey.numeric import mpq

from .oracles import fraction_gradient, fraction_solve


@pytest.mark.parametrize("n,k,nodes,simplices", [(2, 1, 4, 2), (2, 4, 25, 32), (3, 2, 27, 48), (1, 5, 6, 5), (4, 1, 16, 24)])
def test_counts_and_volume(n, k, nodes, simplices):
    mesh = build_kuhn_mesh(n, k)
    assert mesh.num_nodes == nodes and mesh.num_simplices == simplices
    vols = [mesh.simplex_volume(s) for s in range(mesh.num_simplices)]
    assert all(v > 0 for v in vols)
    assert sum(vols) == 1


def test_volume_by_independent_determinant():
    mesh = build_kuhn_mesh(3, 2)
    total = Fraction(0)
    for s in range(mesh.num_simplices):
        v = [np.array(r, dtype=object) for r in mesh.lattice[mesh.simplices[s]]]
        E = [[Fraction(int(x), 2) for x in v[i] - v[0]] for i in (1, 2, 3)]
        det = (E[0][0] * (E[1][1] * E[2][2] - E[1][2] * E[2][1])
               - E[0][1] * (E[1][0] * E[2][2] - E[1][2] * E[2][0])
               + E[0][2] * (E[1][0] * E[2][1] - E[1][1] * E[2][0]))
        total += abs(det) / 6
    assert total == 1


def test_boundary_mask():
    mesh = build_kuhn_mesh(3, 3)
    expect = [(0 in row or 3 in row) for row in mesh.lattice.tolist()]
    assert mesh.boundary_mask.tolist() == expect


def test_size_guard():
    with pytest.raises(MeshSizeError):
        build_kuhn_mesh(5, 2)
    with pytest.raises(MeshSizeError):
        build_kuhn_mesh(4, 100)
    with pytest.raises(ValueError):
        build_kuhn_mesh(2, 0)


def test_ordering_is_deterministic():
    a, b = build_kuhn_mesh(3, 3), build_kuhn_mesh(3, 3)
    assert (a.simplices == b.simplices).all() and (a.lattice == b.lattice).all()


def test_affine_function_gradients():
    mesh = build_kuhn_mesh(2, 1)
    phi = interpolate(lambda x: x[0], mesh)
    for s in range(mesh.num_simplices):
        assert simplex_gradient(phi, s).ravel().tolist() == [1, 0]
    assert not phi.zero_boundary


def test_zero_map():
    mesh = build_kuhn_mesh(2, 3)
    phi = interpolate(lambda x: (0, 0), mesh)
    assert phi.zero_boundary
    assert (phi.gradients == 0).all()
    assert boundary_sup(phi) == 0 and grad_sup_norm(phi) == 0


def test_identity_grad_norm():
    phi = interpolate(lambda x: x, build_kuhn_mesh(2, 2))
    assert grad_sup_norm(phi) == 1


def test_boundary_sup_examples():
    phi = interpolate(lambda x: x[0] * (1 - x[0]), build_kuhn_mesh(2, 4))
    # vanishes on the faces x1 = 0, 1; on x2 = 0 the nodes x1 = 1/4, 1/2 give 3/16, 1/4
    assert phi.evaluate((mpq(1, 4), 0)).tolist() == [mpq(3, 16)]
    assert phi.evaluate((0, mpq(1, 2))).tolist() == [0]
    assert boundary_sup(phi) == mpq(1, 4)
    zz = zigzag_test_map(mpq(1, 4), build_kuhn_mesh(2, 8))
    assert boundary_sup_sq(zz) == mpq(1, 128)
    assert abs(boundary_sup(zz) - math.sqrt(2) / 16) < 1e-15


@given(st.integers(1, 3), st.integers(1, 4), st.lists(st.fractions(-3, 3, max_denominator=8), min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_affine_maps_reproduced_exactly(n, k, coeffs):
    mesh = build_kuhn_mesh(n, k)
    c = [mpq(q.numerator, q.denominator) for q in coeffs]
    phi = interpolate(lambda x: c[0] + sum(ci * xi for ci, xi in zip(c[1:], x)), mesh)
    G = phi.gradients
    for s in range(mesh.num_simplices):
        assert G[s, :, 0].tolist() == c[1 : n + 1]


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_gradients_match_fraction_solve(n, k, seed):
    mesh = build_kuhn_mesh(n, k)
    rng = np.random.default_rng(seed)
    vals = [[mpq(int(v), 7) for v in row] for row in rng.integers(-9, 10, size=(mesh.num_nodes, 2))]
    phi = PwAffineMap.from_values(mesh, vals)
    for s in range(mesh.num_simplices):
        verts = [tuple(int(i) for i in mesh.lattice[v]) for v in mesh.simplices[s]]
        ref = fraction_gradient(verts, [phi.nodal_values[v] for v in mesh.simplices[s]], k)
        assert [[Fraction(int(x.numerator), int(x.denominator)) for x in row] for row in phi.gradients[s]] == ref


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_functionals_invariant_under_axis_relabeling(seed):
    # permuting the coordinate axes of Q permutes gradient rows but keeps both norms
    n, k = 3, 2
    mesh = build_kuhn_mesh(n, k)
    rng = np.random.default_rng(seed)
    table = {tuple(row): mpq(int(v), 4) for row, v in zip(mesh.lattice.tolist(), rng.integers(-6, 7, mesh.num_nodes))}
    phi = PwAffineMap.from_values(mesh, [[table[tuple(r)]] for r in mesh.lattice.tolist()])
    for perm in itertools.permutations(range(n)):
        moved = PwAffineMap.from_values(mesh, [[table[tuple(r[p] for p in perm)]] for r in mesh.lattice.tolist()])
        assert grad_sup_norm(moved) == grad_sup_norm(phi)
        assert boundary_sup_sq(moved) == boundary_sup_sq(phi)


def test_unique_gradients_first_ids():
    phi = zigzag_test_map(mpq(1, 4), build_kuhn_mesh(2, 8))
    U, first = phi.unique_gradients
    assert len(U) == 2
    assert list(first) == sorted(first) and first[0] == 0
    for g, s in zip(U, first):
        assert (phi.gradients[s] == g).all()


def test_float_mode_matches_rational():
    mesh = build_kuhn_mesh(2, 4)
    rng = np.random.default_rng(0)
    phi = PwAffineMap.from_values(mesh, [[mpq(int(v), 8)] for v in rng.integers(-8, 9, mesh.num_nodes)])
    fl = phi.to_mode("float")
    assert np.allclose(fl.gradients.astype(float), phi.gradients.astype(float), atol=0, rtol=0)


def test_evaluate_and_serialization():
    phi = zigzag_test_map(mpq(1, 2), build_kuhn_mesh(2, 4))
    assert phi.evaluate((mpq(1, 4), mpq(1, 3))).tolist() == [mpq(1, 8), mpq(1, 8)]
    back = PwAffineMap.from_dict(phi.to_dict())
    assert (back.nodal_values == phi.nodal_values).all()


def test_locate_contains_point():
    mesh = build_kuhn_mesh(3, 4)
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = tuple(mpq(int(v), 97) for v in rng.integers(0, 98, size=3))
        s = mesh.locate(x)
        V = mesh.simplex_vertices(s)
        # barycentric coordinates are nonnegative
        E = [[Fraction(int((V[i][j] - V[0][j]).numerator), int((V[i][j] - V[0][j]).denominator)) for j in range(3)] for i in (1, 2, 3)]
        T = [list(col) for col in zip(*E)]
        lam = fraction_solve(T, [[Fraction(int((xj - V[0][j]).numerator), int((xj - V[0][j]).denominator))] for j, xj in enumerate(x)])
        lam = [r[0] for r in lam]
        assert all(l >= 0 for l in lam) and sum(lam) <= 1
