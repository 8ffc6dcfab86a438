import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morrey.constructions import (
    CompatibilityError,
    LaminateSpec,
    ZigZagProfile,
    build_construction,
    clamp_boundary,
    construction_spec,
    describe_laminate,
    largest_eps_for_delta,
    laminate_test_map,
    zigzag,
    zigzag_test_map,
)
from morrey.density import P4, make_square_boundary_4d
from morrey.functionals import ess_sup_shifted
from morrey.mesh import boundary_sup, boundary_sup_sq, build_kuhn_mesh, grad_sup_norm
from morrey.numeric import mpq


def test_zigzag_values():
    assert zigzag(mpq(1, 4)) == mpq(1, 4)
    assert zigzag(mpq(3, 4)) == mpq(1, 4)
    assert abs(zigzag(1.3) - 0.3) < 1e-12
    assert zigzag(mpq(13, 10)) == mpq(3, 10)


@given(st.fractions(-10, 10, max_denominator=1000))
def test_zigzag_period_and_range(t):
    q = mpq(t.numerator, t.denominator)
    assert zigzag(q) == zigzag(q + 1)
    assert 0 <= zigzag(q) <= mpq(1, 2)


@given(st.fractions(-10, 10, max_denominator=1000), st.fractions(-10, 10, max_denominator=1000))
def test_zigzag_is_1_lipschitz(s, t):
    a, b = mpq(s.numerator, s.denominator), mpq(t.numerator, t.denominator)
    assert abs(zigzag(a) - zigzag(b)) <= abs(a - b)


def test_profile_requires_even_reciprocal():
    with pytest.raises(CompatibilityError):
        ZigZagProfile(mpq(1, 3))
    with pytest.raises(CompatibilityError):
        zigzag_test_map(mpq(1, 4), build_kuhn_mesh(2, 4))
    assert ZigZagProfile(mpq(1, 4)).compatible_k() == 8


@pytest.mark.parametrize("eps,k,bsq", [(mpq(1, 4), 8, mpq(1, 128)), (mpq(1, 2), 4, mpq(1, 32))])
def test_zigzag_map_norms(eps, k, bsq):
    phi = zigzag_test_map(eps, build_kuhn_mesh(2, k))
    assert grad_sup_norm(phi) == mpq(1, 2)
    assert boundary_sup_sq(phi) == bsq
    assert abs(boundary_sup(phi) - math.sqrt(2) / 4 * float(eps)) < 1e-15
    # vanishes on the faces x1 = 0 and x1 = 1
    assert all((phi.nodal_values[i] == 0).all() for i, row in enumerate(phi.mesh.lattice) if row[0] in (0, k))


@pytest.mark.parametrize("eps", [mpq(1, 2), mpq(1, 4), mpq(1, 8), mpq(1, 16)])
def test_boundary_sup_decays_linearly(eps):
    phi = zigzag_test_map(eps, build_kuhn_mesh(2, int(2 / eps)))
    assert boundary_sup_sq(phi) == eps * eps / 8


def test_shifted_points_on_square():
    d = make_square_boundary_4d()
    phi = zigzag_test_map(mpq(1, 4), build_kuhn_mesh(2, 8))
    U, _ = phi.unique_gradients
    shifted = {tuple(p + g for p, g in zip(P4, (u[0, 0], u[1, 0], u[0, 1], u[1, 1]))) for u in U}
    assert shifted == {(0, 0, 0, 0), (1, 0, 1, 0)}
    assert ess_sup_shifted(d, P4, phi).value == 0


def test_zigzag_interpolation_is_exact():
    eps = mpq(1, 4)
    phi = zigzag_test_map(eps, build_kuhn_mesh(2, 8))
    prof = ZigZagProfile(eps)
    rng = np.random.default_rng(1)
    for _ in range(1000):
        x = tuple(mpq(int(v), 1000) for v in rng.integers(0, 1001, size=2))
        assert phi.evaluate(x).tolist() == [prof(x[0])] * 2


def test_laminate_matches_zigzag():
    mesh = build_kuhn_mesh(2, 8)
    lam = laminate_test_map(LaminateSpec((1, 0), (1, 1), mpq(1, 4)), mesh)
    assert (lam.nodal_values == zigzag_test_map(mpq(1, 4), mesh).nodal_values).all()


def test_laminate_second_axis():
    phi = laminate_test_map(LaminateSpec((0, 1), (1, 0), mpq(1, 2)), build_kuhn_mesh(2, 4))
    for g in phi.gradients:
        assert g[1, 0] in (mpq(1, 2), mpq(-1, 2))
        assert g[0, 0] == g[0, 1] == g[1, 1] == 0


def test_laminate_zero_amplitude():
    phi = laminate_test_map(LaminateSpec((1, 0), (0, 0), mpq(1, 2)), build_kuhn_mesh(2, 4))
    assert (phi.nodal_values == 0).all() and phi.zero_boundary


def test_laminate_oblique_direction_unsupported():
    with pytest.raises(NotImplementedError):
        laminate_test_map(LaminateSpec((1, 1), (1, 0), mpq(1, 2)), build_kuhn_mesh(2, 4))


def test_largest_eps_for_delta():
    expected = [2, 2, 4, 6, 12, 24, 46, 92, 182, 364]
    for j, inv in enumerate(expected, start=1):
        eps = largest_eps_for_delta((1, 1), 2, mpq(1, 2**j))
        assert eps == mpq(1, inv)
        assert eps * eps / 8 <= mpq(1, 4**j)
        if inv > 2:
            bigger = mpq(1, inv - 2)
            assert bigger * bigger / 8 > mpq(1, 4**j)


def test_construction_id_roundtrip():
    spec = LaminateSpec.along_axis(1, 2, (1, mpq(-1, 2)), mpq(1, 4))
    desc = describe_laminate(spec, 8, clamped=True)
    assert desc["id"] == "clamped-laminate(2,1,-1/2,1/4)"
    parsed, clamped = construction_spec(desc["id"], 2, 2)
    assert parsed == spec and clamped
    phi = build_construction(desc, 2, 2)
    assert phi.zero_boundary
    assert (phi.nodal_values == clamp_boundary(laminate_test_map(spec, build_kuhn_mesh(2, 8))).nodal_values).all()
    assert describe_laminate(LaminateSpec.along_axis(0, 2, (1, 1), mpq(1, 2)), 4)["id"] == "zigzag(1/2)"


def test_bad_construction_ids():
    for cid in ("zigzag(1/2", "spiral(1)", "laminate(1,1/2)"):
        with pytest.raises(ValueError):
            construction_spec(cid, 2, 2)
