import dataclasses

import pytest

from morrey.checkers import (
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
from morrey.density import P4, Density, DimensionError, make_square_boundary_4d
from morrey.gallery import resolve_density
from morrey.numeric import mpq
from morrey.records import NO_VIOLATION, STRONG_FALSIFICATION, VIOLATED, WEAK_VIOLATION, Verdict, Witness

F = make_square_boundary_4d()
SEG_1x2 = resolve_density("segment2d:1x2")
NEG_SQ = Density(lambda x: -x[0] * x[0], 1, 1, claimed_lsc=True, density_id="negsq")


def test_weak_square_no_violation():
    v = falsify_weak_mqc(F, P4, SearchConfig(k=8, trials=10_000))
    assert v.status == NO_VIOLATION
    assert "10000" in v.budget and v.witness is None


def test_weak_concave_violated_with_sound_witness():
    v = falsify_weak_mqc(NEG_SQ, (0,), SearchConfig(k=4, trials=50))
    assert v.status == VIOLATED
    w = v.witness
    assert w.kind == WEAK_VIOLATION and w.f_at_A > w.ess_sup
    assert validate_witness(w, NEG_SQ) == []
    # a weak violation is also a strong falsification at any delta >= 0
    strong = [x for x in v.witnesses if x.kind == STRONG_FALSIFICATION]
    assert strong and validate_witness(strong[0], NEG_SQ) == []
    assert strong[0].epsilon_def < w.f_at_A - w.ess_sup


def test_weak_spike_needs_lower_semicontinuity():
    v = falsify_weak_mqc(resolve_density("spike1d"), (0,), SearchConfig(k=4, trials=20))
    assert v.status == VIOLATED


def test_weak_segment_scalar_case():
    v = falsify_weak_mqc(SEG_1x2, (mpq(1, 2), 0), SearchConfig(k=8, trials=2000))
    assert v.status == NO_VIOLATION


def test_strong_square_violated_every_delta():
    deltas = default_deltas(6)
    v = falsify_strong_mqc(F, P4, mpq(1, 2), 1, deltas, cfg=SearchConfig(k=8, trials=100))
    assert v.status == VIOLATED
    assert [w.delta for w in v.witnesses] == list(deltas)
    for w in v.witnesses:
        assert w.ess_sup == 0 and w.grad_norm == mpq(1, 2)
        assert w.boundary_sup_sq <= w.delta**2
        assert w.f_at_A > w.ess_sup + w.epsilon_def
        assert validate_witness(w, F) == []


def test_strong_segment_scalar_case():
    v = falsify_strong_mqc(SEG_1x2, (mpq(1, 2), 0), mpq(1, 2), 1, default_deltas(), cfg=SearchConfig(k=8, trials=100))
    assert v.status == NO_VIOLATION


def test_strong_huge_delta_at_set_point():
    cfg = SearchConfig(k=8, trials=100, include_zero_map=False)
    v = falsify_strong_mqc(SEG_1x2, (mpq(1, 4), 0), mpq(1, 2), 1, (10,), cfg=cfg)
    assert v.status == NO_VIOLATION


def test_tampered_witness_is_rejected():
    v = falsify_strong_mqc(F, P4, mpq(1, 2), 1, (mpq(1, 4),), cfg=SearchConfig(k=8, trials=10))
    w = v.witnesses[0]
    assert validate_witness(w, F) == []
    for change in ({"ess_sup": mpq(1)}, {"grad_norm": mpq(1, 3)}, {"boundary_sup_sq": mpq(1, 7)}):
        assert validate_witness(dataclasses.replace(w, **change), F)
    assert validate_witness(dataclasses.replace(w, delta=mpq(1, 100)), F)


def test_witness_and_verdict_roundtrip():
    v = falsify_weak_mqc(NEG_SQ, (0,), SearchConfig(k=4, trials=10))
    back = Verdict.from_dict(v.to_dict())
    assert back.to_dict() == v.to_dict()
    assert Witness.from_dict(v.witness.to_dict()) == v.witness


def test_search_is_deterministic():
    cfg = SearchConfig(k=4, trials=300, seed=13)
    a = falsify_weak_mqc(F, (mpq(1, 4), 0, mpq(3, 4), 0), cfg).to_dict()
    b = falsify_weak_mqc(F, (mpq(1, 4), 0, mpq(3, 4), 0), cfg).to_dict()
    assert a == b


def test_search_independent_of_thread_count(monkeypatch):
    cfg = SearchConfig(k=4, trials=200, seed=2)
    monkeypatch.setenv("MORREY_THREADS", "1")
    a = falsify_weak_mqc(NEG_SQ, (mpq(1, 2),), cfg).to_dict()
    monkeypatch.setenv("MORREY_THREADS", "4")
    b = falsify_weak_mqc(NEG_SQ, (mpq(1, 2),), cfg).to_dict()
    assert a == b


def test_suite_segment_consistent():
    r = scalar_equivalence_suite(resolve_density("segment2d"), SuiteConfig(points=100, pairs=200))
    assert r["status"] == "consistent" and not r["quasiconvexity"]["nonconvex_witnesses"]


@pytest.mark.parametrize("density_id", ["twosegments2d", "twosegments2d:1x2"])
def test_suite_two_segments(density_id):
    r = scalar_equivalence_suite(resolve_density(density_id), SuiteConfig(points=100, pairs=200))
    assert r["quasiconvexity"]["nonconvex_witnesses"]
    # nonconvexity must come with a falsification, otherwise tension is reported
    assert r["status"] in ("consistent", "inconclusive_tension")
    assert r["status"] == "consistent"
    assert r["weak"]["violations"] + r["strong"]["falsifications"] > 0


def test_suite_constant():
    r = scalar_equivalence_suite(resolve_density("constant(2):1x2"), SuiteConfig(points=50, pairs=50))
    assert r["status"] == "consistent"


def test_suite_rejects_non_scalar():
    with pytest.raises(DimensionError):
        scalar_equivalence_suite(F, SuiteConfig(points=5, pairs=5))


def test_reproduce_single_delta():
    r = reproduce_counterexample(ReproduceConfig(deltas=(mpq(1, 2),), trials=300))
    assert r["status"] == "confirmed"
    assert any("single" in n for n in r["notes"])


def test_reproduce_off_square_point_mismatch():
    r = reproduce_counterexample(ReproduceConfig(strong_A=(2, 0, 0, 0), trials=300, deltas=default_deltas(3)))
    assert r["status"] == "stage-mismatch"
    assert r["failed_stages"] == ["strong_at_A"]
