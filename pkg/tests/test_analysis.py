import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biconf import corpus
from biconf.analysis import (DEFAULT_THRESHOLD, INDETERMINATE, TIERS, canonical_json, classify,
                             dimension_bound, evaluate_tensors, independence_rank, narrative,
                             obstruction_report, rescale_invariance_check, sample_points)
from biconf.dsl import parse_manifold, validate_spec
from biconf.errors import (EmptyDomain, NonPositiveRescale, NotABCVF, RankExcluded,
                           UnknownTensor)

from helpers import manifold

FEW = 4


def samples(entry, count=FEW, seed=0xB1C0):
    return sample_points(manifold(entry).spec.domain, count, seed)


# --- sampling -----------------------------------------------------------------------

def test_single_point_respects_margin():
    s = sample_points([(0.0, 1.0)], 1, seed=0)
    assert s.points.shape == (1, 1)
    assert 0.1 <= s.points[0, 0] <= 0.9


def test_sampling_is_deterministic():
    dom = manifold("example81_generic").spec.domain
    a, b = sample_points(dom, 16, 42), sample_points(dom, 16, 42)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, sample_points(dom, 16, 43).points)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(0.01, 5)), min_size=1, max_size=6),
       st.integers(1, 20), st.integers(0, 2 ** 63))
def test_samples_stay_strictly_inside(boxes, count, seed):
    dom = [(a, a + w) for a, w in boxes]
    pts = sample_points(dom, count, seed).points
    lo = np.array([a for a, _ in dom])
    hi = np.array([b for _, b in dom])
    assert pts.shape == (count, len(dom))
    assert np.all(pts >= lo + 0.1 * (hi - lo) - 1e-12)
    assert np.all(pts <= hi - 0.1 * (hi - lo) + 1e-12)


def test_degenerate_box_is_empty():
    with pytest.raises(EmptyDomain):
        sample_points([(0.0, 0.0)], 1)
    with pytest.raises(ValueError):
        sample_points([(0.0, 1.0)], 0)


# --- obstruction reports -------------------------------------------------------------------

def test_separable_T_vanishes_and_generic_does_not():
    rep = obstruction_report(manifold("conf_separable_3x2"), "T_abc", samples("conf_separable_3x2"))
    assert rep.vanishes and rep.max_scaled_residual < DEFAULT_THRESHOLD
    rep = obstruction_report(manifold("nonseparable_3x3"), "Tabc", samples("nonseparable_3x3"))
    assert rep.verdict == "nonzero" and rep.max_scaled_residual > 1e-3
    assert len(rep.per_point) == FEW and rep.scale >= 1.0


def test_biconformally_flat_T4_report():
    rep = obstruction_report(manifold("biconf_flat_3x3"), "T4", samples("biconf_flat_3x3"))
    assert rep.vanishes


def test_report_errors():
    with pytest.raises(RankExcluded):
        obstruction_report(manifold("flat_2x2"), "T4", samples("flat_2x2"))
    with pytest.raises(RankExcluded):
        obstruction_report(manifold("example82"), "cotton1", samples("example82"))
    with pytest.raises(UnknownTensor):
        obstruction_report(manifold("flat_2x2"), "Ricci", samples("flat_2x2"))


def test_shared_pass_matches_single_reports():
    vm = manifold("example82")
    s = samples("example82")
    both = evaluate_tensors(vm, ["cotton0", "cotton0_projected"], s)
    single = obstruction_report(vm, "cotton0", s)
    assert both["cotton0"] == single
    assert not both["cotton0"].vanishes and both["cotton0_projected"].vanishes


# the default threshold sits well away from both populations
VANISHING = [(e.id, t) for e in corpus.entries() for t in e.vanishing]
NONZERO = [(e.id, t) for e in corpus.entries() for t in e.nonzero]


@pytest.mark.parametrize("entry,tensor", VANISHING)
def test_noise_margin(entry, tensor):
    rep = obstruction_report(manifold(entry), tensor, samples(entry))
    assert rep.max_scaled_residual < DEFAULT_THRESHOLD / 100


@pytest.mark.parametrize("entry,tensor", NONZERO)
def test_signal_margin(entry, tensor):
    rep = obstruction_report(manifold(entry), tensor, samples(entry))
    assert rep.max_scaled_residual > DEFAULT_THRESHOLD * 1e4


# --- dimension bound ---------------------------------------------------------------------------

def test_bound_examples():
    b = dimension_bound(6, 3)
    assert (b.N_proof, b.N_statement, b.finite) == (20, 12, True)
    assert dimension_bound(4, 2).finite is False
    b = dimension_bound(7, 3)
    assert b.N_proof == 25 and b.finite
    assert "open question" in b.note


def test_bound_arithmetic_exhaustive():
    for n in range(2, 13):
        for p in range(1, n):
            b = dimension_bound(n, p)
            assert b.N_proof - b.N_statement == n + 2
            assert b.finite == (p not in (1, 2, n - 1, n - 2))


@pytest.mark.parametrize("n,p", [(4, 0), (4, 4), (3, -1)])
def test_bound_out_of_range(n, p):
    with pytest.raises(ValueError):
        dimension_bound(n, p)


# --- classification ------------------------------------------------------------------------------

def _implications_hold(tiers):
    if tiers["decomposable"] is True:
        assert tiers["conformally_separable"] is True
    if tiers["conformally_reducible"] is True:
        assert tiers["conformally_separable"] is True
    if tiers["biconformally_flat"] is True:
        assert tiers["conformally_separable"] is True
        assert tiers["leaf_P_conformally_flat"] is True
        assert tiers["leaf_Pi_conformally_flat"] is True


@pytest.mark.parametrize("entry", [e.id for e in corpus.entries()])
def test_classify_corpus_tiers(entry):
    rep = classify(manifold(entry), samples(entry))
    assert rep.tiers == corpus.get(entry).tiers
    _implications_hold(rep.tiers)
    assert rep.bound.n == rep.n and rep.bound.p == rep.p


def test_rank_two_tiers_are_indeterminate():
    rep = classify(manifold("flat_2x2"), samples("flat_2x2"))
    assert rep.tiers["biconformally_flat"] == INDETERMINATE
    assert rep.tiers["decomposable"] is True
    assert "T4" not in rep.reports
    assert any(line.startswith("n/a") and "rank excluded" in line for line in narrative(rep))


def test_rank_three_uses_cotton_criterion():
    rep = classify(manifold("example82"), samples("example82"))
    assert rep.leaf_criteria == {"P": "cotton0_projected", "Pi": None}
    assert rep.tiers["leaf_P_conformally_flat"] is True
    rep = classify(manifold("conf_separable_4x3"), samples("conf_separable_4x3"))
    assert rep.leaf_criteria == {"P": "Cpar", "Pi": "cotton1_projected"}


def _true_tiers(rep):
    return {t for t in TIERS if rep.tiers[t] is True}


@pytest.mark.parametrize("entry", ["conf_separable_3x2", "example82", "nonseparable_3x3"])
def test_threshold_monotonicity(entry):
    s = samples(entry, 2)
    found = [_true_tiers(classify(manifold(entry), s, t)) for t in (1e-14, 1e-7, 1e-2, 1.0)]
    for tight, loose in zip(found, found[1:]):
        assert tight <= loose


def test_classify_is_byte_stable():
    vm = manifold("example81_special")
    a = canonical_json(classify(vm, samples("example81_special")).as_dict())
    b = canonical_json(classify(vm, samples("example81_special")).as_dict())
    assert a == b
    assert a.index('"bounds"') < a.index('"manifold"') < a.index('"tiers"')


# --- rescale invariance ----------------------------------------------------------------------------

def test_identity_rescale_is_exact():
    res = rescale_invariance_check(manifold("flat_3x3"), "1", "1", samples("flat_3x3", 2))
    assert res.deviation == 0.0


@pytest.mark.parametrize("entry,Z,X", [
    ("flat_3x3", "exp(x1 + x4)", "1 + x2^2"),
    ("flat_3x3", "2 + sin(x3*x6)", "exp(-0.4*x2*x5)"),
    ("biconf_flat_3x3", "1 + 0.3*x1^2 + 0.2*x6^2", "exp(0.5*x3 - 0.2*x4)"),
])
def test_rescale_invariance(entry, Z, X):
    res = rescale_invariance_check(manifold(entry), Z, X, samples(entry, 3))
    assert res.scaled_deviation < 1e-8
    assert set(res.per_tensor) >= {"Cpar", "Cperp", "Lambda", "nablabar_P_ud"}


def test_rescale_errors():
    with pytest.raises(NonPositiveRescale):
        rescale_invariance_check(manifold("flat_3x3"), "x1", "1", samples("flat_3x3", 1))
    with pytest.raises(NonPositiveRescale):
        rescale_invariance_check(manifold("flat_3x3"), "1", "-exp(x2)", samples("flat_3x3", 1))
    with pytest.raises(RankExcluded):
        rescale_invariance_check(manifold("flat_2x2"), "1", "1", samples("flat_2x2", 1))


# --- independence -----------------------------------------------------------------------------

TWICE = validate_spec(parse_manifold(corpus.get("flat_2x2").source.replace(
    "vector rot_A", "vector rot_A2 { xi[x1] = -2*x2; xi[x2] = 2*x1; }\n  vector shear { xi[x1] = x2; }\n"
                    "  vector rot_A", 1)))


def test_independence_trivial_cases():
    s = sample_points(TWICE.spec.domain, 3, 1)
    assert independence_rank(TWICE, ["rot_A", "rot_A2"], s) == 1
    assert independence_rank(TWICE, [], s) == 0
    with pytest.raises(NotABCVF, match="shear"):
        independence_rank(TWICE, ["rot_A", "shear"], s)


def test_flat_generators_are_independent():
    e = corpus.get("flat_3x3")
    # 20 fields need at least 4 points of R^6 to be told apart
    assert independence_rank(manifold("flat_3x3"), e.bcvfs, samples("flat_3x3", 3)) == 18
    rank = independence_rank(manifold("flat_3x3"), e.bcvfs, samples("flat_3x3", 4))
    assert rank == len(e.bcvfs) == 20 == dimension_bound(6, 3).N_proof
