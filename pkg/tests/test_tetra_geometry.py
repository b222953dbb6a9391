import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from concurrence_engine import ConcurrenceProfile, concurrence_profile, profile_arrays
from state_core import random_state
from tetra_geometry import (
    GRADIENT_NAMES, DegenerateBaseError, InfeasibleEdgesError, TetraEdges, batch_volumes,
    build_edges, cayley_menger_det, closed_form_volume, cm_volume, edges_from_points,
    lemma_gap, tetra_report, volume_terms, volume_gradient,
)

R3 = math.sqrt(3) / 2
R5 = math.sqrt(5) / 2


def make_edges(apex, base):
    """apex {1: x, 2: y, 3: z}; base {(1, 2): .., (1, 3): .., (2, 3): ..}."""
    return TetraEdges.from_maps(apex, {frozenset(k): v for k, v in base.items()})


def regular(side=1.0):
    return make_edges({1: side, 2: side, 3: side}, {(1, 2): side, (1, 3): side, (2, 3): side})


@pytest.fixture
def psi_a_edges(psi_a):
    return build_edges(concurrence_profile(psi_a))


def test_psi_a_drops_qubit_four(psi_a_edges):
    assert psi_a_edges.dropped_qubit == 4
    assert [q for q, _ in psi_a_edges.apex] == [1, 2, 3]
    assert psi_a_edges.u == pytest.approx(R3)
    assert psi_a_edges.base_length(2, 3) == pytest.approx(R5)
    assert psi_a_edges.base_cut(2, 3) == '14|23'


def test_psi_b_drops_qubit_two(psi_b):
    edges = build_edges(concurrence_profile(psi_b))
    assert edges.dropped_qubit == 2
    assert edges.kept == (1, 3, 4)
    assert edges.base_length(3, 4) == pytest.approx(R5)
    assert edges.base_length(1, 3) == pytest.approx(1.0)


def test_ties_drop_the_largest_label():
    profile = ConcurrenceProfile.from_values([1.0, 1.0, 0.5, 1.0 - 1e-13, 1, 1, 1])
    assert build_edges(profile).dropped_qubit == 4
    profile = ConcurrenceProfile.from_values([1.0, 1.0, 0.5, 0.9, 1, 1, 1])
    assert build_edges(profile).dropped_qubit == 2


def test_apex_ties_sort_by_label():
    edges = make_edges({3: 0.5, 1: 0.5, 2: 0.4}, {(1, 2): 1, (1, 3): 1, (2, 3): 1})
    assert [q for q, _ in edges.apex] == [2, 1, 3]


def test_edges_reject_unsorted_apex():
    with pytest.raises(ValueError):
        TetraEdges(apex=((1, 0.9), (2, 0.5), (3, 1.0)), dropped_qubit=4,
                   base={frozenset((1, 2)): 1.0, frozenset((1, 3)): 1.0, frozenset((2, 3)): 1.0})


def test_volume_terms_psi_a(psi_a_edges):
    D, E, F, rad = volume_terms(psi_a_edges)
    assert (D, E, F) == pytest.approx((0.75, 0.5, 0.5))
    assert rad == pytest.approx(2.265625)
    assert closed_form_volume(psi_a_edges) == pytest.approx(math.sqrt(2.265625) / 12)


def test_cayley_menger_det_is_twice_the_radicand(psi_a_edges):
    *_, rad = volume_terms(psi_a_edges)
    assert cayley_menger_det(psi_a_edges) == pytest.approx(2 * rad, rel=1e-12)
    det, vol = cm_volume(psi_a_edges)
    assert vol == pytest.approx(0.1254332, abs=1e-6)


def test_lemma_gap_psi_a(psi_a_edges):
    gap = lemma_gap(psi_a_edges)
    assert gap.H == pytest.approx(2 + R3)
    assert gap.R == pytest.approx(R5 / math.sqrt(3))
    assert gap.G == pytest.approx(0.929533, abs=1e-6)
    assert gap.p_semi == pytest.approx(1.5 * R5)


def test_lemma_gap_psi_b(psi_b):
    gap = lemma_gap(build_edges(concurrence_profile(psi_b)))
    assert gap.G == pytest.approx(0.789008, abs=1e-6)


def test_regular_tetrahedron_volume():
    report = tetra_report(regular())
    assert report.status == 'ok'
    assert report.volume == pytest.approx(math.sqrt(2) / 12, abs=1e-14)
    assert report.oracle_gap < 1e-12


def test_unrealizable_edges_are_infeasible():
    edges = make_edges({1: 0.1, 2: 0.1, 3: 0.1}, {(1, 2): 1.0, (1, 3): 1.0, (2, 3): 1.0})
    *_, rad = volume_terms(edges)
    assert rad == pytest.approx(-0.970, abs=1e-3)
    report = tetra_report(edges)
    assert report.status == 'infeasible'
    assert not report.feasible
    assert math.isnan(report.volume)
    assert report.to_dict()['volume'] is None
    with pytest.raises(InfeasibleEdgesError) as info:
        closed_form_volume(edges)
    assert info.value.value < 0
    with pytest.raises(InfeasibleEdgesError):
        cm_volume(edges)


def test_collinear_base_is_degenerate():
    edges = make_edges({1: math.sqrt(2), 2: 1.0, 3: math.sqrt(2)},
                       {(1, 2): 1.0, (2, 3): 1.0, (1, 3): 2.0})
    with pytest.raises(DegenerateBaseError) as info:
        lemma_gap(edges)
    assert abs(info.value.slack) < 1e-12
    report = tetra_report(edges)
    assert report.status == 'degenerate'
    assert report.volume == 0.0
    assert report.to_dict()['G'] is None
    with pytest.raises(DegenerateBaseError):
        volume_gradient(edges)


def test_zero_apex_edge_is_degenerate():
    edges = make_edges({1: 0.0, 2: 1.0, 3: 1.0}, {(1, 2): 1.0, (1, 3): 1.0, (2, 3): 1.0})
    report = tetra_report(edges)
    assert report.status == 'degenerate'
    assert report.volume == 0.0
    with pytest.raises(DegenerateBaseError):
        volume_gradient(edges)


def test_gradient_psi_a_follows_edge_feet(psi_a_edges):
    grad = volume_gradient(psi_a_edges)
    assert tuple(grad) == GRADIENT_NAMES
    assert grad['u'] == pytest.approx(0.10488, abs=2e-5)
    assert grad['v'] == pytest.approx(0.06920, abs=2e-5)
    assert grad['w'] == pytest.approx(0.06920, abs=2e-5)
    assert grad['C_vw'] == pytest.approx(0.05416, abs=2e-5)
    assert grad['C_uw'] == pytest.approx(0.03869, abs=2e-5)
    assert grad['C_uv'] == pytest.approx(0.03869, abs=2e-5)


def test_gradient_of_regular_tetrahedron_is_symmetric():
    grad = volume_gradient(regular())
    # degree-3 homogeneity: the six partials sum to 3V
    np.testing.assert_allclose(list(grad.values()), [math.sqrt(2) / 24] * 6, atol=1e-8)


def test_points_to_edges_regular():
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    edges = edges_from_points(pts)
    side = 2 * math.sqrt(2)
    assert tetra_report(edges).volume == pytest.approx(side ** 3 * math.sqrt(2) / 12)


def test_closed_form_matches_cayley_menger_on_random_points():
    rng = np.random.default_rng(42)
    for _ in range(10_000):
        pts = rng.normal(size=(4, 3))
        edges = edges_from_points(pts, dropped_qubit=int(rng.integers(1, 5)))
        exact = abs(np.linalg.det(pts[1:] - pts[0])) / 6.0
        scale = max(1.0, max(edges.edge_vector())) ** 6
        *_, rad = volume_terms(edges)
        assert abs(cayley_menger_det(edges) - 288.0 * exact ** 2) <= 1e-9 * scale
        assert abs(rad - 144.0 * exact ** 2) <= 1e-9 * scale


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(min_value=-0.1, max_value=0.1), min_size=6, max_size=6),
    st.floats(min_value=0.1, max_value=3.0),
)
def test_volume_scales_with_the_cube(perturb, factor):
    edges = regular().with_edge_vector([1.0 + d for d in perturb])
    base = tetra_report(edges).volume
    scaled = tetra_report(edges.scaled(factor)).volume
    assert base > 0
    assert scaled == pytest.approx(factor ** 3 * base, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(min_value=-0.1, max_value=0.1), min_size=6, max_size=6),
       st.permutations([1, 2, 3]))
def test_volume_ignores_vertex_labelling(perturb, perm):
    edges = regular().with_edge_vector([1.0 + d for d in perturb])
    relabel = dict(zip((1, 2, 3), perm))
    apex = {relabel[q]: x for q, x in edges.apex}
    base = {frozenset(relabel[q] for q in k): x for k, x in edges.base.items()}
    moved = TetraEdges.from_maps(apex, base)
    assert tetra_report(moved).volume == pytest.approx(tetra_report(edges).volume, rel=1e-10)
    assert lemma_gap(moved).G == pytest.approx(lemma_gap(edges).G, rel=1e-12)


def test_batch_volumes_match_scalar_path(rng):
    states = [random_state(rng) for _ in range(50)]
    geo = batch_volumes(*profile_arrays(np.stack([s.amps for s in states])))
    for k, state in enumerate(states):
        edges = build_edges(concurrence_profile(state))
        report = tetra_report(edges)
        assert geo['dropped'][k] == edges.dropped_qubit
        assert geo['volume'][k] == pytest.approx(report.volume, abs=1e-10)
        assert geo['cm_det'][k] == pytest.approx(report.cm_det, abs=1e-10)
        assert geo['G'][k] == pytest.approx(report.G, abs=1e-8)
        assert geo['radicand'][k] == pytest.approx(0.5 * report.cm_det, abs=1e-10)


def test_to_dict_layout(psi_a_edges):
    out = psi_a_edges.to_dict()
    assert out['dropped_qubit'] == 4
    assert [b['cut'] for b in out['base']] == ['12|34', '13|24', '14|23']
    assert tetra_report(psi_a_edges).to_dict()['status'] == 'ok'
