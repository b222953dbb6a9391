import json
import math

import numpy as np
import pytest

from concurrence_engine import ConcurrenceProfile
from conftest import state_from_terms
from gme_measures import (
    ClassKind, MAX_EPS, ThresholdError, classify, classify_profile, gmc, inequivalence_witness,
    report_to_json, residual_class, three_tangle, v1234, VOLUME_GAP,
)
from slocc_families import FamilySpec, benchmark_state, family_state
from state_core import apply_local_unitaries, permute_qubits, random_local_unitary, random_state
from tetra_geometry import TetraEdges, tetra_report


def test_ghz_is_genuine_with_regular_volume(ghz4):
    report = v1234(ghz4)
    assert report.label.kind is ClassKind.GENUINE
    assert report.label.is_gme
    assert report.volume == pytest.approx(math.sqrt(2) / 12, abs=1e-12)
    assert report.gmc == pytest.approx(1.0)
    assert report.perimeter == pytest.approx(6.0)
    assert report.shortest_edge == pytest.approx(1.0)


@pytest.mark.parametrize('name, volume, gmc_value', [
    ('psiA', 0.125433, math.sqrt(3) / 2),
    ('psiB', 0.096037, math.sqrt(3) / 2),
    ('psiC', 0.108386, 0.8),
    ('psiD', 0.11370, 0.8),
])
def test_benchmark_volumes(name, volume, gmc_value):
    report = v1234(benchmark_state(name))
    assert report.volume == pytest.approx(volume, abs=2e-5)
    assert report.gmc == pytest.approx(gmc_value, abs=1e-9)
    assert report.label.is_gme


def test_psi_d_volume_is_not_the_printed_value():
    assert abs(v1234(benchmark_state('psiD')).volume - 0.1624) > 1e-2


@pytest.mark.parametrize('spec, text, residual', [
    (FamilySpec('F1'), 'OneVsThreeProduct(1)', 'GHZ'),
    (FamilySpec('F4', (0.0,)), 'OneVsThreeProduct(1)', 'W'),
])
def test_one_qubit_factor_cases(spec, text, residual):
    report = v1234(family_state(spec))
    assert str(report.label) == text
    assert report.label.residual == residual
    assert report.volume == 0.0
    assert report.tetra.status == 'degenerate'
    assert not report.label.is_gme


def test_two_epr_pairs_have_zero_volume():
    report = v1234(family_state(FamilySpec('F9', (1.0, 1.0, 1.0, 1.0))))
    assert str(report.label) == 'TwoEprPairs(13|24)'
    assert report.volume == 0.0
    assert report.gmc < 1e-12


@pytest.mark.parametrize('state, text', [
    (state_from_terms([('0000', 1), ('0011', 1)]), 'TwoEprPairs(12|34)'),
    (state_from_terms([('0000', 1), ('0101', 1)]), 'TwoEprPairs(13|24)'),
    (family_state(FamilySpec('F6', (0.0, 0.0))), 'TwoEprPairs(13|24)'),
])
def test_two_product_qubits_and_one_pair(state, text):
    report = v1234(state)
    assert str(report.label) == text
    assert report.label.qubit is None
    assert report.volume == 0.0
    assert not report.label.is_gme


def test_two_zero_profile_is_not_one_vs_three():
    profile = ConcurrenceProfile.from_values([0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0])
    label = classify_profile(profile)
    assert label.kind is ClassKind.EPR_PAIRS
    assert label.partition == '12|34'
    assert label.to_dict()['witnesses'] == {'c1': 0.0, 'c2': 0.0, 'c12_34': 0.0}


def test_product_state_is_fully_separable(zero4):
    report = v1234(zero4)
    assert report.label.kind is ClassKind.FULLY_SEPARABLE
    assert report.volume == 0.0


def test_triangle_slack_gives_two_two_biseparable():
    profile = ConcurrenceProfile.from_values([0.9, 0.9, 0.9, 0.9, 1.0, 0.5, 0.5])
    label = classify_profile(profile)
    assert label.kind is ClassKind.TWO_TWO
    assert str(label) == 'TwoTwoBiseparable(12|34)'
    assert label.to_dict()['witnesses'] == {'slack_c12_34': pytest.approx(0.0)}


def test_profile_without_state_has_no_residual():
    profile = ConcurrenceProfile.from_values([0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    label = classify_profile(profile)
    assert str(label) == 'OneVsThreeProduct(1)'
    assert label.residual is None


@pytest.mark.parametrize('eps', [0.0, -1e-9, 2e-3, MAX_EPS * 10])
def test_threshold_outside_range_is_rejected(ghz4, eps):
    with pytest.raises(ThresholdError):
        v1234(ghz4, eps)
    with pytest.raises(ThresholdError):
        classify(ghz4, eps)


def test_threshold_upper_bound_is_accepted(ghz4):
    assert classify(ghz4, MAX_EPS).is_gme


def test_three_tangle():
    ghz = np.zeros(8)
    ghz[[0, 7]] = 1 / math.sqrt(2)
    w = np.zeros(8)
    w[[1, 2, 4]] = 1 / math.sqrt(3)
    assert three_tangle(ghz) == pytest.approx(1.0)
    assert three_tangle(w) == pytest.approx(0.0, abs=1e-15)


def test_residual_class_of_ghz_factor():
    assert residual_class(family_state(FamilySpec('F1')), 1) == 'GHZ'


def test_volume_invariant_under_local_unitaries_and_relabelling(rng):
    state = random_state(rng)
    ref = v1234(state)
    for perm in ((2, 1, 3, 4), (4, 3, 2, 1), (3, 4, 1, 2)):
        assert v1234(permute_qubits(state, perm)).volume == pytest.approx(ref.volume, abs=1e-10)
    for _ in range(5):
        us = [random_local_unitary(rng) for _ in range(4)]
        moved = v1234(apply_local_unitaries(state, us))
        assert moved.volume == pytest.approx(ref.volume, abs=1e-10)
        assert moved.gmc == pytest.approx(ref.gmc, abs=1e-10)


def test_gmc_of_psi_c():
    assert gmc(benchmark_state('psiC')) == pytest.approx(0.8)


def test_witness_separates_gmc_ties():
    rows = inequivalence_witness()
    assert [r['pair'] for r in rows] == [['psiA', 'psiB'], ['psiC', 'psiD']]
    assert all(row['gmc_tied'] for row in rows)
    assert rows[0]['volume_separates']
    assert rows[0]['volume_gap'] > VOLUME_GAP
    assert rows[0]['volume_order'] == 'psiA'
    # psiC and psiD differ by about 0.0053, inside the separation margin
    assert not rows[1]['volume_separates']
    assert rows[1]['volume_gap'] == pytest.approx(0.0053, abs=2e-4)
    assert rows[1]['volume_order'] == 'psiD'


def test_report_json_is_strict_and_complete(psi_a):
    doc = json.loads(report_to_json(v1234(psi_a)))
    assert doc['state'] == 'psiA'
    assert doc['edges']['dropped_qubit'] == 4
    assert doc['label']['kind'] == 'GenuineME'
    assert set(doc['residuals']) == {'polygon', 'triangle'}
    assert doc['volume'] == pytest.approx(0.125433, abs=1e-6)


def test_infeasible_report_serializes_volume_as_null():
    edges = TetraEdges.from_maps({1: 0.1, 2: 0.1, 3: 0.1},
                                 {frozenset(k): 1.0 for k in ((1, 2), (1, 3), (2, 3))})
    assert json.loads(json.dumps(tetra_report(edges).to_dict(), allow_nan=False))['volume'] is None
