import logging
import math

import numpy as np
import pytest

import slocc_families
from concurrence_engine import concurrence_profile
from slocc_families import (
    AUDIT_COLUMNS, ENTRY_KEYS, FAMILY_ARITY, FamilySpec, FamilySpecError, PSI_D_A2,
    audit_csv, benchmark_state, closed_form_profile, family_state, parse_family_args,
    printed_norm, printed_profile, raw_amplitudes, subfamily_specs,
)
from tetra_geometry import build_edges, lemma_gap, tetra_report, volume_gradient


@pytest.fixture(autouse=True)
def fresh_norm_warnings():
    slocc_families._NORM_WARNED.clear()
    yield
    slocc_families._NORM_WARNED.clear()


@pytest.mark.parametrize('family, params', [
    ('F0', ()), ('F4', ()), ('F2', (1.0,)), ('F6', (1.0, float('nan'))), ('F9', (1, 2, 3)),
])
def test_family_spec_validation(family, params):
    with pytest.raises(FamilySpecError):
        FamilySpec(family, params)


def test_family_spec_label_and_names():
    spec = FamilySpec('F7', (1, 0.5))
    assert spec.named() == {'a': 1.0, 'b': 0.5}
    assert spec.label == 'F7(a=1,b=0.5)'
    assert FamilySpec('F2').label == 'F2'


def test_parse_family_args():
    assert parse_family_args('f4', a=2.0) == FamilySpec('F4', (2.0,))
    with pytest.raises(FamilySpecError):
        parse_family_args('F4')
    with pytest.raises(FamilySpecError):
        parse_family_args('F4', a=1.0, b=2.0)
    with pytest.raises(FamilySpecError):
        parse_family_args('G1')


def test_every_family_builds_a_normalized_state():
    for family, arity in FAMILY_ARITY.items():
        spec = FamilySpec(family, tuple(0.7 + 0.3 * k for k in range(arity)))
        state = family_state(spec)
        assert np.linalg.norm(state.amps) == pytest.approx(1.0)
        assert state.label == spec.label


def test_f5_keeps_imaginary_terms():
    raw = raw_amplitudes(FamilySpec('F5', (1.0,)))
    assert raw[int('0001', 2)] == 1j
    assert raw[int('1011', 2)] == -1j


def test_printed_norm_matches_for_f4():
    spec = FamilySpec('F4', (1.5,))
    assert printed_norm(spec) == pytest.approx(1 / np.linalg.norm(raw_amplitudes(spec)))


def test_f9_normalization_mismatch_warns_once(caplog):
    caplog.set_level(logging.WARNING, logger='slocc_families')
    family_state(FamilySpec('F9', (1.0, 2.0, 2.0, -1.0)))
    family_state(FamilySpec('F9', (0.5, 2.0, 2.0, -0.5)))
    hits = [r for r in caplog.records if 'printed normalization' in r.getMessage()]
    assert len(hits) == 1


def test_benchmarks():
    assert benchmark_state('psiD').label == 'psiD'
    assert PSI_D_A2 == pytest.approx(3.2547, abs=1e-4)
    with pytest.raises(FamilySpecError):
        benchmark_state('psiZ')


def test_psi_c_profile():
    profile = concurrence_profile(benchmark_state('psiC'))
    np.testing.assert_allclose(profile.values(),
                               [0.8] + [2 * math.sqrt(6) / 5] * 3 + [2 * math.sqrt(7) / 5] * 3,
                               atol=1e-12)


def test_psi_d_profile_has_c13_exactly_four_fifths():
    profile = concurrence_profile(benchmark_state('psiD'))
    assert profile.c_two['13|24'] == pytest.approx(0.8, abs=1e-12)
    assert profile.c_one[1] == pytest.approx(0.99805, abs=1e-5)
    assert profile.c_two['12|34'] == pytest.approx(1.15842, abs=1e-5)
    assert profile.c_two['14|23'] == pytest.approx(profile.c_two['12|34'])


@pytest.mark.parametrize('spec', [FamilySpec('F2'), FamilySpec('F4', (0.5,)), FamilySpec('F4', (2.0,))])
def test_audit_agrees(spec):
    audit = closed_form_profile(spec)
    assert audit.agree
    assert audit.disagreements == []
    assert audit.two_vs_two is True


def test_audit_flags_f5_single_qubit_forms(caplog):
    audit = closed_form_profile(FamilySpec('F5', (1.0,)))
    assert audit.flags['c1'] is False
    assert audit.printed['c1'] == pytest.approx(math.sqrt(88) / 7)
    assert audit.engine['c1'] == pytest.approx(math.sqrt(48) / 7)
    assert audit.flags['c13_24'] is True
    assert 'disagree' in caplog.text


def test_audit_f6_agrees_as_multiset_only():
    audit = closed_form_profile(FamilySpec('F6', (0.5, 0.5)))
    assert audit.one_vs_three_multiset is True
    assert audit.two_vs_two is True
    assert audit.flags['c1'] is True
    assert set(audit.disagreements) == {'c2', 'c3'}


def test_audit_f3_places_unit_concurrence_on_qubit_three():
    audit = closed_form_profile(FamilySpec('F3'))
    assert audit.disagreements == ['c2', 'c3']
    assert audit.one_vs_three_multiset is True


def test_printed_profile_has_all_keys():
    for family, arity in FAMILY_ARITY.items():
        printed = printed_profile(FamilySpec(family, (1.0,) * arity))
        assert tuple(printed) == ENTRY_KEYS


def test_f1_prints_single_qubit_entries_only():
    audit = closed_form_profile(FamilySpec('F1'))
    assert audit.flags['c12_34'] is None
    assert audit.two_vs_two is None
    assert audit.agree


def test_audit_csv_layout():
    text = audit_csv([closed_form_profile(FamilySpec('F3'))])
    lines = text.splitlines()
    assert lines[0] == ','.join(AUDIT_COLUMNS)
    assert len(lines) == 1 + len(ENTRY_KEYS)
    assert lines[3].startswith('F3,,c3,1,')
    assert lines[3].endswith(',false')


def test_subfamily_specs():
    assert [s.params for s in subfamily_specs('F9:anti', [1.0, 2.0])] == [
        (1.0, 2.0, 2.0, -1.0), (2.0, 1.0, 1.0, -2.0)]
    assert [s.params for s in subfamily_specs('F8:c0', [0.0, 1.0])] == [
        (0.0, 1.0, 0.0), (1.0, 0.0, 0.0), (1.0, 1.0, 0.0)]
    assert all(s.params[0] == s.params[3] for s in subfamily_specs('F9:a_pm_d', [1.0, 2.0]))
    with pytest.raises(FamilySpecError):
        subfamily_specs('F9:nope', [1.0])


def test_f9_anti_subfamily_is_positive():
    for spec in subfamily_specs('F9:anti', [0.5, 1.0, 2.0]):
        a, b = spec.params[:2]
        profile = concurrence_profile(family_state(spec))
        np.testing.assert_allclose([profile.c_one[q] for q in (1, 2, 3, 4)], [1.0] * 4, atol=1e-12)
        assert profile.c_two['14|23'] == pytest.approx(abs(a * a - b * b) / (a * a + b * b))
        edges = build_edges(profile)
        assert tetra_report(edges).status == 'ok'
        assert lemma_gap(edges).G > 0
    grad = volume_gradient(build_edges(concurrence_profile(
        family_state(FamilySpec('F9', (1.0, 2.0, 2.0, -1.0))))))
    assert min(grad.values()) > 0


def test_f9_equal_parameters_give_two_epr_pairs():
    profile = concurrence_profile(family_state(FamilySpec('F9', (1.0, 1.0, 1.0, 1.0))))
    np.testing.assert_allclose([profile.c_one[q] for q in (1, 2, 3, 4)], [1.0] * 4, atol=1e-12)
    assert profile.c_two['13|24'] < 1e-12
