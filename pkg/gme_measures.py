#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
gme_measures.py - the tetrahedron volume V1234, the genuinely multipartite
concurrence (GMC) and the separability classifier built on the seven
bipartition concurrences.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from concurrence_engine import (
    ConcurrenceProfile, PAIR_CUTS, concurrence_profile, cut_key, inequality_residuals,
)
from state_core import (
    Bipartition, PureState4, QUBITS, TetraGmeError, partial_trace,
)
from tetra_config import TOL
from tetra_geometry import TetraEdges, TetraReport, build_edges, tetra_report

logger = logging.getLogger(__name__)

MAX_EPS = 1e-3
GMC_TIE = 1e-6
VOLUME_GAP = 1e-2


class ThresholdError(TetraGmeError):
    pass


class ClassKind(Enum):
    GENUINE = 'GenuineME'
    ONE_VS_THREE = 'OneVsThreeProduct'
    TWO_TWO = 'TwoTwoBiseparable'
    EPR_PAIRS = 'TwoEprPairs'
    FULLY_SEPARABLE = 'FullySeparable'


@dataclass(frozen=True)
class ClassLabel:
    """Classifier verdict plus the concurrences / slacks that triggered it.

    `qubit` is set for OneVsThreeProduct, `partition` for the two 2|2 kinds, and
    `residual` names the class of the remaining three qubits (GHZ, W, biseparable)
    when one qubit factors out.
    """
    kind: ClassKind
    qubit: Optional[int] = None
    partition: Optional[str] = None
    witnesses: Tuple[Tuple[str, float], ...] = ()
    residual: Optional[str] = None

    @property
    def is_gme(self):
        return self.kind is ClassKind.GENUINE

    def __str__(self):
        if self.qubit is not None:
            return f'{self.kind.value}({self.qubit})'
        if self.partition is not None:
            return f'{self.kind.value}({self.partition})'
        return self.kind.value

    def to_dict(self):
        out = {'kind': self.kind.value, 'text': str(self)}
        if self.qubit is not None:
            out['qubit'] = self.qubit
        if self.partition is not None:
            out['partition'] = self.partition
        if self.residual is not None:
            out['residual'] = self.residual
        out['witnesses'] = {k: v for k, v in self.witnesses}
        return out


@dataclass(frozen=True)
class MeasureReport:
    profile: ConcurrenceProfile
    edges: TetraEdges
    tetra: TetraReport
    gmc: float
    label: ClassLabel
    perimeter: float = 0.0
    shortest_edge: float = 0.0
    state_label: Optional[str] = field(default=None, compare=False)

    @property
    def volume(self):
        return self.tetra.volume

    def to_dict(self):
        out = {}
        if self.state_label is not None:
            out['state'] = self.state_label
        out.update({
            'profile': self.profile.to_dict(),
            'residuals': inequality_residuals(self.profile).to_dict(),
            'edges': self.edges.to_dict(),
            'tetra': self.tetra.to_dict(),
            'volume': self.tetra.to_dict()['volume'],
            'gmc': self.gmc,
            'perimeter': self.perimeter,
            'shortest_edge': self.shortest_edge,
            'label': self.label.to_dict(),
        })
        return out


def report_to_json(report: MeasureReport, indent=2):
    return json.dumps(report.to_dict(), indent=indent, allow_nan=False)


def _check_eps(eps):
    eps = TOL['zero'] if eps is None else eps
    if not (0.0 < eps <= MAX_EPS):
        raise ThresholdError(f'eps must lie in (0, {MAX_EPS}], got {eps!r}')
    return eps


def three_tangle(amps):
    """Three-tangle 4|d1 - 2 d2 + 4 d3| of a normalized three-qubit state (8 amplitudes)."""
    a = np.asarray(amps, dtype=np.complex128).reshape(2, 2, 2)
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return float(4.0 * abs(d1 - 2.0 * d2 + 4.0 * d3))


def _residual_state(state: PureState4, qubit):
    """Project the factored qubit onto its dominant marginal eigenvector."""
    rho = partial_trace(state, Bipartition.of(qubit)).entries
    _, vecs = np.linalg.eigh(rho)
    phi = vecs[:, -1]
    t = np.moveaxis(state.tensor(), qubit - 1, 0)
    rest = np.tensordot(np.conj(phi), t, axes=([0], [0])).reshape(-1)
    return rest / np.linalg.norm(rest)


def residual_class(state: PureState4, qubit, eps=None):
    """'GHZ', 'W' or 'biseparable' for the three qubits left after `qubit` factors out."""
    eps = _check_eps(eps)
    rest = _residual_state(state, qubit)
    t = rest.reshape(2, 2, 2)
    for k in range(3):
        s = np.linalg.svd(np.moveaxis(t, k, 0).reshape(2, 4), compute_uv=False)
        lam = s ** 2 / np.sum(s ** 2)
        if 2.0 * np.sqrt(lam[0] * lam[1]) <= eps:
            return 'biseparable'
    return 'GHZ' if three_tangle(rest) > eps else 'W'


def _sides(p):
    return tuple(tuple(int(ch) for ch in half) for half in p.split('|'))


def classify_profile(profile: ConcurrenceProfile, eps=None, state: Optional[PureState4] = None):
    """Classifier on a precomputed profile; `state` is needed only for the residual label."""
    eps = _check_eps(eps)
    if all(c <= eps for c in profile.values()):
        return ClassLabel(ClassKind.FULLY_SEPARABLE,
                          witnesses=tuple((k, v) for k, v in profile.to_dict().items()))

    zeros = [q for q in QUBITS if profile.c_one[q] <= eps]
    if len(zeros) == 1:
        q = zeros[0]
        residual = residual_class(state, q, eps) if state is not None else None
        return ClassLabel(ClassKind.ONE_VS_THREE, qubit=q, residual=residual,
                          witnesses=((f'c{q}', profile.c_one[q]),))

    for p in PAIR_CUTS:
        if profile.c_two[p] > eps:
            continue
        if zeros and not any(all(profile.c_one[q] > eps for q in side) for side in _sides(p)):
            continue
        witnesses = tuple((f'c{z}', profile.c_one[z]) for z in zeros)
        return ClassLabel(ClassKind.EPR_PAIRS, partition=p,
                          witnesses=witnesses + ((cut_key(p), profile.c_two[p]),))

    triangle = inequality_residuals(profile).triangle
    for p in PAIR_CUTS:
        if triangle[p] <= eps:
            return ClassLabel(ClassKind.TWO_TWO, partition=p,
                              witnesses=((f'slack_{cut_key(p)}', triangle[p]),))

    return ClassLabel(ClassKind.GENUINE, witnesses=(('gmc', profile.minimum),))


def classify(state: PureState4, eps=None):
    return classify_profile(concurrence_profile(state), eps, state=state)


def gmc(state: PureState4):
    """Minimum of the seven bipartition concurrences."""
    return concurrence_profile(state).minimum


def v1234(state: PureState4, eps_zero=None):
    """profile -> edges -> tetrahedron; the report carries every intermediate."""
    eps_zero = _check_eps(eps_zero)
    profile = concurrence_profile(state)
    edges = build_edges(profile)
    tetra = tetra_report(edges, eps_zero)
    if tetra.status == 'infeasible':
        logger.warning('physical state %s produced an unrealizable tetrahedron', state.label or '<unnamed>')
    label = classify_profile(profile, eps_zero, state=state)
    lengths = edges.edge_vector()
    return MeasureReport(
        profile=profile, edges=edges, tetra=tetra, gmc=profile.minimum, label=label,
        perimeter=float(sum(lengths)), shortest_edge=float(min(lengths)),
        state_label=state.label,
    )


def inequivalence_witness(eps_zero=None):
    """Pairs that GMC cannot tell apart while the volume can.

    Returns one record per pair with both measures and the two orderings.
    """
    from slocc_families import benchmark_state

    rows = []
    for first, second in (('psiA', 'psiB'), ('psiC', 'psiD')):
        ra = v1234(benchmark_state(first), eps_zero)
        rb = v1234(benchmark_state(second), eps_zero)
        gmc_gap = abs(ra.gmc - rb.gmc)
        vol_gap = abs(ra.volume - rb.volume)
        rows.append({
            'pair': [first, second],
            'gmc': [ra.gmc, rb.gmc],
            'volume': [ra.volume, rb.volume],
            'gmc_tied': gmc_gap < GMC_TIE,
            'volume_gap': vol_gap,
            'volume_separates': vol_gap > VOLUME_GAP,
            'volume_order': first if ra.volume > rb.volume else second,
        })
    return rows
