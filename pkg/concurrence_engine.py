#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
concurrence_engine.py - bipartition concurrences C = sqrt(2 (1 - Tr rho^2)) of
four-qubit pure states, and the polygon / triangle inequality slacks between them.

Profiles are always computed from the state through the partial-trace engine.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from state_core import (
    Bipartition, CutError, ONE_VS_THREE, PureState4, QUBITS, TWO_VS_TWO,
    partial_trace, purity,
)
from tetra_config import TOL

logger = logging.getLogger(__name__)

PAIR_CUTS = tuple(cut.label for cut in TWO_VS_TWO)   # ('12|34', '13|24', '14|23')
ONE_BOUND = 1.0
TWO_BOUND = math.sqrt(1.5)


def pair_cut_label(p, q):
    """Label of the canonical 2|2 cut that puts qubits p and q on the same side."""
    if p == q:
        raise CutError('a pair cut needs two distinct qubits')
    return Bipartition.canonical({p, q}).label


def cut_key(label):
    """'12|34' -> 'c12_34', '1|234' -> 'c1'."""
    left = label.split('|')[0]
    if len(left) == 1:
        return f'c{left}'
    return 'c' + label.replace('|', '_')


@dataclass(frozen=True)
class ConcurrenceProfile:
    c_one: Dict[int, float]
    c_two: Dict[str, float]

    def __post_init__(self):
        if sorted(self.c_one) != list(QUBITS) or sorted(self.c_two) != list(PAIR_CUTS):
            raise CutError('a profile needs the four 1|3 and the three 2|2 concurrences')
        slack = TOL['zero']
        for q, c in self.c_one.items():
            if not (0.0 <= c <= ONE_BOUND + slack):
                raise CutError(f'C_{q} = {c!r} outside [0, 1]')
        for p, c in self.c_two.items():
            if not (0.0 <= c <= TWO_BOUND + slack):
                raise CutError(f'C_{p} = {c!r} outside [0, sqrt(3/2)]')

    def values(self):
        """The seven entries in serialization order c1..c4, c12_34, c13_24, c14_23."""
        return tuple(self.c_one[q] for q in QUBITS) + tuple(self.c_two[p] for p in PAIR_CUTS)

    def pair(self, p, q):
        return self.c_two[pair_cut_label(p, q)]

    @property
    def minimum(self):
        return min(self.values())

    def to_dict(self):
        out = {f'c{q}': self.c_one[q] for q in QUBITS}
        out.update({cut_key(p): self.c_two[p] for p in PAIR_CUTS})
        return out

    @classmethod
    def from_values(cls, values: Sequence[float]):
        vals = [float(v) for v in values]
        return cls(c_one=dict(zip(QUBITS, vals[:4])), c_two=dict(zip(PAIR_CUTS, vals[4:])))


def concurrence_from_reduced(rho):
    """sqrt(2 (1 - Tr rho^2)).

    With Schmidt coefficients available, 1 - Tr rho^2 = 2 sum_{i<j} l_i l_j is
    summed directly from the Schmidt spectrum.
    """
    if rho.schmidt is None:
        return math.sqrt(max(0.0, 2.0 * (1.0 - purity(rho))))
    lam = np.asarray(rho.schmidt, dtype=float) ** 2
    lam = lam / lam.sum()
    cross = float(np.triu(np.outer(lam, lam), 1).sum())
    return math.sqrt(max(0.0, 4.0 * cross))


def bipartition_concurrence(state: PureState4, cut: Bipartition):
    return concurrence_from_reduced(partial_trace(state, cut))


def concurrence_profile(state: PureState4):
    c_one = {next(iter(cut.keep)): bipartition_concurrence(state, cut) for cut in ONE_VS_THREE}
    c_two = {cut.label: bipartition_concurrence(state, cut) for cut in TWO_VS_TWO}
    return ConcurrenceProfile(c_one=c_one, c_two=c_two)


def profile_to_json(profile: ConcurrenceProfile):
    return profile.to_dict()


def permute_profile(profile: ConcurrenceProfile, perm: Sequence[int]):
    """Profile of permute_qubits(state, perm) predicted from the profile of state."""
    c_one = {k: profile.c_one[perm[k - 1]] for k in QUBITS}
    c_two = {}
    for label in PAIR_CUTS:
        q = int(label[1])
        c_two[label] = profile.pair(perm[0], perm[q - 1])
    return ConcurrenceProfile(c_one=c_one, c_two=c_two)


@dataclass(frozen=True)
class ResidualReport:
    """Signed slacks: polygon s_i = sum_{k != i} C_k - C_i, triangle t_p = other two - C_p."""
    polygon: Dict[int, float]
    triangle: Dict[str, float]

    def violations(self, tol=None) -> List[Tuple[str, str, float]]:
        tol = TOL['slack'] if tol is None else tol
        out = [('polygon', f'C{q}', s) for q, s in self.polygon.items() if s < -tol]
        out += [('triangle', p, t) for p, t in self.triangle.items() if t < -tol]
        return out

    @property
    def min_polygon(self):
        return min(self.polygon.values())

    @property
    def min_triangle(self):
        return min(self.triangle.values())

    def to_dict(self):
        return {
            'polygon': {f'c{q}': s for q, s in self.polygon.items()},
            'triangle': {cut_key(p): t for p, t in self.triangle.items()},
        }


def inequality_residuals(profile: ConcurrenceProfile):
    total_one = sum(profile.c_one.values())
    polygon = {q: (total_one - c) - c for q, c in profile.c_one.items()}
    total_two = sum(profile.c_two.values())
    triangle = {p: (total_two - c) - c for p, c in profile.c_two.items()}
    return ResidualReport(polygon=polygon, triangle=triangle)


def _batch_purity(tensors, keep):
    rest = [q for q in range(4) if q not in keep]
    n = tensors.shape[0]
    dk = 2 ** len(keep)
    m = tensors.transpose([0] + [q + 1 for q in keep] + [q + 1 for q in rest]).reshape(n, dk, -1)
    rho = m @ np.conj(m).transpose(0, 2, 1)
    return np.sum(np.abs(rho) ** 2, axis=(1, 2))


def profile_arrays(amps):
    """Vectorised profiles for an (n, 16) array of normalized states.

    Returns (c_one, c_two) with shapes (n, 4) and (n, 3); columns follow
    QUBITS and PAIR_CUTS.
    """
    amps = np.asarray(amps, dtype=np.complex128)
    tensors = amps.reshape((-1, 2, 2, 2, 2))
    one = [_batch_purity(tensors, [q - 1]) for q in QUBITS]
    two = [_batch_purity(tensors, sorted(q - 1 for q in cut.keep)) for cut in TWO_VS_TWO]
    c_one = np.sqrt(np.maximum(0.0, 2.0 * (1.0 - np.stack(one, axis=1))))
    c_two = np.sqrt(np.maximum(0.0, 2.0 * (1.0 - np.stack(two, axis=1))))
    return c_one, c_two
