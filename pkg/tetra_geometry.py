#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
tetra_geometry.py - the concurrence tetrahedron.

The apex edges are the three smallest one-vs-three concurrences (the qubit with
the largest C_i is dropped). The base triangle has a vertex per kept qubit, and
the base edge between kept qubits p and q is the concurrence of the 2|2 cut
{p,q}|{rest}. Volume comes from the Cayley-Menger determinant; the closed form
(1/12) sqrt(4u^2v^2w^2 - u^2D^2 - v^2E^2 - w^2F^2 + DEF) is kept as an oracle,
with D, E, F following the feet of the apex edges rather than their sort order.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, NamedTuple, Tuple

import numpy as np

from concurrence_engine import ConcurrenceProfile, PAIR_CUTS, pair_cut_label
from state_core import QUBITS, TetraGmeError
from tetra_config import CONFIG, TOL

logger = logging.getLogger(__name__)

GRADIENT_NAMES = ('u', 'v', 'w', 'C_vw', 'C_uw', 'C_uv')


class DegenerateBaseError(TetraGmeError):
    def __init__(self, message, slack):
        super().__init__(message)
        self.slack = slack


class InfeasibleEdgesError(TetraGmeError):
    def __init__(self, message, value):
        super().__init__(message)
        self.value = value


@dataclass(frozen=True)
class TetraEdges:
    """apex: ((qubit, length), ...) sorted so that u <= v <= w; base keyed by kept pairs."""
    apex: Tuple[Tuple[int, float], ...]
    dropped_qubit: int
    base: Dict[FrozenSet[int], float]

    def __post_init__(self):
        lengths = [length for _, length in self.apex]
        if len(self.apex) != 3 or lengths != sorted(lengths):
            raise ValueError('apex must hold three edges sorted ascending')
        kept = {q for q, _ in self.apex}
        if self.dropped_qubit in kept or kept | {self.dropped_qubit} != set(QUBITS):
            raise ValueError('apex qubits and dropped qubit must partition {1,2,3,4}')
        if len(self.base) != 3 or any(len(k) != 2 or not k <= kept for k in self.base):
            raise ValueError('base must hold the three pairs of kept qubits')
        for length in lengths + list(self.base.values()):
            if not (math.isfinite(length) and length >= 0.0):
                raise ValueError(f'edge length {length!r} must be finite and nonnegative')

    @property
    def kept(self):
        return tuple(sorted(q for q, _ in self.apex))

    @property
    def u(self):
        return self.apex[0][1]

    @property
    def v(self):
        return self.apex[1][1]

    @property
    def w(self):
        return self.apex[2][1]

    def apex_length(self, q):
        for label, length in self.apex:
            if label == q:
                return length
        raise KeyError(q)

    def base_length(self, p, q):
        return self.base[frozenset((p, q))]

    def base_cut(self, p, q):
        """The 2|2 cut whose concurrence is the base edge p-q."""
        return pair_cut_label(p, q)

    def edge_vector(self):
        """Six lengths in label order: apex at k0, k1, k2, then base k0k1, k0k2, k1k2."""
        k0, k1, k2 = self.kept
        return (self.apex_length(k0), self.apex_length(k1), self.apex_length(k2),
                self.base_length(k0, k1), self.base_length(k0, k2), self.base_length(k1, k2))

    @classmethod
    def from_maps(cls, apex: Dict[int, float], base: Dict[FrozenSet[int], float]):
        dropped = (set(QUBITS) - set(apex)).pop()
        ordered = tuple(sorted(((q, float(x)) for q, x in apex.items()), key=lambda t: (t[1], t[0])))
        return cls(apex=ordered, dropped_qubit=dropped,
                   base={frozenset(k): float(x) for k, x in base.items()})

    def with_edge_vector(self, vec):
        k0, k1, k2 = self.kept
        apex = {k0: vec[0], k1: vec[1], k2: vec[2]}
        base = {frozenset((k0, k1)): vec[3], frozenset((k0, k2)): vec[4], frozenset((k1, k2)): vec[5]}
        return TetraEdges.from_maps(apex, base)

    def scaled(self, factor):
        return self.with_edge_vector([factor * x for x in self.edge_vector()])

    def to_dict(self):
        return {
            'dropped_qubit': self.dropped_qubit,
            'apex': [{'qubit': q, 'length': x} for q, x in self.apex],
            'base': [
                {'qubits': sorted(k), 'cut': pair_cut_label(*sorted(k)), 'length': x}
                for k, x in sorted(self.base.items(), key=lambda kv: sorted(kv[0]))
            ],
        }


def build_edges(profile: ConcurrenceProfile, tie=None):
    """Drop the qubit with the largest C_i (largest label among ties) and assemble the edges."""
    tie = TOL['tie'] if tie is None else tie
    cmax = max(profile.c_one.values())
    maxima = [q for q, c in profile.c_one.items() if c >= cmax - tie]
    dropped = max(maxima)
    kept = [q for q in QUBITS if q != dropped]
    apex = {q: profile.c_one[q] for q in kept}
    base = {frozenset((p, q)): profile.pair(p, q)
            for i, p in enumerate(kept) for q in kept[i + 1:]}
    return TetraEdges.from_maps(apex, base)


class LemmaGap(NamedTuple):
    H: float
    p_semi: float
    R: float
    G: float


def _base_sides(edges: TetraEdges):
    k0, k1, k2 = edges.kept
    return edges.base_length(k0, k1), edges.base_length(k0, k2), edges.base_length(k1, k2)


def base_slacks(edges: TetraEdges):
    a, b, c = _base_sides(edges)
    return (b + c - a, a + c - b, a + b - c)


def lemma_gap(edges: TetraEdges):
    """H = u + v + w, p = base semiperimeter, R = base circumradius, G = H - 3R."""
    a, b, c = _base_sides(edges)
    p = 0.5 * (a + b + c)
    heron = p * (p - a) * (p - b) * (p - c)
    if heron <= TOL['heron']:
        raise DegenerateBaseError(
            f'base triangle ({a:.6g}, {b:.6g}, {c:.6g}) is degenerate', min(base_slacks(edges)))
    R = a * b * c / (4.0 * math.sqrt(heron))
    H = edges.u + edges.v + edges.w
    return LemmaGap(H=H, p_semi=p, R=R, G=H - 3.0 * R)


def _radicand(apex, base):
    """144 V^2 from apex lengths {q: x} and base lengths {frozenset: x}."""
    (qu, u), (qv, v), (qw, w) = apex
    D = v * v + w * w - base[frozenset((qv, qw))] ** 2
    E = u * u + w * w - base[frozenset((qu, qw))] ** 2
    F = u * u + v * v - base[frozenset((qu, qv))] ** 2
    rad = 4.0 * u * u * v * v * w * w - u * u * D * D - v * v * E * E - w * w * F * F + D * E * F
    return D, E, F, rad


def volume_terms(edges: TetraEdges):
    """(D, E, F, radicand) of the closed-form volume."""
    return _radicand(edges.apex, edges.base)


def closed_form_volume(edges: TetraEdges):
    *_, rad = volume_terms(edges)
    if rad < -TOL['radicand']:
        raise InfeasibleEdgesError(f'closed-form radicand {rad!r} is negative', rad)
    return math.sqrt(max(0.0, rad)) / 12.0


def _cm_matrix(edges: TetraEdges):
    verts = edges.kept
    m = np.ones((5, 5))
    m[0, 0] = 0.0
    m[1, 1] = 0.0
    for i, q in enumerate(verts, start=2):
        m[1, i] = m[i, 1] = edges.apex_length(q) ** 2
        m[i, i] = 0.0
    for i, p in enumerate(verts, start=2):
        for j, q in enumerate(verts, start=2):
            if i < j:
                m[i, j] = m[j, i] = edges.base_length(p, q) ** 2
    return m


def cayley_menger_det(edges: TetraEdges):
    return float(np.linalg.det(_cm_matrix(edges)))


def cm_volume(edges: TetraEdges):
    """(cm_det, volume); vertex 0 is the apex, 1-3 the kept qubits in label order."""
    det = cayley_menger_det(edges)
    if det < -TOL['radicand']:
        raise InfeasibleEdgesError(f'Cayley-Menger determinant {det!r} is negative', det)
    return det, math.sqrt(max(0.0, det) / 288.0)


@dataclass(frozen=True)
class TetraReport:
    H: float
    p_semi: float
    R: float
    G: float
    D: float
    E: float
    F: float
    cm_det: float
    feasible: bool
    volume: float
    status: str = 'ok'
    oracle_gap: float = 0.0

    def to_dict(self):
        def num(x):
            return None if isinstance(x, float) and not math.isfinite(x) else x
        return {
            'H': num(self.H), 'p': num(self.p_semi), 'R': num(self.R), 'G': num(self.G),
            'D': num(self.D), 'E': num(self.E), 'F': num(self.F),
            'cm_det': num(self.cm_det), 'feasible': self.feasible, 'volume': num(self.volume),
            'status': self.status,
        }


def tetra_report(edges: TetraEdges, eps_zero=None):
    """Assemble every intermediate; status is ok, degenerate or infeasible."""
    eps_zero = TOL['zero'] if eps_zero is None else eps_zero
    p_semi = 0.5 * sum(_base_sides(edges))
    H = edges.u + edges.v + edges.w
    try:
        gap = lemma_gap(edges)
        R, G = gap.R, gap.G
        base_degenerate = False
    except DegenerateBaseError:
        R = G = float('nan')
        base_degenerate = True
    D, E, F, rad = volume_terms(edges)
    det = cayley_menger_det(edges)
    feasible = min(base_slacks(edges)) >= -TOL['slack'] and det >= -TOL['radicand']
    common = dict(H=H, p_semi=p_semi, R=R, G=G, D=D, E=E, F=F, cm_det=det, feasible=feasible)

    if not feasible:
        logger.warning('unrealizable edge set (cm_det=%.3e)', det)
        return TetraReport(volume=float('nan'), status='infeasible', **common)
    if edges.u <= eps_zero or base_degenerate:
        return TetraReport(volume=0.0, status='degenerate', **common)

    volume = math.sqrt(max(0.0, det) / 288.0)
    closed = math.sqrt(max(0.0, rad)) / 12.0
    oracle_gap = abs(closed - volume)
    if oracle_gap > TOL['oracle']:
        logger.warning('closed-form and Cayley-Menger volumes differ by %.3e', oracle_gap)
    return TetraReport(volume=volume, status='ok', oracle_gap=oracle_gap, **common)


def volume_gradient(edges: TetraEdges, rel_step=None):
    """Central differences of the closed-form volume in each edge, others fixed.

    Keys: u, v, w (sorted apex edges) and C_vw, C_uw, C_uv (the base edge joining
    the feet of the named apex edges).
    """
    rel_step = CONFIG['gradient']['relative_step'] if rel_step is None else rel_step
    if edges.u <= TOL['zero']:
        raise DegenerateBaseError('apex edge u is zero; volume is not differentiable there', edges.u)
    lemma_gap(edges)

    (qu, _), (qv, _), (qw, _) = edges.apex
    apex = {q: x for q, x in edges.apex}
    base = dict(edges.base)
    slots = [('apex', qu), ('apex', qv), ('apex', qw),
             ('base', frozenset((qv, qw))), ('base', frozenset((qu, qw))), ('base', frozenset((qu, qv)))]

    def volume_at(kind, key, delta):
        a = dict(apex)
        b = dict(base)
        if kind == 'apex':
            a[key] += delta
        else:
            b[key] += delta
        *_, rad = _radicand(tuple(a.items()), b)
        if rad < -TOL['radicand']:
            raise InfeasibleEdgesError('stencil point leaves the realizable region', rad)
        return math.sqrt(max(0.0, rad)) / 12.0

    grad = {}
    for name, (kind, key) in zip(GRADIENT_NAMES, slots):
        x = apex[key] if kind == 'apex' else base[key]
        h = rel_step * max(1.0, x)
        grad[name] = (volume_at(kind, key, h) - volume_at(kind, key, -h)) / (2.0 * h)
    return grad


def edges_from_points(points, dropped_qubit=4):
    """Edges of the tetrahedron on four points; row 0 is the apex, rows 1-3 the kept qubits."""
    pts = np.asarray(points, dtype=float)
    kept = [q for q in QUBITS if q != dropped_qubit]
    apex = {q: float(np.linalg.norm(pts[i + 1] - pts[0])) for i, q in enumerate(kept)}
    base = {}
    for i, p in enumerate(kept):
        for j in range(i + 1, 3):
            base[frozenset((p, kept[j]))] = float(np.linalg.norm(pts[i + 1] - pts[j + 1]))
    return TetraEdges.from_maps(apex, base)


# 0-based qubit pair -> column of the (n, 3) two-vs-two array (PAIR_CUTS order)
_PAIR_COL = np.zeros((4, 4), dtype=int)
for _col, _label in enumerate(PAIR_CUTS):
    _left = [int(ch) - 1 for ch in _label.split('|')[0]]
    _right = [int(ch) - 1 for ch in _label.split('|')[1]]
    for _side in (_left, _right):
        _PAIR_COL[_side[0], _side[1]] = _PAIR_COL[_side[1], _side[0]] = _col
_KEPT = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])


def batch_volumes(c_one, c_two, tie=None):
    """Vectorised tetrahedra for (n, 4) / (n, 3) concurrence arrays.

    Returns a dict of arrays: dropped (1-based), apex (n, 3), base (n, 3) in
    k0k1, k0k2, k1k2 order, cm_det, radicand, volume, H, R, G, base_slack.
    """
    tie = TOL['tie'] if tie is None else tie
    c_one = np.asarray(c_one, dtype=float)
    c_two = np.asarray(c_two, dtype=float)
    n = c_one.shape[0]
    rows = np.arange(n)

    mask = c_one >= c_one.max(axis=1, keepdims=True) - tie
    dropped = 3 - np.argmax(mask[:, ::-1], axis=1)
    kept = _KEPT[dropped]
    apex = np.take_along_axis(c_one, kept, axis=1)
    k0, k1, k2 = kept[:, 0], kept[:, 1], kept[:, 2]
    base = np.stack([c_two[rows, _PAIR_COL[k0, k1]],
                     c_two[rows, _PAIR_COL[k0, k2]],
                     c_two[rows, _PAIR_COL[k1, k2]]], axis=1)

    a2 = apex ** 2
    b2 = base ** 2
    cm = np.ones((n, 5, 5))
    cm[:, 0, 0] = 0.0
    cm[:, 1, 1] = 0.0
    cm[:, 1, 2:] = a2
    cm[:, 2:, 1] = a2
    for i in range(3):
        cm[:, i + 2, i + 2] = 0.0
    cm[:, 2, 3] = cm[:, 3, 2] = b2[:, 0]
    cm[:, 2, 4] = cm[:, 4, 2] = b2[:, 1]
    cm[:, 3, 4] = cm[:, 4, 3] = b2[:, 2]
    det = np.linalg.det(cm)

    D = a2[:, 1] + a2[:, 2] - b2[:, 2]
    E = a2[:, 0] + a2[:, 2] - b2[:, 1]
    F = a2[:, 0] + a2[:, 1] - b2[:, 0]
    rad = (4.0 * a2[:, 0] * a2[:, 1] * a2[:, 2] - a2[:, 0] * D ** 2 - a2[:, 1] * E ** 2
           - a2[:, 2] * F ** 2 + D * E * F)

    p = 0.5 * base.sum(axis=1)
    heron = p * (p - base[:, 0]) * (p - base[:, 1]) * (p - base[:, 2])
    with np.errstate(divide='ignore', invalid='ignore'):
        R = np.where(heron > TOL['heron'],
                     base.prod(axis=1) / (4.0 * np.sqrt(np.abs(heron))), np.nan)
    H = apex.sum(axis=1)
    slack = np.stack([base[:, 1] + base[:, 2] - base[:, 0],
                      base[:, 0] + base[:, 2] - base[:, 1],
                      base[:, 0] + base[:, 1] - base[:, 2]], axis=1).min(axis=1)
    return {
        'dropped': dropped + 1,
        'apex': apex,
        'base': base,
        'cm_det': det,
        'radicand': rad,
        'volume': np.sqrt(np.maximum(0.0, det) / 288.0),
        'H': H,
        'R': R,
        'G': H - 3.0 * R,
        'base_slack': slack,
    }
