#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
discrepancy_ledger.py - printed values that the direct partial-trace engine does
not reproduce. Static entries are known in advance; `record()` adds findings
made at runtime (selftest, sweeps) and logs them at WARNING.

The ledger version is what `tetra_gme.py --version` prints; bump it whenever an
entry is added, removed or reworded.
"""

import logging
import threading
from dataclasses import asdict, dataclass
from typing import List, Optional

logger = logging.getLogger(__name__)

LEDGER_VERSION = '1.3.0'


@dataclass(frozen=True)
class Discrepancy:
    key: str
    subject: str
    printed: str
    engine: str
    note: str = ''
    delta: Optional[float] = None


LEDGER = (
    Discrepancy(
        'psiB-profile', 'one-vs-three concurrences of psiB (family F3)',
        'C3 = 1, C1 = C2 = C4 = sqrt3/2', 'C2 = 1, C1 = C3 = C4 = sqrt3/2',
        'qubit 2 splits the support into disjoint halves; the tetrahedron drops qubit 2'),
    Discrepancy(
        'psiB-gap', 'G = H - 3R for psiB', '0.92298', '0.789008',
        'apex edges all sqrt3/2 and base (sqrt5/2, 1, 1) give 0.789008 directly', 0.92298 - 0.789008),
    Discrepancy(
        'psiA-gradient-labels', 'base-edge partials of V at psiA', '{0.0389, 0.0542, 0.0387}',
        '{0.05416, 0.03869, 0.03869}',
        'equal as a multiset at printed rounding; the two 0.0387 edges are symmetric'),
    Discrepancy(
        'F5-closed-forms', 'F5 concurrences at a = 1', 'C1 = sqrt88/7 = 1.3401 (above 1)',
        'C1 = sqrt48/7 = 0.98974; C1 = C2 = C3 = C4 = 2 sqrt((2a^2+2)(2a^2+1))/(4a^2+3)',
        'only C13 = sqrt(8(6a^2+1))/(4a^2+3) matches the engine', 1.3401 - 0.98974),
    Discrepancy(
        'psiD-volume', 'V1234(psiD)', '0.1624', '0.11370',
        'psiD still has the larger volume of the (psiC, psiD) pair, but the gap to psiC is '
        'about 0.0053, below the 1e-2 separation margin; gmc of both is 0.8', 0.1624 - 0.11370),
    Discrepancy(
        'F6-profile', 'F6 one-vs-three concurrences', 'C1 = C2 < C3 = C4 = 1',
        'C1 = C3 < C2 = C4 = 1', 'the multiset and every 2|2 entry agree'),
    Discrepancy(
        'F6-gap-origin', 'G > 0 on F6 away from a = b = 0', 'G > 0',
        'G < 0 near the origin, e.g. a = b = 0.1',
        'the tetrahedron is still realizable there (Cayley-Menger determinant > 0)'),
    Discrepancy(
        'F6-gradient', 'dV/dC >= 0 on F6', 'all partials >= 0',
        'dV/dC13 < 0 at a = 1, b = 0.1 (about -0.0026)', 'positive on the 0.25-step grid'),
    Discrepancy(
        'F7-closed-forms', 'F7 one-vs-three concurrences', 'sqrt56/5 at a = 1, b = 0 (above 1)',
        'C1 = 0.8 at a = 1, b = 0', 'G and the gradient are computed from engine edges'),
    Discrepancy(
        'F7-gradient', 'dV/dC >= 0 on F7', 'all partials >= 0',
        'dV/dC_uv < 0 at a = 1, b = 0 (about -0.0028); 41 negative points on the 0.25-step grid',
        'G stays positive on the same grid (min about 0.796)'),
    Discrepancy(
        'F8-gradient', 'dV/dC >= 0 on F8 with c = 0', 'all partials >= 0',
        'dV/dC12 < 0 at a = 0.5, b = 0 (about -0.0116)', 'G stays positive on the c = 0 grid'),
    Discrepancy(
        'F9-normalization', 'normalization constant of F9',
        '1/sqrt(a^2 + ab + 3b^2/2 + c^2 - ad + d^2/2)', '1/sqrt(a^2 + b^2 + c^2 + d^2)',
        'states are renormalized numerically'),
    Discrepancy(
        'F9-epr', 'F9 at a = b = c = d', 'u = v = w = 0',
        'every C_i = 1, C13|24 = 0: EPR(1,3) x EPR(2,4)',
        'volume is still 0 because two base vertices coincide'),
    Discrepancy(
        'gap-criterion', 'H > 3R as the tetrahedron existence test', 'necessary and sufficient',
        'heuristic', 'realizability is decided by the Cayley-Menger determinant'),
)

_lock = threading.Lock()
_runtime: List[Discrepancy] = []


def record(key, subject, printed, engine, note='', delta=None):
    """Add a runtime finding (ignored if the same key was already recorded)."""
    entry = Discrepancy(key, subject, str(printed), str(engine), note, delta)
    with _lock:
        if any(e.key == key for e in _runtime):
            return entry
        _runtime.append(entry)
    logger.warning('ledger: %s: printed %s, engine %s', subject, printed, engine)
    return entry


def entries():
    with _lock:
        return list(LEDGER) + list(_runtime)


def clear_runtime():
    with _lock:
        _runtime.clear()


def ledger_dict():
    return {'version': LEDGER_VERSION, 'entries': [asdict(e) for e in entries()]}
