#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
slocc_families.py - representative states of the nine four-qubit SLOCC families,
the printed closed-form concurrences for each (kept only as audit data), and the
named comparison states psiA..psiD.

Families are F1..F9 with 0,0,0,1,1,2,2,3,4 real parameters:

    F1  |0000> + |0111>
    F2  |0000> + |1011> + |1101> + |1110>
    F3  |0000> + |0101> + |1000> + |1110>
    F4  a(|0000>+|1111>) + |0011> + |0101> + |0110>
    F5  a(|0000>+|0101>+|1010>+|1111>) + i|0001> + |0110> - i|1011>
    F6  a(|0000>+|1111>) + b(|0101>+|1010>) + |0110> + |0011>
    F7  a(|0000>+|1111>) + (a+b)/2 (|0101>+|1010>) + (a-b)/2 (|0110>+|1001>)
        + i/sqrt2 (|0001>+|0010>+|0111>+|1011>)
    F8  (a+b)/2 (|0000>+|1111>) + (a-b)/2 (|0011>+|1100>) + c(|0101>+|1010>) + |0110>
    F9  (a+d)/2 (|0000>+|1111>) + (a-d)/2 (|0011>+|1100>)
        + (b+c)/2 (|0101>+|1010>) + (b-c)/2 (|0110>+|1001>)

The engine (direct partial trace) is the ground truth; the closed forms are
evaluated verbatim and compared entry by entry, never reconciled.
"""

import csv
import io
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from concurrence_engine import PAIR_CUTS, concurrence_profile, cut_key
from state_core import DIM, PureState4, StateFormatError, TetraGmeError, QUBITS

logger = logging.getLogger(__name__)

FAMILY_ARITY = {
    'F1': 0, 'F2': 0, 'F3': 0, 'F4': 1, 'F5': 1,
    'F6': 2, 'F7': 2, 'F8': 3, 'F9': 4,
}
PARAM_NAMES = ('a', 'b', 'c', 'd')
ENTRY_KEYS = tuple(f'c{q}' for q in QUBITS) + tuple(cut_key(p) for p in PAIR_CUTS)
AUDIT_TOL = 1e-9

PSI_D_A2 = (51.0 + 5.0 * math.sqrt(113.0)) / 32.0
BENCHMARKS = ('psiA', 'psiB', 'psiC', 'psiD', 'ghz4')

_NORM_WARNED = set()


class FamilySpecError(TetraGmeError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILY_ARITY:
            raise FamilySpecError(f'unknown family {self.family!r}; expected one of F1..F9')
        params = tuple(float(p) for p in self.params)
        if len(params) != FAMILY_ARITY[self.family]:
            raise FamilySpecError(
                f'{self.family} takes {FAMILY_ARITY[self.family]} parameters, got {len(params)}')
        if not all(math.isfinite(p) for p in params):
            raise FamilySpecError('family parameters must be finite')
        object.__setattr__(self, 'params', params)

    def named(self):
        return dict(zip(PARAM_NAMES, self.params))

    @property
    def label(self):
        if not self.params:
            return self.family
        inner = ','.join(f'{k}={v:g}' for k, v in self.named().items())
        return f'{self.family}({inner})'


def parse_family_args(family, a=None, b=None, c=None, d=None):
    """Build a FamilySpec from optional CLI values; unused parameters must be absent."""
    family = (family or '').upper()
    if family not in FAMILY_ARITY:
        raise FamilySpecError(f'unknown family {family!r}; expected one of F1..F9')
    given = [a, b, c, d]
    n = FAMILY_ARITY[family]
    if any(v is None for v in given[:n]):
        raise FamilySpecError(f'{family} needs parameters {", ".join(PARAM_NAMES[:n])}')
    if any(v is not None for v in given[n:]):
        raise FamilySpecError(f'{family} takes only {n} parameter(s)')
    return FamilySpec(family, tuple(given[:n]))


def _ket(terms):
    vec = np.zeros(DIM, dtype=np.complex128)
    for bits, amp in terms:
        vec[int(bits, 2)] += amp
    return vec


def raw_amplitudes(spec: FamilySpec):
    """Unnormalized amplitudes exactly as the representative ket is written."""
    f = spec.family
    p = spec.params
    if f == 'F1':
        return _ket([('0000', 1), ('0111', 1)])
    if f == 'F2':
        return _ket([('0000', 1), ('1011', 1), ('1101', 1), ('1110', 1)])
    if f == 'F3':
        return _ket([('0000', 1), ('0101', 1), ('1000', 1), ('1110', 1)])
    if f == 'F4':
        a, = p
        return _ket([('0000', a), ('1111', a), ('0011', 1), ('0101', 1), ('0110', 1)])
    if f == 'F5':
        a, = p
        return _ket([('0000', a), ('0101', a), ('1010', a), ('1111', a),
                     ('0001', 1j), ('0110', 1), ('1011', -1j)])
    if f == 'F6':
        a, b = p
        return _ket([('0000', a), ('1111', a), ('0101', b), ('1010', b),
                     ('0110', 1), ('0011', 1)])
    if f == 'F7':
        a, b = p
        s = 1j / math.sqrt(2.0)
        return _ket([('0000', a), ('1111', a),
                     ('0101', (a + b) / 2), ('1010', (a + b) / 2),
                     ('0110', (a - b) / 2), ('1001', (a - b) / 2),
                     ('0001', s), ('0010', s), ('0111', s), ('1011', s)])
    if f == 'F8':
        a, b, c = p
        return _ket([('0000', (a + b) / 2), ('1111', (a + b) / 2),
                     ('0011', (a - b) / 2), ('1100', (a - b) / 2),
                     ('0101', c), ('1010', c), ('0110', 1)])
    a, b, c, d = p
    return _ket([('0000', (a + d) / 2), ('1111', (a + d) / 2),
                 ('0011', (a - d) / 2), ('1100', (a - d) / 2),
                 ('0101', (b + c) / 2), ('1010', (b + c) / 2),
                 ('0110', (b - c) / 2), ('1001', (b - c) / 2)])


def _inv_sqrt(x):
    return 1.0 / math.sqrt(x) if x > 0 else float('nan')


def printed_norm(spec: FamilySpec):
    """The normalization constant printed alongside each representative state."""
    p = spec.named()
    a, b, c, d = (p.get(k, 0.0) for k in PARAM_NAMES)
    return {
        'F1': 1.0 / math.sqrt(2.0),
        'F2': 0.5,
        'F3': 0.5,
        'F4': _inv_sqrt(2 * a * a + 3),
        'F5': _inv_sqrt(4 * a * a + 3),
        'F6': _inv_sqrt(2 * (1 + a * a + b * b)),
        'F7': _inv_sqrt(3 * a * a + b * b + 2),
        'F8': _inv_sqrt(1 + a * a + b * b + 2 * c * c),
        'F9': _inv_sqrt(a * a + a * b + 1.5 * b * b + c * c - a * d + d * d / 2),
    }[spec.family]


def family_state(spec: FamilySpec):
    """Normalized representative state; the printed constant is compared and logged."""
    raw = raw_amplitudes(spec)
    norm = float(np.linalg.norm(raw))
    if not norm > 0.0:
        raise FamilySpecError(f'{spec.label} has zero norm')
    printed = printed_norm(spec)
    actual = 1.0 / norm
    if not (math.isfinite(printed) and abs(printed - actual) <= 1e-9 * actual):
        log = logger.debug if spec.family in _NORM_WARNED else logger.warning
        _NORM_WARNED.add(spec.family)
        log('%s: printed normalization %.12g differs from 1/|L| = %.12g',
            spec.label, printed, actual)
    else:
        logger.debug('%s: normalization %.12g', spec.label, actual)
    try:
        return PureState4.from_amplitudes(raw, label=spec.label)
    except StateFormatError as e:
        raise FamilySpecError(str(e)) from e


def _root(x):
    return math.sqrt(x) if x >= 0 else float('nan')


def _div(x, y):
    return x / y if y != 0 else float('nan')


def printed_profile(spec: FamilySpec) -> Dict[str, Optional[float]]:
    """The printed closed forms evaluated verbatim; None where nothing was printed."""
    f = spec.family
    p = spec.named()
    a, b, c, d = (p.get(k, 0.0) for k in PARAM_NAMES)
    out = dict.fromkeys(ENTRY_KEYS)

    if f == 'F1':
        out.update(c1=0.0, c2=1.0, c3=1.0, c4=1.0)
    elif f == 'F2':
        r3, r5 = math.sqrt(3) / 2, math.sqrt(5) / 2
        out.update(c1=r3, c2=1.0, c3=1.0, c4=1.0, c12_34=r5, c13_24=r5, c14_23=r5)
    elif f == 'F3':
        r3, r5 = math.sqrt(3) / 2, math.sqrt(5) / 2
        out.update(c1=r3, c2=r3, c3=1.0, c4=r3, c12_34=r5, c13_24=1.0, c14_23=1.0)
    elif f == 'F4':
        a2 = a * a
        den = 2 * a2 + 3
        one = _div(_root(4 * a2 * (a2 + 3)), den)
        rest = _div(2 * _root(a2 * a2 + 3 * a2 + 2), den)
        two = _div(2 * _root(a2 * a2 + 4 * a2 + 2), den)
        out.update(c1=one, c2=rest, c3=rest, c4=rest, c12_34=two, c13_24=two, c14_23=two)
    elif f == 'F5':
        a2 = a * a
        den = 4 * a2 + 3
        c12 = _div(_root(8 * (2 * a2 * a2 + 7 * a2 + 2)), den)
        c34 = _div(_root(8 * (2 * a2 * a2 + 7 * a2 + 1)), den)
        side = _div(_root(4 * (6 * a2 * a2 + 14 * a2 + 3)), den)
        mid = _div(_root(8 * (6 * a2 + 1)), den)
        out.update(c1=c12, c2=c12, c3=c34, c4=c34, c12_34=side, c13_24=mid, c14_23=side)
    elif f == 'F6':
        a2, b2 = a * a, b * b
        den = a2 + b2 + 1
        one = _div(_root(2 * a2 * (b2 + 1) + a2 * a2 + b2 * (b2 + 2)), den)
        side = _div(_root(a2 * (4 * b2 + 2) + a2 * a2 + (b2 + 1) ** 2), den)
        mid = _div(_root(-2 * a2 * (b2 - 2) + a2 * a2 + b2 * (b2 + 4)), den)
        out.update(c1=one, c2=one, c3=1.0, c4=1.0, c12_34=side, c13_24=mid, c14_23=side)
    elif f == 'F7':
        a2, b2 = a * a, b * b
        den = 3 * a2 + b2 + 2
        m11 = a2 * (6 * b2 + 88) + 15 * a2 * a2 + 3 * b2 * b2 + 24 * b2 + 8
        one = _div(_root(a2 * (6 * b2 + 44) + 9 * a2 * a2 + b2 * b2 + 12 * b2 + 3), den)
        c12 = _div(_root(4 * (a2 * (3 * b2 + 10) + 3 * a2 * a2 + 2 * b2 + 1)), den)
        c13 = _div(_root(m11 - 24 * a2 * a * b + 16 * a * b), math.sqrt(2) * den)
        c14 = _div(_root(m11 + 24 * a2 * a * b - 16 * a * b), math.sqrt(2) * den)
        out.update(c1=one, c2=one, c3=one, c4=one, c12_34=c12, c13_24=c13, c14_23=c14)
    elif f == 'F8':
        a2, b2, c2 = a * a, b * b, c * c
        den = a2 + b2 + 2 * c2 + 1
        m12 = b2 + 2 * c2 + 1
        n12 = c2 + 1
        l12 = a2 * a2 + b2 * b2
        o12 = 2 * a2 * (m12 + 1) + 4 * b2 * n12 + 8 * c2 * (n12 + 1)
        one = _div(_root(2 * a2 * m12 + 2 * b2 * (c2 + n12) + 4 * c2 * n12 + l12), den)
        c12 = _div(_root(4 * (a2 * m12 + b2 * (c2 + n12) + c2 * c2)), den)
        c13 = _div(_root(o12 + 8 * a * b * (c2 + n12) + 3 * l12), math.sqrt(2) * den)
        c14 = _div(_root(o12 - 8 * a * b * (c2 + n12) + 3 * l12), math.sqrt(2) * den)
        out.update(c1=one, c2=one, c3=one, c4=one, c12_34=c12, c13_24=c13, c14_23=c14)
    else:
        den = 2 * a * a + 2 * a * b - 2 * a * d + 3 * b * b + 2 * c * c + d * d
        m22 = (8 * a ** 3 * b + 2 * a ** 4 + 4 * a * d * d + 8 * b * b * c * c + 7 * b ** 4
               + 2 * c ** 4 + 2 * b * b * d * d - d ** 4)
        n22 = 4 * a * a * (-2 * a * d + 3 * b * b + c * c) - 4 * a * d * (3 * b * b + 2 * c * c + d * d)
        l22 = -2 * a * d + 3 * b * b + 2 * c * c + d * d
        m32 = (8 * a ** 3 * b + 4 * a * d * d + 12 * b * b * c * c + 6 * b * b * d * d + 5 * b ** 4
               + 4 * c * c * d * d - 3 * d ** 4)
        n32 = 4 * a * b * (-2 * a * d + 3 * b * b + 2 * c * c + d * d) - 4 * a * d * (3 * b * b + 2 * c * c + d * d)
        m42 = (8 * a ** 3 * b + 3 * a ** 4 + 4 * a * d * d + 6 * b * b * c * c + 8 * b ** 4
               - 2 * c * c * d * d + 3 * c ** 4)
        n42 = 2 * a * a * (4 * a * d - 5 * b * b - c * c + d * d) + 4 * a * d * (3 * b * b + 2 * c * c + d * d)
        l42 = 4 * a * b * (-2 * a * d + 3 * b * b + 2 * c * c + d * d)
        one = _div(_root(2 * (m22 + n22 + 4 * a * b * l22)), den)
        c12 = _div(_root(2 * (m32 + n32 + 4 * a * a * (l22 + b * b))), den)
        c13 = _div(_root(2 * (m42 - n42 + l42 - 24 * a * b * c * d)), den)
        c14 = _div(_root(2 * (m42 - n42 + l42 + 24 * a * b * c * d)), den)
        out.update(c1=one, c2=one, c3=one, c4=one, c12_34=c12, c13_24=c13, c14_23=c14)
    return out


def _close(x, y, tol=AUDIT_TOL):
    return x is not None and math.isfinite(x) and abs(x - y) <= tol


@dataclass(frozen=True)
class ClosedFormAudit:
    """Printed vs engine concurrences; a flag of None means nothing was printed."""
    spec: FamilySpec
    printed: Dict[str, Optional[float]]
    engine: Dict[str, float]
    flags: Dict[str, Optional[bool]]
    one_vs_three_multiset: Optional[bool]
    two_vs_two: Optional[bool]

    @property
    def agree(self):
        return all(f is not False for f in self.flags.values())

    @property
    def disagreements(self):
        return [k for k, f in self.flags.items() if f is False]


def _multiset_agree(printed, engine):
    if any(x is None for x in printed):
        return None
    if any(not math.isfinite(x) for x in printed):
        return False
    return all(abs(x - y) <= AUDIT_TOL for x, y in zip(sorted(printed), sorted(engine)))


def closed_form_profile(spec: FamilySpec):
    printed = printed_profile(spec)
    engine = concurrence_profile(family_state(spec)).to_dict()
    flags = {k: (None if printed[k] is None else _close(printed[k], engine[k])) for k in ENTRY_KEYS}
    one_keys = ENTRY_KEYS[:4]
    two_keys = ENTRY_KEYS[4:]
    two_flags = [flags[k] for k in two_keys]
    audit = ClosedFormAudit(
        spec=spec, printed=printed, engine=engine, flags=flags,
        one_vs_three_multiset=_multiset_agree([printed[k] for k in one_keys],
                                              [engine[k] for k in one_keys]),
        two_vs_two=None if None in two_flags else all(two_flags),
    )
    if audit.disagreements:
        logger.warning('%s: printed closed forms disagree with the engine on %s',
                       spec.label, ', '.join(audit.disagreements))
    return audit


AUDIT_COLUMNS = ('family', 'params', 'entry', 'paper_value', 'engine_value', 'agree')


def audit_rows(audit: ClosedFormAudit):
    params = ';'.join(f'{k}={v!r}' for k, v in audit.spec.named().items())
    rows = []
    for key in ENTRY_KEYS:
        printed = audit.printed[key]
        rows.append({
            'family': audit.spec.family,
            'params': params,
            'entry': key,
            'paper_value': '' if printed is None else format(printed, '.17g'),
            'engine_value': format(audit.engine[key], '.17g'),
            'agree': '' if audit.flags[key] is None else str(audit.flags[key]).lower(),
        })
    return rows


def audit_csv(audits):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=AUDIT_COLUMNS, lineterminator='\n')
    writer.writeheader()
    for audit in audits:
        writer.writerows(audit_rows(audit))
    return buf.getvalue()


def benchmark_state(name):
    """psiA, psiB, psiC, psiD or ghz4."""
    if name == 'psiA':
        spec = FamilySpec('F2')
    elif name == 'psiB':
        spec = FamilySpec('F3')
    elif name == 'psiC':
        spec = FamilySpec('F4', (1.0,))
    elif name == 'psiD':
        spec = FamilySpec('F5', (math.sqrt(PSI_D_A2),))
    elif name == 'ghz4':
        return PureState4.from_amplitudes(_ket([('0000', 1), ('1111', 1)]), label='ghz4')
    else:
        raise FamilySpecError(f'unknown benchmark {name!r}; expected one of {", ".join(BENCHMARKS)}')
    state = family_state(spec)
    return PureState4.from_amplitudes(state.amps, label=name)


# subfamily name -> (family, description)
SUBFAMILIES = {
    'F8:c0': ('F8', 'c = 0, a and b not both 0'),
    'F8:abc': ('F8', 'abc != 0'),
    'F8:c_ab0': ('F8', 'c != 0 and ab = 0'),
    'F9:epr': ('F9', 'a = b = c = d (two EPR pairs)'),
    'F9:xy0': ('F9', 'a = b = 0 and cd != 0'),
    'F9:anti': ('F9', 'a = -d, b = c, a != b, both nonzero'),
    'F9:a_pm_d': ('F9', 'a = d != 0 and b != +-c'),
    'F9:generic': ('F9', 'a, b, c, d pairwise distinct up to sign'),
}


def _distinct_up_to_sign(values):
    mags = [abs(v) for v in values]
    return all(abs(x - y) > 1e-12 for x, y in itertools.combinations(mags, 2))


def subfamily_specs(name, values):
    """FamilySpecs of a named subfamily over the grid `values` (applied per parameter)."""
    if name not in SUBFAMILIES:
        raise FamilySpecError(f'unknown subfamily {name!r}; expected one of {", ".join(SUBFAMILIES)}')
    vals = [float(v) for v in values]
    specs = []
    if name == 'F8:c0':
        specs = [FamilySpec('F8', (a, b, 0.0)) for a in vals for b in vals if a or b]
    elif name == 'F8:abc':
        specs = [FamilySpec('F8', (a, b, c)) for a in vals for b in vals for c in vals if a * b * c]
    elif name == 'F8:c_ab0':
        specs = [FamilySpec('F8', (a, b, c)) for a in vals for b in vals for c in vals
                 if c and a * b == 0]
    elif name == 'F9:epr':
        specs = [FamilySpec('F9', (v, v, v, v)) for v in vals if v]
    elif name == 'F9:xy0':
        specs = [FamilySpec('F9', (0.0, 0.0, c, d)) for c in vals for d in vals if c * d]
    elif name == 'F9:anti':
        specs = [FamilySpec('F9', (a, b, b, -a)) for a in vals for b in vals
                 if a and b and abs(a - b) > 1e-12]
    elif name == 'F9:a_pm_d':
        specs = [FamilySpec('F9', (a, b, c, a)) for a in vals for b in vals for c in vals
                 if a and abs(abs(b) - abs(c)) > 1e-12]
    elif name == 'F9:generic':
        specs = [FamilySpec('F9', q) for q in itertools.product(vals, repeat=4)
                 if _distinct_up_to_sign(q)]
    return specs
