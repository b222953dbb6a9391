#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
state_core.py - four-qubit pure states, bipartitions and reduced density matrices.

Basis ordering is fixed with qubit 1 most significant: the amplitude of
|q1 q2 q3 q4> sits at index 8*q1 + 4*q2 + 2*q3 + q4. States are always
renormalized on construction; the factor that was applied is kept on the state.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np

from tetra_config import TOL

logger = logging.getLogger(__name__)

N_QUBITS = 4
DIM = 2 ** N_QUBITS
QUBITS = (1, 2, 3, 4)


class TetraGmeError(ValueError):
    """Base class for every error raised by the toolkit."""


class StateFormatError(TetraGmeError):
    pass


class CutError(TetraGmeError):
    pass


class DensityError(TetraGmeError):
    pass


def _readonly(arr):
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PureState4:
    """A normalized four-qubit pure state.

    `norm_factor` is the scalar that was multiplied into the raw amplitudes to
    normalize them (1.0 when the input was already normalized).
    """
    amps: np.ndarray
    norm_factor: float = 1.0
    label: Optional[str] = None

    @classmethod
    def from_amplitudes(cls, values, label=None):
        vec = np.asarray(values, dtype=np.complex128).reshape(-1)
        if vec.shape != (DIM,):
            raise StateFormatError(f'expected {DIM} amplitudes, got {vec.size}')
        if not np.all(np.isfinite(vec.real)) or not np.all(np.isfinite(vec.imag)):
            raise StateFormatError('amplitudes must be finite')
        norm = float(np.linalg.norm(vec))
        if not norm > 0.0:
            raise StateFormatError('zero-norm amplitude vector')
        if not math.isfinite(norm):
            raise StateFormatError('amplitude norm overflows')
        factor = 1.0 / norm
        amps = vec * factor
        amps = amps / np.linalg.norm(amps)
        if not abs(float(np.vdot(amps, amps).real) - 1.0) <= TOL['normalization']:
            raise StateFormatError(f'amplitudes cannot be normalized (norm {norm!r})')
        return cls(amps=_readonly(amps), norm_factor=factor, label=label)

    def tensor(self):
        """Amplitudes as a (2, 2, 2, 2) array indexed [q1, q2, q3, q4]."""
        return self.amps.reshape((2,) * N_QUBITS)

    def __eq__(self, other):
        if not isinstance(other, PureState4):
            return NotImplemented
        return np.array_equal(self.amps, other.amps) and self.label == other.label

    def __hash__(self):
        return hash((self.amps.tobytes(), self.label))


@dataclass(frozen=True)
class Bipartition:
    """A cut of the four qubits; `keep` is the side whose reduced state is taken."""
    keep: FrozenSet[int]

    def __post_init__(self):
        keep = frozenset(int(q) for q in self.keep)
        if not keep or not keep < frozenset(QUBITS):
            raise CutError(f'keep must be a nonempty proper subset of {set(QUBITS)}, got {set(keep)}')
        object.__setattr__(self, 'keep', keep)

    @classmethod
    def of(cls, *qubits):
        return cls(frozenset(qubits))

    @classmethod
    def canonical(cls, qubits: Iterable[int]):
        """The canonical cut separating `qubits` from the rest."""
        cut = cls(frozenset(qubits))
        if cut.is_canonical:
            return cut
        return cls(cut.rest)

    @property
    def rest(self):
        return frozenset(QUBITS) - self.keep

    @property
    def is_canonical(self):
        return self in CANONICAL_CUTS

    @property
    def label(self):
        a = ''.join(str(q) for q in sorted(self.keep))
        b = ''.join(str(q) for q in sorted(self.rest))
        return f'{a}|{b}'

    @property
    def key(self):
        """Serialization key: c1..c4 for one-vs-three cuts, c12_34 style otherwise."""
        if len(self.keep) == 1:
            return f'c{next(iter(self.keep))}'
        return 'c' + self.label.replace('|', '_')


ONE_VS_THREE: Tuple[Bipartition, ...] = tuple(Bipartition.of(q) for q in QUBITS)
TWO_VS_TWO: Tuple[Bipartition, ...] = tuple(Bipartition.of(1, q) for q in (2, 3, 4))
CANONICAL_CUTS = ONE_VS_THREE + TWO_VS_TWO


@dataclass(frozen=True)
class ReducedDensity:
    """rho_keep, plus the Schmidt coefficients of the cut it came from (eigenvalues = schmidt**2)."""
    dim: int
    entries: np.ndarray = field(repr=False)
    schmidt: Optional[np.ndarray] = field(default=None, repr=False)


def basis_state(bits: str, label=None):
    """|bits> for a four-character bit string, e.g. basis_state('0000')."""
    if len(bits) != N_QUBITS or set(bits) - {'0', '1'}:
        raise StateFormatError(f'bad basis label {bits!r}')
    vec = np.zeros(DIM, dtype=np.complex128)
    vec[int(bits, 2)] = 1.0
    return PureState4.from_amplitudes(vec, label=label or f'|{bits}>')


def parse_state(text):
    """Parse a state document {"amplitudes": [[re, im] x 16], "label": ...}.

    Returns the normalized state; `state.norm_factor` reports the factor applied.
    """
    try:
        doc = json.loads(text)
    except (TypeError, ValueError) as e:
        raise StateFormatError(f'state document is not valid JSON: {e}') from e
    if not isinstance(doc, dict) or 'amplitudes' not in doc:
        raise StateFormatError('state document must be an object with key "amplitudes"')
    raw = doc['amplitudes']
    if not isinstance(raw, list) or len(raw) != DIM:
        raise StateFormatError(f'"amplitudes" must be a list of {DIM} [re, im] pairs')
    vals = []
    for k, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
            raise StateFormatError(f'amplitude {k} must be a two-element numeric array')
        try:
            re, im = float(pair[0]), float(pair[1])
        except OverflowError as e:
            raise StateFormatError(f'amplitude {k} is out of range: {e}') from e
        if not (math.isfinite(re) and math.isfinite(im)):
            raise StateFormatError(f'amplitude {k} is not finite')
        vals.append(complex(re, im))
    label = doc.get('label')
    if label is not None and not isinstance(label, str):
        raise StateFormatError('"label" must be a string')
    return PureState4.from_amplitudes(vals, label=label)


def serialize_state(state: PureState4):
    doc = {'amplitudes': [[float(a.real), float(a.imag)] for a in state.amps]}
    if state.label is not None:
        doc['label'] = state.label
    return json.dumps(doc)


def _check_density(rho, dim):
    if np.max(np.abs(rho - rho.conj().T)) > TOL['hermitian']:
        raise DensityError('reduced density is not Hermitian')
    if abs(np.trace(rho) - 1.0) > TOL['trace']:
        raise DensityError(f'reduced density trace {np.trace(rho).real!r} != 1')
    if np.min(np.linalg.eigvalsh(rho)) < -TOL['eigen']:
        raise DensityError('reduced density has a negative eigenvalue')
    pur = float(np.sum(np.abs(rho) ** 2))
    if pur < 1.0 / dim - TOL['hermitian'] or pur > 1.0 + TOL['hermitian']:
        raise DensityError(f'purity {pur!r} outside [1/{dim}, 1]')


def partial_trace(state: PureState4, cut: Bipartition):
    """rho_keep = Tr_rest |psi><psi| for a canonical cut."""
    if not cut.is_canonical:
        raise CutError(f'cut {cut.label} is not canonical')
    keep = sorted(q - 1 for q in cut.keep)
    rest = sorted(q - 1 for q in cut.rest)
    dim = 2 ** len(keep)
    m = state.tensor().transpose(keep + rest).reshape(dim, -1)
    rho = m @ m.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    _check_density(rho, dim)
    schmidt = np.linalg.svd(m, compute_uv=False)
    return ReducedDensity(dim=dim, entries=_readonly(rho), schmidt=_readonly(schmidt))


def purity(rho: ReducedDensity):
    """Tr(rho^2), clamped to [1/dim, 1]; a clamp larger than the tolerance is an error."""
    raw = float(np.sum(np.abs(rho.entries) ** 2))
    lo = 1.0 / rho.dim
    clamped = min(max(raw, lo), 1.0)
    if abs(clamped - raw) > TOL['purity_clamp']:
        raise DensityError(f'purity {raw!r} is outside [{lo}, 1] beyond tolerance')
    return clamped


def permute_qubits(state: PureState4, perm: Sequence[int]):
    """Relabel qubits: new qubit k is old qubit perm[k-1].

    So C_k of the result equals C_{perm[k-1]} of the input.
    """
    if sorted(perm) != list(QUBITS):
        raise CutError(f'{perm!r} is not a permutation of {QUBITS}')
    t = state.tensor().transpose([p - 1 for p in perm])
    return PureState4.from_amplitudes(t.reshape(-1), label=state.label)


def apply_local_unitaries(state: PureState4, unitaries):
    """(U1 x U2 x U3 x U4)|psi>."""
    if len(unitaries) != N_QUBITS:
        raise CutError('need one 2x2 unitary per qubit')
    u1, u2, u3, u4 = (np.asarray(u, dtype=np.complex128) for u in unitaries)
    t = np.einsum('ai,bj,ck,dl,ijkl->abcd', u1, u2, u3, u4, state.tensor())
    return PureState4.from_amplitudes(t.reshape(-1), label=state.label)


def random_state(rng: np.random.Generator, label=None):
    """Haar-random state from normalized complex Gaussian amplitudes."""
    vec = rng.normal(size=DIM) + 1j * rng.normal(size=DIM)
    return PureState4.from_amplitudes(vec, label=label)


def random_local_unitary(rng: np.random.Generator):
    """Haar-random U(2) from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
