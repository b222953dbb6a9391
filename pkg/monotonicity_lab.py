#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
monotonicity_lab.py - parameter sweeps over the SLOCC families (gap G, volume,
finite-difference gradient, closed-form audit), seeded Haar-random scans of the
concurrence inequalities, and local-unitary invariance checks.

Rows are independent and evaluated on a thread pool; output order is always the
grid order. Worker count comes from the config `threads` value, which
TETRA_GME_THREADS overrides.
"""

import csv
import io
import itertools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from concurrence_engine import concurrence_profile, profile_arrays
from slocc_families import (
    AUDIT_COLUMNS, BENCHMARKS, FAMILY_ARITY, PARAM_NAMES, FamilySpec, FamilySpecError,
    audit_rows, benchmark_state, closed_form_profile, family_state,
)
from state_core import (
    DIM, PureState4, TetraGmeError, apply_local_unitaries, random_local_unitary,
)
from tetra_config import CONFIG, TOL
from tetra_geometry import (
    GRADIENT_NAMES, batch_volumes, build_edges, tetra_report, volume_gradient,
)

logger = logging.getLogger(__name__)

QUANTITIES = ('G', 'volume', 'gradient', 'audit')
GRADIENT_COLUMNS = tuple(f'dV_d{name}' for name in GRADIENT_NAMES)
QUANTITY_COLUMNS = {
    'G': ('H', 'R', 'G', 'volume', 'oracle_gap'),
    'volume': ('volume', 'cm_det', 'oracle_gap', 'gmc'),
    'gradient': GRADIENT_COLUMNS + ('min_partial',),
}
MAX_COUNTEREXAMPLES = 20


class SweepConfigError(TetraGmeError):
    pass


def parse_range(text):
    """'start:stop:step' (or a single number) -> (start, stop, step)."""
    parts = str(text).split(':')
    try:
        if len(parts) == 1:
            v = float(parts[0])
            start, stop, step = v, v, 1.0
        elif len(parts) == 3:
            start, stop, step = (float(p) for p in parts)
        else:
            raise ValueError(text)
    except ValueError:
        raise SweepConfigError(f'bad range {text!r}; expected start:stop:step') from None
    if not all(math.isfinite(x) for x in (start, stop, step)):
        raise SweepConfigError(f'range {text!r} must be finite')
    if step <= 0:
        raise SweepConfigError(f'range {text!r} needs a positive step')
    if stop < start:
        raise SweepConfigError(f'range {text!r} is empty')
    return start, stop, step


def default_ranges(family, given=()):
    """Pad `given` with the config grid up to the arity of `family`."""
    grid = CONFIG['grid']
    arity = FAMILY_ARITY.get(family, len(given))
    step = grid['step_one_param'] if arity == 1 else grid['step_two_param']
    fill = (float(grid['start']), float(grid['stop']), float(step))
    return tuple(given) + (fill,) * max(0, arity - len(given))


def grid_points(start, stop, step):
    """Inclusive grid start, start+step, ... <= stop."""
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + k * step, 12) for k in range(n + 1)]


@dataclass(frozen=True)
class SweepConfig:
    """A sweep over one family (ranges in a, b, c, d order) or a single benchmark state."""
    quantity: str
    family: Optional[str] = None
    ranges: Tuple[Tuple[float, float, float], ...] = ()
    benchmark: Optional[str] = None
    out: Optional[str] = None
    threads: Optional[int] = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise SweepConfigError(f'quantity must be one of {", ".join(QUANTITIES)}')
        if (self.family is None) == (self.benchmark is None):
            raise SweepConfigError('give exactly one of a family or a benchmark')
        if self.benchmark is not None:
            if self.benchmark not in BENCHMARKS:
                raise SweepConfigError(f'unknown benchmark {self.benchmark!r}')
            if self.ranges:
                raise SweepConfigError('a benchmark sweep takes no ranges')
            if self.quantity == 'audit':
                raise SweepConfigError('audit needs a family')
            return
        if self.family not in FAMILY_ARITY:
            raise SweepConfigError(f'unknown family {self.family!r}')
        if len(self.ranges) != FAMILY_ARITY[self.family]:
            raise SweepConfigError(
                f'{self.family} needs {FAMILY_ARITY[self.family]} ranges, got {len(self.ranges)}')
        for start, stop, step in self.ranges:
            if step <= 0 or stop < start:
                raise SweepConfigError(f'bad range {start}:{stop}:{step}')

    @property
    def param_names(self):
        return PARAM_NAMES[:len(self.ranges)]

    def points(self):
        grids = [grid_points(*r) for r in self.ranges]
        return list(itertools.product(*grids))


@dataclass
class SweepTable:
    columns: Tuple[str, ...]
    rows: List[Dict[str, object]] = field(default_factory=list)

    def column(self, name):
        return [row.get(name) for row in self.rows]

    def to_csv(self):
        return write_csv(self)


def worker_count(requested=None):
    n = requested or CONFIG.get('threads') or min(8, os.cpu_count() or 1)
    return max(1, int(n))


def _evaluate(quantity, target, params):
    """Rows for one point; `target` is a FamilySpec or a benchmark name. Failures become flagged rows."""
    if quantity == 'audit':
        return audit_rows(closed_form_profile(target))

    row = dict(params)
    try:
        state = benchmark_state(target) if isinstance(target, str) else family_state(target)
        profile = concurrence_profile(state)
        edges = build_edges(profile)
        tetra = tetra_report(edges)
    except FamilySpecError as e:
        logger.warning('point %s: %s', params, e)
        row['status'] = 'degenerate'
        return [row]
    except TetraGmeError as e:
        logger.warning('point %s: %s', params, e)
        row['status'] = 'infeasible'
        return [row]

    row['status'] = tetra.status
    if quantity == 'G':
        row.update(H=tetra.H, R=tetra.R, G=tetra.G, volume=tetra.volume, oracle_gap=tetra.oracle_gap)
    elif quantity == 'volume':
        row.update(volume=tetra.volume, cm_det=tetra.cm_det, oracle_gap=tetra.oracle_gap,
                   gmc=profile.minimum)
    elif tetra.status == 'ok':
        try:
            grad = volume_gradient(edges)
        except TetraGmeError as e:
            logger.warning('point %s: gradient unavailable: %s', params, e)
            row['status'] = 'degenerate'
            return [row]
        for name, col in zip(GRADIENT_NAMES, GRADIENT_COLUMNS):
            row[col] = grad[name]
        row['min_partial'] = min(grad.values())
    return [row]


def _run(quantity, jobs, columns, threads=None, out=None):
    logger.info('sweep %s over %d point(s) on %d thread(s)', quantity, len(jobs), worker_count(threads))
    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        chunks = list(pool.map(lambda job: _evaluate(quantity, *job), jobs))
    table = SweepTable(columns=columns, rows=[row for chunk in chunks for row in chunk])
    flagged = sum(1 for row in table.rows if row.get('status') not in (None, 'ok'))
    if flagged:
        logger.info('%d row(s) flagged degenerate or infeasible', flagged)
    if out:
        with open(out, 'w', encoding='utf-8', newline='') as f:
            write_csv(table, f)
    return table


def _columns(quantity, names):
    if quantity == 'audit':
        return AUDIT_COLUMNS
    return tuple(names) + QUANTITY_COLUMNS[quantity] + ('status',)


def sweep(config: SweepConfig):
    """Evaluate the configured quantity over the grid; rows come back in grid order."""
    if config.benchmark is not None:
        jobs = [(config.benchmark, {})]
    else:
        jobs = [(FamilySpec(config.family, p), dict(zip(config.param_names, p)))
                for p in config.points()]
    return _run(config.quantity, jobs, _columns(config.quantity, config.param_names),
                config.threads, config.out)


def sweep_specs(quantity, specs: Sequence[FamilySpec], threads=None, out=None):
    """Like sweep() for an explicit list of FamilySpecs of one family (e.g. a named subfamily)."""
    if quantity not in QUANTITIES:
        raise SweepConfigError(f'quantity must be one of {", ".join(QUANTITIES)}')
    if not specs:
        raise SweepConfigError('no parameter points to sweep')
    if len({s.family for s in specs}) != 1:
        raise SweepConfigError('sweep_specs takes points of a single family')
    names = PARAM_NAMES[:FAMILY_ARITY[specs[0].family]]
    jobs = [(s, s.named()) for s in specs]
    return _run(quantity, jobs, _columns(quantity, names), threads, out)


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    return value


def write_csv(table: SweepTable, stream=None):
    """Write header + rows with 17 significant digits; returns the text when no stream is given."""
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(row.get(col)) for col in table.columns])
    if stream is None:
        return buf.getvalue()
    return None


def positivity_summary(table: SweepTable, floor=None):
    """Counts per status plus min G and min partial over the ok rows."""
    floor = CONFIG['gradient']['negativity_floor'] if floor is None else floor
    statuses = [row.get('status') for row in table.rows]
    ok_rows = [row for row in table.rows if row.get('status') == 'ok']
    summary = {
        'points': len(table.rows),
        'ok': statuses.count('ok'),
        'degenerate': statuses.count('degenerate'),
        'infeasible': statuses.count('infeasible'),
    }
    gaps = [row['G'] for row in ok_rows if 'G' in row and math.isfinite(row['G'])]
    if gaps:
        summary['min_G'] = min(gaps)
        summary['negative_G'] = [
            {**{k: row[k] for k in table.columns if k in PARAM_NAMES}, 'G': row['G']}
            for row in ok_rows if row.get('G', 1.0) <= 0.0
        ]
    partials = [row['min_partial'] for row in ok_rows if 'min_partial' in row]
    if partials:
        summary['min_partial'] = min(partials)
        negatives = []
        for row in ok_rows:
            for col in GRADIENT_COLUMNS:
                if col in row and row[col] < floor:
                    negatives.append({**{k: row[k] for k in table.columns if k in PARAM_NAMES},
                                      'partial': col, 'value': row[col]})
        summary['negative_partials'] = negatives
    return summary


@dataclass
class ScanReport:
    count: int
    seed: int
    polygon_violations: int = 0
    triangle_violations: int = 0
    infeasible: int = 0
    gme: int = 0
    min_polygon_slack: float = math.inf
    min_triangle_slack: float = math.inf
    min_cm_det: float = math.inf
    max_volume: float = 0.0
    min_G: float = math.inf
    max_oracle_gap: float = 0.0
    counterexamples: List[Dict[str, object]] = field(default_factory=list)

    @property
    def violations(self):
        return self.polygon_violations + self.triangle_violations + self.infeasible

    def to_dict(self):
        def num(x):
            return x if math.isfinite(x) else None
        return {
            'count': self.count,
            'seed': self.seed,
            'violations': {
                'polygon': self.polygon_violations,
                'triangle': self.triangle_violations,
                'feasibility': self.infeasible,
            },
            'gme': self.gme,
            'extrema': {
                'min_polygon_slack': num(self.min_polygon_slack),
                'min_triangle_slack': num(self.min_triangle_slack),
                'min_cm_det': num(self.min_cm_det),
                'max_volume': num(self.max_volume),
                'min_G': num(self.min_G),
                'max_oracle_gap': num(self.max_oracle_gap),
            },
            'counterexamples': self.counterexamples,
        }


def sample_amplitudes(seed, first, size):
    """Haar samples first .. first+size-1; sample k always comes from default_rng([seed, k])."""
    amps = np.empty((size, DIM), dtype=np.complex128)
    for row, k in enumerate(range(first, first + size)):
        rng = np.random.default_rng([seed, k])
        amps[row] = rng.normal(size=DIM) + 1j * rng.normal(size=DIM)
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    return amps


def _scan_batch(seed, index, first, size):
    amps = sample_amplitudes(seed, first, size)
    c_one, c_two = profile_arrays(amps)
    poly = c_one.sum(axis=1, keepdims=True) - 2.0 * c_one
    tri = c_two.sum(axis=1, keepdims=True) - 2.0 * c_two
    geo = batch_volumes(c_one, c_two)
    closed = np.sqrt(np.maximum(0.0, geo['radicand'])) / 12.0
    return index, amps, c_one, c_two, poly, tri, geo, np.abs(closed - geo['volume'])


def random_scan(count, seed=None, batch_size=None, threads=None):
    """Haar-random states checked against the polygon and triangle inequalities and realizability."""
    if count < 1:
        raise SweepConfigError('count must be at least 1')
    seed = CONFIG['scan']['seed'] if seed is None else int(seed)
    if seed < 0:
        raise SweepConfigError('seed must be non-negative')
    batch_size = batch_size or CONFIG['scan']['batch_size']
    slack = TOL['slack']
    chunks = [(index, start, min(batch_size, count - start))
              for index, start in enumerate(range(0, count, batch_size))]

    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        batches = list(pool.map(lambda chunk: _scan_batch(seed, *chunk), chunks))

    report = ScanReport(count=count, seed=seed)
    for index, amps, c_one, c_two, poly, tri, geo, oracle in batches:
        bad_poly = np.any(poly < -slack, axis=1)
        bad_tri = np.any(tri < -slack, axis=1)
        bad_geo = (geo['cm_det'] < -TOL['radicand']) | (geo['base_slack'] < -slack)
        report.polygon_violations += int(bad_poly.sum())
        report.triangle_violations += int(bad_tri.sum())
        report.infeasible += int(bad_geo.sum())
        report.gme += int(np.sum(geo['volume'] > TOL['zero']))
        report.min_polygon_slack = min(report.min_polygon_slack, float(poly.min()))
        report.min_triangle_slack = min(report.min_triangle_slack, float(tri.min()))
        report.min_cm_det = min(report.min_cm_det, float(geo['cm_det'].min()))
        report.max_volume = max(report.max_volume, float(geo['volume'].max()))
        gaps = geo['G'][np.isfinite(geo['G'])]
        if gaps.size:
            report.min_G = min(report.min_G, float(gaps.min()))
        report.max_oracle_gap = max(report.max_oracle_gap, float(oracle.max()))
        for k in np.flatnonzero(bad_poly | bad_tri | bad_geo):
            if len(report.counterexamples) >= MAX_COUNTEREXAMPLES:
                break
            report.counterexamples.append({
                'sample': index * batch_size + int(k),
                'amplitudes': [[float(z.real), float(z.imag)] for z in amps[k]],
                'c_one': c_one[k].tolist(),
                'c_two': c_two[k].tolist(),
            })
    if report.violations:
        logger.warning('random scan found %d violation(s)', report.violations)
    return report


def lu_invariance(state: PureState4, trials, seed=None):
    """Max |change| of the seven concurrences and the volume under random U(2)^4."""
    if trials < 1:
        raise SweepConfigError('trials must be at least 1')
    rng = np.random.default_rng(CONFIG['scan']['seed'] if seed is None else seed)
    base = concurrence_profile(state)
    base_vals = np.array(base.values())
    base_vol = tetra_report(build_edges(base)).volume
    worst = 0.0
    for _ in range(trials):
        us = [random_local_unitary(rng) for _ in range(4)]
        profile = concurrence_profile(apply_local_unitaries(state, us))
        vol = tetra_report(build_edges(profile)).volume
        worst = max(worst, float(np.max(np.abs(np.array(profile.values()) - base_vals))),
                    abs(vol - base_vol))
    return worst


def family_grid_check(family, ranges: Sequence[Tuple[float, float, float]], threads=None):
    """G and gradient positivity on a family grid, merged into one summary."""
    g = positivity_summary(sweep(SweepConfig('G', family=family, ranges=tuple(ranges), threads=threads)))
    d = positivity_summary(sweep(SweepConfig('gradient', family=family, ranges=tuple(ranges),
                                             threads=threads)))
    return {
        'family': family,
        'points': g['points'],
        'ok': g['ok'],
        'min_G': g.get('min_G'),
        'negative_G': g.get('negative_G', []),
        'min_partial': d.get('min_partial'),
        'negative_partials': d.get('negative_partials', []),
    }
