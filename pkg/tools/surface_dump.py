#!/usr/bin/env python3
"""Dump the G and gradient surfaces of the SLOCC families as CSV files.

Usage: python tools/surface_dump.py [OUT_DIR] [--step 0.25]
One file per (family, quantity), e.g. F6_G.csv and F6_gradient.csv, plus a
positivity summary per surface on stdout.
"""
import os
import sys

proj_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if proj_root not in sys.path:
    sys.path.insert(0, proj_root)
from monotonicity_lab import SweepConfig, grid_points, positivity_summary, sweep, sweep_specs
from slocc_families import subfamily_specs

# F8 is the c = 0 subfamily
SURFACES = {
    'F4': lambda s: ((s, 3.0, s),),
    'F5': lambda s: ((0.0, 3.0, s),),
    'F6': lambda s: ((0.0, 3.0, s), (0.0, 3.0, s)),
    'F7': lambda s: ((0.0, 3.0, s), (0.0, 3.0, s)),
    'F8': lambda s: ((0.5, 3.0, s), (0.5, 3.0, s), (0.0, 0.0, 1.0)),
}


def show(name, table):
    summary = positivity_summary(table)
    print(name, {k: v for k, v in summary.items() if not isinstance(v, list)})


def main(argv):
    out_dir = argv[0] if argv and not argv[0].startswith('--') else 'surfaces'
    step = float(argv[argv.index('--step') + 1]) if '--step' in argv else 0.25
    os.makedirs(out_dir, exist_ok=True)
    for family, ranges in SURFACES.items():
        for quantity in ('G', 'gradient'):
            path = os.path.join(out_dir, f'{family}_{quantity}.csv')
            show(f'{family} {quantity}', sweep(SweepConfig(quantity, family=family, ranges=ranges(step), out=path)))
    anti = subfamily_specs('F9:anti', grid_points(step, 3.0, step))
    for quantity in ('G', 'gradient'):
        path = os.path.join(out_dir, f'F9_anti_{quantity}.csv')
        show(f'F9 a=-d,b=c {quantity}', sweep_specs(quantity, anti, out=path))
    print('wrote surfaces to', out_dir)


if __name__ == '__main__':
    main(sys.argv[1:])
