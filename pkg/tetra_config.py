#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
tetra_config.py - persistent settings for the concurrence-tetrahedron toolkit.

Settings live in tetra_config.json next to this file. Anything missing from the
file falls back to DEFAULTS, and a few values can be overridden from the
environment (TETRA_GME_THREADS, TETRA_GME_SEED, TETRA_GME_CONFIG).
"""

import copy
import json
import logging
import os

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = os.getenv(
    'TETRA_GME_CONFIG',
    os.path.join(os.path.dirname(os.path.abspath(__file__)), 'tetra_config.json'),
)

DEFAULTS = {
    'tolerances': {
        'normalization': 1e-12,
        'hermitian': 1e-12,
        'trace': 1e-12,
        'eigen': 1e-10,
        'purity_clamp': 1e-10,
        'zero': 1e-9,
        'slack': 1e-9,
        'radicand': 1e-9,
        'heron': 1e-12,
        'tie': 1e-12,
        'oracle': 1e-10,
    },
    'grid': {
        'start': 0.0,
        'stop': 3.0,
        'step_one_param': 0.05,
        'step_two_param': 0.1,
    },
    'gradient': {
        'relative_step': 1e-6,
        'negativity_floor': -1e-6,
    },
    'scan': {
        'seed': 20240611,
        'batch_size': 4096,
    },
    'threads': None,
}


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, val in (override or {}).items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def reset_defaults():
    """Return a fresh copy of the built-in settings."""
    return copy.deepcopy(DEFAULTS)


def load_config(path=DEFAULT_CONFIG):
    """Load settings from `path` merged over DEFAULTS, then apply env overrides."""
    cfg = reset_defaults()
    if path and os.path.exists(path):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                cfg = _merge(cfg, json.load(f))
        except (OSError, ValueError) as e:
            logger.warning('ignoring unreadable config %s: %s', path, e)

    threads = os.getenv('TETRA_GME_THREADS')
    if threads:
        try:
            cfg['threads'] = max(1, int(threads))
        except ValueError:
            logger.warning('TETRA_GME_THREADS=%r is not an integer; ignored', threads)
    seed = os.getenv('TETRA_GME_SEED')
    if seed:
        try:
            cfg['scan']['seed'] = int(seed)
        except ValueError:
            logger.warning('TETRA_GME_SEED=%r is not an integer; ignored', seed)
    return cfg


def save_config(cfg, path=DEFAULT_CONFIG):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(cfg, f, indent=2)


CONFIG = load_config()
TOL = CONFIG['tolerances']
