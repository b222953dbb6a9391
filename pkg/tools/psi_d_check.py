#!/usr/bin/env python3
"""Compare the psiD / psiC numbers against the printed ones and show the F5 audit.

Prints the engine profile, volume and gmc of psiC and psiD, the F5 closed-form
audit at the psiD parameter, and any ledger entries recorded on the way.
"""
import json
import math
import os
import sys

proj_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if proj_root not in sys.path:
    sys.path.insert(0, proj_root)
import discrepancy_ledger
from gme_measures import inequivalence_witness, v1234
from slocc_families import PSI_D_A2, FamilySpec, benchmark_state, closed_form_profile

PRINTED = {'psiC': (0.1084, 0.8), 'psiD': (0.1624, 0.8)}


def main():
    for name, (vol, gmc) in PRINTED.items():
        report = v1234(benchmark_state(name))
        print(f'== {name} ==')
        print('profile:', json.dumps(report.profile.to_dict()))
        print(f'volume  engine {report.volume:.6f}  printed {vol}')
        print(f'gmc     engine {report.gmc:.6f}  printed {gmc}')
        if abs(report.volume - vol) > 1e-3:
            discrepancy_ledger.record(f'{name}-volume-tool', f'V1234({name})', vol, f'{report.volume:.6f}')
    audit = closed_form_profile(FamilySpec('F5', (math.sqrt(PSI_D_A2),)))
    print('\n== F5 audit at a^2 = (51 + 5 sqrt113)/32 ==')
    for key in audit.flags:
        print(f'{key:8s} printed {audit.printed[key]!r:24} engine {audit.engine[key]!r:24} {audit.flags[key]}')
    print('\n== GMC vs volume ==')
    print(json.dumps(inequivalence_witness(), indent=2))
    print('\nledger version', discrepancy_ledger.LEDGER_VERSION, 'entries', len(discrepancy_ledger.entries()))


if __name__ == '__main__':
    main()
