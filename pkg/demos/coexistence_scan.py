"""Boundary sensitivity of the toned loop model and of the toned Potts model.

A short version of the acceptance scan: the centre of a pinned box remembers
its frame once N is large enough.  Expect a gap near 0 at N = 1 and near 1
at N = 3 for the loop model; for Potts the gap rises with N.

Run: python3 demos/coexistence_scan.py   (about a minute)
"""

from sftlab.sampling.scan import phase_scan, potts_family, transition_location, vertex_family

for fam, grid, sweeps in ((vertex_family(), [1, 3], 1000), (potts_family(2), [1, 2, 3, 4], 500)):
    rows = phase_scan(fam, grid, replicates=4, seed=1, size=24, sweeps=sweeps)
    print(fam.name)
    for r in rows:
        print(f"  N={r['N']}  beta={r['beta']:.3f}  gap={r['gap']:+.3f} +- {r['gap_err']:.3f}")
    print("  gap reaches 0.5 near N =", transition_location(rows),
          "; thresholds", [round(t, 3) for t in fam.thresholds])
