"""Walk through the loop model: its rules, its contours and the Peierls count.

Run: python3 demos/loop_model_tour.py
"""

import numpy as np

from sftlab import contours
from sftlab.lattice import format_patch
from sftlab.models import vertex

spec = vertex.vertex_spec()
print("allowed cross patterns by centre type:", vertex.census(spec))

M = vertex.dot_transfer_matrix(spec)
print("arm-type matrix around a dot:\n", M)
print("trace(M^4) =", int(np.trace(np.linalg.matrix_power(M, 4))), "(one per dot-centred pattern)")

# the smallest loop: a clockwise ring of arrows around a cross, in a sea of dots
ring = contours.encircling_loops(8)
cw = next(c for c in ring if contours.shoelace(c) < 0)
patch = contours.embed_loop(cw, spec)
names = [vertex.PRETTY.get(a, a) for a in spec.alphabet]
print(format_patch(patch, names))

path = contours.extract(patch).closed_paths()[0]
print("orientation:", path.orientation, "length:", len(path), "interior:", list(path.interior))
flipped = contours.tau_flip(patch, path)
print("arrows before/after flipping the loop:", contours.arrow_count(patch), contours.arrow_count(flipped))

print("\nell  loops  bound            ratio")
for ell in (8, 10, 12):
    r = contours.enumerate_encircling_loops(ell)
    print(f"{ell:3d}  {r.count:5d}  {r.bound:14.1f}  {r.ratio:.2e}")

for beta in (1.0, 1.5, 2.0):
    p = contours.exact_loop_probability(beta)
    print(f"beta={beta}: P(8-loop around the centre of a 5x5 dot-pinned box) = {p:.3e}"
          f"  bound = {contours.peierls_bound(beta, 8):.3f}")
