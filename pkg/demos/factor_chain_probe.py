"""Push binary Y' configurations through the 3x3 max filter and the
neighbourhood rule onto the loop model, and see where the rule runs out.

Run: python3 demos/factor_chain_probe.py
"""

import numpy as np

from sftlab.errors import UnclassifiableNeighborhood
from sftlab.models import vertex, yprime

y = np.zeros((9, 9), dtype=int)
y[4, 4] = 1
out = yprime.factor_chain(y)
for row in out:
    print(" ".join(vertex.PRETTY.get(vertex.ALPHABET[v], vertex.ALPHABET[v]) for v in row))

rng = np.random.default_rng(0)
ok = 0
shapes = {}
for _ in range(200):
    w = yprime.random_yprime_window((10, 10), rng, density=0.05)
    try:
        yprime.factor_chain(w)
        ok += 1
    except UnclassifiableNeighborhood as exc:
        shapes[exc.pattern] = shapes.get(exc.pattern, 0) + 1
print(f"\n{ok}/200 random windows map cleanly; most common unclassified neighbourhoods:")
for pat, n in sorted(shapes.items(), key=lambda kv: -kv[1])[:3]:
    print(n, "x")
    print("\n".join(" ".join(map(str, pat[i:i + 3])) for i in (0, 3, 6)))
