"""Binary SFT with two forbidden diagonal pinches, and its map onto the loop model.

The map runs in two steps.  ``psi`` replaces every 1 by a 3x3 block of 1s
(a 3x3 max filter).  ``q`` then reads the 3x3 neighbourhood of each site:
0 at the centre gives a cross, all 1s give a dot, and a 1 at the edge of a
region of 1s gives the arrow that walks counterclockwise around the region
(with the 0s on its right).  ``q`` is tabulated from three base
neighbourhoods (a straight edge, a convex corner and a concave corner) and
their rotations; anything else is reported as unclassifiable.
"""

import itertools

import numpy as np
from scipy.ndimage import maximum_filter

from ..errors import NotAdmissible, UnclassifiableNeighborhood
from ..lattice import Patch
from ..sft import SftSpec, check_local, square_window
from . import vertex

_FAMILIES = (
    ("**000",
     "*1000",
     "00000",
     "0001*",
     "000**"),
    ("000**",
     "0001*",
     "00000",
     "*1000",
     "**000"),
)


def _expand(rows):
    cells = "".join(rows)
    stars = [i for i, ch in enumerate(cells) if ch == "*"]
    base = [0 if ch in "0*" else 1 for ch in cells]
    for bits in itertools.product((0, 1), repeat=len(stars)):
        p = list(base)
        for i, b in zip(stars, bits):
            p[i] = b
        yield tuple(p)


def yprime_forbidden():
    out = []
    for fam in _FAMILIES:
        out.extend(_expand(fam))
    return out


def yprime_spec():
    """Binary SFT on the 5x5 window given by its forbidden patterns."""
    return SftSpec(("0", "1"), square_window(2), forbidden=yprime_forbidden(), name="yprime")


def psi(y):
    """3x3 max filter, keeping only cells whose 3x3 neighbourhood lies inside ``y``."""
    y = np.asarray(y, dtype=np.int64)
    m = maximum_filter(y, size=3, mode="constant", cval=0)
    return m[1:-1, 1:-1]


# 3x3 neighbourhoods are written with row 0 north
_BASE_CASES = (
    (((0, 1, 1), (0, 1, 1), (0, 1, 1)), "SS"),
    (((0, 0, 0), (0, 1, 1), (0, 1, 1)), "WS"),
    (((1, 1, 1), (1, 1, 1), (1, 1, 0)), "NE"),
)


def _rotate_arrow(name, k):
    h_in, h_out = vertex.headings(name)
    for _ in range(k):
        h_in, h_out = vertex.rot90(h_in), vertex.rot90(h_out)
    return vertex.DIR_NAME[h_in] + vertex.DIR_NAME[h_out]


def q_table():
    """Map from 9-bit neighbourhood tuples (row-major, north first) to symbol names."""
    table = {}
    for pat, name in _BASE_CASES:
        arr = np.array(pat)
        for k in range(4):
            key = tuple(np.rot90(arr, k).ravel().tolist())
            sym = _rotate_arrow(name, k)
            if table.get(key, sym) != sym:
                raise AssertionError("rotations of the base cases disagree")
            table[key] = sym
    return table


_Q = None


def q_map(window):
    """Loop-model symbol name for one 3x3 binary neighbourhood."""
    global _Q
    if _Q is None:
        _Q = q_table()
    w = np.asarray(window).reshape(3, 3)
    if w[1, 1] == 0:
        return vertex.CROSS_SYM
    if w.all():
        return vertex.DOT
    key = tuple(int(v) for v in w.ravel())
    if key not in _Q:
        raise UnclassifiableNeighborhood("neighbourhood matches no tabulated case", pattern=key)
    return _Q[key]


def factor_chain(y, check=True):
    """Apply ``psi`` then ``q`` to a binary array; returns loop-model symbol indices.

    The output is two cells smaller than ``y`` on every side.  With
    ``check`` the result must be locally admissible in the loop model,
    otherwise ``NotAdmissible`` is raised.
    """
    m = psi(y)
    h, w = m.shape
    out = np.zeros((h - 2, w - 2), dtype=np.int64)
    index = {a: i for i, a in enumerate(vertex.ALPHABET)}
    for r in range(h - 2):
        for c in range(w - 2):
            try:
                out[r, c] = index[q_map(m[r:r + 3, c:c + 3])]
            except UnclassifiableNeighborhood as exc:
                exc.site = (r, c)
                raise
    if check:
        spec = vertex.vertex_spec()
        bad = check_local(spec, Patch.from_array(out))
        if bad:
            raise NotAdmissible("factor chain produced a forbidden window", witness=bad)
    return out


def random_yprime_window(shape, rng, density=0.15, max_rounds=1000):
    """Bernoulli array with every forbidden pinch removed.

    Ones are drawn independently; then, while some window matches a
    forbidden pattern, one of its two pinching 1s is cleared at random.
    """
    spec = yprime_spec()
    y = (rng.random(shape) < density).astype(np.int64)
    for _ in range(max_rounds):
        bad = check_local(spec, Patch.from_array(y))
        if not bad:
            return y
        h = y.shape[0]
        s = bad[0]
        r, c = h - 1 - s.y, s.x
        # the two 1s sit at diagonal offsets (+-1, +-1) of the anchor
        ones = [(r + dr, c + dc) for dr in (-1, 1) for dc in (-1, 1)
                if 0 <= r + dr < h and 0 <= c + dc < y.shape[1] and y[r + dr, c + dc]]
        rr, cc = ones[int(rng.integers(len(ones)))]
        y[rr, cc] = 0
    raise RuntimeError("could not clear forbidden patterns")
