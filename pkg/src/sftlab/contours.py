"""Arrow paths in loop-model patches, loop enumeration and Peierls estimates.

The arrow sites of a loop-model patch split into head-to-tail paths.  A
closed path runs counterclockwise around dots and clockwise around
crosses.  Flipping a closed path (arrows become the outside colour, the
inside is mapped by the dot/cross exchange with arrows reversed) lowers
the energy by the path length, which together with the count of candidate
loops gives the Peierls bound.
"""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import budget
from .errors import InconsistentPath, InteriorClipped, LoopNotClosed, SearchBudgetExceeded
from .lattice import Patch, Site, Volume
from .models import vertex
from .sft import check_local

_STEPS = tuple(vertex.DIRS.values())


@dataclass
class Path:
    sites: list
    symbols: list
    closed: bool
    orientation: str = None  # "ccw", "cw" or None for open paths
    interior: Volume = None

    def __len__(self):
        return len(self.sites)


@dataclass
class ContourSet:
    arrow_sites: Volume
    paths: list = field(default_factory=list)

    def closed_paths(self):
        return [p for p in self.paths if p.closed]

    def min_path_distance(self):
        """Smallest Chebyshev distance between sites of two different paths."""
        best = math.inf
        for i, a in enumerate(self.paths):
            for b in self.paths[i + 1:]:
                for s in a.sites:
                    for t in b.sites:
                        best = min(best, max(abs(s.x - t.x), abs(s.y - t.y)))
        return best


def shoelace(sites):
    """Twice the signed area of the polygon through the site centres."""
    n = len(sites)
    return sum(sites[i].x * sites[(i + 1) % n].y - sites[(i + 1) % n].x * sites[i].y for i in range(n))


def enclosed_sites(sites):
    """Sites not on the cycle and not 4-connected to the outside of its bounding box."""
    on = set(sites)
    xs = [s.x for s in sites]
    ys = [s.y for s in sites]
    x0, x1, y0, y1 = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
    seen = {Site(x0, y0)}
    todo = deque(seen)
    while todo:
        s = todo.popleft()
        for d in _STEPS:
            t = s + d
            if x0 <= t.x <= x1 and y0 <= t.y <= y1 and t not in on and t not in seen:
                seen.add(t)
                todo.append(t)
    return Volume(Site(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1)
                  if Site(x, y) not in on and Site(x, y) not in seen)


def extract(patch, alphabet=vertex.ALPHABET):
    """Split the arrow sites of ``patch`` into maximal head-to-tail paths.

    Paths leaving the volume are open, and so are paths that break between
    two rim sites, since no window of the volume checks such a pair.
    Closed paths get an orientation from their signed area (checked against
    their turn count) and an interior.
    """
    names = [vertex._base_name(a) for a in alphabet]
    sym = {s: names[v] for s, v in zip(patch.volume.sites, patch.symbols)}
    arrows = {s: n for s, n in sym.items() if vertex.is_arrow(n)}

    def interior_site(s):
        return all(s + d in sym for d in _STEPS)

    def step(s, forward):
        h_in, h_out = vertex.headings(arrows[s])
        t = s + h_out if forward else s - h_in
        if t not in sym:
            return None
        # a pair on the rim of the volume lies in no checked window
        if not (interior_site(s) or interior_site(t)):
            if t not in arrows or vertex.headings(arrows[t])[0 if forward else 1] != (h_out if forward else h_in):
                return None
        if t not in arrows:
            raise InconsistentPath(f"arrow at {tuple(s)} points at a non-arrow site {tuple(t)}")
        t_in, t_out = vertex.headings(arrows[t])
        if (forward and t_in != h_out) or (not forward and t_out != h_in):
            raise InconsistentPath(f"arrows at {tuple(s)} and {tuple(t)} do not join head to tail")
        return t

    seen = set()
    paths = []
    for start in sorted(arrows, key=lambda s: (-s.y, s.x)):
        if start in seen:
            continue
        fwd = [start]
        closed = False
        while True:
            t = step(fwd[-1], True)
            if t is None:
                break
            if t == start:
                closed = True
                break
            if t in fwd:
                raise InconsistentPath("path runs into itself")
            fwd.append(t)
        back = []
        if not closed:
            s = start
            while True:
                t = step(s, False)
                if t is None:
                    break
                back.append(t)
                s = t
        seq = back[::-1] + fwd
        seen.update(seq)
        p = Path(seq, [arrows[s] for s in seq], closed)
        if closed:
            area = shoelace(seq)
            lefts = sum(1 for n in p.symbols if vertex.turn(n) == "L")
            rights = sum(1 for n in p.symbols if vertex.turn(n) == "R")
            p.orientation = "ccw" if area > 0 else "cw"
            if lefts - rights != (4 if area > 0 else -4):
                raise InconsistentPath("turn count disagrees with the signed area")
            p.interior = enclosed_sites(seq)
        paths.append(p)
    return ContourSet(Volume(arrows), paths)


# -- transition matrix of successive turns -------------------------------

TURNS = ("S", "L", "R")


def m_alpha():
    """Which turn may follow which along a path, rows/columns ordered S, L, R."""
    return np.array([[1, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=np.int64)


def expected_spectrum():
    r = math.sqrt(2.0)
    return np.array(sorted([1 + r, 1 - r, -1.0]))


def spectrum_check():
    """Largest gap between the eigenvalues and ``{1+sqrt2, 1-sqrt2, -1}``."""
    roots = np.sort(np.roots(np.poly(m_alpha())).real)
    return float(np.max(np.abs(roots - expected_spectrum())))


def trace_power(ell):
    """Exact ``trace(M**ell)`` with Python integers."""
    m = [[int(v) for v in row] for row in m_alpha()]
    p = [[int(i == j) for j in range(3)] for i in range(3)]
    for _ in range(ell):
        p = [[sum(p[i][k] * m[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    return p[0][0] + p[1][1] + p[2][2]


def trace_closed_form(ell):
    """``(1+sqrt2)**ell + (1-sqrt2)**ell + (-1)**ell`` as an exact integer."""
    a, b = 2, 2  # Pell-Lucas numbers, Q0 and Q1
    for _ in range(ell):
        a, b = b, 2 * b + a
    return a + (-1) ** ell


# -- loop enumeration -----------------------------------------------------


def _arrow(h_in, h_out):
    return vertex.DIR_NAME[h_in] + vertex.DIR_NAME[h_out]


def _reverse_loop(sites):
    return sites[::-1]


def loop_symbols(sites):
    """Arrow names along a closed cycle of sites."""
    n = len(sites)
    out = []
    for i in range(n):
        h_in = sites[i] - sites[i - 1]
        h_out = sites[(i + 1) % n] - sites[i]
        out.append(_arrow(Site(*h_in), Site(*h_out)))
    return out


def embed_loop(sites, spec=None, pad=2):
    """Place a loop in the sea matching its orientation and return the patch.

    A counterclockwise loop sits in crosses with dots inside, a clockwise
    one the other way round.
    """
    spec = spec or vertex.vertex_spec()
    names = loop_symbols(sites)
    ccw = shoelace(sites) > 0
    inner, outer = (vertex.DOT, vertex.CROSS_SYM) if ccw else (vertex.CROSS_SYM, vertex.DOT)
    inside = set(enclosed_sites(sites))
    xs = [s.x for s in sites]
    ys = [s.y for s in sites]
    index = {a: i for i, a in enumerate(spec.alphabet)}
    on = dict(zip(sites, names))
    d = {}
    for x in range(min(xs) - pad, max(xs) + pad + 1):
        for y in range(min(ys) - pad, max(ys) + pad + 1):
            s = Site(x, y)
            d[s] = index[on[s] if s in on else (inner if s in inside else outer)]
    return Patch.from_dict(d)


def _ccw_loops(ell, node_budget):
    """Counterclockwise induced cycles of length ``ell`` with no two equal
    successive turns and the origin strictly inside."""
    half = ell // 2
    nodes = 0
    found = []
    for y0 in range(-half + 1, 0):
        for x0 in range(-half, half + 1):
            s0 = Site(x0, y0)
            last = s0 + vertex.DIRS["N"]
            path = [s0, s0 + vertex.DIRS["E"]]
            on = set(path)
            turns = ["L"]  # at s0 the loop comes down and leaves east

            def later(s):
                return s.y > y0 or (s.y == y0 and s.x > x0)

            def dfs():
                nonlocal nodes
                nodes += 1
                if nodes > node_budget:
                    raise SearchBudgetExceeded(f"loop enumeration passed {node_budget} nodes", node_budget)
                cur = path[-1]
                h_in = cur - path[-2]
                if len(path) == ell:
                    if cur != last:
                        return
                    t_last = vertex.turn(_arrow(Site(*h_in), vertex.DIRS["S"]))
                    if t_last != "S" and (t_last == turns[-1] or t_last == turns[0]):
                        return
                    if Site(0, 0) in set(enclosed_sites(path)):
                        found.append(list(path))
                    return
                remaining = ell - len(path)
                for d in _STEPS:
                    nxt = cur + d
                    if nxt in on or not later(nxt):
                        continue
                    if (nxt == last) != (remaining == 1):
                        continue
                    if abs(nxt.x - last.x) + abs(nxt.y - last.y) > remaining - 1:
                        continue
                    # induced: the new site touches only its predecessor (and s0 when closing)
                    if any(nxt + e in on and nxt + e != cur and not (nxt == last and nxt + e == s0) for e in _STEPS):
                        continue
                    t = vertex.turn(_arrow(Site(*h_in), d))
                    if t != "S" and t == turns[-1]:
                        continue
                    path.append(nxt)
                    on.add(nxt)
                    turns.append(t)
                    dfs()
                    turns.pop()
                    on.discard(nxt)
                    path.pop()

            dfs()
    return found


@dataclass
class LoopCount:
    ell: int
    count: int
    ccw: int
    cw: int
    bound: float

    @property
    def ratio(self):
        return self.count / self.bound


def encircling_loops(ell, node_budget=None, spec=None):
    """All oriented loops of length ``ell`` around the origin that embed admissibly.

    Returns a list of site cycles; each cycle is traversed in its own
    orientation, so a counterclockwise loop and its reversal both appear.
    """
    if ell % 2 or ell < 4:
        return []
    spec = spec or vertex.vertex_spec()
    node_budget = budget.search_nodes(node_budget)
    out = []
    for loop in _ccw_loops(ell, node_budget):
        for cyc in (loop, _reverse_loop(loop)):
            if not check_local(spec, embed_loop(cyc, spec)):
                out.append(cyc)
    return out


def bound_count(ell):
    return math.pi * math.ceil(ell / 2) ** 2 * trace_power(ell)


def enumerate_encircling_loops(ell, node_budget=None):
    """Exact number of admissible loops of length ``ell`` around the origin,
    with the comparison value ``pi * ceil(ell/2)**2 * trace(M**ell)``."""
    loops = encircling_loops(ell, node_budget)
    ccw = sum(1 for c in loops if shoelace(c) > 0)
    return LoopCount(ell, len(loops), ccw, len(loops) - ccw, bound_count(ell))


# -- flipping a loop ------------------------------------------------------


def tau_name(name):
    base, _, tone = name.partition(":")
    t = vertex.tau_symbol(base)
    return f"{t}:{tone}" if tone else t


def tau_flip(patch, path, alphabet=vertex.ALPHABET):
    """Erase a closed path and apply the dot/cross exchange inside it.

    The path sites take the colour outside the loop (crosses for a
    counterclockwise loop, dots for a clockwise one); interior sites are
    exchanged dot for cross with arrows reversed.
    """
    if not path.closed:
        raise LoopNotClosed("only closed paths can be flipped")
    if any(s not in patch.volume for s in path.interior):
        raise InteriorClipped("the loop's interior is not inside the patch")
    index = {a: i for i, a in enumerate(alphabet)}
    fill = vertex.CROSS_SYM if path.orientation == "ccw" else vertex.DOT
    if fill not in index:
        fill += ":0"
    d = patch.as_dict()
    for s in path.sites:
        d[s] = index[fill]
    for s in path.interior:
        d[s] = index[tau_name(alphabet[d[s]])]
    return Patch.from_dict(d)


def arrow_count(patch, alphabet=vertex.ALPHABET):
    arrow = [vertex.colour_class(a) == "a" for a in alphabet]
    return sum(1 for v in patch.symbols if arrow[v])


# -- Peierls estimate -----------------------------------------------------


def beta_star():
    return math.log(1.0 + math.sqrt(2.0))


def peierls_bound(beta, ell):
    """``3 pi ceil(ell/2)**2 exp(ell (beta_star - beta))``."""
    return 3.0 * math.pi * math.ceil(ell / 2) ** 2 * math.exp(ell * (beta_star() - beta))


def peierls_partial_sums(beta, ell_max, ell_min=8):
    total = 0.0
    out = []
    for ell in range(ell_min, ell_max + 1, 2):
        total += peierls_bound(beta, ell)
        out.append(total)
    return out


def exact_loop_probability(beta, size=5, ell=8, node_budget=None):
    """Exact conditional probability that a closed path of length ``ell``
    surrounds the centre of a ``size`` x ``size`` box with a dot boundary.

    Every admissible filling is enumerated and weighted by
    ``exp(-beta * #arrows)``.
    """
    from .lattice import boundary, make_box, constant_patch
    from .sft import enumerate_patches

    spec = vertex.vertex_spec()
    vol = make_box(size // 2)
    ring = boundary(vol, 1, "l1")
    pb = constant_patch(ring, vertex.ALPHABET.index(vertex.DOT))
    centre = Site(0, 0)
    z = hit = 0.0
    for p in enumerate_patches(spec, vol, pb, node_budget=node_budget):
        w = math.exp(-beta * arrow_count(p))
        z += w
        cs = extract(p)
        if any(len(c) == ell and centre in c.interior for c in cs.closed_paths()):
            hit += w
    return hit / z
