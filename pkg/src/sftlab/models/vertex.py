"""The loop ("vertex") model with dots, crosses and arrows.

Symbols are ``o`` (a dot site), ``x`` (a cross site) and twelve arrows.  An
arrow is a pair of headings ``(entry, exit)``: the walk enters the site
moving in the entry direction and leaves moving in the exit direction, so
straight arrows have equal headings and corners turn by 90 degrees.  Arrow
names are the two heading letters, e.g. ``EN`` enters heading east and
turns north.

The allowed cross patterns are generated from four rules rather than
listed:

* two arrows may only be neighbours when one feeds the other head to tail;
* every ``o`` neighbour of an arrow lies on the arrow's left, so arrows
  circle dots counterclockwise;
* every ``x`` neighbour lies on the arrow's right, so arrows circle crosses
  clockwise;
* a loop must enclose at least one site, so a corner is never followed by a
  corner turning the same way (that would close a 2x2 loop).

For a straight arrow "left" and "right" are the two sides off the path.  A
corner has both off-path sides on the outside of the turn: for a left turn
that is the right-hand side (crosses), for a right turn the left-hand side
(dots).  A cross pattern is allowed when its four centre-arm pairs obey the
rules and it extends to a 3x3 block in which every nearest-neighbour pair
does.  That extension step removes arm combinations around a dot or cross
that would force two unrelated arrows to touch at a diagonal cell.
"""

import itertools

import numpy as np

from ..lattice import Site
from ..sft import CROSS, SftSpec

DIRS = {"E": Site(1, 0), "N": Site(0, 1), "W": Site(-1, 0), "S": Site(0, -1)}
DIR_NAME = {v: k for k, v in DIRS.items()}

DOT = "o"
CROSS_SYM = "x"

STRAIGHT = ("EE", "NN", "WW", "SS")
LEFT_TURNS = ("EN", "NW", "WS", "SE")
RIGHT_TURNS = ("ES", "SW", "WN", "NE")
ARROWS = STRAIGHT + LEFT_TURNS + RIGHT_TURNS
ALPHABET = (DOT, CROSS_SYM) + ARROWS

PRETTY = {
    "o": "⊙", "x": "⊗",
    "EE": "→", "NN": "↑", "WW": "←", "SS": "↓",
}


def rot90(v):
    return Site(-v[1], v[0])


def rotm90(v):
    return Site(v[1], -v[0])


def is_arrow(name):
    return len(name) == 2


def headings(name):
    return DIRS[name[0]], DIRS[name[1]]


def turn(name):
    """'S' for straight, 'L' for a left turn, 'R' for a right turn."""
    h_in, h_out = headings(name)
    if h_in == h_out:
        return "S"
    return "L" if h_out == rot90(h_in) else "R"


def path_sides(name):
    h_in, h_out = headings(name)
    return (-h_in, h_out)


def side_colour(name, u):
    """Colour required on side ``u`` of an arrow, or None if the path uses that side."""
    if u in path_sides(name):
        return None
    t = turn(name)
    if t == "R":
        return DOT
    if t == "L":
        return CROSS_SYM
    h = DIRS[name[0]]
    return DOT if u == rot90(h) else CROSS_SYM


def pair_ok(a, b, u):
    """Rule check for symbol ``a`` at ``z`` and ``b`` at ``z + u``."""
    u = Site(*u)
    if not is_arrow(a) and not is_arrow(b):
        return a == b
    if not is_arrow(a):
        return side_colour(b, -u) == a
    if not is_arrow(b):
        return side_colour(a, u) == b
    a_in, a_out = headings(a)
    b_in, b_out = headings(b)
    if a_out == u and b_in == u:
        first, second = a, b
    elif b_out == -u and a_in == -u:
        first, second = b, a
    else:
        return False
    # two successive turns the same way close a loop around no site
    return not (turn(first) != "S" and turn(first) == turn(second))


_CORNER_OFFSETS = ((Site(1, 1), 1, 2), (Site(-1, 1), 2, 3), (Site(-1, -1), 3, 4), (Site(1, -1), 4, 1))


def _cross_candidates():
    """Cross patterns (centre, E, N, W, S) whose centre-arm pairs obey the rules."""
    out = []
    for c in ALPHABET:
        arms = []
        for w in CROSS[1:]:
            arms.append([b for b in ALPHABET if pair_ok(c, b, w)])
        for combo in itertools.product(*arms):
            out.append((c,) + combo)
    return out


def _extends_to_block(pattern):
    # each diagonal cell touches two arms; it needs a symbol compatible with both
    for diag, i, j in _CORNER_OFFSETS:
        a, b = pattern[i], pattern[j]
        wa, wb = CROSS[i], CROSS[j]
        ua = diag - wa
        ub = diag - wb
        if not any(pair_ok(a, d, ua) and pair_ok(b, d, ub) for d in ALPHABET):
            return False
    return True


def _all_straight(pattern):
    return all(is_arrow(a) and turn(a) == "S" for a in pattern[1:])


def vertex_patterns(rule_d=False):
    pats = [p for p in _cross_candidates() if _extends_to_block(p)]
    if rule_d:
        pats = [p for p in pats if is_arrow(p[0]) or not _all_straight(p)]
    return pats


def vertex_spec(rule_d=False):
    """Base loop model on the cross window.

    With ``rule_d`` dot and cross sites may not have four straight arrows as
    neighbours, which removes the smallest (8-site) loops.
    """
    index = {a: i for i, a in enumerate(ALPHABET)}
    rows = [[index[a] for a in p] for p in vertex_patterns(rule_d)]
    return SftSpec(ALPHABET, CROSS, allowed=rows, name="vertex-d" if rule_d else "vertex", prune=False)


def arrow_energies(spec=None):
    """One-letter energy: 1 on arrows, 0 on dots and crosses."""
    names = ALPHABET if spec is None else spec.alphabet
    return np.array([1.0 if is_arrow(_base_name(a)) else 0.0 for a in names])


def _base_name(name):
    return name.split(":", 1)[0]


def colour_class(name):
    """'o', 'x' or 'a' (arrow) for a base or toned symbol name."""
    b = _base_name(name)
    return "a" if is_arrow(b) else b


# -- census ---------------------------------------------------------------


def arm_type(centre, arm, u):
    """Classify an arm of a dot or cross centre as 'c', 'straight', 'in' or 'out'.

    'in' arms bring the loop towards the centre's neighbourhood (the corner
    whose exit continues around the centre), 'out' arms carry it away.
    """
    if not is_arrow(arm):
        return "c"
    t = turn(arm)
    if t == "S":
        return "straight"
    h_in, h_out = headings(arm)
    # the arm turns; it is 'in' when it enters from the far side of the arm
    return "in" if -h_in == Site(*u) else "out"


def census(spec=None):
    """Counts of allowed cross patterns by centre type."""
    spec = spec or vertex_spec()
    pats = spec.allowed_patterns()
    names = spec.alphabet
    out = {"total": len(pats), "straight": 0, "corner": 0, "dot": 0, "cross": 0}
    for p in pats:
        c = _base_name(names[p[0]])
        if c == DOT:
            out["dot"] += 1
        elif c == CROSS_SYM:
            out["cross"] += 1
        elif turn(c) == "S":
            out["straight"] += 1
        else:
            out["corner"] += 1
    return out


ARM_TYPES = ("c", "straight", "in", "out")


def dot_transfer_matrix(spec=None):
    """4x4 matrix of which arm types may follow each other counterclockwise around a dot.

    Read off the allowed dot-centred patterns: entry (i, j) is 1 when some
    allowed pattern has arm type i followed by arm type j.
    """
    spec = spec or vertex_spec()
    pats = spec.allowed_patterns()
    names = spec.alphabet
    M = np.zeros((4, 4), dtype=np.int64)
    for p in pats:
        if _base_name(names[p[0]]) != DOT:
            continue
        types = [ARM_TYPES.index(arm_type(DOT, names[p[i]], CROSS[i])) for i in range(1, 5)]
        for a in range(4):
            M[types[a], types[(a + 1) % 4]] = 1
    return M


# -- symmetries -----------------------------------------------------------

DIHEDRAL = tuple(
    np.array(m, dtype=np.int64)
    for m in (
        [[1, 0], [0, 1]], [[0, -1], [1, 0]], [[-1, 0], [0, -1]], [[0, 1], [-1, 0]],
        [[1, 0], [0, -1]], [[-1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1], [-1, 0]],
    )
)


def _apply(g, v):
    w = g @ np.array([v[0], v[1]])
    return Site(int(w[0]), int(w[1]))


def dihedral_symbol_map(g):
    """Symbol permutation for lattice symmetry ``g``.

    Arrows are moved geometrically.  Reflections reverse orientation, so they
    also exchange dots and crosses.
    """
    swap = round(np.linalg.det(g)) < 0
    out = {}
    for a in ALPHABET:
        if is_arrow(a):
            h_in, h_out = headings(a)
            out[a] = DIR_NAME[_apply(g, h_in)] + DIR_NAME[_apply(g, h_out)]
        elif swap:
            out[a] = CROSS_SYM if a == DOT else DOT
        else:
            out[a] = a
    return out


def transform_pattern(pattern, g, window=CROSS):
    """Image of a window pattern (symbol names) under lattice symmetry ``g``."""
    smap = dihedral_symbol_map(g)
    pos = {w: i for i, w in enumerate(window)}
    out = [None] * len(window)
    for i, w in enumerate(window):
        out[pos[_apply(g, w)]] = smap[pattern[i]]
    return tuple(out)


def tau_symbol(name):
    """Exchange dots and crosses and reverse arrows."""
    if name == DOT:
        return CROSS_SYM
    if name == CROSS_SYM:
        return DOT
    h_in, h_out = headings(name)
    return DIR_NAME[-h_out] + DIR_NAME[-h_in]


def tau_index_map(alphabet=ALPHABET):
    return np.array([alphabet.index(tau_symbol(a)) for a in alphabet], dtype=np.int64)


# -- grey images ----------------------------------------------------------


def gray3(values, alphabet=ALPHABET):
    """Map an array of vertex symbol indices to 'o', 'x' or 'a' codes (0, 1, 2)."""
    table = np.array([{"o": 0, "x": 1, "a": 2}[colour_class(a)] for a in alphabet], dtype=np.int64)
    return table[np.asarray(values)]


def gray7(values, alphabet):
    """Grey levels of a toned loop configuration: arrows to 0, toned dots to
    ``+k`` and toned crosses to ``-k`` where ``k`` is the tone plus one."""
    table = np.zeros(len(alphabet), dtype=np.int64)
    for i, a in enumerate(alphabet):
        c = colour_class(a)
        if c == "a":
            continue
        k = int(a.split(":", 1)[1]) + 1 if ":" in a else 1
        table[i] = k if c == "o" else -k
    return table[np.asarray(values)]
