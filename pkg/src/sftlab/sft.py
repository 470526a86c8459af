"""Two-dimensional subshifts of finite type given by a window and a pattern list.

A spec is an alphabet, a window (a tuple of offsets) and either the list of
allowed window patterns or the list of forbidden ones.  Patterns are stored
as integer codes ``sum(p[i] * A**i)`` where ``A`` is the alphabet size and
``i`` runs over window positions, so membership tests are plain array
lookups.
"""

import itertools

import numpy as np

from . import budget
from .errors import AlphabetBudgetExceeded, NotAdmissible, SpecFormatError
from .lattice import Patch, Site, Volume, box, boundary, fatten

CROSS = (Site(0, 0), Site(1, 0), Site(0, 1), Site(-1, 0), Site(0, -1))
CROSS_NAMES = ("o", "e1", "e2", "-e1", "-e2")
L_WINDOW = (Site(0, 0), Site(1, 0), Site(0, 1))
SINGLE = (Site(0, 0),)


def square_window(r):
    """Offsets of ``[-r, r]^2`` in canonical order."""
    return tuple(box(2 * r + 1, 2 * r + 1, (-r, -r)).sites)


def window_radius(window):
    return max(max(abs(w[0]), abs(w[1])) for w in window)


class SftSpec:
    """A nearest-window SFT: alphabet, window offsets and a pattern list.

    Exactly one of ``allowed`` or ``forbidden`` is given, as an iterable of
    patterns (sequences of symbol indices, one per window position) or as a
    2D integer array.  In allowed mode, symbols that occur in no allowed
    pattern are dropped unless ``prune=False``.
    """

    def __init__(self, alphabet, window, allowed=None, forbidden=None, name="", prune=True):
        if (allowed is None) == (forbidden is None):
            raise ValueError("give exactly one of allowed= or forbidden=")
        alphabet = tuple(str(a) for a in alphabet)
        if len(set(alphabet)) != len(alphabet):
            raise SpecFormatError("alphabet names must be distinct")
        for a in alphabet:
            if not a or any(ch.isspace() for ch in a) or a == "." or a.startswith("#"):
                raise SpecFormatError(f"invalid symbol name {a!r}")
        window = tuple(Site(int(w[0]), int(w[1])) for w in window)
        if len(set(window)) != len(window) or not window:
            raise SpecFormatError("window offsets must be distinct and non-empty")
        self.name = name
        self.window = window
        self.alphabet = alphabet
        self.mode = "allowed" if allowed is not None else "forbidden"
        rows = self._as_rows(allowed if allowed is not None else forbidden)
        if self.mode == "allowed" and prune and len(rows):
            used = np.unique(rows)
            if len(used) < len(alphabet):
                remap = -np.ones(len(alphabet), dtype=np.int64)
                remap[used] = np.arange(len(used))
                self.alphabet = tuple(alphabet[i] for i in used)
                rows = remap[rows]
        self._codes = np.unique(self.encode(rows)) if len(rows) else np.zeros(0, dtype=np.int64)
        self._code_set = None
        self._table_cache = None

    # -- encoding -------------------------------------------------------

    @property
    def size(self):
        return len(self.alphabet)

    @property
    def k(self):
        return len(self.window)

    def _as_rows(self, patterns):
        arr = np.asarray(list(patterns) if not isinstance(patterns, np.ndarray) else patterns, dtype=np.int64)
        if arr.size == 0:
            return np.zeros((0, self.k), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != self.k:
            raise SpecFormatError(f"patterns must have {self.k} entries")
        if arr.min() < 0 or arr.max() >= len(self.alphabet):
            raise SpecFormatError("pattern refers to a symbol outside the alphabet")
        return arr

    def encode(self, patterns):
        p = np.asarray(patterns, dtype=np.int64)
        weights = self.size ** np.arange(self.k, dtype=np.int64)
        return p @ weights

    def decode(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty(codes.shape + (self.k,), dtype=np.int64)
        rest = codes.copy()
        for i in range(self.k):
            out[..., i] = rest % self.size
            rest //= self.size
        return out

    def symbol(self, name):
        return self.alphabet.index(name)

    # -- membership -----------------------------------------------------

    def allows_codes(self, codes):
        hit = np.isin(np.asarray(codes, dtype=np.int64), self._codes)
        return hit if self.mode == "allowed" else ~hit

    def allows(self, pattern):
        if self._code_set is None:
            self._code_set = set(self._codes.tolist())
        code = 0
        mult = 1
        for s in pattern:
            code += int(s) * mult
            mult *= self.size
        return (code in self._code_set) == (self.mode == "allowed")

    @property
    def n_allowed(self):
        if self.mode == "allowed":
            return len(self._codes)
        return self.size ** self.k - len(self._codes)

    def allowed_codes(self, limit=None):
        """Sorted codes of all allowed patterns (materialised for forbidden mode)."""
        if self.mode == "allowed":
            return self._codes
        total = self.size ** self.k
        if total > budget.alphabet_size(limit) * 64:
            raise AlphabetBudgetExceeded(f"{total} window patterns is too many to list", total)
        return np.setdiff1d(np.arange(total, dtype=np.int64), self._codes)

    def allowed_patterns(self, limit=None):
        return self.decode(self.allowed_codes(limit))

    def forbidden_patterns(self):
        if self.mode != "forbidden":
            raise ValueError("spec is given by allowed patterns")
        return self.decode(self._codes)

    def dense_table(self, limit=50_000_000):
        """uint8 lookup array indexed by pattern code (1 = allowed)."""
        total = self.size ** self.k
        if total > limit:
            raise AlphabetBudgetExceeded(f"dense table of {total} entries exceeds {limit}", total)
        tab = np.zeros(total, dtype=np.uint8) if self.mode == "allowed" else np.ones(total, dtype=np.uint8)
        tab[self._codes] = 1 if self.mode == "allowed" else 0
        return tab

    def __repr__(self):
        return f"SftSpec({self.name or 'unnamed'}, |A|={self.size}, |window|={self.k}, {self.mode}={len(self._codes)})"

    def same_language(self, other):
        """True when both specs use the same alphabet, window and allowed set."""
        if self.alphabet != other.alphabet or self.window != other.window:
            return False
        if self.mode == other.mode == "forbidden":
            return np.array_equal(self._codes, other._codes)
        return np.array_equal(self.allowed_codes(), other.allowed_codes())


# -- local checks ---------------------------------------------------------


def window_codes(arr, window, alphabet_size, wrap=False):
    """Codes of the window pattern anchored at every cell of ``arr``.

    ``arr`` follows the patch convention (row 0 north).  Cells holding a
    negative value count as absent; without ``wrap`` a window that leaves the
    array or touches an absent cell gets code -1.
    """
    arr = np.asarray(arr, dtype=np.int64)
    h, w = arr.shape
    codes = np.zeros((h, w), dtype=np.int64)
    valid = np.ones((h, w), dtype=bool)
    mult = 1
    for dx, dy in window:
        if wrap:
            shifted = np.roll(arr, shift=(dy, -dx), axis=(0, 1))
        else:
            shifted = np.full((h, w), -1, dtype=np.int64)
            r0, r1 = max(0, dy), min(h, h + dy)
            c0, c1 = max(0, -dx), min(w, w - dx)
            if r0 < r1 and c0 < c1:
                shifted[r0:r1, c0:c1] = arr[r0 - dy:r1 - dy, c0 + dx:c1 + dx]
        valid &= shifted >= 0
        codes += np.where(shifted >= 0, shifted, 0) * mult
        mult *= alphabet_size
    codes[~valid] = -1
    return codes


def check_local(spec, patch):
    """Anchors of windows inside the patch whose pattern is not allowed.

    An empty list means the patch is locally admissible.
    """
    if len(patch) == 0:
        return []
    arr, (x0, y0) = patch.to_array()
    codes = window_codes(arr, spec.window, spec.size)
    inside = codes >= 0
    bad = np.zeros_like(inside)
    bad[inside] = ~spec.allows_codes(codes[inside])
    y1 = y0 + arr.shape[0] - 1
    rows, cols = np.nonzero(bad)
    return sorted((Site(x0 + int(c), y1 - int(r)) for r, c in zip(rows, cols)), key=lambda s: (-s.y, s.x))


def is_locally_admissible(spec, patch):
    return not check_local(spec, patch)


def array_is_admissible(spec, arr, wrap=False, table=None):
    """Vectorised admissibility of a full configuration array."""
    codes = window_codes(arr, spec.window, spec.size, wrap=wrap)
    codes = codes[codes >= 0]
    if table is not None:
        return bool(table[codes].all())
    return bool(spec.allows_codes(codes).all())


# -- search-based operations ----------------------------------------------


class ExtensionResult(tuple):
    """``(extendable, witness)`` with attribute access."""

    def __new__(cls, extendable, witness):
        return super().__new__(cls, (extendable, witness))

    @property
    def extendable(self):
        return self[0]

    @property
    def witness(self):
        return self[1]


def check_extendable(spec, patch, margin=3, metric="linf", node_budget=None):
    """Try to extend ``patch`` to a locally admissible patch on its margin fattening.

    Returns ``ExtensionResult(extendable, witness)``; the witness is the
    extended patch.  Raises ``SearchBudgetExceeded`` when the search does not
    settle within the node budget.
    """
    from ._search import Search

    if check_local(spec, patch):
        return ExtensionResult(False, None)
    region = fatten(patch.volume, margin, metric)
    free = [s for s in region if s not in patch.volume]
    search = Search(spec, free, patch.as_dict(), node_budget=node_budget)
    sol = search.first()
    if sol is None:
        return ExtensionResult(False, None)
    d = patch.as_dict()
    d.update(zip(free, sol))
    return ExtensionResult(True, Patch.from_dict(d))


def enumerate_patches(spec, volume, boundary_patch=None, domains=None, node_budget=None, rng=None):
    """Yield every locally admissible patch on ``volume``.

    With ``boundary_patch`` the boundary symbols are held fixed and every
    window inside ``volume`` union the boundary is checked; the yielded patches
    cover ``volume`` only.  Sites are filled in canonical order and symbols in
    alphabet order, so the output order is deterministic.
    """
    from ._search import Search

    fixed = boundary_patch.as_dict() if boundary_patch is not None else {}
    free = list(volume.sites)
    search = Search(spec, free, fixed, domains=domains, node_budget=node_budget)
    for sol in search.solutions(rng=rng):
        yield Patch(volume, sol)


def count_patches(spec, volume, boundary_patch=None, node_budget=None):
    n = 0
    for _ in enumerate_patches(spec, volume, boundary_patch, node_budget=node_budget):
        n += 1
    return n


def random_admissible_patch(spec, volume, rng, margin=0, metric="linf", node_budget=None):
    """A random locally admissible patch on ``volume`` that extends by ``margin``.

    The fill is a depth-first search with a shuffled symbol order, so the
    distribution is not uniform; it is meant for generating test inputs.
    """
    from ._search import Search

    region = fatten(volume, margin, metric) if margin else volume
    free = list(region.sites)
    sol = Search(spec, free, {}, node_budget=node_budget).first(rng=rng)
    if sol is None:
        raise NotAdmissible("no admissible patch on this volume")
    d = dict(zip(free, sol))
    return Patch(volume, tuple(d[s] for s in volume))


def gluing_check(spec, gap, radius=None, trials=100, seed=0, margin=None, node_budget=None):
    """Empirical strong-irreducibility check at a given gap.

    Each trial draws two admissible patches on boxes of the given radius,
    places them at Chebyshev distance ``gap`` and searches for a locally
    admissible fill of the bounding box of both, fattened by ``margin``.
    Returns a report dict with the success/failure/budget counts and the
    first failing pair, if any.
    """
    from ._search import Search
    from .errors import SearchBudgetExceeded

    wr = window_radius(spec.window)
    radius = wr if radius is None else radius
    margin = wr if margin is None else margin
    rng = np.random.default_rng(seed)
    base = box(2 * radius + 1, 2 * radius + 1, (-radius, -radius))
    report = {"trials": trials, "gap": gap, "radius": radius, "margin": margin,
              "successes": 0, "failures": 0, "budget_exceeded": 0, "first_failure": None}
    far = 2 * radius + gap
    for _ in range(trials):
        a = random_admissible_patch(spec, base, rng, margin=margin, node_budget=node_budget)
        b = random_admissible_patch(spec, base, rng, margin=margin, node_budget=node_budget)
        other = int(rng.integers(-far, far + 1))
        sign = 1 if rng.random() < 0.5 else -1
        offset = (sign * far, other) if rng.random() < 0.5 else (other, sign * far)
        b = Patch(b.volume.shifted(offset), b.symbols)
        fixed = a.as_dict()
        fixed.update(b.as_dict())
        xs = [s.x for s in fixed]
        ys = [s.y for s in fixed]
        region = box(max(xs) - min(xs) + 1 + 2 * margin, max(ys) - min(ys) + 1 + 2 * margin,
                     (min(xs) - margin, min(ys) - margin))
        free = [s for s in region if s not in fixed]
        try:
            sol = Search(spec, free, fixed, node_budget=node_budget).first()
        except SearchBudgetExceeded:
            report["budget_exceeded"] += 1
            continue
        if sol is None:
            report["failures"] += 1
            if report["first_failure"] is None:
                report["first_failure"] = (a, b)
        else:
            report["successes"] += 1
    return report


# -- block recoding -------------------------------------------------------


class LocalTerm:
    """One interaction term: an energy attached to every translate of ``support``.

    ``energy`` maps a tuple of symbols (in ``support`` order) to a float.
    """

    def __init__(self, support, energy):
        self.support = tuple(Site(*s) for s in support)
        self.energy = energy


def block_recode(spec, terms, margin=0):
    """Recode a finite-range model into a cross-window SFT with one-letter energies.

    The new letters are the admissible patches on ``Lambda``, the union of the
    spec window and the supports (containing the origin) of all translated
    terms.  A cross of letters is allowed when the letters agree where they
    overlap.  The energy of a letter is the sum over term translates
    containing the origin of the term energy divided by the support size.

    Returns ``(letter_spec, letter_energies, shape)`` where ``shape`` is the
    ordered tuple of offsets making up ``Lambda``.
    """
    shape = set(spec.window)
    translates = []
    for t in terms:
        for u in t.support:
            shifted = tuple(s - u for s in t.support)
            translates.append((t, shifted))
            shape.update(shifted)
    shape = tuple(Volume(shape).sites)
    vol = Volume(shape)
    letters = [p.symbols for p in enumerate_patches(spec, vol)]
    if margin:
        letters = [s for s in letters if check_extendable(spec, Patch(vol, s), margin)[0]]
    nL = len(letters)
    if nL > budget.alphabet_size():
        raise AlphabetBudgetExceeded(f"{nL} letters", nL)
    pos = {s: i for i, s in enumerate(shape)}
    # cross of letters: letter at offset c covers c + shape; consistency on overlaps
    union = Volume(c + s for c in CROSS for s in shape)
    letter_index = {l: i for i, l in enumerate(letters)}
    allowed = []
    # enumerate colourings of the union, via admissible letters at the centre
    # and extending outwards
    for sol in enumerate_patches(spec, union):
        d = sol.as_dict()
        row = []
        ok = True
        for c in CROSS:
            key = tuple(d[c + s] for s in shape)
            li = letter_index.get(key)
            if li is None:
                ok = False
                break
            row.append(li)
        if ok:
            allowed.append(tuple(row))
    allowed = sorted(set(allowed))
    names = ["".join(spec.alphabet[s] if len(spec.alphabet[s]) == 1 else f"({spec.alphabet[s]})" for s in l)
             for l in letters]
    if len(set(names)) != len(names):
        names = [f"L{i}" for i in range(nL)]
    letter_spec = SftSpec(names, CROSS, allowed=allowed, name=f"recoded({spec.name})", prune=False)
    energies = np.zeros(nL)
    for i, l in enumerate(letters):
        e = 0.0
        for t, sup in translates:
            e += t.energy(tuple(l[pos[s]] for s in sup)) / len(sup)
        energies[i] = e
    return letter_spec, energies, shape


# -- spec text format -----------------------------------------------------
#
#   # comment
#   alphabet: a b c
#   window: cross            (or: window: 0,0 1,0 0,1)
#   allowed:                 (or forbidden:)
#   a b a a b
#   ...


def format_spec(spec):
    lines = [f"# {spec.name}" if spec.name else "# sft spec",
             "alphabet: " + " ".join(spec.alphabet)]
    if spec.window == CROSS:
        lines.append("window: cross")
    else:
        lines.append("window: " + " ".join(f"{w.x},{w.y}" for w in spec.window))
    mode = "forbidden" if spec.mode == "forbidden" else "allowed"
    lines.append(f"{mode}:")
    pats = spec.decode(spec._codes if mode == "forbidden" else spec.allowed_codes())
    for p in pats:
        lines.append(" ".join(spec.alphabet[s] for s in p))
    return "\n".join(lines) + "\n"


def parse_spec(text, name=""):
    alphabet = window = None
    mode = None
    rows = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if mode is None:
            key, sep, rest = line.partition(":")
            if not sep:
                raise SpecFormatError(f"line {n}: expected 'key: value'")
            key = key.strip()
            if key == "alphabet":
                alphabet = rest.split()
            elif key == "window":
                toks = rest.split()
                if toks == ["cross"]:
                    window = CROSS
                elif toks == ["L"]:
                    window = L_WINDOW
                else:
                    try:
                        window = tuple(Site(*(int(v) for v in t.split(","))) for t in toks)
                    except (TypeError, ValueError):
                        raise SpecFormatError(f"line {n}: bad window offsets") from None
            elif key in ("allowed", "forbidden"):
                if rest.strip():
                    raise SpecFormatError(f"line {n}: patterns start on the next line")
                mode = key
            else:
                raise SpecFormatError(f"line {n}: unknown key {key!r}")
            continue
        toks = line.split()
        if alphabet is None or window is None:
            raise SpecFormatError("alphabet and window must precede the pattern list")
        if len(toks) != len(window):
            raise SpecFormatError(f"line {n}: pattern has {len(toks)} symbols, window has {len(window)}")
        try:
            rows.append([alphabet.index(t) for t in toks])
        except ValueError:
            raise SpecFormatError(f"line {n}: unknown symbol") from None
    if alphabet is None or window is None or mode is None:
        raise SpecFormatError("missing alphabet, window or pattern section")
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, len(window))
    kw = {mode: rows}
    return SftSpec(alphabet, window, name=name, prune=False, **kw)


def full_shift(q, window=SINGLE, names=None):
    names = names or [str(i) for i in range(q)]
    pats = np.array(list(itertools.product(range(q), repeat=len(window))), dtype=np.int64)
    return SftSpec(names, window, allowed=pats, name=f"full-shift-{q}")


__all__ = [
    "CROSS", "L_WINDOW", "SINGLE", "SftSpec", "square_window", "window_radius", "window_codes",
    "check_local", "is_locally_admissible", "array_is_admissible", "check_extendable",
    "enumerate_patches", "count_patches", "random_admissible_patch", "gluing_check",
    "LocalTerm", "block_recode", "format_spec", "parse_spec", "full_shift", "ExtensionResult",
    "boundary",
]
