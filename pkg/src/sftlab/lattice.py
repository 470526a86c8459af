"""Sites, finite volumes and patches on the square lattice.

Coordinates are ``(x, y)`` with ``x`` pointing east and ``y`` pointing north.
Everything that iterates over a volume uses the canonical order: rows from
top to bottom (descending ``y``), and left to right inside a row.  Arrays
built from patches follow the same convention, so ``arr[0, 0]`` is the
north-west corner.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidPatch, OverlappingVolumes


class Site(NamedTuple):
    x: int
    y: int

    def __add__(self, other):
        return Site(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Site(self.x - other[0], self.y - other[1])

    def __neg__(self):
        return Site(-self.x, -self.y)


def canonical_key(site):
    return (-site[1], site[0])


ORIGIN = Site(0, 0)
E1 = Site(1, 0)
E2 = Site(0, 1)


class Volume:
    """An immutable finite set of sites kept in canonical order."""

    __slots__ = ("sites", "_index")

    def __init__(self, sites=()):
        uniq = {Site(int(s[0]), int(s[1])) for s in sites}
        self.sites = tuple(sorted(uniq, key=canonical_key))
        self._index = {s: i for i, s in enumerate(self.sites)}

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    def __contains__(self, site):
        return (site[0], site[1]) in self._index

    def __eq__(self, other):
        return isinstance(other, Volume) and self.sites == other.sites

    def __hash__(self):
        return hash(self.sites)

    def __repr__(self):
        if not self.sites:
            return "Volume(empty)"
        x0, y0, x1, y1 = self.bbox()
        return f"Volume({len(self)} sites in [{x0},{x1}]x[{y0},{y1}])"

    def index(self, site):
        return self._index[(site[0], site[1])]

    def bbox(self):
        """Return ``(xmin, ymin, xmax, ymax)``."""
        xs = [s.x for s in self.sites]
        ys = [s.y for s in self.sites]
        return min(xs), min(ys), max(xs), max(ys)

    def is_box(self):
        if not self.sites:
            return False
        x0, y0, x1, y1 = self.bbox()
        return len(self) == (x1 - x0 + 1) * (y1 - y0 + 1)

    def union(self, other):
        return Volume(self.sites + tuple(other))

    def difference(self, other):
        return Volume(s for s in self.sites if s not in other)

    def shifted(self, z):
        return Volume(s + z for s in self.sites)


def box(width, height, origin=(0, 0)):
    """Rectangle of ``width x height`` sites whose south-west corner is ``origin``."""
    ox, oy = origin
    return Volume(Site(ox + i, oy + j) for i in range(width) for j in range(height))


def make_box(n):
    """The centred square ``[-n, n]^2``."""
    return box(2 * n + 1, 2 * n + 1, (-n, -n))


def _dist(a, b, metric):
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    if metric == "l1":
        return dx + dy
    if metric == "linf":
        return max(dx, dy)
    raise ValueError(f"unknown metric {metric!r}")


def boundary(volume, r=1, metric="l1"):
    """Sites outside ``volume`` within distance ``r`` of it."""
    out = set()
    for s in volume:
        for dx in range(-r, r + 1):
            for dy in range(-r, r + 1):
                t = Site(s.x + dx, s.y + dy)
                if t in volume or t in out:
                    continue
                if _dist((dx, dy), (0, 0), metric) <= r:
                    out.add(t)
    return Volume(out)


def fatten(volume, r=1, metric="l1"):
    return volume.union(boundary(volume, r, metric))


@dataclass(frozen=True)
class Patch:
    """Symbols (as alphabet indices) placed on a finite volume.

    ``symbols[i]`` is the symbol at ``volume.sites[i]``.
    """

    volume: Volume
    symbols: tuple

    def __post_init__(self):
        if len(self.symbols) != len(self.volume):
            raise InvalidPatch("symbol count does not match volume size")
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))

    @classmethod
    def from_dict(cls, mapping):
        vol = Volume(mapping.keys())
        return cls(vol, tuple(mapping[s] for s in vol))

    @classmethod
    def from_array(cls, arr, origin=(0, 0), missing=-1):
        """Build a patch from a 2D array whose row 0 is the northern row.

        ``origin`` is the coordinate of the south-west cell; cells equal to
        ``missing`` are left out of the volume.
        """
        arr = np.asarray(arr)
        h, w = arr.shape
        ox, oy = origin
        d = {}
        for r in range(h):
            for c in range(w):
                v = int(arr[r, c])
                if v != missing:
                    d[Site(ox + c, oy + h - 1 - r)] = v
        return cls.from_dict(d)

    def to_array(self, missing=-1):
        """Return ``(array, origin)`` covering the bounding box."""
        x0, y0, x1, y1 = self.volume.bbox()
        arr = np.full((y1 - y0 + 1, x1 - x0 + 1), missing, dtype=np.int64)
        for s, v in zip(self.volume.sites, self.symbols):
            arr[y1 - s.y, s.x - x0] = v
        return arr, (x0, y0)

    def as_dict(self):
        return dict(zip(self.volume.sites, self.symbols))

    def __getitem__(self, site):
        return self.symbols[self.volume.index(site)]

    def restrict(self, volume):
        d = self.as_dict()
        return Patch(volume, tuple(d[s] for s in volume))

    def __len__(self):
        return len(self.symbols)


def compose(a, b):
    """Concatenate two patches with disjoint volumes."""
    if any(s in a.volume for s in b.volume):
        raise OverlappingVolumes("patches share at least one site")
    d = a.as_dict()
    d.update(b.as_dict())
    return Patch.from_dict(d)


def shift(patch, z):
    """Translate a patch by the vector ``z``."""
    return Patch(patch.volume.shifted(z), patch.symbols)


def constant_patch(volume, symbol):
    return Patch(volume, (symbol,) * len(volume))


# -- text format -----------------------------------------------------------
#
#   volume <w>x<h> origin <x> <y>
#   <row of names, northern row first>
#   ...
#
# A "." stands for a cell of the bounding box that is not in the volume.


def format_patch(patch, names):
    arr, (x0, y0) = patch.to_array()
    h, w = arr.shape
    lines = [f"volume {w}x{h} origin {x0} {y0}"]
    for row in arr:
        lines.append(" ".join("." if v < 0 else names[v] for v in row))
    return "\n".join(lines) + "\n"


def parse_patch(text, names):
    lookup = {n: i for i, n in enumerate(names)}
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InvalidPatch("empty patch text")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "volume" or head[2] != "origin":
        raise InvalidPatch(f"bad header line: {lines[0]!r}")
    try:
        w, h = (int(t) for t in head[1].lower().split("x"))
        ox, oy = int(head[3]), int(head[4])
    except ValueError as exc:
        raise InvalidPatch(f"bad header line: {lines[0]!r}") from exc
    rows = lines[1:]
    if len(rows) != h:
        raise InvalidPatch(f"expected {h} rows, found {len(rows)}")
    arr = np.full((h, w), -1, dtype=np.int64)
    for r, row in enumerate(rows):
        toks = row.split()
        if len(toks) != w:
            raise InvalidPatch(f"row {r} has {len(toks)} entries, expected {w}")
        for c, t in enumerate(toks):
            if t == ".":
                continue
            if t not in lookup:
                raise InvalidPatch(f"unknown symbol {t!r}")
            arr[r, c] = lookup[t]
    return Patch.from_array(arr, (ox, oy))
