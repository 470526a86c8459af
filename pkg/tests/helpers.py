"""Shared fixtures-by-function for the test modules."""

import functools

from sftlab import contours
from sftlab._search import Search
from sftlab.lattice import Patch
from sftlab.models import vertex


@functools.lru_cache(maxsize=None)
def _loops(ell):
    return tuple(tuple(c) for c in contours.encircling_loops(ell))


def planted_loop_patch(rng, lengths=(8, 10, 12), pad=4):
    """A random admissible vertex patch containing a known closed loop.

    The loop and every site within Chebyshev distance 1 of it are kept from
    the loop's own sea; all other sites, inside and outside, are refilled
    at random.  Returns ``(patch, path)`` with ``path`` the extracted loop.
    """
    spec = vertex.vertex_spec()
    ell = int(rng.choice(lengths))
    loops = _loops(ell)
    loop = list(loops[int(rng.integers(len(loops)))])
    seed_patch = contours.embed_loop(loop, spec, pad=pad)
    near = {s for s in seed_patch.volume
            if any(max(abs(s.x - t.x), abs(s.y - t.y)) <= 1 for t in loop)}
    d = seed_patch.as_dict()
    fixed = {s: v for s, v in d.items() if s in near}
    free = [s for s in seed_patch.volume if s not in near]
    sol = Search(spec, free, fixed).first(rng=rng)
    assert sol is not None
    d.update(zip(free, sol))
    patch = Patch.from_dict(d)
    target = set(loop)
    path = next(p for p in contours.extract(patch).closed_paths() if set(p.sites) == target)
    return patch, path
