import math

import numpy as np
import pytest

from sftlab import contours
from sftlab.errors import InconsistentPath, InteriorClipped, LoopNotClosed
from sftlab.lattice import Patch, Site, Volume, box
from sftlab.models import vertex
from sftlab.sft import check_local, random_admissible_patch

from helpers import planted_loop_patch

RING = [Site(-1, -1), Site(0, -1), Site(1, -1), Site(1, 0), Site(1, 1), Site(0, 1), Site(-1, 1), Site(-1, 0)]


def test_turn_matrix_trace_identity():
    assert contours.spectrum_check() < 1e-12
    for ell in range(25):
        assert contours.trace_power(ell) == contours.trace_closed_form(ell)
    # (1+r)^2 + (1-r)^2 + 1 and (1+r)^4 + (1-r)^4 + 1 with r = sqrt 2
    assert contours.trace_power(2) == 7
    assert contours.trace_power(4) == 35


def test_shoelace_and_enclosure():
    assert contours.shoelace(RING) == 8
    assert contours.shoelace(RING[::-1]) == -8
    assert list(contours.enclosed_sites(RING)) == [Site(0, 0)]


def test_embedded_ring_round_trip():
    assert contours.loop_symbols(RING) == ["SE", "EE", "EN", "NN", "NW", "WW", "WS", "SS"]
    spec = vertex.vertex_spec()
    for cyc, orient in ((RING, "ccw"), (RING[::-1], "cw")):
        p = contours.embed_loop(cyc, spec)
        assert not check_local(spec, p)
        cs = contours.extract(p)
        (path,) = cs.paths
        assert path.closed and path.orientation == orient and set(path.sites) == set(cyc)
        assert list(path.interior) == [Site(0, 0)]
        flipped = contours.tau_flip(p, path)
        assert contours.arrow_count(flipped) == 0
        assert len(set(flipped.symbols)) == 1  # a single sea remains
        assert not check_local(spec, flipped)


def rectangle_loops(ell):
    """Rectangular rings of ``ell`` sites with the origin strictly inside, both orientations."""
    n = 0
    for a in range(3, ell):
        b = (ell + 4) // 2 - a
        if b >= 3 and 2 * (a + b) - 4 == ell:
            n += (a - 2) * (b - 2)
    return 2 * n


@pytest.mark.parametrize("ell", [4, 6, 7, 8, 10])
def test_short_loops_are_rectangles(ell):
    r = contours.enumerate_encircling_loops(ell)
    assert r.count == rectangle_loops(ell)
    assert r.ccw == r.cw


def test_loop_count_below_bound():
    r = contours.enumerate_encircling_loops(12)
    assert r.count > rectangle_loops(12)  # L shapes and notched rings appear
    assert r.count <= r.bound and r.ratio < 1


def test_planted_loops_flip_cleanly():
    rng = np.random.default_rng(11)
    spec = vertex.vertex_spec()
    for _ in range(10):
        patch, path = planted_loop_patch(rng)
        flipped = contours.tau_flip(patch, path)
        assert not check_local(spec, flipped)
        assert contours.arrow_count(patch) - contours.arrow_count(flipped) == len(path)
        assert not any(s in {t for p in contours.extract(flipped).paths for t in p.sites} for s in path.sites)


def test_flip_errors():
    spec = vertex.vertex_spec()
    p = contours.embed_loop(RING, spec)
    path = contours.extract(p).paths[0]
    open_path = contours.Path(path.sites, path.symbols, False)
    with pytest.raises(LoopNotClosed):
        contours.tau_flip(p, open_path)
    clipped = contours.Path(path.sites, path.symbols, True, "ccw", Volume([Site(9, 9)]))
    with pytest.raises(InteriorClipped):
        contours.tau_flip(p, clipped)


def test_inconsistent_path_detected():
    a = vertex.ALPHABET
    arr = np.array([[a.index("x")] * 3, [a.index("EE"), a.index("EE"), a.index("o")], [a.index("o")] * 3])
    with pytest.raises(InconsistentPath):
        contours.extract(Patch.from_array(arr))


def test_paths_in_random_patches_touch_at_most_diagonally():
    spec = vertex.vertex_spec()
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = random_admissible_patch(spec, box(10, 10), rng, margin=1)
        cs = contours.extract(p)
        if len(cs.paths) > 1:
            assert cs.min_path_distance() >= 1


def test_peierls_quantities():
    assert contours.beta_star() == pytest.approx(math.log(1 + math.sqrt(2)))
    assert contours.peierls_bound(contours.beta_star(), 8) == pytest.approx(3 * math.pi * 16)
    sums = contours.peierls_partial_sums(2.0, 14)
    assert all(a < b for a, b in zip(sums, sums[1:]))
    lo, hi = contours.exact_loop_probability(1.0), contours.exact_loop_probability(2.0)
    assert 0 < hi < lo <= contours.peierls_bound(1.0, 8)


def test_flips_of_disjoint_loops_commute():
    spec = vertex.vertex_spec()
    cw = RING[::-1]
    other = [s + Site(4, 0) for s in cw]
    d = contours.embed_loop(cw, spec, pad=6).as_dict()
    index = {a: i for i, a in enumerate(spec.alphabet)}
    for s, name in zip(other, contours.loop_symbols(other)):
        d[s] = index[name]
    d[Site(4, 0)] = index[vertex.CROSS_SYM]
    p = Patch.from_dict(d)
    assert not check_local(spec, p)
    a, b = sorted(contours.extract(p).paths, key=lambda q: min(q.sites))
    ab = contours.tau_flip(contours.tau_flip(p, a), b)
    ba = contours.tau_flip(contours.tau_flip(p, b), a)
    assert ab == ba
    assert contours.arrow_count(ab) == 0 and not check_local(spec, ab)
