import numpy as np
import pytest
from hypothesis import given, strategies as st

from sftlab.errors import InvalidPatch, OverlappingVolumes
from sftlab.lattice import (Patch, Site, Volume, boundary, box, compose, constant_patch, fatten, format_patch,
                            make_box, parse_patch, shift)


def test_canonical_order_is_rows_north_to_south():
    v = box(2, 2)
    assert v.sites == (Site(0, 1), Site(1, 1), Site(0, 0), Site(1, 0))


def test_make_box_is_centred():
    v = make_box(1)
    assert len(v) == 9 and v.bbox() == (-1, -1, 1, 1)


def test_boundary_metrics():
    v = Volume([Site(0, 0)])
    assert set(boundary(v, 1, "l1")) == {Site(1, 0), Site(-1, 0), Site(0, 1), Site(0, -1)}
    assert len(boundary(v, 1, "linf")) == 8
    assert len(boundary(v, 2, "l1")) == 12
    assert len(fatten(box(3, 3), 1, "linf")) == 25


def test_from_array_round_trip():
    arr = np.array([[1, 2, 3], [4, 5, 6]])
    p = Patch.from_array(arr, origin=(5, -2))
    assert p[Site(5, -1)] == 1 and p[Site(7, -2)] == 6
    back, origin = p.to_array()
    assert origin == (5, -2) and np.array_equal(back, arr)


def test_missing_cells_and_text_round_trip():
    arr = np.array([[0, -1], [1, 0]])
    p = Patch.from_array(arr)
    assert len(p) == 3
    text = format_patch(p, ["a", "b"])
    assert text.splitlines()[1] == "a ."
    assert parse_patch(text, ["a", "b"]) == p


def test_compose_rejects_overlap():
    a = constant_patch(box(2, 1), 0)
    with pytest.raises(OverlappingVolumes):
        compose(a, shift(a, (1, 0)))
    c = compose(a, shift(a, (2, 0)))
    assert len(c) == 4


def test_patch_length_mismatch():
    with pytest.raises(InvalidPatch):
        Patch(box(2, 2), (0, 0, 0))


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=1, max_size=20),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_shift_preserves_symbols_and_order(points, z):
    d = {Site(*p): i % 3 for i, p in enumerate(points)}
    p = Patch.from_dict(d)
    q = shift(p, z)
    assert all(q[s + z] == p[s] for s in p.volume)
    assert q.volume.sites == tuple(s + z for s in p.volume.sites)
