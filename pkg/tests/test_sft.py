import itertools

import numpy as np
import pytest

from sftlab.errors import SpecFormatError
from sftlab.lattice import Patch, Site, boundary, box
from sftlab.sft import (CROSS, SftSpec, array_is_admissible, check_extendable, check_local, count_patches,
                        enumerate_patches, format_spec, full_shift, gluing_check, parse_spec, window_codes)


def hard_square():
    """No two horizontally or vertically adjacent ones."""
    pats = [p for p in itertools.product((0, 1), repeat=5) if not (p[0] and any(p[1:]))]
    return SftSpec(("0", "1"), CROSS, allowed=pats, name="hard-square")


def brute_count(spec, w, h):
    n = 0
    for vals in itertools.product(range(spec.size), repeat=w * h):
        if not check_local(spec, Patch(box(w, h), vals)):
            n += 1
    return n


def test_encode_decode_round_trip():
    spec = full_shift(3, CROSS)
    pats = np.array([[0, 1, 2, 0, 1], [2, 2, 2, 2, 2]])
    assert np.array_equal(spec.decode(spec.encode(pats)), pats)
    assert spec.encode([[1, 0, 0, 0, 0]])[0] == 1 and spec.encode([[0, 1, 0, 0, 0]])[0] == 3


def test_allowed_and_forbidden_modes_agree():
    hs = hard_square()
    forb = [p for p in itertools.product((0, 1), repeat=5) if p[0] and any(p[1:])]
    hs2 = SftSpec(("0", "1"), CROSS, forbidden=forb)
    assert hs.same_language(hs2)
    assert hs2.n_allowed == 17


def test_count_matches_brute_force():
    hs = hard_square()
    for w, h in ((2, 2), (3, 2), (3, 3)):
        assert count_patches(hs, box(w, h)) == brute_count(hs, w, h)


def test_hard_square_known_counts():
    # only windows lying inside the box are checked: just the centre cross
    assert count_patches(hard_square(), box(3, 3)) == 256 + 16
    # a ring of zeros makes every interior window complete: independent sets of the 3x3 grid
    vol = box(3, 3)
    ring = Patch.from_dict({s: 0 for s in boundary(vol, 1, "l1")})
    assert count_patches(hard_square(), vol, ring) == 63


def test_check_local_reports_anchor():
    hs = hard_square()
    p = Patch.from_array(np.array([[1, 1], [0, 0]]))
    assert check_local(hs, p) == []  # no complete cross inside a 2x2 box
    p = Patch.from_array(np.array([[0, 0, 0], [0, 1, 1], [0, 0, 0]]))
    assert check_local(hs, p) == [Site(1, 1)]


def test_window_codes_wrap_matches_manual():
    arr = np.array([[0, 1], [2, 0]])
    codes = window_codes(arr, CROSS, 3, wrap=True)
    # at north-west cell: centre 0, east 1, north (wraps to south row) 2, west 1, south 2
    assert codes[0, 0] == 0 + 1 * 3 + 2 * 9 + 1 * 27 + 2 * 81
    assert array_is_admissible(full_shift(3, CROSS), arr, wrap=True)


def test_enumerate_respects_boundary():
    hs = hard_square()
    vol = box(1, 1)
    ring = Patch.from_dict({Site(1, 0): 1, Site(-1, 0): 0, Site(0, 1): 0, Site(0, -1): 0})
    assert [p.symbols for p in enumerate_patches(hs, vol, ring)] == [(0,)]


def test_check_extendable_returns_witness():
    hs = hard_square()
    p = Patch.from_array(np.array([[1]]))
    ok, witness = check_extendable(hs, p, margin=2)
    assert ok and not check_local(hs, witness) and witness[Site(0, 0)] == 1


def test_spec_text_round_trip():
    hs = hard_square()
    back = parse_spec(format_spec(hs))
    assert back.same_language(hs)
    forb = SftSpec(("a", "b"), ((0, 0), (1, 0)), forbidden=[(1, 1)])
    text = format_spec(forb)
    assert "forbidden:" in text
    assert parse_spec(text).same_language(forb)


@pytest.mark.parametrize("text", [
    "alphabet: a b\nallowed:\na\n",
    "alphabet: a b\nwindow: cross\nallowed:\na b\n",
    "alphabet: a a\nwindow: 0,0\nallowed:\na\n",
    "alphabet: a b\nwindow: 0,0\nallowed:\nc\n",
])
def test_bad_spec_text(text):
    with pytest.raises(SpecFormatError):
        parse_spec(text)


def test_gluing_on_full_shift_never_fails():
    r = gluing_check(full_shift(2, CROSS), gap=1, trials=10, seed=1)
    assert r["failures"] == 0 and r["successes"] == 10


def test_enumeration_count_ignores_site_order():
    from sftlab._search import Search

    hs = hard_square()
    vol = box(3, 4)
    assert Search(hs, list(vol.sites), {}).count() == Search(hs, list(vol.sites)[::-1], {}).count()


def test_strip_traces_count_torus_configurations():
    from sftlab.transfer import strip_transfer_matrix

    hs = hard_square()
    for w in (2, 3, 4):
        T, _ = strip_transfer_matrix(hs, w)
        T = T.toarray()
        for n in (3, 4):
            brute = sum(1 for vals in itertools.product((0, 1), repeat=w * n)
                        if array_is_admissible(hs, np.array(vals).reshape(w, n), wrap=True))
            assert np.trace(np.linalg.matrix_power(T, n)) == pytest.approx(brute, rel=1e-9)


def test_block_recode_is_a_conjugacy_on_samples():
    from sftlab.sft import LocalTerm, block_recode, random_admissible_patch

    hs = hard_square()
    letters, energies, shape = block_recode(hs, [LocalTerm([(0, 0)], lambda s: float(s[0]))])
    index = {name: i for i, name in enumerate(letters.alphabet)}
    origin = shape.index(Site(0, 0))
    rng = np.random.default_rng(2)
    for _ in range(5):
        d = random_admissible_patch(hs, box(7, 7), rng).as_dict()
        inner = [Site(x, y) for y in range(5, 0, -1) for x in range(1, 6)]
        coded = np.array([index["".join(str(d[c + s]) for s in shape)] for c in inner]).reshape(5, 5)
        assert array_is_admissible(letters, coded)
        decoded = [int(letters.alphabet[v][origin]) for v in coded.ravel()]
        assert decoded == [d[c] for c in inner]
        assert energies[coded].sum() == pytest.approx(sum(decoded))
