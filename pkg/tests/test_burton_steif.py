import itertools
import math

import numpy as np
import pytest

from sftlab.burton_steif import (beta_N, htop_identity_report, lift, lift_sample, lifted_strip_entropy,
                                 omega_fiber_count, omega_fiber_count_bruteforce, onsager_htop,
                                 potts_lifted_strip_entropy, tone_counts, verify_counting_identity, verify_lemma)
from sftlab.errors import AlphabetBudgetExceeded
from sftlab.gibbs import Interaction, onsager_minus_beta_f, partition_function
from sftlab.lattice import Patch, boundary, box
from sftlab.models import potts, potts_interaction
from sftlab.sft import CROSS, SftSpec, check_local


def hard_square_lift(N):
    pats = [p for p in itertools.product((0, 1), repeat=5) if not (p[0] and any(p[1:]))]
    spec = SftSpec(("0", "1"), CROSS, allowed=pats, name="hs")
    return lift(spec, Interaction(1.0, (1, 0)), N)


def test_tone_counts_and_names():
    tl = hard_square_lift(3)
    assert tone_counts(tl.interaction, 3) == [1, 3]
    assert tl.lifted.alphabet == ("0", "1:0", "1:1", "1:2")
    assert tl.class_sizes().tolist() == [1, 3]
    assert tl.beta == pytest.approx(math.log(3))
    assert beta_N(2, 0.5) == pytest.approx(2 * math.log(2))


def test_lifted_rules_are_projection_of_base():
    tl = hard_square_lift(2)
    for pat in itertools.product(range(tl.lifted.size), repeat=5):
        assert tl.lifted.allows(pat) == tl.base.allows(tl.colour[list(pat)])


def test_fibre_count_against_brute_force():
    tl = hard_square_lift(2)
    vol = box(2, 2)
    ring = boundary(vol)
    rng = np.random.default_rng(0)
    for _ in range(5):
        bnd = Patch(ring, tuple(int(v) for v in rng.integers(0, 3, len(ring))))
        if check_local(tl.lifted, bnd):
            continue
        assert omega_fiber_count(tl, vol, bnd) == omega_fiber_count_bruteforce(tl, vol, bnd)


def test_counting_identity_and_conditional_on_toy_model():
    tl = hard_square_lift(3)
    vol = box(2, 2)
    bnd = Patch(boundary(vol), (0,) * 8)
    r = verify_counting_identity(tl, vol, bnd)
    assert r.relative < 1e-12
    # lhs by hand: sum over independent sets S of the 2x2 grid of 3**|S|
    assert r.lhs == 1 + 4 * 3 + 2 * 9
    assert r.rhs == pytest.approx(3 ** 4 * partition_function(tl.base, tl.interaction, tl.beta, vol, tl.project_patch(bnd)))
    assert verify_lemma(tl, vol, bnd).deviation < 1e-15


def test_lift_sample_projects_back():
    tl = hard_square_lift(4)
    base = np.array([[0, 1], [1, 0]])
    toned = lift_sample(base, tl, np.random.default_rng(1))
    assert np.array_equal(tl.project(toned), base)


def test_lumped_entropy_equals_unlumped():
    tl = hard_square_lift(2)
    for w in (2, 3):
        assert lifted_strip_entropy(tl, w, lumped=True) == pytest.approx(lifted_strip_entropy(tl, w, lumped=False),
                                                                         abs=1e-10)


def test_entropy_identity_on_strips():
    rows = htop_identity_report(hard_square_lift(3), [2, 3, 4])
    assert max(r["abs_diff"] for r in rows) < 1e-10


def test_potts_lift_entropy_matches_weighted_pressure():
    tl = lift(potts.potts_cross_spec(2), potts_interaction(2), 2)
    for w in (2, 3):
        lumped = lifted_strip_entropy(tl, w)
        via_colours = potts_lifted_strip_entropy(2, 2, w)
        assert lumped == pytest.approx(via_colours, abs=1e-10)


def test_onsager_htop_closed_form():
    assert onsager_htop(1) == pytest.approx(math.log(2), abs=1e-12)
    for N in (2, 3):
        b = 2 * math.log(N)
        assert onsager_htop(N) == pytest.approx(2 * b + onsager_minus_beta_f(b), abs=1e-10)
    with pytest.raises(ValueError):
        onsager_htop(0.5)


def test_alphabet_budget():
    with pytest.raises(AlphabetBudgetExceeded):
        lift(potts.potts_cross_spec(2), potts_interaction(2), 50, alphabet_budget=1000)
