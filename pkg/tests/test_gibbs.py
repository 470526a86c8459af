import itertools
import math

import numpy as np
import pytest

from sftlab.errors import EmptySupport, NotCommensurable
from sftlab.gibbs import (Interaction, beta_critical_disagreement, beta_critical_potts, convexity_defect, energy,
                          extrapolate_widths, gibbs_conditional, onsager_minus_beta_f, partition_function,
                          potts_strip_matrix, strip_pressure, support, validate_hypothesis_H)
from sftlab.lattice import Patch, Site, boundary, box
from sftlab.sft import CROSS, SftSpec, full_shift


def test_hypothesis_H_finds_largest_step():
    I = validate_hypothesis_H([0.0, 0.5, 1.0, 1.5])
    assert I.eps0 == pytest.approx(0.5) and I.symbol_level == (0, 1, 2, 3)
    I = validate_hypothesis_H([0.4, 0.6])
    assert I.eps0 == pytest.approx(0.2) and I.symbol_level == (2, 3)
    assert validate_hypothesis_H([0, 0]).symbol_level == (0, 0)


@pytest.mark.parametrize("bad", [[1.0, math.sqrt(2)], [-1.0, 1.0], [math.inf]])
def test_hypothesis_H_rejects(bad):
    with pytest.raises(NotCommensurable):
        validate_hypothesis_H(bad)


def test_partition_function_matches_brute_force():
    spec = full_shift(3)
    I = Interaction(0.5, (0, 1, 3))
    vol = box(2, 2)
    beta = 0.7
    brute = sum(math.exp(-beta * 0.5 * sum((0, 1, 3)[v] for v in vals))
                for vals in itertools.product(range(3), repeat=4))
    assert partition_function(spec, I, beta, vol) == pytest.approx(brute, rel=1e-13)
    p = Patch(vol, (2, 2, 2, 2))
    assert gibbs_conditional(spec, I, beta, vol, None, p) == pytest.approx(math.exp(-beta * 6) / brute)
    assert energy(I, p) == pytest.approx(6.0)


def test_empty_support_raises():
    hs = SftSpec(("0", "1"), CROSS, allowed=[p for p in itertools.product((0, 1), repeat=5)
                                            if not (p[0] and any(p[1:]))])
    vol = box(1, 1)
    ring = Patch.from_dict({s: 1 for s in boundary(vol)})
    assert [p.symbols for p in support(hs, vol, ring)] == [(0,)]
    # horizontal alternation: the two neighbours force contradictory centres
    alt = SftSpec(("0", "1"), ((0, 0), (1, 0)), allowed=[(0, 1), (1, 0)])
    with pytest.raises(EmptySupport):
        partition_function(alt, Interaction(1.0, (0, 0)), 1.0, vol, Patch.from_dict({Site(1, 0): 0, Site(-1, 0): 1}))


def torus_brute(q, n, beta):
    z = 0.0
    for vals in itertools.product(range(q), repeat=n * n):
        a = np.array(vals).reshape(n, n)
        d = int((a != np.roll(a, 1, 0)).sum() + (a != np.roll(a, 1, 1)).sum())
        z += math.exp(-beta * d)
    return z


def test_strip_matrix_trace_is_torus_partition_function():
    for q, n, beta in ((2, 3, 0.4), (3, 2, 0.9)):
        T = potts_strip_matrix(q, n, beta)
        assert np.trace(np.linalg.matrix_power(T, n)) == pytest.approx(torus_brute(q, n, beta), rel=1e-12)


def test_pressure_limits():
    assert onsager_minus_beta_f(0.0) == pytest.approx(math.log(2), abs=1e-13)
    assert onsager_minus_beta_f(8.0) < 1e-6
    assert strip_pressure(3, 4, 0.0) == pytest.approx(math.log(3), abs=1e-12)


def test_pressure_convex_and_decreasing():
    betas = np.linspace(0.1, 2.0, 40)
    assert convexity_defect(onsager_minus_beta_f, betas) >= -1e-10
    vals = [onsager_minus_beta_f(b) for b in betas]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_critical_point_conventions():
    # disagreement weight exp(-beta d) equals coupling exp(K delta) with K = beta
    assert beta_critical_disagreement(2) == pytest.approx(2 * beta_critical_potts(2))
    # Ising self-dual point: sinh(2K) = 1 with K the spin coupling beta/2
    assert math.sinh(beta_critical_disagreement(2)) == pytest.approx(1.0)


def test_extrapolation_recovers_limit():
    w = [4, 5, 6, 7]
    assert extrapolate_widths(w, [1.5 + 2.0 / x ** 2 for x in w]) == pytest.approx(1.5)
