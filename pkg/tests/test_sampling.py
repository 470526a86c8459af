import itertools
import math

import numpy as np
import pytest

from sftlab.errors import NotAdmissible, StateBudgetExceeded
from sftlab.lattice import Patch, Site, Volume
from sftlab.models import potts, vertex, vertex_lift
from sftlab.sampling import (ChainSpec, Kernel, block_conditional, chain_means, gap_with_error, initial_state,
                             order_parameter, origin_indicator, run_chain, run_chains, sample_max_entropy)
from sftlab.sft import check_local, enumerate_patches, window_codes


def potts_kernel(q=2):
    spec, wen = potts.colour_model(q)
    return Kernel.build(spec, window_energy=wen)


def torus_energy(kernel, arr):
    codes = window_codes(arr, kernel.spec.window, kernel.spec.size, wrap=True)
    return float(kernel.wen[codes].sum())


def test_window_energies_count_disagreeing_bonds():
    k = potts_kernel(3)
    rng = np.random.default_rng(0)
    c = rng.integers(0, 3, (4, 5))
    assert torus_energy(k, c) == pytest.approx(potts.disagreeing_bonds(c))


@pytest.mark.parametrize("shape", [(2, 2), (2, 3)])
def test_site_kernels_preserve_gibbs_on_torus(shape):
    k = potts_kernel(2)
    beta = 0.8
    n = shape[0] * shape[1]
    states = [np.array(v).reshape(shape) for v in itertools.product(range(2), repeat=n)]
    index = {tuple(s.ravel()): i for i, s in enumerate(states)}
    pi = np.array([math.exp(-beta * torus_energy(k, s)) for s in states])
    pi /= pi.sum()
    chain = ChainSpec(k, beta, shape)
    for r, c in itertools.product(range(shape[0]), range(shape[1])):
        K = np.zeros((len(states), len(states)))
        for i, s in enumerate(states):
            st = initial_state(ChainSpec(k, beta, shape, init=s))
            cells, fills, probs = block_conditional(st, chain, r, c)
            assert cells == [(r, c)]
            for f, p in zip(fills, probs):
                t = s.copy()
                t[r, c] = f[0]
                K[i, index[tuple(t.ravel())]] += p
        assert 0.5 * np.abs(pi @ K - pi).sum() <= 1e-9


def test_block_conditional_matches_search_enumeration():
    spec = vertex.vertex_spec()
    k = Kernel.build(spec, symbol_energy=vertex.arrow_energies(spec))
    beta = 0.7
    dot = spec.alphabet.index("o")
    chain = ChainSpec(k, beta, (5, 5), "pinned", boundary=dot, init=dot, block=3)
    st = initial_state(chain)
    cells, fills, probs = block_conditional(st, chain, 2, 2)
    # oracle: constraint search over the block with every other cell fixed
    h = st.values.shape[0]
    sites = [Site(c, h - 1 - r) for r, c in cells]
    everything = Patch.from_array(st.values)
    rest = Patch.from_dict({s: v for s, v in everything.as_dict().items() if s not in set(sites)})
    arrow = np.array([vertex.colour_class(a) == "a" for a in spec.alphabet])
    weights = {}
    for p in enumerate_patches(spec, Volume(sites), rest):
        vals = tuple(p[s] for s in sites)
        weights[vals] = math.exp(-beta * arrow[list(vals)].sum())
    z = sum(weights.values())
    got = dict(zip(fills, probs))
    assert set(got) == set(weights)
    assert 0.5 * sum(abs(got[f] - w / z) for f, w in weights.items()) <= 1e-9
    assert len(weights) == 2  # all dots, or a clockwise ring around a cross


def test_empirical_law_on_tiny_torus():
    k = potts_kernel(2)
    beta = 0.5
    shape = (2, 2)
    states = list(itertools.product(range(2), repeat=4))
    pi = np.array([math.exp(-beta * torus_energy(k, np.array(s).reshape(shape))) for s in states])
    pi /= pi.sum()
    chain = ChainSpec(k, beta, shape, seed=1, sweeps=20_000)
    trace, _ = run_chain(chain, lambda a: tuple(a.ravel().tolist()))
    counts = np.zeros(len(states))
    for _, s in trace.rows:
        counts[states.index(s)] += 1
    assert 0.5 * np.abs(counts / counts.sum() - pi).sum() < 0.03


def test_chains_are_deterministic_across_threads():
    k = potts_kernel(3)
    chains = [ChainSpec(k, 0.6, (6, 6), seed=4, chain=i, sweeps=30) for i in range(3)]
    observe = lambda a: a.sum()  # noqa: E731
    one = run_chains(chains, observe, threads=1)
    two = run_chains(chains, observe, threads=2)
    assert [t.rows for t in one] == [t.rows for t in two]
    assert one[0].rows != one[1].rows


def test_pinned_block_chain_stays_admissible():
    spec = vertex.vertex_spec(rule_d=True)
    k = Kernel.build(spec, symbol_energy=vertex.arrow_energies(spec))
    dot = spec.alphabet.index("o")
    chain = ChainSpec(k, 0.3, (12, 12), "pinned", boundary=dot, init=dot, block=4, sweeps=50, seed=2)
    trace, st = run_chain(chain, lambda a: order_parameter(a, "vertex", spec.alphabet)["arrow"])
    assert not check_local(spec, Patch.from_array(st.values))
    assert max(r[1] for r in trace.rows) > 0  # loops do appear at this temperature
    assert (st.values[0] == dot).all()


def test_inadmissible_start_rejected():
    spec = vertex.vertex_spec()
    k = Kernel.build(spec)
    with pytest.raises(NotAdmissible):
        initial_state(ChainSpec(k, 1.0, (4, 4), "pinned", boundary=0, init=spec.alphabet.index("EE")))


def test_fill_budget():
    spec = vertex.vertex_spec()
    k = Kernel.build(spec)
    dot = spec.alphabet.index("o")
    chain = ChainSpec(k, 0.1, (6, 6), "pinned", boundary=dot, init=dot, block=3, max_fills=1)
    with pytest.raises(StateBudgetExceeded):
        run_chain(ChainSpec(**{**chain.__dict__, "sweeps": 1}), lambda a: 0.0)


def test_statistics_helpers():
    obs = origin_indicator([True, False])
    assert obs(np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]])) == 1.0
    gap, err = gap_with_error([1.0, 1.0, 0.8], [0.0, 0.2, 0.0])
    assert gap == pytest.approx(0.8667, abs=1e-4) and err > 0
    stats = order_parameter(np.array([[0, 0], [1, 2]]), "potts", q=3)
    assert stats["histogram"] == [0.5, 0.25, 0.25] and stats["max_share"] == 0.5


def test_max_entropy_sampler_yields_lifted_configurations():
    tl = vertex_lift(2)
    base = tl.effective_base
    k = Kernel.build(base, symbol_energy=tl.interaction.energies)
    dot = base.alphabet.index("o")
    chain = ChainSpec(k, 0.0, (8, 8), "pinned", boundary=dot, init=dot, block=4, sweeps=10, thin=5, seed=3)
    out = list(sample_max_entropy(tl, chain))
    assert [s for s, _, _ in out] == [5, 10]
    for _, b, lifted in out:
        assert np.array_equal(tl.project(lifted), b)
        assert not check_local(tl.lifted, Patch.from_array(lifted))


def test_tau_mirrors_pinned_chains_exactly():
    # tau preserves the rules and the energy; with the same seed stream the
    # cross-pinned chain is observed to be the exact image of the dot-pinned one
    spec = vertex.vertex_spec(rule_d=True)
    k = Kernel.build(spec, symbol_energy=vertex.arrow_energies(spec))
    tau = vertex.tau_index_map(spec.alphabet)
    dot, cross = spec.alphabet.index("o"), spec.alphabet.index("x")
    runs = [run_chain(ChainSpec(k, 0.8, (12, 12), "pinned", boundary=p, init=p, block=4, sweeps=30, seed=3),
                      lambda a: 0.0)[1].values for p in (dot, cross)]
    assert (runs[0] != dot).any()
    assert np.array_equal(tau[runs[0]], runs[1])
