"""Seeded heat-bath sampling on tori and on boxes with a pinned frame.

Every sweep draws its randomness from a Philox generator keyed by
``(seed, chain, sweep)``, so a chain's trajectory does not depend on how
many chains run at once or in which thread.  Block updates of size ``k``
resample a ``k x k`` block from its exact conditional law; ``k = 1`` is the
single-site heat bath.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..errors import NotAdmissible, StateBudgetExceeded
from ..sft import window_radius
from ..transfer import _pair_tables
from . import kernels


def philox(seed, chain, sweep):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(chain), int(sweep)])))


def window_energy_table(spec, symbol_energy):
    """Energy of every window code when only the centre symbol carries energy."""
    centre = list(spec.window).index((0, 0))
    codes = np.arange(spec.size ** spec.k, dtype=np.int64)
    return np.asarray(symbol_energy, dtype=float)[(codes // spec.size ** centre) % spec.size]


@dataclass
class Kernel:
    """Lookup tables shared by all chains on one model."""

    spec: object
    table: np.ndarray
    wen: np.ndarray
    hpair: np.ndarray
    vpair: np.ndarray
    offs: np.ndarray

    @classmethod
    def build(cls, spec, symbol_energy=None, window_energy=None):
        if window_energy is None:
            if symbol_energy is None:
                symbol_energy = np.zeros(spec.size)
            window_energy = window_energy_table(spec, symbol_energy)
        H, V = _pair_tables(spec)
        offs = np.array([(-w[1], w[0]) for w in spec.window], dtype=np.int64)
        return cls(spec, spec.dense_table(), np.asarray(window_energy, dtype=float),
                   H.astype(np.uint8), V.astype(np.uint8), offs)


@dataclass
class ChainSpec:
    """One Markov chain.

    ``lattice`` is ``"torus"`` or ``"pinned"``; a pinned chain lives on a
    ``shape`` box surrounded by a frame of ``boundary`` symbols.  ``init``
    is the starting symbol (or a full starting array) and must give an
    admissible configuration.
    """

    kernel: Kernel
    beta: float
    shape: tuple
    lattice: str = "torus"
    boundary: int = 0
    init: object = 0
    seed: int = 0
    chain: int = 0
    sweeps: int = 100
    thin: int = 1
    burn_in: int = 0
    block: int = 1
    validate_every: int = 100
    max_fills: int = 1 << 16

    @property
    def torus(self):
        return self.lattice == "torus"

    def frame(self):
        return 0 if self.torus else window_radius(self.kernel.spec.window)


@dataclass
class ChainState:
    values: np.ndarray
    mutable: np.ndarray
    frame: int
    pos: np.ndarray = None
    fills: np.ndarray = None
    energies: np.ndarray = None

    def interior(self):
        f = self.frame
        h, w = self.values.shape
        return self.values[f:h - f, f:w - f]


def initial_state(chain):
    h, w = chain.shape
    f = chain.frame()
    vals = np.full((h + 2 * f, w + 2 * f), chain.boundary, dtype=np.int64)
    if np.ndim(chain.init) == 0:
        vals[f:f + h, f:f + w] = int(chain.init)
    else:
        vals[f:f + h, f:f + w] = np.asarray(chain.init, dtype=np.int64)
    mutable = np.zeros(vals.shape, dtype=np.uint8)
    mutable[f:f + h, f:f + w] = 1
    st = ChainState(vals, mutable, f)
    _check(st, chain)
    return st


def _check(state, chain):
    k = chain.kernel
    if not kernels.all_windows_allowed(state.values, state.mutable, k.table, k.offs, k.spec.size, chain.torus):
        raise NotAdmissible("chain configuration has a forbidden window")


def heatbath_sweep(state, chain, rng):
    """One sweep: every block (or site) is resampled once, in random order."""
    k = chain.kernel
    size = chain.block
    h, w = state.values.shape
    if state.pos is None:
        state.pos = np.full(state.values.shape, -1, dtype=np.int64)
        state.fills = np.zeros((chain.max_fills, size * size), dtype=np.int64)
        state.energies = np.zeros(chain.max_fills, dtype=np.float64)
    if size == 1:
        orr = occ = 0
    else:
        orr, occ = (int(v) for v in rng.integers(0, size, 2))
        if not chain.torus:
            orr, occ = -orr, -occ
    nbr = -(-(h - orr) // size)
    nbc = -(-(w - occ) // size)
    order = rng.permutation(nbr * nbc).astype(np.int64)
    uniforms = rng.random(nbr * nbc)
    status = kernels.sweep(state.values, state.mutable, size, orr, occ, nbc, order, uniforms,
                           k.table, k.wen, k.hpair, k.vpair, k.offs, k.spec.size, chain.torus,
                           float(chain.beta), state.pos, state.fills, state.energies)
    if status == kernels.FILL_BUFFER_FULL:
        raise StateBudgetExceeded(f"a block admits more than {chain.max_fills} fills", chain.max_fills)
    return state


def block_conditional(state, chain, r0, c0):
    """Exact law used to resample the block at ``(r0, c0)``.

    Returns ``(cells, fills, probabilities)`` with ``cells`` as (row, col)
    pairs of the state array.
    """
    k = chain.kernel
    size = chain.block
    pos = np.full(state.values.shape, -1, dtype=np.int64)
    fills = np.zeros((chain.max_fills, size * size), dtype=np.int64)
    energies = np.zeros(chain.max_fills)
    status, count, n, cr, cc = kernels.enumerate_fills(
        state.values, state.mutable, r0, c0, size, k.table, k.wen, k.hpair, k.vpair, k.offs,
        k.spec.size, chain.torus, pos, fills, energies, kernels.scratch(size, len(k.offs)))
    if status == kernels.FILL_BUFFER_FULL:
        raise StateBudgetExceeded(f"a block admits more than {chain.max_fills} fills", chain.max_fills)
    e = energies[:count]
    w = np.exp(-chain.beta * (e - e.min())) if count else e
    cells = list(zip(cr[:n].tolist(), cc[:n].tolist()))
    return cells, [tuple(f) for f in fills[:count, :n].tolist()], w / w.sum() if count else w


@dataclass
class OrderParameterTrace:
    rows: list = field(default_factory=list)  # (sweep, statistics)


def run_chain(chain, observe, state=None):
    """Run ``chain.sweeps`` sweeps and record ``observe(interior array)``
    every ``thin`` sweeps after burn-in."""
    state = state or initial_state(chain)
    trace = OrderParameterTrace()
    for s in range(1, chain.sweeps + 1):
        heatbath_sweep(state, chain, philox(chain.seed, chain.chain, s))
        if chain.validate_every and s % chain.validate_every == 0:
            _check(state, chain)
        if s > chain.burn_in and (s - chain.burn_in) % chain.thin == 0:
            trace.rows.append((s, observe(state.interior())))
    return trace, state


def run_chains(chains, observe, threads=1):
    """Run independent chains, optionally on a thread pool; results keep input order."""
    if threads <= 1 or len(chains) <= 1:
        return [run_chain(c, observe)[0] for c in chains]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return [r[0] for r in pool.map(lambda c: run_chain(c, observe), chains)]


# -- statistics -----------------------------------------------------------


def order_parameter(values, tag, alphabet=None, q=None):
    """Summary statistics of a configuration.

    ``tag == "vertex"``: fractions of dot-class, cross-class and arrow sites
    and the largest 4-connected dot and cross clusters as fractions of the
    lattice.  ``tag == "potts"``: colour histogram and largest colour share.
    """
    v = np.asarray(values)
    n = v.size
    if tag == "vertex":
        from ..models import vertex

        cls = np.array(["oxa".index(vertex.colour_class(a)) for a in alphabet])[v]
        out = {"dot": float((cls == 0).mean()), "cross": float((cls == 1).mean()), "arrow": float((cls == 2).mean())}
        for name, c in (("dot", 0), ("cross", 1)):
            lab, k = ndimage.label(cls == c)
            out[f"largest_{name}"] = float(np.bincount(lab.ravel())[1:].max() / n) if k else 0.0
        return out
    if tag == "potts":
        hist = np.bincount(v.ravel(), minlength=q) / n
        return {"histogram": hist.tolist(), "max_share": float(hist.max())}
    raise ValueError(f"unknown model tag {tag!r}")


def origin_indicator(target_classes):
    """Observer: 1.0 when the centre site's symbol is in ``target_classes``."""
    target = np.asarray(target_classes, dtype=bool)

    def observe(interior):
        h, w = interior.shape
        return float(target[interior[h // 2, w // 2]])

    return observe


def chain_means(traces):
    return np.array([np.mean([r[1] for r in t.rows]) for t in traces])


def gap_with_error(means_a, means_b):
    """Difference of chain averages and its standard error."""
    a, b = np.asarray(means_a), np.asarray(means_b)
    gap = a.mean() - b.mean()
    err = math.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b)) if len(a) > 1 and len(b) > 1 else math.nan
    return float(gap), float(err)


# -- lifts ----------------------------------------------------------------


def sample_max_entropy(lift, chain, rng_seed=None, observe=None):
    """Yield configurations of a tone lift with (asymptotically) maximal entropy.

    The base chain runs at ``beta_N`` regardless of ``chain.beta``; each
    recorded base configuration is decorated with independent uniform
    tones.  The chain's kernel must be built on the lift's effective base
    with its energies.
    """
    from ..burton_steif import lift_sample

    c = ChainSpec(**{**chain.__dict__, "beta": lift.beta})
    state = initial_state(c)
    for s in range(1, c.sweeps + 1):
        heatbath_sweep(state, c, philox(c.seed, c.chain, s))
        if c.validate_every and s % c.validate_every == 0:
            _check(state, c)
        if s > c.burn_in and (s - c.burn_in) % c.thin == 0:
            base = state.interior().copy()
            tones = philox(c.seed if rng_seed is None else rng_seed, c.chain, s + (1 << 40))
            yield s, base, lift_sample(base, lift, tones)
