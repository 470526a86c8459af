"""Tone lifts of an SFT with a one-letter interaction.

Every base symbol at energy level ``s`` is split into ``N**(maxS - s)``
toned copies, and the lifted SFT allows exactly the patterns whose colour
projection is allowed in the base.  Counting lifted fillings of a volume
then reproduces the base Gibbs measure at ``beta_N = log(N) / eps0``, which
is what the verifiers in this module check numerically.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import budget
from .errors import AlphabetBudgetExceeded, EmptySupport
from .gibbs import Interaction, partition_function, support, total_level
from .lattice import Patch
from .sft import SftSpec, check_local, enumerate_patches
from .transfer import leading_eigenvalue, strip_transfer_matrix


def beta_N(N, eps0):
    return math.log(N) / eps0


def tone_counts(interaction, N):
    top = interaction.max_level
    return [N ** (top - s) for s in interaction.symbol_level]


def lifted_names(base_names, counts):
    out = []
    for name, n in zip(base_names, counts):
        if n == 1:
            out.append(name)
        else:
            out.extend(f"{name}:{t}" for t in range(n))
    return out


class LiftedSpec(SftSpec):
    """A lifted SFT described through its colour projection.

    Membership is decided by projecting to the base; the allowed list is
    only materialised on request (and within the alphabet budget).
    """

    def __init__(self, base, colour, names, name=""):
        self.name = name
        self.window = base.window
        self.alphabet = tuple(names)
        self.mode = "lifted"
        self.base = base
        self.colour = np.asarray(colour, dtype=np.int64)
        self._codes = None
        self._code_set = None
        self._table_cache = None
        self._fibres = [np.nonzero(self.colour == b)[0] for b in range(base.size)]

    def allows_codes(self, codes):
        pats = self.decode(codes)
        return self.base.allows_codes(self.base.encode(self.colour[pats]))

    def allows(self, pattern):
        return self.base.allows([self.colour[s] for s in pattern])

    @property
    def n_allowed(self):
        sizes = np.array([len(f) for f in self._fibres], dtype=object)
        pats = self.base.allowed_patterns()
        total = 0
        for row in pats:
            m = 1
            for s in row:
                m *= int(sizes[s])
            total += m
        return total

    def allowed_codes(self, limit=None):
        if self._codes is None:
            n = self.n_allowed
            cap = budget.alphabet_size(limit) * 50
            if n > cap:
                raise AlphabetBudgetExceeded(f"{n} lifted patterns exceed the listing budget", cap)
            pats = self.base.allowed_patterns()
            rows = []
            for row in pats:
                grids = np.meshgrid(*[self._fibres[s] for s in row], indexing="ij")
                rows.append(np.stack([g.ravel() for g in grids], axis=1))
            allp = np.concatenate(rows) if rows else np.zeros((0, self.k), dtype=np.int64)
            self._codes = np.unique(self.encode(allp))
        return self._codes

    def allowed_patterns(self, limit=None):
        return self.decode(self.allowed_codes(limit))

    def dense_table(self, limit=50_000_000):
        total = self.size ** self.k
        if total > limit:
            raise AlphabetBudgetExceeded(f"dense table of {total} entries exceeds {limit}", total)
        tab = np.zeros(total, dtype=np.uint8)
        tab[self.allowed_codes()] = 1
        return tab

    def __repr__(self):
        return f"LiftedSpec({self.name}, |A|={self.size}, base={self.base.name})"


@dataclass
class ToneLift:
    base: SftSpec
    interaction: Interaction
    N: int
    lifted: SftSpec
    colour: np.ndarray
    tone: np.ndarray
    custom_rules: bool = False
    effective_base: SftSpec = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.effective_base is None:
            self.effective_base = self.base

    @property
    def beta(self):
        return beta_N(self.N, self.interaction.eps0)

    def class_sizes(self):
        """Number of lifted symbols above each base symbol (counted, not computed)."""
        return np.bincount(self.colour, minlength=self.base.size)

    def project(self, values):
        return self.colour[np.asarray(values)]

    def project_patch(self, patch):
        return Patch(patch.volume, tuple(int(self.colour[s]) for s in patch.symbols))


def lift(spec, interaction, N, alphabet_budget=None, explicit_limit=300_000):
    """Generic tone lift of ``spec`` at tone parameter ``N``.

    The lifted spec is explicit when its allowed list is small enough,
    otherwise a ``LiftedSpec`` deciding membership through the base.
    """
    if N < 1 or int(N) != N:
        raise ValueError("N must be a positive integer")
    N = int(N)
    counts = tone_counts(interaction, N)
    total = sum(counts)
    cap = budget.alphabet_size(alphabet_budget)
    if total > cap:
        raise AlphabetBudgetExceeded(f"lifted alphabet of {total} symbols exceeds {cap}", cap)
    colour = np.repeat(np.arange(spec.size), counts)
    tone = np.concatenate([np.arange(n) for n in counts])
    names = lifted_names(spec.alphabet, counts)
    implicit = LiftedSpec(spec, colour, names, name=f"{spec.name}-lift{N}")
    lifted = implicit
    if implicit.n_allowed <= explicit_limit:
        lifted = SftSpec(names, spec.window, allowed=implicit.allowed_patterns(), name=implicit.name, prune=False)
    return ToneLift(spec, interaction, N, lifted, colour, tone)


def lift_sample(base_values, lift_, rng):
    """Attach independent uniform tones to a base configuration array."""
    base_values = np.asarray(base_values, dtype=np.int64)
    sizes = lift_.class_sizes()
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    u = rng.random(base_values.shape)
    t = np.minimum((u * sizes[base_values]).astype(np.int64), sizes[base_values] - 1)
    return starts[base_values] + t


# -- fibre counts ---------------------------------------------------------


def omega_fiber_count(lift_, volume, boundary, interior=None, node_budget=None):
    """Number of lifted interior fillings compatible with a lifted boundary.

    With ``interior`` (a base patch on ``volume``) only fillings projecting to
    it are counted.  Counting runs over base patches and multiplies the tone
    class sizes, in exact integers.
    """
    sizes = [int(v) for v in lift_.class_sizes()]
    pb = lift_.project_patch(boundary) if boundary is not None else None
    if interior is not None:
        from .lattice import compose

        full = compose(pb, interior) if pb is not None else interior
        if check_local(lift_.effective_base, full):
            return 0
        return math.prod(sizes[s] for s in interior.symbols)
    total = 0
    for p in enumerate_patches(lift_.effective_base, volume, pb, node_budget=node_budget):
        total += math.prod(sizes[s] for s in p.symbols)
    return total


def omega_fiber_count_bruteforce(lift_, volume, boundary, node_budget=None):
    """Same count by direct enumeration of lifted patches (small cases only)."""
    n = 0
    for _ in enumerate_patches(lift_.lifted, volume, boundary, node_budget=node_budget):
        n += 1
    return n


@dataclass
class IdentityCheck:
    lhs: float
    rhs: float
    deviation: float
    relative: float


def verify_counting_identity(lift_, volume, boundary, node_budget=None):
    """Compare the lifted fibre count with ``N**(maxS |V|) * Z(beta_N)``.

    ``deviation`` is relative: ``|lhs - rhs| / lhs``.
    """
    lhs = omega_fiber_count(lift_, volume, boundary, node_budget=node_budget)
    if lhs == 0:
        raise EmptySupport("boundary admits no lifted filling")
    pb = lift_.project_patch(boundary) if boundary is not None else None
    z = partition_function(lift_.effective_base, lift_.interaction, lift_.beta, volume, pb, node_budget=node_budget)
    scale = float(lift_.N) ** (lift_.interaction.max_level * len(volume))
    rhs = scale * z
    rel = abs(lhs - rhs) / lhs
    return IdentityCheck(float(lhs), rhs, rel, rel)


def verify_lemma(lift_, volume, boundary, node_budget=None):
    """Uniform lifted conditional versus Gibbs weight over fibre size.

    For every interior base patch ``a`` compatible with the projected
    boundary, compares ``1 / |Omega(x)|`` with
    ``mu(a | x) / |Omega(a, x)|``.  Returns the largest absolute deviation
    and the largest relative one.
    """
    sizes = [int(v) for v in lift_.class_sizes()]
    pb = lift_.project_patch(boundary) if boundary is not None else None
    patches = support(lift_.effective_base, volume, pb, node_budget=node_budget)
    if not patches:
        raise EmptySupport("boundary admits no filling")
    omega = sum(math.prod(sizes[s] for s in p.symbols) for p in patches)
    b = lift_.beta * lift_.interaction.eps0
    levels = [total_level(lift_.interaction, p.symbols) for p in patches]
    z = math.fsum(math.exp(-b * t) for t in levels)
    worst_abs = worst_rel = 0.0
    uniform = 1.0 / omega
    for p, t in zip(patches, levels):
        fibre = math.prod(sizes[s] for s in p.symbols)
        gibbs = math.exp(-b * t) / z / fibre
        worst_abs = max(worst_abs, abs(uniform - gibbs))
        worst_rel = max(worst_rel, abs(uniform - gibbs) / uniform)
    return IdentityCheck(uniform, uniform, worst_abs, worst_rel)


# -- entropy ---------------------------------------------------------------


def lifted_strip_entropy(lift_, width, lumped=True, wrap="cylinder"):
    """Entropy estimate ``log(lambda)/width`` of the lifted SFT on a strip.

    The lumped form merges tones: its states are base states and each
    appended symbol carries the size of its tone class, which has the same
    Perron eigenvalue as the unlumped lifted matrix.
    """
    if lumped:
        T, _ = strip_transfer_matrix(lift_.effective_base, width, site_weight=lift_.class_sizes().astype(float), wrap=wrap)
    else:
        T, _ = strip_transfer_matrix(lift_.lifted, width, wrap=wrap)
    return math.log(leading_eigenvalue(T).value) / width


def weighted_base_entropy(lift_, width, wrap="cylinder"):
    """``beta_N eps0 maxS + log(lambda_base(beta_N))/width``."""
    I = lift_.interaction
    b = lift_.beta
    w = np.exp(-b * I.energies)
    T, _ = strip_transfer_matrix(lift_.effective_base, width, site_weight=w, wrap=wrap)
    return b * I.eps0 * I.max_level + math.log(leading_eigenvalue(T).value) / width


def htop_identity_report(lift_, widths, lumped=True):
    rows = []
    for w in widths:
        a = lifted_strip_entropy(lift_, w, lumped=lumped)
        b = weighted_base_entropy(lift_, w)
        rows.append({"width": w, "lifted": a, "weighted_base": b, "abs_diff": abs(a - b)})
    return rows


def onsager_htop(N):
    """Closed-form topological entropy of the tone-lifted q = 2 Potts SFT.

    It equals ``2 beta_N + P(beta_N)`` with ``beta_N = 2 log N`` and ``P`` the
    Onsager pressure in the disagreement convention; written out, that is
    ``2 log N + log(2)/2 + (1/2pi) int_0^pi log(cosh^2 + sqrt(...)/kappa)``
    with ``cosh = (N^4+1)/(2N^2)`` and ``kappa = (2N^2/(N^4-1))^2``.
    ``N = 1`` is allowed and gives ``log 2``.
    """
    N = float(N)
    if N < 1:
        raise ValueError("N must be at least 1")
    ch = (N ** 4 + 1) / (2 * N * N)
    u = ((N ** 4 - 1) / (2 * N * N)) ** 2  # 1/kappa, stable as N -> 1

    def f(phi):
        return math.log(ch * ch + math.sqrt(max(u * u + 1.0 - 2.0 * u * math.cos(2 * phi), 0.0)))

    pts = [math.pi / 2] if abs(u - 1.0) > 1e-12 else None
    val, _ = quad(f, 0.0, math.pi, points=pts, epsabs=1e-14, epsrel=1e-13, limit=400)
    return 2.0 * math.log(N) + 0.5 * math.log(2.0) + val / (2 * math.pi)


def potts_lifted_strip_entropy(q, N, width):
    """Lumped lifted entropy of the q-colour cross-coded Potts lift, via colour columns.

    A letter with ``s`` disagreeing arms carries ``N**(4 - s)`` tones, so the
    lifted count factorises into ``N**4`` per site and ``N**-2`` per
    disagreeing bond.
    """
    from .gibbs import potts_strip_matrix

    T = potts_strip_matrix(q, width, bond_weight=float(N) ** -2, site_weight=float(N) ** 4)
    return math.log(leading_eigenvalue(T).value) / width
