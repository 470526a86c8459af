"""One-letter interactions, finite-volume Gibbs quantities and Potts/Ising closed forms.

An ``Interaction`` stores one energy level per symbol as an integer multiple
of a step ``eps0``; partition functions are sums over admissible interior
patches given a fixed boundary.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import EmptySupport, NotCommensurable
from .lattice import Patch, compose
from .sft import enumerate_patches, check_extendable


@dataclass(frozen=True)
class Interaction:
    """Symbol energies ``eps0 * level[s]`` with integer levels."""

    eps0: float
    symbol_level: tuple

    @property
    def levels(self):
        return tuple(sorted(set(self.symbol_level)))

    @property
    def max_level(self):
        return max(self.symbol_level)

    @property
    def energies(self):
        return self.eps0 * np.asarray(self.symbol_level, dtype=float)

    def level(self, s):
        return self.symbol_level[s]


def validate_hypothesis_H(energies, rtol=1e-9, max_denominator=1000):
    """Find the largest step ``eps0`` such that all energies are non-negative multiples of it.

    Ratios to the smallest positive energy are matched to fractions with
    denominator at most ``max_denominator``; a mismatch above ``rtol`` raises
    ``NotCommensurable``.  An all-zero table gives ``eps0 = 1``.
    """
    vals = np.asarray(energies, dtype=float)
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise NotCommensurable("energies must be finite and non-negative")
    pos = vals[vals > 0]
    if len(pos) == 0:
        return Interaction(1.0, tuple(0 for _ in vals))
    ref = float(pos.min())
    fracs = []
    for v in vals:
        r = v / ref
        f = Fraction(r).limit_denominator(max_denominator)
        if abs(float(f) - r) > rtol * max(r, 1.0):
            raise NotCommensurable(f"energy {v!r} is not commensurable with {ref!r}")
        fracs.append(f)
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    ints = [int(f * lcm) for f in fracs]
    g = 0
    for n in ints:
        g = math.gcd(g, n)
    eps0 = ref * g / lcm
    return Interaction(eps0, tuple(n // g for n in ints))


def energy(interaction, symbols):
    """Total energy of a patch (or an iterable of symbol indices)."""
    if isinstance(symbols, Patch):
        symbols = symbols.symbols
    lv = interaction.symbol_level
    return interaction.eps0 * sum(lv[s] for s in symbols)


def total_level(interaction, symbols):
    lv = interaction.symbol_level
    return sum(lv[s] for s in symbols)


def support(spec, volume, boundary_patch=None, margin=0, node_budget=None):
    """Interior patches compatible with the boundary.

    Compatibility is local admissibility of boundary plus interior (every
    window inside their union is allowed).  With ``margin > 0`` the union
    must additionally extend by that margin.
    """
    out = []
    for p in enumerate_patches(spec, volume, boundary_patch, node_budget=node_budget):
        if margin:
            full = compose(boundary_patch, p) if boundary_patch is not None else p
            if not check_extendable(spec, full, margin, node_budget=node_budget)[0]:
                continue
        out.append(p)
    return out


def level_histogram(spec, interaction, volume, boundary_patch=None, margin=0, node_budget=None):
    """Map total level -> number of compatible interior patches."""
    hist = {}
    for p in support(spec, volume, boundary_patch, margin, node_budget):
        t = total_level(interaction, p.symbols)
        hist[t] = hist.get(t, 0) + 1
    return hist


def partition_function(spec, interaction, beta, volume, boundary_patch=None, margin=0, node_budget=None):
    hist = level_histogram(spec, interaction, volume, boundary_patch, margin, node_budget)
    if not hist:
        raise EmptySupport("no admissible interior patch for this boundary")
    b = beta * interaction.eps0
    return math.fsum(n * math.exp(-b * t) for t, n in hist.items())


def gibbs_conditional(spec, interaction, beta, volume, boundary_patch, interior, margin=0, node_budget=None):
    """Probability of ``interior`` given the boundary under the finite-volume Gibbs measure."""
    z = partition_function(spec, interaction, beta, volume, boundary_patch, margin, node_budget)
    full = compose(boundary_patch, interior) if boundary_patch is not None else interior
    from .sft import check_local

    if check_local(spec, full):
        return 0.0
    if margin and not check_extendable(spec, full, margin, node_budget=node_budget)[0]:
        return 0.0
    return math.exp(-beta * energy(interaction, interior)) / z


# -- Potts / Ising closed forms -------------------------------------------
#
# Convention: the Potts energy counts disagreeing nearest-neighbour bonds,
# so for q = 2 the Ising coupling is beta / 2 and the pressure carries a
# -beta shift relative to the usual spin form.


def _onsager_integral(a, u):
    # (1/2pi) int_0^pi log(a + sqrt(u^2 + 1 - 2 u cos 2phi)) dphi
    def f(phi):
        return math.log(a + math.sqrt(max(u * u + 1.0 - 2.0 * u * math.cos(2.0 * phi), 0.0)))

    pts = [math.pi / 2] if abs(u - 1.0) > 1e-12 else None
    val, _ = integrate.quad(f, 0.0, math.pi, points=pts, epsabs=1e-14, epsrel=1e-13, limit=400)
    return val / (2.0 * math.pi)


def onsager_minus_beta_f(beta):
    """Pressure (minus beta times free energy) of the q = 2 Potts model with disagreement energy."""
    beta = float(beta)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    u = math.sinh(beta) ** 2
    return -beta + 0.5 * math.log(2.0) + _onsager_integral(math.cosh(beta) ** 2, u)


def beta_critical_potts(q):
    """Inverse temperature of the Potts transition in the coupling convention ``exp(K delta)`` with ``K = 2 beta``.

    Equals ``log(1 + sqrt(q)) / 2``.
    """
    return 0.5 * math.log(1.0 + math.sqrt(q))


def ell_critical(q):
    return math.sqrt(q) + 1.0


def beta_critical_disagreement(q):
    """Transition point when the energy counts disagreeing bonds with unit weight."""
    return math.log(1.0 + math.sqrt(q))


def potts_strip_matrix(q, width, beta=None, bond_weight=None, site_weight=1.0):
    """Column transfer matrix of the q-colour Potts model on a cylinder.

    States are colourings of a column of ``width`` sites (periodic
    vertically).  The entry for ``c -> c'`` is
    ``site_weight**width * bond_weight**d`` where ``d`` counts disagreeing
    bonds inside ``c'`` and between ``c`` and ``c'``.  ``bond_weight``
    defaults to ``exp(-beta)``.
    """
    if bond_weight is None:
        bond_weight = math.exp(-beta)
    n = q ** width
    cols = np.array(np.unravel_index(np.arange(n), (q,) * width)).T if width else np.zeros((1, 0), int)
    vert = np.zeros(n, dtype=np.int64)
    for i in range(width):
        vert += cols[:, i] != cols[:, (i + 1) % width]
    horiz = np.zeros((n, n), dtype=np.int64)
    for i in range(width):
        horiz += cols[:, None, i] != cols[None, :, i]
    d = horiz + vert[None, :]
    return (site_weight ** width) * np.power(float(bond_weight), d)


def strip_pressure(q, width, beta, tol=1e-12):
    from .transfer import leading_eigenvalue

    lam = leading_eigenvalue(potts_strip_matrix(q, width, beta), tol=tol).value
    return math.log(lam) / width


def extrapolate_widths(widths, values, power=2):
    """Least-squares fit ``v(w) = v_inf + c / w**power``; returns ``v_inf``."""
    w = np.asarray(widths, dtype=float)
    v = np.asarray(values, dtype=float)
    X = np.stack([np.ones_like(w), w ** (-power)], axis=1)
    coef, *_ = np.linalg.lstsq(X, v, rcond=None)
    return float(coef[0])


def convexity_defect(fn, betas):
    """Smallest second difference of ``fn`` on an evenly spaced grid."""
    vals = np.array([fn(b) for b in betas])
    if len(vals) < 3:
        return 0.0
    return float(np.min(vals[2:] - 2 * vals[1:-1] + vals[:-2]))
