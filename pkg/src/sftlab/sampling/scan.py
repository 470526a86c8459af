"""Boundary-sensitivity scans over the tone parameter ``N``.

For each ``N`` the base model runs at ``beta_N`` on a pinned box, once with
each of two opposite frames.  The gap is the difference between the two
pinnings in the probability that the centre site has the first frame's
class; a gap near 0 means the frame is forgotten, a gap near 1 that it
propagates to the centre.
"""

import math

import numpy as np

from ..gibbs import beta_critical_disagreement
from ..sft import CROSS, full_shift
from . import ChainSpec, Kernel, chain_means, gap_with_error, origin_indicator, run_chains

SCHEMA = "phase-scan/1"
COLUMNS = ("family", "N", "beta", "gap", "gap_err", "p_first", "p_second", "chains", "sweeps",
           "threshold_sqrt_q", "threshold_beta_c", "status")


class Family:
    """A base model with two opposite pinnings and the class watched at the centre.

    ``thresholds`` holds two predicted critical values of ``N``: ``1 + sqrt q``
    and ``exp(beta_c * eps0)``.  They differ for Potts because of the factor 2
    between bond-counting conventions; the vertex family uses ``1 + sqrt 2``
    for both.
    """

    def __init__(self, name, kernel, eps0, pins, target, block, thresholds):
        self.name = name
        self.kernel = kernel
        self.eps0 = eps0
        self.pins = pins
        self.target = target
        self.block = block
        self.thresholds = thresholds

    def beta(self, N):
        return math.log(N) / self.eps0


def vertex_family():
    from ..models import vertex

    spec = vertex.vertex_spec(rule_d=True)
    k = Kernel.build(spec, symbol_energy=vertex.arrow_energies(spec))
    dot, cross = spec.alphabet.index(vertex.DOT), spec.alphabet.index(vertex.CROSS_SYM)
    target = [vertex.colour_class(a) == "o" for a in spec.alphabet]
    star = 1.0 + math.sqrt(2.0)  # exp(beta_star) with beta_N = log N
    return Family("vertex-lift", k, 1.0, (dot, cross), target, 4, (star, star))


def potts_family(q):
    from ..models import potts

    spec = full_shift(q, CROSS)
    k = Kernel.build(spec, window_energy=potts.potts_letter_energies(q))
    target = [c == 0 for c in range(q)]
    eps0 = 0.5
    sqrt_q = math.sqrt(q) + 1.0
    from_beta_c = math.exp(beta_critical_disagreement(q) * eps0)
    return Family(f"potts:{q}", k, eps0, (0, 1), target, 1, (sqrt_q, from_beta_c))


def family(name):
    if name == "vertex-lift":
        return vertex_family()
    if name.startswith("potts:"):
        return potts_family(int(name.split(":")[1]))
    raise ValueError(f"unknown scan family {name!r}")


def phase_scan(fam, grid, replicates=8, seed=0, size=32, sweeps=10_000, burn_in=None, thin=10, threads=1):
    """One row per ``N`` in ``grid``; failures are reported in ``status``."""
    if not grid:
        raise ValueError("empty parameter grid")
    burn_in = sweeps // 5 if burn_in is None else burn_in
    observe = origin_indicator(fam.target)
    rows = []
    for gi, N in enumerate(grid):
        beta = fam.beta(N)
        row = {"family": fam.name, "N": N, "beta": beta, "chains": replicates, "sweeps": sweeps,
               "threshold_sqrt_q": fam.thresholds[0], "threshold_beta_c": fam.thresholds[1]}
        try:
            means = []
            for pi, pin in enumerate(fam.pins):
                chains = [ChainSpec(fam.kernel, beta, (size, size), "pinned", boundary=pin, init=pin,
                                    seed=seed, chain=gi * 1_000_000 + pi * 1000 + r, sweeps=sweeps,
                                    thin=thin, burn_in=burn_in, block=fam.block)
                          for r in range(replicates)]
                means.append(chain_means(run_chains(chains, observe, threads)))
            gap, err = gap_with_error(*means)
            row.update(gap=gap, gap_err=err, p_first=float(means[0].mean()), p_second=float(means[1].mean()),
                       status="ok")
        except Exception as exc:  # a failed cell is reported, the scan goes on
            row.update(gap=math.nan, gap_err=math.nan, p_first=math.nan, p_second=math.nan,
                       status=f"error: {type(exc).__name__}: {exc}")
        rows.append(row)
    return rows


def monotone_within_errors(rows, sigmas=2.0):
    """True when no gap falls below its predecessor by more than ``sigmas`` combined errors."""
    for a, b in zip(rows, rows[1:]):
        tol = sigmas * math.hypot(a["gap_err"], b["gap_err"])
        if b["gap"] < a["gap"] - tol:
            return False
    return True


def transition_location(rows, level=0.5):
    """First ``N`` whose gap reaches ``level`` (linear interpolation), or None."""
    prev = None
    for r in rows:
        if r["gap"] >= level:
            if prev is None:
                return float(r["N"])
            g0, g1 = prev["gap"], r["gap"]
            return float(prev["N"] + (level - g0) / (g1 - g0) * (r["N"] - prev["N"]))
        prev = r
    return None
