"""q-colour Potts model, recoded as a cross-window SFT with one-letter energies.

A letter is the colouring of a cross ``(centre, E, N, W, S)``; neighbouring
letters must agree on the sites they share.  The letter energy is half the
number of arms whose colour differs from the centre, so summing letter
energies over a volume counts each disagreeing bond once.
"""

import itertools

import numpy as np

from ..lattice import Site
from ..sft import CROSS, SftSpec, full_shift

# L1 ball of radius 2: the union of the five crosses of a cross
DIAMOND = tuple(Site(x, y) for y in range(2, -3, -1) for x in range(-2, 3) if abs(x) + abs(y) <= 2)


def letter_code(colours, q):
    """Index of a letter given its five colours in cross order."""
    code = 0
    mult = 1
    for c in colours:
        code += int(c) * mult
        mult *= q
    return code


def letter_colours(code, q):
    out = []
    for _ in range(5):
        out.append(code % q)
        code //= q
    return tuple(out)


def potts_cross_spec(q):
    """Cross-coded q-colour Potts SFT.

    Letters are indexed so that the letter index equals the code of its
    colour pattern on the cross, i.e. letter ``i`` has centre colour
    ``i % q``.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    names = ["".join(str(c) if q <= 10 else f"{c}." for c in letter_colours(i, q)) for i in range(q ** 5)]
    pos = {s: i for i, s in enumerate(DIAMOND)}
    n = len(DIAMOND)
    colourings = np.array(np.unravel_index(np.arange(q ** n), (q,) * n)).T
    rows = np.zeros((len(colourings), 5), dtype=np.int64)
    weights = q ** np.arange(5)
    for k, c in enumerate(CROSS):
        cols = [pos[c + w] for w in CROSS]
        rows[:, k] = colourings[:, cols] @ weights
    return SftSpec(names, CROSS, allowed=rows, name=f"potts-{q}", prune=False)


def disagreeing_arms(code, q):
    c = letter_colours(code, q)
    return sum(1 for a in c[1:] if a != c[0])


def potts_letter_energies(q):
    """Half the number of arms disagreeing with the centre, per letter."""
    return np.array([0.5 * disagreeing_arms(i, q) for i in range(q ** 5)])


def colour_model(q):
    """The colour-level chain model: the full shift on q colours with the cross
    window, plus the window energy table.

    A window pattern of colours is exactly a letter, so the table is the
    letter energy indexed by window code.
    """
    spec = full_shift(q, CROSS)
    return spec, potts_letter_energies(q)


def encode_letters(colours, q):
    """Letters of every site of a periodic colour array (row 0 north)."""
    c = np.asarray(colours, dtype=np.int64)
    out = np.zeros_like(c)
    mult = 1
    for dx, dy in CROSS:
        out += np.roll(c, shift=(dy, -dx), axis=(0, 1)) * mult
        mult *= q
    return out


def disagreeing_bonds(colours, periodic=True):
    c = np.asarray(colours)
    if periodic:
        return int((c != np.roll(c, 1, axis=0)).sum() + (c != np.roll(c, 1, axis=1)).sum())
    return int((c[1:] != c[:-1]).sum() + (c[:, 1:] != c[:, :-1]).sum())


def random_colouring(shape, q, rng):
    return rng.integers(0, q, size=shape)


def all_colourings(n_sites, q):
    return itertools.product(range(q), repeat=n_sites)
