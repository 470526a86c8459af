"""Potts model with tones on bonds, on the L-shaped window ``{0, e1, e2}``.

A symbol is ``(colour, east tone, north tone)``: each site carries the tone
of its bond to the east and of its bond to the north.  An agreeing bond may
take any of ``N`` tones, a disagreeing bond only tone 0.  Since tone 0 is
always permitted, symbols with both tones 0 can sit next to anything.
"""

import itertools

from ..sft import L_WINDOW, SftSpec


def edge_symbols(q, N):
    return [(c, th, tv) for c in range(q) for th in range(N) for tv in range(N)]


def edge_potts_spec(q, N):
    syms = edge_symbols(q, N)
    names = [f"{c}.{th}{tv}" for c, th, tv in syms]
    rows = []
    for i, (c, th, tv) in enumerate(syms):
        for j, (ce, _, _) in enumerate(syms):
            if ce != c and th != 0:
                continue
            for k, (cn, _, _) in enumerate(syms):
                if cn != c and tv != 0:
                    continue
                rows.append((i, j, k))
    return SftSpec(names, L_WINDOW, allowed=rows, name=f"edge-potts-{q}-{N}", prune=False)


def safe_symbols(spec):
    """Indices of symbols whose two tones are 0."""
    return [i for i, n in enumerate(spec.alphabet) if n.endswith(".00")]


def edge_colour(spec):
    return [int(n.split(".")[0]) for n in spec.alphabet]


def all_patterns(q, N):
    return itertools.product(edge_symbols(q, N), repeat=3)
