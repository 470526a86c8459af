"""Strip transfer matrices and Perron eigenvalues.

For a window spanning ``k`` columns, a state is a block of ``k - 1``
consecutive columns of height ``width`` and a transition appends one
column.  A ``k``-column block is admissible when every window anchored so
that its columns are exactly the block's columns is allowed; with
``wrap="cylinder"`` rows are periodic, with ``"free"`` only windows that fit
vertically are checked.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from . import budget
from .errors import StateBudgetExceeded


@dataclass
class Eigen:
    value: float
    lower: float
    upper: float
    vector: np.ndarray
    iterations: int
    converged: bool


def leading_eigenvalue(T, tol=1e-12, max_iter=100_000, shift=0.0):
    """Perron eigenvalue of a non-negative matrix by power iteration.

    Collatz-Wielandt quotients ``min (Tx)_i / x_i`` and ``max (Tx)_i / x_i``
    bracket the eigenvalue for irreducible ``T``; iteration stops once the
    bracket is narrower than ``tol`` times the estimate.  A positive
    ``shift`` iterates ``T + shift * I`` instead, which helps periodic
    matrices and leaves the Perron vector unchanged.
    """
    n = T.shape[0]
    x = np.full(n, 1.0 / n)
    lo, hi = 0.0, math.inf
    for it in range(1, max_iter + 1):
        y = np.asarray(T @ x).ravel() + shift * x
        ratios = y / x
        lo, hi = float(ratios.min()) - shift, float(ratios.max()) - shift
        s = y.sum()
        est = s - shift
        if hi - lo <= tol * max(abs(est), 1e-300):
            return Eigen(0.5 * (lo + hi), lo, hi, y / s, it, True)
        x = y / s
        # keep every entry strictly positive so the quotients stay defined
        np.maximum(x, 1e-300, out=x)
    return Eigen(0.5 * (lo + hi), lo, hi, x, max_iter, False)


def _pair_tables(spec):
    """Horizontal and vertical compatibility of symbol pairs read off the allowed patterns."""
    A = spec.size
    pats = spec.allowed_patterns()
    pos = {(w[0], w[1]): i for i, w in enumerate(spec.window)}
    H = np.zeros((A, A), dtype=bool)
    V = np.zeros((A, A), dtype=bool)  # V[a, b]: a directly above b
    h_found = v_found = False
    for (x, y), i in pos.items():
        j = pos.get((x + 1, y))
        if j is not None:
            H[pats[:, i], pats[:, j]] = True
            h_found = True
        j = pos.get((x, y - 1))
        if j is not None:
            V[pats[:, i], pats[:, j]] = True
            v_found = True
    used = np.zeros(A, dtype=bool)
    used[np.unique(pats)] = True
    if not h_found:
        H = used[:, None] & used[None, :]
    if not v_found:
        V = used[:, None] & used[None, :]
    return H, V


def admissible_blocks(spec, width, wrap="cylinder", block_budget=None):
    """All admissible blocks of ``span`` columns, as tuples of rows (top row first)."""
    limit = budget.transfer_states(block_budget) * 20
    xs = [w[0] for w in spec.window]
    xmin, xmax = min(xs), max(xs)
    span = xmax - xmin + 1
    H, V = _pair_tables(spec)
    A = spec.size
    # candidate rows: span-tuples with horizontally compatible neighbours
    cands = [t for t in itertools.product(range(A), repeat=span)
             if all(H[t[j], t[j + 1]] for j in range(span - 1))]
    cidx = np.array(cands, dtype=np.int64).reshape(-1, span)
    # vertical compatibility between candidate rows
    ok = np.ones((len(cands), len(cands)), dtype=bool)
    for j in range(span):
        ok &= V[cidx[:, j][:, None], cidx[:, j][None, :]]
    nxt = [np.nonzero(ok[i])[0].tolist() for i in range(len(cands))]
    # windows anchored in every row at column -xmin, grouped by the row at
    # which all their rows are placed
    checks = [[] for _ in range(width)]
    for ar in range(width):
        cells = []
        fits = True
        for dx, dy in spec.window:
            r = ar - dy
            if wrap == "cylinder":
                r %= width
            elif not 0 <= r < width:
                fits = False
                break
            cells.append((r, dx - xmin))
        if fits:
            checks[max(r for r, _ in cells)].append(cells)
    allowed = spec.allows
    blocks = []
    rows = []

    def windows_ok(r):
        for cells in checks[r]:
            if not allowed([cands[rows[rr]][c] for rr, c in cells]):
                return False
        return True

    def dfs(r):
        if r == width:
            if wrap == "cylinder" and width > 1 and not ok[rows[-1], rows[0]]:
                return
            blocks.append(tuple(rows))
            if len(blocks) > limit:
                raise StateBudgetExceeded(f"more than {limit} admissible strip blocks", limit)
            return
        options = range(len(cands)) if r == 0 else nxt[rows[-1]]
        for c in options:
            rows.append(c)
            if windows_ok(r):
                dfs(r + 1)
            rows.pop()

    dfs(0)
    # convert to column tuples
    out = []
    for b in blocks:
        out.append(tuple(tuple(cands[ri][j] for ri in b) for j in range(span)))
    return out


def strip_transfer_matrix(spec, width, site_weight=None, wrap="cylinder", state_budget=None):
    """Transfer matrix of ``spec`` on a strip of height ``width``.

    Returns ``(T, states)``: a scipy CSR matrix and the list of states
    (tuples of columns).  Entry ``(s, s')`` is the product of
    ``site_weight[symbol]`` over the appended column, or 1 without weights.
    States that lie on no cycle are dropped.  Raises
    ``StateBudgetExceeded`` past the state budget.
    """
    limit = budget.transfer_states(state_budget)
    blocks = admissible_blocks(spec, width, wrap, state_budget)
    weights = None if site_weight is None else np.asarray(site_weight, dtype=float)
    index = {}
    ii, jj, vv = [], [], []
    for b in blocks:
        s, t = b[:-1], b[1:]
        for key in (s, t):
            if key not in index:
                index[key] = len(index)
                if len(index) > limit:
                    raise StateBudgetExceeded(f"more than {limit} strip states", limit)
        ii.append(index[s])
        jj.append(index[t])
        vv.append(1.0 if weights is None else float(np.prod(weights[list(b[-1])])))
    n = len(index)
    if n == 0:
        return sparse.csr_matrix((0, 0)), []
    T = sparse.csr_matrix((vv, (ii, jj)), shape=(n, n))
    states = [None] * n
    for key, k in index.items():
        states[k] = key
    keep = _cyclic_states(T)
    T = T[keep][:, keep].tocsr()
    return T, [states[k] for k in keep]


def _cyclic_states(T):
    n = T.shape[0]
    ncomp, labels = connected_components(T, directed=True, connection="strong")
    sizes = np.bincount(labels, minlength=ncomp)
    cyc = sizes > 1
    for s in np.nonzero(T.diagonal() > 0)[0]:
        cyc[labels[s]] = True
    return [s for s in range(n) if cyc[labels[s]]]


def strip_entropy(spec, width, site_weight=None, wrap="cylinder", tol=1e-12, state_budget=None):
    """``log(lambda) / width`` for the strip transfer matrix."""
    T, _ = strip_transfer_matrix(spec, width, site_weight, wrap, state_budget)
    if T.shape[0] == 0:
        return -math.inf
    lam = leading_eigenvalue(T, tol=tol).value
    return math.log(lam) / width
