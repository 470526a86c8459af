"""Backtracking search over window constraints.

Each translated window that fits inside the region is a table constraint.
When the spec's allowed set can be listed, domains are kept generalised
arc consistent with bitset supports (rows of the allowed table as bits of a
Python int), which keeps extension searches almost backtrack free.  Specs
that cannot be listed (large implicit lifts) fall back to checking each
window once all of its sites are fixed.
"""

import sys

from . import budget
from .errors import SearchBudgetExceeded

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

_TABLE_ROW_LIMIT = 400_000


class _Table:
    def __init__(self, spec):
        rows = spec.allowed_patterns()
        self.n = len(rows)
        self.k = spec.k
        self.A = spec.size
        self.sup = []
        for i in range(self.k):
            col = rows[:, i]
            per = []
            for s in range(self.A):
                idx = (col == s).nonzero()[0]
                mask = 0
                if len(idx):
                    bits = bytearray((self.n + 7) // 8)
                    for r in idx.tolist():
                        bits[r >> 3] |= 1 << (r & 7)
                    mask = int.from_bytes(bytes(bits), "little")
                per.append(mask)
            self.sup.append(per)
        self.full = (1 << self.n) - 1
        self._union = {}

    def union(self, i, dom):
        key = (i, dom)
        u = self._union.get(key)
        if u is None:
            u = 0
            sup = self.sup[i]
            d = dom
            s = 0
            while d:
                if d & 1:
                    u |= sup[s]
                d >>= 1
                s += 1
            self._union[key] = u
        return u


def _table_for(spec):
    cached = getattr(spec, "_table_cache", None)
    if cached is not None:
        return cached if cached is not False else None
    table = None
    try:
        if spec.n_allowed <= _TABLE_ROW_LIMIT and spec.size <= 4096:
            table = _Table(spec)
    except Exception:
        table = None
    try:
        spec._table_cache = table if table is not None else False
    except AttributeError:
        pass
    return table


def _bits(mask):
    out = []
    s = 0
    while mask:
        if mask & 1:
            out.append(s)
        mask >>= 1
        s += 1
    return out


class Search:
    """Find fillings of ``free`` sites given ``fixed`` symbols.

    ``domains`` optionally restricts each free site (dict site -> iterable of
    symbols).  ``solutions()`` yields tuples aligned with ``free``.
    """

    def __init__(self, spec, free, fixed, domains=None, node_budget=None):
        self.spec = spec
        self.free = list(free)
        self.node_budget = budget.search_nodes(node_budget)
        self.nodes = 0
        var = {s: i for i, s in enumerate(self.free)}
        region = set(self.free) | set(fixed)
        A = spec.size
        full = (1 << A) - 1
        self.dom = [full] * len(self.free)
        if domains:
            for s, vals in domains.items():
                if s in var:
                    m = 0
                    for v in vals:
                        m |= 1 << int(v)
                    self.dom[var[s]] = m
        self.table = _table_for(spec)
        anchors = set()
        for s in self.free:
            for w in spec.window:
                anchors.add((s[0] - w[0], s[1] - w[1]))
        self.cons = []
        self.var_cons = [[] for _ in self.free]
        self.dead = False
        for a in sorted(anchors):
            entries = []
            ok = True
            for i, w in enumerate(spec.window):
                site = (a[0] + w[0], a[1] + w[1])
                if site not in region:
                    ok = False
                    break
                if site in var:
                    entries.append((i, var[site], -1))
                else:
                    entries.append((i, -1, int(fixed[site])))
            if not ok:
                continue
            ci = len(self.cons)
            self.cons.append(entries)
            for i, v, _ in entries:
                if v >= 0:
                    self.var_cons[v].append(ci)
        # windows made only of fixed sites
        fixed_anchors = set()
        for s in fixed:
            for w in spec.window:
                fixed_anchors.add((s[0] - w[0], s[1] - w[1]))
        for a in fixed_anchors:
            pat = []
            for w in spec.window:
                site = (a[0] + w[0], a[1] + w[1])
                if site not in fixed or site in var:
                    pat = None
                    break
                pat.append(int(fixed[site]))
            if pat is not None and not spec.allows(pat):
                self.dead = True
        if self.table is not None:
            self.fixed_rows = []
            for entries in self.cons:
                rows = self.table.full
                for i, v, sym in entries:
                    if v < 0:
                        rows &= self.table.sup[i][sym]
                self.fixed_rows.append(rows)
        if not self.dead and self.table is not None:
            if not self._propagate(set(range(len(self.cons))), None):
                self.dead = True
        elif not self.dead:
            for v, d in enumerate(self.dom):
                if d == 0:
                    self.dead = True

    # -- propagation ----------------------------------------------------

    def _revise(self, ci, trail, queue):
        table = self.table
        dom = self.dom
        rows = self.fixed_rows[ci]
        entries = self.cons[ci]
        for i, v, _ in entries:
            if v >= 0:
                rows &= table.union(i, dom[v])
                if not rows:
                    return False
        for i, v, _ in entries:
            if v < 0:
                continue
            d = dom[v]
            if d & (d - 1) == 0:
                continue
            sup = table.sup[i]
            nd = 0
            m = d
            s = 0
            while m:
                if m & 1 and rows & sup[s]:
                    nd |= 1 << s
                m >>= 1
                s += 1
            if nd != d:
                if nd == 0:
                    return False
                if trail is not None:
                    trail.append((v, d))
                dom[v] = nd
                for cj in self.var_cons[v]:
                    if cj != ci:
                        queue.add(cj)
        return True

    def _propagate(self, queue, trail):
        while queue:
            ci = queue.pop()
            if not self._revise(ci, trail, queue):
                return False
        return True

    def _check_assigned(self, v):
        # fallback mode: verify every window whose sites are now all singletons
        dom = self.dom
        for ci in self.var_cons[v]:
            pat = [0] * self.spec.k
            complete = True
            for i, u, sym in self.cons[ci]:
                if u < 0:
                    pat[i] = sym
                else:
                    d = dom[u]
                    if d & (d - 1):
                        complete = False
                        break
                    pat[i] = d.bit_length() - 1
            if complete and not self.spec.allows(pat):
                return False
        return True

    # -- search ---------------------------------------------------------

    def _assign(self, v, s, trail):
        trail.append((v, self.dom[v]))
        self.dom[v] = 1 << s
        if self.table is None:
            return self._check_assigned(v)
        return self._propagate(set(self.var_cons[v]), trail)

    def _undo(self, trail, mark):
        dom = self.dom
        while len(trail) > mark:
            v, d = trail.pop()
            dom[v] = d

    def _next_var(self, start):
        dom = self.dom
        for v in range(start, len(dom)):
            d = dom[v]
            if d & (d - 1):
                return v
            if self.table is None and not self._fixed_checked[v]:
                return v
        return -1

    def solutions(self, rng=None):
        if self.dead:
            return
        if self.table is None:
            self._fixed_checked = [False] * len(self.dom)
        trail = []
        yield from self._dfs(0, trail, rng)

    def _dfs(self, start, trail, rng):
        v = self._next_var(start)
        if v < 0:
            yield tuple(d.bit_length() - 1 for d in self.dom)
            return
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise SearchBudgetExceeded(f"search exceeded {self.node_budget} nodes", self.node_budget)
        values = _bits(self.dom[v])
        if rng is not None:
            rng.shuffle(values)
        for s in values:
            mark = len(trail)
            if self.table is None:
                self._fixed_checked[v] = True
            if self._assign(v, s, trail):
                yield from self._dfs(v + 1 if self.table is None else v, trail, rng)
            self._undo(trail, mark)
            if self.table is None:
                self._fixed_checked[v] = False

    def first(self, rng=None):
        for sol in self.solutions(rng=rng):
            return sol
        return None

    def count(self):
        n = 0
        for _ in self.solutions():
            n += 1
        return n
