"""Compiled heat-bath block updates.

A configuration is a 2D array of symbol indices with row 0 north.  Window
offsets are given as (row, column) displacements.  ``table`` is the dense
allowed-pattern lookup indexed by window code, ``wen`` the energy of each
window code; ``hpair[a, b]`` says ``b`` may sit east of ``a`` and
``vpair[a, b]`` that ``b`` may sit south of ``a``.

A block update lists every fill of the block's mutable cells that keeps all
windows touching the block allowed, then draws one fill with probability
proportional to ``exp(-beta * energy)``.
"""

import numpy as np
from numba import njit

OK = 0
FILL_BUFFER_FULL = 1


@njit(cache=True, nogil=True)
def _wrap(i, n, torus):
    if torus:
        return i % n
    return i


@njit(cache=True, nogil=True)
def _inside(r, c, h, w, torus):
    return torus or (0 <= r < h and 0 <= c < w)


@njit(cache=True, nogil=True)
def _window_code(state, r, c, offs, A, torus):
    h, w = state.shape
    code = 0
    mult = 1
    for k in range(offs.shape[0]):
        rr = r + offs[k, 0]
        cc = c + offs[k, 1]
        if torus:
            rr %= h
            cc %= w
        code += state[rr, cc] * mult
        mult *= A
    return code


@njit(cache=True, nogil=True)
def _window_inside(r, c, offs, h, w, torus):
    if torus:
        return True
    for k in range(offs.shape[0]):
        rr = r + offs[k, 0]
        cc = c + offs[k, 1]
        if rr < 0 or rr >= h or cc < 0 or cc >= w:
            return False
    return True


@njit(cache=True, nogil=True)
def scratch(size, nwin):
    """Work arrays for ``enumerate_fills``, allocated once per sweep."""
    n = size * size
    return (np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64),
            np.empty(n * nwin, dtype=np.int64), np.empty(n * nwin, dtype=np.int64),
            np.zeros(n + 1, dtype=np.int64), np.empty(n, dtype=np.int64), np.zeros(n + 1, dtype=np.float64))


@njit(cache=True, nogil=True)
def enumerate_fills(state, mutable, r0, c0, size, table, wen, hpair, vpair, offs, A,
                    torus, pos, fills, energies, work):
    """List the admissible fills of the block with top-left cell ``(r0, c0)``.

    Returns ``(status, count, n, cells_r, cells_c)``: fill ``i`` puts
    ``fills[i, t]`` on cell ``(cells_r[t], cells_c[t])`` and has energy
    ``energies[i]`` (summed over the windows touching the block).  ``pos``
    is a scratch array shaped like ``state`` holding -1 everywhere; it is
    left marking the block cells, and ``state`` is left unchanged.
    """
    h, w = state.shape
    nwin = offs.shape[0]
    cells_r, cells_c, saved, anc_r, anc_c, anc_start, choice, partial = work
    n = 0
    for i in range(size):
        for j in range(size):
            r = r0 + i
            c = c0 + j
            if not _inside(r, c, h, w, torus):
                continue
            r = _wrap(r, h, torus)
            c = _wrap(c, w, torus)
            if not mutable[r, c] or pos[r, c] >= 0:
                continue
            pos[r, c] = n
            cells_r[n] = r
            cells_c[n] = c
            n += 1
    if n == 0:
        return OK, 0, 0, cells_r, cells_c
    for t in range(n):
        saved[t] = state[cells_r[t], cells_c[t]]

    # anchors whose window is completed by each cell, found once per block
    m = 0
    for t in range(n):
        anc_start[t] = m
        for k in range(nwin):
            ar = cells_r[t] - offs[k, 0]
            ac = cells_c[t] - offs[k, 1]
            if not _inside(ar, ac, h, w, torus):
                continue
            ar = _wrap(ar, h, torus)
            ac = _wrap(ac, w, torus)
            if not _window_inside(ar, ac, offs, h, w, torus):
                continue
            last = -1
            for kk in range(nwin):
                rr = _wrap(ar + offs[kk, 0], h, torus)
                cc = _wrap(ac + offs[kk, 1], w, torus)
                if pos[rr, cc] > last:
                    last = pos[rr, cc]
            if last != t:
                continue
            dup = False
            for q in range(anc_start[t], m):
                if anc_r[q] == ar and anc_c[q] == ac:
                    dup = True
                    break
            if not dup:
                anc_r[m] = ar
                anc_c[m] = ac
                m += 1
    anc_start[n] = m

    # depth-first enumeration of the fills
    choice[:n] = -1
    partial[0] = 0.0
    count = 0
    status = OK
    t = 0
    while t >= 0:
        choice[t] += 1
        if choice[t] >= A:
            choice[t] = -1
            state[cells_r[t], cells_c[t]] = saved[t]
            t -= 1
            continue
        a = choice[t]
        r = cells_r[t]
        c = cells_c[t]
        state[r, c] = a
        good = True
        # pair checks against neighbours that are already fixed
        for d in range(4):
            if d == 0:
                rr, cc = r, c - 1
            elif d == 1:
                rr, cc = r, c + 1
            elif d == 2:
                rr, cc = r - 1, c
            else:
                rr, cc = r + 1, c
            if not _inside(rr, cc, h, w, torus):
                continue
            rr = _wrap(rr, h, torus)
            cc = _wrap(cc, w, torus)
            p = pos[rr, cc]
            if p >= t:
                continue
            b = state[rr, cc]
            if d == 0:
                ok = hpair[b, a]
            elif d == 1:
                ok = hpair[a, b]
            elif d == 2:
                ok = vpair[b, a]
            else:
                ok = vpair[a, b]
            if not ok:
                good = False
                break
        if not good:
            continue
        e = partial[t]
        for q in range(anc_start[t], anc_start[t + 1]):
            code = _window_code(state, anc_r[q], anc_c[q], offs, A, torus)
            if table[code] == 0:
                good = False
                break
            e += wen[code]
        if not good:
            continue
        if t == n - 1:
            if count >= fills.shape[0]:
                status = FILL_BUFFER_FULL
                break
            for s in range(n):
                fills[count, s] = choice[s]
            energies[count] = e
            count += 1
            continue
        partial[t + 1] = e
        t += 1
    for s in range(n):
        state[cells_r[s], cells_c[s]] = saved[s]
    return status, count, n, cells_r, cells_c


@njit(cache=True, nogil=True)
def update_block(state, mutable, r0, c0, size, table, wen, hpair, vpair, offs, A,
                 torus, beta, u, pos, fills, energies, work):
    """Resample one block from its conditional law; returns a status code."""
    status, count, n, cells_r, cells_c = enumerate_fills(
        state, mutable, r0, c0, size, table, wen, hpair, vpair, offs, A, torus, pos, fills, energies, work)
    if status == OK and count > 0:
        emin = energies[0]
        for i in range(count):
            if energies[i] < emin:
                emin = energies[i]
        total = 0.0
        for i in range(count):
            total += np.exp(-beta * (energies[i] - emin))
        target = u * total
        acc = 0.0
        pick = count - 1
        for i in range(count):
            acc += np.exp(-beta * (energies[i] - emin))
            if acc > target:
                pick = i
                break
        for s in range(n):
            state[cells_r[s], cells_c[s]] = fills[pick, s]
    for s in range(n):
        pos[cells_r[s], cells_c[s]] = -1
    return status


@njit(cache=True, nogil=True)
def sweep(state, mutable, size, origin_r, origin_c, nbc, order, uniforms, table, wen,
          hpair, vpair, offs, A, torus, beta, pos, fills, energies):
    """Update the blocks listed in ``order`` (flat indices, ``nbc`` blocks per row) in turn."""
    work = scratch(size, offs.shape[0])
    for i in range(order.shape[0]):
        b = order[i]
        br = b // nbc
        bc = b % nbc
        status = update_block(state, mutable, origin_r + br * size, origin_c + bc * size, size,
                              table, wen, hpair, vpair, offs, A, torus, beta, uniforms[i],
                              pos, fills, energies, work)
        if status != OK:
            return status
    return OK


@njit(cache=True, nogil=True)
def all_windows_allowed(state, mutable, table, offs, A, torus):
    """True when every window touching a mutable cell is allowed."""
    h, w = state.shape
    for r in range(h):
        for c in range(w):
            if not _window_inside(r, c, offs, h, w, torus):
                continue
            touches = False
            for k in range(offs.shape[0]):
                rr = _wrap(r + offs[k, 0], h, torus)
                cc = _wrap(c + offs[k, 1], w, torus)
                if mutable[rr, cc]:
                    touches = True
                    break
            if touches and table[_window_code(state, r, c, offs, A, torus)] == 0:
                return False
    return True
