"""Hot loops: backtracking search over partial mappings and X-swap rewiring.

Every kernel is written once as plain Python over numpy arrays. When numba
is importable and ``MOTIFSCOPE_NUMBA`` is not ``0`` the kernels are compiled
with ``@njit(nogil=True)`` so worker threads run them concurrently;
otherwise the same source runs interpreted (the slow fallback path).

Search constraint kinds, relative to the vertex being placed (``new``) and
an already bound vertex (``old``)::

    1  old -> new required      4  old -> new forbidden
    2  new -> old required      5  new -> old forbidden
    3  edge either way required
"""
import os

import numpy as np

REQ_IN, REQ_OUT, REQ_ANY, FORB_IN, FORB_OUT = 1, 2, 3, 4, 5
ANCHOR_OUT, ANCHOR_IN, ANCHOR_BOTH = 0, 1, 2

_flag = os.environ.get("MOTIFSCOPE_NUMBA", "1").strip().lower()
USE_NUMBA = _flag not in ("0", "false", "no", "off")
if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def jit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def backend() -> str:
    return f"numba {numba.__version__}" if USE_NUMBA else "python"


# -- adjacency ---------------------------------------------------------------

@jit
def has_edge(u, v, out_ptr, out_idx):
    lo = out_ptr[u]
    hi = out_ptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        w = out_idx[mid]
        if w < v:
            lo = mid + 1
        elif w > v:
            hi = mid
        else:
            return True
    return False


@jit
def _cand_len(d, assign, n, anchor_pos, anchor_mode, out_ptr, in_ptr):
    a = anchor_pos[d]
    if a < 0:
        return n
    h = assign[a]
    m = anchor_mode[d]
    if m == ANCHOR_OUT:
        return out_ptr[h + 1] - out_ptr[h]
    if m == ANCHOR_IN:
        return in_ptr[h + 1] - in_ptr[h]
    return out_ptr[h + 1] - out_ptr[h] + in_ptr[h + 1] - in_ptr[h]


@jit
def _cand_at(d, c, assign, anchor_pos, anchor_mode, out_ptr, out_idx, in_ptr, in_idx):
    """c-th raw candidate at depth d, or -1 for a duplicate to skip."""
    a = anchor_pos[d]
    if a < 0:
        return c
    h = assign[a]
    m = anchor_mode[d]
    if m == ANCHOR_OUT:
        return out_idx[out_ptr[h] + c]
    if m == ANCHOR_IN:
        return in_idx[in_ptr[h] + c]
    n_out = out_ptr[h + 1] - out_ptr[h]
    if c < n_out:
        return out_idx[out_ptr[h] + c]
    v = in_idx[in_ptr[h] + c - n_out]
    if has_edge(h, v, out_ptr, out_idx):
        return -1
    return v


@jit
def _feasible(v, d, assign, mask, cons_pos, cons_kind, n_cons, out_ptr, out_idx):
    if not mask[d, v]:
        return False
    for j in range(d):
        if assign[j] == v:
            return False
    for t in range(n_cons[d]):
        w = assign[cons_pos[d, t]]
        k = cons_kind[d, t]
        if k == REQ_IN:
            if not has_edge(w, v, out_ptr, out_idx):
                return False
        elif k == REQ_OUT:
            if not has_edge(v, w, out_ptr, out_idx):
                return False
        elif k == REQ_ANY:
            if not (has_edge(v, w, out_ptr, out_idx) or has_edge(w, v, out_ptr, out_idx)):
                return False
        elif k == FORB_IN:
            if has_edge(w, v, out_ptr, out_idx):
                return False
        elif k == FORB_OUT:
            if has_edge(v, w, out_ptr, out_idx):
                return False
    return True


# -- search ------------------------------------------------------------------

@jit
def expand(prefixes, n, mask, anchor_pos, anchor_mode, cons_pos, cons_kind, n_cons,
           out_ptr, out_idx, in_ptr, in_idx):
    """Children of each partial mapping row: bind the next plan position."""
    t_rows, p = prefixes.shape
    assign = np.empty(p + 1, dtype=np.int64)
    total = 0
    for r in range(t_rows):
        for j in range(p):
            assign[j] = prefixes[r, j]
        for c in range(_cand_len(p, assign, n, anchor_pos, anchor_mode, out_ptr, in_ptr)):
            v = _cand_at(p, c, assign, anchor_pos, anchor_mode, out_ptr, out_idx, in_ptr, in_idx)
            if v >= 0 and _feasible(v, p, assign, mask, cons_pos, cons_kind, n_cons, out_ptr, out_idx):
                total += 1
    out = np.empty((total, p + 1), dtype=np.int64)
    row = 0
    for r in range(t_rows):
        for j in range(p):
            assign[j] = prefixes[r, j]
        for c in range(_cand_len(p, assign, n, anchor_pos, anchor_mode, out_ptr, in_ptr)):
            v = _cand_at(p, c, assign, anchor_pos, anchor_mode, out_ptr, out_idx, in_ptr, in_idx)
            if v >= 0 and _feasible(v, p, assign, mask, cons_pos, cons_kind, n_cons, out_ptr, out_idx):
                for j in range(p):
                    out[row, j] = prefixes[r, j]
                out[row, p] = v
                row += 1
    return out


@jit
def search(prefixes, k, n, mask, anchor_pos, anchor_mode, cons_pos, cons_kind, n_cons,
           out_ptr, out_idx, in_ptr, in_idx, record):
    """Depth-first completion of every prefix row.

    Returns the number of complete mappings below the prefixes. ``record``
    must have either zero rows (count only) or exactly that many rows, in
    which case the mappings (plan order) are written into it.
    """
    t_rows, p = prefixes.shape
    keep = record.shape[0] > 0
    assign = np.empty(k, dtype=np.int64)
    cursor = np.zeros(k, dtype=np.int64)
    limit = np.zeros(k, dtype=np.int64)
    count = 0
    for r in range(t_rows):
        for j in range(p):
            assign[j] = prefixes[r, j]
        if p == k:
            if keep:
                for j in range(k):
                    record[count, j] = assign[j]
            count += 1
            continue
        d = p
        cursor[d] = 0
        limit[d] = _cand_len(d, assign, n, anchor_pos, anchor_mode, out_ptr, in_ptr)
        while d >= p:
            found = -1
            while cursor[d] < limit[d]:
                v = _cand_at(d, cursor[d], assign, anchor_pos, anchor_mode, out_ptr, out_idx, in_ptr, in_idx)
                cursor[d] += 1
                if v >= 0 and _feasible(v, d, assign, mask, cons_pos, cons_kind, n_cons, out_ptr, out_idx):
                    found = v
                    break
            if found < 0:
                d -= 1
                continue
            assign[d] = found
            if d == k - 1:
                if keep:
                    for j in range(k):
                        record[count, j] = assign[j]
                count += 1
            else:
                d += 1
                cursor[d] = 0
                limit[d] = _cand_len(d, assign, n, anchor_pos, anchor_mode, out_ptr, in_ptr)
    return count


# -- random numbers ----------------------------------------------------------

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@jit
def splitmix64_next(state):
    """Advance ``state`` (uint64 array of length 1) and return the next output."""
    state[0] = state[0] + _GAMMA
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


# -- edge hash set ------------------------------------------------------------
# Linear probing over int64 slots holding key + 1 (0 = empty), deletion by
# backward shift so no tombstones accumulate.

@jit
def _slot(key, mask):
    return (key ^ (key >> 13) ^ (key >> 29)) & mask


@jit
def _ht_new(keys):
    cap = 8
    while cap < 4 * keys.shape[0]:
        cap *= 2
    table = np.zeros(cap, dtype=np.int64)
    for t in range(keys.shape[0]):
        _ht_add(table, keys[t])
    return table


@jit
def _ht_find(table, key):
    mask = table.shape[0] - 1
    h = _slot(key, mask)
    while table[h] != 0:
        if table[h] == key + 1:
            return h
        h = (h + 1) & mask
    return -1


@jit
def _ht_add(table, key):
    mask = table.shape[0] - 1
    h = _slot(key, mask)
    while table[h] != 0:
        if table[h] == key + 1:
            return
        h = (h + 1) & mask
    table[h] = key + 1


@jit
def _ht_remove(table, key):
    i = _ht_find(table, key)
    if i < 0:
        return
    mask = table.shape[0] - 1
    table[i] = 0
    j = i
    while True:
        j = (j + 1) & mask
        if table[j] == 0:
            return
        k = _slot(table[j] - 1, mask)
        if i <= j:
            stays = i < k <= j
        else:
            stays = k > i or k <= j
        if not stays:
            table[i] = table[j]
            table[j] = 0
            i = j


# -- X-swap ------------------------------------------------------------------

@jit
def xswap(src, dst, n, attempts, seed):
    """Rewire ``src``/``dst`` in place with ``attempts`` X-swap proposals.

    Each attempt picks two distinct edge slots i, j uniformly; edges (a, b)
    and (c, d) become (a, d) and (c, b) unless that creates a self-loop or
    an existing edge. Returns the number of accepted swaps.
    """
    m = src.shape[0]
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    present = _ht_new(src * n + dst)
    um = np.uint64(m)
    um1 = np.uint64(m - 1)
    accepted = 0
    for _ in range(attempts):
        i = np.int64(splitmix64_next(state) % um)
        j = np.int64(splitmix64_next(state) % um1)
        if j >= i:
            j += 1
        a = src[i]
        b = dst[i]
        c = src[j]
        d = dst[j]
        if a == d or c == b:
            continue
        ad = a * n + d
        cb = c * n + b
        if _ht_find(present, ad) >= 0 or _ht_find(present, cb) >= 0:
            continue
        _ht_remove(present, a * n + b)
        _ht_remove(present, c * n + d)
        _ht_add(present, ad)
        _ht_add(present, cb)
        dst[i] = d
        dst[j] = b
        accepted += 1
    return accepted
