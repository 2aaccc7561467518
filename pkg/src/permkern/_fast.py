"""Compiled divide-and-conquer evaluation of weighted non-inversion sums.

Each call partitions a segment of positions around a middle pivot into
values below and above the pivot's value, keeping positions in ascending
order. Positions are scanned left to right; every element at or above the
pivot value closes a concordant pair with each earlier low element, so
running sums over the low elements (``cnum``, ``ctop``, ``cwa``, ``cwb``,
``cww``) give all cross contributions in one pass. The pivot itself is
scored like a high element and then folded into the running sums, which
accounts for its pairs with later high elements; it is excluded from both
sub-segments, so every segment strictly shrinks.
"""
import numba
import numpy as np

STANDARD = 0
TOPK = 1
AVERAGE = 2
ADDITIVE = 3
MULTIPLICATIVE = 4

# pending segments: the smaller half is always processed first, so at most
# about log2(n) segments wait on the stack
STACK_SLOTS = 2 * 66


@numba.njit(cache=True, nogil=True)
def _push(stack, top, lo, mid, hi):
    # larger half below, smaller on top
    if mid - lo >= hi - mid:
        stack[top] = lo
        stack[top + 1] = mid
        stack[top + 2] = mid
        stack[top + 3] = hi
    else:
        stack[top] = mid
        stack[top + 1] = hi
        stack[top + 2] = lo
        stack[top + 3] = mid
    return top + 4


@numba.njit(cache=True, nogil=True)
def int_workspace(n):
    return (np.empty(n, dtype=np.int32), np.empty(n, dtype=np.int32),
            np.empty(n, dtype=np.int32), np.empty(n, dtype=np.int32),
            np.empty(STACK_SLOTS, dtype=np.int64))


@numba.njit(cache=True, nogil=True)
def real_workspace(n):
    return (np.empty(n, dtype=np.int32), np.empty(n, dtype=np.int32),
            np.empty(n), np.empty(n), np.empty(n), np.empty(n),
            np.empty(STACK_SLOTS, dtype=np.int64))


@numba.njit(cache=True, nogil=True)
def kappa_int_ws(pi, mode, k, ws):
    """Integer-valued kernels: STANDARD, TOPK and the AVERAGE numerator.

    ``pi`` holds 0-based values. For AVERAGE the return value is
    ``n * kappa``; each concordant pair ``(a, b)`` with ``a < b`` counts
    ``n - max(b, pi[b])`` (0-based), the number of cutoffs that keep it.
    ``ws`` comes from :func:`int_workspace`.
    """
    pos, val, tpos, tval, stack = ws
    n = pi.shape[0]
    # positions and values travel together so every pass reads sequentially
    for j in range(n):
        pos[j] = j
        val[j] = pi[j]
    stack[0] = 0
    stack[1] = n
    top = 2
    s = 0
    while top > 0:
        top -= 2
        lo = stack[top]
        hi = stack[top + 1]
        length = hi - lo
        if length < 2:
            continue
        mid = lo + length // 2
        pivot = pos[mid]
        pv = val[mid]
        nl = 0
        nh = 0
        cnum = 0
        ctop = 0
        # branch-free partition: each element is written to both sides and
        # the counters advance by 0/1 flags, so random inputs do not stall
        # on mispredicted comparisons
        for j in range(lo, hi):
            i = pos[j]
            p = val[j]
            low = 1 if p < pv else 0
            high = 1 - low
            piv = 1 if i == pivot else 0
            pos[lo + nl] = i
            val[lo + nl] = p
            tpos[nh] = i
            tval[nh] = p
            if mode == STANDARD:
                s += high * cnum
            elif mode == TOPK:
                inside = 1 if (i < k and p < k) else 0
                s += high * inside * ctop
                ctop += (low + piv) * inside
            else:
                m = i if i > p else p
                s += high * cnum * (n - m)
            cnum += low + piv
            nl += low
            nh += high - piv
        base = lo + nl
        for j in range(nh):
            pos[base + j] = tpos[j]
            val[base + j] = tval[j]
        top = _push(stack, top, lo, base, base + nh)
    return s


@numba.njit(cache=True, nogil=True)
def kappa_real_ws(pi, mode, u, ws):
    """Real-weighted kernels: ADDITIVE and MULTIPLICATIVE.

    Values are distinct, so the pivot is recognised by value and positions
    need not be stored; only their order matters. MULTIPLICATIVE carries
    the product ``u[i] * u[pi[i]]`` alone.
    """
    val, tval, wa, wb, twa, twb, stack = ws
    n = pi.shape[0]
    mult = mode == MULTIPLICATIVE
    for j in range(n):
        val[j] = pi[j]
        if mult:
            wa[j] = u[j] * u[pi[j]]
        else:
            wa[j] = u[j]        # u at the position
            wb[j] = u[pi[j]]    # u at the value
    stack[0] = 0
    stack[1] = n
    top = 2
    s = 0.0
    while top > 0:
        top -= 2
        lo = stack[top]
        hi = stack[top + 1]
        length = hi - lo
        if length < 2:
            continue
        pv = val[lo + length // 2]
        nl = 0
        nh = 0
        if mult:
            cww = 0.0
            for j in range(lo, hi):
                p = val[j]
                w = wa[j]
                low = 1 if p < pv else 0
                high = 1 - low
                piv = 1 if p == pv else 0
                val[lo + nl] = p
                wa[lo + nl] = w
                tval[nh] = p
                twa[nh] = w
                s += high * (cww * w)
                cww += float(low + piv) * w
                nl += low
                nh += high - piv
        else:
            cnum = 0.0
            cwa = 0.0
            cwb = 0.0
            cww = 0.0
            for j in range(lo, hi):
                p = val[j]
                ui = wa[j]
                up = wb[j]
                low = 1 if p < pv else 0
                high = 1 - low
                piv = 1 if p == pv else 0
                val[lo + nl] = p
                wa[lo + nl] = ui
                wb[lo + nl] = up
                tval[nh] = p
                twa[nh] = ui
                twb[nh] = up
                s += high * (cww + cwa * up + cwb * ui + cnum * ui * up)
                f = float(low + piv)
                cnum += f
                cwa += f * ui
                cwb += f * up
                cww += f * (ui * up)
                nl += low
                nh += high - piv
        base = lo + nl
        if mult:
            for j in range(nh):
                val[base + j] = tval[j]
                wa[base + j] = twa[j]
        else:
            for j in range(nh):
                val[base + j] = tval[j]
                wa[base + j] = twa[j]
                wb[base + j] = twb[j]
        top = _push(stack, top, lo, base, base + nh)
    return s


@numba.njit(cache=True, nogil=True)
def kappa_int(pi, mode, k):
    return kappa_int_ws(pi, mode, k, int_workspace(pi.shape[0]))


@numba.njit(cache=True, nogil=True)
def kappa_real(pi, mode, u):
    return kappa_real_ws(pi, mode, u, real_workspace(pi.shape[0]))


@numba.njit(cache=True, nogil=True)
def _relative(a, b, out):
    # out = b a^{-1}, all 0-based
    n = a.shape[0]
    for i in range(n):
        out[a[i]] = b[i]


@numba.njit(cache=True, nogil=True)
def gram_rows_int(P, Q, row_lo, row_hi, symmetric, mode, k, out):
    """Fill ``out[r, c]`` with the kernel between ``P[r]`` and ``Q[c]``.

    With ``symmetric`` set only ``c >= r`` is computed; the caller mirrors.
    """
    n = P.shape[1]
    pi = np.empty(n, dtype=np.int64)
    ws = int_workspace(n)
    for r in range(row_lo, row_hi):
        c0 = r if symmetric else 0
        for c in range(c0, Q.shape[0]):
            _relative(P[r], Q[c], pi)
            out[r, c] = kappa_int_ws(pi, mode, k, ws)


@numba.njit(cache=True, nogil=True)
def gram_rows_real(P, Q, row_lo, row_hi, symmetric, mode, u, out):
    n = P.shape[1]
    pi = np.empty(n, dtype=np.int64)
    ws = real_workspace(n)
    for r in range(row_lo, row_hi):
        c0 = r if symmetric else 0
        for c in range(c0, Q.shape[0]):
            _relative(P[r], Q[c], pi)
            out[r, c] = kappa_real_ws(pi, mode, u, ws)
