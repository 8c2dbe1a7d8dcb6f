"""Pure-Python edge-reversal kernels; fallback for ``_ckernels``.

The dynamics are carried on sink-decomposition levels: ``lev[i] == 1`` means
node ``i`` is a sink, and every conflict edge points from the higher level to
the lower one. ``occ[i]`` is the number of packets buffered between ``pred[i]``
and ``i`` (unused for first hops). Both arrays are mutated in place.

Return codes shared with the compiled kernels:
    OK, OVERFLOW (a full out-buffer was hit), NO_PERIOD, NOT_CONVERGED,
    ZERO_WINDOW.
"""

OK = 0
OVERFLOW = 1
NO_PERIOD = 2
NOT_CONVERGED = 3
ZERO_WINDOW = 4


def _step(indptr, indices, pred, succ, lev, occ, mark, stamp, B, advance, sinks):
    """One fire-and-replace step. Returns (deliveries, empty_fires, status)."""
    n = len(lev)
    sinks.clear()
    for i in range(n):
        if lev[i] == 1:
            sinks.append(i)
    delivered = 0
    empty = 0
    for i in sinks:
        p = pred[i]
        if p < 0 or occ[i] > 0:
            if p >= 0:
                occ[i] -= 1
            s = succ[i]
            if s >= 0:
                if occ[s] >= B:
                    return delivered, empty, OVERFLOW
                occ[s] += 1
            else:
                delivered += 1
        else:
            empty += 1
    for i in range(n):
        lev[i] -= 1
    for i in sinks:
        lo, hi = indptr[i], indptr[i + 1]
        if not advance:
            k = 0
            for e in range(lo, hi):
                if lev[indices[e]] > k:
                    k = lev[indices[e]]
            lev[i] = k + 1
            continue
        stamp += 1
        for e in range(lo, hi):
            mark[lev[indices[e]]] = stamp
        p = pred[i]
        s = succ[i]
        k = 1
        while True:
            if mark[k] != stamp:
                if (p < 0 or k > lev[p] or occ[i] >= 1) and (s < 0 or k > lev[s] or occ[s] <= B - 1):
                    break
            k += 1
        lev[i] = k
    return delivered, empty, OK


def step(indptr, indices, pred, succ, lev, occ, B, advance):
    """Single step on plain sequences; returns (status, sinks, deliveries, empty_fires)."""
    mark = [0] * (len(lev) + 2)
    sinks = []
    d, e, status = _step(indptr, indices, pred, succ, lev, occ, mark, 0, B, advance, sinks)
    return status, sinks, d, e


def run_period(indptr, indices, pred, succ, lev, occ, B, advance, fingerprint_buffers, max_iters):
    """Iterate until the state recurs.

    Returns ``(status, k, p, t, sinks_history, deliveries_history, empty_history)``
    where the period is steps ``k .. k+p-1`` and histories cover steps
    ``0 .. t-1``.
    """
    n = len(lev)
    lev = list(lev)
    occ = list(occ)
    indptr = list(indptr)
    indices = list(indices)
    mark = [0] * (n + 2)
    stamp = 0
    seen = {}
    hist_sinks = []
    hist_del = []
    hist_empty = []
    sinks = []
    for t in range(max_iters + 1):
        key = tuple(lev) + tuple(occ) if fingerprint_buffers else tuple(lev)
        first = seen.get(key)
        if first is not None:
            return OK, first, t - first, t, hist_sinks, hist_del, hist_empty
        seen[key] = t
        if t == max_iters:
            break
        d, e, status = _step(indptr, indices, pred, succ, lev, occ, mark, stamp, B, advance, sinks)
        stamp += n
        hist_sinks.append(tuple(sinks))
        hist_del.append(d)
        hist_empty.append(e)
        if status != OK:
            return status, -1, 0, t + 1, hist_sinks, hist_del, hist_empty
    return NO_PERIOD, -1, 0, max_iters, hist_sinks, hist_del, hist_empty


def run_estimate(indptr, indices, pred, succ, terminal, lev, occ, B, advance, w, tol, t_max, grace):
    """Cumulative terminal-sink estimator.

    ``C_t`` counts terminal sinks over steps ``0..t``; the run stops at the least
    ``t >= w`` with ``|C_t/(t+1) - C_{t-w}/(t-w+1)| <= tol * C_{t-w}/(t-w+1)``.
    Returns ``(status, C_t, t)``.
    """
    n = len(lev)
    lev = list(lev)
    occ = list(occ)
    indptr = list(indptr)
    indices = list(indices)
    mark = [0] * (n + 2)
    stamp = 0
    ring = [0] * (w + 1)
    sinks = []
    total = 0
    for t in range(t_max + 1):
        for i in range(n):
            if lev[i] == 1 and terminal[i]:
                total += 1
        ring[t % (w + 1)] = total
        if t >= w:
            prev = ring[(t - w) % (w + 1)]
            if prev > 0:
                diff = abs(total * (t - w + 1) - prev * (t + 1))
                if diff <= tol * prev * (t + 1):
                    return OK, total, t
            elif t >= w + grace:
                return ZERO_WINDOW, total, t
        if t == t_max:
            break
        _, _, status = _step(indptr, indices, pred, succ, lev, occ, mark, stamp, B, advance, sinks)
        stamp += n
        if status != OK:
            return status, total, t
    return NOT_CONVERGED, total, t_max
