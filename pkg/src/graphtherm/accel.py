"""Compute kernels with a numba fast path and a pure numpy/Python fallback.

The hot loops of the package are exponential-size enumerations (closed
non-backtracking walks, Birkhoff-weighted periodic-point sums) and the Perron
power iteration.  Each kernel exists in two variants with identical iteration
order, so both backends produce the same enumeration order and (for the DFS
kernels) bit-identical floats.

Backend selection: numba is used when importable unless the environment
variable ``GRAPHTHERM_DISABLE_NUMBA`` is set to a truthy value, in which case
the pure fallback runs.  The flag only selects the implementation; it is not
experiment configuration.  ``benchmarks/bench_backends.py`` compares the two.
"""

import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "backend",
    "enumerate_cycles",
    "periodic_weight_sum",
    "power_iteration",
    "implementations",
]

_disable_flag = os.environ.get("GRAPHTHERM_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _disable_flag not in ("", "0", "false", "no")

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and not _DISABLED


def backend() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if NUMBA_ENABLED else "numpy"


# ---------------------------------------------------------------------------
# Kernel bodies.  Written once with plain loops; compiled with numba for the
# fast path and executed as-is (over numpy arrays) for the fallback, except
# for the power iteration whose fallback uses vectorised numpy matvecs.
# ---------------------------------------------------------------------------


def _enumerate_cycles_body(adj, succ_flat, succ_ptr, max_period, cap_flat):
    # Emits every cyclic word (lexicographically minimal rotation, by symbol
    # index) of period <= max_period, ordered by (period, word).  A word is
    # found as a closed admissible walk x with x_0 = min(x); rotations that
    # would repeat an already-minimal word are filtered in place.
    k = adj.shape[0]
    buf = np.empty(1024, dtype=np.int64)
    size = 0
    offs = np.empty(1024, dtype=np.int64)
    noffs = 1
    offs[0] = 0
    truncated = False
    cap = max_period if max_period > 0 else 1
    path = np.empty(cap, dtype=np.int64)
    iters = np.empty(cap + 1, dtype=np.int64)

    for p in range(1, max_period + 1):
        if truncated:
            break
        for s in range(k):
            if truncated:
                break
            if p == 1:
                if adj[s, s] == 1:
                    if size + 1 > cap_flat:
                        truncated = True
                        break
                    if size + 1 > buf.shape[0]:
                        nb = np.empty(buf.shape[0] * 2 + 1, dtype=np.int64)
                        nb[:size] = buf[:size]
                        buf = nb
                    buf[size] = s
                    size += 1
                    if noffs + 1 > offs.shape[0]:
                        no = np.empty(offs.shape[0] * 2, dtype=np.int64)
                        no[:noffs] = offs[:noffs]
                        offs = no
                    offs[noffs] = size
                    noffs += 1
                continue
            path[0] = s
            d = 1
            iters[1] = succ_ptr[s]
            while d >= 1:
                if truncated:
                    break
                nxt = -1
                prev = path[d - 1]
                end = succ_ptr[prev + 1]
                it = iters[d]
                while it < end:
                    c = succ_flat[it]
                    it += 1
                    if c >= s:
                        nxt = c
                        break
                iters[d] = it
                if nxt < 0:
                    d -= 1
                    continue
                path[d] = nxt
                if d < p - 1:
                    d += 1
                    iters[d] = succ_ptr[nxt]
                    continue
                if adj[nxt, s] != 1:
                    continue
                # keep only the minimal rotation representative
                minimal = True
                r = 1
                while r < p and minimal:
                    cmp = 0
                    for j in range(p):
                        a = path[(r + j) % p]
                        b = path[j]
                        if a < b:
                            cmp = -1
                            break
                        if a > b:
                            cmp = 1
                            break
                    if cmp == -1:
                        minimal = False
                    r += 1
                if not minimal:
                    continue
                if size + p > cap_flat:
                    truncated = True
                    break
                if size + p > buf.shape[0]:
                    nb = np.empty(buf.shape[0] * 2 + p, dtype=np.int64)
                    nb[:size] = buf[:size]
                    buf = nb
                for j in range(p):
                    buf[size + j] = path[j]
                size += p
                if noffs + 1 > offs.shape[0]:
                    no = np.empty(offs.shape[0] * 2, dtype=np.int64)
                    no[:noffs] = offs[:noffs]
                    offs = no
                offs[noffs] = size
                noffs += 1
    return buf[:size].copy(), offs[:noffs].copy(), truncated


def _periodic_sum_body(adj, succ_flat, succ_ptr, logw, n, shift):
    # Accumulates sum(exp(S_n - shift)) over all closed admissible walks of
    # length exactly n (with basepoint), where S_n is the cyclic sum of the
    # per-transition log-weights.  Returns the accumulator and the walk count.
    k = adj.shape[0]
    acc = 0.0
    count = 0
    if n == 1:
        for s in range(k):
            if adj[s, s] == 1:
                acc += np.exp(logw[s, s] - shift)
                count += 1
        return acc, count
    path = np.empty(n, dtype=np.int64)
    iters = np.empty(n + 1, dtype=np.int64)
    psum = np.empty(n, dtype=np.float64)
    for s in range(k):
        path[0] = s
        psum[0] = 0.0
        d = 1
        iters[1] = succ_ptr[s]
        while d >= 1:
            nxt = -1
            prev = path[d - 1]
            end = succ_ptr[prev + 1]
            it = iters[d]
            if it < end:
                nxt = succ_flat[it]
                iters[d] = it + 1
            if nxt < 0:
                d -= 1
                continue
            path[d] = nxt
            psum[d] = psum[d - 1] + logw[prev, nxt]
            if d < n - 1:
                d += 1
                iters[d] = succ_ptr[nxt]
                continue
            if adj[nxt, s] == 1:
                acc += np.exp(psum[d] + logw[nxt, s] - shift)
                count += 1
    return acc, count


def _power_iteration_body(mat, tol, max_iter):
    # Two-sided power iteration on mat + shift*I; the shift suppresses the
    # oscillation of periodic nonnegative matrices, the Rayleigh quotient is
    # evaluated on mat itself.
    k = mat.shape[0]
    shift = 0.0
    for i in range(k):
        rs = 0.0
        for j in range(k):
            rs += mat[i, j]
        if rs > shift:
            shift = rs
    r = np.full(k, 1.0 / k)
    lv = np.full(k, 1.0 / k)
    rho = 0.0
    converged = False
    it = 0
    while it < max_iter:
        rn = np.empty(k)
        ln = np.empty(k)
        for i in range(k):
            acc = shift * r[i]
            for j in range(k):
                acc += mat[i, j] * r[j]
            rn[i] = acc
        for j in range(k):
            acc = shift * lv[j]
            for i in range(k):
                acc += mat[i, j] * lv[i]
            ln[j] = acc
        sr = 0.0
        sl = 0.0
        for i in range(k):
            sr += rn[i]
            sl += ln[i]
        for i in range(k):
            rn[i] /= sr
            ln[i] /= sl
        num = 0.0
        den = 0.0
        for i in range(k):
            acc = 0.0
            for j in range(k):
                acc += mat[i, j] * rn[j]
            num += ln[i] * acc
            den += ln[i] * rn[i]
        rho_new = num / den
        if it > 0 and abs(rho_new - rho) <= tol * max(1.0, abs(rho_new)):
            rho = rho_new
            r = rn
            lv = ln
            converged = True
            break
        rho = rho_new
        r = rn
        lv = ln
        it += 1
    return rho, r, lv, converged


def _power_iteration_numpy(mat, tol, max_iter):
    k = mat.shape[0]
    shift = float(mat.sum(axis=1).max())
    r = np.full(k, 1.0 / k)
    lv = np.full(k, 1.0 / k)
    rho = 0.0
    converged = False
    matT = mat.T.copy()
    for it in range(max_iter):
        rn = mat @ r + shift * r
        rn /= rn.sum()
        ln = matT @ lv + shift * lv
        ln /= ln.sum()
        rho_new = float(ln @ (mat @ rn)) / float(ln @ rn)
        if it > 0 and abs(rho_new - rho) <= tol * max(1.0, abs(rho_new)):
            rho, r, lv = rho_new, rn, ln
            converged = True
            break
        rho, r, lv = rho_new, rn, ln
    return rho, r, lv, converged


if NUMBA_ENABLED:
    _enumerate_cycles_nb = njit(cache=True)(_enumerate_cycles_body)
    _periodic_sum_nb = njit(cache=True)(_periodic_sum_body)
    _power_iteration_nb = njit(cache=True)(_power_iteration_body)


def _succ_arrays(adj):
    """CSR-style successor arrays for a 0/1 adjacency matrix."""
    k = adj.shape[0]
    ptr = np.zeros(k + 1, dtype=np.int64)
    rows = []
    for i in range(k):
        nbrs = np.nonzero(adj[i])[0].astype(np.int64)
        rows.append(nbrs)
        ptr[i + 1] = ptr[i] + nbrs.shape[0]
    flat = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    return flat, ptr


def enumerate_cycles(adj, max_period, cap_flat):
    """All cyclic words of period <= max_period as (flat, offsets, truncated)."""
    adj = np.ascontiguousarray(adj, dtype=np.uint8)
    flat, ptr = _succ_arrays(adj)
    fn = _enumerate_cycles_nb if NUMBA_ENABLED else _enumerate_cycles_body
    return fn(adj, flat, ptr, int(max_period), int(cap_flat))


def periodic_weight_sum(adj, logw, n, shift):
    """(sum of exp(cyclic Birkhoff sum - shift), walk count) over period-n walks."""
    adj = np.ascontiguousarray(adj, dtype=np.uint8)
    logw = np.ascontiguousarray(logw, dtype=np.float64)
    flat, ptr = _succ_arrays(adj)
    fn = _periodic_sum_nb if NUMBA_ENABLED else _periodic_sum_body
    return fn(adj, flat, ptr, logw, int(n), float(shift))


def power_iteration(mat, tol=1e-14, max_iter=100_000):
    """Perron data of a nonnegative matrix: (rho, right, left, converged)."""
    mat = np.ascontiguousarray(mat, dtype=np.float64)
    if NUMBA_ENABLED:
        return _power_iteration_nb(mat, float(tol), int(max_iter))
    return _power_iteration_numpy(mat, float(tol), int(max_iter))


def implementations():
    """Both backend variants of each kernel, for benchmarking."""
    impls = {
        "numpy": {
            "enumerate_cycles": _enumerate_cycles_body,
            "periodic_weight_sum": _periodic_sum_body,
            "power_iteration": _power_iteration_numpy,
        }
    }
    if NUMBA_ENABLED:
        impls["numba"] = {
            "enumerate_cycles": _enumerate_cycles_nb,
            "periodic_weight_sum": _periodic_sum_nb,
            "power_iteration": _power_iteration_nb,
        }
    return impls
