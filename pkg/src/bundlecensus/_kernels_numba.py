"""Numba-JIT kernels: the hot inner loops of the package.

Every function here has a pure-numpy twin with the same signature in
``_kernels_numpy``; ``bundlecensus.backend`` picks one of the two at import
time (env var BUNDLE_CENSUS_BACKEND).  Keep the two modules in sync.

All kernels operate on plain float64 C-contiguous arrays and return status
codes instead of raising, so they stay nopython-compilable.
"""

import math

import numpy as np
from numba import njit

EPS = 2.220446049250313e-16

# splitmix64-style counter generator constants
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SEED_SALT = np.uint64(0x243F6A8885A308D3)
_STREAM_SALT = np.uint64(0x452821E638D01377)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO_NEG53 = 2.0 ** -53


# ---------------------------------------------------------------------------
# counter-based RNG (keyed splitmix64 output function)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def _stream_key(seed, stream):
    k = _mix64(seed ^ _SEED_SALT)
    return _mix64(k ^ _mix64(stream ^ _STREAM_SALT))


@njit(cache=True)
def _raw64(key, index):
    # output is a pure function of (key, index): a counter-based draw
    return _mix64(key + (index + _ONE) * _GOLDEN)


@njit(cache=True)
def raw_fill(out, seed, stream):
    key = _stream_key(seed, stream)
    for i in range(out.shape[0]):
        out[i] = _raw64(key, np.uint64(i))


@njit(cache=True)
def uniform_fill(out, seed, stream):
    key = _stream_key(seed, stream)
    for i in range(out.shape[0]):
        out[i] = (_raw64(key, np.uint64(i)) >> _S11) * _TWO_NEG53


@njit(cache=True)
def normal_fill(out, seed, stream):
    """Fill ``out`` with standard normals (Marsaglia polar transform).

    The draw sequence is fully determined by (seed, stream, position):
    uniforms come from the counter-based generator in index order and each
    accepted pair yields two normals.
    """
    key = _stream_key(seed, stream)
    n = out.shape[0]
    idx = np.uint64(0)
    i = 0
    while i < n:
        u = 2.0 * ((_raw64(key, idx) >> _S11) * _TWO_NEG53) - 1.0
        idx += _ONE
        v = 2.0 * ((_raw64(key, idx) >> _S11) * _TWO_NEG53) - 1.0
        idx += _ONE
        s = u * u + v * v
        if s >= 1.0 or s == 0.0:
            continue
        f = math.sqrt(-2.0 * math.log(s) / s)
        out[i] = u * f
        i += 1
        if i < n:
            out[i] = v * f
            i += 1


# ---------------------------------------------------------------------------
# dense linear algebra
# ---------------------------------------------------------------------------

@njit(cache=True)
def matmul(a, b):
    # plain triple loop, k innermost: accumulation order is part of the
    # contract (bitwise-reproducible, matches the naive oracle exactly)
    m = a.shape[0]
    kk = a.shape[1]
    n = b.shape[1]
    c = np.empty((m, n))
    for i in range(m):
        for j in range(n):
            s = 0.0
            for k in range(kk):
                s += a[i, k] * b[k, j]
            c[i, j] = s
    return c


@njit(cache=True)
def jacobi_singular_values(a, max_sweeps, rel_tol):
    """Singular values by one-sided Jacobi (pairwise column orthogonalization).

    Returns (values sorted descending, status); status 0 means the sweep
    converged (all column pairs orthogonal to rel_tol), 1 means the sweep cap
    was hit and the values are the current (partial-accuracy) estimates.
    """
    m = a.shape[0]
    n = a.shape[1]
    if m >= n:
        u = a.copy()
    else:
        u = a.T.copy()
        m, n = n, m
    status = 1
    for _ in range(max_sweeps):
        changed = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = 0.0
                aqq = 0.0
                apq = 0.0
                for i in range(m):
                    up = u[i, p]
                    uq = u[i, q]
                    app += up * up
                    aqq += uq * uq
                    apq += up * uq
                if apq == 0.0 or app == 0.0 or aqq == 0.0:
                    continue
                if abs(apq) <= rel_tol * math.sqrt(app * aqq):
                    continue
                changed = True
                zeta = (aqq - app) / (2.0 * apq)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + math.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + math.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                for i in range(m):
                    up = u[i, p]
                    uq = u[i, q]
                    u[i, p] = cs * up - sn * uq
                    u[i, q] = sn * up + cs * uq
        if not changed:
            status = 0
            break
    sv = np.empty(n)
    for j in range(n):
        s = 0.0
        for i in range(m):
            s += u[i, j] * u[i, j]
        sv[j] = math.sqrt(s)
    sv[::-1].sort()
    return sv, status


# ---------------------------------------------------------------------------
# real Schur engine: Hessenberg reduction + Francis double-shift QR
# ---------------------------------------------------------------------------

@njit(cache=True)
def hessenberg_inplace(h, q, want_q):
    """Reduce h to upper Hessenberg form in place by Householder reflectors.

    Entries below the first subdiagonal are set to exact zeros.  When want_q,
    q is overwritten with the accumulated orthogonal factor (h_in = q h q^T).
    """
    n = h.shape[0]
    if want_q:
        for i in range(n):
            for j in range(n):
                q[i, j] = 1.0 if i == j else 0.0
    v = np.empty(n)
    for k in range(n - 2):
        tail = 0.0
        for i in range(k + 2, n):
            tail += h[i, k] * h[i, k]
        if tail == 0.0:
            continue
        x0 = h[k + 1, k]
        sigma = math.sqrt(x0 * x0 + tail)
        alpha = -sigma if x0 >= 0.0 else sigma
        v[k + 1] = x0 - alpha
        for i in range(k + 2, n):
            v[i] = h[i, k]
        tau = 2.0 / (v[k + 1] * v[k + 1] + tail)
        for j in range(k + 1, n):
            t0 = 0.0
            for i in range(k + 1, n):
                t0 += v[i] * h[i, j]
            t0 *= tau
            for i in range(k + 1, n):
                h[i, j] -= t0 * v[i]
        for i in range(n):
            t0 = 0.0
            for j in range(k + 1, n):
                t0 += h[i, j] * v[j]
            t0 *= tau
            for j in range(k + 1, n):
                h[i, j] -= t0 * v[j]
        if want_q:
            for i in range(n):
                t0 = 0.0
                for j in range(k + 1, n):
                    t0 += q[i, j] * v[j]
                t0 *= tau
                for j in range(k + 1, n):
                    q[i, j] -= t0 * v[j]
        h[k + 1, k] = alpha
        for i in range(k + 2, n):
            h[i, k] = 0.0


@njit(cache=True)
def _resolve_2x2(h, q, k, i1, i2, want_q):
    # Converged trailing 2x2 block at (k, k+1).  Real eigenvalues (non-negative
    # discriminant) are split into two 1x1 blocks by a similarity rotation;
    # complex pairs are left in place, so surviving 2x2 blocks always carry a
    # negative discriminant.
    n = h.shape[0]
    a = h[k, k]
    b = h[k, k + 1]
    c = h[k + 1, k]
    d = h[k + 1, k + 1]
    p = 0.5 * (a - d)
    disc = p * p + b * c
    if disc < 0.0:
        return
    r = math.sqrt(disc)
    lam = 0.5 * (a + d) + (r if p >= 0.0 else -r)
    x = lam - d
    y = c
    nrm = math.hypot(x, y)
    if nrm == 0.0:
        return
    cs = x / nrm
    sn = y / nrm
    for j in range(k, i2 + 1):
        t0 = cs * h[k, j] + sn * h[k + 1, j]
        h[k + 1, j] = -sn * h[k, j] + cs * h[k + 1, j]
        h[k, j] = t0
    for i in range(i1, k + 2):
        t0 = cs * h[i, k] + sn * h[i, k + 1]
        h[i, k + 1] = -sn * h[i, k] + cs * h[i, k + 1]
        h[i, k] = t0
    if want_q:
        for i in range(n):
            t0 = cs * q[i, k] + sn * q[i, k + 1]
            q[i, k + 1] = -sn * q[i, k] + cs * q[i, k + 1]
            q[i, k] = t0
    h[k + 1, k] = 0.0


@njit(cache=True)
def _francis_sweep(h, q, lo, hi, s_sum, s_prod, i1, i2, want_q):
    # One implicit double-shift sweep on the unreduced window [lo, hi]
    # (window size >= 3): chase the 3x3 bulge down, then clear the final
    # 2-row remainder.
    n = h.shape[0]
    h00 = h[lo, lo]
    h10 = h[lo + 1, lo]
    x = h00 * h00 + h[lo, lo + 1] * h10 - s_sum * h00 + s_prod
    y = h10 * (h00 + h[lo + 1, lo + 1] - s_sum)
    z = h10 * h[lo + 2, lo + 1]
    for k in range(lo, hi - 1):
        if k > lo:
            x = h[k, k - 1]
            y = h[k + 1, k - 1]
            z = h[k + 2, k - 1]
        scale = abs(x) + abs(y) + abs(z)
        if scale == 0.0:
            continue
        xs = x / scale
        ys = y / scale
        zs = z / scale
        nrm = math.sqrt(xs * xs + ys * ys + zs * zs)
        alpha = -nrm if xs >= 0.0 else nrm
        v0 = xs - alpha
        v1 = ys
        v2 = zs
        vv = v0 * v0 + v1 * v1 + v2 * v2
        if vv == 0.0:
            continue
        tau = 2.0 / vv
        c0 = k - 1 if k > lo else lo
        for j in range(c0, i2 + 1):
            t0 = tau * (v0 * h[k, j] + v1 * h[k + 1, j] + v2 * h[k + 2, j])
            h[k, j] -= t0 * v0
            h[k + 1, j] -= t0 * v1
            h[k + 2, j] -= t0 * v2
        rhi = k + 3 if k + 3 < hi else hi
        for i in range(i1, rhi + 1):
            t0 = tau * (v0 * h[i, k] + v1 * h[i, k + 1] + v2 * h[i, k + 2])
            h[i, k] -= t0 * v0
            h[i, k + 1] -= t0 * v1
            h[i, k + 2] -= t0 * v2
        if want_q:
            for i in range(n):
                t0 = tau * (v0 * q[i, k] + v1 * q[i, k + 1] + v2 * q[i, k + 2])
                q[i, k] -= t0 * v0
                q[i, k + 1] -= t0 * v1
                q[i, k + 2] -= t0 * v2
        if k > lo:
            h[k + 1, k - 1] = 0.0
            h[k + 2, k - 1] = 0.0
    x = h[hi - 1, hi - 2]
    y = h[hi, hi - 2]
    scale = abs(x) + abs(y)
    if scale == 0.0:
        return
    xs = x / scale
    ys = y / scale
    nrm = math.hypot(xs, ys)
    alpha = -nrm if xs >= 0.0 else nrm
    v0 = xs - alpha
    v1 = ys
    vv = v0 * v0 + v1 * v1
    if vv == 0.0:
        return
    tau = 2.0 / vv
    for j in range(hi - 2, i2 + 1):
        t0 = tau * (v0 * h[hi - 1, j] + v1 * h[hi, j])
        h[hi - 1, j] -= t0 * v0
        h[hi, j] -= t0 * v1
    for i in range(i1, hi + 1):
        t0 = tau * (v0 * h[i, hi - 1] + v1 * h[i, hi])
        h[i, hi - 1] -= t0 * v0
        h[i, hi] -= t0 * v1
    if want_q:
        for i in range(n):
            t0 = tau * (v0 * q[i, hi - 1] + v1 * q[i, hi])
            q[i, hi - 1] -= t0 * v0
            q[i, hi] -= t0 * v1
    h[hi, hi - 2] = 0.0


@njit(cache=True)
def francis_inplace(h, q, want_t, want_q, max_sweeps):
    """Francis double-shift QR on an upper Hessenberg h, in place.

    Deflated subdiagonal entries are set to exact zero; converged 2x2 blocks
    with real eigenvalues are split, so remaining 2x2 blocks are genuine
    conjugate pairs.  When want_t is false only the active window is updated
    (diagonal blocks stay valid, off-window entries do not).

    Returns (status, lo, hi): status 0 on success, 1 when the window [lo, hi]
    made no deflation progress within max_sweeps * n iterations (ad-hoc
    exceptional shifts are tried at 10 and 20 stalled iterations first).
    """
    n = h.shape[0]
    if n <= 1:
        return 0, 0, 0
    anorm = 0.0
    for i in range(n):
        for j in range(n):
            anorm += h[i, j] * h[i, j]
    anorm = math.sqrt(anorm)
    hi = n - 1
    stall = 0
    prev_lo = -1
    prev_hi = -1
    cap = max_sweeps * n
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = anorm
            if abs(h[lo, lo - 1]) <= EPS * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            continue
        i1 = 0 if want_t else lo
        i2 = n - 1 if want_t else hi
        if lo == hi - 1:
            _resolve_2x2(h, q, lo, i1, i2, want_q)
            hi = lo - 1
            continue
        if lo != prev_lo or hi != prev_hi:
            stall = 0
            prev_lo = lo
            prev_hi = hi
        stall += 1
        if stall > cap:
            return 1, lo, hi
        r = stall % 30
        if r == 10 or r == 20:
            sd = abs(h[hi, hi - 1]) + abs(h[hi - 1, hi - 2])
            s_sum = 1.5 * sd
            s_prod = -0.4375 * sd * sd
        else:
            s_sum = h[hi - 1, hi - 1] + h[hi, hi]
            s_prod = h[hi - 1, hi - 1] * h[hi, hi] - h[hi - 1, hi] * h[hi, hi - 1]
        _francis_sweep(h, q, lo, hi, s_sum, s_prod, i1, i2, want_q)
    return 0, 0, 0


@njit(cache=True)
def eigenvalues_from_t(t, re, im):
    # read eigenvalues off the quasi-triangular diagonal, by position,
    # +imaginary member of each pair first
    n = t.shape[0]
    i = 0
    while i < n:
        if i < n - 1 and t[i + 1, i] != 0.0:
            a = t[i, i]
            d = t[i + 1, i + 1]
            p = 0.5 * (a - d)
            disc = p * p + t[i, i + 1] * t[i + 1, i]
            w = math.sqrt(-disc) if disc < 0.0 else 0.0
            re[i] = 0.5 * (a + d)
            im[i] = w
            re[i + 1] = re[i]
            im[i + 1] = -w
            i += 2
        else:
            re[i] = t[i, i]
            im[i] = 0.0
            i += 1


@njit(cache=True)
def count_1x1_blocks(t):
    n = t.shape[0]
    k = 0
    i = 0
    while i < n:
        if i < n - 1 and t[i + 1, i] != 0.0:
            i += 2
        else:
            k += 1
            i += 1
    return k


# ---------------------------------------------------------------------------
# Monte Carlo census loops
# ---------------------------------------------------------------------------

@njit(cache=True)
def census_schur_range(n, seed, t0, t1, shift_even, max_sweeps):
    """Count real eigenvalues (1x1 Schur blocks) for trials [t0, t1).

    Trial ``t`` draws its matrix from RNG stream ``t``, so any partition of
    the trial range yields the same totals.  Returns (histogram over k,
    number of Schur non-convergences).
    """
    hist = np.zeros(n + 1, dtype=np.int64)
    failures = 0
    flat = np.empty(n * n)
    h = flat.reshape((n, n))
    qd = np.empty((0, 0))
    for trial in range(t0, t1):
        normal_fill(flat, seed, np.uint64(trial))
        if shift_even:
            for i in range(n):
                h[i, i] += 2.0 * (i + 1)
        hessenberg_inplace(h, qd, False)
        status, flo, fhi = francis_inplace(h, qd, False, False, max_sweeps)
        if status != 0:
            failures += 1
            continue
        hist[count_1x1_blocks(h)] += 1
    return hist, failures


@njit(cache=True)
def _ratio_count(re, im, cond):
    # the eigenvalue-over-modulus tolerance rule: e/|e| within eps*cond of +-1
    n = re.shape[0]
    tol = EPS * cond
    k = 0
    for j in range(n):
        rho = math.hypot(re[j], im[j])
        if rho == 0.0:
            return -1
        xr = re[j] / rho
        xi = im[j] / rho
        if math.hypot(xr - 1.0, xi) <= tol or math.hypot(xr + 1.0, xi) <= tol:
            k += 1
    return k


@njit(cache=True)
def census_ratio_range(n, seed, t0, t1, shift_even, max_sweeps, svd_sweeps):
    """Like census_schur_range but with the ratio-tolerance counting rule.

    Trials with a singular sample, a zero eigenvalue, or a non-converged
    factorization are recorded as failures.
    """
    hist = np.zeros(n + 1, dtype=np.int64)
    failures = 0
    flat = np.empty(n * n)
    h = flat.reshape((n, n))
    a0 = np.empty((n, n))
    re = np.empty(n)
    im = np.empty(n)
    qd = np.empty((0, 0))
    for trial in range(t0, t1):
        normal_fill(flat, seed, np.uint64(trial))
        if shift_even:
            for i in range(n):
                h[i, i] += 2.0 * (i + 1)
        for i in range(n):
            for j in range(n):
                a0[i, j] = h[i, j]
        hessenberg_inplace(h, qd, False)
        status, flo, fhi = francis_inplace(h, qd, False, False, max_sweeps)
        if status != 0:
            failures += 1
            continue
        eigenvalues_from_t(h, re, im)
        sv, st = jacobi_singular_values(a0, svd_sweeps, 1e-12)
        if st != 0 or sv[n - 1] == 0.0:
            failures += 1
            continue
        k = _ratio_count(re, im, sv[0] / sv[n - 1])
        if k < 0:
            failures += 1
            continue
        hist[k] += 1
    return hist, failures


@njit(cache=True)
def _min_eigengap(re, im):
    n = re.shape[0]
    g = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            d = math.hypot(re[i] - re[j], im[i] - im[j])
            if d < g:
                g = d
    return g


@njit(cache=True)
def census_compare_range(n, seed, t0, t1, max_sweeps, svd_sweeps, log_cap):
    """Run both counting rules per trial and log every disagreement.

    Returns (hist_schur, hist_ratio, failures, disagree_count,
    log_trial, log_schur, log_ratio, log_gap, logged).
    """
    hist_s = np.zeros(n + 1, dtype=np.int64)
    hist_r = np.zeros(n + 1, dtype=np.int64)
    log_trial = np.empty(log_cap, dtype=np.int64)
    log_s = np.empty(log_cap, dtype=np.int64)
    log_r = np.empty(log_cap, dtype=np.int64)
    log_gap = np.empty(log_cap)
    failures = 0
    disagree = 0
    logged = 0
    flat = np.empty(n * n)
    h = flat.reshape((n, n))
    a0 = np.empty((n, n))
    re = np.empty(n)
    im = np.empty(n)
    qd = np.empty((0, 0))
    for trial in range(t0, t1):
        normal_fill(flat, seed, np.uint64(trial))
        for i in range(n):
            for j in range(n):
                a0[i, j] = h[i, j]
        hessenberg_inplace(h, qd, False)
        status, flo, fhi = francis_inplace(h, qd, False, False, max_sweeps)
        if status != 0:
            failures += 1
            continue
        ks = count_1x1_blocks(h)
        eigenvalues_from_t(h, re, im)
        sv, st = jacobi_singular_values(a0, svd_sweeps, 1e-12)
        if st != 0 or sv[n - 1] == 0.0:
            failures += 1
            continue
        kr = _ratio_count(re, im, sv[0] / sv[n - 1])
        if kr < 0:
            failures += 1
            continue
        hist_s[ks] += 1
        hist_r[kr] += 1
        if ks != kr:
            disagree += 1
            if logged < log_cap:
                log_trial[logged] = trial
                log_s[logged] = ks
                log_r[logged] = kr
                log_gap[logged] = _min_eigengap(re, im)
                logged += 1
    return hist_s, hist_r, failures, disagree, log_trial, log_s, log_r, log_gap, logged
