"""Pure-numpy fallback kernels, signature-compatible with ``_kernels_numba``.

Selected when numba is unavailable or BUNDLE_CENSUS_BACKEND=numpy.  Same
algorithms and deflation decisions as the JIT versions; inner products use
vectorized numpy, so results agree with the JIT path to rounding (and the
census/Schur decisions agree exactly in practice -- see the benchmark).
"""

import math

import numpy as np

EPS = 2.220446049250313e-16

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SEED_SALT = np.uint64(0x243F6A8885A308D3)
_STREAM_SALT = np.uint64(0x452821E638D01377)
_MASK = 0xFFFFFFFFFFFFFFFF
_TWO_NEG53 = 2.0 ** -53


# ---------------------------------------------------------------------------
# counter-based RNG
# ---------------------------------------------------------------------------

def _mix64_int(z):
    # python-int version (masked 64-bit), used for the per-stream key
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _stream_key(seed, stream):
    k = _mix64_int(int(seed) ^ int(_SEED_SALT))
    return _mix64_int(k ^ _mix64_int(int(stream) ^ int(_STREAM_SALT)))


def _mix64_arr(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _raw_block(key, start, count):
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return _mix64_arr(np.uint64(key) + idx * _GOLDEN)


def raw_fill(out, seed, stream):
    key = _stream_key(seed, stream)
    out[:] = _raw_block(key, 0, out.shape[0])


def uniform_fill(out, seed, stream):
    key = _stream_key(seed, stream)
    out[:] = (_raw_block(key, 0, out.shape[0]) >> np.uint64(11)) * _TWO_NEG53


def normal_fill(out, seed, stream):
    """Standard normals by the polar transform, batched.

    Pairs of uniforms are consumed in counter order and accepted pairs emit
    their two normals in order, so the output sequence matches the scalar
    JIT kernel draw-for-draw.
    """
    key = _stream_key(seed, stream)
    n = out.shape[0]
    filled = 0
    idx = 0
    while filled < n:
        pairs = max(32, (n - filled) // 2 + 16)
        r = _raw_block(key, idx, 2 * pairs)
        idx += 2 * pairs
        u = 2.0 * ((r[0::2] >> np.uint64(11)) * _TWO_NEG53) - 1.0
        v = 2.0 * ((r[1::2] >> np.uint64(11)) * _TWO_NEG53) - 1.0
        s = u * u + v * v
        ok = (s < 1.0) & (s > 0.0)
        u = u[ok]
        v = v[ok]
        s = s[ok]
        f = np.sqrt(-2.0 * np.log(s) / s)
        z = np.empty(2 * u.shape[0])
        z[0::2] = u * f
        z[1::2] = v * f
        take = min(n - filled, z.shape[0])
        out[filled:filled + take] = z[:take]
        filled += take


# ---------------------------------------------------------------------------
# dense linear algebra
# ---------------------------------------------------------------------------

def matmul(a, b):
    # accumulate rank-1 terms in k order: bitwise identical to the triple loop
    m, kk = a.shape
    n = b.shape[1]
    c = np.zeros((m, n))
    for k in range(kk):
        c += np.outer(a[:, k], b[k, :])
    return c


def jacobi_singular_values(a, max_sweeps, rel_tol):
    m, n = a.shape
    u = a.copy() if m >= n else a.T.copy()
    m, n = u.shape
    status = 1
    for _ in range(max_sweeps):
        changed = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                up = u[:, p]
                uq = u[:, q]
                app = up @ up
                aqq = uq @ uq
                apq = up @ uq
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
                new_p = cs * up - sn * uq
                new_q = sn * up + cs * uq
                u[:, p] = new_p
                u[:, q] = new_q
        if not changed:
            status = 0
            break
    sv = np.sqrt(np.sum(u * u, axis=0))
    sv[::-1].sort()
    return sv, status


# ---------------------------------------------------------------------------
# real Schur engine
# ---------------------------------------------------------------------------

def hessenberg_inplace(h, q, want_q):
    n = h.shape[0]
    if want_q:
        q[:, :] = np.eye(n)
    for k in range(n - 2):
        tail = float(h[k + 2:, k] @ h[k + 2:, k])
        if tail == 0.0:
            continue
        x0 = h[k + 1, k]
        sigma = math.sqrt(x0 * x0 + tail)
        alpha = -sigma if x0 >= 0.0 else sigma
        v = np.empty(n - k - 1)
        v[0] = x0 - alpha
        v[1:] = h[k + 2:, k]
        tau = 2.0 / (v[0] * v[0] + tail)
        w = tau * (v @ h[k + 1:, k + 1:])
        h[k + 1:, k + 1:] -= np.outer(v, w)
        w = tau * (h[:, k + 1:] @ v)
        h[:, k + 1:] -= np.outer(w, v)
        if want_q:
            w = tau * (q[:, k + 1:] @ v)
            q[:, k + 1:] -= np.outer(w, v)
        h[k + 1, k] = alpha
        h[k + 2:, k] = 0.0


def _resolve_2x2(h, q, k, i1, i2, want_q):
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
    top = cs * h[k, k:i2 + 1] + sn * h[k + 1, k:i2 + 1]
    h[k + 1, k:i2 + 1] = -sn * h[k, k:i2 + 1] + cs * h[k + 1, k:i2 + 1]
    h[k, k:i2 + 1] = top
    left = cs * h[i1:k + 2, k] + sn * h[i1:k + 2, k + 1]
    h[i1:k + 2, k + 1] = -sn * h[i1:k + 2, k] + cs * h[i1:k + 2, k + 1]
    h[i1:k + 2, k] = left
    if want_q:
        col = cs * q[:, k] + sn * q[:, k + 1]
        q[:, k + 1] = -sn * q[:, k] + cs * q[:, k + 1]
        q[:, k] = col
    h[k + 1, k] = 0.0


def _apply_left3(h, k, c0, c1, v0, v1, v2, tau):
    t0 = tau * (v0 * h[k, c0:c1] + v1 * h[k + 1, c0:c1] + v2 * h[k + 2, c0:c1])
    h[k, c0:c1] -= t0 * v0
    h[k + 1, c0:c1] -= t0 * v1
    h[k + 2, c0:c1] -= t0 * v2


def _apply_right3(h, k, r0, r1, v0, v1, v2, tau):
    t0 = tau * (v0 * h[r0:r1, k] + v1 * h[r0:r1, k + 1] + v2 * h[r0:r1, k + 2])
    h[r0:r1, k] -= t0 * v0
    h[r0:r1, k + 1] -= t0 * v1
    h[r0:r1, k + 2] -= t0 * v2


def _francis_sweep(h, q, lo, hi, s_sum, s_prod, i1, i2, want_q):
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
        _apply_left3(h, k, c0, i2 + 1, v0, v1, v2, tau)
        rhi = min(k + 3, hi)
        _apply_right3(h, k, i1, rhi + 1, v0, v1, v2, tau)
        if want_q:
            _apply_right3(q, k, 0, n, v0, v1, v2, tau)
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
    t0 = tau * (v0 * h[hi - 1, hi - 2:i2 + 1] + v1 * h[hi, hi - 2:i2 + 1])
    h[hi - 1, hi - 2:i2 + 1] -= t0 * v0
    h[hi, hi - 2:i2 + 1] -= t0 * v1
    t0 = tau * (v0 * h[i1:hi + 1, hi - 1] + v1 * h[i1:hi + 1, hi])
    h[i1:hi + 1, hi - 1] -= t0 * v0
    h[i1:hi + 1, hi] -= t0 * v1
    if want_q:
        t0 = tau * (v0 * q[:, hi - 1] + v1 * q[:, hi])
        q[:, hi - 1] -= t0 * v0
        q[:, hi] -= t0 * v1
    h[hi, hi - 2] = 0.0


def francis_inplace(h, q, want_t, want_q, max_sweeps):
    n = h.shape[0]
    if n <= 1:
        return 0, 0, 0
    anorm = math.sqrt(float(np.sum(h * h)))
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


def eigenvalues_from_t(t, re, im):
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

def _draw(n, seed, trial, shift_even):
    flat = np.empty(n * n)
    normal_fill(flat, seed, trial)
    a = flat.reshape((n, n))
    if shift_even:
        a[np.diag_indices(n)] += 2.0 * np.arange(1, n + 1)
    return a


def census_schur_range(n, seed, t0, t1, shift_even, max_sweeps):
    hist = np.zeros(n + 1, dtype=np.int64)
    failures = 0
    qd = np.empty((0, 0))
    for trial in range(t0, t1):
        h = _draw(n, seed, trial, shift_even)
        hessenberg_inplace(h, qd, False)
        status, _, _ = francis_inplace(h, qd, False, False, max_sweeps)
        if status != 0:
            failures += 1
            continue
        hist[count_1x1_blocks(h)] += 1
    return hist, failures


def _ratio_count(re, im, cond):
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


def census_ratio_range(n, seed, t0, t1, shift_even, max_sweeps, svd_sweeps):
    hist = np.zeros(n + 1, dtype=np.int64)
    failures = 0
    re = np.empty(n)
    im = np.empty(n)
    qd = np.empty((0, 0))
    for trial in range(t0, t1):
        h = _draw(n, seed, trial, shift_even)
        a0 = h.copy()
        hessenberg_inplace(h, qd, False)
        status, _, _ = francis_inplace(h, qd, False, False, max_sweeps)
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


def _min_eigengap(re, im):
    n = re.shape[0]
    g = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            d = math.hypot(re[i] - re[j], im[i] - im[j])
            if d < g:
                g = d
    return g


def census_compare_range(n, seed, t0, t1, max_sweeps, svd_sweeps, log_cap):
    hist_s = np.zeros(n + 1, dtype=np.int64)
    hist_r = np.zeros(n + 1, dtype=np.int64)
    log_trial = np.empty(log_cap, dtype=np.int64)
    log_s = np.empty(log_cap, dtype=np.int64)
    log_r = np.empty(log_cap, dtype=np.int64)
    log_gap = np.empty(log_cap)
    failures = 0
    disagree = 0
    logged = 0
    re = np.empty(n)
    im = np.empty(n)
    qd = np.empty((0, 0))
    for trial in range(t0, t1):
        h = _draw(n, seed, trial, False)
        a0 = h.copy()
        hessenberg_inplace(h, qd, False)
        status, _, _ = francis_inplace(h, qd, False, False, max_sweeps)
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
