"""Numba JIT kernel backend.

Twin of ``_kernels_numpy``: same signatures, same tie-breaking, same random
draw protocol, so results are interchangeable between backends.  The scans
hoist per-row-partition group sums out of the column loop, which is where the
exhaustive paths spend their time.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._rng import DERIVE_SALT, GAMMA, MIX_M1, MIX_M2

FEASIBLE_TOL = 1e-12

U64 = np.uint64
_GAMMA = U64(GAMMA)
_M1 = U64(MIX_M1)
_M2 = U64(MIX_M2)
_SALT = U64(DERIVE_SALT)
_INV_2_53 = 2.0 ** -53


@njit(cache=True)
def _u01(key, ctr):
    z = U64(key) + (U64(ctr) + U64(1)) * _GAMMA
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    z = z ^ (z >> U64(31))
    return np.float64(z >> U64(11)) * _INV_2_53


@njit(cache=True)
def residue_scan(values, row_parts, col_parts, K, H):
    n, p = values.shape
    Nr = row_parts.shape[0]
    Nc = col_parts.shape[0]
    total_sq = 0.0
    for i in range(n):
        for j in range(p):
            total_sq += values[i, j] * values[i, j]
    G = np.zeros((K, p))
    nk = np.zeros(K)
    S = np.zeros((K, H))
    mh = np.zeros(H)
    best_val = np.inf
    best_idx = -1
    for r in range(Nr):
        for k in range(K):
            nk[k] = 0.0
            for j in range(p):
                G[k, j] = 0.0
        for i in range(n):
            k = row_parts[r, i]
            nk[k] += 1.0
            for j in range(p):
                G[k, j] += values[i, j]
        for c in range(Nc):
            for k in range(K):
                for h in range(H):
                    S[k, h] = 0.0
            for h in range(H):
                mh[h] = 0.0
            for j in range(p):
                h = col_parts[c, j]
                mh[h] += 1.0
                for k in range(K):
                    S[k, h] += G[k, j]
            acc = 0.0
            for k in range(K):
                if nk[k] > 0.0:
                    for h in range(H):
                        if mh[h] > 0.0:
                            acc += S[k, h] * S[k, h] / (nk[k] * mh[h])
            val = total_sq - acc
            if val < best_val:
                best_val = val
                best_idx = r * Nc + c
    return best_idx, best_val


@njit(cache=True)
def truncation_scan(u_mat, z_mat, z_sq, sigma0, row_parts, col_parts, K, H):
    n, p = u_mat.shape
    Nr = row_parts.shape[0]
    Nc = col_parts.shape[0]
    Gu = np.zeros((K, p))
    Gz = np.zeros((K, p))
    nk = np.zeros(K)
    Su = np.zeros((K, H))
    Sz = np.zeros((K, H))
    mh = np.zeros(H)
    best = np.inf
    best_idx = -1
    for r in range(Nr):
        for k in range(K):
            nk[k] = 0.0
            for j in range(p):
                Gu[k, j] = 0.0
                Gz[k, j] = 0.0
        for i in range(n):
            k = row_parts[r, i]
            nk[k] += 1.0
            for j in range(p):
                Gu[k, j] += u_mat[i, j]
                Gz[k, j] += z_mat[i, j]
        for c in range(Nc):
            for k in range(K):
                for h in range(H):
                    Su[k, h] = 0.0
                    Sz[k, h] = 0.0
            for h in range(H):
                mh[h] = 0.0
            for j in range(p):
                h = col_parts[c, j]
                mh[h] += 1.0
                for k in range(K):
                    Su[k, h] += Gu[k, j]
                    Sz[k, h] += Gz[k, j]
            su = 0.0
            suz = 0.0
            sz = 0.0
            for k in range(K):
                if nk[k] > 0.0:
                    for h in range(H):
                        if mh[h] > 0.0:
                            cnt = nk[k] * mh[h]
                            su += Su[k, h] * Su[k, h] / cnt
                            suz += Su[k, h] * Sz[k, h] / cnt
                            sz += Sz[k, h] * Sz[k, h] / cnt
            if su > FEASIBLE_TOL:
                cg = z_sq - sz
                if cg < 0.0:
                    cg = 0.0
                root = (np.sqrt(suz * suz + su * cg) - suz) / (sigma0 * su)
                if root < best:
                    best = root
                    best_idx = r * Nc + c
    return best, best_idx, Nr * Nc


@njit(cache=True)
def _gEg(values, rl, cl, K, H, total_sq, S, nk, mh):
    n, p = values.shape
    for k in range(K):
        nk[k] = 0.0
        for h in range(H):
            S[k, h] = 0.0
    for h in range(H):
        mh[h] = 0.0
    for i in range(n):
        nk[rl[i]] += 1.0
    for j in range(p):
        mh[cl[j]] += 1.0
    for i in range(n):
        k = rl[i]
        for j in range(p):
            S[k, cl[j]] += values[i, j]
    acc = 0.0
    for k in range(K):
        if nk[k] > 0.0:
            for h in range(H):
                if mh[h] > 0.0:
                    acc += S[k, h] * S[k, h] / (nk[k] * mh[h])
    return total_sq - acc


def gEg_value(values, rl, cl, K, H, total_sq):
    values = np.ascontiguousarray(values, dtype=np.float64)
    S = np.zeros((K, H))
    nk = np.zeros(K)
    mh = np.zeros(H)
    return _gEg(values, rl.astype(np.int64), cl.astype(np.int64), K, H, total_sq, S, nk, mh)


@njit(cache=True)
def _trunc_obj(u_mat, z_mat, z_sq, sigma0, rl, cl, K, H, Su, Sz, nk, mh):
    n, p = u_mat.shape
    for k in range(K):
        nk[k] = 0.0
        for h in range(H):
            Su[k, h] = 0.0
            Sz[k, h] = 0.0
    for h in range(H):
        mh[h] = 0.0
    for i in range(n):
        nk[rl[i]] += 1.0
    for j in range(p):
        mh[cl[j]] += 1.0
    for i in range(n):
        k = rl[i]
        for j in range(p):
            h = cl[j]
            Su[k, h] += u_mat[i, j]
            Sz[k, h] += z_mat[i, j]
    su = 0.0
    suz = 0.0
    sz = 0.0
    for k in range(K):
        if nk[k] > 0.0:
            for h in range(H):
                if mh[h] > 0.0:
                    cnt = nk[k] * mh[h]
                    su += Su[k, h] * Su[k, h] / cnt
                    suz += Su[k, h] * Sz[k, h] / cnt
                    sz += Sz[k, h] * Sz[k, h] / cnt
    if su <= FEASIBLE_TOL:
        return np.inf
    cg = z_sq - sz
    if cg < 0.0:
        cg = 0.0
    return (np.sqrt(suz * suz + su * cg) - suz) / (sigma0 * su)


def trunc_objective(u_mat, z_mat, z_sq, sigma0, rl, cl, K, H):
    u_mat = np.ascontiguousarray(u_mat, dtype=np.float64)
    z_mat = np.ascontiguousarray(z_mat, dtype=np.float64)
    Su = np.zeros((K, H))
    Sz = np.zeros((K, H))
    nk = np.zeros(K)
    mh = np.zeros(H)
    return _trunc_obj(u_mat, z_mat, z_sq, sigma0, rl.astype(np.int64),
                      cl.astype(np.int64), K, H, Su, Sz, nk, mh)


@njit(cache=True)
def _temp(kind, t0, ratio, logc, t):
    if kind == 0:
        return t0 * ratio ** t
    return logc / np.log(t + 2.0)


@njit(cache=True)
def sa_residue_min(values, K, H, kind, t0, ratio, logc, eps, max_steps, key):
    n, p = values.shape
    total_sq = 0.0
    for i in range(n):
        for j in range(p):
            total_sq += values[i, j] * values[i, j]
    ctr = 0
    rl = np.empty(n, dtype=np.int64)
    cl = np.empty(p, dtype=np.int64)
    for i in range(n):
        rl[i] = np.int64(_u01(key, ctr) * K)
        ctr += 1
    for j in range(p):
        cl[j] = np.int64(_u01(key, ctr) * H)
        ctr += 1
    S = np.zeros((K, H))
    nk = np.zeros(K)
    mh = np.zeros(H)
    f = _gEg(values, rl, cl, K, H, total_sq, S, nk, mh)
    t = 0
    temp = _temp(kind, t0, ratio, logc, 0)
    while temp >= eps and (max_steps <= 0 or t < max_steps):
        m = np.int64(_u01(key, ctr) * (n + p))
        ctr += 1
        if m < n:
            side_count = K
            cur = rl[m]
        else:
            side_count = H
            cur = cl[m - n]
        if side_count > 1:
            alt = np.int64(_u01(key, ctr) * (side_count - 1))
            ctr += 1
            new = alt + 1 if alt >= cur else alt
            if m < n:
                old = rl[m]
                rl[m] = new
            else:
                old = cl[m - n]
                cl[m - n] = new
            f_new = _gEg(values, rl, cl, K, H, total_sq, S, nk, mh)
            df = f_new - f
            accept = df < 0.0
            if not accept:
                u = _u01(key, ctr)
                ctr += 1
                accept = u < np.exp(-df / temp)
            if accept:
                f = f_new
            else:
                if m < n:
                    rl[m] = old
                else:
                    cl[m - n] = old
        t += 1
        temp = _temp(kind, t0, ratio, logc, t)
    return rl, cl, t, ctr


@njit(cache=True)
def _move_size(u, npts):
    if u < 0.5 + 2.0 ** (-npts):
        return 1
    acc = 0.5 + 2.0 ** (-npts)
    for s in range(2, npts + 1):
        acc += 2.0 ** (-s)
        if u < acc:
            return s
    return npts


@njit(cache=True)
def sa_truncation(u_mat, z_mat, z_sq, sigma0, K, H, kind, t0, ratio, logc, eps,
                  max_steps, key):
    n, p = u_mat.shape
    npts = n + p
    ctr = 0
    rl = np.empty(n, dtype=np.int64)
    cl = np.empty(p, dtype=np.int64)
    for i in range(n):
        rl[i] = np.int64(_u01(key, ctr) * K)
        ctr += 1
    for j in range(p):
        cl[j] = np.int64(_u01(key, ctr) * H)
        ctr += 1
    Su = np.zeros((K, H))
    Sz = np.zeros((K, H))
    nk = np.zeros(K)
    mh = np.zeros(H)
    f = _trunc_obj(u_mat, z_mat, z_sq, sigma0, rl, cl, K, H, Su, Sz, nk, mh)
    pool = np.empty(npts, dtype=np.int64)
    new_rl = np.empty(n, dtype=np.int64)
    new_cl = np.empty(p, dtype=np.int64)
    t = 0
    temp = _temp(kind, t0, ratio, logc, 0)
    while temp >= eps and (max_steps <= 0 or t < max_steps):
        s = _move_size(_u01(key, ctr), npts)
        ctr += 1
        for i in range(npts):
            pool[i] = i
        for i in range(s):
            j = i + np.int64(_u01(key, ctr) * (npts - i))
            ctr += 1
            tmp = pool[i]
            pool[i] = pool[j]
            pool[j] = tmp
        for i in range(n):
            new_rl[i] = rl[i]
        for j in range(p):
            new_cl[j] = cl[j]
        for i in range(s):
            m = pool[i]
            if m < n:
                if K > 1:
                    alt = np.int64(_u01(key, ctr) * (K - 1))
                    ctr += 1
                    new_rl[m] = alt + 1 if alt >= rl[m] else alt
            else:
                if H > 1:
                    alt = np.int64(_u01(key, ctr) * (H - 1))
                    ctr += 1
                    new_cl[m - n] = alt + 1 if alt >= cl[m - n] else alt
        f_new = _trunc_obj(u_mat, z_mat, z_sq, sigma0, new_rl, new_cl, K, H,
                           Su, Sz, nk, mh)
        if f_new < f:
            accept = True
        elif np.isinf(f_new):
            accept = False
        else:
            u = _u01(key, ctr)
            ctr += 1
            accept = u < np.exp(-(f_new - f) / temp)
        if accept:
            for i in range(n):
                rl[i] = new_rl[i]
            for j in range(p):
                cl[j] = new_cl[j]
            f = f_new
        t += 1
        temp = _temp(kind, t0, ratio, logc, t)
    return rl, cl, t, f, ctr


@njit(cache=True)
def _means_zero_filled(centered, rl, cl, K, H, B, cnt):
    n, p = centered.shape
    for k in range(K):
        for h in range(H):
            B[k, h] = 0.0
            cnt[k, h] = 0.0
    for i in range(n):
        k = rl[i]
        for j in range(p):
            B[k, cl[j]] += centered[i, j]
            cnt[k, cl[j]] += 1.0
    for k in range(K):
        for h in range(H):
            if cnt[k, h] > 0.0:
                B[k, h] /= cnt[k, h]
            else:
                B[k, h] = 0.0


@njit(cache=True)
def _fit_loss(centered, rl, cl, B):
    n, p = centered.shape
    acc = 0.0
    for i in range(n):
        k = rl[i]
        for j in range(p):
            d = centered[i, j] - B[k, cl[j]]
            acc += d * d
    return acc


@njit(cache=True)
def tan_witten_loop(centered, init_rl, init_cl, K, H, max_passes):
    n, p = centered.shape
    rl = init_rl.copy()
    cl = init_cl.copy()
    trace = np.empty(1 + 4 * max_passes, dtype=np.float64)
    B = np.zeros((K, H))
    cnt = np.zeros((K, H))
    _means_zero_filled(centered, rl, cl, K, H, B, cnt)
    trace[0] = _fit_loss(centered, rl, cl, B)
    tlen = 1
    passes = 0
    old_rl = np.empty(n, dtype=np.int64)
    old_cl = np.empty(p, dtype=np.int64)
    for _ in range(max_passes):
        for i in range(n):
            old_rl[i] = rl[i]
        for j in range(p):
            old_cl[j] = cl[j]
        for i in range(n):
            best_k = 0
            best_cost = np.inf
            for k in range(K):
                cost = 0.0
                for j in range(p):
                    d = centered[i, j] - B[k, cl[j]]
                    cost += d * d
                if cost < best_cost:
                    best_cost = cost
                    best_k = k
            rl[i] = best_k
        trace[tlen] = _fit_loss(centered, rl, cl, B)
        tlen += 1
        _means_zero_filled(centered, rl, cl, K, H, B, cnt)
        trace[tlen] = _fit_loss(centered, rl, cl, B)
        tlen += 1
        for j in range(p):
            best_h = 0
            best_cost = np.inf
            for h in range(H):
                cost = 0.0
                for i in range(n):
                    d = centered[i, j] - B[rl[i], h]
                    cost += d * d
                if cost < best_cost:
                    best_cost = cost
                    best_h = h
            cl[j] = best_h
        trace[tlen] = _fit_loss(centered, rl, cl, B)
        tlen += 1
        _means_zero_filled(centered, rl, cl, K, H, B, cnt)
        trace[tlen] = _fit_loss(centered, rl, cl, B)
        tlen += 1
        passes += 1
        same = True
        for i in range(n):
            if rl[i] != old_rl[i]:
                same = False
                break
        if same:
            for j in range(p):
                if cl[j] != old_cl[j]:
                    same = False
                    break
        if same:
            break
    return rl, cl, passes, trace, tlen


@njit(cache=True)
def kmeans_labels(points, n_clusters, key, max_iter=50):
    m, d = points.shape
    ctr = 0
    first = np.int64(_u01(key, ctr) * m)
    ctr += 1
    centers = np.empty((n_clusters, d))
    for t in range(d):
        centers[0, t] = points[first, t]
    mindist = np.empty(m)
    for i in range(m):
        acc = 0.0
        for t in range(d):
            diff = points[i, t] - centers[0, t]
            acc += diff * diff
        mindist[i] = acc
    for c in range(1, n_clusters):
        far = 0
        far_d = mindist[0]
        for i in range(1, m):
            if mindist[i] > far_d:
                far_d = mindist[i]
                far = i
        for t in range(d):
            centers[c, t] = points[far, t]
        for i in range(m):
            acc = 0.0
            for t in range(d):
                diff = points[i, t] - centers[c, t]
                acc += diff * diff
            if acc < mindist[i]:
                mindist[i] = acc
    labels = np.zeros(m, dtype=np.int64)
    new_labels = np.empty(m, dtype=np.int64)
    own = np.empty(m)
    counts = np.empty(n_clusters)
    for _ in range(max_iter):
        for i in range(m):
            best_k = 0
            best_d = np.inf
            for k in range(n_clusters):
                acc = 0.0
                for t in range(d):
                    diff = points[i, t] - centers[k, t]
                    acc += diff * diff
                if acc < best_d:
                    best_d = acc
                    best_k = k
            new_labels[i] = best_k
            own[i] = best_d
        for k in range(n_clusters):
            counts[k] = 0.0
        for i in range(m):
            counts[new_labels[i]] += 1.0
        for k in range(n_clusters):
            if counts[k] == 0.0:
                # steal the farthest point whose cluster keeps >= 1 member
                steal = -1
                steal_d = -np.inf
                for i in range(m):
                    if counts[new_labels[i]] > 1.0 and own[i] > steal_d:
                        steal_d = own[i]
                        steal = i
                counts[new_labels[steal]] -= 1.0
                new_labels[steal] = k
                counts[k] = 1.0
                own[steal] = -1.0
        for k in range(n_clusters):
            for t in range(d):
                centers[k, t] = 0.0
        for i in range(m):
            k = new_labels[i]
            for t in range(d):
                centers[k, t] += points[i, t]
        for k in range(n_clusters):
            if counts[k] > 0.0:
                for t in range(d):
                    centers[k, t] /= counts[k]
        same = True
        for i in range(m):
            if new_labels[i] != labels[i]:
                same = False
            labels[i] = new_labels[i]
        if same:
            break
    return labels, ctr
