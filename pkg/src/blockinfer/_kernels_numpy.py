"""Pure-numpy kernel backend.

Mirrors ``_kernels_numba`` exactly: every function here has a JIT twin with
the same signature, the same tie-breaking, and the same random-draw protocol
(documented inline), so a run is reproducible under either backend.  Selected
when BLOCKINFER_BACKEND=numpy or when numba is unavailable.
"""

from __future__ import annotations

import math

import numpy as np

from ._rng import uniform_draw

FEASIBLE_TOL = 1e-12  # scale-free: compares ||(I-E)u||^2 against ||u||^2 = 1

_CHUNK_ELEMS = 1 << 23  # cap on cr * Nc * K * H temporaries in the scans


def _onehot(parts: np.ndarray, width: int) -> np.ndarray:
    # (N, m) labels -> (N, m, width) float indicator
    return (parts[:, :, None] == np.arange(width)[None, None, :]).astype(np.float64)


def residue_scan(values, row_parts, col_parts, K, H):
    """Minimum of x'Ex over the row x column partition product.

    Returns (flat_index, value); flat index is r * Nc + c, ties resolved to
    the first index in enumeration order.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    total_sq = float(np.sum(values * values))
    Nr, Nc = row_parts.shape[0], col_parts.shape[0]
    col_hot = _onehot(col_parts, H)                       # (Nc, p, H)
    mh = col_hot.sum(axis=1)                              # (Nc, H)
    inv_mh = np.where(mh > 0, 1.0 / np.maximum(mh, 1), 0.0)
    best_val = np.inf
    best_idx = -1
    chunk = max(1, _CHUNK_ELEMS // max(1, Nc * K * H))
    for lo in range(0, Nr, chunk):
        hi = min(Nr, lo + chunk)
        row_hot = _onehot(row_parts[lo:hi], K)            # (cr, n, K)
        nk = row_hot.sum(axis=1)                          # (cr, K)
        inv_nk = np.where(nk > 0, 1.0 / np.maximum(nk, 1), 0.0)
        G = np.einsum("rnk,np->rkp", row_hot, values)     # (cr, K, p)
        S = np.einsum("rkp,cph->rckh", G, col_hot)        # (cr, Nc, K, H)
        vals = total_sq - np.einsum("rckh,rk,ch->rc", S * S, inv_nk, inv_mh)
        flat = int(np.argmin(vals))
        v = float(vals.flat[flat])
        if v < best_val:
            best_val = v
            best_idx = (lo + flat // Nc) * Nc + (flat % Nc)
    return best_idx, best_val


def truncation_scan(u_mat, z_mat, z_sq, sigma0, row_parts, col_parts, K, H):
    """Minimum positive selection-boundary root over all candidate structures.

    Candidates whose constraint is direction-free (||(I-E)u||^2 <= tol) always
    hold and are skipped.  Returns (beta, flat_index, scanned); beta = +inf and
    index -1 when no candidate qualifies.
    """
    u_mat = np.ascontiguousarray(u_mat, dtype=np.float64)
    z_mat = np.ascontiguousarray(z_mat, dtype=np.float64)
    Nr, Nc = row_parts.shape[0], col_parts.shape[0]
    col_hot = _onehot(col_parts, H)
    mh = col_hot.sum(axis=1)
    inv_mh = np.where(mh > 0, 1.0 / np.maximum(mh, 1), 0.0)
    best = np.inf
    best_idx = -1
    chunk = max(1, _CHUNK_ELEMS // max(1, Nc * K * H))
    for lo in range(0, Nr, chunk):
        hi = min(Nr, lo + chunk)
        row_hot = _onehot(row_parts[lo:hi], K)
        nk = row_hot.sum(axis=1)
        inv_nk = np.where(nk > 0, 1.0 / np.maximum(nk, 1), 0.0)
        Gu = np.einsum("rnk,np->rkp", row_hot, u_mat)
        Gz = np.einsum("rnk,np->rkp", row_hot, z_mat)
        Su = np.einsum("rkp,cph->rckh", Gu, col_hot)
        Sz = np.einsum("rkp,cph->rckh", Gz, col_hot)
        su = np.einsum("rckh,rk,ch->rc", Su * Su, inv_nk, inv_mh)
        suz = np.einsum("rckh,rk,ch->rc", Su * Sz, inv_nk, inv_mh)
        sz = np.einsum("rckh,rk,ch->rc", Sz * Sz, inv_nk, inv_mh)
        cg = np.maximum(z_sq - sz, 0.0)
        feasible = su > FEASIBLE_TOL
        with np.errstate(invalid="ignore", divide="ignore"):
            roots = np.where(
                feasible,
                (np.sqrt(suz * suz + su * cg) - suz) / (sigma0 * np.maximum(su, FEASIBLE_TOL)),
                np.inf,
            )
        flat = int(np.argmin(roots))
        v = float(roots.flat[flat])
        if v < best:
            best = v
            best_idx = (lo + flat // Nc) * Nc + (flat % Nc)
    return best, best_idx, Nr * Nc


def _block_stats(mat, rl, cl, K, H):
    flat = rl[:, None] * H + cl[None, :]
    sums = np.bincount(flat.ravel(), weights=mat.ravel(), minlength=K * H)
    counts = np.bincount(flat.ravel(), minlength=K * H)
    return sums, counts


def gEg_value(values, rl, cl, K, H, total_sq):
    """x'Ex for one structure from precomputed sum of squares."""
    sums, counts = _block_stats(values, rl, cl, K, H)
    occ = counts > 0
    return total_sq - float(np.sum(sums[occ] ** 2 / counts[occ]))


def trunc_objective(u_mat, z_mat, z_sq, sigma0, rl, cl, K, H):
    """Boundary root for one candidate; +inf when the constraint always holds."""
    su_sums, counts = _block_stats(u_mat, rl, cl, K, H)
    sz_sums, _ = _block_stats(z_mat, rl, cl, K, H)
    occ = counts > 0
    cnt = counts[occ].astype(np.float64)
    su = float(np.sum(su_sums[occ] ** 2 / cnt))
    if su <= FEASIBLE_TOL:
        return np.inf
    suz = float(np.sum(su_sums[occ] * sz_sums[occ] / cnt))
    sz = float(np.sum(sz_sums[occ] ** 2 / cnt))
    cg = max(z_sq - sz, 0.0)
    return (math.sqrt(suz * suz + su * cg) - suz) / (sigma0 * su)


def _temperature(kind, t0, ratio, logc, t):
    if kind == 0:
        return t0 * ratio ** t
    return logc / math.log(t + 2.0)


def sa_residue_min(values, K, H, kind, t0, ratio, logc, eps, max_steps, key):
    """Annealed minimization of x'Ex by single row/column label moves.

    Draw protocol per run: n row-label draws, p col-label draws, then per
    iteration one index draw, one label draw when the picked side has more
    than one cluster, and one acceptance draw when the move does not improve.
    Returns (row_labels, col_labels, steps, counter).
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    key = int(key)
    n, p = values.shape
    total_sq = float(np.sum(values * values))
    ctr = 0
    rl = np.empty(n, dtype=np.int64)
    cl = np.empty(p, dtype=np.int64)
    for i in range(n):
        rl[i] = int(uniform_draw(key, ctr) * K)
        ctr += 1
    for j in range(p):
        cl[j] = int(uniform_draw(key, ctr) * H)
        ctr += 1
    f = gEg_value(values, rl, cl, K, H, total_sq)
    t = 0
    temp = _temperature(kind, t0, ratio, logc, 0)
    while temp >= eps and (max_steps <= 0 or t < max_steps):
        m = int(uniform_draw(key, ctr) * (n + p))
        ctr += 1
        if m < n:
            side_count, cur = K, rl[m]
        else:
            side_count, cur = H, cl[m - n]
        if side_count > 1:
            alt = int(uniform_draw(key, ctr) * (side_count - 1))
            ctr += 1
            new = alt + 1 if alt >= cur else alt
            if m < n:
                old, rl[m] = rl[m], new
            else:
                old, cl[m - n] = cl[m - n], new
            f_new = gEg_value(values, rl, cl, K, H, total_sq)
            df = f_new - f
            accept = df < 0.0
            if not accept:
                u = uniform_draw(key, ctr)
                ctr += 1
                accept = u < math.exp(-df / temp)
            if accept:
                f = f_new
            else:
                if m < n:
                    rl[m] = old
                else:
                    cl[m - n] = old
        t += 1
        temp = _temperature(kind, t0, ratio, logc, t)
    return rl, cl, t, ctr


def _draw_move_size(key, ctr, npts):
    # size 1 w.p. 1/2 + 2^-npts, size s w.p. 2^-s otherwise; the final
    # bucket absorbs float residue so every draw maps to a valid size
    u = uniform_draw(key, ctr)
    if u < 0.5 + 2.0 ** (-npts):
        return 1
    acc = 0.5 + 2.0 ** (-npts)
    for s in range(2, npts + 1):
        acc += 2.0 ** (-s)
        if u < acc:
            return s
    return npts


def sa_truncation(u_mat, z_mat, z_sq, sigma0, K, H, kind, t0, ratio, logc, eps,
                  max_steps, key):
    """Annealed minimization of the boundary root with multi-coordinate moves.

    Draw protocol per iteration: one size draw, s partial-shuffle draws, one
    label draw per selected multi-cluster coordinate, one acceptance draw when
    the move neither improves nor is infeasible.  Infeasible proposals are
    never accepted; a feasible proposal always replaces an infeasible state.
    Returns (row_labels, col_labels, steps, beta, counter).
    """
    u_mat = np.ascontiguousarray(u_mat, dtype=np.float64)
    z_mat = np.ascontiguousarray(z_mat, dtype=np.float64)
    key = int(key)
    n, p = u_mat.shape
    npts = n + p
    ctr = 0
    rl = np.empty(n, dtype=np.int64)
    cl = np.empty(p, dtype=np.int64)
    for i in range(n):
        rl[i] = int(uniform_draw(key, ctr) * K)
        ctr += 1
    for j in range(p):
        cl[j] = int(uniform_draw(key, ctr) * H)
        ctr += 1
    f = trunc_objective(u_mat, z_mat, z_sq, sigma0, rl, cl, K, H)
    pool = np.empty(npts, dtype=np.int64)
    t = 0
    temp = _temperature(kind, t0, ratio, logc, 0)
    while temp >= eps and (max_steps <= 0 or t < max_steps):
        s = _draw_move_size(key, ctr, npts)
        ctr += 1
        for i in range(npts):
            pool[i] = i
        for i in range(s):
            j = i + int(uniform_draw(key, ctr) * (npts - i))
            ctr += 1
            pool[i], pool[j] = pool[j], pool[i]
        new_rl = rl.copy()
        new_cl = cl.copy()
        for i in range(s):
            m = pool[i]
            if m < n:
                if K > 1:
                    alt = int(uniform_draw(key, ctr) * (K - 1))
                    ctr += 1
                    new_rl[m] = alt + 1 if alt >= rl[m] else alt
            else:
                if H > 1:
                    alt = int(uniform_draw(key, ctr) * (H - 1))
                    ctr += 1
                    new_cl[m - n] = alt + 1 if alt >= cl[m - n] else alt
        f_new = trunc_objective(u_mat, z_mat, z_sq, sigma0, new_rl, new_cl, K, H)
        if f_new < f:
            accept = True
        elif math.isinf(f_new):
            accept = False
        else:
            u = uniform_draw(key, ctr)
            ctr += 1
            accept = u < math.exp(-(f_new - f) / temp)
        if accept:
            rl, cl, f = new_rl, new_cl, f_new
        t += 1
        temp = _temperature(kind, t0, ratio, logc, t)
    return rl, cl, t, f, ctr


def _block_means_zero_filled(centered, rl, cl, K, H):
    sums, counts = _block_stats(centered, rl, cl, K, H)
    means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    return means.reshape(K, H)


def _assignment_loss(centered, rl, cl, B):
    fitted = B[rl][:, cl]
    d = centered - fitted
    return float(np.sum(d * d))


def tan_witten_loop(centered, init_rl, init_cl, K, H, max_passes):
    """Alternating row/column reassignment against current block means.

    Empty blocks carry mean 0 (the grand mean of the centered input), which
    keeps each half-step non-increasing in the fitted sum of squares.
    Returns (row_labels, col_labels, passes, loss_trace, trace_len); the trace
    holds the loss at start and after each of the four half-steps per pass.
    """
    centered = np.ascontiguousarray(centered, dtype=np.float64)
    n, p = centered.shape
    rl = init_rl.astype(np.int64).copy()
    cl = init_cl.astype(np.int64).copy()
    trace = np.empty(1 + 4 * max_passes, dtype=np.float64)
    B = _block_means_zero_filled(centered, rl, cl, K, H)
    trace[0] = _assignment_loss(centered, rl, cl, B)
    tlen = 1
    passes = 0
    for _ in range(max_passes):
        old_rl = rl.copy()
        old_cl = cl.copy()
        # rows against fixed means: cost (n, K) of matching row i to cluster k
        cost = ((centered[:, None, :] - B[None, :, cl]) ** 2).sum(axis=2)
        rl = np.argmin(cost, axis=1)
        trace[tlen] = _assignment_loss(centered, rl, cl, B)
        tlen += 1
        B = _block_means_zero_filled(centered, rl, cl, K, H)
        trace[tlen] = _assignment_loss(centered, rl, cl, B)
        tlen += 1
        # columns against fixed means: cost (p, H)
        cost = ((centered[:, :, None] - B[rl][:, None, :]) ** 2).sum(axis=0)
        cl = np.argmin(cost, axis=1)
        trace[tlen] = _assignment_loss(centered, rl, cl, B)
        tlen += 1
        B = _block_means_zero_filled(centered, rl, cl, K, H)
        trace[tlen] = _assignment_loss(centered, rl, cl, B)
        tlen += 1
        passes += 1
        if np.array_equal(rl, old_rl) and np.array_equal(cl, old_cl):
            break
    return rl, cl, passes, trace, tlen


def kmeans_labels(points, n_clusters, key, max_iter=50):
    """One-way k-means with greedy farthest-point seeding.

    One uniform draw picks the first center; remaining centers maximize the
    distance to the nearest chosen center (first index on ties).  Empty
    clusters are repaired by stealing the point farthest from its own center.
    Returns (labels, counter).
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    key = int(key)
    m = points.shape[0]
    ctr = 0
    first = int(uniform_draw(key, ctr) * m)
    ctr += 1
    centers = np.empty((n_clusters, points.shape[1]), dtype=np.float64)
    centers[0] = points[first]
    mindist = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, n_clusters):
        centers[c] = points[int(np.argmax(mindist))]
        d = ((points - centers[c]) ** 2).sum(axis=1)
        mindist = np.minimum(mindist, d)
    labels = np.zeros(m, dtype=np.int64)
    for _ in range(max_iter):
        dist = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(dist, axis=1)
        own = dist[np.arange(m), new_labels].copy()
        counts = np.bincount(new_labels, minlength=n_clusters).astype(np.float64)
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
            centers[k] = points[new_labels == k].mean(axis=0)
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    return labels, ctr
