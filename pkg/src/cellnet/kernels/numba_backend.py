"""Numba-JIT kernel implementations (default backend).

Per-point loops avoid the n*k*k intermediates of the numpy fallback. The
parallel variants split points into per-thread chunks accumulated serially
and reduced in fixed chunk order, so results are reproducible for a fixed
thread count.
"""

import numpy as np
from numba import njit, prange, get_num_threads

from . import COINCIDENT_SQ


@njit(cache=True)
def _forward_point(g, pp, H, diagH, cnorm2, alphas, wrel_m, tstar_m, nbr_m):
    k = H.shape[0]
    for i in range(k):
        gi = g[i]
        hii = diagH[i]
        best_t = np.inf
        best_j = -1
        for j in range(k):
            if j == i or cnorm2[i, j] < COINCIDENT_SQ:
                continue
            den = g[j] - gi - H[i, j] + hii
            if den <= 0.0:
                continue
            t = cnorm2[i, j] / (2.0 * den)
            if t < best_t:
                best_t = t
                best_j = j
        tstar_m[i] = best_t
        nbr_m[i] = best_j
        pdist2 = pp - 2.0 * gi + hii
        if pdist2 < COINCIDENT_SQ or best_t >= 1.0:
            wrel_m[i] = 1.0
        else:
            w = 1.0 - (1.0 - best_t) / best_t / alphas[i]
            wrel_m[i] = w if w > 0.0 else 0.0


@njit(cache=True)
def _forward_serial(centers, H, diagH, cnorm2, alphas, X):
    n = X.shape[0]
    k = centers.shape[0]
    G = np.dot(X, centers.T)
    wrel = np.empty((n, k))
    tstar = np.empty((n, k))
    nbr = np.empty((n, k), dtype=np.int64)
    for m in range(n):
        pp = np.dot(X[m], X[m])
        _forward_point(G[m], pp, H, diagH, cnorm2, alphas, wrel[m], tstar[m], nbr[m])
    return wrel, tstar, nbr


@njit(cache=True, parallel=True)
def _forward_parallel(centers, H, diagH, cnorm2, alphas, X):
    n = X.shape[0]
    k = centers.shape[0]
    G = np.dot(X, centers.T)
    wrel = np.empty((n, k))
    tstar = np.empty((n, k))
    nbr = np.empty((n, k), dtype=np.int64)
    for m in prange(n):
        pp = np.dot(X[m], X[m])
        _forward_point(G[m], pp, H, diagH, cnorm2, alphas, wrel[m], tstar[m], nbr[m])
    return wrel, tstar, nbr


@njit(cache=True)
def _grad_point(centers, alphas, x, tstar_m, nbr_m, wrel_m, coef_m, d_centers, d_alphas):
    k, d = centers.shape
    for i in range(k):
        j = nbr_m[i]
        t = tstar_m[i]
        if j < 0 or t >= 1.0 or wrel_m[i] <= 0.0:
            continue
        a = alphas[i]
        cf = coef_m[i]
        d_alphas[i] += cf * (1.0 - t) / t / (a * a)
        dot = 0.0
        for q in range(d):
            dot += (centers[j, q] - centers[i, q]) * (x[q] - centers[i, q])
        s = cf / (a * t * t) / dot
        for q in range(d):
            wq = centers[j, q] - centers[i, q]
            uq = x[q] - centers[i, q]
            d_centers[i, q] += s * (t * (uq + wq) - wq)
            d_centers[j, q] += s * (wq - t * uq)


@njit(cache=True)
def _grads_serial(centers, alphas, X, tstar, nbr, wrel, coef):
    k, d = centers.shape
    d_centers = np.zeros((k, d))
    d_alphas = np.zeros(k)
    for m in range(X.shape[0]):
        _grad_point(centers, alphas, X[m], tstar[m], nbr[m], wrel[m], coef[m],
                    d_centers, d_alphas)
    return d_centers, d_alphas


@njit(cache=True, parallel=True)
def _grads_parallel(centers, alphas, X, tstar, nbr, wrel, coef, nchunks):
    n = X.shape[0]
    k, d = centers.shape
    d_centers = np.zeros((nchunks, k, d))
    d_alphas = np.zeros((nchunks, k))
    for c in prange(nchunks):
        lo = c * n // nchunks
        hi = (c + 1) * n // nchunks
        for m in range(lo, hi):
            _grad_point(centers, alphas, X[m], tstar[m], nbr[m], wrel[m], coef[m],
                        d_centers[c], d_alphas[c])
    return d_centers, d_alphas


def forward(centers, H, diagH, cnorm2, alphas, X, parallel):
    if parallel and X.shape[0] > 1:
        return _forward_parallel(centers, H, diagH, cnorm2, alphas, X)
    return _forward_serial(centers, H, diagH, cnorm2, alphas, X)


def center_alpha_grads(centers, alphas, X, tstar, nbr, wrel, coef, parallel):
    nchunks = min(get_num_threads(), X.shape[0])
    if parallel and nchunks > 1:
        dc, da = _grads_parallel(centers, alphas, X, tstar, nbr, wrel, coef, nchunks)
        return dc.sum(axis=0), da.sum(axis=0)
    return _grads_serial(centers, alphas, X, tstar, nbr, wrel, coef)
