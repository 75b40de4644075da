"""Pure-numpy kernel implementations (fallback backend).

Vectorized over (point, cell, neighbor) with chunking to bound the n*k*k
intermediates. Always reduces in a fixed order, so the `parallel` flag is
ignored here.
"""

import numpy as np

from . import COINCIDENT_SQ


def forward(centers, H, diagH, cnorm2, alphas, X, parallel):
    n = X.shape[0]
    k = centers.shape[0]
    wrel = np.empty((n, k))
    tstar = np.empty((n, k))
    nbr = np.empty((n, k), dtype=np.int64)

    valid_pair = cnorm2 >= COINCIDENT_SQ
    np.fill_diagonal(valid_pair, False)

    chunk = max(1, 4_000_000 // max(k * k, 1))
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        Xc = X[lo:hi]
        G = Xc @ centers.T
        pp = np.einsum("md,md->m", Xc, Xc)
        # den[m,i,j] = (c_j - c_i) . (x_m - c_i), expanded through the Gram tables
        den = G[:, None, :] - G[:, :, None] - H[None, :, :] + diagH[None, :, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            tc = np.where(valid_pair[None, :, :] & (den > 0.0),
                          cnorm2[None, :, :] / (2.0 * den), np.inf)
        ts = tc.min(axis=2)
        nb = tc.argmin(axis=2).astype(np.int64)
        nb[np.isinf(ts)] = -1

        pdist2 = np.maximum(pp[:, None] - 2.0 * G + diagH[None, :], 0.0)
        interior = (pdist2 < COINCIDENT_SQ) | (ts >= 1.0)
        with np.errstate(invalid="ignore"):
            w = np.maximum(1.0 - (1.0 - ts) / ts / alphas[None, :], 0.0)
        w[interior] = 1.0

        wrel[lo:hi] = w
        tstar[lo:hi] = ts
        nbr[lo:hi] = nb
    return wrel, tstar, nbr


def center_alpha_grads(centers, alphas, X, tstar, nbr, wrel, coef, parallel):
    k, d = centers.shape
    d_centers = np.zeros((k, d))
    d_alphas = np.zeros(k)

    linear = (nbr >= 0) & (tstar < 1.0) & (wrel > 0.0)
    m_idx, i_idx = np.nonzero(linear)
    if m_idx.size == 0:
        return d_centers, d_alphas

    j_idx = nbr[m_idx, i_idx]
    t = tstar[m_idx, i_idx]
    a = alphas[i_idx]
    cf = coef[m_idx, i_idx]

    np.add.at(d_alphas, i_idx, cf * (1.0 - t) / t / (a * a))

    w = centers[j_idx] - centers[i_idx]
    u = X[m_idx] - centers[i_idx]
    D = 2.0 * np.einsum("pd,pd->p", w, u)
    # d wrel/dt = 1/(alpha t^2); dt/dc_i and dt/dc_j from t = |w|^2 / (2 w.u)
    s = (cf / (a * t * t) * 2.0 / D)[:, None]
    np.add.at(d_centers, i_idx, s * (t[:, None] * (u + w) - w))
    np.add.at(d_centers, j_idx, s * (w - t[:, None] * u))
    return d_centers, d_alphas
