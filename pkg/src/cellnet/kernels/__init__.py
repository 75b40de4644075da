"""Backend dispatch for the hot per-point kernels.

Two interchangeable implementations exist: a numba-JIT backend (default when
numba imports) and a vectorized pure-numpy fallback. Selection:

    CELLNET_BACKEND=auto|numba|numpy   (default auto)

Both backends compute the same quantities from the same pairwise tables, so
results agree to floating-point reassociation.
"""

import os

import numpy as np

# Seeds closer than this are treated as coincident and never act as
# neighbors (their bisector is undefined). Distances below it also mark a
# query point as sitting on a seed (degenerate ray, weight 1).
COINCIDENT_TOL = 1e-12
COINCIDENT_SQ = COINCIDENT_TOL * COINCIDENT_TOL

_BACKENDS = {}


def get_backend(name=None):
    """Return the kernel module for `name` (numba | numpy | auto)."""
    req = name or os.environ.get("CELLNET_BACKEND", "auto")
    if req not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown backend {req!r}; expected auto, numba or numpy")
    if req == "auto":
        try:
            return get_backend("numba")
        except ImportError:
            return get_backend("numpy")
    if req not in _BACKENDS:
        if req == "numba":
            from . import numba_backend as mod
        else:
            from . import numpy_backend as mod
        _BACKENDS[req] = mod
    return _BACKENDS[req]


_active = None


def active_backend():
    global _active
    if _active is None:
        _active = get_backend()
    return _active


def pair_tables(centers):
    """Point-independent Gram tables: H[i,j] = c_i.c_j and squared pair distances."""
    H = centers @ centers.T
    diagH = np.ascontiguousarray(np.diag(H))
    cnorm2 = np.maximum(diagH[:, None] + diagH[None, :] - 2.0 * H, 0.0)
    return H, diagH, cnorm2


def forward(centers, alphas, X, deterministic=False, backend=None):
    """Per (point, cell): relative weight, boundary-crossing parameter, active neighbor.

    Returns (wrel, tstar, nbr), each of shape (n, k); nbr is -1 where no
    bisector is crossed in the positive ray direction (tstar = +inf).
    """
    be = backend if backend is not None else active_backend()
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    H, diagH, cnorm2 = pair_tables(centers)
    return be.forward(centers, H, diagH, cnorm2, np.ascontiguousarray(alphas, dtype=np.float64),
                      X, not deterministic)


def center_alpha_grads(centers, alphas, X, tstar, nbr, wrel, coef,
                       deterministic=False, backend=None):
    """Accumulate objective partials w.r.t. centers and alphas.

    `coef[m, i]` must hold d(objective)/d(wrel[m, i]); contributions flow to
    each linear-regime cell i and to its active neighbor's center.
    """
    be = backend if backend is not None else active_backend()
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    return be.center_alpha_grads(centers, np.ascontiguousarray(alphas, dtype=np.float64),
                                 X, tstar, nbr, wrel,
                                 np.ascontiguousarray(coef, dtype=np.float64),
                                 not deterministic)
