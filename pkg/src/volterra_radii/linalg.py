"""Induced matrix norms and small dense helpers for the three norm modes."""

import math

import numpy as np

from .errors import DimensionError


def as_matrix(value, rows=None, cols=None):
    """Coerce scalars/nested lists to a complex 2-D array; validate finiteness."""
    a = np.asarray(value, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1) if rows == 1 else a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={a.ndim}")
    if rows is not None and a.shape != (rows, cols):
        raise DimensionError(f"expected shape {(rows, cols)}, got {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def vec_norm(v, mode):
    """Norm of a state vector in the configured mode."""
    v = np.asarray(v)
    if mode == 2.0:
        return float(np.linalg.norm(v, 2))
    if mode == 1.0:
        return float(np.abs(v).sum())
    return float(np.abs(v).max()) if v.size else 0.0


def induced_norm(a, mode):
    """Induced operator norm of a matrix (or a batch stacked on axis 0)."""
    a = np.asarray(a)
    if mode == 2.0:
        s = np.linalg.svd(a, compute_uv=False)
        return s[..., 0] if a.ndim > 2 else float(s[0])
    if mode == 1.0:
        r = np.abs(a).sum(axis=-2).max(axis=-1)
    else:
        r = np.abs(a).sum(axis=-1).max(axis=-1)
    return r if a.ndim > 2 else float(r)


def smallest_gain(a, mode):
    """min_{|u|=1} |a u| in the mode norm: sigma_min for mode 2, else
    1/||a^-1|| (0 when singular).  Batched over axis 0 for 3-D input."""
    a = np.asarray(a)
    if mode == 2.0:
        s = np.linalg.svd(a, compute_uv=False)
        return s[..., -1] if a.ndim > 2 else float(s[-1])
    batched = a.ndim > 2
    stack = a if batched else a[None]
    out = np.empty(stack.shape[0])
    for i, m in enumerate(stack):
        try:
            inv = np.linalg.inv(m)
            out[i] = 1.0 / induced_norm(inv, mode)
        except np.linalg.LinAlgError:
            out[i] = 0.0
    return out if batched else float(out[0])


def golden_max(f, lo, hi, tol):
    """Golden-section maximization of a unimodal f on [lo, hi].

    Returns (x, f(x)) for the best point seen, endpoints included.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    best_x, best_v = lo, f(lo)
    for x in (hi,):
        v = f(x)
        if v > best_v:
            best_x, best_v = x, v
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    for x, v in ((c, fc), (d, fd)):
        if v > best_v:
            best_x, best_v = x, v
    return best_x, best_v


def golden_min(f, lo, hi, tol):
    x, v = golden_max(lambda t: -f(t), lo, hi, tol)
    return x, -v
