"""Pure-NumPy implementations of the hot convolution loops.

Same contracts as the compiled module ``_core``; selected as a fallback
at import time (see ``_backend``).
"""

import numpy as np

BACKEND = "python"


def resolvent_recursion(coeffs):
    """Power-series inversion: X(0) = I, X(n) = sum_{j<n} K(j) X(n-1-j).

    ``coeffs`` holds K(0..n-1) as an (n, d, d) array; returns (n+1, d, d).
    """
    n, d, _ = coeffs.shape
    out = np.zeros((n + 1, d, d), dtype=np.complex128)
    out[0] = np.eye(d)
    for k in range(1, n + 1):
        out[k] = np.einsum("jab,jbc->ac", coeffs[:k], out[k - 1 :: -1])
    return out


def conv_triangular(a, b):
    """Causal convolution c(m) = sum_{i<=m} a(i) b(m-i) of matrix sequences."""
    n, p, _ = a.shape
    r = b.shape[2]
    out = np.empty((n, p, r), dtype=np.complex128)
    for m in range(n):
        out[m] = np.einsum("jab,jbc->ac", a[: m + 1], b[m::-1])
    return out
