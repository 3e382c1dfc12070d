"""Select the compiled convolution core, falling back to pure NumPy.

Set ``VOLTERRA_RADII_PURE=1`` to force the fallback (used by the benchmark
and the backend-equivalence tests).
"""

import os

if os.environ.get("VOLTERRA_RADII_PURE"):
    from . import _core_py as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as _impl

resolvent_recursion = _impl.resolvent_recursion
conv_triangular = _impl.conv_triangular


def backend_name():
    """'cython' when the compiled extension is active, else 'python'."""
    return _impl.BACKEND
