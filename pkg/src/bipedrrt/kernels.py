"""Hot-loop kernels, compiled when available.

The Cython extension ``_ckernels`` is used if it was built; otherwise the
pure-Python versions in ``_pykernels`` are used.  Set
``BIPEDRRT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("BIPEDRRT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
dubins_lengths = _impl.dubins_lengths
first_collision = _impl.first_collision


def propagate_chain(xs, ys, ths, seed, g, a, b, V):
    rows, n_ok = _impl.propagate_chain(xs, ys, ths, seed, g, a, b, V)
    if not isinstance(rows, list):
        rows = rows.tolist()
    return rows, n_ok


def compiled_available() -> bool:
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True
