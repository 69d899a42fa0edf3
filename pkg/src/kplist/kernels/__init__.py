"""Hot kernels, compiled when available.

The Cython extension is used unless it failed to build or ``KPLIST_PURE=1``
is set; both backends expose ``list_cliques``, ``sweep_cut`` and
``exact_min_cut`` with identical results.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("KPLIST_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
list_cliques = _impl.list_cliques
sweep_cut = _impl.sweep_cut
exact_min_cut = _impl.exact_min_cut


def backends() -> dict:
    """Every importable backend by name (the Python one is always present)."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found


__all__ = ["BACKEND", "backends", "exact_min_cut", "list_cliques", "sweep_cut"]
