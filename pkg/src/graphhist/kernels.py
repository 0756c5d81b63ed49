"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``GRAPHHIST_PURE`` is set to a non-empty value, the
pure-Python module with identical signatures is used.
"""

from __future__ import annotations

import os

from . import _pykernels as python

compiled = None
if not os.environ.get("GRAPHHIST_PURE"):
    try:
        from . import _kernels as compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"


def backends() -> dict:
    """Available kernel modules keyed by name."""
    out = {"python": python}
    if compiled is not None:
        out["cython"] = compiled
    return out
