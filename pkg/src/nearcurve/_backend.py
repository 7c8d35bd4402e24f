"""Kernel backend selection.

The compiled extension is used when importable; ``NEARCURVE_PURE=1`` forces
the numpy fallback.  Both expose identical functions.
"""

import os

from . import _pykernels as pure

try:
    if os.environ.get("NEARCURVE_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _ckernels as compiled
except ImportError:
    compiled = None

kernels = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"


def get(name=None):
    """Return a backend module by name (``cython``/``python``) or the default."""
    if name is None:
        return kernels
    if name == "python":
        return pure
    if name == "cython":
        if compiled is None:
            raise ImportError("compiled kernels are not built")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
