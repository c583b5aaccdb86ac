"""Kernel backend selection.

BUNDLE_CENSUS_BACKEND controls which kernel module runs the hot loops:

* ``numba`` -- JIT kernels (error if numba is missing),
* ``numpy`` -- the pure-numpy fallback,
* ``auto`` (default) -- numba when importable, numpy otherwise.
"""

import os

_ENV_VAR = "BUNDLE_CENSUS_BACKEND"


def get_kernels(name):
    """Return the kernel module for an explicit backend name."""
    if name == "numba":
        from . import _kernels_numba
        return _kernels_numba
    if name == "numpy":
        from . import _kernels_numpy
        return _kernels_numpy
    raise ValueError(f"unknown backend {name!r} (expected 'numba' or 'numpy')")


def _select():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice in ("numba", "numpy"):
        return get_kernels(choice), choice
    if choice not in ("auto", ""):
        raise ValueError(f"{_ENV_VAR}={choice!r}: expected 'numba', 'numpy' or 'auto'")
    try:
        return get_kernels("numba"), "numba"
    except ImportError:
        return get_kernels("numpy"), "numpy"


kernels, BACKEND = _select()


def backend_name():
    return BACKEND
