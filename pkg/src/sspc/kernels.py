"""Hot-loop kernels with a compiled backend and a NumPy fallback.

The compiled extension ``sspc._kernels`` is used when it imports; set
``SSPC_PURE_PYTHON=1`` to force the fallback. Both backends are exposed as
``compiled`` (possibly ``None``) and ``python`` so callers and benchmarks can
compare them directly.
"""
import os

import numpy as np

from . import _kernels_py as python

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and not os.environ.get("SSPC_PURE_PYTHON"):
    _impl = compiled
    BACKEND = "cython"
else:
    _impl = python
    BACKEND = "python"


def fwht(data):
    """Walsh-Hadamard transform along the last axis; returns a new array."""
    arr = np.array(data, dtype=np.float64, order="C", copy=True)
    flat = arr.reshape(-1, arr.shape[-1])
    _impl.fwht(flat)
    return flat.reshape(arr.shape)


def xor_convolve(a, b):
    return _impl.xor_convolve(
        np.ascontiguousarray(a, dtype=np.float64), np.ascontiguousarray(b, dtype=np.float64)
    )


def prefix_products(mats):
    return _impl.prefix_products(np.ascontiguousarray(mats, dtype=np.complex128))


def suffix_products(mats):
    return _impl.suffix_products(np.ascontiguousarray(mats, dtype=np.complex128))
