"""Backend selection for the finite-field inner loops.

The compiled extension ``_ckernels`` is used when importable; otherwise,
or when the environment variable ``SECURENC_PURE_PYTHON`` is set to a
non-empty value other than ``0``, the pure-Python module is used. Both
expose the same functions, and the wrappers below hide the calling
convention differences (in-place memoryviews vs. nested lists).
"""
import os

import numpy as np

from . import _pykernels

_c = None
if os.environ.get("SECURENC_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _ckernels as _c
    except ImportError:  # extension not built
        _c = None

BACKEND = "cython" if _c is not None else "python"


def available_backends():
    """Names of the backends usable in this process."""
    return ["cython", "python"] if _c is not None else ["python"]


def _pick(backend, tables):
    if backend is None:
        backend = BACKEND
    if backend == "cython" and (_c is None or not tables.dense):
        backend = "python"
    return backend


def rref(a, tables, backend=None):
    """Return ``(R, pivots)`` with ``R`` the reduced row-echelon form of ``a``."""
    out = np.array(a, dtype=np.int64, order="C", copy=True)
    if out.shape[0] == 0 or out.shape[1] == 0:
        return out, []
    if _pick(backend, tables) == "cython":
        pivots = _c.rref(out, tables.add, tables.sub, tables.mul, tables.inv)
        return out, list(pivots)
    rows = out.tolist()
    pivots = _pykernels.rref(rows, tables.add_l, tables.sub_l, tables.mul_l, tables.inv_l)
    return np.array(rows, dtype=np.int64).reshape(out.shape), pivots


def matmul(a, b, tables, backend=None):
    """Field matrix product of two 2-D int64 arrays."""
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if _pick(backend, tables) == "cython":
        return _c.matmul(a, b, tables.add, tables.mul)
    if tables.dense:
        return _pykernels.matmul(a, b, tables.add, tables.mul)
    return _pykernels.matmul(a, b, tables.add_l, tables.mul_l)


def max_pair_collisions(images, backend=None):
    """Return ``(max_count, pairs_checked)`` over distinct input pairs."""
    images = np.ascontiguousarray(images, dtype=np.int64)
    if backend is None:
        backend = BACKEND
    if backend == "cython" and _c is not None:
        best, pairs = _c.max_pair_collisions(images)
        return int(best), int(pairs)
    return _pykernels.max_pair_collisions(images)
