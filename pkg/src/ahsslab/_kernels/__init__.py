"""Elimination kernels with a compiled fast path.

The compiled module works on int64 storage and raises ``OverflowError``
whenever an entry would leave that range; every entry point here then
re-runs the pure-Python kernel, which uses arbitrary-precision ints.
Set ``AHSSLAB_BACKEND=python`` to force the pure-Python kernels.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_ck = None
if os.environ.get("AHSSLAB_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _ck  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _ck = None


def echelon(rows, nrows, ncols):
    if _ck is not None:
        try:
            return _ck.echelon(rows, nrows, ncols)
        except OverflowError:
            pass
    return _pykernels.echelon(rows, nrows, ncols)


def smith(rows, nrows, ncols, transforms=True):
    if _ck is not None:
        try:
            return _ck.smith(rows, nrows, ncols, transforms)
        except OverflowError:
            pass
    return _pykernels.smith(rows, nrows, ncols, transforms)


def sparse_invariants(columns, nrows, modulus=0):
    if _ck is not None:
        try:
            return _ck.sparse_invariants(columns, nrows, modulus)
        except OverflowError:
            pass
    return _pykernels.sparse_invariants(columns, nrows, modulus)


__all__ = ["BACKEND", "echelon", "smith", "sparse_invariants"]
