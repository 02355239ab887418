"""The compiled and pure-Python kernels must agree bit for bit."""

import os

import pytest
from hypothesis import given, strategies as st

from ahsslab import _kernels
from ahsslab._kernels import _pykernels

try:
    from ahsslab._kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")

dense = st.integers(0, 7).flatmap(
    lambda m: st.integers(0, 7).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m),
            st.just(m),
            st.just(n),
        )
    )
)


def _agree(f, g, *args):
    try:
        b = g(*args)
    except OverflowError:
        return
    assert f(*args) == b


@needs_c
@given(dense)
def test_echelon_agrees(a):
    _agree(_pykernels.echelon, _ckernels.echelon, *a)


@needs_c
@given(dense, st.booleans())
def test_smith_agrees(a, transforms):
    _agree(_pykernels.smith, _ckernels.smith, *a, transforms)


@needs_c
@given(dense, st.sampled_from([0, 2, 3, 5]))
def test_sparse_invariants_agree(a, p):
    rows, m, n = a
    cols = [{i: rows[i][j] for i in range(m) if rows[i][j]} for j in range(n)]
    assert _pykernels.sparse_invariants(cols, m, p) == _ckernels.sparse_invariants(cols, m, p)


@needs_c
def test_overflow_detected_and_dispatcher_falls_back():
    big = [[2**61, 3], [5, 2**61 + 1]]
    with pytest.raises(OverflowError):
        _ckernels.smith(big, 2, 2, True)
    with pytest.raises(OverflowError):
        _ckernels.smith([[2**70]], 1, 1, False)
    assert _kernels.smith(big, 2, 2, True) == _pykernels.smith(big, 2, 2, True)


@needs_c
def test_bad_row_index_rejected():
    with pytest.raises(ValueError):
        _ckernels.sparse_invariants([{5: 1}], 2, 0)


def test_backend_reported():
    assert _kernels.BACKEND in ("cython", "python")
    if os.environ.get("AHSSLAB_BACKEND") == "python":
        assert _kernels.BACKEND == "python"


def test_python_backend_forced(tmp_path):
    import subprocess
    import sys

    env = dict(os.environ, AHSSLAB_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "from ahsslab import _kernels; print(_kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
