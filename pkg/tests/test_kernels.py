import numpy as np
import pytest

from securenc import kernels
from securenc.gf import gf

BACKENDS = kernels.available_backends()


def test_backend_selection_reported():
    assert kernels.BACKEND in BACKENDS
    assert "python" in BACKENDS


@pytest.mark.parametrize("q", [2, 3, 4, 256])
def test_rref_backends_agree(q):
    t = gf(q).tables
    rng = np.random.default_rng(q)
    for _ in range(50):
        a = rng.integers(0, q, size=tuple(rng.integers(1, 9, size=2)))
        results = [kernels.rref(a, t, backend=b) for b in BACKENDS]
        for R, piv in results[1:]:
            assert np.array_equal(R, results[0][0])
            assert piv == results[0][1]


@pytest.mark.parametrize("q", [2, 5, 256])
def test_matmul_backends_agree(q):
    t = gf(q).tables
    rng = np.random.default_rng(7 * q)
    for _ in range(50):
        r, k, c = rng.integers(1, 8, size=3)
        a = rng.integers(0, q, size=(r, k))
        b = rng.integers(0, q, size=(k, c))
        outs = [kernels.matmul(a, b, t, backend=be) for be in BACKENDS]
        for o in outs[1:]:
            assert np.array_equal(o, outs[0])


def test_matmul_prime_field_matches_integer_product():
    t = gf(7).tables
    rng = np.random.default_rng(3)
    a = rng.integers(0, 7, size=(5, 4))
    b = rng.integers(0, 7, size=(4, 6))
    for be in BACKENDS:
        assert np.array_equal(kernels.matmul(a, b, t, backend=be), (a @ b) % 7)


def test_max_pair_collisions_backends_agree():
    rng = np.random.default_rng(5)
    images = rng.integers(0, 3, size=(12, 20))
    outs = [kernels.max_pair_collisions(images, backend=b) for b in BACKENDS]
    assert all(o == outs[0] for o in outs)
    # brute-force oracle
    best = max(int((images[:, i] == images[:, j]).sum()) for i in range(20) for j in range(i + 1, 20))
    assert outs[0] == (best, 190)


def test_lazy_tables_force_python_path():
    t = gf(2 ** 12).tables
    assert not t.dense
    R, piv = kernels.rref([[2, 4], [1, 2]], t, backend="cython")
    assert piv == [0]
