import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from schwinger.solver import (EigenRequest, HermitianExponential, NotHermitianError,
                              hermitian_exp_apply, hermitian_residual, lowest_eigenpairs,
                              richardson)


def _ring(n, phase=0.0):
    up = sp.diags(np.ones(n - 1), 1, shape=(n, n), dtype=complex).tolil()
    up[n - 1, 0] = np.exp(1j * phase)
    up = sp.csr_matrix(up)
    return sp.csr_matrix(2 * sp.identity(n) - up - up.conj().T)


def test_diagonal_example():
    w, v = lowest_eigenpairs(EigenRequest(np.diag([3.0, 1.0, 2.0]), k=2))
    assert np.allclose(w, [1.0, 2.0])
    assert abs(abs(v[1, 0]) - 1) <= 1e-12


@pytest.mark.parametrize("method", ["dense", "banded", "lanczos", "auto"])
def test_ring_laplacian_closed_form(method):
    n = 200
    w, v = lowest_eigenpairs(EigenRequest(_ring(n, 0.3), k=4, method=method, tol=1e-10))
    q = np.arange(n)
    expect = np.sort(4 * np.sin((2 * math.pi * q + 0.3) / (2 * n)) ** 2)[:4]
    assert np.abs(w - expect).max() <= 1e-9
    assert np.abs(v.conj().T @ v - np.eye(4)).max() <= 1e-9


def test_blocks_route():
    A = sp.block_diag([_ring(50), 3 * sp.identity(40), _ring(30, 1.0) + 0.1 * sp.identity(30)])
    A = sp.csr_matrix(A, dtype=complex)
    w, _ = lowest_eigenpairs(EigenRequest(A, k=5, method="blocks", dense_threshold=60))
    ref = np.linalg.eigvalsh(A.toarray())[:5]
    assert np.abs(w - ref).max() <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(20, 512), st.integers(0, 10_000))
def test_lanczos_matches_dense(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = (X + X.conj().T) / 2
    w, v = lowest_eigenpairs(EigenRequest(H, k=3, method="lanczos", tol=1e-10, max_iter=n + 50))
    ref = np.linalg.eigvalsh(H)[:3]
    assert np.abs(w - ref).max() <= 1e-9
    assert np.abs(v.conj().T @ v - np.eye(3)).max() <= 1e-9


def test_rejects_non_hermitian():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert hermitian_residual(A) > 0
    with pytest.raises(NotHermitianError):
        lowest_eigenpairs(EigenRequest(A))
    with pytest.raises(ValueError):
        EigenRequest(A, k=0)
    with pytest.raises(ValueError):
        lowest_eigenpairs(EigenRequest(np.eye(2), k=3))
    with pytest.raises(NotHermitianError):
        HermitianExponential(sp.csr_matrix(A))


def test_exponential_identities():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    Z = sp.csr_matrix(_ring(6, 0.2))
    assert np.array_equal(hermitian_exp_apply(Z, 0.0, x), x)
    y = hermitian_exp_apply(sp.diags(np.full(6, math.pi)), 1.0, x)
    assert np.abs(y + x).max() <= 1e-14
    u = HermitianExponential(Z)
    assert np.linalg.norm(u(x, 0.7)) == pytest.approx(np.linalg.norm(x), rel=1e-13)
    assert np.abs(u(u(x, 0.7), -0.7) - x).max() <= 1e-13
    import scipy.linalg as la
    assert np.abs(u(x, 0.7) - la.expm(0.7j * Z.toarray()) @ x).max() <= 1e-12


def test_richardson():
    f = lambda h: 1.0 + 3 * h ** 2
    order, limit = richardson(f(0.4), f(0.2), f(0.1))
    assert order == pytest.approx(2.0, abs=1e-12)
    assert limit == pytest.approx(1.0, abs=1e-12)
    order, _ = richardson(1.0, 1.0, 1.0)
    assert math.isnan(order)
