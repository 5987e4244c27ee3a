"""Eigenvalue machinery for sparse Hermitian operators.

``lowest_eigenpairs`` picks one of three routes:

* ``dense``: LAPACK ``eigh`` on a materialized matrix (small dimensions);
* ``banded``: reverse Cuthill-McKee reordering followed by a banded Hermitian
  solve (a real tridiagonal one for chains), for grid operators;
* ``blocks``: the sparsity graph is split into connected components, each
  solved densely or banded, and the lowest levels merged;
* ``lanczos``: Krylov iteration with full reorthogonalization, one eigenpair at
  a time with locking, so that degenerate levels are resolved.  Works on any
  object with a matvec (matrix-free).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components, reverse_cuthill_mckee

logger = logging.getLogger(__name__)

__all__ = ["EigenRequest", "ConvergenceError", "NotHermitianError", "lowest_eigenpairs",
           "hermitian_residual", "HermitianExponential", "hermitian_exp_apply",
           "richardson"]


class ConvergenceError(RuntimeError):
    pass


class NotHermitianError(ValueError):
    pass


@dataclass
class EigenRequest:
    """Parameters of a lowest-eigenpair computation.

    ``operator`` is a dense array, a sparse matrix or a
    ``scipy.sparse.linalg.LinearOperator``.
    """

    operator: object
    k: int = 1
    tol: float = 1e-10
    max_iter: int = 600
    dense_threshold: int = 2048
    method: str = "auto"
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def _as_linop(op):
    if isinstance(op, spla.LinearOperator):
        return op
    return spla.aslinearoperator(op)


def hermitian_residual(op, probes: int = 3, seed: int = 0) -> float:
    """Relative size of ``<x, A y> - <A x, y>`` on random probe vectors."""
    A = _as_linop(op)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probes):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        Ax, Ay = A.matvec(x), A.matvec(y)
        scale = max(np.linalg.norm(Ax) * np.linalg.norm(y), 1e-300)
        worst = max(worst, abs(np.vdot(x, Ay) - np.vdot(Ax, y)) / scale)
    return worst


def _bandwidth(mat: sp.csr_matrix) -> int:
    coo = mat.tocoo()
    if coo.nnz == 0:
        return 0
    return int(np.abs(coo.row - coo.col).max())


def _dense(op, k):
    A = op.toarray() if sp.issparse(op) else np.asarray(op)
    w, v = la.eigh(A, subset_by_index=(0, k - 1))
    return w, v


def _tridiagonal(B: sp.coo_matrix, k: int):
    """Bandwidth-one Hermitian solve; complex couplings are gauged real first."""
    n = B.shape[0]
    csr = B.tocsr()
    d = csr.diagonal().real
    off = np.asarray(csr[np.arange(n - 1), np.arange(1, n)]).ravel() if n > 1 else np.zeros(0)
    mag = np.abs(off)
    steps = np.where(mag > 0, np.conj(off) / np.where(mag > 0, mag, 1), 1)
    phase = np.concatenate([[1.0 + 0j], np.cumprod(steps)])
    if n == 1:
        return d.copy(), np.ones((1, 1), dtype=complex)
    w, y = la.eigh_tridiagonal(d, mag, select="i", select_range=(0, k - 1))
    return w, phase[:, None] * y


def _banded(mat: sp.csr_matrix, k: int):
    perm = reverse_cuthill_mckee(sp.csr_matrix(abs(mat) + abs(mat).T), symmetric_mode=True)
    B = mat[perm][:, perm].tocoo()
    u = _bandwidth(B)
    n = mat.shape[0]
    if u <= 1:
        w, v = _tridiagonal(B, k)
    else:
        ab = np.zeros((u + 1, n), dtype=B.dtype)
        upper = B.row <= B.col
        ab[u + B.row[upper] - B.col[upper], B.col[upper]] = B.data[upper]
        w, v = la.eig_banded(ab, lower=False, select="i", select_range=(0, k - 1))
    vecs = np.empty_like(v)
    vecs[perm] = v
    return w, vecs


def _blocks(mat: sp.csr_matrix, labels, k: int, dense_threshold: int):
    """Solve each connected component separately and merge the lowest ``k``."""
    n = mat.shape[0]
    vals, cols = [], []
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        sub = mat[idx][:, idx]
        kk = min(k, idx.size)
        if idx.size <= dense_threshold:
            w, v = _dense(sub, kk)
        else:
            w, v = _banded(sp.csr_matrix(sub), kk)
        for i in range(kk):
            full = np.zeros(n, dtype=np.result_type(v.dtype, np.complex128))
            full[idx] = v[:, i]
            vals.append(w[i])
            cols.append(full)
    order = np.argsort(vals, kind="stable")[:k]
    return np.asarray(vals)[order], np.column_stack([cols[i] for i in order])


def _lanczos_one(A, n, dtype, locked, tol, max_iter, rng):
    v = rng.standard_normal(n).astype(dtype)
    if np.iscomplexobj(v):
        v = v + 1j * rng.standard_normal(n)
    if locked.shape[1]:
        v -= locked @ (locked.conj().T @ v)
    v /= np.linalg.norm(v)
    m = min(max_iter, n - locked.shape[1])
    V = np.zeros((m + 1, n), dtype=dtype)
    V[0] = v
    alpha, beta = [], []
    theta, s = None, None
    for j in range(m):
        w = A.matvec(V[j])
        a = np.vdot(V[j], w).real
        w = w - a * V[j]
        if j:
            w -= beta[-1] * V[j - 1]
        for _ in range(2):
            w -= V[: j + 1].T @ (V[: j + 1].conj() @ w)
            if locked.shape[1]:
                w -= locked @ (locked.conj().T @ w)
        b = np.linalg.norm(w)
        alpha.append(a)
        if (j + 1) % 10 == 0 or b < 1e-13 or j == m - 1:
            theta, s = la.eigh_tridiagonal(np.array(alpha), np.array(beta),
                                           select="i", select_range=(0, 0))
            est = b * abs(s[-1, 0])
            if est <= tol * (1 + abs(theta[0])) or b < 1e-13:
                break
        beta.append(b)
        V[j + 1] = w / b
    nk = len(alpha)
    x = V[:nk].T @ s[:, 0]
    x /= np.linalg.norm(x)
    return theta[0], x, nk


def lowest_eigenpairs(request: EigenRequest):
    """The ``k`` smallest eigenpairs, eigenvalues ascending, vectors as columns."""
    op, k = request.operator, request.k
    A = _as_linop(op)
    n = A.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds dimension {n}")
    herm = hermitian_residual(op, seed=request.seed)
    if herm > 1e-10:
        raise NotHermitianError(f"operator hermiticity residual {herm:.2e}")
    method = request.method
    materialized = sp.issparse(op) or isinstance(op, np.ndarray)
    if method == "auto":
        if materialized and n <= request.dense_threshold:
            method = "dense"
        elif sp.issparse(op) and n > request.dense_threshold:
            ncomp, labels = connected_components(abs(op), directed=False)
            if ncomp > 1:
                method = "blocks"
            else:
                perm = reverse_cuthill_mckee(sp.csr_matrix(abs(op) + abs(op).T),
                                         symmetric_mode=True)
                bw = _bandwidth(op.tocsr()[perm][:, perm])
                method = "banded" if bw <= 1 or bw * bw * 50 < n * request.dense_threshold else "lanczos"
        else:
            method = "lanczos"
    logger.debug("lowest_eigenpairs: n=%d k=%d method=%s", n, k, method)
    if method == "dense":
        w, v = _dense(op, k)
    elif method == "blocks":
        if not sp.issparse(op):
            raise ValueError("block route needs a sparse matrix")
        op = sp.csr_matrix(op)
        _, labels = connected_components(abs(op), directed=False)
        w, v = _blocks(op, labels, k, request.dense_threshold)
    elif method == "banded":
        w, v = _banded(sp.csr_matrix(op), k)
    elif method == "lanczos":
        dtype = np.result_type(A.dtype, np.float64)
        rng = np.random.default_rng(request.seed)
        locked = np.zeros((n, 0), dtype=dtype)
        vals = []
        for _ in range(k):
            theta, x, _ = _lanczos_one(A, n, dtype, locked, request.tol,
                                       request.max_iter, rng)
            vals.append(theta)
            locked = np.column_stack([locked, x])
        # Rayleigh-Ritz on the locked space restores ordering and mixes degenerate copies
        H = locked.conj().T @ np.column_stack([A.matvec(locked[:, i]) for i in range(k)])
        w, c = la.eigh((H + H.conj().T) / 2)
        v = locked @ c
    else:
        raise ValueError(f"unknown method {method!r}")
    w = np.asarray(w, dtype=float)
    for i in range(k):
        r = np.linalg.norm(A.matvec(v[:, i]) - w[i] * v[:, i])
        if r > max(request.tol, 1e-12) * (1 + abs(w[i])) * 10:
            raise ConvergenceError(
                f"eigenpair {i} residual {r:.2e} above tolerance ({method})")
    return w, v


class HermitianExponential:
    """Applies ``exp(i s Z)`` for Hermitian sparse ``Z`` by spectral decomposition.

    The generator is split into connected blocks of its sparsity graph and each
    block is diagonalized once; blocks are cached.
    """

    def __init__(self, generator, dense_threshold: int = 6000):
        Z = sp.csr_matrix(generator)
        resid = abs(Z - Z.conj().T).max() if Z.nnz else 0.0
        if resid > 1e-10:
            raise NotHermitianError(f"generator hermiticity residual {resid:.2e}")
        self.Z = Z
        self.dense_threshold = dense_threshold
        _, self.labels = connected_components(abs(Z), directed=False)
        self._blocks = {}

    def _block(self, label):
        blk = self._blocks.get(label)
        if blk is None:
            idx = np.flatnonzero(self.labels == label)
            if idx.size > self.dense_threshold:
                raise ValueError(f"block of size {idx.size} above dense threshold")
            sub = self.Z[idx][:, idx].toarray()
            w, v = la.eigh((sub + sub.conj().T) / 2)
            blk = (idx, w, v)
            self._blocks[label] = blk
        return blk

    def __call__(self, vector, scalar: float = 1.0):
        vector = np.asarray(vector, dtype=complex)
        out = vector.copy()
        if scalar == 0:
            return out
        for label in np.unique(self.labels[np.flatnonzero(vector)]):
            idx, w, v = self._block(label)
            out[idx] = v @ (np.exp(1j * scalar * w) * (v.conj().T @ vector[idx]))
        return out


def hermitian_exp_apply(generator, scalar: float, vector, dense_threshold: int = 6000):
    """``exp(i * scalar * generator) @ vector``."""
    return HermitianExponential(generator, dense_threshold)(vector, scalar)


def richardson(coarse: float, medium: float, fine: float, ratio: float = 2.0):
    """Observed convergence order and extrapolated limit from three refinements."""
    d1, d2 = coarse - medium, medium - fine
    if d2 == 0 or d1 / d2 <= 0:
        return math.nan, fine
    order = math.log(d1 / d2) / math.log(ratio)
    limit = fine - d2 / (ratio ** order - 1)
    return order, limit
