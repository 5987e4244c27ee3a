"""Fermion bilinears that bosonize: chiral densities, currents, T, and boson modes.

The chiral density Fourier modes are assembled term by term from their ladder
strings.  For ``m > 0``::

    rho_R(m)  = -sum_{k>m} c+_k c_{k-m} + sum_{0<k<=m} b+_{m-k} c+_k + sum_{k>=0} b+_{k+m} b_k
    rho_R(-m) = -sum_{k>m} c+_{k-m} c_k + sum_{0<k<=m} c_k b_{m-k}   + sum_{k>=0} b+_k b_{k+m}
    rho_L(m)  =  sum_{k<-m} b+_{k+m} b_k + sum_{-m<=k<0} c_{-k-m} b_k - sum_{k<=0} c+_k c_{k-m}
    rho_L(-m) =  sum_{k<-m} b+_k b_{k+m} + sum_{-m<=k<0} b+_k c+_{-k-m} - sum_{k<=0} c+_{k-m} c_k

Terms whose annihilators hit empty modes vanish and are skipped, so the
action on a finite occupation record is exact.  Matrices over a catalog are
the exact action projected onto the catalog, which coincides with clipping
every sum to the mode window.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .fock import (BasisCatalog, FockState, apply_string, assemble, charge_q5,
                   exact_columns, free_dirac_matrix, q5_matrix)

__all__ = [
    "PhysicalConstants", "rho_action", "rho_matrix", "DensityFamily", "current_matrix",
    "t_matrix", "t_words", "kronig_residual", "a_ladder_action", "a_ladder_matrix",
    "phi_pi_matrix", "commutator_mask",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Circumference ``L`` and coupling ``e`` (natural units)."""

    L: float = 2 * math.pi
    e: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not self.e >= 0:
            raise ValueError("e must be nonnegative")

    def k(self, m) -> float:
        return 2 * math.pi * m / self.L

    def omega(self, m) -> float:
        """Dressed boson frequency sqrt(k_m^2 + e^2/pi)."""
        return math.sqrt(self.k(m) ** 2 + self.e ** 2 / math.pi)


def _terms(species: str, m: int, state: FockState):
    f, a = state
    if m > 0:
        if species == "R":
            for n in a:
                if n > 0:
                    yield -1, (("cdag", n + m), ("c", n))
            for k in range(1, m + 1):
                yield 1, (("bdag", m - k), ("cdag", k))
            for k in f:
                if k >= 0:
                    yield 1, (("bdag", k + m), ("b", k))
        else:
            for k in f:
                if k < -m:
                    yield 1, (("bdag", k + m), ("b", k))
            for k in range(-m, 0):
                yield 1, (("c", -k - m), ("b", k))
            for j in a:
                if j <= -m:
                    yield -1, (("cdag", j + m), ("c", j))
    else:
        n = -m
        if species == "R":
            for k in a:
                if k > n:
                    yield -1, (("cdag", k - n), ("c", k))
            for k in range(1, n + 1):
                yield 1, (("c", k), ("b", n - k))
            for j in f:
                if j >= n:
                    yield 1, (("bdag", j - n), ("b", j))
        else:
            for j in f:
                if j < 0:
                    yield 1, (("bdag", j - n), ("b", j))
            for k in range(-n, 0):
                yield 1, (("bdag", k), ("cdag", -k - n))
            for k in a:
                if k <= 0:
                    yield -1, (("cdag", k - n), ("c", k))


@lru_cache(maxsize=None)
def rho_action(species: str, m: int):
    """Exact action of ``rho_species(m)`` on an occupation record.

    The returned callable is shared per ``(species, m)`` and memoizes its
    results per state, since masks evaluate the same factors many times.
    """
    if species not in ("R", "L"):
        raise ValueError("species must be 'R' or 'L'")
    if m == 0:
        raise ValueError("m must be nonzero")

    @lru_cache(maxsize=400_000)
    def action(state: FockState) -> Dict[FockState, complex]:
        out: Dict[FockState, complex] = {}
        for coef, ops in _terms(species, m, state):
            r = apply_string(ops, state)
            if r is not None:
                out[r[1]] = out.get(r[1], 0) + coef * r[0]
        return {t: c for t, c in out.items() if c != 0}

    action.__name__ = f"rho_{species}({m})"
    return action


def rho_matrix(species: str, m: int, catalog: BasisCatalog) -> sp.csr_matrix:
    return assemble(rho_action(species, m), catalog)


@dataclass(eq=False)
class DensityFamily:
    """Lazily cached ``rho`` matrices over one catalog."""

    catalog: BasisCatalog
    _cache: Dict[Tuple[str, int], sp.csr_matrix] = field(default_factory=dict, repr=False)

    def __call__(self, species: str, m: int) -> sp.csr_matrix:
        key = (species, m)
        mat = self._cache.get(key)
        if mat is None:
            mat = rho_matrix(species, m, self.catalog)
            self._cache[key] = mat
        return mat

    @property
    def max_shift(self) -> int:
        return 2 * self.catalog.window.lam


def _family(catalog, family):
    if family is None:
        return DensityFamily(catalog)
    if family.catalog is not catalog:
        raise ValueError("density family belongs to a different catalog")
    return family


def current_matrix(component: int, m: int, catalog: BasisCatalog, L: float = 2 * math.pi,
                   family: Optional[DensityFamily] = None) -> sp.csr_matrix:
    """Fourier mode ``j^component(m)`` of the vector current."""
    if m == 0:
        raise ValueError("m must be nonzero")
    rho = _family(catalog, family)
    if component == 0:
        return (rho("R", -m) + rho("L", -m)) / L
    if component == 1:
        return (rho("R", -m) - rho("L", -m)) / L
    raise ValueError("component must be 0 or 1")


def t_words(cutoff: int):
    words = []
    for m in range(1, cutoff + 1):
        words.append((rho_action("R", m), rho_action("R", -m)))
        words.append((rho_action("L", -m), rho_action("L", m)))
    return words


def t_matrix(catalog: BasisCatalog, m_sum_cutoff: Optional[int] = None, L: float = 2 * math.pi,
             family: Optional[DensityFamily] = None) -> sp.csr_matrix:
    """``T = (2 pi / L) sum_m (rho_R(m) rho_R(-m) + rho_L(-m) rho_L(m))``."""
    rho = _family(catalog, family)
    cutoff = rho.max_shift if m_sum_cutoff is None else m_sum_cutoff
    if cutoff > rho.max_shift:
        raise ValueError(f"m_sum_cutoff {cutoff} exceeds 2*lam = {rho.max_shift}")
    n = len(catalog)
    total = sp.csr_matrix((n, n), dtype=complex)
    for m in range(1, cutoff + 1):
        total = total + rho("R", m) @ rho("R", -m) + rho("L", -m) @ rho("L", m)
    return (2 * math.pi / L) * total


def kronig_residual(catalog: BasisCatalog, inner_mask: Optional[np.ndarray] = None,
                    L: float = 2 * math.pi, family: Optional[DensityFamily] = None) -> float:
    """Largest column norm of ``H_D - T - (pi/2L) Q5 (Q5 - 2)`` over the mask."""
    if inner_mask is None:
        inner_mask = exact_columns(catalog, t_words(2 * catalog.window.lam))
    cols = np.flatnonzero(inner_mask)
    if cols.size == 0:
        raise ValueError("empty inner mask")
    q5 = np.array([charge_q5(s) for s in catalog], dtype=float)
    offset = sp.diags(math.pi / (2 * L) * q5 * (q5 - 2))
    resid = free_dirac_matrix(catalog, L) - t_matrix(catalog, L=L, family=family) - offset
    sub = resid[:, cols]
    return float(np.sqrt(np.asarray(abs(sub).power(2).sum(axis=0))).max(initial=0.0))


def _a_coeff(m: int, dagger: bool):
    n = abs(m)
    s = n ** -0.5
    if m > 0:
        return (-1j * s, ("R", m)) if dagger else (1j * s, ("R", -m))
    return (1j * s, ("L", -n)) if dagger else (-1j * s, ("L", n))


def a_ladder_action(m: int, dagger: bool):
    coef, (species, mode) = _a_coeff(m, dagger)
    rho = rho_action(species, mode)

    def action(state):
        return {t: coef * c for t, c in rho(state).items()}
    return action


def a_ladder_matrix(m: int, dagger: bool, catalog: BasisCatalog,
                    family: Optional[DensityFamily] = None) -> sp.csr_matrix:
    """Boson ladder ``A_m`` (or its adjoint) in the fermionic representation."""
    if m == 0:
        raise ValueError("m must be nonzero")
    coef, (species, mode) = _a_coeff(m, dagger)
    return coef * _family(catalog, family)(species, mode)


def phi_pi_matrix(which: str, m: int, catalog: BasisCatalog, L: float = 2 * math.pi,
                  family: Optional[DensityFamily] = None) -> sp.csr_matrix:
    """Scalar-field Fourier modes; the zero modes live on the gauge grid."""
    if m == 0:
        raise ValueError("m = 0 modes are gauge-grid operators")
    if which in ("Phi", "phi"):
        k = 2 * math.pi * m / L
        return (-math.sqrt(math.pi) / (1j * k)) * current_matrix(0, m, catalog, L, family)
    if which in ("Pi", "pi"):
        return math.sqrt(math.pi) * current_matrix(1, m, catalog, L, family)
    raise ValueError("which must be 'Phi' or 'Pi'")


def commutator_mask(catalog: BasisCatalog, left, right) -> np.ndarray:
    """Columns where the truncated ``[left, right]`` equals the exact commutator."""
    return exact_columns(catalog, [(left, right), (right, left)])


def q5_commutes(catalog: BasisCatalog, mat: sp.csr_matrix) -> float:
    q5 = q5_matrix(catalog)
    d = abs(q5 @ mat - mat @ q5)
    return float(d.max()) if d.nnz else 0.0
