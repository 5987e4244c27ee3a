"""Normal-ordered Coulomb energy and its Bogoliubov dressing.

With ``lambda = e^2/2`` and ``V_m = k_m^-2`` the dressing angle solves
``lambda V_m / (lambda V_m + pi) = -tanh(2 zeta(m))`` and the generator

    Z = (2 pi i / L) sum_{m != 0} (zeta(m) / k_m) rho_R(m) rho_L(-m)

gives ``U = exp(iZ)``.  In boson language ``Z = sum_{m>0} i zeta_m
(A+_m A+_{-m} - A_m A_{-m})``, a two-mode squeeze per momentum pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .densities import DensityFamily, PhysicalConstants, _family, rho_action, t_matrix
from .fock import BasisCatalog, charge_q5, unexcited_state
from .solver import HermitianExponential

__all__ = ["BogoliubovSpec", "WindowTooSmall", "coulomb_terms", "coulomb_words",
           "coulomb_matrix", "zeta_coefficient", "z_matrix", "Dressing",
           "bogoliubov_apply", "c0_constant", "c0_summand", "dressed_state",
           "hprime_matrix", "total_momentum", "sector_levels", "momentum_gap"]


class WindowTooSmall(ValueError):
    pass


def zeta_coefficient(m: int, constants: PhysicalConstants) -> float:
    if m == 0:
        raise ValueError("m must be nonzero")
    lv = 0.5 * constants.e ** 2 / constants.k(m) ** 2
    return -0.5 * math.atanh(lv / (lv + math.pi))


def c0_summand(m: int, constants: PhysicalConstants) -> float:
    """``k_m [sqrt(1 + x) - x/2 - 1]`` with ``x = 2 lambda V_m / pi``, cancellation-free."""
    k = constants.k(m)
    x = constants.e ** 2 / (math.pi * k * k)
    return -k * x * x / (2 * (math.sqrt(1 + x) + 1) ** 2)


def c0_constant(constants: PhysicalConstants, m_cutoff: int) -> float:
    """Vacuum energy shift from the dressing, summed over ``1 <= m <= m_cutoff``."""
    if m_cutoff < 1:
        raise ValueError("m_cutoff must be >= 1")
    return math.fsum(c0_summand(m, constants) for m in range(1, m_cutoff + 1))


@dataclass(frozen=True)
class BogoliubovSpec:
    constants: PhysicalConstants
    m_cutoff: int

    @property
    def lam(self) -> float:
        return 0.5 * self.constants.e ** 2

    def V(self, m: int) -> float:
        return self.constants.k(m) ** -2

    def zeta(self, m: int) -> float:
        return zeta_coefficient(m, self.constants)

    @property
    def c0(self) -> float:
        return c0_constant(self.constants, self.m_cutoff)


def coulomb_terms(m_cutoff: int) -> List[Tuple[int, Tuple[Tuple[str, int], ...]]]:
    """Normal-ordered density products making up ``:j0(-m) j0(m):`` for each mode.

    The ``-|m|`` subtraction is absorbed by moving the annihilating factor to
    the right, which is exact in the full Fock space and keeps the truncated
    vacuum expectation at zero.
    """
    terms = []
    for m in range(1, m_cutoff + 1):
        for sgn in (m, -m):
            if sgn > 0:
                prods = ((("R", m), ("R", -m)), (("L", m), ("R", -m)),
                         (("R", m), ("L", -m)), (("L", -m), ("L", m)))
            else:
                prods = ((("R", m), ("R", -m)), (("L", -m), ("R", m)),
                         (("R", -m), ("L", m)), (("L", -m), ("L", m)))
            for p in prods:
                terms.append((sgn, p))
    return terms


def coulomb_words(m_cutoff: int):
    return [tuple(rho_action(s, k) for s, k in p) for _, p in coulomb_terms(m_cutoff)]


def coulomb_matrix(catalog: BasisCatalog, m_cutoff: Optional[int] = None,
                   constants: PhysicalConstants = PhysicalConstants(),
                   family: Optional[DensityFamily] = None) -> sp.csr_matrix:
    """``:H_coul: = (e^2 L / 2) sum_m k_m^-2 :j0(-m) j0(m):``."""
    rho = _family(catalog, family)
    cutoff = rho.max_shift if m_cutoff is None else m_cutoff
    if cutoff > rho.max_shift:
        raise ValueError(f"m_cutoff {cutoff} exceeds 2*lam = {rho.max_shift}")
    L, e = constants.L, constants.e
    n = len(catalog)
    total = sp.csr_matrix((n, n), dtype=complex)
    for m, ((s1, k1), (s2, k2)) in coulomb_terms(cutoff):
        coef = e * e / (2 * L * constants.k(m) ** 2)
        total = total + coef * (rho(s1, k1) @ rho(s2, k2))
    return total


def hprime_matrix(catalog: BasisCatalog, constants: PhysicalConstants = PhysicalConstants(),
                  m_cutoff: Optional[int] = None,
                  family: Optional[DensityFamily] = None) -> sp.csr_matrix:
    """``T + :H_coul:`` on the fermionic catalog."""
    rho = _family(catalog, family)
    return (t_matrix(catalog, m_cutoff, constants.L, rho)
            + coulomb_matrix(catalog, m_cutoff, constants, rho))


def total_momentum(state) -> int:
    """Sum of all occupied mode labels; ``T`` and ``:H_coul:`` conserve it."""
    return sum(state.fermions) + sum(state.antifermions)


def sector_levels(H: sp.csr_matrix, catalog: BasisCatalog, q5: int, K: int, k: int = 2):
    """Lowest ``k`` eigenvalues of ``H`` in the block of fixed ``Q5`` and momentum."""
    idx = [i for i, s in enumerate(catalog) if charge_q5(s) == q5 and total_momentum(s) == K]
    if not idx:
        raise WindowTooSmall(f"empty sector Q5={q5}, K={K}")
    sub = sp.csr_matrix(H)[idx][:, idx].toarray()
    return la.eigh((sub + sub.conj().T) / 2, eigvals_only=True)[: min(k, len(idx))]


def momentum_gap(catalog: BasisCatalog, constants: PhysicalConstants = PhysicalConstants(),
                 family: Optional[DensityFamily] = None) -> float:
    """Lowest ``T + :H_coul:`` level at unit momentum minus the zero-momentum ground level.

    In the neutral ``Q5 = 0`` sector this is the one-boson level ``w_1``
    approached from above as the mode window grows.
    """
    H = hprime_matrix(catalog, constants, family=family)
    return float(sector_levels(H, catalog, 0, 1, 1)[0] - sector_levels(H, catalog, 0, 0, 1)[0])


def z_matrix(catalog: BasisCatalog, spec: BogoliubovSpec,
             family: Optional[DensityFamily] = None, tol: float = 1e-10) -> sp.csr_matrix:
    rho = _family(catalog, family)
    cutoff = spec.m_cutoff
    if cutoff > rho.max_shift:
        raise WindowTooSmall(f"dressing cutoff {cutoff} exceeds 2*lam = {rho.max_shift}")
    L = spec.constants.L
    n = len(catalog)
    Z = sp.csr_matrix((n, n), dtype=complex)
    for m in range(1, cutoff + 1):
        for sgn in (m, -m):
            coef = 2j * math.pi / L * spec.zeta(sgn) / spec.constants.k(sgn)
            Z = Z + coef * (rho("R", sgn) @ rho("L", -sgn))
    resid = abs(Z - Z.conj().T).max() if Z.nnz else 0.0
    if resid > tol:
        raise WindowTooSmall(f"Z hermiticity residual {resid:.2e}")
    return sp.csr_matrix((Z + Z.conj().T) / 2)


class Dressing:
    """``U = exp(iZ)`` on one catalog, with cached spectral blocks."""

    def __init__(self, catalog: BasisCatalog, spec: BogoliubovSpec,
                 family: Optional[DensityFamily] = None):
        self.catalog = catalog
        self.spec = spec
        self.family = _family(catalog, family)

    @cached_property
    def Z(self) -> sp.csr_matrix:
        return z_matrix(self.catalog, self.spec, self.family)

    @cached_property
    def _exp(self) -> HermitianExponential:
        return HermitianExponential(self.Z)

    def apply(self, vector, direction: int = 1) -> np.ndarray:
        """``U^direction @ vector``."""
        if direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        return self._exp(vector, float(direction))

    def dressed_state(self, P: int) -> np.ndarray:
        omega = unexcited_state(P, self.catalog.window)
        return self.apply(self.catalog.basis_vector(omega), -1)


def bogoliubov_apply(state_vector, direction: int, dressing: Dressing) -> np.ndarray:
    return dressing.apply(state_vector, direction)


def dressed_state(P: int, spec: BogoliubovSpec, catalog: BasisCatalog,
                  family: Optional[DensityFamily] = None) -> np.ndarray:
    """Dressed unexcited state ``U^-1 Omega_P`` as catalog amplitudes."""
    return Dressing(catalog, spec, family).dressed_state(P)
