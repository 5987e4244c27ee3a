"""Bosonic oscillator representation and its dictionary to the fermions.

Basis vectors are ``Omega_P^n``: an axial sector ``P`` (``Q5 = 2P``) and boson
occupations ``n_m`` for ``0 < |m| <= lam_b``.  Positive ``m`` labels the
right-moving modes created by ``rho_R(m)``, negative ``m`` the left-moving ones
created by ``rho_L(m)``.  The dressed Hamiltonian is diagonal here, so this is
the production path for spectra; the fermionic side validates it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .coulomb import c0_constant, coulomb_words, hprime_matrix, zeta_coefficient
from .densities import DensityFamily, PhysicalConstants, a_ladder_action, t_words
from .fock import (BasisCatalog, CapacityError, ModeOutOfWindow, apply_action,
                   exact_columns, unexcited_state)

__all__ = ["BosonState", "BosonCatalog", "boson_enumerate", "boson_ladder_matrix",
           "boson_number_matrix", "boson_hprime_matrix", "boson_phi_pi",
           "anomaly_residual", "Dictionary", "dictionary_map", "WindowViolation",
           "pair_bogoliubov_block", "dressed_quadratic_elements",
           "representation_equivalence"]


class WindowViolation(ModeOutOfWindow):
    """A dictionary image does not fit in the fermionic catalog."""


class BosonState(NamedTuple):
    P: int
    occupations: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.occupations)


@dataclass(frozen=True, eq=False)
class BosonCatalog:
    lam_b: int
    degree: int
    p_values: Tuple[int, ...]
    states: Tuple[BosonState, ...]
    lookup: Dict[BosonState, int] = field(repr=False)

    @property
    def modes(self) -> Tuple[int, ...]:
        return tuple(range(-self.lam_b, 0)) + tuple(range(1, self.lam_b + 1))

    def slot(self, m: int) -> int:
        if m == 0 or abs(m) > self.lam_b:
            raise ValueError(f"mode {m} outside 0 < |m| <= {self.lam_b}")
        return m + self.lam_b if m < 0 else m + self.lam_b - 1

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, s):
        return s in self.lookup

    def index(self, s: BosonState) -> int:
        return self.lookup[s]

    def energies(self, constants: PhysicalConstants, dressed: bool = True) -> np.ndarray:
        """Excitation energy ``sum_m w_m n_m`` of each basis state."""
        w = np.array([constants.omega(m) if dressed else abs(constants.k(m))
                      for m in self.modes])
        occ = np.array([s.occupations for s in self.states], dtype=float).reshape(len(self), -1)
        return occ @ w if occ.size else np.zeros(len(self))


def _occupations(nslots: int, degree: int):
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nslots), d):
            occ = [0] * nslots
            for i in combo:
                occ[i] += 1
            yield tuple(occ)


def boson_enumerate(lam_b: int, degree: int, p_range: int = 0,
                    p_values: Optional[Iterable[int]] = None,
                    max_dim: int = 250_000) -> BosonCatalog:
    """All states with total occupation ``<= degree`` and ``|P| <= p_range``.

    Order: ascending ``P``, then ascending degree, then the order in which
    ``combinations_with_replacement`` fills the mode slots ``(-lam_b..-1, 1..lam_b)``.
    """
    if lam_b < 0 or degree < 0:
        raise ValueError("bounds must be nonnegative")
    ps = tuple(sorted(set(p_values))) if p_values is not None else tuple(range(-p_range, p_range + 1))
    nslots = 2 * lam_b
    per_p = math.comb(nslots + degree, degree) if nslots else 1
    if per_p * len(ps) > max_dim:
        raise CapacityError(f"boson catalog of {per_p * len(ps)} states exceeds {max_dim}")
    occs = list(_occupations(nslots, degree)) if nslots else [()]
    states = tuple(BosonState(P, o) for P in ps for o in occs)
    return BosonCatalog(lam_b, degree, ps, states, {s: i for i, s in enumerate(states)})


def boson_ladder_matrix(m: int, dagger: bool, catalog: BosonCatalog) -> sp.csr_matrix:
    slot = catalog.slot(m)
    rows, cols, vals = [], [], []
    for j, s in enumerate(catalog.states):
        occ = list(s.occupations)
        n = occ[slot]
        if dagger:
            occ[slot] = n + 1
            amp = math.sqrt(n + 1)
        else:
            if n == 0:
                continue
            occ[slot] = n - 1
            amp = math.sqrt(n)
        i = catalog.lookup.get(BosonState(s.P, tuple(occ)))
        if i is not None:
            rows.append(i)
            cols.append(j)
            vals.append(amp)
    N = len(catalog)
    return sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)), shape=(N, N))


def boson_number_matrix(catalog: BosonCatalog) -> sp.csr_matrix:
    return sp.diags(np.array([s.degree for s in catalog], dtype=complex), format="csr")


def boson_hprime_matrix(catalog: BosonCatalog, constants: PhysicalConstants = PhysicalConstants(),
                        c0_cutoff: int = 64) -> sp.csr_matrix:
    """Dressed ``H' = sum_m w_m A+_m A_m + C0``, diagonal in this basis."""
    c0 = c0_constant(constants, c0_cutoff) if constants.e > 0 else 0.0
    return sp.diags(catalog.energies(constants) + c0, format="csr").astype(complex)


def boson_phi_pi(m: int, which: str, catalog: BosonCatalog,
                 constants: PhysicalConstants = PhysicalConstants()) -> sp.csr_matrix:
    """Dressed scalar-field Fourier modes built from the oscillator ladders."""
    if m == 0:
        raise ValueError("m = 0 modes are gauge-grid operators")
    w, L = constants.omega(m), constants.L
    a = boson_ladder_matrix(m, False, catalog)
    bdag = boson_ladder_matrix(-m, True, catalog)
    if which in ("Phi", "phi"):
        return (a + bdag) / math.sqrt(2 * w * L)
    if which in ("Pi", "pi"):
        return -1j * math.sqrt(w / (2 * L)) * (a - bdag)
    raise ValueError("which must be 'Phi' or 'Pi'")


def _interior(catalog: BosonCatalog, m: int) -> np.ndarray:
    return np.array([s.degree <= catalog.degree - 1 for s in catalog])


def anomaly_residual(m: int, catalog: BosonCatalog,
                     constants: PhysicalConstants = PhysicalConstants(),
                     mass_term: bool = True, c0_cutoff: int = 64,
                     dense_limit: int = 1500) -> float:
    """Operator norm of ``i[H', Pi_m] + w^2 Phi_m`` on interior states.

    Above ``dense_limit`` interior columns the norm is replaced by the
    bound ``sqrt(||R||_1 ||R||_inf)``, which is never smaller.

    With ``mass_term=False`` the coefficient is ``k_m^2`` instead of
    ``k_m^2 + e^2/pi``, the classical (anomaly-free) wave equation.
    """
    cols = np.flatnonzero(_interior(catalog, m))
    if cols.size == 0:
        raise ValueError("empty interior: raise the degree bound")
    H = boson_hprime_matrix(catalog, constants, c0_cutoff)
    Pi = boson_phi_pi(m, "Pi", catalog, constants)
    Phi = boson_phi_pi(m, "Phi", catalog, constants)
    w2 = constants.omega(m) ** 2 if mass_term else constants.k(m) ** 2
    R = sp.csr_matrix((1j * (H @ Pi - Pi @ H) + w2 * Phi)[:, cols])
    if R.shape[1] <= dense_limit:
        return float(np.linalg.norm(R.toarray(), 2))
    # rigorous upper bound ||R||_2 <= sqrt(||R||_1 ||R||_inf) for large interiors
    absr = abs(R)
    return float(math.sqrt(absr.sum(axis=0).max() * absr.sum(axis=1).max()))


@dataclass(eq=False)
class Dictionary:
    """Linear map from a boson catalog into a fermionic catalog."""

    boson: BosonCatalog
    fock: BasisCatalog
    images: np.ndarray  # shape (len(fock), len(boson))

    def __call__(self, amplitudes) -> np.ndarray:
        return self.images @ np.asarray(amplitudes)

    def image(self, state: BosonState) -> np.ndarray:
        return self.images[:, self.boson.index(state)]

    def gram(self) -> np.ndarray:
        return self.images.conj().T @ self.images


def _image_combo(state: BosonState, modes: Sequence[int]):
    vec = {unexcited_state(state.P): 1.0}
    norm = 1.0
    for m, n in zip(modes, state.occupations):
        act = a_ladder_action(m, True)
        for _ in range(n):
            vec = apply_action(act, vec)
        norm *= math.factorial(n)
    return {s: c / math.sqrt(norm) for s, c in vec.items()}


def dictionary_map(P, lam_inner: int, degree: int, fock: BasisCatalog,
                   strict: bool = True) -> Dictionary:
    """Images ``prod_m (A+_m)^{n_m} Omega_P / sqrt(prod n_m!)`` in the fermionic basis.

    ``P`` may be an integer or an iterable of sectors.  The normalization is
    real, positive and independent of ``P``.  With ``strict`` any image that
    leaks out of ``fock`` raises :class:`WindowViolation`; otherwise leaking
    states are dropped from the boson catalog.
    """
    ps = (P,) if isinstance(P, (int, np.integer)) else tuple(P)
    boson = boson_enumerate(lam_inner, degree, p_values=ps)
    keep, columns = [], []
    for s in boson.states:
        combo = _image_combo(s, boson.modes)
        if any(t not in fock.lookup for t in combo):
            if strict:
                raise WindowViolation(f"image of {s} leaves the fermionic window")
            continue
        keep.append(s)
        columns.append(fock.to_vector(combo))
    if not strict:
        boson = BosonCatalog(boson.lam_b, boson.degree, boson.p_values, tuple(keep),
                             {s: i for i, s in enumerate(keep)})
    images = np.column_stack(columns) if columns else np.zeros((len(fock), 0), complex)
    return Dictionary(boson, fock, images)


def pair_bogoliubov_block(j: int, constants: PhysicalConstants, n_cut: int = 24):
    """``U^-1 w_j (N_j + N_-j) U`` on a two-mode space truncated at ``n_cut`` quanta each.

    Index ``a * n_cut + b`` holds ``a`` quanta in mode ``+j`` and ``b`` in ``-j``.
    """
    a = np.diag(np.sqrt(np.arange(1, n_cut)), 1)
    eye = np.eye(n_cut)
    A, B = np.kron(a, eye), np.kron(eye, a)
    zeta = zeta_coefficient(j, constants)
    Z = 1j * zeta * (A.T @ B.T - A @ B)
    w, v = la.eigh(Z)
    U = (v * np.exp(1j * w)) @ v.conj().T
    D = constants.omega(j) * (A.T @ A + B.T @ B)
    return U.conj().T @ D @ U


def dressed_quadratic_elements(boson: BosonCatalog, constants: PhysicalConstants,
                               m_cutoff: int, n_cut: int = 24) -> np.ndarray:
    """Matrix of ``U^-1 (sum_m w_m A+_m A_m + C0) U`` between boson basis states.

    Each momentum pair ``+-j`` is an independent two-mode squeeze, so matrix
    elements factorize over pairs.  Pairs beyond ``lam_b`` are unoccupied and
    only contribute their vacuum expectation to the diagonal.
    """
    N = len(boson)
    c0 = c0_constant(constants, m_cutoff)
    out = np.zeros((N, N), dtype=complex)
    blocks = {j: pair_bogoliubov_block(j, constants, n_cut) for j in range(1, m_cutoff + 1)}
    vac = sum(blocks[j][0, 0].real for j in range(boson.lam_b + 1, m_cutoff + 1))
    slots = {j: (boson.slot(j), boson.slot(-j)) for j in range(1, boson.lam_b + 1)}
    for c, s in enumerate(boson.states):
        for r, t in enumerate(boson.states):
            if s.P != t.P:
                continue
            val = 0.0
            for j, (sp_, sm) in slots.items():
                others_s = [x for i, x in enumerate(s.occupations) if i not in (sp_, sm)]
                others_t = [x for i, x in enumerate(t.occupations) if i not in (sp_, sm)]
                if others_s != others_t:
                    continue
                ia = s.occupations[sp_] * n_cut + s.occupations[sm]
                ib = t.occupations[sp_] * n_cut + t.occupations[sm]
                val += blocks[j][ib, ia]
            if r == c:
                val += vac + c0
            out[r, c] = val
    return out


def representation_equivalence(fock: BasisCatalog, constants: PhysicalConstants,
                               lam_inner: int, degree: int, p_values=(0,),
                               family: Optional[DensityFamily] = None, n_cut: int = 24):
    """Compare ``T + :H_coul:`` on dictionary images with the dressed boson form.

    Returns ``(max_abs_deviation, gram_deviation, n_interior)``.  Interior
    images are those whose whole support is column-exact for every density
    word of ``T + :H_coul:``.
    """
    cutoff = 2 * fock.window.lam
    dic = dictionary_map(p_values, lam_inner, degree, fock, strict=False)
    words = t_words(cutoff) + coulomb_words(cutoff)
    support = np.flatnonzero(np.abs(dic.images).sum(axis=1) > 0)
    exact = np.zeros(len(fock), dtype=bool)
    exact[support] = exact_columns(fock, words, support)[support]
    inner = [i for i in range(len(dic.boson))
             if exact[np.flatnonzero(np.abs(dic.images[:, i]) > 0)].all()]
    if not inner:
        raise ValueError("no interior dictionary states")
    H = hprime_matrix(fock, constants, cutoff, family)
    V = dic.images[:, inner]
    ferm = V.conj().T @ (H @ V)
    bos = dressed_quadratic_elements(dic.boson, constants, cutoff, n_cut)[np.ix_(inner, inner)]
    gram = np.abs(dic.gram() - np.eye(len(dic.boson))).max()
    return float(np.abs(ferm - bos).max()), float(gram), len(inner)
