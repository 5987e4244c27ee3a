"""Gauge zero mode on a grid with twisted-periodic boundary conditions.

The zero mode ``a`` lives on the circle ``[0, 2 pi / L)`` sampled at
``a_j = j h``, ``h = (2 pi / L) / M``.  A state is a function ``Psi(a)`` with
values in a *sector* space (pure axial sectors ``Omega_P``, the boson basis,
or a fermionic catalog) subject to

    Psi(2 pi / L) = exp(-2 i theta) Gamma^-1 Psi(0).

Combined vectors are stored grid-major: flat index ``j * D + s`` for grid
point ``j`` and sector index ``s``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .bosonrep import BosonCatalog, BosonState
from .coulomb import BogoliubovSpec, Dressing
from .densities import DensityFamily, PhysicalConstants, t_matrix
from .fock import (BasisCatalog, charge_q5, dirac_energy, free_dirac_matrix, unexcited_state)
from .modular import gauge_matrix
from .solver import EigenRequest, lowest_eigenpairs

__all__ = ["GridSpec", "TwistOperatorPair", "Sector", "CombinedVector", "p_sector",
           "boson_sector", "fock_sector", "twisted_laplacian", "twisted_difference",
           "assemble_h0_fermionic", "assemble_h0_bosonized", "assemble_full_dressed",
           "analytic_vacuum", "vacuum_profile", "zero_mode_operators", "a_multiplication",
           "dressed_spectrum", "periodicity_residual", "write_csv", "TwistError"]


class TwistError(ValueError):
    """The sector twist is not unitary, so the grid operators would not be Hermitian."""


@dataclass(frozen=True)
class GridSpec:
    points: int
    L: float = 2 * math.pi
    theta: float = 0.0

    def __post_init__(self):
        if self.points < 8:
            raise ValueError("grid needs at least 8 points")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.L

    @property
    def h(self) -> float:
        return self.period / self.points

    @property
    def a(self) -> np.ndarray:
        return np.arange(self.points) * self.h

    def with_points(self, points: int) -> "GridSpec":
        return GridSpec(points, self.L, self.theta)


@dataclass(frozen=True, eq=False)
class TwistOperatorPair:
    """Sector matrices of ``Gamma`` and ``Gamma^-1`` with the twist phase."""

    gamma: sp.csr_matrix
    gamma_inv: sp.csr_matrix
    theta: float = 0.0

    @classmethod
    def identity(cls, dim: int, theta: float = 0.0) -> "TwistOperatorPair":
        eye = sp.identity(dim, dtype=complex, format="csr")
        return cls(eye, eye, theta)

    def unitarity_defect(self) -> float:
        d = self.gamma_inv - self.gamma.conj().T
        return float(abs(d).max()) if d.nnz else 0.0

    @property
    def forward(self) -> sp.csr_matrix:
        """Block standing in for ``Psi_M`` in terms of ``Psi_0``."""
        return np.exp(-2j * self.theta) * self.gamma_inv

    @property
    def backward(self) -> sp.csr_matrix:
        """Block standing in for ``Psi_{-1}`` in terms of ``Psi_{M-1}``."""
        return np.exp(2j * self.theta) * self.gamma


@dataclass(frozen=True, eq=False)
class Sector:
    """A sector space together with the data the grid operators need.

    ``kinetic`` is the density bilinear ``T`` (zero on pure axial sectors,
    the free boson energy on the boson basis), ``dirac`` the free Dirac
    energy where it is available and ``dressed_energy`` the dressed boson
    energy on the boson basis.
    """

    kind: str
    q5: np.ndarray
    labels: np.ndarray
    gamma: sp.csr_matrix
    kinetic: sp.csr_matrix
    dirac: Optional[sp.csr_matrix] = None
    dressed_energy: Optional[np.ndarray] = None
    vacua: Dict[int, int] = field(default_factory=dict)
    catalog: object = None

    @property
    def dim(self) -> int:
        return len(self.q5)

    def twist(self, theta: float = 0.0) -> TwistOperatorPair:
        return TwistOperatorPair(self.gamma, sp.csr_matrix(self.gamma.conj().T), theta)


def _shift_matrix(index_of, keys) -> sp.csr_matrix:
    """Map each key ``(P, rest)`` to ``(P - 1, rest)`` when present."""
    rows, cols = [], []
    for j, key in enumerate(keys):
        i = index_of.get((key[0] - 1,) + tuple(key[1:]))
        if i is not None:
            rows.append(i)
            cols.append(j)
    n = len(keys)
    return sp.csr_matrix((np.ones(len(rows), dtype=complex), (rows, cols)), shape=(n, n))


def p_sector(p_window: int, L: float = 2 * math.pi) -> Sector:
    """The span of ``Omega_P`` for ``|P| <= p_window``; ``T`` vanishes here."""
    if p_window < 0:
        raise ValueError("p_window must be nonnegative")
    ps = np.arange(-p_window, p_window + 1)
    keys = [(int(P),) for P in ps]
    gamma = _shift_matrix({k: i for i, k in enumerate(keys)}, keys)
    n = len(ps)
    dirac = sp.diags([dirac_energy(unexcited_state(int(P)), L) for P in ps]).astype(complex)
    return Sector("P", 2.0 * ps, ps.copy(), gamma, sp.csr_matrix((n, n), dtype=complex),
                  sp.csr_matrix(dirac), None, {int(P): i for i, P in enumerate(ps)})


def boson_sector(boson: BosonCatalog, constants: PhysicalConstants = PhysicalConstants()) -> Sector:
    keys = [(s.P,) + s.occupations for s in boson]
    gamma = _shift_matrix({k: i for i, k in enumerate(keys)}, keys)
    free = sp.diags(boson.energies(constants, dressed=False)).astype(complex)
    vac = {}
    zero = tuple([0] * 2 * boson.lam_b)
    for P in boson.p_values:
        i = boson.lookup.get(BosonState(P, zero))
        if i is not None:
            vac[P] = i
    return Sector("boson", np.array([2.0 * s.P for s in boson]),
                  np.arange(len(boson)), gamma, sp.csr_matrix(free), None,
                  boson.energies(constants, dressed=True), vac, boson)


def fock_sector(catalog: BasisCatalog, L: float = 2 * math.pi,
                family: Optional[DensityFamily] = None) -> Sector:
    gamma, _ = gauge_matrix(1, catalog)
    vac = {}
    for P in range(-catalog.window.max_pairs, catalog.window.max_pairs + 1):
        s = unexcited_state(P)
        if s in catalog.lookup:
            vac[P] = catalog.index(s)
    return Sector("fock", np.array([charge_q5(s) for s in catalog], dtype=float),
                  np.arange(len(catalog)), sp.csr_matrix(gamma),
                  t_matrix(catalog, L=L, family=family), free_dirac_matrix(catalog, L),
                  None, vac, catalog)


def _check_twist(twist: TwistOperatorPair, dim: int):
    if twist.gamma.shape != (dim, dim) or twist.gamma_inv.shape != (dim, dim):
        raise ValueError("twist blocks do not match the sector dimension")
    defect = twist.unitarity_defect()
    if defect > 1e-12:
        raise TwistError(f"Gamma^-1 differs from Gamma^+ by {defect:.2e}")


def _wrapped_stencil(grid: GridSpec, twist: TwistOperatorPair, dim: int,
                     upper: complex, lower: complex, diag: complex) -> sp.csr_matrix:
    _check_twist(twist, dim)
    M = grid.points
    eye = sp.identity(dim, dtype=complex, format="csr")
    up = sp.diags(np.ones(M - 1), 1, shape=(M, M))
    out = upper * sp.kron(up, eye) + lower * sp.kron(up.T, eye)
    if diag:
        out = out + diag * sp.identity(M * dim, dtype=complex)
    corner_hi = sp.csr_matrix(([1.0], ([M - 1], [0])), shape=(M, M))
    corner_lo = sp.csr_matrix(([1.0], ([0], [M - 1])), shape=(M, M))
    out = out + upper * sp.kron(corner_hi, twist.forward) + lower * sp.kron(corner_lo, twist.backward)
    return sp.csr_matrix(out)


def twisted_laplacian(grid: GridSpec, twist: TwistOperatorPair, sector_dim: int) -> sp.csr_matrix:
    """Second difference ``(Psi_{j+1} - 2 Psi_j + Psi_{j-1}) / h^2`` with twisted wraparound."""
    h2 = grid.h ** 2
    return _wrapped_stencil(grid, twist, sector_dim, 1 / h2, 1 / h2, -2 / h2)


def twisted_difference(grid: GridSpec, twist: TwistOperatorPair, sector_dim: int) -> sp.csr_matrix:
    """Central first difference ``(Psi_{j+1} - Psi_{j-1}) / 2h``, anti-Hermitian."""
    return _wrapped_stencil(grid, twist, sector_dim, 1 / (2 * grid.h), -1 / (2 * grid.h), 0)


def a_multiplication(grid: GridSpec, sector_dim: int) -> sp.csr_matrix:
    return sp.csr_matrix(sp.kron(sp.diags(grid.a), sp.identity(sector_dim))).astype(complex)


def _q5reg_diag(grid: GridSpec, sector: Sector) -> np.ndarray:
    """``Q5 - a L / pi - 1`` on the flat grid-major index."""
    return (sector.q5[None, :] - grid.a[:, None] * grid.L / math.pi - 1).ravel()


def _kinetic_a(grid, sector, constants, twist):
    twist = sector.twist(grid.theta) if twist is None else twist
    return -(constants.e ** 2 / (2 * constants.L)) * twisted_laplacian(grid, twist, sector.dim)


def _check_L(grid: GridSpec, constants: PhysicalConstants):
    if not math.isclose(grid.L, constants.L):
        raise ValueError(f"grid L={grid.L} differs from constants L={constants.L}")


def assemble_h0_fermionic(grid: GridSpec, sector: Sector,
                          constants: PhysicalConstants = PhysicalConstants(),
                          twist: Optional[TwistOperatorPair] = None) -> sp.csr_matrix:
    """``-(e^2/2L) Lap + H_D - a^2 L / 2 pi - a Q5reg(a)``."""
    _check_L(grid, constants)
    if sector.dirac is None:
        raise ValueError(f"{sector.kind} sector carries no free Dirac energy")
    M, L = grid.points, constants.L
    a = np.repeat(grid.a, sector.dim)
    pot = -a ** 2 * L / (2 * math.pi) - a * _q5reg_diag(grid, sector)
    return sp.csr_matrix(_kinetic_a(grid, sector, constants, twist)
                         + sp.kron(sp.identity(M), sector.dirac) + sp.diags(pot))


def assemble_h0_bosonized(grid: GridSpec, sector: Sector,
                          constants: PhysicalConstants = PhysicalConstants(),
                          twist: Optional[TwistOperatorPair] = None) -> sp.csr_matrix:
    """``-(e^2/2L) Lap + (pi/2L) Q5reg(a)^2 + T``."""
    _check_L(grid, constants)
    pot = math.pi / (2 * constants.L) * _q5reg_diag(grid, sector) ** 2
    out = _kinetic_a(grid, sector, constants, twist) + sp.diags(pot)
    if sector.kinetic.nnz:
        out = out + sp.kron(sp.identity(grid.points), sector.kinetic)
    return sp.csr_matrix(out)


def assemble_full_dressed(grid: GridSpec, sector: Sector, spec: BogoliubovSpec,
                          twist: Optional[TwistOperatorPair] = None) -> sp.csr_matrix:
    """``-(e^2/2L) Lap + (pi/2L) Q5reg(a)^2 + sum_m w_m A+_m A_m + C0`` on a boson sector."""
    if sector.dressed_energy is None:
        raise ValueError("the dressed Hamiltonian is assembled on a boson sector")
    constants = spec.constants
    _check_L(grid, constants)
    pot = math.pi / (2 * constants.L) * _q5reg_diag(grid, sector) ** 2
    boson = np.tile(sector.dressed_energy, grid.points) + spec.c0
    return sp.csr_matrix(_kinetic_a(grid, sector, constants, twist) + sp.diags(pot + boson))


def dressed_spectrum(grid: GridSpec, boson: BosonCatalog, spec: BogoliubovSpec, k: int = 6,
                     zero_mode_levels: Optional[int] = None):
    """Lowest ``k`` levels of the dressed Hamiltonian via its block structure.

    The twist preserves occupations, so each occupation pattern ``n`` spans an
    invariant block equal to the zero-mode problem shifted by ``E_n + C0``.
    Returns ``(levels, zero_mode_levels)``.
    """
    nz = k if zero_mode_levels is None else zero_mode_levels
    zsec = p_sector_from(boson, spec.constants.L)
    zero = lowest_eigenpairs(EigenRequest(assemble_h0_bosonized(grid, zsec, spec.constants),
                                          k=nz, tol=1e-11))[0]
    zero_occ = tuple([0] * 2 * boson.lam_b)
    pats = sorted({s.occupations for s in boson})
    w = np.array([spec.constants.omega(m) for m in boson.modes])
    ex = np.array([np.dot(w, o) if o != zero_occ else 0.0 for o in pats])
    levels = np.sort((zero[None, :] + ex[:, None]).ravel())[:k] + spec.c0
    return levels, zero


def p_sector_from(boson: BosonCatalog, L: float) -> Sector:
    ps = boson.p_values
    if list(ps) != list(range(ps[0], ps[-1] + 1)) or ps[0] != -ps[-1]:
        raise ValueError("boson P-range must be symmetric and contiguous")
    return p_sector(ps[-1], L)


@dataclass(eq=False)
class CombinedVector:
    """Amplitudes ``Psi(a_j)_s`` of shape ``(points, sector dim)``."""

    grid: GridSpec
    sector: Sector
    amplitudes: np.ndarray

    @property
    def flat(self) -> np.ndarray:
        return self.amplitudes.ravel()

    @classmethod
    def from_flat(cls, grid, sector, vec) -> "CombinedVector":
        return cls(grid, sector, np.asarray(vec, dtype=complex).reshape(grid.points, sector.dim))

    def inner(self, other: "CombinedVector") -> complex:
        return complex(self.grid.h * np.vdot(self.flat, other.flat))

    def norm(self) -> float:
        return math.sqrt(self.inner(self).real)

    def normalized(self) -> "CombinedVector":
        return CombinedVector(self.grid, self.sector, self.amplitudes / self.norm())


def vacuum_profile(x, constants: PhysicalConstants = PhysicalConstants()):
    """``f(x) = L^(1/4) pi^(-3/8) e^(-1/4) exp(-L x^2 / (2 sqrt(pi) e))``."""
    L, e = constants.L, constants.e
    norm = L ** 0.25 * math.pi ** -0.375 * e ** -0.25
    return norm * np.exp(-L * np.asarray(x) ** 2 / (2 * math.sqrt(math.pi) * e))


def analytic_vacuum(grid: GridSpec, sector: Sector,
                    constants: PhysicalConstants = PhysicalConstants(),
                    dressed: bool = False, dressing: Optional[Dressing] = None,
                    at_period: bool = False) -> CombinedVector:
    """Gaussian comb ``sum_P f(a - (2 pi / L)(P - 1/2)) Omega_P``.

    On a fermionic sector ``dressed=True`` replaces ``Omega_P`` by
    ``U^-1 Omega_P`` (a ``dressing`` is required).  The boson basis is
    already the dressed basis, so there the flag changes nothing.  With
    ``at_period`` the single slice at ``a = 2 pi / L`` is returned as an
    array instead (for the boundary-condition check).
    """
    if len(sector.vacua) < 7:
        raise ValueError("analytic vacuum needs |P| <= 3 at least")
    _check_L(grid, constants)
    a = np.array([grid.period]) if at_period else grid.a
    amps = np.zeros((len(a), sector.dim), dtype=complex)
    for P, idx in sector.vacua.items():
        prof = vacuum_profile(a - grid.period * (P - 0.5), constants)
        if dressed and sector.kind == "fock":
            if dressing is None:
                raise ValueError("dressed fermionic vacuum needs a Dressing")
            col = dressing.apply(np.eye(sector.dim, dtype=complex)[idx], -1)
            amps += prof[:, None] * col[None, :]
        else:
            amps[:, idx] += prof
    if at_period:
        return amps[0]
    return CombinedVector(grid, sector, amps)


def zero_mode_operators(grid: GridSpec, sector: Sector,
                        constants: PhysicalConstants = PhysicalConstants(),
                        twist: Optional[TwistOperatorPair] = None):
    """``(E_tr, Phi_0, Pi_0)`` with ``E_tr = -(i e^2 / L) d/da``."""
    _check_L(grid, constants)
    twist = sector.twist(grid.theta) if twist is None else twist
    e, L = constants.e, constants.L
    e_tr = -1j * e ** 2 / L * twisted_difference(grid, twist, sector.dim)
    phi0 = math.sqrt(math.pi) / e ** 2 * e_tr
    pi0 = sp.diags(math.sqrt(math.pi) / L * _q5reg_diag(grid, sector)).astype(complex)
    return sp.csr_matrix(e_tr), sp.csr_matrix(phi0), sp.csr_matrix(pi0)


def periodicity_residual(grid: GridSpec, sector: Sector,
                         constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Largest ``|V(2 pi / L) Gamma^-1 - Gamma^-1 V(0)|`` for the bosonized potential.

    This is what makes the potential compatible with the twisted boundary
    condition: a large gauge shift of ``a`` is undone by ``Gamma``.
    """
    g_inv = sector.twist().gamma_inv
    q_end = sector.q5 - grid.period * constants.L / math.pi - 1
    q_0 = sector.q5 - 1
    c = math.pi / (2 * constants.L)
    d = sp.diags(c * q_end ** 2) @ g_inv - g_inv @ sp.diags(c * q_0 ** 2)
    return float(abs(d).max()) if d.nnz else 0.0


def write_csv(path, vector: CombinedVector, label: Optional[Sequence] = None):
    """Rows ``(a, sector label, Re, Im)`` for every stored amplitude."""
    labels = vector.sector.labels if label is None else label
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "sector" if vector.sector.kind != "P" else "P", "re", "im"])
        for j, a in enumerate(vector.grid.a):
            for s in range(vector.sector.dim):
                z = vector.amplitudes[j, s]
                w.writerow([f"{a:.12g}", int(labels[s]), f"{z.real:.12g}", f"{z.imag:.12g}"])
