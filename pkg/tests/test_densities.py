import math

import numpy as np
import pytest
import scipy.sparse as sp

from schwinger.densities import (DensityFamily, PhysicalConstants, a_ladder_action,
                                 a_ladder_matrix, commutator_mask, current_matrix,
                                 kronig_residual, phi_pi_matrix, q5_commutes, rho_action,
                                 t_matrix, t_words)
from schwinger.fock import (FockState, ModeWindow, apply_action, assemble, apply_string,
                            enumerate_basis, exact_columns, unexcited_state)
from schwinger import cli

L = 2 * math.pi


def _vec(cat, combo):
    return cat.to_vector(combo)


def test_annihilation_property():
    for P in range(-3, 4):
        s = unexcited_state(P)
        for m in range(1, 6):
            assert rho_action("R", -m)(s) == {}
            assert rho_action("L", m)(s) == {}


def test_hand_applications():
    vac = unexcited_state(0)
    assert rho_action("R", 1)(vac) == {FockState((0,), (1,)): 1}
    assert rho_action("L", -1)(vac) == {FockState((-1,), (0,)): 1}


def test_current_on_vacuum(small_catalog, small_family):
    j0 = current_matrix(0, 1, small_catalog, L, small_family)
    v = j0 @ small_catalog.basis_vector(unexcited_state(0))
    expect = small_catalog.basis_vector(FockState((-1,), (0,))) / L
    assert np.abs(v - expect).max() == 0


def test_current_adjoints(mid_catalog, mid_family):
    for m in (1, 2, 3):
        for comp in (0, 1):
            A = current_matrix(comp, m, mid_catalog, L, mid_family)
            B = current_matrix(comp, -m, mid_catalog, L, mid_family)
            assert abs(A.conj().T - B).max() <= 1e-15


def test_current_norm_on_unexcited_states(mid_catalog, mid_family):
    for P in (-1, 0, 1):
        v = mid_catalog.basis_vector(unexcited_state(P))
        for m in (1, 2, -1, -2):
            j = current_matrix(0, m, mid_catalog, L, mid_family) @ v
            assert np.vdot(j, j).real == pytest.approx(abs(m) / L ** 2, abs=1e-14)


def test_brute_force_matrix_elements():
    # closed-form elements on the smallest window: rho_R(1) = sum of three bilinear sums
    cat = enumerate_basis(ModeWindow(1, 2))
    M = assemble(rho_action("R", 1), cat).toarray()
    N = np.zeros_like(M)
    for j, s in enumerate(cat.states):
        for coef, ops in ([(-1, (("cdag", n + 1), ("c", n))) for n in (1,)]
                          + [(1, (("bdag", 0), ("cdag", 1)))]
                          + [(1, (("bdag", k + 1), ("b", k))) for k in (0,)]):
            r = apply_string(ops, s)
            if r is not None and r[1] in cat:
                N[cat.index(r[1]), j] += coef * r[0]
    assert np.array_equal(M, N)


def test_t_examples(mid_catalog, mid_family):
    T = t_matrix(mid_catalog, L=L, family=mid_family)
    for P in (-1, 0, 1):
        v = mid_catalog.basis_vector(unexcited_state(P))
        assert np.abs(T @ v).max() == 0
    v = mid_catalog.basis_vector(FockState((0,), (1,)))
    assert np.vdot(v, T @ v).real == pytest.approx(2 * math.pi / L, abs=1e-14)


def test_t_nonnegative(small_catalog, small_family):
    T = t_matrix(small_catalog, L=L, family=small_family)
    cols = np.flatnonzero(exact_columns(small_catalog, t_words(4)))
    w = np.linalg.eigvalsh(T.toarray()[np.ix_(cols, cols)])
    assert w.min() >= -1e-12


def test_kronig_on_unexcited_states():
    cat = enumerate_basis(ModeWindow(3, 2))
    fam = DensityFamily(cat)
    mask = np.zeros(len(cat), bool)
    for P in (-1, 0, 1):
        mask[cat.index(unexcited_state(P))] = True
    assert kronig_residual(cat, mask, L, fam) == 0


def test_kronig_full_catalog(mid_catalog, mid_family):
    assert kronig_residual(mid_catalog, None, L, mid_family) <= 1e-12
    assert kronig_residual(mid_catalog, None, 3.0, DensityFamily(mid_catalog)) <= 1e-12


def test_density_algebra(mid_catalog, mid_family):
    dev, ncols = cli.density_commutators(mid_catalog, mid_family, max_m=2)
    assert ncols > 0 and dev <= 1e-12


def test_ladders(mid_catalog, mid_family):
    n = len(mid_catalog)
    eye = sp.identity(n, format="csr")
    lad = {(m, d): a_ladder_matrix(m, d, mid_catalog, mid_family)
           for m in (1, -1, 2, -2) for d in (False, True)}
    for m in (1, -1, 2, -2):
        for mp in (1, -1, 2, -2):
            a = a_ladder_action(m, False)
            b = a_ladder_action(mp, True)
            cols = np.flatnonzero(commutator_mask(mid_catalog, a, b))
            assert cols.size > 0
            C = lad[m, False] @ lad[mp, True] - lad[mp, True] @ lad[m, False]
            d = (C - (m == mp) * eye)[:, cols]
            assert abs(d).max() <= 1e-12
    for P in (-1, 0, 1):
        v = mid_catalog.basis_vector(unexcited_state(P))
        for m in (1, -1, 2, -2):
            assert np.abs(lad[m, False] @ v).max() == 0
    v = lad[1, True] @ mid_catalog.basis_vector(unexcited_state(0))
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-14)


def test_phi_pi(mid_catalog, mid_family):
    n = len(mid_catalog)
    eye = sp.identity(n, format="csr")
    for m in (1, 2):
        for mp in (1, 2):
            Pi = phi_pi_matrix("Pi", -m, mid_catalog, L, mid_family)
            Phi = phi_pi_matrix("Phi", mp, mid_catalog, L, mid_family)
            words = []
            for s in ("R", "L"):
                for t in ("R", "L"):
                    words.append((rho_action(s, m), rho_action(t, -mp)))
                    words.append((rho_action(t, -mp), rho_action(s, m)))
            cols = np.flatnonzero(exact_columns(mid_catalog, words))
            C = Pi @ Phi - Phi @ Pi
            d = (C + 1j / L * (m == mp) * eye)[:, cols]
            assert abs(d).max() <= 1e-12
    Pi1 = phi_pi_matrix("Pi", 1, mid_catalog, L, mid_family)
    assert abs(Pi1.conj().T - phi_pi_matrix("Pi", -1, mid_catalog, L, mid_family)).max() <= 1e-15
    v = mid_catalog.basis_vector(unexcited_state(0))
    for m in (1, 2):
        phi = phi_pi_matrix("Phi", m, mid_catalog, L, mid_family) @ v
        k = 2 * math.pi * m / L
        assert np.vdot(phi, phi).real == pytest.approx(math.pi * m / (k * L) ** 2, abs=1e-14)


def test_densities_commute_with_q5(mid_catalog, mid_family):
    for m in (1, -1, 2, -3):
        for s in ("R", "L"):
            assert q5_commutes(mid_catalog, mid_family(s, m)) == 0


def test_family_rejects_foreign_catalog(small_catalog, mid_family):
    with pytest.raises(ValueError):
        t_matrix(small_catalog, family=mid_family)


def test_constants_validation():
    with pytest.raises(ValueError):
        PhysicalConstants(L=0)
    c = PhysicalConstants()
    assert c.omega(1) == pytest.approx(math.sqrt(1 + 1 / math.pi))
