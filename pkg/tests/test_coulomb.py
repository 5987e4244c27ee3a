import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from schwinger.coulomb import (BogoliubovSpec, Dressing, WindowTooSmall, c0_constant,
                               c0_summand, coulomb_matrix, hprime_matrix, momentum_gap,
                               sector_levels, z_matrix, zeta_coefficient)
from schwinger.densities import DensityFamily, PhysicalConstants
from schwinger.fock import ModeWindow, enumerate_basis, q5_matrix, unexcited_state

C = PhysicalConstants()


def test_zeta_examples():
    assert zeta_coefficient(1, C) == pytest.approx(-0.06909, abs=1e-5)
    with pytest.raises(ValueError):
        zeta_coefficient(0, C)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 200))
def test_zeta_symmetric_and_decreasing(m):
    z = zeta_coefficient(m, C)
    assert z == zeta_coefficient(-m, C)
    assert z < 0
    assert abs(zeta_coefficient(m + 1, C)) < abs(z)


def test_c0_properties():
    assert c0_constant(C, 64) < 0
    assert c0_constant(PhysicalConstants(e=0.0), 64) == 0
    assert all(c0_summand(m, C) <= 0 for m in range(1, 200))
    # the tail beyond m is bounded by the m^-3 summand envelope
    tail = c0_constant(C, 4096) - c0_constant(C, 64)
    bound = sum(C.e ** 4 / (8 * math.pi ** 2 * C.k(m) ** 3) for m in range(65, 4097))
    assert -bound <= tail < 0
    assert abs(c0_constant(C, 128) - c0_constant(C, 64)) <= 1e-5
    with pytest.raises(ValueError):
        c0_constant(C, 0)


def test_c0_summand_closed_form():
    for m in (1, 3, 10):
        k = C.k(m)
        x = C.e ** 2 / (math.pi * k * k)
        assert c0_summand(m, C) == pytest.approx(k * (math.sqrt(1 + x) - x / 2 - 1), rel=1e-12)


def test_coulomb_hermitian_with_zero_vacuum_expectation(mid_catalog, mid_family):
    H = coulomb_matrix(mid_catalog, constants=C, family=mid_family)
    assert abs(H - H.conj().T).max() <= 1e-14
    for P in (-1, 0, 1):
        v = mid_catalog.basis_vector(unexcited_state(P))
        assert abs(np.vdot(v, H @ v)) <= 1e-15
    with pytest.raises(ValueError):
        coulomb_matrix(mid_catalog, m_cutoff=7, family=mid_family)


def test_coulomb_commutes_with_q5(mid_catalog, mid_family):
    H = coulomb_matrix(mid_catalog, constants=C, family=mid_family)
    q5 = q5_matrix(mid_catalog)
    d = q5 @ H - H @ q5
    assert d.nnz == 0 or abs(d).max() == 0


def test_dressing_generator(mid_catalog, mid_family):
    spec = BogoliubovSpec(C, 2)
    Z = z_matrix(mid_catalog, spec, mid_family)
    v = mid_catalog.basis_vector(unexcited_state(0))
    assert abs(np.vdot(v, Z @ v)) == 0
    q5 = q5_matrix(mid_catalog)
    d = q5 @ Z - Z @ q5
    assert d.nnz == 0 or abs(d).max() == 0
    assert abs(z_matrix(mid_catalog, BogoliubovSpec(PhysicalConstants(e=0.0), 2),
                        mid_family)).sum() == 0
    with pytest.raises(WindowTooSmall):
        z_matrix(mid_catalog, BogoliubovSpec(C, 7), mid_family)


def test_dressing_is_unitary(mid_catalog, mid_family):
    d = Dressing(mid_catalog, BogoliubovSpec(C, 2), mid_family)
    rng = np.random.default_rng(3)
    x = rng.standard_normal(len(mid_catalog)) + 1j * rng.standard_normal(len(mid_catalog))
    y = d.apply(d.apply(x, 1), -1)
    assert np.abs(y - x).max() <= 1e-12
    assert np.linalg.norm(d.apply(x)) == pytest.approx(np.linalg.norm(x), rel=1e-12)
    with pytest.raises(ValueError):
        d.apply(x, 2)


@pytest.mark.parametrize("P", [-1, 0, 1])
def test_dressed_state_norm(mid_catalog, mid_family, P):
    v = Dressing(mid_catalog, BogoliubovSpec(C, 2), mid_family).dressed_state(P)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_dressed_vacuum_energy_approaches_c0(small_catalog, small_family, mid_catalog,
                                             mid_family):
    spec = BogoliubovSpec(C, 2)
    errs = []
    for cat, fam in ((small_catalog, small_family), (mid_catalog, mid_family)):
        v = Dressing(cat, spec, fam).dressed_state(0)
        H = hprime_matrix(cat, C, m_cutoff=2, family=fam)
        errs.append(abs(np.vdot(v, H @ v).real - spec.c0))
    assert errs[1] < errs[0]
    assert errs[1] <= 1e-6


def test_sector_levels_and_gap(mid_catalog, mid_family):
    H = hprime_matrix(mid_catalog, C, family=mid_family)
    assert sector_levels(H, mid_catalog, 0, 0, 1)[0] <= 0
    with pytest.raises(WindowTooSmall):
        sector_levels(H, mid_catalog, 0, 1000)
    g = momentum_gap(mid_catalog, C, mid_family)
    assert g == pytest.approx(1.14837770, abs=1e-7)
    assert g > C.omega(1)
