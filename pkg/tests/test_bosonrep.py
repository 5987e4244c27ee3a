import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from schwinger.bosonrep import (BosonState, WindowViolation, anomaly_residual,
                                boson_enumerate, boson_hprime_matrix, boson_ladder_matrix,
                                boson_number_matrix, boson_phi_pi, dictionary_map,
                                pair_bogoliubov_block, representation_equivalence)
from schwinger.coulomb import c0_constant, c0_summand
from schwinger.densities import PhysicalConstants, a_ladder_matrix
from schwinger.fock import CapacityError, FockState, ModeWindow, enumerate_basis
from schwinger.modular import gauge_matrix

C = PhysicalConstants()


def test_catalog_counts_and_order():
    cat = boson_enumerate(2, 2, p_range=1)
    assert len(cat) == 3 * math.comb(4 + 2, 2)
    assert cat.modes == (-2, -1, 1, 2)
    assert cat.slot(-2) == 0 and cat.slot(2) == 3
    assert [s.P for s in cat][:1] == [-1]
    assert all(cat.index(s) == i for i, s in enumerate(cat))
    with pytest.raises(ValueError):
        cat.slot(0)
    with pytest.raises(CapacityError):
        boson_enumerate(6, 8, max_dim=1000)


def test_hprime_examples():
    cat = boson_enumerate(2, 2)
    H = boson_hprime_matrix(cat, C).diagonal().real
    c0 = c0_constant(C, 64)
    assert H[cat.index(BosonState(0, (0, 0, 0, 0)))] == pytest.approx(c0, abs=1e-15)
    assert H[cat.index(BosonState(0, (0, 0, 1, 0)))] == pytest.approx(c0 + 1.148177, abs=1e-6)
    assert H[cat.index(BosonState(0, (1, 0, 0, 1)))] == pytest.approx(
        c0 + 2 * C.omega(2), abs=1e-14)
    N = boson_number_matrix(cat)
    Hm = boson_hprime_matrix(cat, C)
    assert abs(N @ Hm - Hm @ N).max() == 0


def test_ladder_commutator_on_interior():
    cat = boson_enumerate(2, 3)
    inner = np.array([s.degree <= 2 for s in cat])
    for m in (-2, -1, 1, 2):
        for mp in (-2, -1, 1, 2):
            a = boson_ladder_matrix(m, False, cat)
            ad = boson_ladder_matrix(mp, True, cat)
            Cm = (a @ ad - ad @ a).toarray()[:, inner]
            expect = np.eye(len(cat))[:, inner] * (m == mp)
            assert np.abs(Cm - expect).max() <= 1e-14


def test_phi_pi_commutator_and_vacuum_value():
    cat = boson_enumerate(2, 3)
    inner = np.array([s.degree <= 2 for s in cat])
    for m in (1, 2):
        Pi = boson_phi_pi(-m, "Pi", cat, C)
        Phi = boson_phi_pi(m, "Phi", cat, C)
        Cm = (Pi @ Phi - Phi @ Pi).toarray()[:, inner]
        assert np.abs(Cm + 1j / C.L * np.eye(len(cat))[:, inner]).max() <= 1e-14
        v = np.zeros(len(cat))
        v[cat.index(BosonState(0, (0,) * 4))] = 1
        phi = Phi @ v
        assert np.vdot(phi, phi).real == pytest.approx(1 / (2 * C.omega(m) * C.L), rel=1e-14)
    with pytest.raises(ValueError):
        boson_phi_pi(0, "Phi", cat, C)


def test_anomaly_equation():
    cat = boson_enumerate(3, 3)
    for m in (1, 2, 3):
        assert anomaly_residual(m, cat, C) <= 1e-10
    assert anomaly_residual(1, cat, C, mass_term=False) >= 1e-2
    free = PhysicalConstants(e=0.0)
    assert anomaly_residual(1, cat, free) <= 1e-10
    assert anomaly_residual(1, cat, free, mass_term=False) <= 1e-10


def test_dictionary_examples(small_catalog, big_catalog):
    d = dictionary_map(0, 1, 1, small_catalog)
    v = d.image(BosonState(0, (0, 1)))
    assert v[small_catalog.index(FockState((0,), (1,)))] == pytest.approx(-1j)
    assert np.count_nonzero(v) == 1
    v = d.image(BosonState(0, (1, 0)))
    assert v[small_catalog.index(FockState((-1,), (0,)))] == pytest.approx(1j)
    dd = dictionary_map(0, 2, 2, big_catalog)
    assert np.abs(dd.gram() - np.eye(len(dd.boson))).max() <= 1e-10
    with pytest.raises(WindowViolation):
        dictionary_map(0, 2, 2, small_catalog)
    loose = dictionary_map(0, 2, 2, small_catalog, strict=False)
    assert 0 < len(loose.boson) < len(dd.boson)


def test_dictionary_intertwines_ladders(mid_catalog, mid_family):
    d = dictionary_map((-1, 0, 1), 1, 2, mid_catalog)
    for m in (-1, 1):
        Af = a_ladder_matrix(m, False, mid_catalog, mid_family)
        Ab = boson_ladder_matrix(m, False, d.boson).toarray()
        assert np.abs(Af @ d.images - d.images @ Ab).max() <= 1e-12


def test_gauge_ladder_on_images(mid_catalog):
    G, _ = gauge_matrix(1, mid_catalog)
    d0 = dictionary_map(0, 1, 2, mid_catalog)
    dm = dictionary_map(-1, 1, 2, mid_catalog)
    for s in d0.boson:
        assert np.abs(G @ d0.image(s) - dm.image(BosonState(-1, s.occupations))).max() == 0


def test_pair_block_vacuum_value():
    # squeezed occupation of the pair vacuum cancels the dressing energy shift
    for j in (1, 2, 5):
        B = pair_bogoliubov_block(j, C)
        assert B.shape == (576, 576)
        k = C.k(j)
        x = C.e ** 2 / (math.pi * k * k)
        expect = 2 * C.omega(j) * math.sinh(0.5 * math.atanh(x / (x + 2))) ** 2
        assert B[0, 0].real == pytest.approx(expect, rel=1e-10)
        assert B[0, 0].real == pytest.approx(-c0_summand(j, C), rel=1e-10)


def test_representation_equivalence(mid_catalog, mid_family):
    dev, gram, n = representation_equivalence(mid_catalog, C, 1, 2, family=mid_family)
    assert n > 0
    assert dev <= 1e-8
    assert gram <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=4, max_size=4), st.integers(-2, 2))
def test_energy_is_linear_in_occupations(occ, P):
    cat = boson_enumerate(2, 8, p_values=[P])
    s = BosonState(P, tuple(occ))
    e = cat.energies(C)[cat.index(s)]
    assert e == pytest.approx(sum(n * C.omega(m) for n, m in zip(occ, cat.modes)), rel=1e-14)
