"""Command-line runners producing JSON reports and CSV tables.

Subcommands: ``verify``, ``spectrum``, ``vacuum``, ``anomaly`` and ``scan``.
Exit status is 0 when every check passes (skips allowed), 1 when a check
fails and 2 for a rejected configuration.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import scipy.sparse as sp

from . import bosonrep, coulomb, densities, fock, gaugegrid, modular, solver
from .densities import PhysicalConstants

SCHEMA = "schwinger-report/1"

DEFAULT_TOLERANCES = {
    "fock.anticommutator": 1e-12,
    "modular.signed_permutation": 0.0,
    "modular.vacuum_shift": 0.0,
    "modular.axial_shift": 1e-12,
    "modular.density_covariance": 1e-12,
    "modular.coulomb_covariance": 1e-12,
    "densities.commutators": 1e-12,
    "densities.kronig": 1e-12,
    "bosonrep.dictionary_gram": 1e-10,
    "bosonrep.equivalence": 1e-8,
    "bosonrep.gamma_ladder": 1e-12,
    "coulomb.hermiticity": 1e-12,
    "coulomb.vacuum_annihilation": 1e-12,
    "coulomb.c0_negative": 0.0,
    "coulomb.unitarity": 1e-10,
    "gaugegrid.hermiticity": 1e-12,
    "gaugegrid.theta_independence": 1e-8,
    "gaugegrid.normalization_offset": 1e-12,
    "bosonrep.anomaly": 1e-10,
    "bosonrep.anomaly_control": 1e-2,
    "spectrum.zero_mode_spacing": 2e-3,
    "spectrum.ground": 1e-3,
    "spectrum.omega1": 1e-10,
    "vacuum.energy": 1e-3,
    "vacuum.overlap": 0.999,
    "vacuum.norm": 1e-6,
    "vacuum.boundary": 1e-12,
    "scan.order": 0.3,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    L: float = 2 * math.pi
    e: float = 1.0
    lam: int = 4
    max_pairs: int = 3
    grid_points: int = 128
    p_window: int = 5
    theta: float = 0.0
    m_cutoff: int = 64
    boson_degree: int = 4
    tolerances: Dict[str, float] = field(default_factory=dict)

    _json_names = {"lambda": "lam"}

    def validate(self):
        if not (self.L > 0 and self.e > 0):
            raise ConfigError("L and e must be positive")
        for name in ("lam", "max_pairs", "grid_points", "m_cutoff"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.boson_degree < 1:
            raise ConfigError("boson_degree must be >= 1")
        if self.max_pairs > 2 * self.lam + 1:
            raise ConfigError("max_pairs cannot exceed 2*lambda + 1")
        if self.grid_points < 8:
            raise ConfigError("grid_points must be >= 8")
        if self.p_window < 3:
            raise ConfigError("p_window must be >= 3")
        if not 0 <= self.theta < math.pi:
            raise ConfigError("theta must lie in [0, pi)")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in data.items():
            name = cls._json_names.get(key, key)
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[name] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    def tol(self, check_id: str) -> float:
        return self.tolerances.get(check_id, DEFAULT_TOLERANCES[check_id])

    @property
    def constants(self) -> PhysicalConstants:
        return PhysicalConstants(self.L, self.e)


def _num(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else x


class Report:
    def __init__(self, command: str, config: RunConfig, seed: int, timings: bool = False):
        self.command = command
        self.config = config
        self.seed = seed
        self.timings = timings
        self.checks: List[dict] = []
        self.extra: Dict[str, object] = {}

    def add(self, check_id: str, name: str, measured, expected, tolerance, passed,
            runtime: float = 0.0, status: Optional[str] = None, detail: str = ""):
        rec = {"id": check_id, "name": name,
               "status": status or ("pass" if passed else "fail"),
               "measured": _num(measured), "expected": _num(expected),
               "tolerance": _num(tolerance),
               "runtime": round(runtime, 3) if self.timings else None}
        if detail:
            rec["detail"] = detail
        self.checks.append(rec)
        return rec

    def skip(self, check_id: str, name: str, detail: str = "insufficient window"):
        return self.add(check_id, name, None, None, None, True, status="skip", detail=detail)

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def to_json(self) -> str:
        doc = {"schema": SCHEMA, "command": self.command, "seed": self.seed,
               "config": self.config.to_dict(), "checks": self.checks,
               "summary": {s: sum(c["status"] == s for c in self.checks)
                           for s in ("pass", "fail", "skip")}}
        if self.extra:
            doc["results"] = self.extra
        return json.dumps(doc, indent=2)


class _Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.dt = time.perf_counter() - self.t0


class InsufficientWindow(Exception):
    pass


# --- check implementations -------------------------------------------------

def _unsigned_ladder(kind, mode, state, window=None):
    r = fock.apply_ladder(kind, mode, state, window)
    return None if r is None else (1, r[1])


def anticommutator_defect(catalog: fock.BasisCatalog, ladder: Callable = fock.apply_ladder,
                          samples: int = 24, seed: int = 0) -> float:
    """Largest deviation of ``{x_p, y_q}`` from its canonical value on sampled states."""
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(catalog), size=min(samples, len(catalog)), replace=False)
    modes = list(catalog.window.modes)

    def act(kind, mode, combo):
        out = {}
        for s, c in combo.items():
            r = ladder(kind, mode, s)
            if r is not None:
                out[r[1]] = out.get(r[1], 0) + c * r[0]
        return out

    pairs = [("b", "bdag"), ("c", "cdag"), ("b", "cdag"), ("c", "bdag"),
             ("b", "b"), ("bdag", "bdag"), ("b", "c"), ("cdag", "cdag")]
    worst = 0.0
    for j in sorted(idx):
        s = catalog.states[j]
        for x, y in pairs:
            canonical = {("b", "bdag"), ("c", "cdag")}
            for p in modes:
                for q in modes:
                    one = act(x, p, act(y, q, {s: 1}))
                    two = act(y, q, act(x, p, {s: 1}))
                    tot = {k: one.get(k, 0) + two.get(k, 0) for k in set(one) | set(two)}
                    expect = 1.0 if (x, y) in canonical and p == q else 0.0
                    dev = max((abs(tot.get(k, 0) - (expect if k == s else 0)) for k in set(tot) | {s}),
                              default=0.0)
                    worst = max(worst, dev)
    return worst


def gauge_checks(catalog: fock.BasisCatalog):
    """Signed-permutation structure, vacuum ladder and axial shift of ``G``."""
    G, mask = modular.gauge_matrix(1, catalog)
    Gi, mask_i = modular.gauge_matrix(-1, catalog)
    G = sp.csr_matrix(G)
    vals = np.unique(np.round(G.data.real, 12)) if G.nnz else np.array([])
    rows = np.diff(G.indptr)
    cols = np.diff(sp.csc_matrix(G).indptr)
    perm_defect = 0.0
    if not set(vals.tolist()) <= {-1.0, 1.0} or rows.max(initial=0) > 1 or cols.max(initial=0) > 1:
        perm_defect = 1.0
    perm_defect = max(perm_defect, float(abs(Gi - G.T).max()) if (Gi - G.T).nnz else 0.0)
    shift_defect, shifted = 0.0, 0
    for P in range(-catalog.window.max_pairs, catalog.window.max_pairs + 1):
        s = fock.unexcited_state(P)
        t = fock.unexcited_state(P - 1)
        if s in catalog and t in catalog:
            sign, img = modular.gauge_apply(1, s)
            shifted += 1
            if img != t or sign != 1:
                shift_defect = 1.0
    axial = axial_shift_residual(catalog, G, mask)
    return perm_defect, shift_defect, shifted, axial, len(mask)


def axial_shift_residual(catalog, G=None, mask=None, shift: int = -2) -> float:
    """``max |Q5 G - G (Q5 + shift)|`` over the domain mask of ``G``.

    ``G`` lowers the axial charge by two, so ``shift=-2`` is the identity
    (equivalently ``Q5 G^-1 = G^-1 (Q5 + 2)``).
    """
    if G is None:
        G, mask = modular.gauge_matrix(1, catalog)
    q5 = fock.q5_matrix(catalog)
    d = (q5 @ G - G @ (q5 + shift * sp.identity(len(catalog))))[:, mask.indices]
    return float(abs(d).max()) if d.nnz else 0.0


def _gauge_words(words, direction=1):
    g = modular.gauge_action(direction)
    return [(g,) + tuple(w) for w in words] + [tuple(w) + (g,) for w in words]


def density_covariance(catalog, family, modes=(1, 2)):
    G, _ = modular.gauge_matrix(1, catalog)
    worst, ncols = 0.0, None
    for m in modes:
        for sgn in (m, -m):
            for species in ("R", "L"):
                if abs(sgn) > family.max_shift:
                    continue
                act = densities.rho_action(species, sgn)
                mask = fock.exact_columns(catalog, _gauge_words([(act,)]))
                cols = np.flatnonzero(mask)
                ncols = cols.size if ncols is None else min(ncols, cols.size)
                rho = family(species, sgn)
                d = (G @ rho - rho @ G)[:, cols]
                worst = max(worst, float(abs(d).max()) if d.nnz else 0.0)
    return worst, ncols or 0


def coulomb_covariance(catalog, constants, family, cutoff=None):
    cutoff = family.max_shift if cutoff is None else cutoff
    G, _ = modular.gauge_matrix(1, catalog)
    H = coulomb.coulomb_matrix(catalog, cutoff, constants, family)
    mask = fock.exact_columns(catalog, _gauge_words(coulomb.coulomb_words(cutoff)))
    cols = np.flatnonzero(mask)
    d = (G @ H - H @ G)[:, cols]
    return (float(abs(d).max()) if d.nnz else 0.0), cols.size


def density_commutators(catalog, family, max_m=2):
    """Deviation of the chiral density algebra from ``m delta`` (same species) and 0 (mixed)."""
    worst, ncols = 0.0, len(catalog)
    n = len(catalog)
    eye = sp.identity(n, dtype=complex, format="csr")
    top = min(max_m, family.max_shift)
    for left in ("R", "L"):
        for right in ("R", "L"):
            for m in range(1, top + 1):
                for mp in range(1, top + 1):
                    for s1, s2 in ((-mp, m), (mp, -m), (mp, m)):
                        a = densities.rho_action(left, s1)
                        b = densities.rho_action(right, s2)
                        cols = np.flatnonzero(densities.commutator_mask(catalog, a, b))
                        ncols = min(ncols, cols.size)
                        A, B = family(left, s1), family(right, s2)
                        C = A @ B - B @ A
                        expect = 0.0
                        if left == right and m == mp and s1 == -s2:
                            # [rho_R(-m), rho_R(m)] = m, [rho_L(m), rho_L(-m)] = m
                            expect = m if (left == "R") == (s1 < 0) else -m
                        d = (C - expect * eye)[:, cols]
                        worst = max(worst, float(abs(d).max()) if d.nnz else 0.0)
    return worst, ncols


def theta_spectra(config: RunConfig, theta: float, k: int = 6, points: Optional[int] = None):
    grid = gaugegrid.GridSpec(points or config.grid_points, config.L, theta)
    sec = gaugegrid.p_sector(config.p_window, config.L)
    H = gaugegrid.assemble_h0_bosonized(grid, sec, config.constants)
    return solver.lowest_eigenpairs(solver.EigenRequest(H, k=k, tol=1e-11))[0]


def vacuum_energy(config: RunConfig, points: int, twist=None):
    grid = gaugegrid.GridSpec(points, config.L, config.theta)
    sec = gaugegrid.p_sector(config.p_window, config.L)
    H = gaugegrid.assemble_h0_bosonized(grid, sec, config.constants, twist=twist)
    w, v = solver.lowest_eigenpairs(solver.EigenRequest(H, k=1, tol=1e-11))
    return w[0], v[:, 0], grid, sec


# --- runners ---------------------------------------------------------------

def run_verify(config: RunConfig, seed: int = 0, timings: bool = False,
               ladder: Callable = fock.apply_ladder) -> Report:
    rep = Report("verify", config, seed, timings)
    c = config.constants
    window = fock.ModeWindow(config.lam, config.max_pairs)
    catalog = fock.enumerate_basis(window)
    family = densities.DensityFamily(catalog)

    with _Clock() as t:
        d = anticommutator_defect(catalog, ladder, seed=seed)
    tol = config.tol("fock.anticommutator")
    rep.add("fock.anticommutator", "canonical anticommutation relations", d, 0.0, tol, d <= tol, t.dt)

    with _Clock() as t:
        perm, shift, nshift, axial, nmask = gauge_checks(catalog)
    rep.add("modular.signed_permutation", "G is a signed permutation with G^-1 = G^T",
            perm, 0.0, 0.0, perm == 0, t.dt)
    if nshift:
        rep.add("modular.vacuum_shift", "G Omega_P = Omega_{P-1}", shift, 0.0, 0.0,
                shift == 0, t.dt)
    else:
        rep.skip("modular.vacuum_shift", "G Omega_P = Omega_{P-1}")
    tol = config.tol("modular.axial_shift")
    rep.add("modular.axial_shift", "Q5 G = G (Q5 - 2)", axial, 0.0, tol,
            axial <= tol and nmask > 0, t.dt)

    with _Clock() as t:
        cov, ncols = density_covariance(catalog, family)
    tol = config.tol("modular.density_covariance")
    if ncols:
        rep.add("modular.density_covariance", "G rho G^-1 = rho", cov, 0.0, tol, cov <= tol, t.dt)
    else:
        rep.skip("modular.density_covariance", "G rho G^-1 = rho")

    with _Clock() as t:
        cov, ncols = coulomb_covariance(catalog, c, family, min(2, family.max_shift))
    tol = config.tol("modular.coulomb_covariance")
    if ncols:
        rep.add("modular.coulomb_covariance", "G :H_coul: G^-1 = :H_coul:", cov, 0.0, tol,
                cov <= tol, t.dt)
    else:
        rep.skip("modular.coulomb_covariance", "G :H_coul: G^-1 = :H_coul:")

    with _Clock() as t:
        dev, ncols = density_commutators(catalog, family)
    tol = config.tol("densities.commutators")
    if ncols and config.lam >= 2:
        rep.add("densities.commutators", "chiral density algebra", dev, 0.0, tol, dev <= tol, t.dt)
    else:
        rep.skip("densities.commutators", "chiral density algebra")

    with _Clock() as t:
        mask = fock.exact_columns(catalog, densities.t_words(family.max_shift))
        kr = densities.kronig_residual(catalog, mask, c.L, family) if mask.any() else None
    tol = config.tol("densities.kronig")
    if kr is None:
        rep.skip("densities.kronig", "Kronig identity")
    else:
        rep.add("densities.kronig", "Kronig identity", kr, 0.0, tol, kr <= tol, t.dt)

    with _Clock() as t:
        try:
            dic = bosonrep.dictionary_map((-1, 0, 1), 1, 2, catalog)
            gram = float(np.abs(dic.gram() - np.eye(len(dic.boson))).max())
            G, _ = modular.gauge_matrix(1, catalog)
            lad = 0.0
            for s in dic.boson:
                low = bosonrep.BosonState(s.P - 1, s.occupations)
                if low in dic.boson:
                    lad = max(lad, float(np.abs(G @ dic.image(s) - dic.image(low)).max()))
            equiv, _, ninner = bosonrep.representation_equivalence(
                catalog, c, 1, 2, (0,), family)
        except (bosonrep.WindowViolation, ValueError):
            dic = None
    if dic is None:
        for cid, name in (("bosonrep.dictionary_gram", "dictionary images orthonormal"),
                          ("bosonrep.gamma_ladder", "G image(P, n) = image(P-1, n)"),
                          ("bosonrep.equivalence", "bosonization equivalence")):
            rep.skip(cid, name)
    else:
        tol = config.tol("bosonrep.dictionary_gram")
        rep.add("bosonrep.dictionary_gram", "dictionary images orthonormal", gram, 0.0, tol,
                gram <= tol, t.dt)
        tol = config.tol("bosonrep.gamma_ladder")
        rep.add("bosonrep.gamma_ladder", "G image(P, n) = image(P-1, n)", lad, 0.0, tol,
                lad <= tol, t.dt)
        tol = config.tol("bosonrep.equivalence")
        rep.add("bosonrep.equivalence", "bosonization equivalence", equiv, 0.0, tol,
                equiv <= tol, t.dt, detail=f"{ninner} interior states")

    with _Clock() as t:
        H = coulomb.coulomb_matrix(catalog, None, c, family)
        herm = float(abs(H - H.conj().T).max()) if H.nnz else 0.0
        ann = 0.0
        for P in range(-config.max_pairs, config.max_pairs + 1):
            s = fock.unexcited_state(P)
            if s in catalog:
                v = catalog.basis_vector(s)
                ann = max(ann, abs(np.vdot(v, H @ v)))
    tol = config.tol("coulomb.hermiticity")
    rep.add("coulomb.hermiticity", ":H_coul: Hermitian", herm, 0.0, tol, herm <= tol, t.dt)
    tol = config.tol("coulomb.vacuum_annihilation")
    rep.add("coulomb.vacuum_annihilation", "<Omega_P|:H_coul:|Omega_P> = 0", ann, 0.0, tol, ann <= tol, t.dt)

    c0 = coulomb.c0_constant(c, config.m_cutoff)
    rep.add("coulomb.c0_negative", "C0 < 0", c0, None, 0.0, c0 < 0)

    with _Clock() as t:
        spec = coulomb.BogoliubovSpec(c, min(config.m_cutoff, family.max_shift))
        dressing = coulomb.Dressing(catalog, spec, family)
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(len(catalog)) + 1j * rng.standard_normal(len(catalog))
        x /= np.linalg.norm(x)
        y = dressing.apply(x, 1)
        back = dressing.apply(y, -1)
        unit = max(abs(np.linalg.norm(y) - 1), float(np.abs(back - x).max()))
    tol = config.tol("coulomb.unitarity")
    rep.add("coulomb.unitarity", "U = exp(iZ) unitary", unit, 0.0, tol, unit <= tol, t.dt)

    with _Clock() as t:
        grid = gaugegrid.GridSpec(config.grid_points, config.L, config.theta or 0.7)
        sec = gaugegrid.p_sector(config.p_window, config.L)
        Hg = gaugegrid.assemble_h0_bosonized(grid, sec, c)
        herm = float(abs(Hg - Hg.conj().T).max())
    tol = config.tol("gaugegrid.hermiticity")
    rep.add("gaugegrid.hermiticity", "twisted H0 Hermitian", herm, 0.0, tol, herm <= tol, t.dt)

    with _Clock() as t:
        th = config.theta or 0.7
        diff = float(np.abs(theta_spectra(config, 0.0) - theta_spectra(config, th)).max())
    tol = config.tol("gaugegrid.theta_independence")
    rep.add("gaugegrid.theta_independence", f"spectrum at theta=0 vs theta={th:g}", diff, 0.0,
            tol, diff <= tol, t.dt)

    with _Clock() as t:
        small = fock.enumerate_basis(fock.ModeWindow(min(config.lam, 2), min(config.max_pairs, 2)))
        sm_mask = fock.exact_columns(small, densities.t_words(2 * small.window.lam))
        fsec = gaugegrid.fock_sector(small, c.L)
        g16 = gaugegrid.GridSpec(16, c.L, config.theta)
        Dm = (gaugegrid.assemble_h0_fermionic(g16, fsec, c)
              - gaugegrid.assemble_h0_bosonized(g16, fsec, c))
        cols = np.flatnonzero(np.tile(sm_mask, g16.points))
        off = (Dm + math.pi / (2 * c.L) * sp.identity(Dm.shape[0]))[:, cols]
        offd = float(abs(off).max()) if off.nnz else 0.0
    tol = config.tol("gaugegrid.normalization_offset")
    rep.add("gaugegrid.normalization_offset", "fermionic - bosonized H0 = -pi/2L", offd, 0.0,
            tol, offd <= tol, t.dt)

    _anomaly_checks(rep, config)
    return rep


def _anomaly_checks(rep: Report, config: RunConfig):
    c = config.constants
    with _Clock() as t:
        bc = bosonrep.boson_enumerate(2, config.boson_degree, 0)
        res = {m: bosonrep.anomaly_residual(m, bc, c, c0_cutoff=config.m_cutoff) for m in (1, 2)}
        ctrl = bosonrep.anomaly_residual(1, bc, c, mass_term=False, c0_cutoff=config.m_cutoff)
    tol = config.tol("bosonrep.anomaly")
    for m, r in res.items():
        rep.add("bosonrep.anomaly", f"i[H', Pi_{m}] + w_{m}^2 Phi_{m} = 0", r, 0.0, tol,
                r <= tol, t.dt)
    tol = config.tol("bosonrep.anomaly_control")
    rep.add("bosonrep.anomaly_control", "residual without the e^2/pi term", ctrl, None, tol,
            ctrl >= tol, t.dt)


def run_anomaly(config: RunConfig, seed: int = 0, timings: bool = False) -> Report:
    rep = Report("anomaly", config, seed, timings)
    _anomaly_checks(rep, config)
    return rep


def run_spectrum(config: RunConfig, seed: int = 0, timings: bool = False, k: int = 8):
    rep = Report("spectrum", config, seed, timings)
    c = config.constants
    with _Clock() as t:
        grid = gaugegrid.GridSpec(config.grid_points, config.L, config.theta)
        boson = bosonrep.boson_enumerate(config.lam, config.boson_degree, config.p_window)
        spec = coulomb.BogoliubovSpec(c, config.m_cutoff)
        levels, zero = gaugegrid.dressed_spectrum(grid, boson, spec, k=k)
    spacing = zero[1] - zero[0]
    expect = c.e / math.sqrt(math.pi)
    tol = config.tol("spectrum.zero_mode_spacing")
    rep.add("spectrum.zero_mode_spacing", "zero-mode level spacing", spacing, expect, tol,
            abs(spacing - expect) <= tol, t.dt)
    e0 = expect / 2 + spec.c0
    tol = config.tol("spectrum.ground")
    rep.add("spectrum.ground", "dressed ground energy E0 + C0", levels[0], e0, tol,
            abs(levels[0] - e0) <= tol * abs(e0), t.dt)
    one = tuple(1 if m == 1 else 0 for m in boson.modes)
    w1 = float(np.dot([c.omega(m) for m in boson.modes], one))
    tol = config.tol("spectrum.omega1")
    rep.add("spectrum.omega1", "first momentum-mode level", w1, c.omega(1), tol,
            abs(w1 - c.omega(1)) <= tol, t.dt)
    rep.extra = {"levels": [float(x) for x in levels], "gap": float(levels[1] - levels[0]),
                 "zero_mode_spacing": float(spacing), "c0": spec.c0}
    table = [("index", "eigenvalue")] + [(i, f"{x:.12g}") for i, x in enumerate(levels)]
    return rep, {"spectrum.csv": table}


def run_vacuum(config: RunConfig, seed: int = 0, timings: bool = False):
    rep = Report("vacuum", config, seed, timings)
    c = config.constants
    with _Clock() as t:
        E, v, grid, sec = vacuum_energy(config, config.grid_points)
        E2 = vacuum_energy(config, 2 * config.grid_points)[0]
        ana = gaugegrid.analytic_vacuum(grid, sec, c)
        num = gaugegrid.CombinedVector.from_flat(grid, sec, v).normalized()
        ov = ana.normalized().inner(num)
        num = gaugegrid.CombinedVector(grid, sec, num.amplitudes * abs(ov) / ov)
    e0 = c.e / (2 * math.sqrt(math.pi))
    tol = config.tol("vacuum.energy")
    rep.add("vacuum.energy", "ground energy of bosonized H0", E, e0, tol,
            abs(E - e0) <= tol * e0, t.dt)
    tol = config.tol("vacuum.overlap")
    rep.add("vacuum.overlap", "overlap with the Gaussian comb", abs(ov), 1.0, tol,
            abs(ov) >= tol, t.dt)
    nrm = ana.norm()
    tol = config.tol("vacuum.norm")
    rep.add("vacuum.norm", "discrete norm of the Gaussian comb", nrm, 1.0, tol,
            abs(nrm - 1) <= tol)
    end = gaugegrid.analytic_vacuum(grid, sec, c, at_period=True)
    bcr = float(np.abs(end - sec.twist().gamma_inv @ ana.amplitudes[0]).max())
    tol = config.tol("vacuum.boundary")
    rep.add("vacuum.boundary", "twisted boundary condition of the comb", bcr, 0.0, tol, bcr <= tol)
    with _Clock() as t:
        Eu = vacuum_energy(config, config.grid_points,
                           twist=gaugegrid.TwistOperatorPair.identity(sec.dim))[0]
    grid_err = abs(E - E2) * 4 / 3
    rep.add("vacuum.untwisted_control", "periodic assembly differs from twisted",
            abs(Eu - E), None, 10 * grid_err, abs(Eu - E) > 10 * grid_err, t.dt,
            detail=f"untwisted energy {Eu:.9f}")
    rep.extra = {"energy": E, "untwisted_energy": Eu, "grid_error": grid_err}
    table = [("a", "P", "re", "im")]
    for j, a in enumerate(grid.a):
        for s in range(sec.dim):
            z = num.amplitudes[j, s]
            table.append((f"{a:.12g}", int(sec.labels[s]), f"{z.real:.12g}", f"{z.imag:.12g}"))
    return rep, {"vacuum.csv": table}


SCAN_AXES = ("grid_points", "lambda", "m_cutoff", "boson_degree")


def run_scan(config: RunConfig, axis: str, seed: int = 0, timings: bool = False):
    rep = Report(f"scan:{axis}", config, seed, timings)
    c = config.constants
    rows = [("value", "quantity")]
    with _Clock() as t:
        if axis == "grid_points":
            vals = [config.grid_points * 2 ** i for i in range(3)]
            qs = [vacuum_energy(config, M)[0] for M in vals]
            order, limit = solver.richardson(*qs)
            tol = config.tol("scan.order")
            ok = abs(order - 2) <= tol and abs(qs[1] - qs[2]) < abs(qs[0] - qs[1])
            rep.add("scan.order", "Richardson order of the vacuum energy", order, 2.0, tol, ok)
            rep.extra = {"values": vals, "energies": qs, "limit": limit}
        elif axis == "m_cutoff":
            vals = [config.m_cutoff * 2 ** i for i in range(3)]
            qs = [coulomb.c0_constant(c, m) for m in vals]
            # the summand falls like m^-3, so increments shrink by 4 per doubling
            # asymptotically (from below at finite cutoff)
            order, limit = solver.richardson(*qs)
            tol = config.tol("scan.order")
            ok = abs(order - 2) <= tol and all(q < 0 for q in qs) and qs[2] < qs[1] < qs[0]
            rep.add("scan.c0_order", "convergence order of C0 in the mode cutoff", order, 2.0,
                    tol, ok, detail=f"increment ratio {2 ** order:.4f}")
            rep.extra = {"values": vals, "c0": qs, "limit": limit}
        elif axis == "lambda":
            vals = [max(2, config.lam - 1) + i for i in range(3)]
            qs = []
            for lam in vals:
                cat = fock.enumerate_basis(fock.ModeWindow(lam, min(config.max_pairs, 2 * lam + 1)))
                qs.append(coulomb.momentum_gap(cat, c))
            w1 = c.omega(1)
            errs = [abs(q - w1) for q in qs]
            monotone = all(b < a for a, b in zip(qs, qs[1:])) and all(q > w1 for q in qs)
            tail = abs(qs[-1] - qs[-2])
            rep.add("scan.lambda", "fermionic one-boson level approaches w_1", qs[-1], w1, tail,
                    monotone and errs[-1] <= tail)
            rep.extra = {"values": vals, "gaps": qs}
        elif axis == "boson_degree":
            vals = [config.boson_degree * 2 ** i for i in range(3)]
            qs = []
            for d in vals:
                bc = bosonrep.boson_enumerate(2, d, 0)
                qs.append(max(bosonrep.anomaly_residual(m, bc, c, c0_cutoff=config.m_cutoff)
                              for m in (1, 2)))
            tol = config.tol("bosonrep.anomaly")
            rep.add("scan.boson_degree", "anomaly residual across degree bounds", max(qs), 0.0,
                    tol, max(qs) <= tol)
            rep.extra = {"values": vals, "residuals": qs}
        else:
            raise ConfigError(f"unknown scan axis {axis!r}")
    if rep.checks:
        rep.checks[-1]["runtime"] = round(t.dt, 3) if timings else None
    rows += [(v, f"{q:.12g}") for v, q in zip(vals, qs)]
    return rep, {f"scan_{axis}.csv": rows}


# --- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schwinger", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=("verify", "spectrum", "vacuum", "anomaly", "scan"))
    p.add_argument("--config", type=Path, help="JSON config document")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--axis", choices=SCAN_AXES, default="grid_points", help="scan axis")
    p.add_argument("--timings", action="store_true", help="record runtimes (non-deterministic)")
    p.add_argument("--e", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--max-pairs", dest="max_pairs", type=int)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--p-window", dest="p_window", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--m-cutoff", dest="m_cutoff", type=int)
    p.add_argument("--boson-degree", dest="boson_degree", type=int)
    p.add_argument("--corrupt-sign", action="store_true", help=argparse.SUPPRESS)
    return p


def load_config(args) -> RunConfig:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    cfg = RunConfig.from_dict(data)
    for name in ("e", "L", "lam", "max_pairs", "grid_points", "p_window", "theta",
                 "m_cutoff", "boson_degree"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    return cfg.validate()


def _write_tables(out: Path, tables: dict):
    for name, rows in tables.items():
        with open(out / name, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    args.out.mkdir(parents=True, exist_ok=True)
    tables = {}
    try:
        if args.command == "verify":
            ladder = _unsigned_ladder if args.corrupt_sign else fock.apply_ladder
            rep = run_verify(cfg, args.seed, args.timings, ladder)
        elif args.command == "anomaly":
            rep = run_anomaly(cfg, args.seed, args.timings)
        elif args.command == "spectrum":
            rep, tables = run_spectrum(cfg, args.seed, args.timings)
        elif args.command == "vacuum":
            rep, tables = run_vacuum(cfg, args.seed, args.timings)
        else:
            rep, tables = run_scan(cfg, args.axis, args.seed, args.timings)
    except (ConfigError, fock.CapacityError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    name = args.command if args.command != "scan" else f"scan_{args.axis}"
    (args.out / f"report_{name}.json").write_text(rep.to_json() + "\n")
    _write_tables(args.out, tables)
    for c in rep.checks:
        m = "-" if c["measured"] is None else f"{c['measured']:.3e}"
        print(f"{c['status'].upper():4s} {c['id']:34s} {m}")
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
