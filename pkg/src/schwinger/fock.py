"""Truncated zero-charge fermionic Fock space.

A basis state is an occupation record ``(fermions, antifermions)`` of two
strictly increasing tuples of integer modes.  Its canonical operator string is

    b+_{m1} b+_{m2} ... b+_{mM}  c+_{n1} ... c+_{nN}  |0>

with both species ascending and all ``b`` factors to the left of all ``c``
factors.  Every fermionic sign in the package is measured against this string.

Operators are represented in two ways:

* as *actions*: callables mapping a basis state to a ``{state: coefficient}``
  dictionary, evaluated without any mode window (exact on finite states);
* as sparse matrices over a :class:`BasisCatalog`, i.e. the action followed by
  projection onto the catalog.

Sparse matrices are ``scipy.sparse.csr_matrix`` instances with complex128
entries; callers treat them as immutable.
"""
from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

__all__ = [
    "ModeWindow", "FockState", "BasisCatalog", "CapacityError", "ModeOutOfWindow",
    "VACUUM", "enumerate_basis", "basis_count", "apply_ladder", "apply_string",
    "charge_q", "charge_q5", "dirac_energy", "free_dirac_matrix", "q_matrix",
    "q5_matrix", "unexcited_state", "assemble", "apply_action", "ladder_action",
    "exact_columns", "LADDER_KINDS",
]

LADDER_KINDS = ("b", "bdag", "c", "cdag")
DEFAULT_MAX_DIM = 250_000


class CapacityError(ValueError):
    """Raised when a truncated basis would exceed the configured dimension."""


class ModeOutOfWindow(ValueError):
    """Raised when a ladder operator addresses a mode outside the window."""


@dataclass(frozen=True)
class ModeWindow:
    """Rectangular truncation: modes ``|n| <= lam`` and at most ``max_pairs`` pairs."""

    lam: int
    max_pairs: int

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError(f"lam must be >= 1, got {self.lam}")
        if not 0 <= self.max_pairs <= 2 * self.lam + 1:
            raise ValueError(
                f"max_pairs must lie in [0, {2 * self.lam + 1}], got {self.max_pairs}")

    @property
    def modes(self) -> range:
        return range(-self.lam, self.lam + 1)

    def contains_mode(self, mode: int) -> bool:
        return -self.lam <= mode <= self.lam


class FockState(NamedTuple):
    fermions: Tuple[int, ...] = ()
    antifermions: Tuple[int, ...] = ()

    @property
    def pairs(self) -> int:
        return len(self.fermions)

    def max_abs_mode(self) -> int:
        return max((abs(x) for x in self.fermions + self.antifermions), default=0)

    def __str__(self):
        if not self.fermions and not self.antifermions:
            return "Omega_0"
        ops = [f"b+{m}" for m in self.fermions] + [f"c+{n}" for n in self.antifermions]
        return " ".join(ops) + " Omega_0"


VACUUM = FockState((), ())


@dataclass(frozen=True, eq=False)
class BasisCatalog:
    """Index-addressable zero-charge basis.

    Enumeration order is lexicographic in (pair count, fermion tuple,
    antifermion tuple), where tuples are compared as ascending sequences.
    """

    window: ModeWindow
    states: Tuple[FockState, ...]
    lookup: Dict[FockState, int] = field(repr=False)

    def __len__(self):
        return len(self.states)

    def __contains__(self, state) -> bool:
        return state in self.lookup

    def __iter__(self):
        return iter(self.states)

    def index(self, state: FockState) -> int:
        return self.lookup[state]

    def admits(self, state: FockState) -> bool:
        """Whether ``state`` is a member (zero charge, inside the window)."""
        return state in self.lookup

    def basis_vector(self, state: FockState) -> np.ndarray:
        v = np.zeros(len(self), dtype=complex)
        v[self.lookup[state]] = 1.0
        return v

    def to_vector(self, combo: Dict[FockState, complex], strict: bool = True) -> np.ndarray:
        """Dense amplitudes of a linear combination; ``strict`` rejects leakage."""
        v = np.zeros(len(self), dtype=complex)
        for s, c in combo.items():
            i = self.lookup.get(s)
            if i is None:
                if strict and c != 0:
                    raise ModeOutOfWindow(f"{s} is not in the catalog")
                continue
            v[i] += c
        return v


def basis_count(window: ModeWindow) -> int:
    n = 2 * window.lam + 1
    return sum(math.comb(n, k) ** 2 for k in range(window.max_pairs + 1))


def enumerate_basis(window: ModeWindow, max_dim: int = DEFAULT_MAX_DIM) -> BasisCatalog:
    count = basis_count(window)
    if count > max_dim:
        raise CapacityError(f"basis of {count} states exceeds max_dim={max_dim}")
    modes = list(window.modes)
    states = []
    for k in range(window.max_pairs + 1):
        subsets = list(itertools.combinations(modes, k))
        for f in subsets:
            for a in subsets:
                states.append(FockState(f, a))
    states = tuple(states)
    return BasisCatalog(window, states, {s: i for i, s in enumerate(states)})


def apply_ladder(kind: str, mode: int, state: FockState,
                 window: Optional[ModeWindow] = None):
    """Apply one of ``b, bdag, c, cdag`` at ``mode``.

    Returns ``(sign, new_state)`` or ``None`` when the result vanishes.  With a
    ``window`` the mode is range-checked; without one the action is exact.
    """
    if window is not None and not window.contains_mode(mode):
        raise ModeOutOfWindow(f"mode {mode} outside |n| <= {window.lam}")
    f, a = state
    if kind == "b" or kind == "bdag":
        seq, offset, is_c = f, 0, False
    elif kind == "c" or kind == "cdag":
        seq, offset, is_c = a, len(f), True
    else:
        raise ValueError(f"unknown ladder kind {kind!r}")
    i = bisect_left(seq, mode)
    occupied = i < len(seq) and seq[i] == mode
    if kind[-3:] == "dag":
        if occupied:
            return None
        new = seq[:i] + (mode,) + seq[i:]
    else:
        if not occupied:
            return None
        new = seq[:i] + seq[i + 1:]
    sign = -1 if (offset + i) & 1 else 1
    if is_c:
        return sign, FockState(f, new)
    return sign, FockState(new, a)


def apply_string(ops: Sequence[Tuple[str, int]], state: FockState):
    """Apply an operator string written left to right (rightmost acts first)."""
    sign = 1
    for kind, mode in reversed(ops):
        r = apply_ladder(kind, mode, state)
        if r is None:
            return None
        s, state = r
        sign *= s
    return sign, state


def ladder_action(kind: str, mode: int) -> Callable:
    def action(state):
        r = apply_ladder(kind, mode, state)
        return {} if r is None else {r[1]: r[0]}
    return action


def charge_q(state: FockState) -> int:
    return len(state.fermions) - len(state.antifermions)


def charge_q5(state: FockState) -> int:
    f, a = state
    nb_pos = sum(1 for m in f if m >= 0)
    nc_pos = sum(1 for n in a if n > 0)
    return (2 * nb_pos - len(f)) - (2 * nc_pos - len(a))


def dirac_energy(state: FockState, L: float) -> float:
    return 2 * math.pi / L * (sum(abs(m) for m in state.fermions)
                              + sum(abs(n) for n in state.antifermions))


def _diag(values) -> sp.csr_matrix:
    return sp.diags(np.asarray(values, dtype=complex), format="csr")


def free_dirac_matrix(catalog: BasisCatalog, L: float = 2 * math.pi) -> sp.csr_matrix:
    return _diag([dirac_energy(s, L) for s in catalog])


def q_matrix(catalog: BasisCatalog) -> sp.csr_matrix:
    return _diag([charge_q(s) for s in catalog])


def q5_matrix(catalog: BasisCatalog) -> sp.csr_matrix:
    return _diag([charge_q5(s) for s in catalog])


def unexcited_state(P: int, window: Optional[ModeWindow] = None) -> FockState:
    """The lowest-energy state with axial charge ``2P``."""
    if P >= 0:
        state = FockState(tuple(range(P)), tuple(range(-(P - 1), 1)) if P else ())
    else:
        state = FockState(tuple(range(P, 0)), tuple(range(1, -P + 1)))
    if window is not None:
        if abs(P) > window.max_pairs or state.max_abs_mode() > window.lam:
            raise ValueError(f"Omega_{P} does not fit in {window}")
    return state


Action = Callable[[FockState], Dict[FockState, complex]]


def apply_action(action: Action, combo: Dict[FockState, complex],
                 catalog: Optional[BasisCatalog] = None) -> Dict[FockState, complex]:
    """Apply an action to a linear combination, optionally projecting."""
    out: Dict[FockState, complex] = {}
    for s, c in combo.items():
        for t, d in action(s).items():
            if catalog is not None and t not in catalog.lookup:
                continue
            out[t] = out.get(t, 0) + c * d
    return {t: c for t, c in out.items() if c != 0}


def assemble(action: Action, domain: BasisCatalog,
             codomain: Optional[BasisCatalog] = None) -> sp.csr_matrix:
    """Sparse matrix of ``P_codomain . action`` restricted to ``domain``."""
    codomain = domain if codomain is None else codomain
    rows, cols, vals = [], [], []
    lookup = codomain.lookup
    for j, s in enumerate(domain.states):
        for t, c in action(s).items():
            i = lookup.get(t)
            if i is not None and c != 0:
                rows.append(i)
                cols.append(j)
                vals.append(c)
    return sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)),
                         shape=(len(codomain), len(domain)))


def exact_columns(catalog: BasisCatalog, words: Iterable[Sequence[Action]],
                  columns: Optional[Iterable[int]] = None) -> np.ndarray:
    """Columns on which truncated products equal the exact action.

    A *word* is a product of actions written left to right.  For column ``s``
    the truncated evaluation projects onto the catalog after every factor; the
    exact evaluation projects only at the end.  The column is marked exact when
    the two agree for every word.  Final-state leakage is irrelevant to any
    matrix identity compared inside the catalog, so only intermediate leakage
    that flows back into the catalog disqualifies a column.
    """
    words = [tuple(w) for w in words]
    n = len(catalog)
    mask = np.zeros(n, dtype=bool)
    idx = range(n) if columns is None else columns
    for j in idx:
        s = catalog.states[j]
        ok = True
        for word in words:
            vec = {s: 1}
            leaked = False
            for act in reversed(word[1:]):
                vec = apply_action(act, vec)
                if not leaked and any(t not in catalog.lookup for t in vec):
                    leaked = True
            if not leaked:
                continue
            exact = apply_action(word[0], vec, catalog)
            tvec = {s: 1}
            for act in reversed(word):
                tvec = apply_action(act, tvec, catalog)
            keys = set(exact) | set(tvec)
            if any(abs(exact.get(k, 0) - tvec.get(k, 0)) > 1e-13 for k in keys):
                ok = False
                break
        mask[j] = ok
    return mask
