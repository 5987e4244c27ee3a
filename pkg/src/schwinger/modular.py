"""Large gauge transformations acting on the truncated Fock space.

The generator ``G`` is defined by conjugation of ladder operators,

    b+_n -> b+_{n-1} (n != 0),   b+_0 -> c_1,
    c+_n -> c+_{n+1} (n != 0),   c+_0 -> b_{-1},

together with ``G|0> = b+_{-1} c+_1 |0>``.  The image of a basis state is
obtained by rewriting its canonical creator string with these rules and
applying the result to ``G|0>``; the fermionic sign falls out of the ladder
algebra.  The inverse uses the inverted rules and ``G^-1|0> = b+_0 c+_0 |0>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .fock import BasisCatalog, FockState, ModeWindow, apply_ladder

__all__ = ["GaugeDomainMask", "gauge_apply", "gauge_action", "gauge_matrix",
           "safe_subwindow", "TruncationLoss"]


class TruncationLoss(Exception):
    """The transformed state exists but lies outside the truncation."""


def _image_rules(direction: int):
    if direction == 1:
        def b_rule(n):
            return ("bdag", n - 1) if n != 0 else ("c", 1)

        def c_rule(n):
            return ("cdag", n + 1) if n != 0 else ("b", -1)
        vac = FockState((-1,), (1,))
    elif direction == -1:
        def b_rule(n):
            return ("bdag", n + 1) if n != -1 else ("c", 0)

        def c_rule(n):
            return ("cdag", n - 1) if n != 1 else ("b", 0)
        vac = FockState((0,), (0,))
    else:
        raise ValueError("direction must be +1 or -1")
    return b_rule, c_rule, vac


def gauge_apply(direction: int, state: FockState,
                window: Optional[ModeWindow] = None) -> Tuple[int, FockState]:
    """Image ``(sign, state)`` of a basis state under ``G`` (+1) or ``G^-1`` (-1).

    Raises :class:`TruncationLoss` if ``window`` is given and the image does
    not belong to it (modes or pair count).  The map is a bijection on basis
    states, so an algebraic zero indicates a broken sign convention and raises
    ``ArithmeticError``.
    """
    b_rule, c_rule, vac = _image_rules(direction)
    ops = [b_rule(m) for m in state.fermions] + [c_rule(n) for n in state.antifermions]
    sign, cur = 1, vac
    for kind, mode in reversed(ops):
        r = apply_ladder(kind, mode, cur)
        if r is None:
            raise ArithmeticError(f"gauge image of {state} vanished")
        sign *= r[0]
        cur = r[1]
    if window is not None:
        if cur.pairs > window.max_pairs or cur.max_abs_mode() > window.lam:
            raise TruncationLoss(f"G^{direction} {state} = {cur} leaves {window}")
    return sign, cur


@lru_cache(maxsize=2)
def gauge_action(direction: int):
    @lru_cache(maxsize=400_000)
    def action(state):
        sign, t = gauge_apply(direction, state)
        return {t: sign}
    return action


@dataclass(frozen=True, eq=False)
class GaugeDomainMask:
    """States on which ``shifts`` applications of ``G^direction`` stay in the catalog."""

    catalog: BasisCatalog
    direction: int
    shifts: int
    flags: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.flags)

    def __len__(self):
        return int(self.flags.sum())

    def __and__(self, other: "GaugeDomainMask") -> np.ndarray:
        return self.flags & other.flags


def safe_subwindow(catalog: BasisCatalog, shifts: int = 1,
                   direction: int = 1) -> GaugeDomainMask:
    if shifts < 1:
        raise ValueError("shifts must be >= 1")
    flags = np.zeros(len(catalog), dtype=bool)
    for j, s in enumerate(catalog.states):
        cur = s
        for _ in range(shifts):
            _, cur = gauge_apply(direction, cur)
            if cur not in catalog.lookup:
                break
        else:
            flags[j] = True
    return GaugeDomainMask(catalog, direction, shifts, flags)


def gauge_matrix(direction: int, catalog: BasisCatalog):
    """Signed partial permutation representing ``G^direction`` and its domain mask."""
    rows, cols, vals = [], [], []
    flags = np.zeros(len(catalog), dtype=bool)
    for j, s in enumerate(catalog.states):
        sign, t = gauge_apply(direction, s)
        i = catalog.lookup.get(t)
        if i is None:
            continue
        flags[j] = True
        rows.append(i)
        cols.append(j)
        vals.append(sign)
    n = len(catalog)
    mat = sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)), shape=(n, n))
    return mat, GaugeDomainMask(catalog, direction, 1, flags)
