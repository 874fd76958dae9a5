"""Characteristic roots, hyperbolicity and the root-separation condition.

The characteristic polynomial at time t is

    lam^m + a_1(t) lam^(m-1) + ... + a_m(t) = 0.

Weak hyperbolicity means all roots are real (coincidences allowed).  The
separation condition bounds, over all pairs of distinct indices,

    (lam_i^2 + lam_j^2) / (lam_i - lam_j)^2

which tolerates roots that coincide at zero but not elsewhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .equation import CoefficientSpec

__all__ = [
    "NonHyperbolicError",
    "UnsupportedOrderError",
    "DiamReport",
    "DiscriminantResult",
    "characteristic_roots",
    "diam_ratio",
    "check_diam",
    "discriminant_check",
]


class NonHyperbolicError(ValueError):
    """A characteristic root has an imaginary part above tolerance."""

    def __init__(self, max_imag: float, tol: float, t: float | None = None):
        at = "" if t is None else f" at t = {t!r}"
        super().__init__(
            f"non-real characteristic root{at}: |Im| = {max_imag:.3e} exceeds tol = {tol:.3e}"
        )
        self.max_imag = max_imag
        self.tol = tol
        self.t = t


class UnsupportedOrderError(ValueError):
    """Discriminant reformulations are implemented for m = 2 and m = 3 only."""


def characteristic_roots(coeffs: Sequence[float], tol: float | None = None) -> np.ndarray:
    """Real roots of lam^m + a_1 lam^(m-1) + ... + a_m, sorted ascending.

    Roots are extracted as eigenvalues of a balanced companion matrix.  If any
    root has |Im| > tol the polynomial is not (weakly) hyperbolic and
    :class:`NonHyperbolicError` is raised.  Default tolerance:
    1e-8 * (1 + max |a_h|).
    """
    a = np.asarray(coeffs, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("coefficient vector must be one-dimensional and non-empty")
    if tol is None:
        tol = 1e-8 * (1.0 + float(np.abs(a).max()))
    roots = np.roots(np.concatenate(([1.0], a)))
    max_imag = float(np.abs(roots.imag).max()) if roots.size else 0.0
    if max_imag > tol:
        raise NonHyperbolicError(max_imag, tol)
    return np.sort(roots.real)


def diam_ratio(roots: Sequence[float]) -> float:
    """Largest pairwise separation ratio; conventions for coinciding pairs.

    A pair coinciding at zero contributes 0; a coinciding nonzero pair makes
    the ratio infinite.
    """
    r = np.asarray(roots, dtype=float)
    best = 0.0
    for i, j in itertools.combinations(range(r.size), 2):
        num = r[i] ** 2 + r[j] ** 2
        den = (r[i] - r[j]) ** 2
        if den == 0.0:
            if num == 0.0:
                continue
            return float("inf")
        best = max(best, num / den)
    return best


@dataclass
class DiamReport:
    """Separation-condition verdict on a time grid."""

    grid: np.ndarray
    ratios: np.ndarray
    sup_ratio: float
    satisfied: bool
    failure_times: np.ndarray

    def to_dict(self) -> dict:
        return {
            "grid": [float(t) for t in self.grid],
            "M": [float(v) for v in self.ratios],
            "M_sup": float(self.sup_ratio),
            "satisfied": bool(self.satisfied),
            "failure_times": [float(t) for t in self.failure_times],
        }


def check_diam(
    spec: CoefficientSpec,
    grid: Sequence[float],
    tol: float | None = None,
) -> DiamReport:
    """Evaluate the separation ratio along a time grid.

    The grid must lie inside [0, T].  Non-hyperbolicity at any grid time
    propagates as :class:`NonHyperbolicError` with the offending time.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or grid.min() < 0.0 or grid.max() > spec.horizon:
        raise ValueError("grid must be non-empty and contained in [0, T]")
    ratios = np.empty(grid.size)
    for i, t in enumerate(grid):
        coeffs = spec.coefficients_at(float(t))
        try:
            roots = characteristic_roots(coeffs, tol=tol)
        except NonHyperbolicError as exc:
            raise NonHyperbolicError(exc.max_imag, exc.tol, t=float(t)) from None
        ratios[i] = diam_ratio(roots)
    finite = np.isfinite(ratios)
    sup_ratio = float(ratios.max()) if finite.all() else float("inf")
    return DiamReport(
        grid=grid,
        ratios=ratios,
        sup_ratio=sup_ratio,
        satisfied=bool(finite.all()),
        failure_times=grid[~finite],
    )


@dataclass(frozen=True)
class DiscriminantResult:
    """Discriminant and the order-specific right-hand side at one time."""

    order: int
    delta: float
    rhs: float
    ratio: float

    def holds(self, c: float) -> bool:
        return self.delta >= 0.0 and self.ratio >= c

    def to_dict(self) -> dict:
        return {
            "m": self.order,
            "delta": self.delta,
            "rhs": self.rhs,
            "ratio": self.ratio,
        }


def discriminant_check(coeffs: Sequence[float]) -> DiscriminantResult:
    """Discriminant-based separation check for m = 2 and m = 3.

    m = 2:  delta = a1^2 - 4 a2,            rhs = a1^2
    m = 3:  delta = -4 a2^3 - 27 a3^2 + a1^2 a2^2 - 4 a1^3 a3 + 18 a1 a2 a3,
            rhs = (a1 a2 - 9 a3)^2

    In both cases delta equals the product of squared root differences.  The
    ratio is delta/rhs with the conventions: rhs = 0 with delta > 0 gives
    +inf, both zero gives 1, rhs = 0 with delta < 0 gives -inf.
    """
    a = np.asarray(coeffs, dtype=float)
    if a.size == 2:
        a1, a2 = a
        delta = a1 * a1 - 4.0 * a2
        rhs = a1 * a1
    elif a.size == 3:
        a1, a2, a3 = a
        delta = (
            -4.0 * a2**3
            - 27.0 * a3**2
            + a1**2 * a2**2
            - 4.0 * a1**3 * a3
            + 18.0 * a1 * a2 * a3
        )
        rhs = (a1 * a2 - 9.0 * a3) ** 2
    else:
        raise UnsupportedOrderError(f"discriminant check supports m in {{2, 3}}, got m = {a.size}")
    if rhs == 0.0:
        if delta == 0.0:
            ratio = 1.0
        else:
            ratio = float("inf") if delta > 0.0 else float("-inf")
    else:
        ratio = delta / rhs
    return DiscriminantResult(order=int(a.size), delta=float(delta), rhs=float(rhs), ratio=float(ratio))
