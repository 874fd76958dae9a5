"""Quasi-symmetrizer construction and its randomized/spectral certificate.

For real roots lam_1 <= ... <= lam_m the family

    Q_eps = Q_0 + eps^2 Q_1 + ... + eps^(2(m-1)) Q_{m-1}

is built layer by layer: Q_r sums, over all root subsets S of size r and all
j outside S, the rank-one matrices w w^T where w is the coefficient vector of
the polynomial  prod_{i not in S, i != j} (lam - lam_i)  (degree-l coefficient
in slot l+1, higher slots zero).

Three measured properties make the certificate:

  * two-sided spectral bounds:  eps^(2(m-1))/C <= eigs(Q_eps) <= C,
  * an eps-linear commutator bound against the companion matrix A:
        |((Q_eps A - A^T Q_eps) V, V)| <= C_comm * eps * (Q_eps V, V),
  * near-diagonality:  (Q_eps V, V) >= c_nd * sum_j q_jj |v_j|^2,
    which degenerates as eps -> 0 exactly when a nonzero root coincidence
    violates the separation condition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .symbol import diam_ratio

__all__ = [
    "QuasiSymmetrizer",
    "SymmetrizerCertificate",
    "ZeroPartition",
    "build_quasi_symmetrizer",
    "verify_quasi_symmetrizer",
    "sample_unit_vectors",
    "partition_by_zeros",
    "entry_derivative_bound",
    "glaeser_quotient",
]


@dataclass(frozen=True)
class QuasiSymmetrizer:
    """Layered symmetrizer family for one set of real roots."""

    roots: np.ndarray
    layers: tuple[np.ndarray, ...]  # Q_0 ... Q_{m-1}, each (m, m) symmetric PSD

    @property
    def order(self) -> int:
        return self.roots.size

    def assemble(self, eps: float) -> np.ndarray:
        """Q_eps = sum_r eps^(2r) Q_r."""
        q = np.zeros_like(self.layers[0])
        for r, layer in enumerate(self.layers):
            q += eps ** (2 * r) * layer
        return q


def _monic_from_roots(roots: Sequence[float], m: int) -> np.ndarray:
    """Ascending-degree coefficients of prod (lam - root), padded to length m."""
    coeffs = np.zeros(m)
    coeffs[0] = 1.0
    deg = 0
    for root in roots:
        prev = coeffs[: deg + 1].copy()
        coeffs[: deg + 2] = 0.0
        coeffs[1 : deg + 2] += prev  # lam * prev
        coeffs[: deg + 1] -= root * prev
        deg += 1
    return coeffs


def build_quasi_symmetrizer(roots: Sequence[float]) -> QuasiSymmetrizer:
    """Build the layered family from a set of real roots (any order >= 2)."""
    r = np.asarray(roots, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("need at least two real roots")
    m = r.size
    layers = []
    indices = range(m)
    for size in range(m):
        layer = np.zeros((m, m))
        for subset in itertools.combinations(indices, size):
            excluded = set(subset)
            for j in indices:
                if j in excluded:
                    continue
                factors = [r[i] for i in indices if i not in excluded and i != j]
                w = _monic_from_roots(factors, m)
                layer += np.outer(w, w)
        layers.append(layer)
    return QuasiSymmetrizer(roots=r, layers=tuple(layers))


def sample_unit_vectors(m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Complex unit vectors, rows of shape (count, m)."""
    z = rng.standard_normal((count, m)) + 1j * rng.standard_normal((count, m))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


@dataclass
class SymmetrizerCertificate:
    """Measured extremal ratios over an eps set, plus directional audits."""

    eps_set: tuple[float, ...]
    c_lower: float
    c_upper: float
    c_comm: float
    c_comm_by_eps: dict[float, float]
    c_nd: float
    c_nd_by_eps: dict[float, float]
    sampled_c_comm: float
    sampled_c_nd: float
    diam: float
    samples: int
    nd_floor: float
    qs1_pass: bool
    qs2_pass: bool
    nd_pass: bool

    @property
    def passed(self) -> bool:
        return self.qs1_pass and self.qs2_pass and self.nd_pass

    def to_dict(self) -> dict:
        return {
            "eps_set": list(self.eps_set),
            "C_lower": self.c_lower,
            "C_upper": self.c_upper,
            "C_comm": self.c_comm,
            "C_comm_by_eps": {repr(k): v for k, v in self.c_comm_by_eps.items()},
            "c_nd": self.c_nd,
            "c_nd_by_eps": {repr(k): v for k, v in self.c_nd_by_eps.items()},
            "sampled_C_comm": self.sampled_c_comm,
            "sampled_c_nd": self.sampled_c_nd,
            "diam_ratio": self.diam,
            "samples": self.samples,
            "nd_floor": self.nd_floor,
            "pass": {
                "qs1": self.qs1_pass,
                "qs2": self.qs2_pass,
                "nd": self.nd_pass,
                "all": self.passed,
            },
        }


def verify_quasi_symmetrizer(
    qs: QuasiSymmetrizer,
    a_matrix: np.ndarray,
    eps_set: Sequence[float],
    samples: np.ndarray | None = None,
    nd_floor: float = 0.0,
) -> SymmetrizerCertificate:
    """Measure the certificate constants for one symmetrizer against one A.

    Spectral bounds come from exact symmetric eigensolves; the commutator and
    near-diagonality constants are exact generalized-eigenvalue extremals,
    cross-audited on the supplied random direction ``samples`` (complex unit
    vectors, rows of length m).  Raises ``ValueError`` on dimension mismatch.
    """
    m = qs.order
    a_matrix = np.asarray(a_matrix, dtype=float)
    if a_matrix.shape != (m, m):
        raise ValueError(f"companion matrix shape {a_matrix.shape} does not match order {m}")
    eps_set = tuple(float(e) for e in eps_set)
    if any(e <= 0 for e in eps_set):
        raise ValueError("eps values must be positive")
    if samples is None:
        samples = np.zeros((0, m), dtype=complex)
    samples = np.asarray(samples, dtype=complex)
    if samples.size and samples.shape[1] != m:
        raise ValueError("sample vectors must have length m")

    c_lower = 0.0
    c_upper = 0.0
    comm_by_eps: dict[float, float] = {}
    nd_by_eps: dict[float, float] = {}
    sampled_comm = 0.0
    sampled_nd = float("inf")

    for eps in eps_set:
        q = qs.assemble(eps)
        w, u = np.linalg.eigh(q)
        lam_min, lam_max = float(w[0]), float(w[-1])
        c_upper = max(c_upper, lam_max)
        c_lower = max(c_lower, eps ** (2 * (m - 1)) / lam_min if lam_min > 0 else float("inf"))

        b = q @ a_matrix - a_matrix.T @ q  # real antisymmetric
        herm = 1j * b
        if lam_min > 0:
            inv_sqrt = u @ np.diag(w**-0.5) @ u.T
            gen_eigs = np.linalg.eigvalsh(inv_sqrt @ herm @ inv_sqrt)
            comm = float(np.abs(gen_eigs).max()) / eps
        else:
            comm = float("inf")
        comm_by_eps[eps] = comm

        d = np.diag(q)
        if (d > 0).all():
            norm = q / np.sqrt(np.outer(d, d))
            nd_by_eps[eps] = float(np.linalg.eigvalsh(norm)[0])
        else:
            nd_by_eps[eps] = 0.0

        if samples.size:
            qv = samples @ q.T
            quad = np.einsum("ij,ij->i", samples.conj(), qv).real
            bv = samples @ b.T
            comm_num = np.abs(np.einsum("ij,ij->i", samples.conj(), bv))
            good = quad > 0
            if good.any():
                sampled_comm = max(sampled_comm, float((comm_num[good] / (eps * quad[good])).max()))
                diag_quad = (np.abs(samples) ** 2 * d).sum(axis=1)
                sampled_nd = min(sampled_nd, float((quad[good] / diag_quad[good]).min()))

    c_comm = max(comm_by_eps.values())
    c_nd = min(nd_by_eps.values())
    qs1 = math.isfinite(c_lower) and math.isfinite(c_upper)
    qs2 = math.isfinite(c_comm)
    nd_ok = c_nd > nd_floor if nd_floor == 0.0 else c_nd >= nd_floor
    return SymmetrizerCertificate(
        eps_set=eps_set,
        c_lower=c_lower,
        c_upper=c_upper,
        c_comm=c_comm,
        c_comm_by_eps=comm_by_eps,
        c_nd=c_nd,
        c_nd_by_eps=nd_by_eps,
        sampled_c_comm=sampled_comm,
        sampled_c_nd=sampled_nd if samples.size else float("nan"),
        diam=diam_ratio(qs.roots),
        samples=int(samples.shape[0]),
        nd_floor=nd_floor,
        qs1_pass=qs1,
        qs2_pass=qs2,
        nd_pass=bool(nd_ok),
    )


@dataclass
class ZeroPartition:
    """Breakpoints induced by isolated zeros of symmetrizer entries."""

    breakpoints: np.ndarray  # includes both interval endpoints
    identically_zero: tuple[bool, ...]

    @property
    def interior(self) -> np.ndarray:
        return self.breakpoints[1:-1]


def partition_by_zeros(
    entry_functions: Sequence[Callable[[float], float]],
    grid: np.ndarray,
) -> ZeroPartition:
    """Locate isolated zeros of scalar entry profiles on a fine grid.

    An entry whose samples all stay below 1e-10 times its own peak is
    classified identically zero and contributes no breakpoints.  For the
    remaining entries, sign changes contribute an interpolated crossing and
    near-zero local minima of |q| contribute the grid point itself.  Returns
    the sorted union together with the interval endpoints.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise ValueError("grid too coarse for zero detection")
    lo, hi = float(grid[0]), float(grid[-1])
    sampled = [np.array([fn(float(t)) for t in grid]) for fn in entry_functions]
    scale = max((float(np.abs(v).max()) for v in sampled), default=0.0)
    cuts: list[float] = []
    ident: list[bool] = []
    for vals in sampled:
        peak = float(np.abs(vals).max())
        if peak <= 1e-10 * scale or peak == 0.0:
            ident.append(True)
            continue
        tol = 1e-10 * peak
        ident.append(False)
        sign = np.sign(vals)
        for i in range(grid.size - 1):
            a, b = vals[i], vals[i + 1]
            if sign[i] != 0 and sign[i + 1] != 0 and sign[i] != sign[i + 1]:
                # linear interpolation of the crossing
                tstar = grid[i] - a * (grid[i + 1] - grid[i]) / (b - a)
                cuts.append(float(tstar))
        mags = np.abs(vals)
        for i in range(grid.size):
            if mags[i] > tol:
                continue
            left = mags[i - 1] if i > 0 else np.inf
            right = mags[i + 1] if i < grid.size - 1 else np.inf
            if mags[i] <= left and mags[i] <= right:
                cuts.append(float(grid[i]))
    spacing = float(np.diff(grid).max())
    interior = sorted(t for t in cuts if lo + spacing / 2 < t < hi - spacing / 2)
    merged: list[float] = []
    for t in interior:
        if not merged or t - merged[-1] > spacing:
            merged.append(t)
    breakpoints = np.array([lo, *merged, hi])
    return ZeroPartition(breakpoints=breakpoints, identically_zero=tuple(ident))


def entry_derivative_bound(
    entry: Callable[[float], float],
    horizon: float,
    grid: np.ndarray,
) -> float:
    """sup over the grid of |q'(t)| (T - t) / |q(t)| for a nonvanishing entry.

    The derivative is a second-order finite difference.  If the entry dips
    below 1e-10 times its own peak anywhere on the sampled part of [0, T) the
    bound is reported as +inf (the entry vanishes, so no single-interval
    bound exists).
    """
    grid = np.asarray(grid, dtype=float)
    inside = grid[grid < horizon]
    if inside.size < 5:
        raise ValueError("grid too coarse inside [0, T)")
    vals = np.array([entry(float(t)) for t in inside])
    peak = float(np.abs(vals).max())
    if peak == 0.0 or np.abs(vals).min() <= 1e-10 * peak:
        return float("inf")
    deriv = np.gradient(vals, inside, edge_order=2)
    return float((np.abs(deriv) * (horizon - inside) / np.abs(vals)).max())


def glaeser_quotient(
    f: Callable[[float], float],
    k: int,
    grid: np.ndarray,
    theta: float | None = None,
) -> float:
    """sup of |f'| / (|f|^(1 - 1/k) * ||f||_{C^k}^theta) on the grid.

    ``theta`` defaults to 1/k.  Grid points where both |f| and |f'| are below
    tolerance are skipped (0/0 limits); points where |f| vanishes but |f'|
    does not make the quotient unbounded and the result is +inf.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    theta = 1.0 / k if theta is None else float(theta)
    grid = np.asarray(grid, dtype=float)
    vals = np.array([f(float(t)) for t in grid])
    derivs = [vals]
    for _ in range(k):
        derivs.append(np.gradient(derivs[-1], grid, edge_order=2))
    ck_norm = max(float(np.abs(d).max()) for d in derivs)
    if ck_norm == 0.0:
        return 0.0
    fprime = derivs[1]
    tol_f = 1e-10 * max(float(np.abs(vals).max()), 1e-300)
    tol_d = 1e-10 * max(float(np.abs(fprime).max()), 1e-300)
    best = 0.0
    for fv, dv in zip(vals, fprime):
        if abs(fv) <= tol_f:
            if abs(dv) <= tol_d:
                continue
            return float("inf")
        best = max(best, abs(dv) / (abs(fv) ** (1.0 - 1.0 / k) * ck_norm**theta))
    return best
