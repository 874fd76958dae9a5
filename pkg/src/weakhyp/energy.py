"""Weights and energy functionals driving the analyticity diagnostics.

The two-regime weight multiplier is Phi(t, xi) = C0 * min{(T-t)^-1 + 1, <xi>}
with bracket <xi> = 1 + |xi|: hyperbolic-regime growth (T-t)^-1 + 1 while
(T-t)^-1 < |xi|, Kovalewskian cap <xi> afterwards; the regimes switch at
tau(xi) = T - 1/|xi|.  Its tail integral rho(t, xi) = int_t^T Phi(s, xi) ds
has the closed form implemented in rho_weight, continuous across the switch
and bounded by a constant times log<xi> + 1.

On top of rho sit the mode energies (quasi-symmetrizer quadratic forms), the
weighted spectral sums E_j and moments M_j, the generating-function
super-energies F and G with the shrinking radius schedule, and the two
run-time monitors: the master linear estimate (sup ratio R, fitted loss
exponent N) and the continuation threshold G < L.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .equation import CoefficientSpec
from .quasisym import build_quasi_symmetrizer
from .spectral import SpectralState, Trajectory
from .symbol import characteristic_roots

__all__ = [
    "WeightParams",
    "GevreyOrderWarning",
    "EnergyConsistencyError",
    "bracket",
    "phi_weight",
    "rho_weight",
    "gevrey_weight",
    "star_epsilon",
    "mode_energy",
    "cinf_energy",
    "derivative_energies",
    "initial_weighted_moments",
    "super_energies",
    "SuperEnergyReport",
    "phi_growth",
    "radius_schedule",
    "ContinuationReport",
    "continuation_check",
    "MasterEstimateReport",
    "master_estimate_check",
    "EnergyInequalityReport",
    "energy_inequality_check",
    "EnergyLedger",
    "build_energy_ledger",
]


def bracket(xi) -> np.ndarray | float:
    """Mode bracket <xi> = 1 + |xi|."""
    return 1.0 + np.abs(xi)


@dataclass(frozen=True)
class WeightParams:
    """Constants entering the weights: C0, horizon T, loss exponent N."""

    c0: float
    horizon: float
    loss_exponent: int

    def __post_init__(self):
        if not self.c0 >= 1.0:
            raise ValueError("C0 must be >= 1")
        if not self.horizon > 0.0:
            raise ValueError("horizon must be positive")
        if self.loss_exponent < 0:
            raise ValueError("loss exponent N must be nonnegative")


class GevreyOrderWarning(UserWarning):
    """Gevrey order below the sub-additivity threshold 2(m-1)."""


class EnergyConsistencyError(RuntimeError):
    """A quadratic form that must be PSD evaluated significantly negative."""


def phi_weight(t: float, xi, params: WeightParams):
    """Phi(t, xi) = C0 * min{(T-t)^-1 + 1, 1 + |xi|}."""
    ax = np.abs(np.asarray(xi, dtype=float))
    with np.errstate(divide="ignore"):
        hyper = 1.0 / (params.horizon - t) + 1.0
    out = params.c0 * np.minimum(hyper, 1.0 + ax)
    return float(out) if out.ndim == 0 else out


def rho_weight(t: float, xi, params: WeightParams):
    """Closed form of int_t^T Phi(s, xi) ds, valid for 0 <= t <= T.

    Where t >= tau(xi) (or |xi| <= 1/T, so tau <= 0) the integrand is the
    constant C0<xi> and the integral is C0<xi>(T-t); otherwise the hyperbolic
    stretch contributes C0[ln((T-t)|xi|) + (tau-t)] and the Kovalewskian tail
    contributes C0<xi>/|xi|.
    """
    c0, T = params.c0, params.horizon
    ax = np.abs(np.asarray(xi, dtype=float))
    scalar = ax.ndim == 0
    ax = np.atleast_1d(ax).astype(float)
    out = np.empty_like(ax)
    with np.errstate(divide="ignore"):
        tau = T - 1.0 / ax
    kov = (ax <= 1.0 / T) | (t >= tau)
    out[kov] = c0 * (1.0 + ax[kov]) * (T - t)
    hyp = ~kov
    if hyp.any():
        axh = ax[hyp]
        out[hyp] = c0 * (np.log((T - t) * axh) + (tau[hyp] - t)) + c0 * (1.0 + axh) / axh
    return float(out[0]) if scalar else out


def gevrey_weight(t: float, xi, k: int, lam, m: int, horizon: float):
    """Gevrey-regime weight |xi|^(2(m-1)/k) * int_t^T Lambda + (T - t).

    ``lam`` is either a constant or a sampled profile (times, values) that is
    integrated by the trapezoid rule over [t, T].  Sub-additivity in xi needs
    k >= 2(m-1); smaller k warns (GevreyOrderWarning) but still computes.
    """
    if k < 1:
        raise ValueError("Gevrey order k must be >= 1")
    threshold = 2 * (m - 1)
    if k < threshold:
        warnings.warn(
            f"Gevrey order k={k} is below the sub-additivity threshold {threshold}; "
            "the weight is no longer sub-additive in xi",
            GevreyOrderWarning,
            stacklevel=2,
        )
    if np.isscalar(lam) or isinstance(lam, (int, float)):
        integral = float(lam) * (horizon - t)
    else:
        ts, vals = lam
        fine = np.linspace(t, horizon, 513)
        integral = float(np.trapezoid(np.interp(fine, ts, vals), fine))
    ax = np.abs(np.asarray(xi, dtype=float))
    out = ax ** (2.0 * (m - 1) / k) * integral + (horizon - t)
    return float(out) if out.ndim == 0 else out


def star_epsilon(modes) -> np.ndarray | float:
    """Per-mode epsilon choice 1/<k>."""
    return 1.0 / bracket(modes)


def mode_energy(q: np.ndarray, v: np.ndarray) -> float:
    """Quadratic form (Q v, v), checked real and nonnegative.

    Values more negative than -1e-12 * |Q| |v|^2 raise
    EnergyConsistencyError; rounding-level negatives clip to 0.
    """
    q = np.asarray(q)
    v = np.asarray(v)
    value = float(np.real(np.vdot(v, q @ v)))
    scale = float(np.linalg.norm(q) * np.vdot(v, v).real)
    if value < -1e-12 * max(scale, 1e-300):
        raise EnergyConsistencyError(
            f"quadratic form value {value:.6g} negative beyond tolerance (scale {scale:.6g})"
        )
    return max(value, 0.0)


def _guarded_sum(log_factors: np.ndarray, mags: np.ndarray) -> float:
    """sum(mags * exp(log_factors)) with a log-domain path for large exponents."""
    mask = mags > 0.0
    if not mask.any():
        return 0.0
    lf = log_factors[mask]
    mg = mags[mask]
    if float(lf.max()) <= 700.0:
        return float((mg * np.exp(lf)).sum())
    logs = lf + np.log(mg)
    mx = float(logs.max())
    total_log = mx + math.log(float(np.exp(logs - mx).sum()))
    return math.exp(total_log) if total_log <= 709.0 else float("inf")


def cinf_energy(state: SpectralState, params: WeightParams) -> float:
    """Weighted spectral sum sum_k e^(rho(t,k)) |V_k| (unit mode spacing)."""
    rho = np.atleast_1d(rho_weight(state.t, state.modes, params))
    return _guarded_sum(rho, state.v_norms())


def derivative_energies(
    state: SpectralState,
    params: WeightParams,
    j_max: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ([E_j], [M_j]) for j = 0..j_max.

    E_j = sum_k e^rho |k|^j |V_k| (the state of the j-th spatial derivative
    carries the extra (ik)^j) and M_j = sum_k |k|^j |V_k|.
    """
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    rho = np.atleast_1d(rho_weight(state.t, state.modes, params))
    norms = state.v_norms()
    kmag = np.abs(state.modes).astype(float)
    e = np.empty(j_max + 1)
    mo = np.empty(j_max + 1)
    w = np.ones_like(kmag)
    for j in range(j_max + 1):
        if j > 0:
            w = w * kmag
        mo[j] = float((w * norms).sum())
        e[j] = _guarded_sum(rho, w * norms)
    return e, mo


def initial_weighted_moments(
    state0: SpectralState,
    params: WeightParams,
    j_max: int,
) -> np.ndarray:
    """A_j = sum_k |k|^j <k>^N |V_k(0)| for j = 0..j_max."""
    norms = state0.v_norms()
    kmag = np.abs(state0.modes).astype(float)
    loss = bracket(state0.modes) ** params.loss_exponent
    out = np.empty(j_max + 1)
    w = np.ones_like(kmag)
    for j in range(j_max + 1):
        if j > 0:
            w = w * kmag
        out[j] = float((w * loss * norms).sum())
    return out


def _factorials(j_max: int) -> np.ndarray:
    return np.array([math.factorial(j) for j in range(j_max + 1)], dtype=float)


def _series_with_tail(coeffs: np.ndarray, r: float, fact: np.ndarray) -> tuple[float, float]:
    """sum_j coeffs[j] r^j / j! and the last-term/total truncation ratio."""
    j = np.arange(coeffs.size, dtype=float)
    with np.errstate(over="ignore"):
        terms = coeffs * np.power(r, j) / fact
    total = float(terms.sum())
    tail = float(abs(terms[-1]) / total) if total > 0.0 else 0.0
    return total, tail


def _sequence_power_rows(b: np.ndarray, nu: int) -> np.ndarray:
    """Row-wise nu-fold sequence convolution truncated to the input length."""
    length = b.shape[-1]
    if nu == 1:
        return b.copy()
    out = np.empty_like(b)
    for i in range(b.shape[0]):
        acc = b[i]
        for _ in range(nu - 1):
            acc = np.convolve(acc, b[i])[:length]
        out[i] = acc
    return out


def _cumtrapz(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cumulative trapezoid along axis 0, starting at 0."""
    out = np.zeros_like(y)
    if y.shape[0] > 1:
        dx = np.diff(x)
        panels = 0.5 * (y[1:] + y[:-1]) * dx.reshape(-1, *([1] * (y.ndim - 1)))
        out[1:] = np.cumsum(panels, axis=0)
    return out


@dataclass
class SuperEnergyReport:
    """Generating-function energies over time with truncation audit."""

    times: np.ndarray
    f_values: np.ndarray
    g_values: np.ndarray
    alpha: np.ndarray  # (S, j_max+1) majorant coefficients
    f_tail: np.ndarray
    g_tail: np.ndarray
    diverging: bool
    tail_threshold: float


def super_energies(
    times: np.ndarray,
    e_series: np.ndarray,
    initial_moments: np.ndarray,
    r_schedule: np.ndarray,
    nu: int,
    tail_threshold: float = 0.1,
) -> SuperEnergyReport:
    """F(t) = sum_j E_j r^j/j! and G(t) = sum_j alpha_j r^j/j!.

    alpha_j(t) = A_j + j! * int_0^t c_j(s) ds with c the nu-fold convolution
    of the sequence (E_j/j!)_j over compositions h_1+...+h_nu = j (empty for
    nu = 0, identity for nu = 1); integrals by trapezoid on the recorded
    samples.  The tail ratio (last term over partial sum) is reported per
    time; exceeding ``tail_threshold`` anywhere sets the divergence flag.
    """
    times = np.asarray(times, dtype=float)
    e_series = np.asarray(e_series, dtype=float)
    r_schedule = np.asarray(r_schedule, dtype=float)
    S, width = e_series.shape
    fact = _factorials(width - 1)
    if nu == 0:
        c = np.zeros_like(e_series)
    else:
        c = _sequence_power_rows(e_series / fact, nu)
    alpha = initial_moments[None, :] + fact[None, :] * _cumtrapz(c, times)
    f_values = np.empty(S)
    g_values = np.empty(S)
    f_tail = np.empty(S)
    g_tail = np.empty(S)
    for i in range(S):
        f_values[i], f_tail[i] = _series_with_tail(e_series[i], r_schedule[i], fact)
        g_values[i], g_tail[i] = _series_with_tail(alpha[i], r_schedule[i], fact)
    diverging = bool((f_tail > tail_threshold).any() or (g_tail > tail_threshold).any())
    return SuperEnergyReport(
        times=times,
        f_values=f_values,
        g_values=g_values,
        alpha=alpha,
        f_tail=f_tail,
        g_tail=g_tail,
        diverging=diverging,
        tail_threshold=tail_threshold,
    )


def phi_growth(c_const: float, m_const: float, l_const: float, nu: int) -> float:
    """Radius decay rate phi(L) = C^nu (M + L)^(nu - 1)."""
    if nu < 0:
        raise ValueError("nu must be >= 0")
    base = m_const + l_const
    if nu == 0 and base <= 0.0:
        raise ValueError("M + L must be positive when nu = 0")
    return c_const**nu * base ** (nu - 1)


def radius_schedule(r0: float, l_const: float, m_const: float, c_const: float, nu: int, t):
    """r(t) = r0 * exp(-phi(L) t)."""
    rate = phi_growth(c_const, m_const, l_const, nu)
    out = r0 * np.exp(-rate * np.asarray(t, dtype=float))
    return float(out) if out.ndim == 0 else out


@dataclass
class ContinuationReport:
    """Verdict of the G < L continuation threshold plus the sharp bound."""

    passed: bool
    first_crossing: float | None
    degenerate_at_start: bool
    l_const: float
    g0: float
    g_max: float
    sharp_passed: bool
    sharp_excess: float
    cm_power: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "first_crossing": self.first_crossing,
            "degenerate_at_start": self.degenerate_at_start,
            "L": self.l_const,
            "G0": self.g0,
            "G_max": self.g_max,
            "sharp_passed": self.sharp_passed,
            "sharp_excess": self.sharp_excess,
            "CM_power": self.cm_power,
        }


def continuation_check(
    times: np.ndarray,
    g_values: np.ndarray,
    l_const: float,
    cm_power: float,
) -> ContinuationReport:
    """Locate the first time G(t) >= L (pass iff none) and audit the sharp bound.

    The sharp interior bound is G(t) <= G(0) + cm_power * t pointwise, allowed
    a 1e-9 relative tolerance; cm_power is (C M)^nu from the ledger.  A start
    already at or above L is reported as degenerate.
    """
    times = np.asarray(times, dtype=float)
    g_values = np.asarray(g_values, dtype=float)
    g0 = float(g_values[0])
    crossing = g_values >= l_const
    first = float(times[int(np.argmax(crossing))]) if crossing.any() else None
    degenerate = bool(crossing[0])
    sharp_bound = g0 + cm_power * times
    excess = float((g_values - sharp_bound).max())
    scale = max(1.0, abs(g0), float(np.abs(g_values).max()))
    return ContinuationReport(
        passed=not crossing.any(),
        first_crossing=first,
        degenerate_at_start=degenerate,
        l_const=l_const,
        g0=g0,
        g_max=float(g_values.max()),
        sharp_passed=bool(excess <= 1e-9 * scale),
        sharp_excess=excess,
        cm_power=cm_power,
    )


@dataclass
class MasterEstimateReport:
    """Measured sup ratio of the weighted linear estimate and the fitted N."""

    ratio: float
    n_used: int
    fitted_n: int | None
    c_target: float
    per_time: np.ndarray
    ratios_by_n: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ratio": self.ratio,
            "N": self.n_used,
            "fitted_N": self.fitted_n,
            "C_target": self.c_target,
            "ratios_by_N": {str(k): v for k, v in sorted(self.ratios_by_n.items())},
        }


def master_estimate_check(
    trajectory: Trajectory,
    params: WeightParams,
    c_target: float = 10.0,
) -> MasterEstimateReport:
    """Sup over (t, k) of e^rho |V_k(t)| / (<k>^N |V_k(0)| + <k>^(m-1) I_k(t)).

    I_k(t) = int_0^t e^(rho(s,k)) |F_k(s)| ds by trapezoid on the snapshots;
    the denominator is floored at 1e-300.  Also scans integer exponents
    N' in [m-1, 2m+4] and reports the smallest one whose sup ratio is at most
    ``c_target`` (None when the scan fails).
    """
    times = trajectory.times
    modes = trajectory.modes
    m = trajectory.order
    v_norms = np.linalg.norm(trajectory.v_series(), axis=2)  # (S, 2K+1)
    f_mags = np.abs(trajectory.forcings)
    rho = np.stack([np.atleast_1d(rho_weight(float(t), modes, params)) for t in times])
    weighted_v = np.exp(rho) * v_norms
    forcing_integral = _cumtrapz(np.exp(rho) * f_mags, times)
    br = np.atleast_1d(bracket(modes)).astype(float)
    base = br ** (m - 1) * forcing_integral
    v0 = v_norms[0]

    def sup_ratio(n: int) -> tuple[float, np.ndarray]:
        den = np.maximum(br**n * v0[None, :] + base, 1e-300)
        per_time = (weighted_v / den).max(axis=1)
        return float(per_time.max()), per_time

    ratios_by_n: dict[int, float] = {}
    fitted: int | None = None
    for n in range(max(m - 1, 0), 2 * m + 5):
        ratios_by_n[n], _ = sup_ratio(n)
        if fitted is None and ratios_by_n[n] <= c_target:
            fitted = n
    n_used = params.loss_exponent
    ratio, per_time = sup_ratio(n_used)
    ratios_by_n[n_used] = ratio
    return MasterEstimateReport(
        ratio=ratio,
        n_used=n_used,
        fitted_n=fitted,
        c_target=c_target,
        per_time=per_time,
        ratios_by_n=ratios_by_n,
    )


@dataclass
class EnergyInequalityReport:
    """Finite-difference audit of the per-mode differential inequality."""

    max_ratio: float
    passed: bool
    slack: float
    c0: float
    checked: int

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "passed": self.passed,
            "slack": self.slack,
            "C0": self.c0,
            "checked": self.checked,
        }


def energy_inequality_check(
    trajectory: Trajectory,
    problem: CoefficientSpec,
    params: WeightParams,
    slack: float = 0.05,
) -> EnergyInequalityReport:
    """Check d/dt sqrt(E*) <= C0((T-t)^-1 + 1) sqrt(E*) + C0 |F_k| along the run.

    E*(t, k) is the quasi-symmetrizer energy at epsilon = <k>^-1 built from
    the roots at each snapshot time.  The derivative is a centered difference
    at interior snapshot times; the verdict allows the configured relative
    slack.  Modes where both sides vanish are skipped.
    """
    times = trajectory.times
    if times.size < 3:
        raise ValueError("need at least three snapshots for interior differences")
    v = trajectory.v_series()
    f_mags = np.abs(trajectory.forcings)
    modes = trajectory.modes
    absk = np.abs(modes)
    K = trajectory.K
    S = times.size
    e_star = np.empty((S, modes.size))
    for i in range(S):
        roots = characteristic_roots(problem.coefficients_at(float(times[i])))
        qs = build_quasi_symmetrizer(roots)
        for kk in range(K + 1):
            q = qs.assemble(1.0 / (1.0 + kk))
            sel = absk == kk
            rows = v[i, sel, :]
            vals = np.einsum("ij,jl,il->i", rows.conj(), q, rows).real
            e_star[i, sel] = np.maximum(vals, 0.0)
    s_vals = np.sqrt(e_star)
    t_col = times.reshape(-1, 1)
    lhs = (s_vals[2:] - s_vals[:-2]) / (t_col[2:] - t_col[:-2])
    with np.errstate(divide="ignore"):
        growth = 1.0 / (params.horizon - times[1:-1]) + 1.0
    rhs = params.c0 * growth.reshape(-1, 1) * s_vals[1:-1] + params.c0 * f_mags[1:-1]
    tiny = 1e-300
    active = rhs > tiny
    max_ratio = 0.0
    if active.any():
        max_ratio = float((lhs[active] / rhs[active]).max())
    silent_violation = (~active) & (lhs > 1e-12)
    if silent_violation.any():
        max_ratio = float("inf")
    return EnergyInequalityReport(
        max_ratio=max_ratio,
        passed=bool(max_ratio <= 1.0 + slack),
        slack=slack,
        c0=params.c0,
        checked=int(active.sum()),
    )


@dataclass
class EnergyLedger:
    """Every recorded series and measured constant of one analysis pass."""

    times: np.ndarray
    cinf: np.ndarray
    e_j: np.ndarray  # (S, j_max+1)
    m_j: np.ndarray  # (S, j_max+1)
    f_values: np.ndarray
    g_values: np.ndarray
    f_tail: np.ndarray
    g_tail: np.ndarray
    r_values: np.ndarray
    a_moments: np.ndarray
    j_max: int
    nu: int
    c0: float
    n_exponent: int
    c_const: float
    m0: float
    k_caps: np.ndarray
    m_const: float
    l_const: float
    r0: float
    eta: float
    phi_l: float
    diverging: bool
    master: MasterEstimateReport
    continuation: ContinuationReport

    def to_dict(self) -> dict:
        return {
            "C0": self.c0,
            "N": self.n_exponent,
            "C": self.c_const,
            "M0": self.m0,
            "K_N": float(self.k_caps[self.n_exponent]),
            "M": self.m_const,
            "L": self.l_const,
            "r0": self.r0,
            "eta": self.eta,
            "phi_L": self.phi_l,
            "nu": self.nu,
            "J_max": self.j_max,
            "diverging": self.diverging,
            "tail_ratio_t0": {"F": float(self.f_tail[0]), "G": float(self.g_tail[0])},
            "master": self.master.to_dict(),
            "continuation": self.continuation.to_dict(),
        }


def default_c0(problem: CoefficientSpec, grid_points: int = 10_000) -> float:
    """max(1, sup over a fine grid of the spectral norm of A(t))."""
    ts = np.linspace(0.0, problem.horizon, grid_points)
    table = problem.coefficient_table(ts)
    m = problem.order
    mats = np.zeros((ts.size, m, m))
    for i in range(m - 1):
        mats[:, i, i + 1] = -1.0
    mats[:, m - 1, :] = table[:, ::-1]
    norms = np.linalg.svd(mats, compute_uv=False)[:, 0]
    return float(max(1.0, norms.max()))


def build_energy_ledger(
    trajectory: Trajectory,
    problem: CoefficientSpec,
    c0: float | None = None,
    n_exponent: int | None = None,
    c_const: float | None = None,
    c_target: float = 10.0,
    j_max: int = 24,
    r0: float = 0.25,
    eta: float = 1.0,
    tail_threshold: float = 0.1,
) -> EnergyLedger:
    """Assemble the full ledger for a recorded trajectory.

    Auto-resolved constants: C0 from the coefficient spectral norm, N from
    the master-estimate scan against ``c_target`` (fallback m+1), C from the
    measured sup ratio at the chosen N.  The effective initial radius is
    eta * r0.
    """
    m = trajectory.order
    T = problem.horizon
    if c0 is None:
        c0 = default_c0(problem)
    trial = WeightParams(c0=c0, horizon=T, loss_exponent=m + 1)
    master_trial = master_estimate_check(trajectory, trial, c_target)
    if n_exponent is None:
        n_exponent = master_trial.fitted_n if master_trial.fitted_n is not None else m + 1
    if n_exponent > j_max:
        raise ValueError(f"loss exponent N={n_exponent} exceeds J_max={j_max}")
    params = WeightParams(c0=c0, horizon=T, loss_exponent=n_exponent)
    master = (
        master_trial
        if n_exponent == trial.loss_exponent
        else master_estimate_check(trajectory, params, c_target)
    )
    if c_const is None:
        c_const = master.ratio

    S = trajectory.times.size
    e_j = np.empty((S, j_max + 1))
    m_j = np.empty((S, j_max + 1))
    for i in range(S):
        e_j[i], m_j[i] = derivative_energies(trajectory.state_at(i), params, j_max)
    cinf = e_j[:, 0]
    m0 = float(cinf.max())
    k_caps = m_j.max(axis=0)
    m_const = float(k_caps[n_exponent] + m0)

    a_moments = initial_weighted_moments(trajectory.state_at(0), params, j_max)
    fact = _factorials(j_max)
    r0_eff = eta * r0
    g0, _ = _series_with_tail(a_moments, r0_eff, fact)
    nu = trajectory.nu
    cm_power = (c_const * m_const) ** nu
    l_const = g0 + cm_power * T
    phi_l = phi_growth(c_const, m_const, l_const, nu)
    r_values = r0_eff * np.exp(-phi_l * trajectory.times)
    super_report = super_energies(
        trajectory.times, e_j, a_moments, r_values, nu, tail_threshold
    )
    continuation = continuation_check(
        trajectory.times, super_report.g_values, l_const, cm_power
    )
    return EnergyLedger(
        times=trajectory.times,
        cinf=cinf,
        e_j=e_j,
        m_j=m_j,
        f_values=super_report.f_values,
        g_values=super_report.g_values,
        f_tail=super_report.f_tail,
        g_tail=super_report.g_tail,
        r_values=r_values,
        a_moments=a_moments,
        j_max=j_max,
        nu=nu,
        c0=c0,
        n_exponent=n_exponent,
        c_const=c_const,
        m0=m0,
        k_caps=k_caps,
        m_const=m_const,
        l_const=l_const,
        r0=r0_eff,
        eta=eta,
        phi_l=phi_l,
        diverging=super_report.diverging,
        master=master,
        continuation=continuation,
    )
