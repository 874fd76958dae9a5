"""Fourier-side integration of the mode-coupled companion system.

Each mode k of the periodic problem obeys a scalar ODE of order m; the state
stored per mode is the time-derivative chain (u_k, u_k', ..., u_k^(m-1)).
The companion vector V_k = ((ik)^(m-1) u_k, (ik)^(m-2) u_k', ..., u_k^(m-1))
is a derived view: for k != 0 the chain evolution is exactly similar to
V' = -ik A(t) V + F, and at k = 0, where the leading components of V vanish
identically, the chain still carries u_0 and its derivatives, which the
convolution nonlinearity needs.

Time stepping is fixed-step classical RK4.  The linear part per mode has
purely imaginary eigenvalues ik * (characteristic roots), so the stability
guard bounds dt * (1 + max spectral radius of A(t)) * K by STABILITY_LIMIT,
comfortably inside RK4's imaginary-axis interval.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .equation import CoefficientSpec
from .exprdsl import Expression, evaluate_on_grid

__all__ = [
    "STABILITY_LIMIT",
    "StabilityError",
    "BlowUpError",
    "SpectralState",
    "Trajectory",
    "companion_matrix",
    "assemble_state",
    "convolution_power",
    "nonlinear_rhs",
    "step",
    "simulate",
]

# dt * (1 + max_t rho(A(t))) * K must stay below this; the RK4 imaginary-axis
# stability interval extends to |z| = 2*sqrt(2), so 2.5 leaves margin.
STABILITY_LIMIT = 2.5


class StabilityError(RuntimeError):
    """Fixed-step guard violated: the mode spectrum leaves the RK4 region."""

    def __init__(self, dt: float, radius: float, modes: int):
        self.dt = dt
        self.radius = radius
        self.modes = modes
        super().__init__(
            f"stability guard failed: dt*(1+rho)*K = {dt * (1.0 + radius) * modes:.6g} "
            f"> {STABILITY_LIMIT} (dt={dt:.6g}, spectral radius {radius:.6g}, K={modes})"
        )


class BlowUpError(RuntimeError):
    """State exceeded the blow-up ceiling (or became non-finite)."""

    def __init__(self, message: str, last_valid_time: float, trajectory: "Trajectory"):
        self.last_valid_time = last_valid_time
        self.trajectory = trajectory
        super().__init__(message)


def companion_matrix(coeffs: Sequence[float]) -> np.ndarray:
    """Companion matrix A with superdiagonal -1 and last row (a_m, ..., a_1).

    With this sign convention V' + ik A V = F is exactly equivalent to the
    scalar equation; the eigenvalues of A are the negatives of the
    characteristic roots.
    """
    a = np.asarray(coeffs, dtype=float)
    m = a.size
    if m < 2:
        raise ValueError("order must be at least 2")
    mat = np.zeros((m, m))
    for i in range(m - 1):
        mat[i, i + 1] = -1.0
    mat[m - 1, :] = a[::-1]
    return mat


@dataclass
class SpectralState:
    """Truncated Fourier state: derivative chains for modes -K..K at time t."""

    K: int
    t: float
    chain: np.ndarray  # (2K+1, m) complex; row k+K holds mode k
    real_symmetric: bool = True

    @property
    def order(self) -> int:
        return self.chain.shape[1]

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    @property
    def u_hat(self) -> np.ndarray:
        return self.chain[:, 0]

    @property
    def V(self) -> np.ndarray:
        """Companion vectors, component l = (ik)^(m-1-l) * chain[:, l]."""
        m = self.order
        ik = 1j * self.modes
        out = np.empty_like(self.chain)
        for col in range(m):
            out[:, col] = ik ** (m - 1 - col) * self.chain[:, col]
        return out

    def v_norms(self) -> np.ndarray:
        """Euclidean norm of V_k per mode."""
        return np.linalg.norm(self.V, axis=1)

    def reality_defect(self) -> float:
        """max_k |V_{-k} - conj(V_k)| relative to the largest component."""
        v = self.V
        scale = float(np.abs(v).max())
        if scale == 0.0:
            return 0.0
        return float(np.abs(v[::-1] - v.conj()).max() / scale)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def default_grid_size(K: int) -> int:
    """Smallest power of two >= 4K."""
    g = 1
    while g < 4 * K:
        g *= 2
    return g


def assemble_state(
    initial: Sequence[Expression],
    K: int,
    G: int | None = None,
) -> SpectralState:
    """Sample initial data on the uniform grid over [0, 2pi) and transform.

    ``initial`` lists the expressions (in x) for u(0,.), d_t u(0,.), ...;
    entry h fills chain column h.  Requires G >= 4K and G a power of two.
    """
    if K < 1:
        raise ValueError("mode cutoff K must be >= 1")
    if G is None:
        G = default_grid_size(K)
    if G < 4 * K or not _is_power_of_two(G):
        raise ValueError(f"grid size G={G} must be a power of two with G >= 4K={4 * K}")
    m = len(initial)
    x = 2.0 * np.pi * np.arange(G) / G
    chain = np.empty((2 * K + 1, m), dtype=complex)
    for h, expr in enumerate(initial):
        values = evaluate_on_grid(expr, "x", x)
        coeff = np.fft.fft(values) / G
        chain[K:, h] = coeff[: K + 1]
        chain[:K, h] = coeff[G - K :]
    return SpectralState(K=K, t=0.0, chain=chain, real_symmetric=True)


def convolution_power(u: np.ndarray, nu: int, method: str = "direct") -> np.ndarray:
    """nu-fold discrete convolution of the truncated spectrum u, re-truncated.

    ``u`` holds modes -K..K.  Intermediates extend to nu*K before the final
    center slice, so no contribution inside |k| <= K is lost.  The "fft"
    method evaluates the same convolution on a large enough circular ring and
    agrees with "direct" to near machine precision.
    """
    if nu < 1:
        raise ValueError("nu must be >= 1")
    u = np.asarray(u)
    K = (u.size - 1) // 2
    if u.size != 2 * K + 1:
        raise ValueError("spectrum length must be odd (modes -K..K)")
    if nu == 1:
        return u.copy()
    if method == "direct":
        acc = u
        for _ in range(nu - 1):
            acc = np.convolve(acc, u)
        center = nu * K
        return acc[center - K : center + K + 1]
    if method == "fft":
        ring = 1
        while ring < 2 * nu * K + 1:
            ring *= 2
        c = np.zeros(ring, dtype=complex)
        idx = np.arange(-K, K + 1) % ring
        c[idx] = u
        full = np.fft.ifft(np.fft.fft(c) ** nu)
        return full[idx]
    raise ValueError(f"unknown convolution method: {method!r}")


def nonlinear_rhs(state: SpectralState, nu: int, method: str = "direct") -> np.ndarray:
    """Forcing vectors F_k = (0, ..., 0, f_k), f = nu-fold self-convolution of u_hat."""
    if nu < 1:
        raise ValueError("nu must be >= 1")
    out = np.zeros_like(state.chain)
    out[:, -1] = convolution_power(state.u_hat, nu, method)
    return out


def _ik_powers(modes: np.ndarray, m: int) -> np.ndarray:
    """(2K+1, m+1) table of (ik)^h for h = 0..m."""
    ik = 1j * modes
    out = np.empty((modes.size, m + 1), dtype=complex)
    out[:, 0] = 1.0
    for h in range(1, m + 1):
        out[:, h] = out[:, h - 1] * ik
    return out


def _chain_rhs(
    chain: np.ndarray,
    coeff_row: np.ndarray,
    ik_pow: np.ndarray,
    nu: int,
    conv_method: str,
) -> np.ndarray:
    m = chain.shape[1]
    out = np.empty_like(chain)
    out[:, : m - 1] = chain[:, 1:]
    top = np.zeros(chain.shape[0], dtype=complex)
    for h in range(1, m + 1):
        top -= coeff_row[h - 1] * ik_pow[:, h] * chain[:, m - h]
    if nu >= 1:
        top += convolution_power(chain[:, 0], nu, conv_method)
    out[:, m - 1] = top
    return out


def _stage_radius(stage_coeffs: np.ndarray) -> float:
    mats = np.stack([companion_matrix(row) for row in stage_coeffs])
    return float(np.abs(np.linalg.eigvals(mats)).max())


def step(
    state: SpectralState,
    dt: float,
    stage_coeffs: np.ndarray,
    nu: int,
    conv_method: str = "direct",
    guard: bool = True,
) -> SpectralState:
    """One classical RK4 step of the full mode-coupled system.

    ``stage_coeffs`` holds the coefficient rows (a_1..a_m) at the three stage
    times t, t + dt/2, t + dt.  With ``guard`` on, the step refuses to run
    outside the imaginary-axis stability region for these rows.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    stage_coeffs = np.asarray(stage_coeffs, dtype=float)
    if stage_coeffs.shape != (3, state.order):
        raise ValueError(f"stage_coeffs must have shape (3, {state.order})")
    if guard:
        radius = _stage_radius(stage_coeffs)
        if dt * (1.0 + radius) * state.K > STABILITY_LIMIT:
            raise StabilityError(dt, radius, state.K)
    ik_pow = _ik_powers(state.modes, state.order)
    y = state.chain
    k1 = _chain_rhs(y, stage_coeffs[0], ik_pow, nu, conv_method)
    k2 = _chain_rhs(y + 0.5 * dt * k1, stage_coeffs[1], ik_pow, nu, conv_method)
    k3 = _chain_rhs(y + 0.5 * dt * k2, stage_coeffs[1], ik_pow, nu, conv_method)
    k4 = _chain_rhs(y + dt * k3, stage_coeffs[2], ik_pow, nu, conv_method)
    new_chain = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return replace(state, t=state.t + dt, chain=new_chain)


@dataclass
class Trajectory:
    """Snapshots of a run: chains and forcing spectra at recorded times."""

    order: int
    K: int
    dt: float
    nu: int
    times: np.ndarray  # (S,)
    chains: np.ndarray  # (S, 2K+1, m)
    forcings: np.ndarray  # (S, 2K+1); zeros when nu = 0
    completed: bool
    abort_reason: str | None = None
    abort_time: float | None = None

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def __len__(self) -> int:
        return self.times.size

    def state_at(self, i: int) -> SpectralState:
        return SpectralState(K=self.K, t=float(self.times[i]), chain=self.chains[i])

    def v_series(self) -> np.ndarray:
        """(S, 2K+1, m) array of companion vectors at every snapshot."""
        m = self.order
        ik = 1j * self.modes
        out = np.empty_like(self.chains)
        for col in range(m):
            out[:, :, col] = ik ** (m - 1 - col) * self.chains[:, :, col]
        return out

    def u_hat_series(self) -> np.ndarray:
        return self.chains[:, :, 0]


def _sup_v_norm(chain: np.ndarray, kmag_pow: np.ndarray) -> float:
    return float(np.linalg.norm(np.abs(chain) * kmag_pow, axis=1).max())


def simulate(
    problem: CoefficientSpec,
    K: int,
    dt: float,
    G: int | None = None,
    snapshot_interval: float | None = None,
    conv_method: str = "direct",
    blowup_ceiling: float = 1e9,
) -> Trajectory:
    """Integrate the problem from t = 0 to T with fixed steps.

    The step count is round(T/dt), so the effective dt divides T exactly.
    Snapshots are recorded at t = 0, every ``snapshot_interval`` (every step
    when None), and at T.  Aborts with BlowUpError when sup_k |V_k| exceeds
    ``blowup_ceiling`` or turns non-finite (the partial trajectory rides on
    the exception), and with StabilityError before the loop if the fixed-step
    guard fails anywhere on [0, T].
    """
    T = problem.horizon
    n_steps = int(round(T / dt))
    if n_steps < 1:
        raise ValueError("dt too large: fewer than one step over the horizon")
    state = assemble_state(problem.initial, K, G)
    m = state.order
    nu = problem.nonlinearity

    stage_times = np.linspace(0.0, T, 2 * n_steps + 1)
    dt_eff = T / n_steps
    table = problem.coefficient_table(stage_times)
    mats = np.zeros((stage_times.size, m, m))
    for i in range(m - 1):
        mats[:, i, i + 1] = -1.0
    mats[:, m - 1, :] = table[:, ::-1]
    radius = float(np.abs(np.linalg.eigvals(mats)).max())
    if dt_eff * (1.0 + radius) * K > STABILITY_LIMIT:
        raise StabilityError(dt_eff, radius, K)

    if snapshot_interval is None:
        snap_every = 1
    else:
        snap_every = max(1, int(round(snapshot_interval / dt_eff)))

    kmag = np.abs(np.arange(-K, K + 1)).astype(float)
    kmag_pow = np.empty((2 * K + 1, m))
    for col in range(m):
        kmag_pow[:, col] = kmag ** (m - 1 - col)

    times: list[float] = []
    chains: list[np.ndarray] = []
    forcings: list[np.ndarray] = []

    def record(s: SpectralState) -> None:
        times.append(s.t)
        chains.append(s.chain.copy())
        if nu >= 1:
            forcings.append(convolution_power(s.u_hat, nu, conv_method))
        else:
            forcings.append(np.zeros(2 * K + 1, dtype=complex))

    def bundle(completed: bool, reason: str | None, when: float | None) -> Trajectory:
        return Trajectory(
            order=m,
            K=K,
            dt=dt_eff,
            nu=nu,
            times=np.array(times),
            chains=np.array(chains),
            forcings=np.array(forcings),
            completed=completed,
            abort_reason=reason,
            abort_time=when,
        )

    record(state)
    for i in range(n_steps):
        state = step(state, dt_eff, table[2 * i : 2 * i + 3], nu, conv_method, guard=False)
        state = replace(state, t=float(stage_times[2 * i + 2]))
        sup_v = _sup_v_norm(state.chain, kmag_pow)
        if not np.isfinite(sup_v):
            raise BlowUpError(
                f"non-finite state at t = {state.t:.6g}",
                float(stage_times[2 * i]),
                bundle(False, "non-finite", state.t),
            )
        if sup_v > blowup_ceiling:
            raise BlowUpError(
                f"blow-up: sup|V| = {sup_v:.6g} exceeds ceiling {blowup_ceiling:.6g} "
                f"at t = {state.t:.6g}",
                float(stage_times[2 * i]),
                bundle(False, "blow-up", state.t),
            )
        if (i + 1) % snap_every == 0 or i + 1 == n_steps:
            record(state)
    return bundle(True, None, None)
