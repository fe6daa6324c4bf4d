"""Explicit integrators for the stochastic field dynamics.

    dU = (-alpha U + K F(U)) dt + eps B dW

Three routes to the same law:

* `em_simulate_full`: Euler-Maruyama on the grid, dense (or FFT) K.
* `galerkin_simulate`: Euler-Maruyama on the leading N mode coefficients;
  at N = rank it is the full dynamics in the eigenbasis.
* `doss_sussmann_simulate`: pathwise transform Y = V - eps*B*W, with Y
  advanced by the deterministic gradient flow evaluated on the shifted
  state.  The transformed drift reads the frozen noise path at the *right*
  edge of each Euler step: left-edge evaluation telescopes back to exactly
  the EM recursion, which would make step-halving comparisons vacuous,
  while right-edge evaluation is an equally consistent scheme with a
  genuine O(dt) pathwise gap.  At eps = 0 both coincide.

Noise is sampled once per run as a NoisePath and can be shared, truncated
to fewer modes, or block-summed to a coarser step, so that comparisons
between integrators see the same Brownian increments.

White-on-grid noise scales node increments by sqrt(dt/h): then <dW, v>_H
has variance dt*||v||_H^2, the cylindrical normalization.  Spectral noise
streams one standard N(0, dt) increment per retained mode, scaled by
eps*b_i with b from the diagonal rule.

Every trajectory keeps a full-resolution spatial-mean series (one float per
step) next to the thinned state snapshots, so hysteresis switch detection
never misses a transition between snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .energy import GainSpec
from .errors import (
    BlowUpError,
    DimensionMismatchError,
    GridMismatchError,
    NotInSError,
    RangeError,
    RankExceededError,
)
from .kernels import Kernel
from .operator import (
    DEFAULT_MEMBERSHIP_TOL,
    Field,
    Grid,
    SpectralDecomposition,
    build_operator_matrix,
    norm_h,
)
from .rng import derive_rng

NOISE_MODES = ("white", "spectral")
NOISE_RULES = ("b_eq_k", "b_sq_eq_k", "custom")

DEFAULT_CLAMP = 1e3


@dataclass(frozen=True)
class NoiseSpec:
    """Noise shape: white on the grid, or diagonal in the eigenbasis."""

    mode: str = "spectral"
    rule: str | None = "b_sq_eq_k"
    custom: tuple | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in NOISE_MODES:
            raise RangeError(f"noise mode must be one of {NOISE_MODES}, got {self.mode!r}")
        if self.mode == "white":
            if self.rule is not None:
                raise RangeError("white noise takes no diagonal rule")
        else:
            if self.rule not in NOISE_RULES:
                raise RangeError(
                    f"spectral noise rule must be one of {NOISE_RULES}, got {self.rule!r}"
                )
            if self.rule == "custom":
                if self.custom is None or len(self.custom) == 0:
                    raise RangeError("custom rule needs a coefficient list")
                vals = tuple(float(v) for v in self.custom)
                if any(not np.isfinite(v) or v < 0.0 for v in vals):
                    raise RangeError("custom coefficients must be >= 0 and finite")
                object.__setattr__(self, "custom", vals)
            elif self.custom is not None:
                raise RangeError(f"rule {self.rule!r} takes no custom coefficients")

    def b_coeffs(self, dec: SpectralDecomposition) -> np.ndarray:
        """Diagonal coefficients b_i for the retained modes."""
        if self.mode != "spectral":
            raise RangeError("b_coeffs is defined for spectral noise only")
        if self.rule == "b_eq_k":
            return dec.lambdas.copy()
        if self.rule == "b_sq_eq_k":
            return np.sqrt(dec.lambdas)
        if len(self.custom) < dec.rank:
            raise DimensionMismatchError(
                f"custom rule has {len(self.custom)} coefficients, "
                f"decomposition retains {dec.rank} modes"
            )
        return np.asarray(self.custom[: dec.rank], dtype=float)


@dataclass(frozen=True)
class SimConfig:
    """Run parameters.  dt < 2/alpha keeps the linear part of the explicit
    step a contraction; enforced at construction."""

    alpha: float
    epsilon: float
    dt: float
    t_final: float
    u0: Field
    record_every: int = 1
    clamp: float = DEFAULT_CLAMP

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0.0):
            raise RangeError(f"alpha must be positive, got {self.alpha!r}")
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0.0):
            raise RangeError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise RangeError(f"dt must be positive, got {self.dt!r}")
        if not (np.isfinite(self.t_final) and self.t_final > 0.0):
            raise RangeError(f"t_final must be positive, got {self.t_final!r}")
        if self.dt >= 2.0 / self.alpha:
            raise RangeError(
                f"dt = {self.dt!r} violates the stability bound dt < 2/alpha = "
                f"{2.0 / self.alpha!r}"
            )
        if self.record_every < 1:
            raise RangeError(f"record_every must be >= 1, got {self.record_every!r}")
        if not (np.isfinite(self.clamp) and self.clamp > 0.0):
            raise RangeError(f"clamp must be positive, got {self.clamp!r}")
        if self.n_steps < 1:
            raise RangeError("t_final shorter than half a step")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def effective_t_final(self) -> float:
        """n_steps * dt; differs from t_final when it is not a multiple."""
        return self.n_steps * self.dt


@dataclass(frozen=True, eq=False)
class NoisePath:
    """Frozen standard increments: (steps, dim), each entry N(0, dt) for
    mode paths or N(0, dt/h) for grid paths.  Unscaled by eps or b."""

    kind: str  # "grid" | "modes"
    dt: float
    increments: np.ndarray
    seed: int

    @property
    def steps(self) -> int:
        return int(self.increments.shape[0])

    def cumulative(self) -> np.ndarray:
        """Path values at step edges, shape (steps + 1, dim), starting at 0."""
        out = np.zeros((self.steps + 1, self.increments.shape[1]))
        np.cumsum(self.increments, axis=0, out=out[1:])
        return out

    def coarsen(self, factor: int) -> "NoisePath":
        """Sum increments in blocks of `factor`: same Brownian path on a
        grid `factor` times coarser."""
        factor = int(factor)
        if factor < 1 or self.steps % factor != 0:
            raise RangeError(
                f"coarsening factor {factor} must divide the {self.steps} steps"
            )
        inc = self.increments.reshape(self.steps // factor, factor, -1).sum(axis=1)
        return NoisePath(self.kind, self.dt * factor, inc, self.seed)


def sample_noise_increments(
    noise: NoiseSpec,
    target,
    dt: float,
    steps: int,
    seed: int | None = None,
) -> NoisePath:
    """Draw a noise path for `target` (a Grid for white noise, a
    SpectralDecomposition for spectral noise) from one derived stream."""
    if dt <= 0.0 or steps < 1:
        raise RangeError(f"need dt > 0 and steps >= 1, got {dt!r}, {steps!r}")
    seed = noise.seed if seed is None else int(seed)
    rng = derive_rng(seed, 0)
    if noise.mode == "white":
        grid = target.grid if isinstance(target, SpectralDecomposition) else target
        if not isinstance(grid, Grid):
            raise RangeError("white noise needs a Grid target")
        std = np.sqrt(dt / grid.h)
        inc = std * rng.standard_normal((steps, grid.n))
        return NoisePath("grid", float(dt), inc, seed)
    if not isinstance(target, SpectralDecomposition):
        raise RangeError("spectral noise needs a SpectralDecomposition target")
    inc = np.sqrt(dt) * rng.standard_normal((steps, target.rank))
    return NoisePath("modes", float(dt), inc, seed)


@dataclass(eq=False)
class TrajectoryRecord:
    """Thinned states plus per-snapshot diagnostics and the full-resolution
    spatial-mean series.  kind "grid": states rows are node values; kind
    "modes": rows are mode coefficients c_1..c_N."""

    kind: str
    times: np.ndarray
    states: np.ndarray
    dt: float
    seed: int
    integrator: str
    grid: Grid | None = None
    diagnostics: dict = field(default_factory=dict)
    mean_series: np.ndarray | None = None
    projection_residual: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0.0):
            raise RangeError("snapshot times must be strictly increasing")
        if self.states.shape[0] != t.size:
            raise DimensionMismatchError("states and times lengths differ")
        for k, v in self.diagnostics.items():
            if np.asarray(v).shape[0] != t.size:
                raise DimensionMismatchError(f"diagnostic {k!r} length differs from times")


def _snapshot_indices(steps: int, record_every: int) -> np.ndarray:
    ks = set(range(0, steps + 1, record_every))
    ks.add(steps)
    return np.asarray(sorted(ks), dtype=int)


class _DiagnosticsKit:
    """Per-snapshot diagnostics: spatial mean, H norm, and when the state is
    resolvable in S, the nonlocal norm and the Lyapunov value (NaN
    otherwise; stochastic grid states have white components outside S and
    that is expected, not an error)."""

    def __init__(self, grid, dec, gain, alpha, membership_tol=DEFAULT_MEMBERSHIP_TOL):
        self.grid = grid
        self.dec = dec
        self.gain = gain
        self.alpha = alpha
        self.tol = membership_tol

    def compute_grid(self, u: np.ndarray):
        h = self.grid.h
        mean = float(u.mean())
        hn = float(np.sqrt(h) * np.linalg.norm(u))
        hm1 = theta = np.nan
        if self.dec is not None:
            c = h * (self.dec.eigenfields.T @ u)
            resid = np.sqrt(max(h * (u @ u) - float(c @ c), 0.0))
            if resid <= self.tol * max(hn, np.finfo(float).tiny):
                hm1sq = float(np.sum(c * c / self.dec.lambdas))
                hm1 = float(np.sqrt(hm1sq))
                phi = float(h * np.sum(self.gain.phi(u)))
                theta = -phi + 0.5 * self.alpha * hm1sq
        return mean, hn, hm1, theta

    def compute_modes(self, c: np.ndarray, u: np.ndarray, lambdas: np.ndarray):
        h = self.grid.h
        mean = float(u.mean())
        hn = float(np.sqrt(np.sum(c * c)))
        hm1sq = float(np.sum(c * c / lambdas))
        phi = float(h * np.sum(self.gain.phi(u)))
        theta = -phi + 0.5 * self.alpha * hm1sq
        return mean, hn, float(np.sqrt(hm1sq)), theta


def _check_gain(gain: GainSpec):
    if gain.non_lipschitz and not gain.allow_non_lipschitz:
        raise RangeError(
            "gain has no global Lipschitz constant; construct it with "
            "allow_non_lipschitz=True to accept trust-region integration"
        )


def _check_path(path: NoisePath, kind: str, dt: float, steps: int, dim: int):
    if path.kind != kind:
        raise RangeError(f"noise path kind {path.kind!r} does not fit {kind!r} run")
    if abs(path.dt - dt) > 1e-9 * dt:
        raise RangeError(f"noise path dt {path.dt!r} does not match run dt {dt!r}")
    if path.steps != steps:
        raise DimensionMismatchError(
            f"noise path has {path.steps} steps, run needs {steps}"
        )
    if path.increments.shape[1] < dim:
        raise DimensionMismatchError(
            f"noise path has {path.increments.shape[1]} components, run needs {dim}"
        )


def em_simulate_full(
    kernel: Kernel,
    grid: Grid,
    gain: GainSpec,
    noise: NoiseSpec,
    cfg: SimConfig,
    dec: SpectralDecomposition | None = None,
    path: NoisePath | None = None,
) -> TrajectoryRecord:
    """Euler-Maruyama on the full grid with dense K.

    dec is optional plumbing for diagnostics (and required to map spectral
    noise onto the grid).  Raises BlowUp when the state leaves the trust
    region |u| <= cfg.clamp.
    """
    _check_gain(gain)
    if cfg.u0.grid != grid:
        raise GridMismatchError("initial condition grid does not match run grid")
    steps = cfg.n_steps
    dt = cfg.dt
    K = build_operator_matrix(kernel, grid)
    stochastic = cfg.epsilon > 0.0
    if stochastic:
        if noise.mode == "spectral" and dec is None:
            raise RangeError(
                "spectral noise needs the decomposition to reach the grid"
            )
        if path is None:
            path = sample_noise_increments(
                noise, dec if noise.mode == "spectral" else grid, dt, steps
            )
        if noise.mode == "white":
            _check_path(path, "grid", dt, steps, grid.n)
        else:
            _check_path(path, "modes", dt, steps, dec.rank)
            spread = dec.eigenfields * noise.b_coeffs(dec)  # (n, r)

    kit = _DiagnosticsKit(grid, dec, gain, cfg.alpha)
    snaps = _snapshot_indices(steps, cfg.record_every)
    states = np.empty((snaps.size, grid.n))
    diag = np.empty((snaps.size, 4))
    mean_series = np.empty(steps + 1)

    u = cfg.u0.values.copy()
    if float(np.abs(u).max()) > cfg.clamp:
        raise BlowUpError("initial condition outside trust region", step=0, time=0.0)
    mean_series[0] = u.mean()
    si = 0
    if snaps[0] == 0:
        states[0] = u
        diag[0] = kit.compute_grid(u)
        si = 1
    for k in range(steps):
        du = dt * (-cfg.alpha * u + K @ gain.f(u))
        if stochastic:
            if noise.mode == "white":
                du += cfg.epsilon * path.increments[k]
            else:
                du += cfg.epsilon * (spread @ path.increments[k, : dec.rank])
        u = u + du
        amax = float(np.abs(u).max())
        if not np.isfinite(amax) or amax > cfg.clamp:
            raise BlowUpError(
                f"state left trust region |u| <= {cfg.clamp} at step {k + 1}",
                step=k + 1,
                time=(k + 1) * dt,
            )
        mean_series[k + 1] = u.mean()
        if si < snaps.size and snaps[si] == k + 1:
            states[si] = u
            diag[si] = kit.compute_grid(u)
            si += 1

    return TrajectoryRecord(
        kind="grid",
        times=snaps * dt,
        states=states,
        dt=dt,
        seed=path.seed if stochastic and path is not None else noise.seed,
        integrator="em_full",
        grid=grid,
        diagnostics={
            "mean": diag[:, 0],
            "h_norm": diag[:, 1],
            "hminus1_norm": diag[:, 2],
            "theta": diag[:, 3],
        },
        mean_series=mean_series,
    )


def galerkin_simulate(
    dec: SpectralDecomposition,
    gain: GainSpec,
    noise: NoiseSpec,
    cfg: SimConfig,
    n_modes: int | None = None,
    path: NoisePath | None = None,
) -> TrajectoryRecord:
    """Euler-Maruyama on the leading n_modes eigencoefficients.

    The nonlinear term is lambda_i <F(U^N), e_i>_H with U^N the
    reconstruction from the evolving coefficients.  Noise must be spectral;
    a wider shared path is truncated to the leading modes.
    """
    _check_gain(gain)
    if noise.mode != "spectral":
        raise RangeError("mode-truncated runs need spectral noise")
    N = dec.rank if n_modes is None else int(n_modes)
    if N < 1:
        raise RangeError(f"need n_modes >= 1, got {N}")
    if N > dec.rank:
        raise RankExceededError(f"{N} modes requested, {dec.rank} retained")
    steps = cfg.n_steps
    dt = cfg.dt
    stochastic = cfg.epsilon > 0.0
    if stochastic:
        if path is None:
            path = sample_noise_increments(noise, dec, dt, steps)
        _check_path(path, "modes", dt, steps, N)
        b = noise.b_coeffs(dec)[:N]

    E = dec.eigenfields[:, :N]
    lam = dec.lambdas[:N]
    h = dec.grid.h
    c = dec.coeffs(cfg.u0)[:N]
    u0_proj = E @ c
    resid = norm_h(Field(dec.grid, cfg.u0.values - u0_proj))

    kit = _DiagnosticsKit(dec.grid, dec, gain, cfg.alpha)
    snaps = _snapshot_indices(steps, cfg.record_every)
    states = np.empty((snaps.size, N))
    diag = np.empty((snaps.size, 4))
    mean_series = np.empty(steps + 1)

    u = u0_proj
    mean_series[0] = u.mean()
    si = 0
    if snaps[0] == 0:
        states[0] = c
        diag[0] = kit.compute_modes(c, u, lam)
        si = 1
    for k in range(steps):
        dc = dt * (-cfg.alpha * c + lam * (h * (E.T @ gain.f(u))))
        if stochastic:
            dc += cfg.epsilon * (b * path.increments[k, :N])
        c = c + dc
        u = E @ c
        amax = float(np.abs(u).max())
        if not np.isfinite(amax) or amax > cfg.clamp:
            raise BlowUpError(
                f"state left trust region |u| <= {cfg.clamp} at step {k + 1}",
                step=k + 1,
                time=(k + 1) * dt,
            )
        mean_series[k + 1] = u.mean()
        if si < snaps.size and snaps[si] == k + 1:
            states[si] = c
            diag[si] = kit.compute_modes(c, u, lam)
            si += 1

    return TrajectoryRecord(
        kind="modes",
        times=snaps * dt,
        states=states,
        dt=dt,
        seed=path.seed if stochastic and path is not None else noise.seed,
        integrator="galerkin",
        grid=dec.grid,
        diagnostics={
            "mean": diag[:, 0],
            "h_norm": diag[:, 1],
            "hminus1_norm": diag[:, 2],
            "theta": diag[:, 3],
        },
        mean_series=mean_series,
        projection_residual=resid,
    )


def doss_sussmann_simulate(
    dec: SpectralDecomposition,
    gain: GainSpec,
    noise: NoiseSpec,
    cfg: SimConfig,
    path: NoisePath | None = None,
) -> TrajectoryRecord:
    """Pathwise integration of Y = V - eps*B*W at full retained rank.

    Y follows dY/dt = -grad Theta(Y + eps*B*W_t) with the path read at the
    right edge of each step (see module docstring); the recorded states are
    V_k = Y_k + eps*B*W_(t_k), as mode coefficients.
    """
    _check_gain(gain)
    if noise.mode != "spectral":
        raise RangeError("the pathwise transform needs spectral noise")
    steps = cfg.n_steps
    dt = cfg.dt
    r = dec.rank
    stochastic = cfg.epsilon > 0.0
    if path is None and stochastic:
        path = sample_noise_increments(noise, dec, dt, steps)
    if stochastic:
        _check_path(path, "modes", dt, steps, r)
        bw = (cfg.epsilon * noise.b_coeffs(dec)) * path.cumulative()[:, :r]
    else:
        bw = np.zeros((steps + 1, r))

    E = dec.eigenfields
    lam = dec.lambdas
    h = dec.grid.h
    y = dec.coeffs(cfg.u0)
    resid = norm_h(Field(dec.grid, cfg.u0.values - E @ y))

    kit = _DiagnosticsKit(dec.grid, dec, gain, cfg.alpha)
    snaps = _snapshot_indices(steps, cfg.record_every)
    states = np.empty((snaps.size, r))
    diag = np.empty((snaps.size, 4))
    mean_series = np.empty(steps + 1)

    v = y + bw[0]
    uv = E @ v
    mean_series[0] = uv.mean()
    si = 0
    if snaps[0] == 0:
        states[0] = v
        diag[0] = kit.compute_modes(v, uv, lam)
        si = 1
    for k in range(steps):
        z = y + bw[k + 1]
        uz = E @ z
        # -grad Theta at the shifted state, assembled exactly like the
        # mode-space EM drift
        y = y + dt * (-cfg.alpha * z + lam * (h * (E.T @ gain.f(uz))))
        v = y + bw[k + 1]
        uv = E @ v
        amax = float(np.abs(uv).max())
        if not np.isfinite(amax) or amax > cfg.clamp:
            raise BlowUpError(
                f"state left trust region |u| <= {cfg.clamp} at step {k + 1}",
                step=k + 1,
                time=(k + 1) * dt,
            )
        mean_series[k + 1] = uv.mean()
        if si < snaps.size and snaps[si] == k + 1:
            states[si] = v
            diag[si] = kit.compute_modes(v, uv, lam)
            si += 1

    return TrajectoryRecord(
        kind="modes",
        times=snaps * dt,
        states=states,
        dt=dt,
        seed=path.seed if stochastic else noise.seed,
        integrator="doss_sussmann",
        grid=dec.grid,
        diagnostics={
            "mean": diag[:, 0],
            "h_norm": diag[:, 1],
            "hminus1_norm": diag[:, 2],
            "theta": diag[:, 3],
        },
        mean_series=mean_series,
        projection_residual=resid,
    )


def convergence_table(
    kernel: Kernel,
    grid: Grid,
    dec: SpectralDecomposition,
    gain: GainSpec,
    noise: NoiseSpec,
    cfg: SimConfig,
    n_list,
) -> list:
    """Sup-over-snapshots H-distance between mode-truncated runs and the
    full-grid reference, all driven by one shared spectral path.  Returns
    [(N, sup_error)] in the order given."""
    if noise.mode != "spectral":
        raise RangeError("the truncation study needs spectral noise")
    steps = cfg.n_steps
    path = sample_noise_increments(noise, dec, cfg.dt, steps)
    ref = em_simulate_full(kernel, grid, gain, noise, cfg, dec=dec, path=path)
    rows = []
    for N in n_list:
        N = int(N)
        tr = galerkin_simulate(dec, gain, noise, cfg, n_modes=N, path=path)
        E = dec.eigenfields[:, :N]
        diff = ref.states - tr.states @ E.T
        errs = np.sqrt(grid.h * np.sum(diff * diff, axis=1))
        rows.append((N, float(errs.max())))
    return rows


def invariance_monitor(
    dec: SpectralDecomposition,
    traj: TrajectoryRecord,
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL,
):
    """Squared nonlocal norm ||u||_-1^2 at every snapshot and its sup.

    Grid snapshots must lie in S within membership_tol (raises NotInS
    otherwise); mode snapshots are in S by construction.
    """
    if traj.kind == "modes":
        lam = dec.lambdas[: traj.states.shape[1]]
        series = np.sum(traj.states * traj.states / lam, axis=1)
    else:
        h = dec.grid.h
        series = np.empty(traj.times.size)
        for i, u in enumerate(traj.states):
            c = h * (dec.eigenfields.T @ u)
            hn = float(np.sqrt(h) * np.linalg.norm(u))
            resid = np.sqrt(max(h * (u @ u) - float(c @ c), 0.0))
            if resid > membership_tol * max(hn, np.finfo(float).tiny):
                raise NotInSError(
                    f"snapshot {i} (t = {traj.times[i]:.6g}) is outside S: "
                    f"relative residual {resid / max(hn, np.finfo(float).tiny):.3e}"
                )
            series[i] = float(np.sum(c * c / dec.lambdas))
    return float(series.max()), series


def detect_switches(traj: TrajectoryRecord, lower: float, upper: float) -> list:
    """Hysteresis regime tracking on the spatial mean.

    The regime becomes "up" when the mean reaches `upper`, "down" when it
    reaches `lower`; a completed regime change is one switching event.
    Returns [(time, direction)] with direction "up" or "down".  Uses the
    full-resolution mean series when the trajectory carries one.
    """
    if not lower < upper:
        raise RangeError(f"need lower < upper, got {lower!r}, {upper!r}")
    if traj.mean_series is not None:
        means = np.asarray(traj.mean_series, dtype=float)
        times = np.arange(means.size) * traj.dt
    else:
        means = np.asarray(traj.diagnostics["mean"], dtype=float)
        times = traj.times
    events = []
    regime = None
    for t, m in zip(times, means):
        if m >= upper and regime != "up":
            if regime == "down":
                events.append((float(t), "up"))
            regime = "up"
        elif m <= lower and regime != "down":
            if regime == "up":
                events.append((float(t), "down"))
            regime = "down"
    return events


def write_trajectory_csv(traj: TrajectoryRecord, path):
    """One row per snapshot: t, diagnostics, then state columns (u_j for
    grid runs, c_i for mode runs).  Shortest round-trip decimals."""
    import csv as _csv

    dim = traj.states.shape[1]
    if traj.kind == "grid":
        state_cols = [f"u_{j}" for j in range(dim)]
    else:
        state_cols = [f"c_{i}" for i in range(1, dim + 1)]
    diag_keys = ["mean", "h_norm", "hminus1_norm", "theta"]
    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["t", *diag_keys, *state_cols])
        for i in range(traj.times.size):
            row = [repr(float(traj.times[i]))]
            row += [repr(float(traj.diagnostics[k][i])) for k in diag_keys]
            row += [repr(float(v)) for v in traj.states[i]]
            w.writerow(row)


def write_events_csv(events, path):
    import csv as _csv

    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["t", "direction"])
        for t, direction in events:
            w.writerow([repr(float(t)), direction])
