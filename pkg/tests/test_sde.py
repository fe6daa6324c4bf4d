import numpy as np
import pytest
from scipy.optimize import brentq

from amariflow import (
    Field,
    GainSpec,
    Grid,
    NoisePath,
    NoiseSpec,
    SimConfig,
    TrajectoryRecord,
    convergence_table,
    detect_switches,
    doss_sussmann_simulate,
    em_simulate_full,
    galerkin_simulate,
    invariance_monitor,
    sample_noise_increments,
    write_trajectory_csv,
)
from amariflow.errors import (
    BlowUpError,
    DimensionMismatchError,
    GridMismatchError,
    NotInSError,
    RangeError,
    RankExceededError,
)
from conftest import constant_field


def zero_cfg(grid, **kw):
    base = dict(alpha=1.0, epsilon=0.0, dt=0.01, t_final=1.0,
                u0=constant_field(grid, 0.0))
    base.update(kw)
    return SimConfig(**base)


def test_noise_spec_validation():
    with pytest.raises(RangeError):
        NoiseSpec(mode="pink")
    with pytest.raises(RangeError):
        NoiseSpec(mode="white", rule="b_eq_k")
    with pytest.raises(RangeError):
        NoiseSpec(mode="spectral", rule="b_cubed")
    with pytest.raises(RangeError):
        NoiseSpec(mode="spectral", rule="custom")
    with pytest.raises(RangeError):
        NoiseSpec(mode="spectral", rule="custom", custom=(1.0, -0.5))
    with pytest.raises(RangeError):
        NoiseSpec(mode="spectral", rule="b_eq_k", custom=(1.0,))
    assert NoiseSpec(mode="white", rule=None).mode == "white"


def test_noise_diagonal_rules(gauss_setup):
    _, _, dec = gauss_setup
    lam = dec.lambdas
    assert np.array_equal(NoiseSpec(rule="b_eq_k").b_coeffs(dec), lam)
    assert np.array_equal(NoiseSpec(rule="b_sq_eq_k").b_coeffs(dec), np.sqrt(lam))
    full = tuple(float(v) for v in np.sqrt(lam))
    got = NoiseSpec(rule="custom", custom=full).b_coeffs(dec)
    assert np.array_equal(got, np.sqrt(lam))
    with pytest.raises(DimensionMismatchError):
        NoiseSpec(rule="custom", custom=(1.0, 2.0)).b_coeffs(dec)
    with pytest.raises(RangeError):
        NoiseSpec(mode="white", rule=None).b_coeffs(dec)


def test_sim_config_validation():
    g = Grid(0.0, 1.0, 8)
    u0 = constant_field(g, 0.0)
    with pytest.raises(RangeError):
        SimConfig(alpha=0.0, epsilon=0.0, dt=0.01, t_final=1.0, u0=u0)
    with pytest.raises(RangeError):
        SimConfig(alpha=1.0, epsilon=-0.1, dt=0.01, t_final=1.0, u0=u0)
    with pytest.raises(RangeError):
        SimConfig(alpha=1.0, epsilon=0.0, dt=0.0, t_final=1.0, u0=u0)
    with pytest.raises(RangeError):
        SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=-1.0, u0=u0)
    # explicit-step stability bound dt < 2/alpha
    with pytest.raises(RangeError):
        SimConfig(alpha=4.0, epsilon=0.0, dt=0.5, t_final=1.0, u0=u0)
    with pytest.raises(RangeError):
        SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=1.0, u0=u0,
                  record_every=0)
    with pytest.raises(RangeError):
        SimConfig(alpha=1.0, epsilon=0.0, dt=0.3, t_final=0.1, u0=u0)


def test_sim_config_step_rounding():
    g = Grid(0.0, 1.0, 8)
    u0 = constant_field(g, 0.0)
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.3, t_final=1.0, u0=u0)
    assert cfg.n_steps == 3
    assert abs(cfg.effective_t_final - 0.9) < 1e-15
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=1.0, u0=u0)
    assert cfg.n_steps == 100


def test_noise_path_determinism(gauss_setup):
    _, grid, dec = gauss_setup
    spec = NoiseSpec(seed=9)
    a = sample_noise_increments(spec, dec, 0.01, 50)
    b = sample_noise_increments(spec, dec, 0.01, 50)
    assert np.array_equal(a.increments, b.increments)
    c = sample_noise_increments(spec, dec, 0.01, 50, seed=10)
    assert not np.array_equal(a.increments, c.increments)
    assert a.increments.shape == (50, dec.rank)


def test_white_noise_variance_scaling():
    grid = Grid(0.0, 1.0, 8)
    spec = NoiseSpec(mode="white", rule=None, seed=3)
    dt, steps = 0.01, 100000
    path = sample_noise_increments(spec, grid, dt, steps)
    target = dt / grid.h
    band = 3.0 * np.sqrt(2.0 / steps)
    per_node = path.increments.var(axis=0)
    assert np.max(np.abs(per_node / target - 1.0)) < band
    assert abs(path.increments.var() / target - 1.0) < band


def test_spectral_increments_are_sqrt_dt_scaled(gauss_setup):
    _, _, dec = gauss_setup
    spec = NoiseSpec(seed=4)
    path = sample_noise_increments(spec, dec, 0.04, 20000)
    # raw standard increments, unscaled by eps or b
    assert abs(path.increments.var() / 0.04 - 1.0) < 0.01


def test_noise_path_cumulative_and_coarsen(gauss_setup):
    _, _, dec = gauss_setup
    path = sample_noise_increments(NoiseSpec(seed=7), dec, 0.01, 100)
    W = path.cumulative()
    assert W.shape == (101, dec.rank)
    assert np.all(W[0] == 0.0)
    assert np.allclose(W[-1], path.increments.sum(axis=0), rtol=0, atol=1e-15)
    p2 = path.coarsen(2)
    assert p2.dt == 0.02 and p2.steps == 50
    blocks = path.increments.reshape(50, 2, -1).sum(axis=1)
    assert np.array_equal(p2.increments, blocks)
    with pytest.raises(RangeError):
        path.coarsen(3)


def test_em_zero_gain_closed_form(gauss_setup):
    kernel, grid, dec = gauss_setup
    rng = np.random.default_rng(12)
    u0 = Field(grid, rng.normal(size=grid.n))
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=0.5, u0=u0,
                    record_every=50)
    tr = em_simulate_full(kernel, grid, GainSpec("zero"), NoiseSpec(), cfg)
    expect = u0.values * (1.0 - 0.01) ** 50
    assert np.max(np.abs(tr.states[-1] - expect)) < 5e-13 * np.max(np.abs(expect))


def test_em_relaxes_to_homogeneous_fixed_point(periodic_setup):
    # circulant operator: constant states evolve by the scalar recursion,
    # so the run must land on the root of alpha*c = mass*f(c)
    kernel, grid, dec = periodic_setup
    gain = GainSpec("cubic", allow_non_lipschitz=True)
    alpha = 0.1
    mass = float(np.max(dec.lambdas))
    root = brentq(lambda s: alpha * s - mass * gain.f(s), 0.5, 1.0, xtol=1e-15)
    cfg = SimConfig(alpha=alpha, epsilon=0.0, dt=0.05, t_final=80.0,
                    u0=constant_field(grid, 0.8), record_every=400)
    tr = em_simulate_full(kernel, grid, gain, NoiseSpec(), cfg, dec=dec)
    assert np.max(np.abs(tr.states[-1] - root)) < 1e-12


def test_em_stochastic_determinism(gauss_setup):
    kernel, grid, dec = gauss_setup
    cfg = SimConfig(alpha=1.0, epsilon=0.3, dt=0.01, t_final=0.5,
                    u0=constant_field(grid, 0.0), record_every=10)
    spec = NoiseSpec(seed=5)
    a = em_simulate_full(kernel, grid, GainSpec("sigmoid"), spec, cfg, dec=dec)
    b = em_simulate_full(kernel, grid, GainSpec("sigmoid"), spec, cfg, dec=dec)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.mean_series, b.mean_series)
    other = NoiseSpec(seed=6)
    c = em_simulate_full(kernel, grid, GainSpec("sigmoid"), other, cfg, dec=dec)
    assert not np.array_equal(a.states, c.states)


def test_em_requires_matching_grid_and_dec(gauss_setup):
    kernel, grid, dec = gauss_setup
    other = Grid(0.0, 1.0, 8)
    cfg = zero_cfg(other)
    with pytest.raises(GridMismatchError):
        em_simulate_full(kernel, grid, GainSpec("zero"), NoiseSpec(), cfg)
    cfg = SimConfig(alpha=1.0, epsilon=0.1, dt=0.01, t_final=0.1,
                    u0=constant_field(grid, 0.0))
    with pytest.raises(RangeError):
        em_simulate_full(kernel, grid, GainSpec("zero"), NoiseSpec(), cfg)


def test_non_lipschitz_gain_needs_optin(gauss_setup):
    kernel, grid, dec = gauss_setup
    cfg = zero_cfg(grid)
    with pytest.raises(RangeError):
        em_simulate_full(kernel, grid, GainSpec("cubic"), NoiseSpec(), cfg)


def test_blowup_raises(periodic_setup):
    kernel, grid, dec = periodic_setup
    gain = GainSpec("cubic", allow_non_lipschitz=True)
    # oversized step on the cubic: the explicit update overshoots and the
    # state leaves the trust region within a few steps
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=1.0, t_final=30.0,
                    u0=constant_field(grid, 5.0))
    with pytest.raises(BlowUpError) as err:
        em_simulate_full(kernel, grid, gain, NoiseSpec(), cfg, dec=dec)
    assert err.value.step >= 1
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=1.0,
                    u0=constant_field(grid, 20.0), clamp=10.0)
    with pytest.raises(BlowUpError) as err:
        em_simulate_full(kernel, grid, gain, NoiseSpec(), cfg, dec=dec)
    assert err.value.step == 0


def test_snapshot_thinning(gauss_setup):
    kernel, grid, dec = gauss_setup
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=0.25,
                    u0=constant_field(grid, 0.5), record_every=10)
    tr = em_simulate_full(kernel, grid, GainSpec("sigmoid"), NoiseSpec(), cfg)
    # snapshots at multiples of record_every plus the final step
    assert np.allclose(tr.times, [0.0, 0.1, 0.2, 0.25], atol=1e-12)
    assert tr.states.shape == (4, grid.n)
    assert tr.mean_series.size == cfg.n_steps + 1
    snap_idx = (np.round(tr.times / cfg.dt)).astype(int)
    assert np.allclose(tr.diagnostics["mean"], tr.mean_series[snap_idx],
                       rtol=0, atol=1e-15)


def test_galerkin_full_rank_matches_dense_run(gauss_setup):
    kernel, grid, dec = gauss_setup
    gain = GainSpec("sigmoid")
    cfg = SimConfig(alpha=1.0, epsilon=0.2, dt=0.01, t_final=1.0,
                    u0=Field(grid, dec.eigenfields[:, 0]), record_every=10)
    spec = NoiseSpec(seed=7)
    path = sample_noise_increments(spec, dec, cfg.dt, cfg.n_steps)
    ref = em_simulate_full(kernel, grid, gain, spec, cfg, dec=dec, path=path)
    tr = galerkin_simulate(dec, gain, spec, cfg, path=path)
    ugrid = tr.states @ dec.eigenfields.T
    diff = ref.states - ugrid
    sup = np.max(np.sqrt(grid.h * np.sum(diff * diff, axis=1)))
    assert sup <= 1e-8
    assert tr.projection_residual < 1e-12


def test_galerkin_mode_bounds(gauss_setup):
    _, grid, dec = gauss_setup
    cfg = zero_cfg(grid)
    with pytest.raises(RangeError):
        galerkin_simulate(dec, GainSpec("zero"), NoiseSpec(), cfg, n_modes=0)
    with pytest.raises(RankExceededError):
        galerkin_simulate(dec, GainSpec("zero"), NoiseSpec(), cfg,
                          n_modes=dec.rank + 1)
    with pytest.raises(RangeError):
        galerkin_simulate(dec, GainSpec("zero"),
                          NoiseSpec(mode="white", rule=None), cfg)


def test_truncation_errors_shrink_with_rank(gauss_setup):
    kernel, grid, dec = gauss_setup
    gain = GainSpec("sigmoid")
    cfg = SimConfig(alpha=1.0, epsilon=0.2, dt=0.01, t_final=0.5,
                    u0=Field(grid, dec.eigenfields[:, 0]), record_every=5)
    rows = convergence_table(kernel, grid, dec, gain, NoiseSpec(seed=7), cfg,
                             [1, 4, dec.rank])
    errs = [e for _, e in rows]
    assert errs[0] >= errs[1] >= errs[2]
    assert errs[2] <= 1e-8


def test_ou_mode_variance(gauss_setup):
    # zero gain, one mode: the exact discrete stationary variance of the
    # recursion c' = (1 - a*dt)c + eps*b*dW is eps^2 b^2 dt / (1-(1-a*dt)^2)
    # = eps^2 b^2 / (2a) / (1 - a*dt/2)
    _, grid, dec = gauss_setup
    alpha, eps, dt = 1.0, 0.5, 0.02
    cfg = SimConfig(alpha=alpha, epsilon=eps, dt=dt, t_final=400.0,
                    u0=constant_field(grid, 0.0), record_every=1)
    tr = galerkin_simulate(dec, GainSpec("zero"), NoiseSpec(seed=42), cfg,
                           n_modes=1)
    sample = tr.states[500:, 0].var()
    theory = eps**2 * dec.lambdas[0] / (2.0 * alpha) / (1.0 - alpha * dt / 2.0)
    assert abs(sample / theory - 1.0) < 0.15


def test_custom_zero_coefficient_silences_mode(gauss_setup):
    # a mode with b_i = 0 receives no noise: under zero gain it follows the
    # deterministic linear recursion exactly while other modes diffuse
    _, grid, dec = gauss_setup
    custom = list(np.sqrt(dec.lambdas))
    custom[1] = 0.0
    spec = NoiseSpec(rule="custom", custom=tuple(custom), seed=11)
    u0 = Field(grid, dec.eigenfields[:, 0] + dec.eigenfields[:, 1])
    cfg = SimConfig(alpha=1.0, epsilon=0.5, dt=0.01, t_final=1.0, u0=u0,
                    record_every=1)
    tr = galerkin_simulate(dec, GainSpec("zero"), spec, cfg)
    ks = np.arange(tr.times.size)
    silent = tr.states[:, 1]
    expect = dec.coeffs(u0)[1] * (1.0 - 0.01) ** ks
    assert np.max(np.abs(silent - expect)) < 1e-14
    noisy = tr.states[:, 0]
    expect0 = dec.coeffs(u0)[0] * (1.0 - 0.01) ** ks
    assert np.max(np.abs(noisy - expect0)) > 1e-3


def test_pathwise_transform_reduces_to_deterministic(gauss_setup):
    _, grid, dec = gauss_setup
    gain = GainSpec("sigmoid")
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=1.0,
                    u0=Field(grid, dec.eigenfields[:, 0]), record_every=10)
    g = galerkin_simulate(dec, gain, NoiseSpec(), cfg)
    d = doss_sussmann_simulate(dec, gain, NoiseSpec(), cfg)
    assert np.max(np.abs(g.states - d.states)) <= 1e-12


def test_pathwise_transform_tracks_dense_run(gauss_setup):
    # at matched small dt the two discretizations agree to O(dt)
    kernel, grid, dec = gauss_setup
    gain = GainSpec("sigmoid")
    spec = NoiseSpec(seed=13)
    cfg = SimConfig(alpha=1.0, epsilon=0.3, dt=0.002, t_final=0.5,
                    u0=Field(grid, dec.eigenfields[:, 0]), record_every=25)
    path = sample_noise_increments(spec, dec, cfg.dt, cfg.n_steps)
    em = em_simulate_full(kernel, grid, gain, spec, cfg, dec=dec, path=path)
    ds = doss_sussmann_simulate(dec, gain, spec, cfg, path=path)
    ugrid = ds.states @ dec.eigenfields.T
    diff = em.states - ugrid
    sup = np.max(np.sqrt(grid.h * np.sum(diff * diff, axis=1)))
    assert sup < 0.05


def test_path_mismatch_is_rejected(gauss_setup):
    kernel, grid, dec = gauss_setup
    spec = NoiseSpec(seed=7)
    cfg = SimConfig(alpha=1.0, epsilon=0.2, dt=0.01, t_final=0.5,
                    u0=constant_field(grid, 0.0))
    wrong_dt = sample_noise_increments(spec, dec, 0.02, cfg.n_steps)
    with pytest.raises(RangeError):
        galerkin_simulate(dec, GainSpec("zero"), spec, cfg, path=wrong_dt)
    short = sample_noise_increments(spec, dec, 0.01, 10)
    with pytest.raises(DimensionMismatchError):
        galerkin_simulate(dec, GainSpec("zero"), spec, cfg, path=short)


def test_invariance_monitor_modes_and_grid(gauss_setup):
    kernel, grid, dec = gauss_setup
    gain = GainSpec("sigmoid")
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=1.0,
                    u0=Field(grid, 2.0 * dec.eigenfields[:, 0]),
                    record_every=10)
    tr = galerkin_simulate(dec, gain, NoiseSpec(), cfg)
    sup, series = invariance_monitor(dec, tr)
    assert series.size == tr.times.size
    assert sup == series.max()
    # the dense deterministic run stays in S and the monitor accepts it
    em = em_simulate_full(kernel, grid, gain, NoiseSpec(), cfg, dec=dec)
    sup_em, series_em = invariance_monitor(dec, em)
    assert abs(sup_em - sup) < 1e-8 * max(sup, 1.0)


def test_invariance_monitor_rejects_white_noise_states(gauss_setup):
    kernel, grid, dec = gauss_setup
    spec = NoiseSpec(mode="white", rule=None, seed=2)
    cfg = SimConfig(alpha=1.0, epsilon=0.5, dt=0.01, t_final=0.2,
                    u0=constant_field(grid, 0.0), record_every=5)
    tr = em_simulate_full(kernel, grid, GainSpec("zero"), spec, cfg, dec=dec)
    with pytest.raises(NotInSError):
        invariance_monitor(dec, tr)


def test_zero_gain_decay_sup_at_start(gauss_setup):
    _, grid, dec = gauss_setup
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=1.0,
                    u0=Field(grid, dec.eigenfields[:, 0]), record_every=10)
    tr = galerkin_simulate(dec, GainSpec("zero"), NoiseSpec(), cfg)
    sup, series = invariance_monitor(dec, tr)
    assert sup == series[0]
    assert np.all(np.diff(series) < 0.0)


def test_trajectory_record_validation():
    g = Grid(0.0, 1.0, 4)
    with pytest.raises(RangeError):
        TrajectoryRecord(kind="grid", times=np.array([0.0, 0.0]),
                         states=np.zeros((2, 4)), dt=0.1, seed=0,
                         integrator="em_full", grid=g)
    with pytest.raises(DimensionMismatchError):
        TrajectoryRecord(kind="grid", times=np.array([0.0, 0.1]),
                         states=np.zeros((3, 4)), dt=0.1, seed=0,
                         integrator="em_full", grid=g)


def test_detect_switches():
    g = Grid(0.0, 1.0, 4)
    means = np.array([0.0, 0.6, 0.7, -0.6, -0.1, 0.8])
    tr = TrajectoryRecord(kind="grid", times=np.arange(6) * 0.1,
                          states=np.zeros((6, 4)), dt=0.1, seed=0,
                          integrator="em_full", grid=g, mean_series=means)
    events = detect_switches(tr, -0.5, 0.5)
    assert len(events) == 2
    (t1, d1), (t2, d2) = events
    assert d1 == "down" and abs(t1 - 0.3) < 1e-12
    assert d2 == "up" and abs(t2 - 0.5) < 1e-12
    flat = TrajectoryRecord(kind="grid", times=np.arange(3) * 0.1,
                            states=np.zeros((3, 4)), dt=0.1, seed=0,
                            integrator="em_full", grid=g,
                            mean_series=np.full(3, 0.2))
    assert detect_switches(flat, -0.5, 0.5) == []
    with pytest.raises(RangeError):
        detect_switches(flat, 0.5, -0.5)


def test_trajectory_csv_roundtrip(gauss_setup, tmp_path):
    _, grid, dec = gauss_setup
    cfg = SimConfig(alpha=1.0, epsilon=0.0, dt=0.01, t_final=0.1,
                    u0=Field(grid, dec.eigenfields[:, 0]), record_every=5)
    tr = galerkin_simulate(dec, GainSpec("sigmoid"), NoiseSpec(), cfg)
    out = tmp_path / "traj.csv"
    write_trajectory_csv(tr, out)
    lines = out.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[:5] == ["t", "mean", "h_norm", "hminus1_norm", "theta"]
    assert header[5] == "c_1"
    assert len(lines) == tr.times.size + 1
    first = np.array([float(v) for v in lines[1].split(",")])
    assert first[0] == tr.times[0]
    assert np.array_equal(first[5:], tr.states[0])
