"""Command-line front end.

    amariflow <subcommand> --config <path> --out <dir> [--seed N]
              [--override section.key=value ...]

Every subcommand reads one config (defaults apply when --config is
omitted), writes its outputs under --out, and prints a short summary.
Exit codes: 0 success, 1 validation failure (bad config or arguments),
2 numerical failure (operator not nonnegative, trajectory blow-up); the
failure reason is one line on stderr either way.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .energy import theta_functional
from .errors import NumericalError, ValidationError
from .ergodic import (
    GibbsTarget,
    compare_measures,
    ergodic_moments,
    rw_metropolis,
    write_moment_report_jsonl,
    write_samples_csv,
)
from .kernels import Verdict, bochner_numeric_check, gram_min_eigenvalue
from .operator import build_operator_matrix, spectral_decompose, write_spectrum_csv
from .rng import derive_rng
from .sde import (
    convergence_table,
    detect_switches,
    doss_sussmann_simulate,
    em_simulate_full,
    galerkin_simulate,
    sample_noise_increments,
    write_events_csv,
    write_trajectory_csv,
)

COMMANDS = (
    "check-kernel",
    "spectrum",
    "simulate",
    "galerkin-compare",
    "energy-trace",
    "doss-sussmann-compare",
    "gibbs-compare",
    "fig1",
)


def _load_config(args) -> cfgmod.ExperimentConfig:
    if args.config is not None:
        text = Path(args.config).read_text()
        cfg = cfgmod.parse_config(text)
    elif args.command == "fig1":
        cfg = cfgmod.preset_fig1()
    else:
        cfg = cfgmod.default_config()
    for spec in args.override:
        cfgmod.apply_override(cfg, spec)
    if args.seed is not None:
        cfg.values["noise"]["seed"] = int(args.seed)
    return cfg


def _decompose(cfg):
    kernel = cfgmod.build_kernel(cfg)
    grid = cfgmod.build_grid(cfg)
    K = build_operator_matrix(kernel, grid)
    dec = spectral_decompose(
        K,
        grid,
        rel_tol=float(cfg.get("galerkin", "rel_tol")),
        neg_tol=float(cfg.get("galerkin", "neg_tol")),
    )
    return kernel, grid, dec


def _cmd_check_kernel(cfg, out: Path) -> int:
    kernel = cfgmod.build_kernel(cfg)
    grid = cfgmod.build_grid(cfg)
    analytic = kernel.classify()
    report = {
        "family": kernel.family,
        "analytic_verdict": analytic.verdict.value,
        "analytic_witness": analytic.witness,
        "analytic_reason": analytic.reason,
        "thresholds": {},
    }
    if kernel.family == "mexican_hat_gauss":
        report["thresholds"] = {
            "s_min": math.sqrt(2.0),
            "s_max": math.sqrt(2.0) / kernel.amp,
        }
    elif kernel.family == "mexican_hat_exp":
        report["thresholds"] = {"ratio_max": kernel.gamma2 / kernel.gamma1}
    if kernel.has_density():
        numeric = bochner_numeric_check(
            kernel,
            xi_max=float(cfg.get("kernel", "xi_max")),
            n_xi=int(cfg.get("kernel", "n_xi")),
            tol=float(cfg.get("kernel", "tol")),
        )
        report["numeric_verdict"] = numeric.verdict.value
        report["numeric_witness"] = numeric.witness
        report["numeric_reason"] = numeric.reason
    else:
        report["numeric_verdict"] = None
        report["numeric_reason"] = "atomic spectrum: no density sweep"
    rng = derive_rng(int(cfg.get("noise", "seed")), 2)
    pts = rng.uniform(grid.a, grid.b, size=int(cfg.get("kernel", "gram_points")))
    report["gram_min_eigenvalue"] = gram_min_eigenvalue(kernel, pts)
    with open(out / "kernel_report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"{kernel.family}: analytic {report['analytic_verdict']}, "
        f"numeric {report['numeric_verdict']}, "
        f"gram min eigenvalue {report['gram_min_eigenvalue']:.3e}"
    )
    return 0


def _cmd_spectrum(cfg, out: Path) -> int:
    _, _, dec = _decompose(cfg)
    write_spectrum_csv(dec, out / "spectrum.csv")
    print(
        f"retained rank {dec.rank}, lambda_1 = {float(dec.lambdas[0])!r}, "
        f"threshold {float(dec.threshold)!r}"
    )
    return 0


def _cmd_simulate(cfg, out: Path) -> int:
    kernel, grid, dec = _decompose(cfg)
    gain = cfgmod.build_gain(cfg)
    noise = cfgmod.build_noise(cfg)
    u0 = cfgmod.build_u0(cfg, grid, dec)
    sim = cfgmod.build_sim(cfg, u0)
    traj = em_simulate_full(kernel, grid, gain, noise, sim, dec=dec)
    write_trajectory_csv(traj, out / "trajectory.csv")
    events = detect_switches(
        traj,
        float(cfg.get("output", "switch_lower")),
        float(cfg.get("output", "switch_upper")),
    )
    write_events_csv(events, out / "events.csv")
    print(
        f"{sim.n_steps} steps to t = {sim.effective_t_final!r}; "
        f"final mean {traj.mean_series[-1]:.6g}; {len(events)} switch events"
    )
    return 0


def _cmd_galerkin_compare(cfg, out: Path) -> int:
    kernel, grid, dec = _decompose(cfg)
    gain = cfgmod.build_gain(cfg)
    noise = cfgmod.build_noise(cfg)
    u0 = cfgmod.build_u0(cfg, grid, dec)
    sim = cfgmod.build_sim(cfg, u0)
    n_list = [int(n) for n in cfg.get("galerkin", "n_list")]
    rows = convergence_table(kernel, grid, dec, gain, noise, sim, n_list)
    import csv

    with open(out / "galerkin_convergence.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_modes", "sup_error"])
        for n, err in rows:
            w.writerow([n, repr(err)])
    for n, err in rows:
        print(f"N = {n:4d}: sup error {err:.6e}")
    return 0


def _cmd_energy_trace(cfg, out: Path) -> int:
    kernel, grid, dec = _decompose(cfg)
    gain = cfgmod.build_gain(cfg)
    noise = cfgmod.build_noise(cfg)
    u0 = cfgmod.build_u0(cfg, grid, dec)
    # Deterministic trace: force eps = 0, project the start into S so the
    # Lyapunov value is defined, record every step.
    u0p = dec.reconstruct(dec.coeffs(u0))
    sim = cfgmod.build_sim(cfg, u0p)
    sim = type(sim)(
        alpha=sim.alpha,
        epsilon=0.0,
        dt=sim.dt,
        t_final=sim.t_final,
        u0=u0p,
        record_every=1,
        clamp=sim.clamp,
    )
    traj = em_simulate_full(kernel, grid, gain, noise, sim, dec=dec)
    theta = traj.diagnostics["theta"]
    import csv

    with open(out / "energy.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "theta"])
        for t, th in zip(traj.times, theta):
            w.writerow([repr(float(t)), repr(float(th))])
    increases = np.diff(theta)
    max_inc = float(increases.max()) if increases.size else 0.0
    print(
        f"theta start {float(theta[0])!r}, end {float(theta[-1])!r}, "
        f"max step increase {max_inc:.3e} "
        f"({'monotone' if max_inc <= 0.0 else 'not monotone'})"
    )
    return 0


def _cmd_ds_compare(cfg, out: Path) -> int:
    kernel, grid, dec = _decompose(cfg)
    gain = cfgmod.build_gain(cfg)
    noise = cfgmod.build_noise(cfg)
    u0 = cfgmod.build_u0(cfg, grid, dec)
    sim = cfgmod.build_sim(cfg, u0)
    halvings = int(cfg.get("sim", "ds_halvings"))
    if halvings < 1:
        raise ValidationError(f"need ds_halvings >= 1, got {halvings}")
    steps = sim.n_steps
    fine = sample_noise_increments(
        noise, dec, sim.dt / 2**halvings, steps * 2**halvings
    )
    rows = []
    for j in range(halvings + 1):
        dt_j = sim.dt / 2**j
        path = fine.coarsen(2 ** (halvings - j))
        sim_j = type(sim)(
            alpha=sim.alpha,
            epsilon=sim.epsilon,
            dt=dt_j,
            t_final=sim.t_final,
            u0=sim.u0,
            record_every=sim.record_every * 2**j,
            clamp=sim.clamp,
        )
        ref = em_simulate_full(kernel, grid, gain, noise, sim_j, dec=dec, path=path)
        ds = doss_sussmann_simulate(dec, gain, noise, sim_j, path=path)
        diff = ref.states - ds.states @ dec.eigenfields.T
        sup = float(np.sqrt(grid.h * np.sum(diff * diff, axis=1)).max())
        rows.append((dt_j, sup))
    import csv

    with open(out / "ds_compare.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dt", "sup_discrepancy", "ratio_vs_next_finer"])
        for j, (dt_j, sup) in enumerate(rows):
            ratio = rows[j][1] / rows[j + 1][1] if j + 1 < len(rows) and rows[j + 1][1] > 0 else ""
            w.writerow([repr(dt_j), repr(sup), repr(ratio) if ratio != "" else ""])
            print(
                f"dt = {dt_j:.6g}: sup discrepancy {sup:.6e}"
                + (f", shrink ratio {ratio:.3f}" if ratio != "" else "")
            )
    return 0


def _cmd_gibbs_compare(cfg, out: Path) -> int:
    kernel, grid, dec = _decompose(cfg)
    gain = cfgmod.build_gain(cfg)
    noise = cfgmod.build_noise(cfg)
    if noise.mode != "spectral" or noise.rule != "b_sq_eq_k":
        raise ValidationError(
            "the invariant-measure comparison is defined for the reversible "
            "noise rule b_sq_eq_k"
        )
    N = int(cfg.get("gibbs", "n_modes"))
    alpha = float(cfg.get("sim", "alpha"))
    eps = float(cfg.get("sim", "epsilon"))
    target = GibbsTarget(dec=dec, gain=gain, alpha=alpha, epsilon=eps, n_modes=N)
    samples, acc = rw_metropolis(
        target,
        steps=int(cfg.get("gibbs", "mcmc_steps")),
        step_scale=float(cfg.get("gibbs", "step_scale")),
        seed=noise.seed,
        burn_in=int(cfg.get("gibbs", "burn_in")),
    )
    write_samples_csv(samples, out / "samples.csv")

    u0 = cfgmod.build_u0(cfg, grid, dec)
    sim = cfgmod.build_sim(cfg, u0)
    sim = type(sim)(
        alpha=alpha,
        epsilon=eps,
        dt=sim.dt,
        t_final=float(cfg.get("gibbs", "sde_t")),
        u0=u0,
        record_every=int(cfg.get("gibbs", "sde_record_every")),
        clamp=sim.clamp,
    )
    traj = galerkin_simulate(dec, gain, noise, sim, n_modes=N)
    m_mcmc = ergodic_moments(samples)
    m_sde = ergodic_moments(traj, burn_in=int(cfg.get("gibbs", "sde_burn_in")))
    report = compare_measures(m_mcmc, m_sde)
    write_moment_report_jsonl(report, out / "moment_report.jsonl")
    print(
        f"MCMC acceptance {acc:.3f}; max |z| = {report.max_abs_z:.3f} "
        f"({'agree' if report.passed else 'DISAGREE'} at 3 SE)"
    )
    return 0


def _cmd_fig1(cfg, out: Path) -> int:
    return _cmd_simulate(cfg, out)


_DISPATCH = {
    "check-kernel": _cmd_check_kernel,
    "spectrum": _cmd_spectrum,
    "simulate": _cmd_simulate,
    "galerkin-compare": _cmd_galerkin_compare,
    "energy-trace": _cmd_energy_trace,
    "doss-sussmann-compare": _cmd_ds_compare,
    "gibbs-compare": _cmd_gibbs_compare,
    "fig1": _cmd_fig1,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="amariflow",
        description="Stochastic neural field dynamics as a nonlocal gradient flow.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="config file path")
        p.add_argument("--out", type=str, default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override noise seed")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override one config value (repeatable)",
        )
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return _DISPATCH[args.command](cfg, out)
    except ValidationError as e:
        print(f"error: {type(e).__name__}: {' '.join(str(e).split())}", file=sys.stderr)
        return 1
    except NumericalError as e:
        print(f"error: {type(e).__name__}: {' '.join(str(e).split())}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: FileNotFound: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
