"""Command-line front end.

Subcommands: steady, spectrum, evolve, verify, sweep.  Exit codes: 0 on
success, 1 for config/validation problems, 2 for numerical failures (the
typed status is printed), 3 when `verify` finds a violated identity.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import evolution, stability, steady, storage
from .config import RunConfig, parse_config
from .errors import ParseError, TriJunctionError, ValidationError


def _load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _network_for(cfg: RunConfig, domain, tensions):
    if cfg.network is not None:
        return storage.read_network(cfg.network)
    guess = steady.SteadyGuess(p=cfg.guess_p, phi=cfg.guess_phi, gauge=cfg.gauge)
    return steady.find_stationary(domain, tensions, guess)


def _cmd_steady(args) -> int:
    cfg = _load_config(args.config)
    domain = cfg.make_domain()
    tensions = cfg.make_tensions()
    guess = steady.SteadyGuess(p=cfg.guess_p, phi=cfg.guess_phi, gauge=cfg.gauge)
    network = steady.find_stationary(domain, tensions, guess)
    storage.write_network(network, args.out)
    res = np.abs(steady.steady_residual(
        domain, tensions, steady.SteadyGuess(p=tuple(network.p_star), phi=cfg.gauge or cfg.guess_phi))).max()
    print(f"junction p = ({network.p_star[0]:.12g}, {network.p_star[1]:.12g})")
    print(f"lengths    = {network.lengths}")
    print(f"h          = {network.h_star}")
    print(f"residual   = {res:.3e}")
    print(f"network block written to {args.out}")
    return 0


def _cmd_spectrum(args) -> int:
    cfg = _load_config(args.config)
    domain = cfg.make_domain()
    tensions = cfg.make_tensions()
    network = _network_for(cfg, domain, tensions)
    result = stability.max_eigenvalue(network, tensions, cfg.spectrum_n)
    verdict = stability.stability_criterion(network.lengths, network.h_star, tensions)
    print(f"lambda_max = {result.lambda_max:.12g}  (n = {cfg.spectrum_n})")
    print(f"verdict    = {verdict.verdict}  [{verdict.case}]")
    if verdict.criterion_value is not None:
        print(f"criterion  = {verdict.criterion_value:.12g}")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("branch,sigma,phi\n")
        for i in range(3):
            sigma = np.linspace(0.0, network.lengths[i], result.n + 1)
            for s, v in zip(sigma, result.eigenfunction[i]):
                fh.write(f"{i + 1},{s:.17g},{v:.17g}\n")
    print(f"eigenfunction written to {args.out}")
    return 0


def _run_once(cfg: RunConfig, output_path) -> evolution.Trajectory:
    domain = cfg.make_domain()
    tensions = cfg.make_tensions()
    network = _network_for(cfg, domain, tensions)
    dt = cfg.dt
    if dt is None:
        dt = 0.45 * float(np.min(network.lengths / cfg.n) ** 2)
    econf = evolution.EvolveConfig(
        dt=dt, t_end=cfg.t_end, n=cfg.n, newton_tol=cfg.newton_tol,
        newton_max=cfg.newton_max, output_every=cfg.output_every,
        det_m_floor=cfg.det_m_floor, amplitude_cap=cfg.amplitude_cap,
    )
    init = evolution.initial_state(
        network, domain, tensions, econf, kind=cfg.perturbation_type,
        amplitude=cfg.perturbation_amplitude,
        cosine_coefficients=cfg.perturbation_coefficients,
    )
    traj = evolution.run(network, domain, tensions, init, econf)
    storage.write_trajectory(traj.records, output_path)
    return traj


def _cmd_evolve(args) -> int:
    cfg = _load_config(args.config)
    traj = _run_once(cfg, cfg.output)
    last = traj.records[-1]
    print(f"status  = {traj.status}" + (f"  ({traj.message})" if traj.message else ""))
    print(f"records = {len(traj.records)}, final t = {last.t:.6g}")
    print(f"E = {last.E:.12g}, |kappa|_L2^2 = {last.kappa_l2_sq:.6e}")
    print(f"trajectory written to {cfg.output}")
    return 0 if traj.status == "completed" else 2


def _cmd_verify(args) -> int:
    rows = storage.read_trajectory(args.trajectory)
    if len(rows) < 3:
        print("verify: need at least three records")
        return 3
    t = np.array([r.t for r in rows])
    E = np.array([r.E for r in rows])
    k2 = np.array([r.kappa_l2_sq for r in rows])
    failures = []
    cols = {
        "kappa_l2_sq": k2,
        "kappa_s_l2_sq": np.array([r.kappa_s_l2_sq for r in rows]),
        "kappa_ss_l2_sq": np.array([r.kappa_ss_l2_sq for r in rows]),
    }
    for name, vals in cols.items():
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            failures.append(f"{name} has negative or non-finite entries")
    if not np.all(np.isfinite(E)):
        failures.append("E has non-finite entries")
    if np.any(np.diff(E) > 1e-12):
        k = int(np.argmax(np.diff(E)))
        failures.append(f"energy increases between records {k} and {k + 1}")
    dEdt = (E[2:] - E[:-2]) / (t[2:] - t[:-2])
    law = np.abs(dEdt + k2[1:-1])
    law_tol = args.res_tol * max(1.0, float(k2.max()))
    if law.max() > law_tol:
        failures.append(
            f"energy law residual {law.max():.3e} exceeds {law_tol:.3e}"
        )
    for name in ("res_junction", "res_flux", "res_outer", "res_perp"):
        vals = np.array([getattr(r, name) for r in rows])
        if vals.max() > args.res_tol:
            failures.append(f"{name} reaches {vals.max():.3e} > {args.res_tol:.3e}")
    if failures:
        for msg in failures:
            print(f"verify: FAIL: {msg}")
        return 3
    print(f"verify: OK ({len(rows)} records, final t = {t[-1]:.6g})")
    return 0


def _cmd_sweep(args) -> int:
    cfg_text = Path(args.config).read_text(encoding="utf-8")
    values = [v for v in args.values.split(",") if v.strip()]
    worst = 0
    base = Path(parse_config(cfg_text).output)
    for val in values:
        cfg = parse_config(cfg_text)
        if not hasattr(cfg, _SWEEPABLE.get(args.param, "")):
            print(f"sweep: unknown parameter {args.param!r}")
            return 1
        attr = _SWEEPABLE[args.param]
        kind = type(getattr(cfg, attr) if getattr(cfg, attr) is not None else 0.0)
        setattr(cfg, attr, kind(val) if kind is not type(None) else float(val))
        out = base.with_name(f"{base.stem}_{args.param}_{val}{base.suffix}")
        traj = _run_once(cfg, out)
        last = traj.records[-1]
        print(
            f"{args.param} = {val}: status = {traj.status}, final t = {last.t:.6g}, "
            f"|kappa|^2 = {last.kappa_l2_sq:.6e} -> {out}"
        )
        if traj.status != "completed":
            worst = max(worst, 2)
    return worst


_SWEEPABLE = {
    "dt": "dt",
    "n": "n",
    "t_end": "t_end",
    "amplitude": "perturbation_amplitude",
    "output_every": "output_every",
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="trijunction",
        description="Triple-junction curvature-flow networks: stationary states, "
                    "stability, evolution, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", help="solve for a stationary network")
    p.add_argument("config")
    p.add_argument("--out", default="network.txt")
    p.set_defaults(func=_cmd_steady)

    p = sub.add_parser("spectrum", help="maximal eigenvalue and stability verdict")
    p.add_argument("config")
    p.add_argument("--out", default="eigenfunction.csv")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("evolve", help="integrate the flow and write a trajectory")
    p.add_argument("config")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("verify", help="check identities on a trajectory file")
    p.add_argument("trajectory")
    p.add_argument("--res-tol", type=float, default=1e-2)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="re-run evolve over a parameter list")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=sorted(_SWEEPABLE))
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except TriJunctionError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
