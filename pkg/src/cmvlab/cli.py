"""Command-line front end: ``cmvlab <subcommand> [flags]``.

Exit codes: 0 success, 1 a check or acceptance condition failed, 2 bad
parameters (including unwritable output), 3 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import math
import sys

import numpy as np

from . import io as cio
from .cmv_core import build_A, build_block, dump_csv
from .errors import CMVError, NumericalFailure, ParameterError, SingularSystemError
from .localization import edl_experiment, localize_eigenfunctions, two_point_experiment
from .lyapunov_ldt import LDT_DECORATIONS, ldt_tail, lyapunov_estimate
from .model import Arc, SeedPlan, parse_distribution, sample_field, theta_grid
from .montecarlo import log_linear_fit, wilson_interval
from .spectra import eig_unitary, resonance_experiment
from .verify import CORRECTION_CHECKS, IDENTITY_CHECKS

DEFAULT_DIST = "atoms:(0.5,0.5);(-0.5,0.5)"
GLOBAL_DEFAULTS = {
    "seed": 0,
    "samples": None,
    "dist": DEFAULT_DIST,
    "arc": "0.4,2.7",
    "z_grid": 32,
    "out": None,
    "format": "csv",
    "threads": 1,
    "svg": None,
}
COMMAND_DEFAULTS = {
    "verify": {"samples": 500, "suite": "corrections", "format": "json"},
    "lyapunov": {"samples": 200, "n": "10000"},
    "ldt": {"samples": 2000, "n": "20,40,80,160", "z_grid": 1, "eps_frac": 0.5, "decoration": "all",
            "gamma_n": 10000, "gamma_samples": 200},
    "resonance": {"samples": 2000, "n": "10,20,40", "delta": 0.05, "x": 0, "restrict_arc": False},
    "regularity": {"samples": 2000, "n": "10,20,40", "z_grid": 8, "eps_frac": 0.25, "delta": 0.02, "x": 0,
                   "gamma_n": 10000, "gamma_samples": 200},
    "localize": {"samples": 1, "size": 1000},
    "edl": {"samples": 50, "size": 1000, "p": 400, "offsets": "10,20,30,40,50,60,70,80,90,100"},
    "dump": {"samples": 1, "size": 8, "matrix": "E", "z": "1", "a": 1},
}


def _ints(text) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"expected comma-separated integers, got {text!r}") from None


def _arc_bounds(text):
    try:
        lo, hi = (float(v) for v in str(text).split(","))
    except ValueError:
        raise ParameterError(f"--arc expects 'lo,hi' in radians, got {text!r}") from None
    if hi < lo:
        raise ParameterError("--arc needs lo <= hi")
    return lo, hi


def _thetas(cfg):
    lo, hi = _arc_bounds(cfg["arc"])
    return theta_grid(lo, hi, int(cfg["z_grid"]))


def _arc(cfg) -> Arc:
    lo, hi = _arc_bounds(cfg["arc"])
    return Arc(lo, hi)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    g.add_argument("--samples", type=int, help="Monte Carlo samples (verify: trials per check)")
    g.add_argument("--dist", help="coefficient law, e.g. 'atoms:(0.5,0.5);(-0.5,0.5)', 'circle:0.7', 'constant:0.5+0i'")
    g.add_argument("--arc", help="spectral arc 'lo,hi' in radians")
    g.add_argument("--z-grid", dest="z_grid", type=int, help="number of z points on the arc")
    g.add_argument("--out", help="output path (default: stdout)")
    g.add_argument("--format", choices=["csv", "json"], help="output format")
    g.add_argument("--threads", type=int, help="worker threads (results do not depend on it)")
    g.add_argument("--config", help="key = value file; command-line flags override it")
    g.add_argument("--svg", help="also write an SVG chart of the decay fit here")

    parser = argparse.ArgumentParser(prog="cmvlab", description="Random CMV matrices: identities and experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="randomised identity certification")
    p.add_argument("--suite", choices=["corrections", "identities", "all"])

    p = sub.add_parser("lyapunov", parents=[common], help="Lyapunov exponent on a z-grid")
    p.add_argument("--n", help="cocycle length")

    p = sub.add_parser("ldt", parents=[common], help="large-deviation tails of log|P|")
    p.add_argument("--n", help="comma-separated interval lengths")
    p.add_argument("--eps-frac", dest="eps_frac", type=float, help="epsilon as a fraction of gamma_hat")
    p.add_argument("--decoration", choices=["left", "right", "both", "all"])
    p.add_argument("--gamma-n", dest="gamma_n", type=int)
    p.add_argument("--gamma-samples", dest="gamma_samples", type=int)

    p = sub.add_parser("resonance", parents=[common], help="spectral separation of adjacent blocks")
    p.add_argument("--n", help="comma-separated scales")
    p.add_argument("--delta", type=float)
    p.add_argument("--x", type=int)
    p.add_argument("--restrict-arc", dest="restrict_arc", action="store_true", default=None,
                   help="only count eigenvalues on --arc")

    p = sub.add_parser("regularity", parents=[common], help="two-point regularity dichotomy")
    p.add_argument("--n", help="comma-separated scales")
    p.add_argument("--eps-frac", dest="eps_frac", type=float, help="epsilon as a fraction of nu_hat")
    p.add_argument("--delta", type=float, help="closeness exponent for singular sites")
    p.add_argument("--x", type=int)
    p.add_argument("--gamma-n", dest="gamma_n", type=int)
    p.add_argument("--gamma-samples", dest="gamma_samples", type=int)

    p = sub.add_parser("localize", parents=[common], help="eigenfunction decay profiles")
    p.add_argument("--size", type=int)

    p = sub.add_parser("edl", parents=[common], help="EDL kernel decay")
    p.add_argument("--size", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--offsets")

    p = sub.add_parser("dump", parents=[common], help="write a block matrix as CSV")
    p.add_argument("--size", type=int)
    p.add_argument("--a", type=int, help="first site of the block")
    p.add_argument("--matrix", choices=["E", "L", "M", "A"])
    p.add_argument("--z", help="spectral parameter for A, e.g. '1' or '0.6+0.8j'")
    return parser


def _config(args) -> dict:
    cfg = dict(GLOBAL_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        for k, v in cio.read_config(args.config).items():
            if k not in cfg and k != "config":
                raise ParameterError(f"unknown config key {k!r}")
            cfg[k] = v
    for k, v in vars(args).items():
        if v is not None and k not in ("command", "config"):
            cfg[k] = v
    # config values arrive as text
    for k in ("seed", "samples", "z_grid", "threads", "gamma_n", "gamma_samples", "x", "size", "p", "a"):
        if cfg.get(k) is not None:
            try:
                cfg[k] = int(cfg[k])
            except (TypeError, ValueError):
                raise ParameterError(f"{k} must be an integer, got {cfg[k]!r}") from None
    for k in ("eps_frac", "delta"):
        if cfg.get(k) is not None:
            cfg[k] = float(cfg[k])
    if isinstance(cfg.get("restrict_arc"), str):
        cfg["restrict_arc"] = cfg["restrict_arc"].lower() in ("1", "true", "yes")
    if cfg["threads"] < 1 or cfg["samples"] < 1:
        raise ParameterError("--threads and --samples must be >= 1")
    return cfg


def _write_svg(cfg, xs, ys, fit, title, xlabel, ylabel):
    if cfg.get("svg"):
        try:
            with open(cfg["svg"], "w", encoding="utf-8") as fh:
                fh.write(cio.svg_line_chart(xs, ys, title, xlabel, ylabel, fit=fit))
        except OSError as exc:
            raise ParameterError(f"cannot write {cfg['svg']!r}: {exc}") from exc


def _cmd_verify(cfg, note):
    checks = {}
    if cfg["suite"] in ("corrections", "all"):
        checks.update(CORRECTION_CHECKS)
    if cfg["suite"] in ("identities", "all"):
        checks.update({f"identity:{k}": v for k, v in IDENTITY_CHECKS.items()})
    records, ok = [], True
    for name, fn in checks.items():
        rep = fn(cfg["samples"], cfg["seed"])
        d = rep.as_dict()
        d["check_name"] = name
        records.append(d)
        ok &= rep.passed
        if not rep.passed:
            note(f"check {name} failed: {rep.failures}/{rep.trials}, worst error {rep.worst_error:.3e} "
                 f"(seed {rep.worst_seed})")
    return records, "verify", ok


def _gamma(dist, z, cfg):
    return lyapunov_estimate(dist, z, cfg["gamma_n"], cfg["gamma_samples"], cfg["seed"], cfg["threads"])


def _cmd_lyapunov(cfg, note):
    dist = parse_distribution(cfg["dist"])
    n = _ints(cfg["n"])[0]
    records = []
    for th in _thetas(cfg):
        est = lyapunov_estimate(dist, np.exp(1j * th), n, cfg["samples"], cfg["seed"], cfg["threads"])
        if est.possibly_exceptional:
            note(f"theta = {th:.6g}: possible exceptional point (gamma_hat < 5 std_err)")
        records.append({"theta": float(th), "n": n, "gamma_hat": est.gamma_hat, "std_err": est.std_err,
                        "samples": est.samples, "master_seed": cfg["seed"]})
    return records, "lyapunov", True


def _cmd_ldt(cfg, note):
    dist = parse_distribution(cfg["dist"])
    decs = sorted(LDT_DECORATIONS) if cfg["decoration"] == "all" else [cfg["decoration"]]
    ns = _ints(cfg["n"])
    records = []
    for th in _thetas(cfg):
        z = np.exp(1j * th)
        g = _gamma(dist, z, cfg)
        if g.possibly_exceptional:
            note(f"theta = {th:.6g}: possible exceptional point (gamma_hat < 5 std_err)")
        eps = cfg["eps_frac"] * g.gamma_hat
        for dec in decs:
            tails = []
            for n in ns:
                r = ldt_tail(dist, z, eps, (1, n), dec, cfg["samples"], g, cfg["seed"], cfg["threads"])
                tails.append(r.tail_prob)
                records.append({"theta": float(th), "n": n, "epsilon": eps, "decoration": dec,
                                "gamma_hat": g.gamma_hat, "std_err": g.std_err, "tail_prob": r.tail_prob,
                                "ci_lo": r.ci_lo, "ci_hi": r.ci_hi, "samples": r.samples,
                                "master_seed": cfg["seed"]})
            fit = log_linear_fit(ns, tails)
            note(f"theta = {th:.6g}, {dec}: log-linear slope {fit.slope:.4g}, R^2 {fit.r2:.3f}")
            _write_svg(cfg, ns, tails, (fit.slope, fit.intercept), f"LDT tail ({dec})", "n", "tail probability")
    return records, "ldt", True


def _cmd_resonance(cfg, note):
    dist = parse_distribution(cfg["dist"])
    arc = _arc(cfg) if cfg["restrict_arc"] else None
    records, ns, probs = [], _ints(cfg["n"]), []
    for n in ns:
        r = resonance_experiment(dist, cfg["x"], n, cfg["delta"], cfg["samples"], cfg["seed"], cfg["threads"], arc)
        probs.append(r.tail_prob)
        records.append({"n": n, "delta": r.delta, "threshold": r.threshold, "tail_prob": r.tail_prob,
                        "ci_lo": r.ci_lo, "ci_hi": r.ci_hi, "samples": r.samples, "master_seed": cfg["seed"]})
    fit = log_linear_fit(ns, probs)
    note(f"log-linear slope {fit.slope:.4g}, R^2 {fit.r2:.3f}")
    _write_svg(cfg, ns, probs, (fit.slope, fit.intercept), "resonance frequency", "n", "probability")
    return records, "resonance", True


def _cmd_regularity(cfg, note):
    dist = parse_distribution(cfg["dist"])
    zs = np.exp(1j * _thetas(cfg))
    gammas = [_gamma(dist, z, cfg) for z in zs]
    nu = min(g.gamma_hat for g in gammas)
    eps = cfg["eps_frac"] * nu
    records, ns, fr = [], _ints(cfg["n"]), []
    for n in ns:
        r = two_point_experiment(dist, cfg["x"], n, zs, eps, gammas, cfg["samples"], cfg["seed"], cfg["threads"],
                                 cfg["delta"])
        for th, cnt in zip(r.thetas, r.per_z_counts):
            lo, hi = wilson_interval(cnt, r.samples)
            records.append({"theta": th, "n": n, "eps": eps, "frac_both_singular": cnt / r.samples,
                            "ci_lo": lo, "ci_hi": hi, "samples": r.samples})
        fr.append(r.frac_any_z)
        note(f"n = {n}: both singular for some grid z in {r.frac_any_z:.4g} of samples "
             f"[{r.ci_lo:.4g}, {r.ci_hi:.4g}]; singular sites close to the spectrum: "
             f"{r.close_cases}/{r.singular_cases}; z rotations: {r.rotations}")
    fit = log_linear_fit(ns, fr)
    note(f"log-linear slope {fit.slope:.4g}, R^2 {fit.r2:.3f}")
    _write_svg(cfg, ns, fr, (fit.slope, fit.intercept), "both-singular frequency", "n", "fraction")
    return records, "regularity", True


def _cmd_localize(cfg, note):
    dist = parse_distribution(cfg["dist"])
    arc = _arc(cfg)
    records = []
    for s in range(cfg["samples"]):
        f = sample_field(dist, (1, cfg["size"]), seed=SeedPlan(cfg["seed"], s))
        for p in localize_eigenfunctions(eig_unitary(build_block(f), f), arc):
            records.append({"k": p.k, "center": p.center, "decay_rate": p.decay_rate, "fit_r2": p.fit_r2,
                            "theta_k": p.theta_k})
    if records:
        rates = np.array([r["decay_rate"] for r in records])
        good = np.mean([(r["fit_r2"] >= 0.8) and (r["decay_rate"] < 0) for r in records])
        note(f"{len(records)} profiles; median rate {np.median(rates):.4g}; R^2 >= 0.8 with negative rate: {good:.3f}")
    return records, "localization", True


def _cmd_edl(cfg, note):
    dist = parse_distribution(cfg["dist"])
    offsets = _ints(cfg["offsets"])
    r = edl_experiment(dist, cfg["size"], _arc(cfg), cfg["p"], offsets, cfg["samples"], cfg["seed"], cfg["threads"])
    records = [{"offset": row.offset, "mean_kernel": row.mean_kernel, "ci_lo": row.ci_lo, "ci_hi": row.ci_hi,
                "fitted_rate": row.fitted_rate} for row in r.rows]
    note(f"fitted rate {r.rate:.4g}, 95% CI [{r.rate_ci[0]:.4g}, {r.rate_ci[1]:.4g}], R^2 {r.r2:.3f}")
    _write_svg(cfg, offsets, [row.mean_kernel for row in r.rows], (-r.rate, math.log(r.amplitude))
               if r.amplitude > 0 else None, "EDL kernel", "|p - q|", "mean kernel")
    return records, "edl", True


def _cmd_dump(cfg, note):
    dist = parse_distribution(cfg["dist"])
    a = cfg["a"]
    f = sample_field(dist, (a, a + cfg["size"] - 1), seed=SeedPlan(cfg["seed"], 0))
    if cfg["matrix"] == "A":
        try:
            z = complex(str(cfg["z"]).replace(" ", "").replace("i", "j"))
        except ValueError:
            raise ParameterError(f"malformed --z {cfg['z']!r}") from None
        X = build_A(f, z).dense()
    else:
        X = getattr(build_block(f), cfg["matrix"])
    records = cio.parse_csv(dump_csv(X, offset=a))
    return records, "matrix", True


COMMANDS = {
    "verify": _cmd_verify,
    "lyapunov": _cmd_lyapunov,
    "ldt": _cmd_ldt,
    "resonance": _cmd_resonance,
    "regularity": _cmd_regularity,
    "localize": _cmd_localize,
    "edl": _cmd_edl,
    "dump": _cmd_dump,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    note = lambda msg: print(f"cmvlab {args.command}: {msg}", file=stderr)
    try:
        cfg = _config(args)
        records, schema, ok = COMMANDS[args.command](cfg, note)
        text = cio.emit(records, schema, cfg["format"], cfg["out"])
        if cfg["out"] in (None, "-"):
            stdout.write(text)
    except (NumericalFailure, SingularSystemError) as exc:
        print(f"cmvlab: numerical failure: {exc}", file=stderr)
        return 3
    except (ParameterError, CMVError, ValueError) as exc:
        print(f"cmvlab: error: {exc}", file=stderr)
        parser.print_usage(stderr)
        return 2
    return 0 if ok else 1


def main():  # pragma: no cover
    sys.exit(run())
