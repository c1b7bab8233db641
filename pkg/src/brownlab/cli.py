"""Batch command-line front end.

Subcommands: sample | spectrum | regularize | microstate | entropy-bound |
dt-verify | schur-check | ball-volume.  Parameters come from an optional JSON
config document; command-line flags override config fields.  Exit codes:
0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ensembles import (
    EnsembleSpec,
    Seed,
    ensemble_from_dict,
    ensemble_to_dict,
    sample,
)
from .entropy import (
    ball_log_volume,
    ball_log_volume_limit,
    diagonal_entropy,
    dt_equality_report,
    entropy_upper_bound,
    log_energy,
    selfadjoint_entropy,
    variance_bound,
)
from .matcore import EigensolverError, eigenvalues, offdiag_second_moment, schur_decompose
from .measures import (
    empirical,
    empirical_log_energy,
    is_real_measure,
    measure_from_dict,
    measure_to_dict,
    moment_distance,
)
from .microstates import (
    MicrostateSpec,
    SpectralConstraint,
    hit_rate,
    regularization_sweep,
)
from .models import MCParams, model_descriptor, model_from_dict, model_to_dict, target_table
from .report import (
    ExperimentReport,
    make_meta,
    write_eigenvalue_csv,
    write_report,
)


class ConfigError(Exception):
    """Invalid or missing configuration; the message names the offending field."""


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be a JSON object")
    return cfg


def _get(cfg: dict, args, key: str, default=None, required=False):
    """Flag value if given, else the config field, else the default.

    Keys use underscore form; the matching flag is the dashed variant.
    """
    val = getattr(args, key, None)
    if val is None:
        val = cfg.get(key, default)
    if val is None and required:
        flag = "--" + key.replace("_", "-")
        raise ConfigError(f"{key}: required (set it in the config or pass {flag})")
    return val


def _parse_pair(text: str, field: str) -> complex:
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"{field}: expected 're' or 're,im', got {text!r}")


def _parse_floats(val, field: str) -> list[float]:
    if isinstance(val, (list, tuple)):
        return [float(v) for v in val]
    try:
        return [float(p) for p in str(val).split(",") if p.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"{field}: expected comma-separated numbers, got {val!r}") from exc


def _measure_cfg(cfg: dict, args, key: str = "measure", required=False):
    d = cfg.get(key)
    flag_kind = getattr(args, key, None)
    if flag_kind is not None:
        d = {"kind": flag_kind}
        # --center/--radius shortcuts apply to the main measure only
        center = getattr(args, "center", None) if key == "measure" else None
        radius = getattr(args, "radius", None) if key == "measure" else None
        if center is not None:
            c = _parse_pair(center, f"{key}.center")
            d["center"] = c.real if flag_kind == "semicircle" else [c.real, c.imag]
        if radius is not None:
            d["radius"] = radius
        elif flag_kind in ("uniform_disk", "uniform_circle"):
            d["radius"] = 1.0
        elif flag_kind == "semicircle":
            d["radius"] = 2.0
    if d is None:
        if required:
            raise ConfigError(f"{key}: required")
        return None
    try:
        return measure_from_dict(d, key)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _ensemble_cfg(cfg: dict, args, required=True) -> EnsembleSpec | None:
    d = cfg.get("ensemble")
    kind = getattr(args, "ensemble", None)
    if kind is not None:
        dim = _get(cfg, args, "dim")
        if kind == "perturbed":
            base_kind = getattr(args, "base_kind", None) or "shift"
            d = {
                "kind": "perturbed",
                "base": {"kind": base_kind, "dim": dim},
                "scale": getattr(args, "scale", None) or 0.0,
            }
        else:
            d = {"kind": kind, "dim": dim}
            mu = _measure_cfg(cfg, args)
            if mu is not None:
                d["measure"] = measure_to_dict(mu)
            o = getattr(args, "offdiag", None)
            if o is not None:
                d["offdiag_param"] = o
    if d is None:
        if required:
            raise ConfigError("ensemble: required")
        return None
    if isinstance(d, dict) and "dim" in d and d["dim"] is None:
        raise ConfigError("ensemble.dim: required (pass --dim)")
    try:
        return ensemble_from_dict(d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _seed(cfg: dict, args) -> Seed:
    root = _get(cfg, args, "seed", default=0)
    try:
        return Seed(int(root))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"seed: {exc}") from exc


def _out(cfg: dict, args, default_name: str) -> Path:
    return Path(_get(cfg, args, "out", default=default_name))


def _fmt(cfg: dict, args) -> str:
    fmt = _get(cfg, args, "format", default="csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: expected 'csv' or 'json', got {fmt!r}")
    return fmt


def _plot(cfg: dict, args) -> bool:
    return bool(getattr(args, "plot", False) or cfg.get("plot", False))


def _fig_path(out: Path, suffix: str = "") -> Path:
    return out.with_name(out.stem + suffix + ".svg")


def _sample_eigs(cfg, args):
    spec = _ensemble_cfg(cfg, args)
    seed = _seed(cfg, args)
    m = sample(spec, seed)
    return spec, seed, m, eigenvalues(m)


def cmd_sample(cfg, args) -> int:
    spec, seed, _, lam = _sample_eigs(cfg, args)
    out = _out(cfg, args, "sample.csv")
    meta = make_meta("sample", seed.to_dict())
    meta["ensemble"] = ensemble_to_dict(spec)
    write_eigenvalue_csv(out, lam, meta)
    print(f"wrote {out}")
    if _plot(cfg, args):
        from .plots import save_spectrum_scatter

        fig = save_spectrum_scatter(lam, _fig_path(out), title=f"{spec.kind} (N={spec.size})")
        print(f"wrote {fig}")
    return 0


def cmd_spectrum(cfg, args) -> int:
    spec, seed, m, lam = _sample_eigs(cfg, args)
    out = _out(cfg, args, "spectrum.csv")
    reference = _measure_cfg(cfg, args, "reference")
    l = int(_get(cfg, args, "l", default=2))
    emp = empirical(lam)
    row = {
        "dim": spec.size,
        "mean_abs": float(np.mean(np.abs(lam))),
        "mean_abs_sq": float(np.mean(np.abs(lam) ** 2)),
        "empirical_log_energy": empirical_log_energy(lam) if lam.size > 1 else 0.0,
        "offdiag_second_moment": offdiag_second_moment(m),
    }
    inputs = {"ensemble": ensemble_to_dict(spec), "l": l}
    if reference is not None:
        row["moment_distance"] = moment_distance(emp, reference, l)
        inputs["reference"] = measure_to_dict(reference)
    report = ExperimentReport(
        meta=make_meta("spectrum", seed.to_dict()),
        inputs=inputs,
        rows=[row],
        summary={},
    )
    write_report(report, out, _fmt(cfg, args))
    print(f"wrote {out}")
    if _plot(cfg, args):
        from .plots import save_spectrum_scatter

        fig = save_spectrum_scatter(lam, _fig_path(out), title=f"{spec.kind} spectrum")
        print(f"wrote {fig}")
    return 0


def cmd_regularize(cfg, args) -> int:
    base = _ensemble_cfg(cfg, args)
    target = _measure_cfg(cfg, args, "measure", required=True)
    t_grid = _parse_floats(_get(cfg, args, "t_grid", required=True), "t_grid")
    l = int(_get(cfg, args, "l", default=1))
    trials = int(_get(cfg, args, "trials", default=10))
    seed = _seed(cfg, args)
    report = regularization_sweep(base, t_grid, target, l, trials, seed)
    out = _out(cfg, args, "regularize.csv")
    write_report(report, out, _fmt(cfg, args))
    print(f"wrote {out}")
    if _plot(cfg, args):
        from .plots import save_curve

        fig = save_curve(
            [r["t"] for r in report.rows],
            [r["mean_distance"] for r in report.rows],
            _fig_path(out),
            xlabel="perturbation size t",
            ylabel=f"moment distance (l={l})",
            yerr=[r["std"] for r in report.rows],
            logx=True,
        )
        print(f"wrote {fig}")
    return 0


def cmd_microstate(cfg, args) -> int:
    ens = _ensemble_cfg(cfg, args)
    model_d = cfg.get("model")
    if getattr(args, "model", None) is not None:
        model_d = {"kind": args.model}
        mu = _measure_cfg(cfg, args)
        if mu is not None:
            model_d["measure"] = measure_to_dict(mu)
        o = getattr(args, "offdiag", None)
        if o is not None:
            model_d["offdiag_param"] = o
    if model_d is None:
        raise ConfigError("model: required")
    try:
        model = model_from_dict(model_d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    seed = _seed(cfg, args)
    ms = cfg.get("microstate", {})
    norm_bound = float(_get(ms, args, "norm_bound", required=True))
    max_len = int(_get(ms, args, "word_len", default=2))
    tol = float(_get(ms, args, "eps", required=True))
    trials = int(_get(cfg, args, "trials", default=50))
    mc = None
    if model.kind == "dt":
        mc = MCParams(
            dim=int(_get(cfg, args, "mc_dim", default=ens.size)),
            trials=int(_get(cfg, args, "mc_trials", default=50)),
            seed=seed.derive("targets"),
        )
    targets = target_table(model, max_len, mc)
    spectral = None
    l = _get(ms, args, "l")
    theta = _get(ms, args, "theta")
    if l is not None or theta is not None:
        if l is None or theta is None:
            raise ConfigError("microstate.l and microstate.theta must be given together")
        spectral = SpectralConstraint(int(l), float(theta), model_descriptor(model)[0])
    spec = MicrostateSpec(norm_bound, max_len, tol, targets, spectral)
    hr = hit_rate(ens, spec, trials, seed.derive("hits"))
    report = ExperimentReport(
        meta=make_meta("microstate", seed.to_dict()),
        inputs={
            "ensemble": ensemble_to_dict(ens),
            "model": model_to_dict(model),
            "norm_bound": norm_bound,
            "word_len": max_len,
            "eps": tol,
            "l": None if spectral is None else spectral.max_power,
            "theta": None if spectral is None else spectral.tol,
            "trials": trials,
        },
        rows=hr.rows,
        summary={
            "hits": hr.hits,
            "trials": hr.trials,
            "hit_rate": hr.fraction,
            "wilson_low": hr.wilson_low,
            "wilson_high": hr.wilson_high,
        },
    )
    out = _out(cfg, args, "microstate.csv")
    write_report(report, out, _fmt(cfg, args))
    print(f"wrote {out}  (hit rate {hr.fraction:.3f} [{hr.wilson_low:.3f}, {hr.wilson_high:.3f}])")
    return 0


def cmd_entropy(cfg, args) -> int:
    mu = _measure_cfg(cfg, args, "measure", required=True)
    od = _get(cfg, args, "od")
    seed = _seed(cfg, args)
    values: dict = {"log_energy": log_energy(mu), "diagonal_entropy": diagonal_entropy(mu)}
    inputs: dict = {"measure": measure_to_dict(mu)}
    if od is not None:
        od = float(od)
        values["upper_bound"] = entropy_upper_bound(mu, od)
        inputs["od"] = od
    if is_real_measure(mu):
        values["selfadjoint_entropy"] = selfadjoint_entropy(mu)
    phi_xx = _get(cfg, args, "phi_xx")
    if phi_xx is not None:
        phi_x = _parse_pair(_get(cfg, args, "phi_x", default="0"), "phi_x")
        inputs["phi_xx"] = float(phi_xx)
        inputs["phi_x"] = [phi_x.real, phi_x.imag]
        values["variance_bound_exp1"] = variance_bound(float(phi_xx), phi_x, 1)
        values["variance_bound_exp2"] = variance_bound(float(phi_xx), phi_x, 2)
    report = ExperimentReport(
        meta=make_meta("entropy-bound", seed.to_dict()),
        inputs=inputs,
        rows=[values],
        summary=dict(values),
    )
    out = _out(cfg, args, "entropy.csv")
    write_report(report, out, _fmt(cfg, args))
    width = max(len(k) for k in values)
    for k, v in values.items():
        print(f"{k:<{width}}  {v!r}")
    print(f"wrote {out}")
    return 0


def cmd_dt_verify(cfg, args) -> int:
    nu = _measure_cfg(cfg, args, "measure", required=True)
    o = float(_get(cfg, args, "offdiag", required=True))
    n_list = [int(v) for v in _parse_floats(_get(cfg, args, "n_list", required=True), "n_list")]
    max_len = int(_get(cfg, args, "word_len", default=2))
    tol = float(_get(cfg, args, "eps", default=0.1))
    trials = int(_get(cfg, args, "trials", default=50))
    delta = float(_get(cfg, args, "delta", default=0.05))
    seed = _seed(cfg, args)
    nb = _get(cfg, args, "norm_bound")
    report = dt_equality_report(
        nu,
        o,
        n_list,
        max_len,
        tol,
        trials,
        seed,
        delta=delta,
        norm_bound=None if nb is None else float(nb),
    )
    out = _out(cfg, args, "dt_verify.csv")
    write_report(report, out, _fmt(cfg, args))
    print(f"wrote {out}")
    if _plot(cfg, args):
        from .plots import save_curve

        fig = save_curve(
            [r["dim"] for r in report.rows],
            [r["hit_rate"] for r in report.rows],
            _fig_path(out, "_hits"),
            xlabel="matrix dimension N",
            ylabel="microstate hit rate",
            yerr=[
                [r["hit_rate"] - r["wilson_low"] for r in report.rows],
                [r["wilson_high"] - r["hit_rate"] for r in report.rows],
            ],
            ref=1.0,
        )
        print(f"wrote {fig}")
    return 0


def cmd_schur_check(cfg, args) -> int:
    d = cfg.get("ensemble")
    if d is None and getattr(args, "ensemble", None) is None:
        dim = _get(cfg, args, "dim", required=True)
        spec = ensemble_from_dict({"kind": "ginibre", "dim": int(dim)})
    else:
        spec = _ensemble_cfg(cfg, args)
    seed = _seed(cfg, args)
    m = sample(spec, seed)
    u, diag, t = schur_decompose(m)
    n = spec.size
    recon = u @ (np.diag(diag) + t) @ u.conj().T
    residual = float(np.linalg.norm(recon - m)) / (1.0 + float(np.linalg.norm(m)))
    unitarity = float(np.linalg.norm(u.conj().T @ u - np.eye(n)))
    strict = t[np.triu_indices(n, 1)]
    row = {
        "dim": n,
        "residual": residual,
        "unitarity_error": unitarity,
        "strict_upper_re_variance": float(np.var(strict.real)),
        "strict_upper_re_variance_target": 1.0 / (2.0 * n),
        "eigen_second_moment": float(np.mean(np.abs(diag) ** 2)),
        "offdiag_second_moment": offdiag_second_moment(m),
    }
    report = ExperimentReport(
        meta=make_meta("schur-check", seed.to_dict()),
        inputs={"ensemble": ensemble_to_dict(spec)},
        rows=[row],
        summary={},
    )
    out = _out(cfg, args, "schur_check.csv")
    write_report(report, out, _fmt(cfg, args))
    print(f"wrote {out}")
    if _plot(cfg, args):
        from .plots import save_spectrum_scatter

        fig = save_spectrum_scatter(diag, _fig_path(out), title="Schur diagonal")
        print(f"wrote {fig}")
    return 0


def cmd_ball_volume(cfg, args) -> int:
    o = float(_get(cfg, args, "offdiag", default=1.0))
    n_list = [int(v) for v in _parse_floats(_get(cfg, args, "n_list", required=True), "n_list")]
    seed = _seed(cfg, args)
    limit = ball_log_volume_limit(o)
    rows = []
    for n in n_list:
        val = ball_log_volume(n, o)
        rows.append({"dim": n, "value": val, "limit": limit, "gap": val - limit})
    report = ExperimentReport(
        meta=make_meta("ball-volume", seed.to_dict()),
        inputs={"offdiag_param": o, "n_list": n_list},
        rows=rows,
        summary={"limit": limit},
    )
    out = _out(cfg, args, "ball_volume.csv")
    write_report(report, out, _fmt(cfg, args))
    print(f"wrote {out}")
    if _plot(cfg, args):
        from .plots import save_curve

        fig = save_curve(
            n_list,
            [r["value"] for r in rows],
            _fig_path(out),
            xlabel="matrix dimension N",
            ylabel="normalized ball log-volume",
            ref=limit,
        )
        print(f"wrote {fig}")
    return 0


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config document; flags override its fields")
    p.add_argument("--seed", type=int, help="root seed (64-bit unsigned)")
    p.add_argument("--out", help="output file path")
    p.add_argument("--format", choices=("csv", "json"), dest="format", help="report format")
    p.add_argument("--plot", action="store_true", help="also write figure files (SVG)")


def _add_ensemble_flags(p: argparse.ArgumentParser):
    p.add_argument(
        "--ensemble",
        choices=("ginibre", "strict_upper", "diagonal", "dt", "haar_unitary", "shift", "perturbed"),
    )
    p.add_argument("--dim", type=int)
    p.add_argument("--base-kind", help="base ensemble kind for --ensemble perturbed")
    p.add_argument("--scale", type=float, help="noise scale for --ensemble perturbed")
    p.add_argument("--offdiag", type=float, help="offdiagonality parameter o")


def _add_measure_flags(p: argparse.ArgumentParser, name="measure"):
    p.add_argument(
        f"--{name}",
        choices=("point_mass", "uniform_disk", "uniform_circle", "semicircle"),
        help=f"{name} kind (atomic kinds need the JSON config)",
    )
    if name == "measure":
        p.add_argument("--center", help="measure center as 're' or 're,im'")
        p.add_argument("--radius", type=float, help="measure radius")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brownlab",
        description="Seeded random-matrix experiments: spectra, microstates, entropy bounds.",
    )
    parser.add_argument("--version", action="version", version=f"brownlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample an ensemble and write its eigenvalues as CSV")
    _add_common(p)
    _add_ensemble_flags(p)
    _add_measure_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("spectrum", help="eigenvalue summary statistics for one sample")
    _add_common(p)
    _add_ensemble_flags(p)
    _add_measure_flags(p)
    _add_measure_flags(p, name="reference")
    p.add_argument("--l", type=int, help="max mixed-moment order for the distance")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("regularize", help="noise-size sweep of spectral distances")
    _add_common(p)
    _add_ensemble_flags(p)
    _add_measure_flags(p)
    p.add_argument("--t-grid", dest="t_grid", help="comma-separated noise sizes")
    p.add_argument("--l", type=int)
    p.add_argument("--trials", type=int)
    p.set_defaults(func=cmd_regularize)

    p = sub.add_parser("microstate", help="membership hit rate of an ensemble in a microstate set")
    _add_common(p)
    _add_ensemble_flags(p)
    _add_measure_flags(p)
    p.add_argument("--model", choices=("circular", "haar_unitary", "dt"))
    p.add_argument("--norm-bound", dest="norm_bound", type=float)
    p.add_argument("--word-len", dest="word_len", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--l", type=int, help="spectral constraint: max moment power")
    p.add_argument("--theta", type=float, help="spectral constraint: tolerance")
    p.add_argument("--trials", type=int)
    p.add_argument("--mc-dim", dest="mc_dim", type=int)
    p.add_argument("--mc-trials", dest="mc_trials", type=int)
    p.set_defaults(func=cmd_microstate)

    p = sub.add_parser("entropy-bound", help="closed-form entropy values for a measure")
    _add_common(p)
    _add_measure_flags(p)
    p.add_argument("--od", type=float, help="offdiagonality for the upper bound")
    p.add_argument("--phi-xx", dest="phi_xx", type=float)
    p.add_argument("--phi-x", dest="phi_x", help="'re' or 're,im'")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("dt-verify", help="hit rates and bound diagnostics for DT samples")
    _add_common(p)
    _add_measure_flags(p)
    p.add_argument("--offdiag", type=float)
    p.add_argument("--n-list", dest="n_list", help="comma-separated dimensions")
    p.add_argument("--word-len", dest="word_len", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--norm-bound", dest="norm_bound", type=float)
    p.set_defaults(func=cmd_dt_verify)

    p = sub.add_parser("schur-check", help="Schur factor statistics for one sample")
    _add_common(p)
    _add_ensemble_flags(p)
    _add_measure_flags(p)
    p.set_defaults(func=cmd_schur_check)

    p = sub.add_parser("ball-volume", help="normalized log-volume of the off-diagonal ball")
    _add_common(p)
    p.add_argument("--offdiag", type=float)
    p.add_argument("--n-list", dest="n_list", help="comma-separated dimensions")
    p.set_defaults(func=cmd_ball_volume)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (EigensolverError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
