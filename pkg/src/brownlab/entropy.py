"""Closed-form entropy quantities and bounds.

All formulas are exact arithmetic on top of the logarithmic energy of a
spectral measure; -inf is a legal value (atomic measures, vanishing
offdiagonality) and propagates through sums.
"""

from __future__ import annotations

import math
import warnings

from scipy.special import gammaln

from .ensembles import Seed, dt as dt_ensemble
from .measures import (
    MeasureSpec,
    is_real_measure,
    log_energy,
    measure_to_dict,
    second_moment_radial,
    support_radius,
)
from .microstates import MicrostateSpec, hit_rate
from .models import MCParams, dt_operator, target_table
from .report import ExperimentReport, make_meta


class InconsistencyWarning(UserWarning):
    """Inputs violate a structural identity (e.g. negative offdiagonality)."""


def offdiagonality(second_star_moment: float, mu: MeasureSpec) -> float:
    """tau(x x*) minus the second radial moment of the spectral measure.

    Nonnegative for consistent inputs; a negative result is returned raw with
    a warning since it can only come from inconsistent data.
    """
    if second_star_moment < 0:
        raise ValueError("second_star_moment must be >= 0")
    od = second_star_moment - second_moment_radial(mu)
    if od < 0:
        warnings.warn(
            f"negative offdiagonality {od:.3e}: inputs are mutually inconsistent",
            InconsistencyWarning,
            stacklevel=2,
        )
    return od


def diagonal_entropy(mu: MeasureSpec) -> float:
    """Normalized log-volume rate of diagonal matrices with spectral measure
    near mu: log-energy + 3/4 + (ln pi)/2."""
    return log_energy(mu) + 0.75 + 0.5 * math.log(math.pi)


def entropy_upper_bound(mu: MeasureSpec, od: float) -> float:
    """Free-entropy upper bound from the spectral measure and offdiagonality:
    log-energy + 5/4 + ln(pi sqrt(2 od)); -inf when od = 0 or mu is atomic."""
    if od < 0:
        raise ValueError("offdiagonality must be >= 0")
    le = log_energy(mu)
    if od == 0.0 or le == float("-inf"):
        return float("-inf")
    return le + 1.25 + math.log(math.pi * math.sqrt(2.0 * od))


def selfadjoint_entropy(mu: MeasureSpec) -> float:
    """Free entropy of a selfadjoint variable with spectral measure mu on R:
    log-energy + 3/4 + (ln 2 pi)/2."""
    if not is_real_measure(mu):
        raise ValueError("measure must be supported on the real line")
    return log_energy(mu) + 0.75 + 0.5 * math.log(2.0 * math.pi)


def variance_bound(phi_xx: float, phi_x: complex, exponent: int = 1) -> float:
    """log(pi e v^exponent) with v = phi_xx - |phi_x|^2.

    exponent 1 is the scaling-consistent default (it reproduces log(pi e) for
    the circular element); exponent 2 is the alternative printed form.
    """
    if exponent not in (1, 2):
        raise ValueError("exponent must be 1 or 2")
    v = phi_xx - abs(phi_x) ** 2
    if v < 0:
        raise ValueError("phi_xx must be >= |phi_x|^2")
    if v == 0.0:
        return float("-inf")
    return math.log(math.pi) + 1.0 + exponent * math.log(v)


def ball_log_volume(n: int, o: float) -> float:
    """Finite-N normalized log-volume of the strictly-upper-triangular ball
    {tr(m m*) <= o}: (1/N^2) log vol + (log N)/2, via log-gamma.

    The ball has dimension N(N-1) and radius sqrt(oN).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (o > 0):
        raise ValueError("o must be > 0")
    m = n * (n - 1) // 2
    log_vol = m * (math.log(math.pi) + math.log(o * n)) - float(gammaln(m + 1))
    return log_vol / (n * n) + 0.5 * math.log(n)


def ball_log_volume_limit(o: float) -> float:
    """Large-N limit of ball_log_volume: 1/2 + (log 2 pi o)/2."""
    if not (o > 0):
        raise ValueError("o must be > 0")
    return 0.5 + 0.5 * math.log(2.0 * math.pi * o)


def default_dt_norm_bound(nu: MeasureSpec, o: float) -> float:
    """Comfortable norm bound for DT(nu, o) samples: the support radius of nu
    plus a margin covering the triangular Gaussian part."""
    return support_radius(nu) + 2.0 * (1.0 + math.sqrt(o))


def dt_equality_report(
    nu: MeasureSpec,
    o: float,
    n_list,
    max_len: int,
    tol: float,
    trials: int,
    seed: Seed,
    *,
    delta: float = 0.05,
    norm_bound: float | None = None,
    target_dim: int | None = None,
    target_trials: int = 50,
) -> ExperimentReport:
    """Numerical evidence that the entropy upper bound is attained by DT(nu, o).

    Combines (a) the closed-form upper bound, (b) microstate hit rates of DT
    samples at each dimension, and (c) the finite-N lower-bound diagnostic
    diagonal_entropy + ball_log_volume(N, (1-delta) o) for a user delta.
    """
    if not (o > 0):
        raise ValueError("o must be > 0")
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValueError("n_list must be nonempty")
    if not (0 < delta < 1):
        raise ValueError("delta must be in (0, 1)")
    r = norm_bound if norm_bound is not None else default_dt_norm_bound(nu, o)
    tdim = target_dim if target_dim is not None else max(n_list)
    targets = target_table(
        dt_operator(nu, o),
        max_len,
        MCParams(dim=tdim, trials=target_trials, seed=seed.derive("targets")),
    )
    spec = MicrostateSpec(norm_bound=r, max_len=max_len, tol=tol, targets=targets)
    upper = entropy_upper_bound(nu, o)
    diag = diagonal_entropy(nu)
    le = log_energy(nu)
    rows = []
    for n in n_list:
        hr = hit_rate(dt_ensemble(nu, o, n), spec, trials, seed.derive("hits", n))
        ball = ball_log_volume(n, (1.0 - delta) * o)
        rows.append(
            {
                "dim": n,
                "hits": hr.hits,
                "trials": hr.trials,
                "hit_rate": hr.fraction,
                "wilson_low": hr.wilson_low,
                "wilson_high": hr.wilson_high,
                "ball_log_volume": ball,
                "lower_diagnostic": diag + ball,
            }
        )
    limit_lower = diag + ball_log_volume_limit(o)
    # -inf - (-inf) has no meaning (atomic nu); report the gap only when defined
    gap = upper - limit_lower
    summary = {
        "log_energy": le,
        "diagonal_entropy": diag,
        "upper_bound": upper,
        "lower_limit_delta": diag + ball_log_volume_limit((1.0 - delta) * o),
        "lower_limit": limit_lower,
        "equality_gap": None if math.isnan(gap) else gap,
        "norm_bound": r,
        "delta": delta,
    }
    return ExperimentReport(
        meta=make_meta("dt_equality_report", seed.to_dict()),
        inputs={
            "measure": measure_to_dict(nu),
            "offdiag_param": o,
            "n_list": n_list,
            "max_len": max_len,
            "tol": tol,
            "trials": trials,
            "target_dim": tdim,
            "target_trials": target_trials,
        },
        rows=rows,
        summary=summary,
    )
