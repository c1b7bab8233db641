"""Microstate membership predicates and the Monte Carlo experiments built on them.

A microstate spec bounds the operator norm and requires every *-word trace up
to a given length to sit strictly within a tolerance of its target.  The
refined predicate additionally forces the empirical eigenvalue distribution
close to a target spectral measure in mixed moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .ensembles import EnsembleSpec, Seed, ensemble_to_dict, sample, sample_ginibre
from .matcore import eigenvalues, operator_norm, trace_words_upto
from .measures import MeasureSpec, empirical, measure_to_dict, moment_distance
from .models import StarMomentTable
from .report import ExperimentReport, make_meta

Z95 = 1.959963984540054


@dataclass(frozen=True)
class SpectralConstraint:
    """Bound on mixed eigenvalue moments up to max_power against a target measure."""

    max_power: int
    tol: float
    target: MeasureSpec

    def __post_init__(self):
        if self.max_power < 0:
            raise ValueError("max_power must be >= 0")
        if not (self.tol > 0):
            raise ValueError("spectral tolerance must be > 0")


@dataclass(frozen=True)
class MicrostateSpec:
    """Norm bound, word-length cap, trace tolerance and targets; optionally a
    spectral constraint for the refined predicate."""

    norm_bound: float
    max_len: int
    tol: float
    targets: StarMomentTable
    spectral: SpectralConstraint | None = None

    def __post_init__(self):
        if not (self.norm_bound > 0):
            raise ValueError("norm_bound must be > 0")
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if not (self.tol > 0):
            raise ValueError("tol must be > 0")
        if self.targets.max_len < self.max_len:
            raise ValueError("target table does not cover all required word lengths")


@dataclass
class MembershipResult:
    """Membership verdict plus worst-violation diagnostics.

    worst_violation is max over words of |trace - target| - 3*stderr(target);
    membership requires it to be strictly below the trace tolerance.
    """

    member: bool
    norm: float
    norm_ok: bool
    moments_ok: bool
    worst_word: str
    worst_violation: float
    spectral_distance: float | None = None
    spectral_ok: bool | None = None

    def __bool__(self) -> bool:
        return self.member


def in_microstates(m, spec: MicrostateSpec) -> MembershipResult:
    """Norm bound plus strict trace tolerance for every word up to max_len.

    Monte Carlo targets are forgiven their own noise: each word's tolerance is
    inflated by three standard errors of its target value.  Any spectral
    constraint on the spec is ignored here.
    """
    norm = operator_norm(m)
    norm_ok = norm <= spec.norm_bound
    traces = trace_words_upto(m, spec.max_len)
    worst_word = ""
    worst = -math.inf
    for word, tr in traces.items():
        gap = abs(tr - spec.targets.value(word)) - 3.0 * spec.targets.stderr_of(word)
        if gap > worst:
            worst = gap
            worst_word = word
    moments_ok = worst < spec.tol
    return MembershipResult(
        member=norm_ok and moments_ok,
        norm=norm,
        norm_ok=norm_ok,
        moments_ok=moments_ok,
        worst_word=worst_word,
        worst_violation=worst,
    )


def in_improved_microstates(m, spec: MicrostateSpec) -> MembershipResult:
    """Trace membership plus a strict bound on the distance between the
    empirical eigenvalue moments and the target spectral measure."""
    if spec.spectral is None:
        raise ValueError("spec has no spectral constraint")
    base = in_microstates(m, spec)
    lam = eigenvalues(m)
    dist = moment_distance(empirical(lam), spec.spectral.target, spec.spectral.max_power)
    spectral_ok = dist < spec.spectral.tol
    base.spectral_distance = dist
    base.spectral_ok = spectral_ok
    base.member = base.member and spectral_ok
    return base


def in_diagonal_microstates(
    d, norm_bound: float, target: MeasureSpec, max_power: int, tol: float
) -> MembershipResult:
    """Membership for exactly diagonal matrices: norm bound plus the spectral
    moment bound against the target measure.  Raises on non-diagonal input."""
    d = np.asarray(d, dtype=np.complex128)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("expected a square matrix")
    if np.any(d - np.diag(np.diagonal(d))):
        raise ValueError("matrix is not diagonal")
    diag = np.diagonal(d)
    norm = float(np.max(np.abs(diag)))
    norm_ok = norm <= norm_bound
    dist = moment_distance(empirical(diag), target, max_power)
    spectral_ok = dist < tol
    return MembershipResult(
        member=norm_ok and spectral_ok,
        norm=norm,
        norm_ok=norm_ok,
        moments_ok=True,
        worst_word="",
        worst_violation=0.0,
        spectral_distance=dist,
        spectral_ok=spectral_ok,
    )


def word_perturbation_bound(max_len: int, norm_bound: float, delta: float) -> float:
    """Tolerance growth that keeps m + B inside a microstate set when
    ||B|| <= delta: any word trace moves by at most this much."""
    return max_len * delta * (norm_bound + delta) ** (max_len - 1) * 2.0**max_len


def wilson_interval(hits: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval; well behaved at the 0/1 boundaries."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = hits / trials
    q = z * z
    denom = 1.0 + q / trials
    center = (p + q / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + q / (4.0 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class HitRateResult:
    fraction: float
    wilson_low: float
    wilson_high: float
    hits: int
    trials: int
    rows: list


def hit_rate(ensemble: EnsembleSpec, spec: MicrostateSpec, trials: int, seed: Seed) -> HitRateResult:
    """Fraction of independent ensemble samples passing the membership
    predicate (refined when the spec carries a spectral constraint)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    hits = 0
    for i in range(trials):
        m = sample(ensemble, seed.derive("trial", i))
        if spec.spectral is not None:
            res = in_improved_microstates(m, spec)
        else:
            res = in_microstates(m, spec)
        hits += int(res.member)
        row = {
            "trial": i,
            "member": int(res.member),
            "norm": res.norm,
            "worst_word": res.worst_word,
            "worst_violation": res.worst_violation,
        }
        if res.spectral_distance is not None:
            row["spectral_distance"] = res.spectral_distance
        rows.append(row)
    lo, hi = wilson_interval(hits, trials)
    return HitRateResult(hits / trials, lo, hi, hits, trials, rows)


def regularization_sweep(
    base: EnsembleSpec,
    t_grid,
    target: MeasureSpec,
    max_power: int,
    trials: int,
    seed: Seed,
) -> ExperimentReport:
    """Eigenvalue-distribution distance to the target as Gaussian noise of
    size t is added to the base ensemble, over a grid of t values.

    Each trial draws one (base, noise) pair and reuses it across the whole
    grid, so rows differ only through the perturbation size.
    """
    t_grid = [float(t) for t in t_grid]
    if not t_grid:
        raise ValueError("t_grid must be nonempty")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = base.size
    dists = np.zeros((len(t_grid), trials))
    radii: list[list[np.ndarray]] = [[] for _ in t_grid]
    for trial in range(trials):
        a = sample(base, seed.derive("base", trial))
        g = sample_ginibre(n, seed.derive("noise", trial))
        for ti, t in enumerate(t_grid):
            lam = eigenvalues(a + t * g)
            dists[ti, trial] = moment_distance(empirical(lam), target, max_power)
            radii[ti].append(np.abs(lam))
    rows = []
    for ti, t in enumerate(t_grid):
        pooled = np.concatenate(radii[ti])
        q = np.quantile(pooled, [0.05, 0.25, 0.5, 0.75, 0.95])
        rows.append(
            {
                "t": t,
                "mean_distance": float(np.mean(dists[ti])),
                "std": float(np.std(dists[ti], ddof=1)) if trials > 1 else 0.0,
                "trials": trials,
                "mean_radius": float(np.mean(pooled)),
                "radius_q05": float(q[0]),
                "radius_q25": float(q[1]),
                "radius_q50": float(q[2]),
                "radius_q75": float(q[3]),
                "radius_q95": float(q[4]),
            }
        )
    return ExperimentReport(
        meta=make_meta("regularization_sweep", seed.to_dict()),
        inputs={
            "base": ensemble_to_dict(base),
            "target": measure_to_dict(target),
            "t_grid": t_grid,
            "max_power": max_power,
            "trials": trials,
        },
        rows=rows,
        summary={"dim": n},
    )


def diagonal_volume_log_density(lambdas) -> float:
    """Log density of the diagonal-matrix volume at an eigenvalue tuple:
    squared Vandermonde times pi^((N^2-N)/2) / prod_{i<=N} i!, in log space.

    -inf when two eigenvalues coincide.
    """
    lam = np.asarray(lambdas, dtype=np.complex128).ravel()
    n = lam.size
    if n < 1:
        raise ValueError("need at least one eigenvalue")
    log_pref = 0.5 * (n * n - n) * math.log(math.pi) - float(
        np.sum(gammaln(np.arange(1, n + 1) + 1))
    )
    if n == 1:
        return log_pref
    iu = np.triu_indices(n, 1)
    gaps = np.abs(lam[:, None] - lam[None, :])[iu]
    if np.any(gaps == 0.0):
        return float("-inf")
    return log_pref + 2.0 * float(np.sum(np.log(gaps)))
