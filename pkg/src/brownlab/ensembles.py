"""Seeded samplers for every random matrix family used in the experiments.

Every sampler is a pure function of (parameters, Seed) and reproduces
bit-identical draws for identical seeds.  Sub-streams (per trial, per
component) are derived through labelled seed derivation, never by reusing
a generator.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .measures import MeasureSpec, measure_from_dict, measure_to_dict, sample_points

_MASK64 = (1 << 64) - 1


def _label_entropy(label) -> int:
    # Python's builtin hash() is salted per process; SHA-256 keeps derived
    # streams stable across runs and platforms.
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError("integer seed labels must be nonnegative")
        return int(label) & _MASK64
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


@dataclass(frozen=True)
class Seed:
    """Root entropy plus a chain of stream labels identifying a sub-draw."""

    root: int
    labels: tuple = ()

    def __post_init__(self):
        if not (0 <= self.root <= _MASK64):
            raise ValueError("seed root must be a 64-bit unsigned integer")

    def derive(self, *labels) -> "Seed":
        return Seed(self.root, self.labels + labels)

    def generator(self) -> np.random.Generator:
        words = [self.root] + [_label_entropy(l) for l in self.labels]
        return np.random.default_rng(np.random.SeedSequence(words))

    def to_dict(self) -> dict:
        return {"root": self.root, "labels": [str(l) for l in self.labels]}


@dataclass(frozen=True)
class EnsembleSpec:
    """Description of a random matrix family.

    kinds: ginibre | strict_upper | diagonal | dt | haar_unitary | shift |
    perturbed.  A perturbed spec wraps a base spec plus a Gaussian noise scale.
    """

    kind: str
    dim: int = 0
    measure: MeasureSpec | None = None
    offdiag_param: float = 0.0
    base: "EnsembleSpec | None" = None
    scale: float = 0.0

    def __post_init__(self):
        kinds = ("ginibre", "strict_upper", "diagonal", "dt", "haar_unitary", "shift", "perturbed")
        if self.kind not in kinds:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "perturbed":
            if self.base is None:
                raise ValueError("perturbed ensemble requires a base spec")
            if self.scale < 0:
                raise ValueError("perturbation scale must be >= 0")
        else:
            if self.dim < 1:
                raise ValueError("ensemble dimension must be >= 1")
        if self.kind in ("diagonal", "dt") and self.measure is None:
            raise ValueError(f"{self.kind} ensemble requires a measure")
        if self.kind == "dt" and self.offdiag_param < 0:
            raise ValueError("offdiag_param must be >= 0")

    @property
    def size(self) -> int:
        return self.base.size if self.kind == "perturbed" else self.dim


def ginibre(dim: int) -> EnsembleSpec:
    return EnsembleSpec("ginibre", dim=dim)


def strict_upper(dim: int) -> EnsembleSpec:
    return EnsembleSpec("strict_upper", dim=dim)


def diagonal(measure: MeasureSpec, dim: int) -> EnsembleSpec:
    return EnsembleSpec("diagonal", dim=dim, measure=measure)


def dt(measure: MeasureSpec, offdiag_param: float, dim: int) -> EnsembleSpec:
    return EnsembleSpec("dt", dim=dim, measure=measure, offdiag_param=float(offdiag_param))


def haar_unitary(dim: int) -> EnsembleSpec:
    return EnsembleSpec("haar_unitary", dim=dim)


def shift(dim: int) -> EnsembleSpec:
    return EnsembleSpec("shift", dim=dim)


def perturbed(base: EnsembleSpec, scale: float) -> EnsembleSpec:
    return EnsembleSpec("perturbed", base=base, scale=float(scale))


def sample_ginibre(n: int, seed: Seed) -> np.ndarray:
    """Complex Gaussian matrix with Re/Im entries i.i.d. N(0, 1/(2n)), so
    E|G_ij|^2 = 1/n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed.generator()
    scale = 1.0 / math.sqrt(2.0 * n)
    re = rng.standard_normal((n, n))
    im = rng.standard_normal((n, n))
    return scale * (re + 1j * im)


def sample_strict_upper(n: int, seed: Seed) -> np.ndarray:
    """Strictly upper triangular matrix with Re/Im of each upper entry i.i.d.
    N(0, 1/n), so E|T_ij|^2 = 2/n above the diagonal and exact zeros elsewhere."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed.generator()
    out = np.zeros((n, n), dtype=np.complex128)
    m = n * (n - 1) // 2
    if m:
        scale = 1.0 / math.sqrt(n)
        re = rng.standard_normal(m)
        im = rng.standard_normal(m)
        rows, cols = np.triu_indices(n, 1)
        out[rows, cols] = scale * (re + 1j * im)
    return out


def sample_diagonal(nu: MeasureSpec, n: int, seed: Seed) -> np.ndarray:
    """Diagonal matrix with i.i.d. entries drawn from nu."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.diag(sample_points(nu, n, seed.generator()))


def sample_dt(nu: MeasureSpec, offdiag_param: float, n: int, seed: Seed) -> np.ndarray:
    """Diagonal(nu) plus sqrt(o) times an independent strictly upper Gaussian."""
    if offdiag_param < 0:
        raise ValueError("offdiag_param must be >= 0")
    d = sample_diagonal(nu, n, seed.derive("diag"))
    t = sample_strict_upper(n, seed.derive("upper"))
    return d + math.sqrt(offdiag_param) * t


def sample_haar_unitary(n: int, seed: Seed) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre sample with the phase of
    the triangular factor's diagonal divided out (plain QR is not Haar)."""
    z = sample_ginibre(n, seed)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    absd = np.abs(d)
    ph = np.where(absd > 0, d, 1.0) / np.where(absd > 0, absd, 1.0)
    return q * ph[None, :]


def nilpotent_shift(n: int) -> np.ndarray:
    """Ones on the superdiagonal, zeros elsewhere."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.diag(np.ones(n - 1, dtype=np.complex128), 1) if n > 1 else np.zeros((1, 1), np.complex128)


def sample_perturbed(base: EnsembleSpec, t: float, seed: Seed) -> np.ndarray:
    """Base sample plus t times an independent Ginibre matrix."""
    if t < 0:
        raise ValueError("t must be >= 0")
    a = sample(base, seed.derive("base"))
    g = sample_ginibre(base.size, seed.derive("noise"))
    return a + t * g


def sample(spec: EnsembleSpec, seed: Seed) -> np.ndarray:
    """Draw one matrix from the ensemble described by spec."""
    if spec.kind == "ginibre":
        return sample_ginibre(spec.dim, seed)
    if spec.kind == "strict_upper":
        return sample_strict_upper(spec.dim, seed)
    if spec.kind == "diagonal":
        return sample_diagonal(spec.measure, spec.dim, seed)
    if spec.kind == "dt":
        return sample_dt(spec.measure, spec.offdiag_param, spec.dim, seed)
    if spec.kind == "haar_unitary":
        return sample_haar_unitary(spec.dim, seed)
    if spec.kind == "shift":
        return nilpotent_shift(spec.dim)
    return sample_perturbed(spec.base, spec.scale, seed)


def ensemble_to_dict(spec: EnsembleSpec) -> dict:
    d: dict = {"kind": spec.kind}
    if spec.kind == "perturbed":
        d["base"] = ensemble_to_dict(spec.base)
        d["scale"] = spec.scale
        return d
    d["dim"] = spec.dim
    if spec.measure is not None:
        d["measure"] = measure_to_dict(spec.measure)
    if spec.kind == "dt":
        d["offdiag_param"] = spec.offdiag_param
    return d


def ensemble_from_dict(d: dict, field: str = "ensemble") -> EnsembleSpec:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError(f"{field}: expected an object with a 'kind' key")
    kind = d["kind"]
    if kind == "perturbed":
        if "base" not in d:
            raise ValueError(f"{field}.base: required for perturbed ensembles")
        base = ensemble_from_dict(d["base"], field=f"{field}.base")
        return perturbed(base, float(d.get("scale", 0.0)))
    if "dim" not in d:
        raise ValueError(f"{field}.dim: required")
    n = int(d["dim"])
    if kind == "ginibre":
        return ginibre(n)
    if kind == "strict_upper":
        return strict_upper(n)
    if kind == "haar_unitary":
        return haar_unitary(n)
    if kind == "shift":
        return shift(n)
    if kind == "diagonal":
        if "measure" not in d:
            raise ValueError(f"{field}.measure: required for diagonal ensembles")
        return diagonal(measure_from_dict(d["measure"], f"{field}.measure"), n)
    if kind == "dt":
        if "measure" not in d:
            raise ValueError(f"{field}.measure: required for dt ensembles")
        return dt(
            measure_from_dict(d["measure"], f"{field}.measure"),
            float(d.get("offdiag_param", 0.0)),
            n,
        )
    raise ValueError(f"{field}.kind: unknown ensemble kind {kind!r}")
