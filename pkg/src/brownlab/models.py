"""Reference operators with known *-moments and spectral data.

Three models generate microstate targets: the circular element (limit of the
Ginibre ensemble), the Haar unitary, and the triangular-plus-diagonal family
DT(nu, o).  Circular and Haar moments are exact combinatorial values; DT
moments are Monte Carlo estimates carrying standard errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ensembles import Seed, sample_dt
from .matcore import StarWord, all_words, coerce_word, trace_word, trace_words_upto
from .measures import (
    MeasureSpec,
    measure_from_dict,
    measure_to_dict,
    moment,
    uniform_circle,
    uniform_disk,
)


@dataclass(frozen=True)
class OperatorModel:
    """kind: circular | haar_unitary | dt."""

    kind: str
    measure: MeasureSpec | None = None
    offdiag_param: float = 0.0

    def __post_init__(self):
        if self.kind not in ("circular", "haar_unitary", "dt"):
            raise ValueError(f"unknown operator model {self.kind!r}")
        if self.kind == "dt":
            if self.measure is None:
                raise ValueError("dt model requires a measure")
            if self.offdiag_param < 0:
                raise ValueError("offdiag_param must be >= 0")


def circular() -> OperatorModel:
    return OperatorModel("circular")


def haar_unitary_model() -> OperatorModel:
    return OperatorModel("haar_unitary")


def dt_operator(nu: MeasureSpec, offdiag_param: float) -> OperatorModel:
    return OperatorModel("dt", measure=nu, offdiag_param=float(offdiag_param))


@dataclass
class StarMomentTable:
    """Trace targets for every word up to max_len, with per-word standard errors.

    stderr entries are 0.0 for exactly known values.
    """

    values: dict[str, complex]
    max_len: int
    stderr: dict[str, float] = field(default_factory=dict)

    def value(self, word) -> complex:
        return self.values[str(coerce_word(word))]

    def stderr_of(self, word) -> float:
        return self.stderr.get(str(coerce_word(word)), 0.0)

    def to_dict(self) -> dict:
        return {
            "max_len": self.max_len,
            "values": {w: [v.real, v.imag] for w, v in self.values.items()},
            "stderr": dict(self.stderr),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StarMomentTable":
        values = {w: complex(p[0], p[1]) for w, p in d["values"].items()}
        return cls(values=values, max_len=int(d["max_len"]), stderr=dict(d.get("stderr", {})))


@lru_cache(maxsize=None)
def _noncrossing_opposite_pairings(letters: tuple[str, ...]) -> int:
    # pair position 0 with an opposite letter; a noncrossing pairing splits the
    # word into independent inside/outside segments (Catalan recursion)
    if not letters:
        return 1
    if len(letters) % 2:
        return 0
    total = 0
    first = letters[0]
    for j in range(1, len(letters), 2):
        if letters[j] != first:
            total += _noncrossing_opposite_pairings(letters[1:j]) * _noncrossing_opposite_pairings(
                letters[j + 1 :]
            )
    return total


def circular_moment(word) -> complex:
    """Exact *-moment of the circular element: the number of noncrossing
    pairings of the word's letters matching each '1' with a '*'."""
    w = coerce_word(word)
    return complex(_noncrossing_opposite_pairings(w.letters))


def haar_moment(word) -> complex:
    """Exact *-moment of a Haar unitary: 1 iff the word is balanced.

    Any word in a single unitary collapses to a power u^(a-b) with a, b the
    letter counts, and all nonzero powers have trace zero.
    """
    w = coerce_word(word)
    ones = w.letters.count("1")
    return complex(1.0 if 2 * ones == len(w) else 0.0)


def _mc_mean_stderr(samples: np.ndarray) -> tuple[complex, float]:
    mean = complex(np.mean(samples))
    spread = np.sqrt(np.sum(np.abs(samples - mean) ** 2) / (samples.size - 1))
    return mean, float(spread / np.sqrt(samples.size))


def dt_moment_mc(
    nu: MeasureSpec, offdiag_param: float, word, n: int, trials: int, seed: Seed
) -> tuple[complex, float]:
    """Monte Carlo mean and standard error of the word trace over DT samples."""
    if trials < 2:
        raise ValueError("trials must be >= 2")
    w = coerce_word(word)
    vals = np.empty(trials, dtype=np.complex128)
    for t in range(trials):
        a = sample_dt(nu, offdiag_param, n, seed.derive("trial", t))
        vals[t] = trace_word(a, w)
    return _mc_mean_stderr(vals)


@dataclass(frozen=True)
class MCParams:
    """Sampling parameters for Monte Carlo moment tables."""

    dim: int
    trials: int
    seed: Seed


def target_table(model: OperatorModel, max_len: int, mc: MCParams | None = None) -> StarMomentTable:
    """Trace targets for all words of length <= max_len.

    Exact for circular and Haar unitary models; Monte Carlo (with recorded
    standard errors) for DT models, which have no closed form here.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if model.kind == "circular":
        values = {str(w): circular_moment(w) for w in all_words(max_len)}
        return StarMomentTable(values=values, max_len=max_len)
    if model.kind == "haar_unitary":
        values = {str(w): haar_moment(w) for w in all_words(max_len)}
        return StarMomentTable(values=values, max_len=max_len)
    if mc is None:
        raise ValueError("dt moment tables require Monte Carlo parameters")
    if mc.trials < 2:
        raise ValueError("mc.trials must be >= 2")
    per_word: dict[str, list[complex]] = {str(w): [] for w in all_words(max_len)}
    for t in range(mc.trials):
        a = sample_dt(model.measure, model.offdiag_param, mc.dim, mc.seed.derive("trial", t))
        traces = trace_words_upto(a, max_len)
        for w, v in traces.items():
            per_word[w].append(v)
    values: dict[str, complex] = {}
    stderr: dict[str, float] = {}
    for w, vals in per_word.items():
        mean, se = _mc_mean_stderr(np.asarray(vals))
        values[w] = mean
        stderr[w] = se
    return StarMomentTable(values=values, max_len=max_len, stderr=stderr)


def model_descriptor(model: OperatorModel) -> tuple[MeasureSpec, float]:
    """(spectral measure, offdiagonality) of the model.

    Circular: uniform unit disk with offdiagonality 1/2; Haar unitary: uniform
    unit circle, 0 (normal operator); DT(nu, o): (nu, o).
    """
    if model.kind == "circular":
        return uniform_disk(0j, 1.0), 0.5
    if model.kind == "haar_unitary":
        return uniform_circle(0j, 1.0), 0.0
    return model.measure, model.offdiag_param


def model_to_dict(model: OperatorModel) -> dict:
    d: dict = {"kind": model.kind}
    if model.kind == "dt":
        d["measure"] = measure_to_dict(model.measure)
        d["offdiag_param"] = model.offdiag_param
    return d


def model_from_dict(d: dict, field_name: str = "model") -> OperatorModel:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError(f"{field_name}: expected an object with a 'kind' key")
    kind = d["kind"]
    if kind == "circular":
        return circular()
    if kind == "haar_unitary":
        return haar_unitary_model()
    if kind == "dt":
        if "measure" not in d:
            raise ValueError(f"{field_name}.measure: required for dt models")
        return dt_operator(
            measure_from_dict(d["measure"], f"{field_name}.measure"),
            float(d.get("offdiag_param", 0.0)),
        )
    raise ValueError(f"{field_name}.kind: unknown model kind {kind!r}")


def second_star_moment(model: OperatorModel) -> float:
    """tau(x x*) of the model: spectral second moment plus offdiagonality."""
    mu, od = model_descriptor(model)
    return moment(mu, 1, 1).real + od
