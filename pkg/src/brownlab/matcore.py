"""Dense complex matrix kernels: normalized traces of *-words, operator norm,
eigenvalues, complex Schur form, Fuglede-Kadison determinant, off-diagonal mass.

All functions are pure and treat their ndarray inputs as immutable values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment


class EigensolverError(RuntimeError):
    """The iterative QR eigensolver failed to converge within its sweep cap."""


def as_matrix(m) -> np.ndarray:
    """Validate and return a square complex matrix with finite entries."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("matrix dimension must be >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


@dataclass(frozen=True)
class StarWord:
    """A nonempty word over the alphabet {'1', '*'} (letter '*' marks the adjoint)."""

    letters: tuple[str, ...]

    def __post_init__(self):
        if not self.letters:
            raise ValueError("a star word must have at least one letter")
        bad = set(self.letters) - {"1", "*"}
        if bad:
            raise ValueError(f"invalid letters {bad!r}; allowed: '1', '*'")

    @classmethod
    def from_string(cls, text: str) -> "StarWord":
        return cls(tuple(text.replace("⋆", "*").replace("★", "*")))

    def adjoint(self) -> "StarWord":
        flip = {"1": "*", "*": "1"}
        return StarWord(tuple(flip[c] for c in reversed(self.letters)))

    def __str__(self) -> str:
        return "".join(self.letters)

    def __len__(self) -> int:
        return len(self.letters)


def coerce_word(word) -> StarWord:
    if isinstance(word, StarWord):
        return word
    return StarWord.from_string(str(word))


def all_words(max_len: int) -> Iterator[StarWord]:
    """All words of length 1..max_len in deterministic order ('1' before '*')."""
    for p in range(1, max_len + 1):
        for combo in itertools.product("1*", repeat=p):
            yield StarWord(combo)


def trace_word(m, word) -> complex:
    """Normalized trace (1/N)Tr of the product of m / m-adjoint factors in word order."""
    m = as_matrix(m)
    w = coerce_word(word)
    mh = m.conj().T
    prod = None
    for letter in w.letters:
        factor = m if letter == "1" else mh
        prod = factor if prod is None else prod @ factor
    return complex(np.trace(prod) / m.shape[0])


def trace_words_upto(m, max_len: int) -> dict[str, complex]:
    """Normalized traces of every word of length <= max_len, sharing prefix products."""
    m = as_matrix(m)
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    n = m.shape[0]
    mh = m.conj().T
    out: dict[str, complex] = {}

    def descend(prefix: str, prod, depth: int):
        for letter, factor in (("1", m), ("*", mh)):
            word = prefix + letter
            new = factor if prod is None else prod @ factor
            out[word] = complex(np.trace(new) / n)
            if depth + 1 < max_len:
                descend(word, new, depth + 1)

    descend("", None, 0)
    return out


def operator_norm(m) -> float:
    """Largest singular value."""
    m = as_matrix(m)
    return float(np.linalg.svd(m, compute_uv=False)[0])


def _exact_triangular_diagonal(m: np.ndarray):
    """Diagonal of m when m is exactly (upper or lower) triangular, else None.

    Triangular matrices have their eigenvalues on the diagonal; returning them
    directly keeps nilpotent and diagonal inputs exact instead of exposing the
    notorious pseudospectral blow-up of the QR iteration on defective matrices.
    """
    n = m.shape[0]
    if n == 1:
        return m.diagonal().copy()
    if not np.any(m[np.tril_indices(n, -1)]):
        return m.diagonal().copy()
    if not np.any(m[np.triu_indices(n, 1)]):
        return m.diagonal().copy()
    return None


def eigenvalues(m) -> np.ndarray:
    """All N eigenvalues with multiplicity (unordered).

    Raises EigensolverError if the QR iteration fails to converge (LAPACK's
    internal sweep cap); exactly triangular inputs bypass the iteration.
    """
    m = as_matrix(m)
    diag = _exact_triangular_diagonal(m)
    if diag is not None:
        return diag
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigenvalue iteration failed: {exc}") from exc


def schur_decompose(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Complex Schur form m = u (diag(d) + t) u* with u unitary, t strictly upper.

    Returns (u, d, t); t has exact structural zeros on and below the diagonal.
    """
    m = as_matrix(m)
    try:
        T, Z = sla.schur(m, output="complex")
    except sla.LinAlgError as exc:
        raise EigensolverError(f"Schur iteration failed: {exc}") from exc
    d = T.diagonal().copy()
    t = np.triu(T, 1)
    return Z, d, t


def fk_determinant(m) -> float:
    """Geometric mean of the singular values, (prod sigma_i)^(1/N).

    Equals |det m|^(1/N); returns exactly 0.0 when m is singular to working
    precision (smallest singular value below N*eps relative to the largest).
    """
    m = as_matrix(m)
    n = m.shape[0]
    s = np.linalg.svd(m, compute_uv=False)
    smax = float(s[0])
    if smax == 0.0:
        return 0.0
    cutoff = smax * n * np.finfo(np.float64).eps
    if float(s[-1]) <= cutoff:
        return 0.0
    return float(np.exp(np.mean(np.log(s))))


def offdiag_second_moment(m) -> float:
    """tr(m m*) minus the mean squared eigenvalue modulus.

    For upper-triangular m this is (1/N) sum_{i<j} |m_ij|^2; it vanishes
    exactly when m is normal.  Values within -1e-10 of zero are clamped to 0.
    """
    m = as_matrix(m)
    n = m.shape[0]
    frob = float(np.vdot(m, m).real) / n
    lam = eigenvalues(m)
    val = frob - float(np.mean(np.abs(lam) ** 2))
    if -1e-10 < val < 0.0:
        val = 0.0
    return val


def matching_distance(a, b) -> float:
    """Optimal-matching distance between two eigenvalue multisets.

    Minimizes the total pairing cost and reports the largest matched gap;
    insensitive to ordering, which eigensolvers do not canonicalize.
    """
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    if a.size != b.size:
        raise ValueError("multisets must have equal cardinality")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
