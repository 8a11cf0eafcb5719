"""Dense linear algebra with explicit tolerance contracts.

Sizes in scope are desk-scale (n up to ~100), so everything is dense and
built on LAPACK through numpy/scipy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from ._arrays import as_numeric
from .errors import ConvergenceFailure, DimensionMismatch, Overflow, RankDeficient

DEFAULT_TOL = 1e-10
RANK_RTOL = 1e-12


@dataclass(frozen=True)
class EigenPair:
    """An eigenvalue of ``A^T`` with one left eigenvector of ``A``."""

    value: complex
    vector: np.ndarray
    multiplicity: int = 1


@dataclass(frozen=True)
class EigenSystem:
    pairs: tuple[EigenPair, ...]
    source: str = "numeric"

    def __post_init__(self):
        if self.source not in ("closed-form", "numeric"):
            raise ValueError(f"unknown eigen-system source {self.source!r}")
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, i: int) -> EigenPair:
        return self.pairs[i]

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.pairs], dtype=complex)

    @property
    def vectors(self) -> np.ndarray:
        """Eigenvectors stacked as rows."""
        return np.array([p.vector for p in self.pairs])

    def residuals(self, A) -> np.ndarray:
        """Per pair ``|A^T v - lambda v|_inf / (|A^T|_inf |v|_inf)``; plain ``|v|`` scaling when A = 0."""
        At = as_numeric(A).T
        norm_A = np.abs(At).sum(axis=1).max(initial=0.0) or 1.0
        out = []
        for p in self.pairs:
            v = np.asarray(p.vector)
            r = At @ v - p.value * v
            out.append(np.abs(r).max(initial=0.0) / (norm_A * np.abs(v).max(initial=1.0)))
        return np.array(out)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "pairs": [
                {
                    "lambda": [float(np.real(p.value)), float(np.imag(p.value))],
                    "vector": [[float(np.real(x)), float(np.imag(x))] for x in p.vector],
                    "multiplicity": p.multiplicity,
                }
                for p in self.pairs
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EigenSystem":
        pairs = []
        for item in data["pairs"]:
            lam = complex(*item["lambda"])
            vec = np.array([complex(re, im) for re, im in item["vector"]])
            if np.all(vec.imag == 0):
                vec = vec.real
            pairs.append(EigenPair(lam, vec, int(item.get("multiplicity", 1))))
        return cls(tuple(pairs), data.get("source", "numeric"))


def multiplicities(values, rtol: float = 1e-6) -> list[int]:
    """Cluster eigenvalues closer than ``rtol * max(1, max|lambda|)`` and count cluster sizes."""
    values = np.asarray(values, dtype=complex)
    scale = max(1.0, np.abs(values).max(initial=0.0))
    return [int(np.sum(np.abs(values - v) <= rtol * scale)) for v in values]


class GeneralizedInverse(NamedTuple):
    Qbar: np.ndarray
    residual: float


class RankNullspace(NamedTuple):
    rank: int
    nullspace: np.ndarray  # orthonormal basis as columns


def rank_and_nullspace(M, tol: float = RANK_RTOL) -> RankNullspace:
    """Numerical rank (singular values above ``tol * sigma_max``) and an orthonormal kernel basis."""
    M = as_numeric(M, "matrix")
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {M.shape}")
    p, q = M.shape
    if M.size == 0:
        return RankNullspace(0, np.eye(q, dtype=M.dtype))
    _, s, vh = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    basis = vh[rank:].conj().T
    return RankNullspace(rank, basis)


def matrix_rank(M, tol: float = RANK_RTOL) -> int:
    return rank_and_nullspace(M, tol).rank


def generalized_inverse(Q, tol: float = RANK_RTOL) -> GeneralizedInverse:
    """Minimum-norm right inverse ``Q^H (Q Q^H)^{-1}`` of a full-row-rank ``Q``.

    Raises:
        RankDeficient: ``rank(Q) < rows(Q)``.
    """
    Q = as_numeric(Q, "Q")
    if Q.ndim != 2:
        raise DimensionMismatch(f"Q must be a matrix, got shape {Q.shape}")
    nhat = Q.shape[0]
    u, s, vh = np.linalg.svd(Q, full_matrices=False)
    if s.size < nhat or s[0] == 0 or np.sum(s > tol * s[0]) < nhat:
        raise RankDeficient(f"Q has rank < {nhat}")
    Qbar = (vh.conj().T / s) @ u.conj().T
    residual = float(np.abs(Q @ Qbar - np.eye(nhat)).max())
    return GeneralizedInverse(Qbar, residual)


def _normalize_trailing(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    idx = np.nonzero(mags > 1e-8 * mags.max())[0][-1]
    return v / v[idx]


def eig_transpose(A, cluster_rtol: float = 1e-6) -> EigenSystem:
    """Numeric eigen-system of ``A^T``: eigenvalues with left eigenvectors of ``A``.

    Vectors are scaled so their last non-negligible entry is 1. Real
    eigenvalues of real matrices come with real vectors. Pairs are sorted by
    (real part, imaginary part).
    """
    A = as_numeric(A, "A")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    try:
        w, V = np.linalg.eig(A.T)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    real_input = not np.iscomplexobj(A)
    order = np.lexsort((w.imag, w.real))
    mult = multiplicities(w, cluster_rtol)
    pairs = []
    for i in order:
        lam = complex(w[i])
        vec = _normalize_trailing(V[:, i])
        if real_input and lam.imag == 0:
            lam = complex(lam.real, 0.0)
            vec = vec.real.copy()
        pairs.append(EigenPair(lam, vec, mult[i]))
    return EigenSystem(tuple(pairs), "numeric")


def expm_action(A, x0, t: float) -> np.ndarray:
    """``exp(A t) @ x0`` by scaling and squaring (``scipy.linalg.expm``).

    Raises:
        Overflow: the result is not finite.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    A = as_numeric(A, "A")
    x0 = np.asarray(x0)
    if A.shape[1] != x0.shape[0]:
        raise DimensionMismatch(f"A is {A.shape} but x0 has length {x0.shape[0]}")
    with np.errstate(over="raise", invalid="raise"):
        try:
            x = scipy.linalg.expm(A * t) @ x0
        except FloatingPointError as exc:
            raise Overflow(f"exp(A t) overflowed at t={t}") from exc
    if not np.all(np.isfinite(x)):
        raise Overflow(f"exp(A t) overflowed at t={t}")
    return x
