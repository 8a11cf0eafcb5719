"""Parameterized model families with closed-form left eigen-systems.

Each constructor returns the model together with the eigenvalues and left
eigenvectors (eigenvectors of ``A^T``) evaluated at the given parameters.
Eigenvector scaling follows the conventional tables for each family (either
the first or the last nonzero entry equals one); lumping only depends on
the row space, so the scaling is cosmetic.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonRobustParameters
from .linalg import EigenPair, EigenSystem, multiplicities
from .model import CompartmentalModel

ROBUST_RTOL = 1e-9


def _positive(values, name: str, allow_zero: bool = False) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    bad = arr < 0 if allow_zero else arr <= 0
    if np.any(bad) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be {'nonnegative' if allow_zero else 'positive'}: {arr}")
    return arr


def check_distinct(values, what: str = "eigenvalues") -> None:
    """Raise :class:`NonRobustParameters` if two values are closer than ``1e-9 * max|value|``."""
    values = np.asarray(values, dtype=complex)
    scale = np.abs(values).max(initial=0.0)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= ROBUST_RTOL * scale:
                raise NonRobustParameters(f"{what} {i} and {j} coincide ({values[i]})")


def _system(values, vectors, mult=None) -> EigenSystem:
    mult = multiplicities(values, ROBUST_RTOL) if mult is None else mult
    return EigenSystem(
        tuple(EigenPair(complex(lam), np.asarray(v), m) for lam, v, m in zip(values, vectors, mult)),
        "closed-form",
    )


# ---------------------------------------------------------------------------
# chains


def catenary_irreversible(k, mu=None) -> tuple[CompartmentalModel, EigenSystem]:
    """Irreversible chain ``X1 -> X2 -> ... -> XM`` with optional outflows ``mu``.

    ``k`` holds the M-1 transfer rates, ``mu`` the M outflow rates (default
    zero). Without outflows the eigenvectors are scaled leading-1, with
    outflows trailing-1 (the entry at the eigenvalue's own compartment is 1).
    """
    k = _positive(k, "k")
    M = len(k) + 1
    mu = np.zeros(M) if mu is None else _positive(mu, "mu", allow_zero=True)
    if len(mu) != M:
        raise DimensionMismatch(f"mu needs {M} entries, got {len(mu)}")
    diag = np.append(-k - mu[:-1], -mu[-1])
    A = np.diag(diag) + np.diag(k, -1)
    check_distinct(diag)

    vectors = []
    for j in range(M):
        lam = diag[j]
        v = np.zeros(M)
        v[j] = 1.0
        # (A^T v)_i = a_ii v_i + k_i v_{i+1}
        for i in range(j - 1, -1, -1):
            v[i] = k[i] * v[i + 1] / (lam - diag[i])
        if not mu.any():
            v = v / v[0]
        vectors.append(v)
    return CompartmentalModel(A), _system(diag, vectors)


def reversible_chain(forward, backward) -> CompartmentalModel:
    """Reversible chain ``X_i <-> X_{i+1}``; no closed form, use the numeric eigen path."""
    f = _positive(forward, "forward", allow_zero=True)
    b = _positive(backward, "backward", allow_zero=True)
    if len(f) != len(b):
        raise DimensionMismatch("forward and backward rates must have equal length")
    M = len(f) + 1
    A = np.zeros((M, M))
    for i in range(M - 1):
        A[i + 1, i] += f[i]
        A[i, i] -= f[i]
        A[i, i + 1] += b[i]
        A[i + 1, i + 1] -= b[i]
    return CompartmentalModel(A)


def nonuniform_chain_example(k) -> tuple[CompartmentalModel, EigenSystem]:
    """Five-compartment chain with arrows pointing both ways along the line.

    Steps: ``X1 -> X2``, ``X3 -> X2``, ``X3 -> X4``, ``X5 -> X4`` with rates
    ``k1..k4``. Eigenvalue 0 is double.
    """
    k1, k2, k3, k4 = _positive(k, "k")
    A = np.array(
        [
            [-k1, 0, 0, 0, 0],
            [k1, 0, k2, 0, 0],
            [0, 0, -k2 - k3, 0, 0],
            [0, 0, k3, 0, k4],
            [0, 0, 0, 0, -k4],
        ]
    )
    c = (k2 + k3) / k2
    values = [-k1, -k2 - k3, -k4, 0.0, 0.0]
    check_distinct(values[:4])
    vectors = [
        [1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1],
        [c, c, 1, 0, 0],
        [-k3 / k2, -k3 / k2, 0, 1, 1],
    ]
    return CompartmentalModel(A), _system(values, np.array(vectors, dtype=float))


def parallel_pathways_example(k) -> CompartmentalModel:
    """``S -> I1 -> P`` and ``S -> I2 -> P`` with rates ``k1, k2`` and ``k3, k4``.

    Species order is (S, I1, I2, P).
    """
    k1, k2, k3, k4 = _positive(k, "k")
    A = np.array(
        [
            [-k1 - k3, 0, 0, 0],
            [k1, -k2, 0, 0],
            [k3, 0, -k4, 0],
            [0, k2, k4, 0],
        ]
    )
    return CompartmentalModel(A, species=("S", "I1", "I2", "P"))


# ---------------------------------------------------------------------------
# mamillary systems


def mamillary_inward(k) -> tuple[CompartmentalModel, EigenSystem]:
    """Peripheral compartments ``X1..XM`` each feeding the mother compartment ``X_{M+1}``."""
    k = _positive(k, "k")
    M = len(k)
    check_distinct(-k, "rates")
    A = np.zeros((M + 1, M + 1))
    A[np.arange(M), np.arange(M)] = -k
    A[M, :M] = k
    values = list(-k) + [0.0]
    vectors = list(np.eye(M + 1)[:M]) + [np.ones(M + 1)]
    return CompartmentalModel(A), _system(values, vectors)


def mamillary_outward(k) -> tuple[CompartmentalModel, EigenSystem]:
    """Mother compartment ``X_{M+1}`` feeding each peripheral ``X_i`` at rate ``k_i``.

    Eigenvalue ``-K`` (``K = sum k``) has eigenvector ``e_{M+1}``; eigenvalue
    0 has multiplicity M with eigenvectors ``e_i - (k_i/k_M) e_M`` and
    ``(K/k_M) e_M + e_{M+1}``.
    """
    k = _positive(k, "k")
    M = len(k)
    K = k.sum()
    A = np.zeros((M + 1, M + 1))
    A[:M, M] = k
    A[M, M] = -K
    values = [-K]
    vectors = [np.eye(M + 1)[M]]
    for i in range(M - 1):
        v = np.zeros(M + 1)
        v[i] = 1.0
        v[M - 1] = -k[i] / k[M - 1]
        vectors.append(v)
        values.append(0.0)
    last = np.zeros(M + 1)
    last[M - 1] = K / k[M - 1]
    last[M] = 1.0
    vectors.append(last)
    values.append(0.0)
    return CompartmentalModel(A), _system(values, vectors, [1] + [M] * M)


def mamillary_mixed_example(k) -> tuple[CompartmentalModel, EigenSystem]:
    """Six compartments: ``X1, X2`` drain out, mother ``X6`` feeds ``X3, X4, X5``."""
    k1, k2, k3, k4, k5 = _positive(k, "k")
    if abs(k1 - k2) <= ROBUST_RTOL * max(k1, k2):
        raise NonRobustParameters("k1 and k2 coincide")
    K = k3 + k4 + k5
    A = np.zeros((6, 6))
    A[0, 0], A[1, 1] = -k1, -k2
    A[2:5, 5] = (k3, k4, k5)
    A[5, 5] = -K
    values = [-k1, -k2, -K, 0.0, 0.0, 0.0]
    vectors = np.array(
        [
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 1],
            [0, 0, 1, 0, 0, k3 / K],
            [0, 0, 1, 0, -k3 / k5, 0],
            [0, 0, 1, -k3 / k4, 0, 0],
        ],
        dtype=float,
    )
    return CompartmentalModel(A), _system(values, vectors)


def mamillary_reversible_uniform(k: float, K: float, M: int = 4) -> tuple[CompartmentalModel, EigenSystem]:
    """Mother ``X_{M+1}`` exchanging with M peripherals: out at rate ``K``, back at rate ``k``.

    Eigenvalues: ``-k`` (multiplicity M-1), ``0`` and ``-k - M K``.
    """
    k, K = _positive([k, K], "rates")
    if M < 1:
        raise ValueError("need at least one peripheral compartment")
    A = np.zeros((M + 1, M + 1))
    A[np.arange(M), np.arange(M)] = -k
    A[:M, M] = K
    A[M, :M] = k
    A[M, M] = -M * K
    values, vectors = [], []
    for j in range(M - 1, 0, -1):
        v = np.zeros(M + 1)
        v[0], v[j] = -1.0, 1.0
        values.append(-k)
        vectors.append(v)
    values.append(0.0)
    vectors.append(np.ones(M + 1))
    values.append(-k - M * K)
    vectors.append(np.append(np.full(M, -k / (M * K)), 1.0))
    return CompartmentalModel(A), _system(values, vectors)


# ---------------------------------------------------------------------------
# circulant systems and cycles


def _root_powers(k: int, M: int) -> np.ndarray:
    if k % M == 0:
        return np.ones(M, dtype=complex)
    if (2 * k) % M == 0:
        return np.array([(-1.0) ** m for m in range(M)], dtype=complex)
    return np.exp(2j * np.pi * ((k * np.arange(M)) % M) / M)


def circulant_simplicial(c, d: float = 0.0, real_basis: bool = False) -> tuple[CompartmentalModel, EigenSystem]:
    """Compartments with circulant transfer pattern plus a common outflow ``d``.

    ``A^T`` is the circulant matrix with first row ``(c0, c1, ..., c_{M-1})``
    and ``c0 = -(sum c + d)``. The eigenvalues are ``sum_m c_m eps_k**m`` with
    eigenvectors ``(1, eps_k, ..., eps_k**(M-1))``, ``eps_k = exp(2 pi i k / M)``.

    With ``real_basis`` every coinciding conjugate pair ``(k, M-k)`` is replaced
    by the real and imaginary parts of the ``k``-th vector.
    """
    c = _positive(c, "c", allow_zero=True)
    if d < 0:
        raise ValueError("outflow d must be nonnegative")
    M = len(c) + 1
    if M < 2:
        raise ValueError("need at least two compartments")
    coeffs = np.concatenate([[-(c.sum() + d)], c])
    At = np.array([[coeffs[(j - i) % M] for j in range(M)] for i in range(M)])
    A = At.T.copy()

    vectors = [_root_powers(k, M) for k in range(M)]
    values = [complex(np.dot(coeffs, v)) for v in vectors]
    for k in range(M):
        if (2 * k) % M == 0:
            values[k] = complex(values[k].real, 0.0)
            vectors[k] = vectors[k].real
    if real_basis:
        scale = max(1.0, max(abs(v) for v in values))
        for k in range(1, (M + 1) // 2):
            if (2 * k) % M and abs(values[k] - values[M - k]) <= ROBUST_RTOL * scale:
                lam = values[k].real
                values[k] = values[M - k] = complex(lam, 0.0)
                vk = vectors[k]
                vectors[k], vectors[M - k] = vk.real.copy(), vk.imag.copy()
    return CompartmentalModel(A), _system(values, vectors)


def cycle(k, reversible: bool = False, k_back=None) -> CompartmentalModel:
    """Circular system ``X1 -> X2 -> ... -> XM -> X1`` with rates ``k``.

    When ``reversible`` each step ``X_i -> X_{i+1}`` is paired with
    ``X_{i+1} -> X_i`` at rate ``k_back[i]`` (default: the same ``k[i]``).
    """
    k = _positive(k, "k")
    M = len(k)
    if M < 2 or (reversible and M < 3):
        raise ValueError("cycle needs at least 2 compartments (3 when reversible)")
    A = np.zeros((M, M))
    for i in range(M):
        A[(i + 1) % M, i] += k[i]
        A[i, i] -= k[i]
    if reversible:
        back = k if k_back is None else _positive(k_back, "k_back")
        if len(back) != M:
            raise DimensionMismatch("k_back must match k")
        for i in range(M):
            A[i, (i + 1) % M] += back[i]
            A[(i + 1) % M, (i + 1) % M] -= back[i]
    elif k_back is not None:
        raise ValueError("k_back only applies to reversible cycles")
    return CompartmentalModel(A)


def cycle3_discriminant(k1, k2, k3):
    """``k1^2 + (k2 - k3)^2 - 2 k1 (k2 + k3)``; the 3-cycle spectrum is real iff it is >= 0."""
    return k1**2 + (k2 - k3) ** 2 - 2 * k1 * (k2 + k3)


def cycle3_eigensystem(k) -> EigenSystem:
    """Closed-form left eigen-system of the irreversible 3-cycle (trailing-1 scaling)."""
    k1, k2, k3 = _positive(k, "k")
    S = k1 + k2 + k3
    D = cycle3_discriminant(k1, k2, k3)
    r = cmath.sqrt(D)
    values = [0.0, (-S - r) / 2, (-S + r) / 2]
    vectors = [
        np.ones(3, dtype=complex),
        np.array([-(k1 + k2 - k3 + r) / (2 * k3), k2 * (-k1 + k2 - k3 + r) / (2 * k1 * k3), 1]),
        np.array([(-k1 - k2 + k3 + r) / (2 * k3), -k2 * (k1 - k2 + k3 + r) / (2 * k1 * k3), 1]),
    ]
    check_distinct(values)
    if D >= 0:
        values = [complex(v).real for v in values]
        vectors = [v.real for v in vectors]
    return _system(values, vectors)


def cycle_eigensystem(k, reversible: bool = False) -> EigenSystem:
    """Closed-form eigen-system for uniform cycles (circulant) and the irreversible 3-cycle.

    Raises:
        ValueError: no closed form for these parameters; use ``eig_transpose``.
    """
    k = _positive(k, "k")
    M = len(k)
    if np.all(k == k[0]):
        c = np.zeros(M - 1)
        c[0] += k[0]
        if reversible:
            c[-1] += k[0]
        return circulant_simplicial(c, 0.0)[1]
    if not reversible and M == 3:
        return cycle3_eigensystem(k)
    raise ValueError("no closed form for a non-uniform cycle of this size; use the numeric eigen path")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    residuals: tuple[float, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def verify_closed_form(model: CompartmentalModel, eigensystem: EigenSystem, tol: float = 1e-12) -> ResidualReport:
    """Largest normalized residual ``|A^T v - lambda v| / (|A^T| |v|)`` over the pairs."""
    for p in eigensystem.pairs:
        if len(p.vector) != model.n:
            raise DimensionMismatch(f"eigenvector of length {len(p.vector)} for a {model.n}-compartment model")
    res = eigensystem.residuals(model.float_A())
    return ResidualReport(float(res.max(initial=0.0)), tuple(float(r) for r in res), tol)
