"""Basis changes that make a lumping matrix nonnegative or real.

Problem 1: for a real full-rank ``2 x n`` matrix ``Q``, is there a
nonsingular ``P`` with ``PQ >= 0``?  Each row ``p`` of ``P`` must lie in the
cone ``{p : p . q_j >= 0 for every column q_j}``; a nonsingular ``P`` exists
iff that cone has nonempty interior. The nine-case sign taxonomy of the
columns is used to name a structural reason when it does not.

Problem 2: for a complex full-rank ``n_hat x n`` matrix ``Q``, is there a
nonsingular ``P`` with ``PQ`` real?  Each row ``p + i q`` of ``P`` solves the
real homogeneous system built by :func:`build_real_coefficient_matrix`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize
import sympy

from ._arrays import as_numeric, encode_array
from .errors import DimensionMismatch, RankDeficient
from .linalg import matrix_rank, rank_and_nullspace

SIGN_TOL = 1e-12
ANGLE_TOL = 1e-12
REAL_TOL = 1e-10
MAX_RANDOM_DRAWS = 64

_CASE_BY_SIGNS = {
    (0, 0): 1,
    (0, -1): 2,
    (1, -1): 3,
    (1, 0): 4,
    (1, 1): 5,
    (0, 1): 6,
    (-1, 1): 7,
    (-1, 0): 8,
    (-1, -1): 9,
}

# column-type triples that rule out P whatever the magnitudes are
TRIPLES_BY_SIGN = frozenset(
    frozenset(int(c) for c in s) for s in ("247", "257", "258", "358", "368", "369", "469", "479", "569")
)
# triples that rule out P only under a slope condition
TRIPLES_BY_SLOPE = frozenset(
    frozenset(int(c) for c in s) for s in ("259", "347", "357", "359", "367", "378", "379", "459")
)

PAIR_RULE = "pair-rule"
TRIPLE_RULE = "triple-rule"
QUADRUPLE_RULE = "quadruple-2358"
SLOPE_RULE = "slope-rule"
DEGENERATE_CONE = "degenerate-cone"
NULLSPACE_DEFICIENT = "nullspace-deficient"


@dataclass(frozen=True)
class SignPattern:
    """Case id (1..9) of each column, by the sign pair of its two entries."""

    cases: tuple[int, ...]

    @property
    def present(self) -> frozenset[int]:
        return frozenset(self.cases)


def _sign(x: float, tol: float) -> int:
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def classify_columns(Q, tol: float = SIGN_TOL) -> SignPattern:
    Q = _two_row(Q)
    return SignPattern(tuple(_CASE_BY_SIGNS[(_sign(a, tol), _sign(b, tol))] for a, b in Q.T))


def _two_row(Q) -> np.ndarray:
    Q = as_numeric(Q, "Q")
    if np.iscomplexobj(Q):
        raise ValueError("Q must be real")
    if Q.ndim != 2 or Q.shape[0] != 2:
        raise DimensionMismatch(f"expected a 2 x n matrix, got shape {Q.shape}")
    return Q


# ---------------------------------------------------------------------------
# cone geometry


@dataclass(frozen=True)
class ConeRegion:
    """The cone ``{p in R^2 : p . q_j >= 0}`` as an angular sector ``[theta_lo, theta_hi]``.

    ``kind`` is one of ``full``, ``halfplane``, ``sector-with-interior``,
    ``ray``, ``line`` or ``empty-or-origin``. For ``line`` the sector holds one
    of the two opposite rays; angles are ``None`` for ``full`` and
    ``empty-or-origin``.
    """

    kind: str
    theta_lo: float | None = None
    theta_hi: float | None = None

    @property
    def width(self) -> float:
        if self.kind == "full":
            return 2 * math.pi
        if self.theta_lo is None:
            return 0.0
        return self.theta_hi - self.theta_lo

    @property
    def has_interior(self) -> bool:
        return self.kind in ("full", "halfplane", "sector-with-interior")


def _angles(normals: np.ndarray) -> np.ndarray:
    return np.arctan2(normals[:, 1], normals[:, 0])


def _gaps(angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted angles and the counter-clockwise gap following each one."""
    a = np.sort(angles)
    return a, np.diff(np.append(a, a[0] + 2 * math.pi))


def _interior_width(normals: np.ndarray) -> float:
    """Angular width of the feasible cone's interior: (largest gap between normals) - pi."""
    if len(normals) == 0:
        return 2 * math.pi
    _, gaps = _gaps(_angles(normals))
    return float(gaps.max() - math.pi)


def _nonzero_columns(Q: np.ndarray, tol: float) -> np.ndarray:
    return np.nonzero((np.abs(Q) > tol).any(axis=0))[0]


def feasible_cone(Q, tol: float = SIGN_TOL, angle_tol: float = ANGLE_TOL) -> ConeRegion:
    """Intersect the half-planes ``a_1j p_1 + a_2j p_2 >= 0``; zero columns impose nothing."""
    Q = _two_row(Q)
    normals = Q[:, _nonzero_columns(Q, tol)].T
    if len(normals) == 0:
        return ConeRegion("full")
    a, gaps = _gaps(_angles(normals))
    i = int(np.argmax(gaps))
    g = gaps[i]
    # normals occupy the arc from a[i+1] ccw to a[i]; feasible directions lie within pi/2 of all
    start = a[(i + 1) % len(a)] + (2 * math.pi if i + 1 == len(a) else 0.0)
    lo, hi = start + (2 * math.pi - g) - math.pi / 2, start + math.pi / 2
    lo, hi = _wrap_pair(lo, hi)
    width = g - math.pi
    if width > math.pi - angle_tol:
        return ConeRegion("halfplane", lo, hi)
    if width > angle_tol:
        return ConeRegion("sector-with-interior", lo, hi)
    if width < -angle_tol:
        return ConeRegion("empty-or-origin")
    mid = (lo + hi) / 2
    near_pi = np.sum(np.abs(gaps - math.pi) <= angle_tol)
    return ConeRegion("line" if near_pi >= 2 else "ray", mid, mid)


def _wrap_pair(lo: float, hi: float) -> tuple[float, float]:
    shift = 2 * math.pi * math.floor((lo + math.pi) / (2 * math.pi))
    return lo - shift, hi - shift


# ---------------------------------------------------------------------------
# problem 1


@dataclass(frozen=True)
class RealizabilityCertificate:
    feasible: bool
    witness_P: np.ndarray | None = None
    infeasibility_reason: str | None = None
    columns: tuple[int, ...] = ()
    pattern: tuple[int, ...] = ()
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "feasible": self.feasible,
            "P": encode_array(self.witness_P) if self.witness_P is not None else None,
            "reason": self.infeasibility_reason,
        }
        if self.columns:
            out["columns"] = list(self.columns)
            out["pattern"] = "".join(str(c) for c in self.pattern)
        out.update(self.details)
        return out


def _infeasibility_reason(Q: np.ndarray, tol: float, angle_tol: float) -> tuple[str, tuple[int, ...], tuple[int, ...]]:
    """Smallest group of columns whose half-planes leave no interior, named by the case taxonomy."""
    cases = classify_columns(Q, tol).cases
    cols = [int(j) for j in _nonzero_columns(Q, tol)]

    def blocked(idx) -> bool:
        return _interior_width(Q[:, list(idx)].T) <= angle_tol

    for pair in itertools.combinations(cols, 2):
        if blocked(pair):
            return PAIR_RULE, pair, tuple(cases[j] for j in pair)
    triples = [t for t in itertools.combinations(cols, 3) if blocked(t)]
    for t in triples:
        if frozenset(cases[j] for j in t) in TRIPLES_BY_SIGN:
            return TRIPLE_RULE, t, tuple(cases[j] for j in t)
    if triples:
        t = triples[0]
        return SLOPE_RULE, t, tuple(cases[j] for j in t)
    present = {c: j for j, c in reversed(list(enumerate(cases)))}
    if {2, 3, 5, 8} <= present.keys():
        quad = tuple(sorted(present[c] for c in (2, 3, 5, 8)))
        return QUADRUPLE_RULE, quad, tuple(cases[j] for j in quad)
    return DEGENERATE_CONE, (), ()


def exists_nonneg_P(Q, tol: float = SIGN_TOL, angle_tol: float = ANGLE_TOL) -> RealizabilityCertificate:
    """Decide whether a nonsingular ``P`` with ``PQ >= 0`` exists, with a witness or a reason.

    Two rows use the cone-interior test; the witness is ``I`` when ``Q`` is
    already nonnegative, else the unit vectors along the sector bisector and
    along the bisector rotated by a third of the sector width. One row needs
    all nonzero entries to share a sign. More rows fall back to a linear
    program for an interior point of the cone.

    Raises:
        RankDeficient: ``Q`` does not have full row rank.
    """
    Q = as_numeric(Q, "Q")
    if np.iscomplexobj(Q) or Q.ndim != 2:
        raise ValueError("Q must be a real matrix")
    nhat = Q.shape[0]
    if matrix_rank(Q) < nhat:
        raise RankDeficient(f"Q has rank < {nhat}")
    if np.all(Q >= -tol):
        return RealizabilityCertificate(True, np.eye(nhat))
    if nhat == 1:
        if np.all(Q <= tol):
            return RealizabilityCertificate(True, -np.eye(1))
        return RealizabilityCertificate(False, infeasibility_reason=DEGENERATE_CONE)
    if nhat > 2:
        return _nonneg_P_lp(Q, tol)

    cone = feasible_cone(Q, tol, angle_tol)
    if cone.has_interior:
        mid = (cone.theta_lo + cone.theta_hi) / 2
        second = mid + cone.width / 3
        P = np.array([[math.cos(mid), math.sin(mid)], [math.cos(second), math.sin(second)]])
        P[np.abs(P) < 1e-15] = 0.0
        return RealizabilityCertificate(True, P, details={"cone": cone.kind})
    reason, cols, pattern = _infeasibility_reason(Q, tol, angle_tol)
    return RealizabilityCertificate(False, None, reason, cols, pattern, {"cone": cone.kind})


def _nonneg_P_lp(Q: np.ndarray, tol: float) -> RealizabilityCertificate:
    nhat, n = Q.shape
    cols = Q[:, _nonzero_columns(Q, tol)]
    # maximize s subject to p . q_j >= s, -1 <= p <= 1
    c = np.zeros(nhat + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-cols.T, np.ones((cols.shape[1], 1))])
    res = scipy.optimize.linprog(
        c, A_ub=A_ub, b_ub=np.zeros(cols.shape[1]), bounds=[(-1, 1)] * nhat + [(None, 1)], method="highs"
    )
    margin = -res.fun if res.status == 0 else 0.0
    if margin <= 1e-9:
        return RealizabilityCertificate(False, infeasibility_reason=DEGENERATE_CONE, details={"cone": "no-interior"})
    p0 = res.x[:nhat]
    eps = 0.5 * margin / np.abs(cols).sum(axis=0).max()
    keep = int(np.argmax(np.abs(p0)))
    rows = [p0] + [p0 + eps * np.eye(nhat)[i] for i in range(nhat) if i != keep]
    return RealizabilityCertificate(True, np.array(rows), details={"cone": "interior"})


def brute_force_nonneg_P_oracle(Q, samples: int = 3600) -> bool:
    """Independent check for 2-row ``Q``: probe boundary directions, their midpoints and a dense angle grid."""
    Q = _two_row(Q)
    normals = Q[:, (Q != 0).any(axis=0)].T
    if len(normals) == 0:
        return True
    bounds = np.concatenate([np.arctan2(normals[:, 0], -normals[:, 1]), np.arctan2(-normals[:, 0], normals[:, 1])])
    bounds = np.sort(np.mod(bounds, 2 * math.pi))
    mids = (bounds + np.append(bounds[1:], bounds[0] + 2 * math.pi)) / 2
    grid = np.linspace(0, 2 * math.pi, samples, endpoint=False)
    theta = np.concatenate([bounds, mids, grid])
    dirs = np.stack([np.cos(theta), np.sin(theta)])
    values = normals @ dirs
    scale = np.linalg.norm(normals, axis=1)[:, None]
    return bool(np.any(np.all(values > 1e-11 * scale, axis=0)))


# ---------------------------------------------------------------------------
# problem 2


def build_real_coefficient_matrix(Qc) -> np.ndarray:
    """Row ``k`` is ``[b_1k .. b_{n_hat}k, a_1k .. a_{n_hat}k]`` for ``Qc = (a) + i (b)``.

    A vector ``(p, q)`` is in its kernel iff the row ``p + i q`` of ``P``
    makes the corresponding row of ``PQ`` real.
    """
    Qc = np.asarray(as_numeric(Qc, "Q"), dtype=complex)
    if Qc.ndim != 2:
        raise DimensionMismatch(f"Q must be a matrix, got shape {Qc.shape}")
    return np.hstack([Qc.imag.T, Qc.real.T])


def _complex_rows(N: np.ndarray, nhat: int) -> np.ndarray:
    """Map kernel vectors (columns ``(p, q)``) to complex row candidates ``p + i q``."""
    return (N[:nhat] + 1j * N[nhat:]).T


def exists_real_P(Qc, tol: float = REAL_TOL, seed: int = 0) -> RealizabilityCertificate:
    """Decide whether a nonsingular ``P`` with ``PQ`` real exists, with a witness.

    Real ``Q`` gives ``P = I`` and purely imaginary ``Q`` gives ``P = -iI``. A square ``Q = Q1 + i Q2`` with nonsingular
    ``Q1, Q2`` and ``Q1^T Q2 = Q2^T Q1`` gives ``P = Q1^T - i Q2^T``. Otherwise
    the kernel ``N`` of the real coefficient matrix is computed and a ``P``
    exists iff the complex forms of ``N`` span ``C^{n_hat}``; rows are picked
    by pivoted QR, with up to 64 seeded random combinations as a fallback.

    Raises:
        RankDeficient: ``Q`` does not have full row rank over the complex field.
    """
    Qc = np.asarray(as_numeric(Qc, "Q"), dtype=complex)
    if Qc.ndim != 2:
        raise DimensionMismatch(f"Q must be a matrix, got shape {Qc.shape}")
    nhat, n = Qc.shape
    if matrix_rank(Qc) < nhat:
        raise RankDeficient(f"Q has rank < {nhat}")
    scale = np.abs(Qc).max()
    if np.all(np.abs(Qc.imag) <= tol * scale):
        return RealizabilityCertificate(True, np.eye(nhat), details={"path": "real"})
    if np.all(np.abs(Qc.real) <= tol * scale):
        return RealizabilityCertificate(True, -1j * np.eye(nhat), details={"path": "imaginary"})

    Q1, Q2 = Qc.real, Qc.imag
    if nhat == n and matrix_rank(Q1) == n and matrix_rank(Q2) == n and np.allclose(Q1.T @ Q2, Q2.T @ Q1, rtol=0, atol=tol * scale**2):
        P = Q1.T - 1j * Q2.T
        return RealizabilityCertificate(True, P, details={"path": "symmetric"})

    C = build_real_coefficient_matrix(Qc)
    r, N = rank_and_nullspace(C, tol)
    details = {"path": "nullspace", "rank": r, "nullity": int(N.shape[1])}
    if N.shape[1] == 0:
        return RealizabilityCertificate(False, None, NULLSPACE_DEFICIENT, details=details)
    Z = _complex_rows(N, nhat)
    if matrix_rank(Z, tol) < nhat:
        return RealizabilityCertificate(False, None, NULLSPACE_DEFICIENT, details=details)

    _, _, piv = scipy.linalg.qr(Z.T, pivoting=True)
    P = Z[piv[:nhat]]
    if abs(np.linalg.det(P)) <= 1e-9:
        rng = np.random.default_rng(seed)
        for _ in range(MAX_RANDOM_DRAWS):
            P = rng.standard_normal((nhat, Z.shape[0])) @ Z
            if abs(np.linalg.det(P)) > 1e-9:
                break
        else:
            return RealizabilityCertificate(False, None, NULLSPACE_DEFICIENT, details=details)
    return RealizabilityCertificate(True, P, details=details)


def free_parameter_basis(Qc) -> np.ndarray:
    """Kernel of the real coefficient matrix in free-variable form (columns), computed exactly.

    The ``j``-th column sets the ``j``-th free unknown to 1 and the others to 0.
    Entries are rounded through their exact binary values, so rational input
    gives the textbook parameterization.
    """
    C = build_real_coefficient_matrix(Qc)
    M = sympy.Matrix([[sympy.nsimplify(v, rational=True) for v in row] for row in C])
    basis = M.nullspace()
    if not basis:
        return np.zeros((C.shape[1], 0))
    return np.array([[float(x) for x in vec] for vec in basis]).T


def real_P_from_parameters(Qc, parameters) -> np.ndarray:
    """Assemble ``P`` from one free-parameter vector per row (see :func:`free_parameter_basis`)."""
    Qc = np.asarray(as_numeric(Qc, "Q"), dtype=complex)
    nhat = Qc.shape[0]
    basis = free_parameter_basis(Qc)
    params = np.atleast_2d(np.asarray(parameters, dtype=float))
    if params.shape != (nhat, basis.shape[1]):
        raise DimensionMismatch(f"need {nhat} parameter vectors of length {basis.shape[1]}")
    return _complex_rows(basis @ params.T, nhat)
