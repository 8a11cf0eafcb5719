"""Exact linear lumping of ``c' = A c + b`` by a constant matrix ``Q``.

For a linear system, ``c_hat = Q c`` obeys an autonomous equation exactly
when the rows of ``Q`` span an ``A^T``-invariant subspace. The lumped
coefficient matrix is then the unique ``A_hat`` with ``A_hat Q = Q A``,
computed as ``Q A Qbar`` for any right inverse ``Qbar``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from ._arrays import as_numeric, as_real_array, encode_array, is_exact
from .errors import (
    DependentSelection,
    DimensionMismatch,
    InvalidLumpingMatrix,
    NegativeEntries,
    NotLumpable,
    SingularP,
)
from .linalg import DEFAULT_TOL, EigenSystem, GeneralizedInverse, generalized_inverse, matrix_rank
from .model import CompartmentalModel, KineticReport, kinetic_report


def _coerce_q(Q) -> np.ndarray:
    arr = np.asarray(Q, dtype=object if _has_fraction(Q) else None)
    if arr.dtype == object:
        return as_real_array(arr.tolist(), 2, "Q")
    return as_numeric(arr, "Q")


def _has_fraction(values) -> bool:
    arr = np.asarray(values, dtype=object)
    return any(isinstance(v, Fraction) for v in arr.flat)


@dataclass(frozen=True)
class LumpingMatrix:
    """A full-row-rank ``n_hat x n`` matrix with ``n_hat < n`` and its provenance.

    ``selection`` records which eigenvectors built the rows and ``P`` the
    basis change applied afterwards, if any. ``allow_square`` admits
    ``n_hat == n`` for diagnostics such as ``Q = I``.
    """

    Q: np.ndarray
    selection: tuple[int, ...] | None = None
    P: np.ndarray | None = None
    allow_square: bool = False

    def __post_init__(self):
        Q = _coerce_q(self.Q)
        if Q.ndim != 2 or Q.shape[0] == 0:
            raise InvalidLumpingMatrix(f"Q must be a non-empty matrix, got shape {Q.shape}")
        nhat, n = Q.shape
        if nhat > n or (nhat == n and not self.allow_square):
            raise InvalidLumpingMatrix(f"lumping needs fewer rows than columns, got {nhat}x{n}")
        if matrix_rank(_float(Q)) < nhat:
            raise DependentSelection(f"rows of Q are linearly dependent (rank < {nhat})")
        object.__setattr__(self, "Q", Q)
        if self.selection is not None:
            object.__setattr__(self, "selection", tuple(int(i) for i in self.selection))

    @property
    def nhat(self) -> int:
        return self.Q.shape[0]

    @property
    def n(self) -> int:
        return self.Q.shape[1]

    def to_dict(self) -> dict:
        out = {"Q": encode_array(self.Q)}
        if self.selection is not None:
            out["selection"] = list(self.selection)
        if self.P is not None:
            out["P"] = encode_array(self.P)
        return out


def _float(arr: np.ndarray) -> np.ndarray:
    return arr.astype(float) if is_exact(arr) else arr


def _as_lumping(Q, allow_square: bool = False) -> LumpingMatrix:
    if isinstance(Q, LumpingMatrix):
        if allow_square and not Q.allow_square:
            return LumpingMatrix(Q.Q, Q.selection, Q.P, allow_square=True)
        return Q
    return LumpingMatrix(Q, allow_square=allow_square)


def build_Q(eigensystem: EigenSystem, selection: Sequence[int]) -> LumpingMatrix:
    """Stack the selected left eigenvectors as rows, in selection order.

    Raises:
        InvalidLumpingMatrix: the selection is empty or covers all ``n`` vectors.
        DependentSelection: the selected vectors are linearly dependent.
    """
    selection = [int(i) for i in selection]
    if not selection:
        raise InvalidLumpingMatrix("empty selection")
    rows = np.array([eigensystem.pairs[i].vector for i in selection])
    if np.iscomplexobj(rows) and np.all(rows.imag == 0):
        rows = rows.real
    if len(selection) >= rows.shape[1]:
        raise InvalidLumpingMatrix("selection must have fewer vectors than compartments")
    if matrix_rank(rows) < len(selection):
        raise DependentSelection("selected eigenvectors are linearly dependent")
    return LumpingMatrix(rows, tuple(selection))


def lumpability_residual(A, Q) -> float:
    """``|QA - QA Qbar Q|_inf / (|A|_inf |Q|_inf)``: zero iff the rows of ``QA`` lie in the row space of ``Q``."""
    A = as_numeric(A, "A")
    Qm = _float(_as_lumping(Q, allow_square=True).Q)
    if A.shape != (Qm.shape[1], Qm.shape[1]):
        raise DimensionMismatch(f"A is {A.shape} but Q has {Qm.shape[1]} columns")
    QA = Qm @ A
    Qbar = generalized_inverse(Qm).Qbar
    R = QA - QA @ Qbar @ Qm
    scale = (np.abs(A).sum(axis=1).max(initial=0.0) or 1.0) * np.abs(Qm).sum(axis=1).max()
    return float(np.abs(R).sum(axis=1).max() / scale)


def is_exactly_lumpable(A, Q, tol: float = DEFAULT_TOL) -> bool:
    """True iff every row of ``QA`` lies in the row space of ``Q`` (relative residual <= ``tol``).

    Equivalent to ``rank([Q; QA]) == rank(Q)`` and independent of which right
    inverse of ``Q`` is used.
    """
    return lumpability_residual(A, Q) <= tol


@dataclass(frozen=True)
class LumpedModel:
    A_hat: np.ndarray
    b_hat: np.ndarray
    Q: LumpingMatrix
    Qbar: GeneralizedInverse
    exactness_residual: float
    kinetic: KineticReport

    def to_dict(self) -> dict:
        return {
            "A_hat": encode_array(self.A_hat),
            "b_hat": encode_array(self.b_hat),
            **self.Q.to_dict(),
            "Qbar": encode_array(self.Qbar.Qbar),
            "residual": self.exactness_residual,
            "kinetic": self.kinetic.to_dict(),
        }


def lump(model: CompartmentalModel, Q, tol: float = DEFAULT_TOL, allow_square: bool = False, check: bool = True) -> LumpedModel:
    """Lumped system ``A_hat = Q A Qbar``, ``b_hat = Q b`` with ``Qbar`` the minimum-norm right inverse.

    ``exactness_residual`` is ``|QA - A_hat Q|_inf``. The kinetic report is
    taken on ``(A_hat, b_hat)``; a complex ``A_hat`` is reported as non-kinetic.
    Pass ``check=False`` to skip the exactness test (the result is then only
    meaningful as a diagnostic).

    Raises:
        NotLumpable: the rows of ``Q`` do not span an ``A^T``-invariant subspace.
    """
    lm = _as_lumping(Q, allow_square=allow_square)
    A = model.float_A()
    if lm.n != model.n:
        raise DimensionMismatch(f"Q has {lm.n} columns for a {model.n}-compartment model")
    Qm = _float(lm.Q)
    if check:
        rel = lumpability_residual(A, Qm)
        if rel > tol:
            raise NotLumpable(f"rows of Q do not span an invariant subspace (relative residual {rel:.3e})")
    ginv = generalized_inverse(Qm)
    A_hat = Qm @ A @ ginv.Qbar
    b_hat = Qm @ model.float_b()
    residual = float(np.abs(Qm @ A - A_hat @ Qm).max())
    return LumpedModel(A_hat, b_hat, lm, ginv, residual, kinetic_report(A_hat, b_hat))


def transform_basis(Q, P, tol: float = 1e-12) -> LumpingMatrix:
    """The lumping matrix ``P Q`` for a nonsingular ``P``; exact when both are Fraction-valued.

    Raises:
        SingularP: ``|det P| <= tol``.
    """
    lm = _as_lumping(Q, allow_square=True)
    P_arr = _coerce_q(P)
    if P_arr.shape != (lm.nhat, lm.nhat):
        raise DimensionMismatch(f"P must be {lm.nhat}x{lm.nhat}, got {P_arr.shape}")
    if abs(np.linalg.det(_float(P_arr))) <= tol:
        raise SingularP("P is singular")
    if is_exact(P_arr) or is_exact(lm.Q):
        exact_P = np.vectorize(Fraction, otypes=[object])(P_arr) if not is_exact(P_arr) else P_arr
        exact_Q = np.vectorize(Fraction, otypes=[object])(lm.Q) if not is_exact(lm.Q) else lm.Q
        PQ = exact_P.dot(exact_Q)
    else:
        PQ = P_arr @ lm.Q
    return LumpingMatrix(PQ, lm.selection, P_arr, allow_square=lm.allow_square)


class FarkasResult(NamedTuple):
    has_nonneg_geninverse: bool
    witness_row: int | None


def farkas_row_test(Q, tol: float = 0.0) -> FarkasResult:
    """Decide whether a nonnegative ``Q`` has a nonnegative right inverse.

    None exists iff some row has, in the column of each of its positive
    entries, another positive entry; the first such row is the witness.

    Raises:
        NegativeEntries: ``Q`` has an entry below ``-tol``.
    """
    Qm = _float(_coerce_q(Q))
    if np.iscomplexobj(Qm):
        raise NegativeEntries("complex matrix")
    if np.any(Qm < -tol):
        raise NegativeEntries("the row criterion only applies to nonnegative matrices")
    positive = Qm > tol
    for r in range(Qm.shape[0]):
        others = np.delete(positive, r, axis=0).any(axis=0)
        if np.all(others[positive[r]]):
            return FarkasResult(False, r)
    return FarkasResult(True, None)


def kinetic_after_lumping(model: CompartmentalModel, Q, tol: float = DEFAULT_TOL) -> KineticReport:
    """Kinetic report of the lumped system; ``Q`` may be square here (``Q = I`` diagnostic).

    For nonnegative ``Q`` with a nonnegative right inverse the lumped system
    is always kinetic; a violation of that implication is reported as a
    warning since it can only stem from round-off.
    """
    lumped = lump(model, Q, tol=tol, allow_square=True)
    Qm = _float(lumped.Q.Q)
    if not np.iscomplexobj(Qm) and np.all(Qm >= 0):
        if farkas_row_test(Qm).has_nonneg_geninverse and not lumped.kinetic.is_kinetic:
            warnings.warn("nonnegative Q with nonnegative right inverse gave a non-kinetic lump", RuntimeWarning)
    return lumped.kinetic
