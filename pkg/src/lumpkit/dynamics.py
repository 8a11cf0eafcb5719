"""Trajectories of ``c' = A c + b`` and checks built on them.

Evolution is exact up to the matrix exponential: with the augmented matrix
``M = [[A, b], [0, 0]]``, ``(x(t), 1) = exp(M t) (x0, 1)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .errors import DimensionMismatch, GridTooCoarse
from .families import cycle3_discriminant
from .linalg import DEFAULT_TOL, eig_transpose, expm_action
from .lumping import LumpedModel, lump
from .model import CompartmentalModel

PLATEAU_TOL = 1e-12
GRID_FACTOR = 0.01


@dataclass(frozen=True)
class Trajectory:
    """States (one row per time) of ``x' = A x + b``; ``A`` may be complex for lumped systems."""

    times: np.ndarray
    states: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def coordinate(self, i: int) -> np.ndarray:
        return self.states[:, i]


def _evolve(A: np.ndarray, b: np.ndarray, x0: np.ndarray, times: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    dtype = np.result_type(A, b, x0, float)
    M = np.zeros((n + 1, n + 1), dtype=dtype)
    M[:n, :n], M[:n, n] = A, b
    y0 = np.append(x0, 1.0).astype(dtype)
    return np.array([expm_action(M, y0, float(t))[:n] for t in times])


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty vector")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be nonnegative and strictly increasing")
    return times


def evolve(A, b, x0, times) -> Trajectory:
    """Trajectory of ``x' = A x + b`` from ``x(0) = x0`` for raw (possibly complex) coefficients."""
    A = np.asarray(A)
    b = np.zeros(A.shape[0]) if b is None else np.asarray(b)
    x0 = np.asarray(x0)
    if x0.shape != (A.shape[0],) or b.shape != (A.shape[0],):
        raise DimensionMismatch(f"x0 and b must have length {A.shape[0]}")
    times = _check_times(times)
    return Trajectory(times, _evolve(A, b, x0, times), A, b)


def simulate(model: CompartmentalModel, x0, times) -> Trajectory:
    """Exact trajectory of the model's ``c' = A c + b`` on the given time grid."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.n,):
        raise DimensionMismatch(f"x0 has shape {x0.shape}, model has {model.n} compartments")
    return evolve(model.float_A(), model.float_b(), x0, times)


def default_times(A, points: int = 1001, span: float = 10.0) -> np.ndarray:
    """``points`` uniform times on ``[0, span / max|lambda|]`` (``[0, span]`` when A is nilpotent)."""
    rate = _max_rate(A)
    return np.linspace(0.0, span / rate if rate > 0 else span, points)


def _max_rate(A) -> float:
    return float(np.abs(np.linalg.eigvals(np.asarray(A))).max(initial=0.0))


def verify_commutation(model: CompartmentalModel, Q, x0, times, tol: float = DEFAULT_TOL, check: bool = True) -> float:
    """``max_t |Q x(t) - xhat(t)|_inf`` where ``xhat`` evolves under the lumped system from ``Q x0``.

    ``tol`` is the exactness tolerance handed to :func:`lump`; pass
    ``check=False`` to measure the deviation of a non-lumpable ``Q``.

    Raises:
        NotLumpable: ``check`` is set and ``Q`` is not an exact lumping.
    """
    lumped = lump(model, Q, tol=tol, check=check)
    return commutation_deviation(model, lumped, x0, times)


def commutation_deviation(model: CompartmentalModel, lumped: LumpedModel, x0, times) -> float:
    Qm = np.asarray(lumped.Q.Q, dtype=np.result_type(lumped.A_hat, float))
    full = simulate(model, x0, times)
    reduced = evolve(lumped.A_hat, lumped.b_hat, Qm @ np.asarray(x0, dtype=float), full.times)
    return float(np.abs(full.states @ Qm.T - reduced.states).max())


def count_local_extrema(trajectory: Trajectory, coordinate: int, plateau_tol: float = PLATEAU_TOL) -> int:
    """Sign changes of the discrete derivative of one coordinate, ignoring steps below ``plateau_tol``.

    Raises:
        GridTooCoarse: some time step exceeds ``0.01 / max|lambda|``.
    """
    rate = _max_rate(trajectory.A)
    if rate > 0 and np.diff(trajectory.times).max(initial=0.0) > GRID_FACTOR / rate * (1 + 1e-9):
        raise GridTooCoarse(f"time step must be <= {GRID_FACTOR / rate:.6g} for max|lambda| = {rate:.6g}")
    x = np.real(trajectory.coordinate(coordinate))
    d = np.diff(x)
    s = np.sign(d[np.abs(d) > plateau_tol])
    return int(np.count_nonzero(s[1:] != s[:-1]))


# ---------------------------------------------------------------------------
# 3-cycle region scan


@dataclass(frozen=True)
class RegionGrid:
    """Labels over a ``(k2, k3)`` grid: ``real[i, j]`` refers to ``(k2[i], k3[j])``."""

    k1: float
    k2: np.ndarray
    k3: np.ndarray
    D: np.ndarray

    @property
    def real(self) -> np.ndarray:
        return self.D >= 0

    def rows(self):
        for i, k2 in enumerate(self.k2):
            for j, k3 in enumerate(self.k3):
                yield float(k2), float(k3), float(self.D[i, j]), "real" if self.D[i, j] >= 0 else "complex"

    def write_csv(self, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["k2", "k3", "D", "label"])
        for k2, k3, D, label in self.rows():
            w.writerow(["%.17g" % k2, "%.17g" % k3, "%.17g" % D, label])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def region_scan(k1: float = 1.0, k2_range=(0.0, 20.0), k3_range=(0.0, 20.0), grid_steps: int = 201) -> RegionGrid:
    """Label each ``(k2, k3)`` cell real iff ``D = k1^2 + (k2-k3)^2 - 2 k1 (k2+k3) >= 0``.

    ``D`` is the radicand of the nontrivial 3-cycle eigenvalues, so the
    eigenvector-built lumped matrix is real exactly on ``D >= 0``.
    """
    if k1 <= 0 or min(k2_range) < 0 or min(k3_range) < 0:
        raise ValueError("rates must be nonnegative and k1 positive")
    if grid_steps < 2:
        raise ValueError("need at least 2 grid steps")
    k2 = np.linspace(*k2_range, grid_steps)
    k3 = np.linspace(*k3_range, grid_steps)
    K2, K3 = np.meshgrid(k2, k3, indexing="ij")
    return RegionGrid(float(k1), k2, k3, cycle3_discriminant(k1, K2, K3))


def cycle3_matrix(k1: float, k2: float, k3: float) -> np.ndarray:
    return np.array([[-k1, 0.0, k3], [k1, -k2, 0.0], [0.0, k2, -k3]])


def cycle3_lumped_imag(k1: float, k2: float, k3: float) -> float:
    """Largest ``|Im A_hat|`` when lumping the 3-cycle with numeric eigenvectors for ``0`` and ``(-S - sqrt D)/2``."""
    A = cycle3_matrix(k1, k2, k3)
    eigs = eig_transpose(A)
    lam = eigs.values
    zero = int(np.argmin(np.abs(lam)))
    rest = [i for i in range(3) if i != zero]
    # (-S - sqrt D)/2: the smaller real eigenvalue, or the one with negative imaginary part
    other = min(rest, key=lambda i: (lam[i].imag, lam[i].real))
    Q = eigs.vectors[[zero, other]]
    lumped = lump(CompartmentalModel(A), Q, check=False)
    return float(np.abs(np.imag(lumped.A_hat)).max())
