"""Worked examples with their reference lumping matrices and expected lumped systems.

Matrices that depend on rate constants are functions of those constants.
``catalog()`` evaluates every example at fixed parameters for the
``fixtures`` command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as F

import numpy as np

from . import families
from .linalg import eig_transpose
from .model import CompartmentalModel

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)
GOLDEN = (SQRT5 + 1) / 2

# reversible chain of five species
CHAIN5_FORWARD = (1.0, 4.0, 2.0, 1.0)
CHAIN5_BACKWARD = (1.0, 4.0, 5.0, 2.0)
CHAIN5_EIGENVECTORS = np.array(
    [
        [0.2, -0.2, -0.2, 0.0, 1.0],
        [-0.689897, 0.069693, 0.240408, 0.449489, 1.0],
        [0.289897, -2.869693, 4.159591, -4.449489, 1.0],
        [-0.2, 1.0, -0.2, -2.0, 1.0],
        [1.0, 1.0, 1.0, 1.0, 1.0],
    ]
)
CHAIN5_Q = CHAIN5_EIGENVECTORS[[2, 0]]
CHAIN5_A_HAT = np.diag([-10.898979, -2.0])


def chain5() -> CompartmentalModel:
    return families.reversible_chain(CHAIN5_FORWARD, CHAIN5_BACKWARD)


def chain5_Q() -> np.ndarray:
    """Full-precision version of the reference chain Q, from the numeric eigen-system."""
    eigs = eig_transpose(chain5().float_A())
    lam = eigs.values.real
    rows = [eigs.vectors[int(np.argmin(np.abs(lam - target)))] for target in (-6 - 2 * math.sqrt(6), -2.0)]
    return np.array(rows)


def flowed_catenary_Q(k, mu) -> np.ndarray:
    """Two left eigenvectors of the 5-compartment flowed catenary (eigenvalues ``-k2-mu2``, ``-k4-mu4``)."""
    k1, k2, k3, k4 = k
    m1, m2, m3, m4 = mu[:4]
    d12 = k1 - k2 + m1 - m2
    d14, d24, d34 = k1 - k4 + m1 - m4, k2 - k4 + m2 - m4, k3 - k4 + m3 - m4
    return np.array(
        [
            [k1 / d12, 1.0, 0.0, 0.0, 0.0],
            [k1 * k2 * k3 / (d14 * d24 * d34), k2 * k3 / (d24 * d34), k3 / d34, 1.0, 0.0],
        ]
    )


def flowed_catenary_A_hat(k, mu) -> np.ndarray:
    return np.diag([-k[1] - mu[1], -k[3] - mu[3]])


NONUNIFORM_Q1 = np.array([[0, 0, 0, 0, 1], [0, 0, 1, 0, 0], [1, 0, 0, 0, 0]], dtype=float)


def nonuniform_Q1_A_hat(k) -> np.ndarray:
    k1, k2, k3, k4 = k
    return np.diag([-k4, -k2 - k3, -k1])


def nonuniform_Q2(k) -> np.ndarray:
    k1, k2, k3, k4 = k
    c = (k2 + k3) / k2
    return np.array([[1, 0, 0, 0, 0], [0, 0, 1, 0, 0], [c, c, 1, 0, 0]], dtype=float)


def nonuniform_Q2_printed_A_hat(k) -> np.ndarray:
    """The dense lumped matrix given as the reference for the second lumping matrix."""
    k1, k2, k3, k4 = k
    s = k2 + k3
    return np.array(
        [
            [-2 * k1, -k1 * k2 / s, k1 * k2 / s],
            [-k2, -(k2**2) / s - k2 - k3, k2**2 / s],
            [-2 * k1 * s / k2 - k2, -(k1 * s + k2**2) / s - k2 - k3, (k1 * s + k2**2) / s],
        ]
    )


MAMILLARY_INWARD_Q = np.array([[0, 0, 1, 0], [1, 0, 0, 0], [1, 1, 1, 1]], dtype=float)


def mamillary_inward_A_hat(k) -> np.ndarray:
    return np.diag([-k[2], -k[0], 0.0])


def mamillary_outward_Q(M: int) -> np.ndarray:
    return np.eye(M + 1)[[M]]


def mamillary_mixed_Q(k) -> np.ndarray:
    k1, k2, k3, k4, k5 = k
    K = k3 + k4 + k5
    return np.array([[0, 0, 1, 0, 0, k3 / K], [0, 0, 1, -k3 / k4, 0, 0], [1, 0, 0, 0, 0, 0]], dtype=float)


def mamillary_mixed_A_hat(k) -> np.ndarray:
    return np.diag([0.0, 0.0, -k[0]])


def mamillary_reversible_Q(k, K) -> np.ndarray:
    c = -k / (4 * K)
    return np.array([[-1, 0, 0, 1, 0], [c, c, c, c, 1], [-1, 1, 0, 0, 0]], dtype=float)


def mamillary_reversible_A_hat(k, K) -> np.ndarray:
    return np.diag([-k, -(4 * K + k), -k])


CYCLE3_K = (1.0, 2.0, 3.0)
CYCLE3_Q = np.array([[1, 1, 1], [-1j * SQRT2 / 3, (-2 + 2j * SQRT2) / 3, 1]])
CYCLE3_A_HAT = np.diag([0.0, -3 - SQRT2 * 1j])
CYCLE3_REAL_K = (1.0, 0.5, 5 / 128)

CYCLE5_Q = np.array([[1, 1, 1, 1, 1], [-1, GOLDEN, -GOLDEN, 1, 0], [-GOLDEN, GOLDEN, -1, 0, 1]])


def cycle5_A_hat(k) -> np.ndarray:
    return np.diag([0.0, -(5 + SQRT5) / 2 * k, -(5 + SQRT5) / 2 * k])


def cycle5_eigenvalues(k) -> np.ndarray:
    return np.array([0.0, (-5 + SQRT5) / 2 * k, (-5 + SQRT5) / 2 * k, (-5 - SQRT5) / 2 * k, (-5 - SQRT5) / 2 * k])


def counterexample_Q() -> np.ndarray:
    """Lumps the two intermediates of ``S -> I1 -> P``, ``S -> I2 -> P`` into one."""
    return np.array([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]], dtype=float)


NONNEG_Q_INFEASIBLE = [[5, 2, 2, -3], [-2, 0, 1, -1]]
NONNEG_Q_FEASIBLE = [[5, 2, 18, -3], [-2, 0, 1, -1]]
NONNEG_P = [[F(1), F(-5)], [F(1, 2), F(-4)]]
NONNEG_PQ = [[F(15), F(2), F(13), F(2)], [F(21, 2), F(1), F(5), F(5, 2)]]

COMPLEX_Q = np.array([[1 + 1j, 2 + 1j, 4 + 2j, 2 + 2j], [-1, 2j, 4j, -2]])
COMPLEX_COEFFICIENTS = np.array([[1, 0, 1, -1], [1, 2, 2, 0], [2, 4, 4, 0], [2, 0, 2, -2]], dtype=float)
# free-parameter picks (q_j1, q_j2) per row of P
COMPLEX_PICKS = [[-1, -1], [-3, -1]]
COMPLEX_PQ = np.array([[0, 3, 6, 0], [3, 9, 18, 8]], dtype=float)


@dataclass(frozen=True)
class Example:
    """One worked example: a model, a lumping matrix and the expected lumped matrix."""

    name: str
    model: CompartmentalModel
    Q: np.ndarray
    A_hat: np.ndarray


def catalog() -> list[Example]:
    """All lumping examples evaluated at fixed parameters."""
    k4, mu5 = (1.0, 2.0, 3.0, 4.0), (0.5, 0.25, 0.75, 0.125, 0.3)
    kn = (1.0, 2.0, 3.0, 4.0)
    km = (1.0, 2.0, 3.0)
    kx = (1.0, 2.0, 3.0, 4.0, 5.0)
    kr, Kr = 1.0, 2.0
    out_model, _ = families.mamillary_outward((1.0, 2.0, 3.0, 4.0))
    return [
        Example("reversible-chain", chain5(), chain5_Q(), np.diag([-6 - 2 * math.sqrt(6), -2.0])),
        Example(
            "flowed-catenary",
            families.catenary_irreversible(k4, mu5)[0],
            flowed_catenary_Q(k4, mu5),
            flowed_catenary_A_hat(k4, mu5),
        ),
        Example("nonuniform-chain", families.nonuniform_chain_example(kn)[0], NONUNIFORM_Q1, nonuniform_Q1_A_hat(kn)),
        Example("mamillary-inward", families.mamillary_inward(km)[0], MAMILLARY_INWARD_Q, mamillary_inward_A_hat(km)),
        Example("mamillary-outward", out_model, mamillary_outward_Q(4), np.array([[-10.0]])),
        Example("mamillary-mixed", families.mamillary_mixed_example(kx)[0], mamillary_mixed_Q(kx), mamillary_mixed_A_hat(kx)),
        Example(
            "mamillary-reversible",
            families.mamillary_reversible_uniform(kr, Kr)[0],
            mamillary_reversible_Q(kr, Kr),
            mamillary_reversible_A_hat(kr, Kr),
        ),
        Example("cycle3", families.cycle(CYCLE3_K), CYCLE3_Q, CYCLE3_A_HAT),
        Example("cycle5-reversible", families.cycle([1.0] * 5, reversible=True), CYCLE5_Q, cycle5_A_hat(1.0)),
    ]
