import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from lumpkit import catalog
from lumpkit.errors import RankDeficient
from lumpkit.lumping import transform_basis
from lumpkit.realizer import (
    DEGENERATE_CONE,
    NULLSPACE_DEFICIENT,
    PAIR_RULE,
    SLOPE_RULE,
    TRIPLE_RULE,
    TRIPLES_BY_SIGN,
    brute_force_nonneg_P_oracle,
    build_real_coefficient_matrix,
    classify_columns,
    exists_nonneg_P,
    exists_real_P,
    feasible_cone,
    free_parameter_basis,
    real_P_from_parameters,
)

SIGN_VALUES = (-1.0, 0.0, 1.0)


def check_nonneg_witness(Q, cert):
    P = cert.witness_P
    assert np.min(P @ np.asarray(Q, dtype=float)) >= -1e-12
    assert abs(np.linalg.det(P)) > 1e-9


def check_real_witness(Q, cert):
    P = cert.witness_P
    assert np.abs((P @ Q).imag).max() <= 1e-10 * max(1.0, np.abs(Q).max())
    assert abs(np.linalg.det(P)) > 1e-9


def check_reason(Q, cert):
    """The reported columns carry the reported pattern and are blocking on their own."""
    cases = classify_columns(Q).cases
    assert cert.infeasibility_reason is not None
    assert tuple(cases[j] for j in cert.columns) == cert.pattern
    if cert.columns:
        assert not brute_force_nonneg_P_oracle(np.asarray(Q, dtype=float)[:, list(cert.columns)])


def test_classify_columns():
    assert classify_columns([[5, 0, 0, -3], [-2, 0, 1, -1]]).cases == (3, 1, 6, 9)
    pattern = classify_columns([[0, 0, 1, 1, 1, 0, -1, -1, -1], [0, -1, -1, 0, 1, 1, 1, 0, -1]])
    assert pattern.cases == tuple(range(1, 10))
    assert classify_columns([[1e-13], [-1]]).cases == (2,)


def test_cone_examples():
    assert not feasible_cone(catalog.NONNEG_Q_INFEASIBLE).has_interior
    cone = feasible_cone(catalog.NONNEG_Q_FEASIBLE)
    assert cone.kind == "sector-with-interior"
    theta = math.atan2(-5, 1)
    inside = any(cone.theta_lo - 1e-12 <= theta + s <= cone.theta_hi + 1e-12 for s in (-2 * math.pi, 0, 2 * math.pi))
    assert inside
    quad = feasible_cone(np.eye(2))
    assert quad.width == pytest.approx(math.pi / 2)
    assert feasible_cone([[1.0], [0.0]]).kind == "halfplane"
    assert feasible_cone([[0.0], [0.0]]).kind == "full"
    assert feasible_cone([[1.0, -1.0], [0.0, 0.0]]).kind == "line"
    assert feasible_cone([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).kind == "ray"
    assert feasible_cone([[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]]).kind == "empty-or-origin"


def test_infeasible_example_certificate():
    cert = exists_nonneg_P(catalog.NONNEG_Q_INFEASIBLE)
    assert not cert.feasible and cert.witness_P is None
    assert cert.infeasibility_reason == SLOPE_RULE
    assert set(cert.pattern) == {3, 5, 9}
    check_reason(catalog.NONNEG_Q_INFEASIBLE, cert)
    # the reference slope comparison behind the rule
    assert -(-3) / (-1) < -2 / 1


def test_feasible_example():
    cert = exists_nonneg_P(catalog.NONNEG_Q_FEASIBLE)
    assert cert.feasible
    check_nonneg_witness(catalog.NONNEG_Q_FEASIBLE, cert)
    P = np.array(catalog.NONNEG_P)
    assert P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0] == F(-3, 2)
    assert transform_basis(catalog.NONNEG_Q_FEASIBLE, P).Q.tolist() == catalog.NONNEG_PQ
    # both reference rows lie in the cone
    assert all(v >= 0 for row in catalog.NONNEG_PQ for v in row)


def test_identity_and_one_row():
    cert = exists_nonneg_P(np.eye(2))
    assert cert.feasible and np.array_equal(cert.witness_P, np.eye(2))
    assert exists_nonneg_P([[-1.0, -2.0, 0.0]]).feasible
    assert not exists_nonneg_P([[-1.0, 2.0]]).feasible
    with pytest.raises(RankDeficient):
        exists_nonneg_P([[1.0, 2.0], [2.0, 4.0]])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=8))
def test_one_row_sign_rule(row):
    Q = np.array([row])
    if np.all(np.abs(Q) <= 1e-12):
        return
    nz = Q[np.abs(Q) > 1e-12]
    expected = bool(np.all(nz > 0) or np.all(nz < 0))
    cert = exists_nonneg_P(Q)
    assert cert.feasible == expected
    if expected:
        assert np.min(cert.witness_P @ Q) >= -1e-12


def test_pair_rule():
    cert = exists_nonneg_P([[0.0, 0.0, 1.0], [-1.0, 2.0, 0.5]])
    assert cert.infeasibility_reason == PAIR_RULE and set(cert.pattern) == {2, 6}


def test_sign_triple_rule():
    cert = exists_nonneg_P([[0.0, 1.0, -1.0], [-1.0, 1.0, 0.0]])
    assert cert.infeasibility_reason == TRIPLE_RULE
    assert frozenset(cert.pattern) in TRIPLES_BY_SIGN
    check_reason([[0.0, 1.0, -1.0], [-1.0, 1.0, 0.0]], cert)


def _random_2xn(rng):
    n = int(rng.integers(2, 9))
    if rng.random() < 0.5:
        Q = rng.integers(-3, 4, (2, n)).astype(float)
    else:
        Q = rng.standard_normal((2, n)) * (rng.random((2, n)) < 0.8)
    return Q


def agreement(rng, count):
    checked = 0
    while checked < count:
        Q = _random_2xn(rng)
        if np.linalg.matrix_rank(Q) < 2:
            continue
        cert = exists_nonneg_P(Q)
        assert cert.feasible == brute_force_nonneg_P_oracle(Q), Q
        if cert.feasible:
            check_nonneg_witness(Q, cert)
        else:
            check_reason(Q, cert)
        checked += 1


def test_oracle_agreement_random(rng):
    agreement(rng, 2000)


def test_oracle_agreement_sign_pattern_representatives():
    for n in range(2, 5):
        for flat in itertools.product(SIGN_VALUES, repeat=2 * n):
            Q = np.array(flat).reshape(2, n)
            if np.linalg.matrix_rank(Q) < 2:
                continue
            cert = exists_nonneg_P(Q)
            assert cert.feasible == brute_force_nonneg_P_oracle(Q), Q
            if not cert.feasible:
                check_reason(Q, cert)


def test_zero_column_is_ignored(rng):
    for _ in range(100):
        Q = rng.integers(-3, 4, (2, 3)).astype(float)
        if np.linalg.matrix_rank(Q) < 2:
            continue
        padded = np.hstack([Q, np.zeros((2, 1))])
        assert exists_nonneg_P(padded).feasible == exists_nonneg_P(Q).feasible == brute_force_nonneg_P_oracle(padded)


def test_lp_path_more_rows(rng):
    for _ in range(50):
        P0 = rng.standard_normal((3, 3))
        Q = np.linalg.inv(P0) @ rng.uniform(0.1, 1.0, (3, 5))
        cert = exists_nonneg_P(Q)
        assert cert.feasible
        check_nonneg_witness(Q, cert)
    cert = exists_nonneg_P(np.hstack([np.eye(3), -np.ones((3, 1))]))
    assert not cert.feasible and cert.infeasibility_reason == DEGENERATE_CONE


# ---------------------------------------------------------------------------
# real PQ


def test_coefficient_matrix_example():
    C = build_real_coefficient_matrix(catalog.COMPLEX_Q)
    assert np.array_equal(C, catalog.COMPLEX_COEFFICIENTS)
    assert sympy.Matrix(C.astype(int)).rank() == 2


def test_coefficient_matrix_special_halves():
    real = build_real_coefficient_matrix(np.array([[1.0, 2.0, 3.0], [0.0, 1.0, 4.0]]))
    assert np.all(real[:, :2] == 0)
    imag = build_real_coefficient_matrix(1j * np.array([[1.0, 2.0, 3.0], [0.0, 1.0, 4.0]]))
    assert np.all(imag[:, 2:] == 0)


def test_example_parameterization():
    basis = free_parameter_basis(catalog.COMPLEX_Q)
    # (p1, p2, q1, q2) = (-a + b, -(a + b)/2, a, b)
    assert np.allclose(basis, [[-1, 1], [-0.5, -0.5], [1, 0], [0, 1]])
    P = real_P_from_parameters(catalog.COMPLEX_Q, catalog.COMPLEX_PICKS)
    assert np.allclose(P, [[0 - 1j, 1 - 1j], [2 - 3j, 2 - 1j]])
    PQ = P @ catalog.COMPLEX_Q
    assert np.abs(PQ.imag).max() <= 1e-12
    assert np.allclose(PQ.real, [[0, 3, 6, 0], [3, 9, 18, 6]])


def test_example_decision():
    cert = exists_real_P(catalog.COMPLEX_Q)
    assert cert.feasible and cert.details["rank"] == 2 and cert.details["nullity"] == 2
    check_real_witness(catalog.COMPLEX_Q, cert)


def test_real_and_imaginary_fast_paths():
    Q = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    cert = exists_real_P(Q)
    assert cert.feasible and np.array_equal(cert.witness_P, np.eye(2))
    cert = exists_real_P(1j * np.eye(2))
    assert np.allclose(cert.witness_P, -1j * np.eye(2))
    assert np.allclose(cert.witness_P @ (1j * np.eye(2)), np.eye(2))


def test_symmetric_fast_path():
    Q1 = np.array([[2.0, 1.0], [1.0, 3.0]])
    # symmetric and commuting with Q1, so Q1^T Q2 = Q2^T Q1
    Q2 = Q1 @ Q1 + np.eye(2)
    Q = Q1 + 1j * Q2
    cert = exists_real_P(Q)
    assert cert.details["path"] == "symmetric"
    check_real_witness(Q, cert)


def test_generic_wide_Q_is_infeasible(rng):
    Q = rng.standard_normal((2, 6)) + 1j * rng.standard_normal((2, 6))
    cert = exists_real_P(Q)
    assert not cert.feasible and cert.infeasibility_reason == NULLSPACE_DEFICIENT


def test_real_P_rank_deficient():
    with pytest.raises(RankDeficient):
        exists_real_P([[1 + 1j, 2 + 2j], [2 + 2j, 4 + 4j]])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6), st.floats(0, 2 * math.pi))
def test_one_row_rotated_real_vectors_are_feasible(row, theta):
    v = np.array(row)
    if np.abs(v).max() < 1e-3:
        return
    Q = np.exp(1j * theta) * v[None, :]
    cert = exists_real_P(Q)
    assert cert.feasible
    check_real_witness(Q, cert)


def test_one_row_mixed_phases_infeasible():
    assert not exists_real_P([[1.0, 1j]]).feasible
    assert not exists_real_P([[1.0, 1 + 1j, 2.0]]).feasible


def sampling_oracle(Q, rng, draws=200) -> bool:
    """Random combinations of an independently computed kernel basis."""
    nhat = Q.shape[0]
    C = np.hstack([Q.imag.T, Q.real.T])
    N = scipy.linalg.null_space(C, rcond=1e-10)
    if N.shape[1] == 0:
        return False
    Z = (N[:nhat] + 1j * N[nhat:]).T
    for _ in range(draws):
        P = rng.standard_normal((nhat, Z.shape[0])) @ Z
        if abs(np.linalg.det(P)) > 1e-9:
            return True
    return False


def _random_complex_Q(rng):
    n = int(rng.integers(2, 7))
    nhat = int(rng.integers(1, min(3, n) + 1))
    kind = rng.integers(0, 3)
    if kind == 0:
        return rng.standard_normal((nhat, n)) + 1j * rng.standard_normal((nhat, n))
    M = rng.standard_normal((nhat, nhat)) + 1j * rng.standard_normal((nhat, nhat))
    R = rng.integers(-2, 3, (nhat, n)).astype(float)
    if kind == 2 and nhat > 1:
        # one complex row breaks realizability of the span
        R = R.astype(complex)
        R[-1] += 1j * rng.integers(-2, 3, n)
    return M @ R


def real_agreement(rng, count):
    checked = feasible = 0
    while checked < count:
        Q = _random_complex_Q(rng)
        if np.linalg.matrix_rank(Q) < Q.shape[0]:
            continue
        cert = exists_real_P(Q)
        assert cert.feasible == sampling_oracle(Q, rng), Q
        if cert.feasible:
            check_real_witness(Q, cert)
            feasible += 1
        checked += 1
    return feasible


def test_real_P_oracle_agreement(rng):
    feasible = real_agreement(rng, 300)
    assert 0 < feasible < 300
