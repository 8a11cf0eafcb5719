import math

import numpy as np
import pytest

from lumpkit import families
from lumpkit.errors import DimensionMismatch, NonRobustParameters
from lumpkit.linalg import EigenPair, EigenSystem, eig_transpose, matrix_rank
from lumpkit.model import validate_kinetic

from conftest import multiset_distance

DRAWS = 100


def _rates(rng, n, lo=0.1, hi=5.0):
    return rng.uniform(lo, hi, n)


def _assert_matches_numeric(model, eigs, tol=1e-9):
    numeric = eig_transpose(model.float_A())
    scale = max(1.0, np.abs(numeric.values).max())
    assert multiset_distance(eigs.values, numeric.values) <= tol * scale


def test_catenary_spectrum():
    model, eigs = families.catenary_irreversible([1, 2, 3, 4])
    assert sorted(eigs.values.real) == [-4, -3, -2, -1, 0]
    assert families.verify_closed_form(model, eigs).passed


def test_catenary_printed_vector():
    k1, k2 = 1.7, 0.6
    _, eigs = families.catenary_irreversible([k1, k2])
    assert np.allclose(eigs.pairs[1].vector, [1, (k1 - k2) / k1, 0])


def test_catenary_with_outflows_two_compartments():
    model, eigs = families.catenary_irreversible([1.0], [1.0, 1.0])
    assert sorted(eigs.values.real) == [-2, -1]
    assert families.verify_closed_form(model, eigs).max_residual <= 1e-12


def test_catenary_rejects_coincident_rates():
    with pytest.raises(NonRobustParameters):
        families.catenary_irreversible([1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        families.catenary_irreversible([1.0], [0.0])


def test_mamillary_inward_vectors():
    model, eigs = families.mamillary_inward([1.0, 2.0, 3.0])
    assert np.allclose(eigs.vectors, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 1]])
    assert families.verify_closed_form(model, eigs).max_residual <= 1e-12
    model, eigs = families.mamillary_inward([2.5])
    assert np.allclose(model.float_A(), [[-2.5, 0], [2.5, 0]])
    assert sorted(eigs.values.real) == [-2.5, 0]
    with pytest.raises(NonRobustParameters):
        families.mamillary_inward([1.0, 1.0])


def test_mamillary_outward_vectors():
    model, eigs = families.mamillary_outward([1.0, 2.0, 3.0, 4.0])
    assert eigs.values[0] == -10 and np.array_equal(eigs.vectors[0], [0, 0, 0, 0, 1])
    _, eigs = families.mamillary_outward([3.0, 6.0])
    assert np.allclose(eigs.vectors[1], [1, -0.5, 0])
    k = np.array([0.4, 1.1, 2.0])
    model, eigs = families.mamillary_outward(k)
    last = eigs.vectors[-1]
    assert last[-2] == pytest.approx(k.sum() / k[-1])
    # the final entry is pinned by A^T v = 0
    assert np.abs(model.float_A().T @ last).max() <= 1e-12
    assert matrix_rank(eigs.vectors) == 4


def test_mamillary_mixed():
    model, eigs = families.mamillary_mixed_example([1, 2, 3, 4, 5])
    assert sorted(eigs.values.real) == [-12, -2, -1, 0, 0, 0]
    i = [j for j, v in enumerate(eigs.vectors) if np.allclose(v, [0, 0, 1, 0, -3 / 5, 0])][0]
    assert eigs.residuals(model.float_A())[i] <= 1e-15
    with pytest.raises(NonRobustParameters):
        families.mamillary_mixed_example([1, 1, 3, 4, 5])


def test_circulant_equal_rates_real_vectors():
    b = 0.8
    model, eigs = families.circulant_simplicial([b, b], d=0.3, real_basis=True)
    assert np.all(np.isreal(eigs.vectors))
    span = np.array([[1, 1, 1], [-1, 0, 1], [-1, 1, 0]], dtype=float)
    assert matrix_rank(np.vstack([eigs.vectors, span])) == 3
    assert families.verify_closed_form(model, eigs).passed
    # the two nontrivial reference vectors lie in the eigenspace of the repeated eigenvalue
    lam = eigs.values[1].real
    for v in span[1:]:
        assert np.abs(model.float_A().T @ v - lam * v).max() <= 1e-12


def test_circulant_general_eigenvalue():
    c1, c2, d = 0.7, 1.9, 0.2
    _, eigs = families.circulant_simplicial([c1, c2], d)
    c0 = -(c1 + c2 + d)
    expected = c0 + c1 * (-1 + 1j * math.sqrt(3)) / 2 + c2 * (-1 - 1j * math.sqrt(3)) / 2
    assert abs(eigs.values[1] - expected) <= 1e-12


def test_circulant_zero():
    model, eigs = families.circulant_simplicial([0.0, 0.0, 0.0])
    assert np.all(model.float_A() == 0) and np.all(eigs.values == 0)


@pytest.mark.parametrize("M", range(2, 7))
def test_circulant_matches_characteristic_polynomial(M, rng):
    c = rng.uniform(0, 3, M - 1)
    model, eigs = families.circulant_simplicial(c, d=float(rng.uniform(0, 1)))
    roots = np.roots(np.poly(model.float_A()))
    assert multiset_distance(eigs.values, roots) <= 1e-8 * max(1.0, np.abs(roots).max())


def test_cycle_matrices():
    assert np.array_equal(families.cycle([1, 2, 3]).float_A(), [[-1, 0, 3], [1, -2, 0], [0, 2, -3]])
    k = 0.9
    A = families.cycle([k] * 5, reversible=True).float_A()
    expected = k * (np.roll(np.eye(5), 1, axis=1) + np.roll(np.eye(5), -1, axis=1) - 2 * np.eye(5))
    assert np.allclose(A, expected)


def test_uniform_reversible_cycle_spectra():
    k = 1.4
    eigs = families.cycle_eigensystem([k] * 5, reversible=True)
    s5 = math.sqrt(5)
    expected = [0, (-5 + s5) / 2 * k, (-5 + s5) / 2 * k, (-5 - s5) / 2 * k, (-5 - s5) / 2 * k]
    assert multiset_distance(eigs.values, expected) <= 1e-12
    eigs = families.cycle_eigensystem([1.0] * 3, reversible=True)
    assert multiset_distance(eigs.values, eig_transpose(families.cycle([1.0] * 3, True).float_A()).values) <= 1e-12
    assert multiset_distance(eigs.values, [0, -3, -3]) <= 1e-12


def test_cycle3_closed_form():
    eigs = families.cycle3_eigensystem([1.0, 2.0, 3.0])
    model = families.cycle([1.0, 2.0, 3.0])
    assert families.verify_closed_form(model, eigs).passed
    assert abs(eigs.values[1] - (-3 - math.sqrt(2) * 1j)) <= 1e-12
    assert families.cycle3_discriminant(1, 2, 3) == -8


def test_nonuniform_cycle_has_no_closed_form():
    with pytest.raises(ValueError):
        families.cycle_eigensystem([1.0, 2.0, 3.0, 4.0])


def test_verify_closed_form_flags_perturbation():
    model, eigs = families.mamillary_inward([1.0, 2.0])
    bad = EigenSystem(
        (EigenPair(eigs.pairs[0].value, eigs.pairs[0].vector + 0.01),) + eigs.pairs[1:], "closed-form"
    )
    assert not families.verify_closed_form(model, bad).passed
    zero = families.circulant_simplicial([0.0])[0]
    report = families.verify_closed_form(zero, EigenSystem((EigenPair(0j, np.array([0.3, -2.0])),)))
    assert report.max_residual == 0
    with pytest.raises(DimensionMismatch):
        families.verify_closed_form(model, EigenSystem((EigenPair(0j, np.ones(2)),)))


def test_reversible_chain_is_compartmental():
    model = families.reversible_chain([1, 4, 2, 1], [1, 4, 5, 2])
    assert np.array_equal(
        model.float_A(),
        [[-1, 1, 0, 0, 0], [1, -5, 4, 0, 0], [0, 4, -6, 5, 0], [0, 0, 2, -6, 2], [0, 0, 0, 1, -2]],
    )
    assert validate_kinetic(model).is_compartmental


def _robust(values):
    try:
        families.check_distinct(values)
    except NonRobustParameters:
        return False
    return True


def test_random_draws_match_numeric_and_are_compartmental(rng):
    checked = 0
    for _ in range(DRAWS):
        k, mu = _rates(rng, 4), _rates(rng, 5, 0.0, 2.0)
        cases = [
            lambda: families.catenary_irreversible(k),
            lambda: families.catenary_irreversible(k, mu),
            lambda: families.mamillary_inward(_rates(rng, 4)),
            lambda: families.mamillary_outward(_rates(rng, 4)),
            lambda: families.mamillary_mixed_example(_rates(rng, 5)),
            lambda: families.mamillary_reversible_uniform(*_rates(rng, 2)),
            lambda: families.circulant_simplicial(_rates(rng, int(rng.integers(1, 6)), 0.0), float(rng.uniform(0, 1))),
            lambda: (families.cycle(k3 := _rates(rng, 3)), families.cycle3_eigensystem(k3)),
            lambda: (families.cycle([kk := float(rng.uniform(0.1, 5))] * 5, True), families.cycle_eigensystem([kk] * 5, True)),
        ]
        for make in cases:
            try:
                model, eigs = make()
            except NonRobustParameters:
                continue
            assert validate_kinetic(model).is_compartmental
            assert families.verify_closed_form(model, eigs).passed
            _assert_matches_numeric(model, eigs)
            checked += 1
    assert checked >= 8 * DRAWS


def test_closed_form_vectors_independent_when_robust(rng):
    for _ in range(20):
        for model, eigs in (
            families.catenary_irreversible(_rates(rng, 4), _rates(rng, 5, 0.0, 1.0)),
            families.mamillary_inward(_rates(rng, 3)),
            families.mamillary_outward(_rates(rng, 3)),
            families.mamillary_mixed_example(_rates(rng, 5)),
            families.mamillary_reversible_uniform(*_rates(rng, 2)),
        ):
            assert matrix_rank(eigs.vectors) == model.n
