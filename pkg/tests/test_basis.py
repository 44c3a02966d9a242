import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import chain
from ikchain.basis import (
    B2_READINGS, BasisLabel, apply_b1_formula, canonicalize, check_a1_eigen, check_completeness,
    check_orthogonality, check_quasi_symmetry_one, check_quasi_symmetry_three, check_quasi_symmetry_two,
    check_vanishing, enumerate_labels, formula_residual, gram_direct, gram_formula, labels_for, left_vector,
)
from ikchain.errors import DegenerateParams
from ikchain.kernel import ModelParams

U = 0.42 - 0.33j


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_label_count(n):
    labels = labels_for(n)
    assert len(labels) == 3 ** n
    assert len(set(labels)) == 3 ** n


def test_label_order_two_sites():
    got = [(l.m, l.m2, l.p) for l in labels_for(2)]
    assert got == [
        (0, 0, ()),
        (1, 1, (1,)), (1, 1, (2,)), (1, 0, (1,)), (1, 0, (2,)),
        (2, 2, (1, 2)), (2, 1, (1, 2)), (2, 1, (2, 1)), (2, 0, (1, 2)),
    ]


def test_label_validation():
    with pytest.raises(ValueError):
        BasisLabel(2, 2, (2, 1))
    with pytest.raises(ValueError):
        BasisLabel(2, 1, (1, 1))
    with pytest.raises(ValueError):
        BasisLabel(1, 2, (1,))


def test_orthogonality_and_gram(params):
    off, diag = check_orthogonality(params)
    assert off < 1e-8
    assert diag < 1e-8


def test_gram_formula_single_label():
    p = chain(2)
    label = BasisLabel(2, 1, (2, 1))
    g = gram_direct(label, p)
    assert abs(gram_formula(label, p) - g) < 1e-10 * abs(g)


def test_completeness(params):
    assert check_completeness(params) < 1e-9


def test_vanishing(params):
    for ident, worst in check_vanishing(params):
        assert worst < 1e-10, ident


def test_basis_needs_generic_inhomogeneities():
    with pytest.raises(DegenerateParams):
        check_orthogonality(ModelParams.homogeneous(0.3, 2))


def test_a1_diagonal_and_quasi_symmetries():
    p = chain(3)
    for label in enumerate_labels(p):
        assert check_a1_eigen(label, U, p) < 1e-10
        for i in range(1, label.m2):
            assert check_quasi_symmetry_one(label, i, p) < 1e-10
        if 0 < label.m2 < label.m:
            assert check_quasi_symmetry_two(label, p) < 1e-10
        for i in range(1, label.m - label.m2):
            assert check_quasi_symmetry_three(label, i, p) < 1e-10


@pytest.mark.parametrize("block", ["B1", "B2"])
def test_action_formulas(params, block):
    for label in enumerate_labels(params):
        if label.m <= 2:
            assert formula_residual(label, U, block, params) < 1e-8, label


def test_b1_formula_on_vacuum_has_one_term_per_site():
    p = chain(2)
    combo = apply_b1_formula(BasisLabel(0, 0, ()), U, p)
    assert {label.m for label, _ in combo} <= {1}


def test_typeset_b2_readings_fail_beyond_one_site():
    assert set(B2_READINGS) == {"corrected", "printed", "printed-alt"}
    p = chain(2)
    label = BasisLabel(2, 1, (1, 2))
    assert formula_residual(label, U, "B2", p) < 1e-10
    for reading in ("printed", "printed-alt"):
        assert formula_residual(label, U, "B2", p, reading) > 1e-3


def test_typeset_b2_readings_agree_at_one_site():
    p = chain(1)
    for label in enumerate_labels(p):
        for reading in B2_READINGS:
            assert formula_residual(label, U, "B2", p, reading) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.permutations([1, 2, 3]), st.integers(0, 3))
def test_canonicalize_reproduces_the_reordered_state(order, n_one):
    p = chain(3)
    one, two = list(order[:n_one]), list(order[n_one:])
    label, coef = canonicalize(one, two, 1.0, p)
    assert list(label.theta1_sites) == sorted(one)
    assert list(label.theta2_sites) == sorted(two)
    direct = left_vector(one, two, p)
    assert np.linalg.norm(coef * left_vector(label.theta1_sites, label.theta2_sites, p) - direct) < 1e-10 * np.linalg.norm(direct)
