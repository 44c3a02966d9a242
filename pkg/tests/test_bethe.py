import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import chain
from ikchain.basis import BasisLabel, enumerate_labels
from ikchain.bethe import (
    BetheRoots, bae_jacobian, bae_log_residual, bae_residual, bethe_state, exchange_asymmetry,
    expansion_residual, f_direct, f_explicit, f_recursive, f_table, on_shell_check, solve_bae,
    spectrum_distance, transfer_eigenvalue, weight_leakage,
)
from ikchain.errors import NoConvergence
from ikchain.hilbert import build_monodromy, transfer, vacuum
from ikchain.kernel import IPI, alpha, point_values

ROOTS = (0.21 - 0.34j, -0.52 + 0.18j, 0.37 + 0.61j)
SAMPLES = (0.2 + 0.1j, -0.4 + 0.3j, 0.7 - 0.2j, 0.05 + 0.5j, -0.6 - 0.45j)
complex_box = st.builds(complex, st.floats(-1, 1), st.floats(-1, 1))


def test_roots_must_be_distinct():
    with pytest.raises(ValueError):
        BetheRoots((0.1, 0.1))
    assert BetheRoots((0.5, 0.1j)).canonical().u == (0.1j, 0.5)


def test_two_root_state_expanded():
    p = chain(2)
    u1, u2 = ROOTS[:2]
    b1, b2 = build_monodromy(u1, p), build_monodromy(u2, p)
    vac = vacuum(p)
    expected = b1.B1 @ b2.B1 @ vac - b1.B2 @ vac * alpha(u2, p, 1) / point_values(u1 - u2, p.eta).y
    assert np.linalg.norm(bethe_state((u1, u2), p) - expected) < 1e-12 * np.linalg.norm(expected)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bethe_state_stays_in_its_weight_sector(n):
    assert weight_leakage(ROOTS[:n], chain(2)) < 1e-12


def test_root_exchange_is_only_measured():
    value = exchange_asymmetry(ROOTS[:2], chain(2))
    assert math.isfinite(value) and value >= 0


def test_one_site_root_in_closed_form():
    p = chain(1)
    expected = p.theta[0] + 2 * p.eta + IPI
    root = solve_bae(1, [[p.theta[0] + 2 * p.eta + 3j]], p)
    assert abs(root.u[0] - expected) < 1e-12 * abs(expected)
    assert abs(bae_residual(root, p)[0]) < 1e-12


def test_jacobian_matches_finite_difference():
    p = chain(2)
    z = np.array(ROOTS[:2])
    J = bae_jacobian(z, p)
    h = 1e-6
    for k in range(2):
        dz = np.zeros(2, dtype=complex)
        dz[k] = h
        fd = (bae_log_residual(z + dz, p) - bae_log_residual(z - dz, p)) / (2 * h)
        assert np.max(np.abs(fd - J[:, k])) < 1e-6


def test_solved_root_is_on_shell():
    p = chain(2)
    roots = solve_bae(1, [[0.1 + 0.2j]], p)
    assert np.max(np.abs(bae_residual(roots, p))) < 1e-11
    assert on_shell_check(roots, p, SAMPLES) < 1e-8
    for u in SAMPLES:
        assert spectrum_distance(transfer_eigenvalue(roots, u, p), u, p) < 1e-8


def test_off_shell_state_is_not_an_eigenvector():
    assert on_shell_check(ROOTS[:1], chain(2), SAMPLES) > 1e-4


def test_no_convergence_reports_best_residual():
    p = chain(1)
    with pytest.raises(NoConvergence) as info:
        solve_bae(1, [[0.3 + 0.1j]], p, max_iter=0)
    assert info.value.best_residual > 0


@pytest.mark.parametrize("n_sites", [1, 2, 3])
def test_f_recursive_matches_direct(n_sites):
    p = chain(n_sites)
    for n in range(0, min(3, 2 * n_sites) + 1):
        us = ROOTS[:n]
        for label in enumerate_labels(p):
            fd = f_direct(label, us, p)
            if label.weight != n:
                assert fd == 0 and f_recursive(label, us, p) == 0
                continue
            assert abs(f_recursive(label, us, p) - fd) < 1e-8 * abs(fd)


def test_closed_forms_agree_with_direct_pairing():
    p = chain(3)
    for n in (1, 2):
        us = ROOTS[:n]
        for label in enumerate_labels(p):
            if label.weight == n:
                fd = f_direct(label, us, p)
                assert abs(f_explicit(label, us, p) - fd) < 1e-8 * abs(fd), label


def test_typeset_two_root_forms_differ():
    p = chain(2)
    us = ROOTS[:2]
    level_two = BasisLabel(1, 0, (2,))
    level_one = BasisLabel(2, 2, (1, 2))
    for label in (level_two, level_one):
        fd = f_direct(label, us, p)
        assert abs(f_explicit(label, us, p, "printed") - fd) > 1e-3 * abs(fd)
    # at the first site the level-two forms coincide
    first = BasisLabel(1, 0, (1,))
    assert abs(f_explicit(first, us, p, "printed") - f_explicit(first, us, p)) < 1e-14


@pytest.mark.parametrize("n_sites", [1, 2, 3])
def test_expansion_rebuilds_bethe_state(n_sites):
    p = chain(n_sites)
    for n in range(0, min(3, 2 * n_sites) + 1):
        assert expansion_residual(ROOTS[:n], p) < 1e-8


def test_f_table_has_only_matching_weights():
    table = f_table(ROOTS[:2], chain(2))
    assert all(label.weight == 2 for label in table.entries)
    assert len(table.entries) == 3


@settings(max_examples=15, deadline=None)
@given(complex_box, complex_box)
def test_random_two_root_expansion(u1, u2):
    if abs(u1 - u2) < 1e-3:
        return
    p = chain(2)
    try:
        residual = expansion_residual((u1, u2), p)
    except ArithmeticError:
        return
    assert residual < 1e-8


def test_transfer_eigenvalue_of_vacuum():
    p = chain(2)
    u = SAMPLES[0]
    lam = transfer_eigenvalue((), u, p)
    assert abs(lam - (transfer(u, p) @ vacuum(p))[0]) < 1e-14
