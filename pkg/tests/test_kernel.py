import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ikchain.errors import DegenerateParams, NearSingular
from ikchain.kernel import (
    ELEMENT_NAMES, SWAP, ModelParams, alpha, build_r, build_r_derivative, check_initial, check_qybe,
    check_unitarity, element_derivative_tuple, element_tuple, phi_initial, point_values, r_matrix,
    random_params, shift_one, shift_two, unitarity_factor, xi, xi_bar,
)

# 30-digit mpmath evaluation of the closed-form entries, rounded to 20 digits
GOLDEN_U = 0.7 + 0.2j
GOLDEN_ETA = 0.3 + 0.1j
GOLDEN_ELEMENTS = {
    "a": -0.78528083517310790895 - 0.70177629601762048023j,
    "b": 0.78033872361794512724 + 0.32166923537007652636j,
    "c": -0.54544109060297815187 - 0.29087933631010250041j,
    "d": 0.7116992354630316831 + 0.21228686394112598464j,
    "e": -1.0002356484353065158 - 0.37881426934354192653j,
    "e_bar": -1.8225242364217563553 - 1.1477974622953835651j,
    "f": -1.3746252521661617064 - 0.66389837677775357404j,
    "f_bar": -1.4087597343485492243 - 0.83273079755353932541j,
    "g": 0.46443011938274321068 + 0.4333539034092425995j,
    "g_bar": -0.32829476841027098693 - 0.20163969616794399332j,
}

complex_box = st.builds(complex, st.floats(-1, 1), st.floats(-1, 1))


def generic_params(eta=GOLDEN_ETA, n=1):
    return ModelParams(eta, n, (0.1 + 0.05j, -0.2 + 0.1j, 0.25 - 0.1j, 0.4 + 0.3j)[:n])


@pytest.mark.parametrize("name", ELEMENT_NAMES)
def test_elements_match_high_precision_values(name):
    value = element_tuple(GOLDEN_U, GOLDEN_ETA)[ELEMENT_NAMES.index(name)]
    assert abs(value - GOLDEN_ELEMENTS[name]) < 1e-14


def test_xi_and_unitarity_factor_golden():
    p = ModelParams(0.3, 2, (0.1, -0.2))
    assert abs(xi(0.5, p) - 4.2267675341641022907) < 1e-13
    assert abs(unitarity_factor(0.4, 0.3) - 3.0558924454617753574) < 1e-13


def test_r_matrix_layout_has_nineteen_nonzero_entries():
    r = r_matrix(GOLDEN_U, GOLDEN_ETA)
    assert r.shape == (9, 9)
    assert np.count_nonzero(np.abs(r) > 0) == 19
    # charge conservation: nonzero only when i + j is preserved mod the weight grading
    charge = np.array([1, 0, -1])
    for row in range(9):
        for col in range(9):
            if r[row, col] != 0:
                assert charge[row // 3] + charge[row % 3] == charge[col // 3] + charge[col % 3]


def test_initial_condition_is_scaled_swap():
    p = generic_params()
    assert np.allclose(build_r(0, p), phi_initial(p.eta) * SWAP, atol=1e-15)
    assert check_initial(p) < 1e-14


def test_swap_is_read_only():
    with pytest.raises(ValueError):
        SWAP[0, 0] = 2.0


def test_derivative_matches_central_difference():
    h = 1e-6
    d = np.array(element_derivative_tuple(GOLDEN_U, GOLDEN_ETA))
    fd = (np.array(element_tuple(GOLDEN_U + h, GOLDEN_ETA)) - np.array(element_tuple(GOLDEN_U - h, GOLDEN_ETA))) / (2 * h)
    assert np.max(np.abs(d - fd)) < 1e-8
    p = generic_params()
    fd_r = (build_r(GOLDEN_U + h, p) - build_r(GOLDEN_U - h, p)) / (2 * h)
    assert np.linalg.norm(build_r_derivative(GOLDEN_U, p) - fd_r) < 1e-8


@settings(max_examples=60, deadline=None)
@given(complex_box, complex_box, complex_box)
def test_yang_baxter_holds_at_random_points(u1, u2, u3):
    assert check_qybe(u1, u2, u3, generic_params()) < 1e-12


@settings(max_examples=60, deadline=None)
@given(complex_box)
def test_unitarity_holds_at_random_points(u):
    assert check_unitarity(u, generic_params()) < 1e-12


def test_unitarity_factor_matches_product():
    p = generic_params()
    u = 0.37 - 0.21j
    r12 = build_r(u, p)
    r21 = SWAP @ build_r(-u, p) @ SWAP
    assert np.allclose(r12 @ r21, unitarity_factor(u, p.eta) * np.eye(9), atol=1e-13)


def test_corrupted_entry_breaks_yang_baxter():
    p = generic_params()

    def corrupted(u, params):
        r = build_r(u, params).copy()
        r[1, 3] *= 1.001
        return r

    assert check_qybe(0.3, -0.2 + 0.1j, 0.5j, p, r=corrupted) > 1e-6
    assert check_qybe(0.3, -0.2 + 0.1j, 0.5j, p) < 1e-13


def test_shifts():
    eta = GOLDEN_ETA
    assert shift_one(0.1, eta) == 0.1 + 4 * eta
    assert abs(shift_two(0.1, eta) - (0.1 + 6 * eta + 1j * np.pi)) < 1e-15


def test_alpha_is_product_over_sites():
    p = generic_params(n=3)
    u = 0.2 - 0.4j
    for which, k in ((1, 2), (2, 1), (3, 3)):
        direct = np.prod([element_tuple(u - t, p.eta)[k] for t in p.theta])
        assert abs(alpha(u, p, which) - direct) < 1e-14 * abs(direct)


def test_xi_bar_quotient_form():
    p = generic_params(n=2)
    t = p.theta[0]
    expected = cmath.exp(-p.eta) * alpha(shift_two(t, p.eta), p, 3) / alpha(shift_one(t, p.eta), p, 2)
    assert abs(xi_bar(t, p) - expected) < 1e-13 * abs(expected)


@pytest.mark.parametrize("eta", [0, 1j * np.pi / 2, 1j * np.pi])
def test_degenerate_crossing_parameter_rejected(eta):
    with pytest.raises(DegenerateParams):
        ModelParams(eta, 1)


def test_coinciding_inhomogeneities_rejected_but_homogeneous_allowed():
    with pytest.raises(DegenerateParams):
        ModelParams(0.3, 2, (0.1, 0.1))
    p = ModelParams.homogeneous(0.3, 3)
    assert p.theta == (0j, 0j, 0j) and not p.generic


def test_theta_length_must_match():
    with pytest.raises(DegenerateParams):
        ModelParams(0.3, 2, (0.1,))


def test_ratio_guard_raises_near_zero_denominator():
    # b(u) vanishes at u = 0, so z = c/b is singular there
    with pytest.raises(NearSingular):
        point_values(0j, GOLDEN_ETA).z


def test_random_params_are_reproducible():
    a = random_params(np.random.default_rng(7), 3)
    b = random_params(np.random.default_rng(7), 3)
    assert a == b
