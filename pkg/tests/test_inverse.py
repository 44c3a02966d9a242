import numpy as np
import pytest

from conftest import chain
from ikchain.errors import IndexOutOfRange
from ikchain.hilbert import embed
from ikchain.inverse import (
    check_trace_identity, matrix_unit, printed_prefactor, reconstruct_local, reconstruction_report,
    transfer_product_residual,
)

UNITS = [(i, j) for i in range(1, 4) for j in range(1, 4)]


@pytest.mark.parametrize("pair", UNITS, ids=lambda p: f"e{p[0]}{p[1]}")
def test_trace_identity_all_sites(params, pair):
    for site in range(1, params.n_sites + 1):
        assert check_trace_identity(site, matrix_unit(*pair), params) < 1e-9


@pytest.mark.parametrize("route", ["product", "trace"])
def test_reconstruction(params, route):
    for site in range(1, params.n_sites + 1):
        for i, j in UNITS:
            target = embed(matrix_unit(i, j), site, params)
            got = reconstruct_local(i, j, site, params, route)
            assert np.linalg.norm(got - target) < 1e-9 * np.linalg.norm(target)


def test_printed_prefactor_inverts_the_transfer_product(params):
    assert transfer_product_residual(params) < 1e-10


def test_empirical_prefactor_equals_printed():
    p = chain(3)
    for site in (1, 2, 3):
        rep = reconstruction_report(2, 3, site, p)
        assert rep.prefactor_mismatch < 1e-10
        assert rep.prefactor_used == printed_prefactor(p)


def test_matrix_unit_bounds():
    with pytest.raises(IndexOutOfRange):
        matrix_unit(0, 1)
    with pytest.raises(IndexOutOfRange):
        reconstruct_local(1, 1, 3, chain(2))


def test_unknown_route():
    with pytest.raises(ValueError):
        reconstruct_local(1, 1, 1, chain(1), route="other")
