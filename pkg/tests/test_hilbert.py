import numpy as np
import pytest

from conftest import chain
from ikchain.errors import IndexOutOfRange, NonzeroInhomogeneity
from ikchain.hilbert import (
    EXCHANGE_RELATIONS, build_monodromy, check_exchange_relations, check_rtt, check_transfer_commute,
    check_vacuum_actions, cyclic_shift, embed, embed_pair, hamiltonian, state_weights, transfer,
    transfer_log_derivative_fd, vacuum,
)
from ikchain.kernel import SWAP, ModelParams, build_r

U, V = 0.31 - 0.27j, -0.45 + 0.6j


def test_single_site_monodromy_is_the_r_matrix():
    p = chain(1)
    blocks = build_monodromy(U, p)
    r = build_r(U - p.theta[0], p).reshape(3, 3, 3, 3)
    for a in range(3):
        for b in range(3):
            assert np.allclose(blocks.entry(a, b), r[a, :, b, :])


def test_block_names_follow_the_grid():
    blocks = build_monodromy(U, chain(2))
    assert blocks.A1 is blocks.entry(0, 0) or np.array_equal(blocks.A1, blocks.entry(0, 0))
    assert np.array_equal(blocks["B2"], blocks.entry(0, 2))
    assert np.array_equal(blocks["C3"], blocks.entry(2, 1))


def test_rtt_and_commuting_transfers(params):
    assert check_rtt(U, V, params) < 1e-12
    assert check_transfer_commute(U, V, params) < 1e-12


def test_vacuum_is_highest_weight(params):
    assert check_vacuum_actions(U, params) < 1e-12


def test_embed_rejects_bad_sites():
    p = chain(2)
    with pytest.raises(IndexOutOfRange):
        embed(np.eye(3), 3, p)
    with pytest.raises(IndexOutOfRange):
        embed_pair(np.eye(9), 1, 1, p)


def test_embed_pair_matches_kron_for_adjacent_sites():
    p = chain(3)
    x = np.arange(81, dtype=complex).reshape(9, 9)
    assert np.array_equal(embed_pair(x, 2, 3, p), np.kron(np.eye(3), x))
    swapped = embed_pair(x, 3, 2, p)
    assert np.array_equal(swapped, np.kron(np.eye(3), SWAP @ x @ SWAP))


def test_state_weights():
    assert list(state_weights(1)) == [0, 1, 2]
    assert state_weights(2)[5] == 1 + 2


def test_there_are_22_exchange_relations():
    assert len(EXCHANGE_RELATIONS) == 22
    assert len({r.rid for r in EXCHANGE_RELATIONS}) == 22


@pytest.mark.parametrize("n", [1, 2])
def test_exchange_relations_hold(n):
    p = chain(n)
    for rid, r in check_exchange_relations(U, V, p):
        assert r < 1e-11, rid


def test_printed_coefficients_fail_only_where_corrected():
    res = dict(check_exchange_relations(U, V, chain(2), reading="printed"))
    failing = {rid for rid, r in res.items() if r > 1e-6}
    assert failing == {"B3B2", "A2B1"}


def test_hamiltonian_commutes_and_is_log_derivative():
    p = ModelParams.homogeneous(0.3 + 0.1j, 3)
    H = hamiltonian(p)
    t = transfer(U, p)
    assert np.linalg.norm(H @ t - t @ H) / np.linalg.norm(H @ t) < 1e-10
    fd = transfer_log_derivative_fd(p)
    assert np.linalg.norm(H - fd) / np.linalg.norm(H) < 1e-6
    S = cyclic_shift(p)
    assert np.linalg.norm(S @ H @ S.T - H) < 1e-12 * np.linalg.norm(H)


def test_hamiltonian_needs_homogeneous_chain():
    with pytest.raises(NonzeroInhomogeneity):
        hamiltonian(chain(2))


def test_cyclic_shift_moves_sites():
    p = ModelParams.homogeneous(0.3, 3)
    S = cyclic_shift(p)
    x = np.diag([1.0, 2.0, 3.0])
    assert np.allclose(S @ embed(x, 1, p) @ S.T, embed(x, 2, p))


def test_vacuum_vector():
    v = vacuum(chain(2))
    assert v.shape == (9,) and v[0] == 1 and np.count_nonzero(v) == 1
