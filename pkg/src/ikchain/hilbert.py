"""Operators on the chain: embeddings, monodromy blocks, transfer matrix, Hamiltonian.

Site 1 is the leftmost Kronecker factor. The monodromy matrix is the ordered
product R_{0N}(u - theta_N) ... R_{01}(u - theta_1) over a 3-dim auxiliary
space; it is kept as a 3x3 grid of 3^N x 3^N blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Callable, Sequence

import numpy as np

from .errors import IndexOutOfRange, NonzeroInhomogeneity
from .kernel import (
    AlphaValues,
    ModelParams,
    PointValues,
    SWAP,
    build_r,
    build_r_derivative,
    eval_alpha,
    phi_initial,
    point_values,
    r_matrix,
)

# Re-exported scalar layer: AlphaValues, eval_alpha.
BLOCK_POSITIONS = {
    "A1": (0, 0), "B1": (0, 1), "B2": (0, 2),
    "C1": (1, 0), "A2": (1, 1), "B3": (1, 2),
    "C2": (2, 0), "C3": (2, 1), "A3": (2, 2),
}


def dimension(params: ModelParams) -> int:
    return 3 ** params.n_sites


def _check_site(site: int, params: ModelParams) -> None:
    if not 1 <= site <= params.n_sites:
        raise IndexOutOfRange(f"site {site} outside 1..{params.n_sites}")


def embed(local: np.ndarray, site: int, params: ModelParams) -> np.ndarray:
    """A 3x3 operator acting on ``site`` and trivially elsewhere."""
    _check_site(site, params)
    n = params.n_sites
    left = np.eye(3 ** (site - 1))
    right = np.eye(3 ** (n - site))
    return np.kron(np.kron(left, np.asarray(local, dtype=complex)), right)


def embed_pair(local: np.ndarray, site_a: int, site_b: int, params: ModelParams) -> np.ndarray:
    """A 9x9 operator on V_{site_a} (x) V_{site_b}, identity on the other sites."""
    _check_site(site_a, params)
    _check_site(site_b, params)
    if site_a == site_b:
        raise IndexOutOfRange("embed_pair needs two different sites")
    n = params.n_sites
    order = [site_a - 1, site_b - 1] + [k for k in range(n) if k not in (site_a - 1, site_b - 1)]
    full = np.kron(np.asarray(local, dtype=complex), np.eye(3 ** (n - 2)))
    tensor = full.reshape((3,) * (2 * n))
    inv = [order.index(k) for k in range(n)]
    tensor = tensor.transpose(inv + [n + i for i in inv])
    return tensor.reshape(3 ** n, 3 ** n)


@dataclass(frozen=True)
class MonodromyBlocks:
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    B3: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    C3: np.ndarray
    spectral_point: complex

    def __getitem__(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def entry(self, row: int, col: int) -> np.ndarray:
        """T^{row}_{col} with 0-based auxiliary indices."""
        for name, pos in BLOCK_POSITIONS.items():
            if pos == (row, col):
                return getattr(self, name)
        raise IndexError((row, col))

    def full(self) -> np.ndarray:
        """The monodromy matrix on V_0 (x) chain, auxiliary space leftmost."""
        return np.block([[self.entry(a, b) for b in range(3)] for a in range(3)])


def _local_blocks(u: complex, eta: complex) -> list[list[np.ndarray]]:
    R = r_matrix(u, eta).reshape(3, 3, 3, 3)
    return [[R[a, :, b, :] for b in range(3)] for a in range(3)]


@lru_cache(maxsize=96)
def _monodromy(u: complex, eta: complex, theta: tuple[complex, ...]) -> MonodromyBlocks:
    grid = [[np.eye(1, dtype=complex) * (a == b) for b in range(3)] for a in range(3)]
    # R_{01} acts first, so each new site multiplies from the left of the
    # auxiliary product and sits to the right of the earlier sites.
    for t in theta:
        L = _local_blocks(u - t, eta)
        grid = [[sum(np.kron(grid[c][b], L[a][c]) for c in range(3)) for b in range(3)]
                for a in range(3)]
    for row in grid:
        for m in row:
            m.flags.writeable = False
    named = {name: grid[r][c] for name, (r, c) in BLOCK_POSITIONS.items()}
    return MonodromyBlocks(spectral_point=u, **named)


def build_monodromy(u: complex, params: ModelParams) -> MonodromyBlocks:
    """Nine blocks of T_0(u) = R_{0N}(u - theta_N) ... R_{01}(u - theta_1)."""
    return _monodromy(complex(u), params.eta, params.theta)


def transfer(u: complex, params: ModelParams) -> np.ndarray:
    blocks = build_monodromy(u, params)
    return blocks.A1 + blocks.A2 + blocks.A3


def vacuum(params: ModelParams) -> np.ndarray:
    """The all-|1> reference state (also used as the dual row vector)."""
    v = np.zeros(dimension(params), dtype=complex)
    v[0] = 1.0
    return v


def state_weights(n_sites: int) -> np.ndarray:
    """Total weight of each product state: |1> counts 0, |2> counts 1, |3> counts 2."""
    digits = np.indices((3,) * n_sites).reshape(n_sites, -1)
    return digits.sum(axis=0)


Word = Sequence[tuple[str, complex]]


def act_left(vector: np.ndarray, word: Word, params: ModelParams) -> np.ndarray:
    """<vector| X_1(u_1) X_2(u_2) ... for word [(X_1, u_1), (X_2, u_2), ...]."""
    out = np.asarray(vector, dtype=complex)
    for name, u in word:
        out = out @ build_monodromy(u, params)[name]
    return out


def act_right(word: Word, vector: np.ndarray, params: ModelParams) -> np.ndarray:
    """X_1(u_1) X_2(u_2) ... |vector>."""
    out = np.asarray(vector, dtype=complex)
    for name, u in reversed(list(word)):
        out = build_monodromy(u, params)[name] @ out
    return out


def _relative(diff: np.ndarray, ref: np.ndarray) -> float:
    scale = np.linalg.norm(ref)
    return float(np.linalg.norm(diff) / scale) if scale else float(np.linalg.norm(diff))


# ---------------------------------------------------------------- checks

def check_rtt(u: complex, v: complex, params: ModelParams) -> float:
    """Relative residual of R12(u-v) T1(u) T2(v) = T2(v) T1(u) R12(u-v) on V (x) V (x) chain."""
    D = dimension(params)
    Tu, Tv = build_monodromy(u, params), build_monodromy(v, params)
    T1 = sum(np.kron(np.kron(_unit(a, b), np.eye(3)), Tu.entry(a, b)) for a in range(3) for b in range(3))
    T2 = sum(np.kron(np.kron(np.eye(3), _unit(a, b)), Tv.entry(a, b)) for a in range(3) for b in range(3))
    R = np.kron(build_r(u - v, params), np.eye(D))
    lhs = R @ T1 @ T2
    return _relative(lhs - T2 @ T1 @ R, lhs)


def _unit(a: int, b: int) -> np.ndarray:
    m = np.zeros((3, 3))
    m[a, b] = 1.0
    return m


def check_transfer_commute(u: complex, v: complex, params: ModelParams) -> float:
    tu, tv = transfer(u, params), transfer(v, params)
    return _relative(tu @ tv - tv @ tu, tu @ tv)


def check_vacuum_actions(u: complex, params: ModelParams) -> float:
    """Worst relative residual of the vacuum eigen- and annihilation relations."""
    blocks = build_monodromy(u, params)
    alphas = eval_alpha(u, params)
    vac = vacuum(params)
    worst = 0.0
    for name, value in (("A1", alphas.alpha1), ("A2", alphas.alpha2), ("A3", alphas.alpha3)):
        worst = max(worst, _relative(blocks[name] @ vac - value * vac, blocks[name] @ vac))
        worst = max(worst, _relative(vac @ blocks[name] - value * vac, vac @ blocks[name]))
    for name in ("C1", "C2", "C3"):
        worst = max(worst, np.linalg.norm(blocks[name] @ vac) / np.linalg.norm(blocks[name]))
    for name in ("B1", "B2", "B3"):
        worst = max(worst, np.linalg.norm(vac @ blocks[name]) / np.linalg.norm(blocks[name]))
    return float(worst)


# ---------------------------------------------------------------- Hamiltonian

def hamiltonian(params: ModelParams) -> np.ndarray:
    """Periodic nearest-neighbour Hamiltonian, the log-derivative of t(u) at u = 0.

    Each bond carries d/du [P R(u)] at u = 0, and the sum is divided by
    R(0) / P = sinh(eta) - sinh(5 eta). The last bond joins site N to site 1.
    """
    if any(t != 0 for t in params.theta):
        raise NonzeroInhomogeneity("the Hamiltonian is defined for theta = 0 only")
    n = params.n_sites
    if n < 2:
        raise IndexOutOfRange("the Hamiltonian needs at least two sites")
    bond = SWAP @ build_r_derivative(0.0, params)
    H = sum(embed_pair(bond, i, i % n + 1, params) for i in range(1, n + 1))
    return H / phi_initial(params.eta)


def transfer_log_derivative_fd(params: ModelParams, step: float = 1e-5) -> np.ndarray:
    """t'(0) t(0)^{-1} with a central difference in u."""
    t0 = transfer(0.0, params)
    dt = (transfer(step, params) - transfer(-step, params)) / (2 * step)
    return np.linalg.solve(t0.T, dt.T).T


def cyclic_shift(params: ModelParams) -> np.ndarray:
    """Translation by one site: the state on site k moves to site k + 1."""
    n = params.n_sites
    D = 3 ** n
    eye = np.eye(D).reshape((3,) * n + (D,))
    return np.moveaxis(eye, n - 1, 0).reshape(D, D)


# ---------------------------------------------------------------- exchange relations

Coefficient = Callable[[PointValues, PointValues], complex]


@dataclass(frozen=True)
class Term:
    coefficient: Coefficient
    word: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Relation:
    """A family of identities sum_k coefficient_k * word_k = 0 sharing one id.

    F holds the functions at u - v and G the functions at v - u.
    """

    rid: str
    parts: tuple[tuple[Term, ...], ...]


def _t(coefficient: Coefficient, word: str) -> Term:
    ops = []
    for token in word.split():
        name, point = token[:2], token[3]
        ops.append((name, point))
    return Term(coefficient, tuple(ops))


def _one(F, G):
    return 1.0


def _minus_one(F, G):
    return -1.0


def _commutator(name: str) -> tuple[Term, ...]:
    return (_t(_one, f"{name}(u) {name}(v)"), _t(_minus_one, f"{name}(v) {name}(u)"))


def _b3b2_last(F, G):
    return -G.e / G.c


def _b3b2_last_printed(F, G):
    return -G.e / G.b


def _a2b1_last(F, G):
    return F.z / (F.w * G.y)


def _a2b1_last_printed(F, G):
    return F.z / (F.w * F.y)


def _single(rid: str, *terms: Term) -> Relation:
    return Relation(rid, (tuple(terms),))


EXCHANGE_RELATIONS: tuple[Relation, ...] = (
    Relation("A1A1-B2B2-C2C2-A3A3", tuple(_commutator(n) for n in ("A1", "B2", "C2", "A3"))),
    _single("B1B1",
            _t(_one, "B1(u) B1(v)"), _t(lambda F, G: -G.w, "B1(v) B1(u)"),
            _t(lambda F, G: G.w / G.y, "B2(v) A1(u)"), _t(lambda F, G: -1 / F.y, "B2(u) A1(v)")),
    _single("A1B1",
            _t(_one, "A1(u) B1(v)"), _t(lambda F, G: -G.z, "B1(v) A1(u)"),
            _t(lambda F, G: G.e / G.b, "B1(u) A1(v)")),
    _single("A1B2",
            _t(_one, "A1(u) B2(v)"), _t(lambda F, G: -G.c / G.d, "B2(v) A1(u)"),
            _t(lambda F, G: G.g / G.d, "B1(u) B1(v)"), _t(lambda F, G: G.f / G.d, "B2(u) A1(v)")),
    _single("B1B2",
            _t(_one, "B1(u) B2(v)"), _t(lambda F, G: -G.z, "B2(v) B1(u)"),
            _t(lambda F, G: G.e / G.b, "B2(u) B1(v)")),
    _single("B2B1",
            _t(_one, "B2(u) B1(v)"), _t(lambda F, G: -1 / F.z, "B1(v) B2(u)"),
            _t(lambda F, G: -F.e / F.c, "B2(v) B1(u)")),
    _single("C1B1",
            _t(_one, "C1(u) B1(v)"), _t(_minus_one, "B1(v) C1(u)"),
            _t(lambda F, G: G.e / G.b, "A2(u) A1(v)"), _t(lambda F, G: -G.e / G.b, "A2(v) A1(u)")),
    _single("B1B3",
            _t(_one, "B1(u) B3(v)"), _t(_minus_one, "B3(v) B1(u)"),
            _t(lambda F, G: -G.e_bar / G.b, "B2(v) A2(u)"), _t(lambda F, G: G.e / G.b, "B2(u) A2(v)")),
    _single("B2B3",
            _t(_one, "B2(u) B3(v)"), _t(lambda F, G: -1 / G.z, "B3(v) B2(u)"),
            _t(lambda F, G: -G.e_bar / G.c, "B2(v) B3(u)")),
    _single("B3B2",
            _t(_one, "B3(u) B2(v)"), _t(lambda F, G: -1 / G.z, "B2(v) B3(u)"),
            _t(_b3b2_last, "B3(v) B2(u)")),
    _single("A2B2",
            _t(_one, "A2(u) B2(v)"), _t(lambda F, G: -F.z * G.z, "B2(v) A2(u)"),
            _t(lambda F, G: -F.e_bar / F.b, "B3(u) B1(v)"), _t(lambda F, G: F.e_bar / F.b, "B1(u) B3(v)"),
            _t(lambda F, G: -(F.e_bar / F.b) ** 2, "B2(u) A2(v)")),
    _single("A3B1",
            _t(_one, "A3(u) B1(v)"), _t(lambda F, G: -F.b / F.d, "B1(v) A3(u)"),
            _t(lambda F, G: 1 / F.y, "B3(u) A2(v)"), _t(lambda F, G: -F.e / F.d, "B2(v) C3(u)"),
            _t(lambda F, G: F.f_bar / F.d, "B2(u) C3(v)")),
    _single("A3B2",
            _t(_one, "A3(u) B2(v)"), _t(lambda F, G: -F.c / F.d, "B2(v) A3(u)"),
            _t(lambda F, G: 1 / F.y, "B3(u) B3(v)"), _t(lambda F, G: F.f_bar / F.d, "B2(u) A3(v)")),
    _single("C1B2",
            _t(_one, "C1(u) B2(v)"), _t(lambda F, G: -G.b / G.d, "B2(v) C1(u)"),
            _t(lambda F, G: -G.e / G.d, "B3(v) A1(u)"), _t(lambda F, G: G.f / G.d, "B3(u) A1(v)"),
            _t(lambda F, G: G.g / G.d, "A2(u) B1(v)")),
    _single("C3B2",
            _t(_one, "C3(u) B2(v)"), _t(lambda F, G: -G.d / G.b, "B2(v) C3(u)"),
            _t(lambda F, G: -G.g / G.b, "B3(v) A2(u)"), _t(lambda F, G: -G.f / G.b, "A3(v) B1(u)"),
            _t(lambda F, G: G.e / G.b, "A3(u) B1(v)")),
    _single("C2B1",
            _t(_one, "C2(u) B1(v)"), _t(lambda F, G: -G.d / G.b, "B1(v) C2(u)"),
            _t(lambda F, G: -G.g / G.b, "A2(v) C1(u)"), _t(lambda F, G: -G.f / G.b, "C3(v) A1(u)"),
            _t(lambda F, G: G.e / G.b, "C3(u) A1(v)")),
    _single("C3A1",
            _t(_one, "C3(u) A1(v)"), _t(lambda F, G: -F.b / F.d, "A1(v) C3(u)"),
            _t(lambda F, G: -F.e / F.d, "B1(v) C2(u)"), _t(lambda F, G: 1 / F.y, "A2(u) C1(v)"),
            _t(lambda F, G: F.f_bar / F.d, "B1(u) C2(v)")),
    _single("C2B2-first",
            _t(_one, "C2(u) B2(v)"), _t(_minus_one, "B2(v) C2(u)"),
            _t(lambda F, G: -1 / G.y_bar, "B3(v) C1(u)"), _t(lambda F, G: 1 / G.y_bar, "C3(u) B1(v)"),
            _t(lambda F, G: -G.f / G.d, "A3(v) A1(u)"), _t(lambda F, G: G.f / G.d, "A3(u) A1(v)")),
    _single("C2B2-second",
            _t(_one, "C2(u) B2(v)"), _t(_minus_one, "B2(v) C2(u)"),
            _t(lambda F, G: -1 / F.y, "B1(v) C3(u)"), _t(lambda F, G: 1 / F.y, "C1(u) B3(v)"),
            _t(lambda F, G: -F.f_bar / F.d, "A1(v) A3(u)"), _t(lambda F, G: F.f_bar / F.d, "A1(u) A3(v)")),
    _single("C1B3",
            _t(_one, "C1(u) B3(v)"), _t(lambda F, G: -G.a / G.d, "B3(v) C1(u)"),
            _t(lambda F, G: -G.g / G.d, "A3(v) A1(u)"), _t(lambda F, G: -1 / G.y, "B2(v) C2(u)"),
            _t(lambda F, G: G.g / G.d, "A2(u) A2(v)"), _t(lambda F, G: G.f / G.d, "B3(u) C1(v)")),
    _single("A2B1",
            _t(_one, "A2(u) B1(v)"), _t(lambda F, G: -F.z / F.w, "B1(v) A2(u)"),
            _t(lambda F, G: F.e_bar / F.b, "B1(u) A2(v)"), _t(lambda F, G: -1 / F.y, "B3(u) A1(v)"),
            _t(lambda F, G: -F.e_bar / (F.y * F.b), "B2(u) C1(v)"), _t(_a2b1_last, "B2(v) C1(u)")),
    _single("C3B1",
            _t(_one, "C3(u) B1(v)"), _t(lambda F, G: -F.a / F.d, "B1(v) C3(u)"),
            _t(lambda F, G: -F.g / F.d, "B2(v) C2(u)"), _t(lambda F, G: F.f_bar / F.d, "B1(u) C3(v)"),
            _t(lambda F, G: -1 / F.y, "A1(v) A3(u)"), _t(lambda F, G: 1 / F.y, "A2(u) A2(v)")),
)

# Coefficients exactly as typeset where they differ from the verified ones:
# relation id -> (term index, printed coefficient).
PRINTED_EXCHANGE_COEFFICIENTS: dict[str, tuple[int, Coefficient]] = {
    "B3B2": (2, _b3b2_last_printed),
    "A2B1": (5, _a2b1_last_printed),
}


def exchange_relations(reading: str = "corrected") -> tuple[Relation, ...]:
    """The relation table; ``reading="printed"`` swaps in the typeset coefficients."""
    if reading == "corrected":
        return EXCHANGE_RELATIONS
    if reading != "printed":
        raise ValueError(f"unknown reading {reading!r}")
    out = []
    for rel in EXCHANGE_RELATIONS:
        if rel.rid in PRINTED_EXCHANGE_COEFFICIENTS:
            idx, coef = PRINTED_EXCHANGE_COEFFICIENTS[rel.rid]
            terms = list(rel.parts[0])
            terms[idx] = Term(coef, terms[idx].word)
            rel = Relation(rel.rid, (tuple(terms),))
        out.append(rel)
    return tuple(out)


def relation_residual(relation: Relation, u: complex, v: complex, params: ModelParams) -> float:
    """Worst relative residual over the parts of one relation."""
    blocks = {"u": build_monodromy(u, params), "v": build_monodromy(v, params)}
    F, G = point_values(complex(u - v), params.eta), point_values(complex(v - u), params.eta)
    worst = 0.0
    for part in relation.parts:
        mats = [term.coefficient(F, G) * reduce(np.matmul, [blocks[p][n] for n, p in term.word])
                for term in part]
        scale = max(np.linalg.norm(m) for m in mats)
        if scale == 0:
            # every term vanishes identically (e.g. a too-short chain)
            continue
        worst = max(worst, float(np.linalg.norm(sum(mats)) / scale))
    return worst


def check_exchange_relations(u: complex, v: complex, params: ModelParams,
                             reading: str = "corrected",
                             relations: Sequence[Relation] | None = None) -> list[tuple[str, float]]:
    """Residual of every exchange relation at spectral points (u, v)."""
    table = exchange_relations(reading) if relations is None else relations
    return [(rel.rid, relation_residual(rel, u, v, params)) for rel in table]
