"""The orthogonal left/right basis built from C/B blocks at shifted inhomogeneities.

A label (m, m2, p) picks m2 sites whose theta is shifted by 4 eta (the "level
one" block, created by B1 or C1) and m - m2 sites shifted by 6 eta + i pi (the
"level two" block, created by B2 or C2). Pairings between left and right
states are bilinear: a left state is a plain row vector, never conjugated.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .hilbert import act_left, act_right, build_monodromy, vacuum
from .kernel import (
    ModelParams,
    alpha,
    element_tuple,
    point_values,
    require_generic,
    xi_bar,
)

B2_READINGS = ("corrected", "printed", "printed-alt")


@dataclass(frozen=True, order=False)
class BasisLabel:
    """m sites in total, the first m2 entries of p at level one, the rest at level two."""

    m: int
    m2: int
    p: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        if not 0 <= self.m2 <= self.m or len(self.p) != self.m:
            raise ValueError(f"inconsistent label {self}")
        if len(set(self.p)) != self.m:
            raise ValueError(f"repeated site in {self.p}")
        one, two = self.theta1_sites, self.theta2_sites
        if list(one) != sorted(one) or list(two) != sorted(two):
            raise ValueError(f"each block of {self.p} must be increasing")

    @property
    def theta1_sites(self) -> tuple[int, ...]:
        return self.p[: self.m2]

    @property
    def theta2_sites(self) -> tuple[int, ...]:
        return self.p[self.m2:]

    @property
    def weight(self) -> int:
        """Number of Bethe roots this state pairs with: 2m - m2."""
        return 2 * self.m - self.m2

    def unused_sites(self, n_sites: int) -> list[int]:
        return [s for s in range(1, n_sites + 1) if s not in self.p]

    def __str__(self) -> str:
        return f"(m={self.m},m2={self.m2},p={self.p})"


def labels_for(n_sites: int) -> list[BasisLabel]:
    """Canonical order: m ascending, m2 descending, then the level-one and level-two site tuples."""
    sites = range(1, n_sites + 1)
    out = []
    for m in range(n_sites + 1):
        for m2 in range(m, -1, -1):
            for one in itertools.combinations(sites, m2):
                rest = [s for s in sites if s not in one]
                for two in itertools.combinations(rest, m - m2):
                    out.append(BasisLabel(m, m2, one + two))
    return out


def enumerate_labels(params: ModelParams) -> list[BasisLabel]:
    return labels_for(params.n_sites)


def _order_index(n_sites: int) -> dict[BasisLabel, int]:
    return {lab: i for i, lab in enumerate(labels_for(n_sites))}


@dataclass(frozen=True)
class BasisState:
    label: BasisLabel
    side: str
    vector: np.ndarray


# ---------------------------------------------------------------- states

def left_word(theta1_sites: Sequence[int], theta2_sites: Sequence[int],
              params: ModelParams) -> list[tuple[str, complex]]:
    """Operator word for <0| C2(..) ... C2(..) C1(..) ... C1(..), read left to right.

    Both site lists are given in label order p_1, p_2, ...; the word applies
    the level-two sites last-to-first and then the level-one sites last-to-first.
    """
    word = [("C2", params.theta_two(s)) for s in reversed(theta2_sites)]
    word += [("C1", params.theta_one(s)) for s in reversed(theta1_sites)]
    return word


def right_word(theta1_sites: Sequence[int], theta2_sites: Sequence[int],
               params: ModelParams) -> list[tuple[str, complex]]:
    """Operator word for B1(..) ... B1(..) B2(..) ... B2(..) |0>, read left to right."""
    word = [("B1", params.theta_one(s)) for s in theta1_sites]
    word += [("B2", params.theta_two(s)) for s in theta2_sites]
    return word


def left_vector(theta1_sites: Sequence[int], theta2_sites: Sequence[int],
                params: ModelParams) -> np.ndarray:
    return act_left(vacuum(params), left_word(theta1_sites, theta2_sites, params), params)


@lru_cache(maxsize=4096)
def _left_cached(label: BasisLabel, params: ModelParams) -> np.ndarray:
    v = left_vector(label.theta1_sites, label.theta2_sites, params)
    v.flags.writeable = False
    return v


@lru_cache(maxsize=4096)
def _right_cached(label: BasisLabel, params: ModelParams) -> np.ndarray:
    v = act_right(right_word(label.theta1_sites, label.theta2_sites, params), vacuum(params), params)
    v.flags.writeable = False
    return v


def build_left_state(label: BasisLabel, params: ModelParams) -> BasisState:
    return BasisState(label, "left", _left_cached(label, params))


def build_right_state(label: BasisLabel, params: ModelParams) -> BasisState:
    return BasisState(label, "right", _right_cached(label, params))


# ---------------------------------------------------------------- Gram factors

def gram_formula(label: BasisLabel, params: ModelParams) -> complex:
    """Closed-form pairing <left(label)|right(label)>."""
    require_generic(params)
    eta = params.eta
    fv = lambda x: point_values(x, eta)
    t1, t2 = params.theta_one, params.theta_two
    one, two = label.theta1_sites, label.theta2_sites
    pref = 2 * cmath.cosh(eta) * cmath.sinh(2 * eta)
    f0 = element_tuple(0j, eta)[6]
    G = 1.0 + 0j
    for k, pk in enumerate(one):
        x = pref * alpha(t1(pk), params, 1, skip=pk) * alpha(t1(pk), params, 2)
        for pi in one:
            if pi != pk:
                x *= fv(t1(pk) - t1(pi)).z
        for pl in one[k + 1:]:
            x *= fv(t1(pl) - t1(pk)).omega
        for pj in two:
            q = fv(t2(pj) - t1(pk))
            x *= q.c / q.d * q.z * fv(t1(pk) - t2(pj)).z
        G *= x
    for pk in two:
        x = f0 * alpha(t2(pk), params, 1, skip=pk) * alpha(t2(pk), params, 3)
        for pi in two:
            if pi != pk:
                q = fv(t2(pk) - t2(pi))
                x *= q.c / q.d
        G *= x
    return G


def gram_direct(label: BasisLabel, params: ModelParams) -> complex:
    return complex(_left_cached(label, params) @ _right_cached(label, params))


def check_orthogonality(params: ModelParams) -> tuple[float, float]:
    """(largest scaled off-diagonal pairing, largest Gram formula relative error)."""
    require_generic(params)
    labels = enumerate_labels(params)
    L = np.array([_left_cached(l, params) for l in labels])
    R = np.array([_right_cached(l, params) for l in labels]).T
    pairing = L @ R
    gram = np.array([gram_formula(l, params) for l in labels])
    diag = np.diag(pairing)
    scale = np.sqrt(np.outer(np.abs(gram), np.abs(gram)))
    off = np.abs(pairing - np.diag(diag)) / scale
    return float(off.max()), float(np.max(np.abs(diag - gram) / np.abs(gram)))


def check_completeness(params: ModelParams) -> float:
    """Relative deviation of sum |right><left| / G from the identity."""
    require_generic(params)
    D = 3 ** params.n_sites
    total = np.zeros((D, D), dtype=complex)
    for label in enumerate_labels(params):
        total += np.outer(_right_cached(label, params), _left_cached(label, params)) / gram_formula(label, params)
    return float(np.linalg.norm(total - np.eye(D)) / np.sqrt(D))


# ---------------------------------------------------------------- A1 eigenvalue

def a1_eigenvalue(label: BasisLabel, u: complex, params: ModelParams) -> complex:
    eta = params.eta
    value = alpha(u, params, 1)
    for s in label.theta1_sites:
        value *= point_values(params.theta_one(s) - u, eta).z
    for s in label.theta2_sites:
        q = point_values(params.theta_two(s) - u, eta)
        value *= q.c / q.d
    return value


def check_a1_eigen(label: BasisLabel, u: complex, params: ModelParams) -> float:
    """Worst relative residual of the A1 eigen-relation on the left and right states."""
    A1 = build_monodromy(u, params).A1
    lam = a1_eigenvalue(label, u, params)
    left, right = _left_cached(label, params), _right_cached(label, params)
    r_left = np.linalg.norm(left @ A1 - lam * left) / (np.linalg.norm(A1) * np.linalg.norm(left))
    r_right = np.linalg.norm(A1 @ right - lam * right) / (np.linalg.norm(A1) * np.linalg.norm(right))
    return float(max(r_left, r_right))


# ---------------------------------------------------------------- vanishing identities

VANISHING_IDENTITIES = {
    "left-level-one": ("left", 1, ("B1", "B2", "A1")),
    "left-level-two": ("left", 2, ("B1", "B2", "B3", "C1", "A1", "A2")),
    "right-level-one": ("right", 1, ("C1", "C2", "A1")),
    "right-level-two": ("right", 2, ("C1", "C2", "C3", "B1", "A1", "A2")),
}


def vanishing_cases(params: ModelParams) -> Iterable[tuple[str, BasisLabel, int, str, float]]:
    """Yield (identity id, label, unused site, block, scaled norm) for every applicable triple.

    The norm of state * block is divided by |state| |block|_F.
    """
    for label in enumerate_labels(params):
        for site in label.unused_sites(params.n_sites):
            for ident, (side, level, names) in VANISHING_IDENTITIES.items():
                point = params.theta_one(site) if level == 1 else params.theta_two(site)
                blocks = build_monodromy(point, params)
                for name in names:
                    X = blocks[name]
                    if side == "left":
                        v = _left_cached(label, params)
                        out = v @ X
                    else:
                        v = _right_cached(label, params)
                        out = X @ v
                    norm = np.linalg.norm(out) / (np.linalg.norm(v) * np.linalg.norm(X))
                    yield ident, label, site, name, float(norm)


def check_vanishing(params: ModelParams) -> list[tuple[str, float]]:
    worst: dict[str, float] = {k: 0.0 for k in VANISHING_IDENTITIES}
    for ident, _, _, _, norm in vanishing_cases(params):
        worst[ident] = max(worst[ident], norm)
    return list(worst.items())


# ---------------------------------------------------------------- quasi-symmetries

def _vector_mismatch(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b)))


def check_quasi_symmetry_one(label: BasisLabel, i: int, params: ModelParams) -> float:
    """Swap level-one entries i, i+1 (1-based) and compare against the omega factor."""
    one = list(label.theta1_sites)
    swapped = one[: i - 1] + [one[i], one[i - 1]] + one[i + 1:]
    lhs = left_vector(one, label.theta2_sites, params)
    factor = point_values(params.theta_one(one[i]) - params.theta_one(one[i - 1]), params.eta).omega
    return _vector_mismatch(lhs, factor * left_vector(swapped, label.theta2_sites, params))


def check_quasi_symmetry_two(label: BasisLabel, params: ModelParams) -> float:
    """Move the first level-two operator past the last level-one operator."""
    one, two = label.theta1_sites, label.theta2_sites
    lhs = _left_cached(label, params)
    first_two, last_one = two[0], one[-1]
    word = [("C2", params.theta_two(s)) for s in reversed(two[1:])]
    word += [("C1", params.theta_one(last_one)), ("C2", params.theta_two(first_two))]
    word += [("C1", params.theta_one(s)) for s in reversed(one[:-1])]
    rhs = act_left(vacuum(params), word, params)
    factor = point_values(params.theta_two(first_two) - params.theta_one(last_one), params.eta).z
    return _vector_mismatch(lhs, factor * rhs)


def check_quasi_symmetry_three(label: BasisLabel, i: int, params: ModelParams) -> float:
    """Swap level-two entries i, i+1 (1-based within the level-two block)."""
    two = list(label.theta2_sites)
    swapped = two[: i - 1] + [two[i], two[i - 1]] + two[i + 1:]
    return _vector_mismatch(left_vector(label.theta1_sites, two, params),
                            left_vector(label.theta1_sites, swapped, params))


# ---------------------------------------------------------------- label combinations

Combination = list[tuple[BasisLabel, complex]]


def canonicalize(theta1: Sequence[int], theta2: Sequence[int], coefficient: complex,
                 params: ModelParams) -> tuple[BasisLabel, complex]:
    """Sort a level-one list into increasing order, paying omega for each adjacent swap."""
    one = list(theta1)
    for a in range(len(one)):
        for b in range(len(one) - 1 - a):
            x, y = one[b], one[b + 1]
            if x > y:
                coefficient *= point_values(params.theta_one(y) - params.theta_one(x), params.eta).omega
                one[b], one[b + 1] = y, x
    two = sorted(theta2)
    return BasisLabel(len(one) + len(two), len(one), tuple(one) + tuple(two)), coefficient


class _Accumulator:
    def __init__(self, params: ModelParams):
        self.params = params
        self.terms: dict[BasisLabel, complex] = {}

    def add(self, theta1: Sequence[int], theta2: Sequence[int], coefficient: complex) -> None:
        label, c = canonicalize(theta1, theta2, coefficient, self.params)
        self.terms[label] = self.terms.get(label, 0j) + c

    def result(self) -> Combination:
        order = _order_index(self.params.n_sites)
        return sorted(self.terms.items(), key=lambda kv: order[kv[0]])


def apply_b1_formula(label: BasisLabel, u: complex, params: ModelParams) -> Combination:
    """<left(label)| B1(u) as a combination of left basis states."""
    require_generic(params)
    fv = lambda x: point_values(x, params.eta)
    t1, t2 = params.theta_one, params.theta_two
    P1, P2 = list(label.theta1_sites), list(label.theta2_sites)
    a1 = alpha(u, params, 1)
    acc = _Accumulator(params)
    # drop one level-one site
    for i, pi in enumerate(P1):
        q = fv(t1(pi) - u)
        x = q.e_bar / q.b * a1 * alpha(t1(pi), params, 2)
        for ph in P1[:i]:
            x *= fv(t1(pi) - t1(ph)).omega
        for pj in P1:
            if pj != pi:
                r = fv(t1(pi) - t1(pj))
                x *= fv(t1(pj) - u).z * r.z / r.omega
        for pk in P2:
            s = fv(t2(pk) - u)
            x *= s.c / s.d * fv(t1(pi) - t2(pk)).z * fv(t2(pk) - t1(pi)).z
        acc.add([s for s in P1 if s != pi], P2, x)
    # move one level-two site to the end of the level-one block
    for pi in P2:
        q = fv(t2(pi) - u)
        bracket = q.e_bar / q.d
        for l, pl in enumerate(P1):
            r, s = fv(t1(pl) - t2(pi)), fv(t1(pl) - u)
            y = -r.e * s.e_bar * q.c / (r.b * s.b * q.d)
            for pj in P1:
                if pj != pl:
                    y *= fv(t1(pj) - u).z * fv(t1(pl) - t1(pj)).z
            bracket += y
        x = bracket * a1 * xi_bar(params.theta[pi - 1], params)
        for pk in P2:
            if pk != pi:
                r, s = fv(t2(pk) - t1(pi)), fv(t2(pk) - u)
                x *= r.b * s.c / (r.c * s.d) * fv(t2(pi) - t2(pk)).z
        acc.add(P1 + [pi], [s for s in P2 if s != pi], x)
    return acc.result()


def apply_b2_formula(label: BasisLabel, u: complex, params: ModelParams,
                     reading: str = "corrected") -> Combination:
    """<left(label)| B2(u) as a combination of left basis states.

    ``reading`` selects how three factors are read: "printed" takes them as
    typeset (level-two superscript in the second sum's d/b product),
    "printed-alt" uses the level-one superscript there instead, and
    "corrected" uses the factors that reproduce the direct matrix action.
    """
    if reading not in B2_READINGS:
        raise ValueError(f"unknown reading {reading!r}; expected one of {B2_READINGS}")
    require_generic(params)
    fixed = reading == "corrected"
    fv = lambda x: point_values(x, params.eta)
    t1, t2 = params.theta_one, params.theta_two
    xb = lambda s: xi_bar(params.theta[s - 1], params)
    P1, P2 = list(label.theta1_sites), list(label.theta2_sites)
    m2 = len(P1)
    a1 = alpha(u, params, 1)
    acc = _Accumulator(params)

    # 1. drop one level-two site
    for pl in P2:
        q = fv(t2(pl) - u)
        x = q.f_bar / q.d * a1 * alpha(t2(pl), params, 3)
        for pi in P1:
            if fixed:
                r = fv(t2(pl) - t1(pi))
                x *= fv(t1(pi) - u).z * r.c / r.d
            else:
                r = fv(t1(pi) - u)
                x *= r.d / r.b
        for pj in P2:
            if pj != pl:
                r, s = fv(t2(pj) - u), fv(t2(pl) - t2(pj))
                x *= r.c * s.c / (r.d * s.d)
        acc.add(P1, [s for s in P2 if s != pl], x)

    # 2. move two level-two sites into the level-one block
    for a, pl in enumerate(P2):
        for pi in P2[a + 1:]:
            ql, qi = fv(t2(pl) - u), fv(t2(pi) - u)
            x = (ql.g_bar * qi.e_bar / (ql.d * qi.d)
                 - ql.f_bar * qi.c / (ql.d * qi.d * fv(t2(pl) - t2(pi)).y_bar))
            x *= fv(t1(pl) - t1(pi)).omega
            for pj in P2:
                if pj not in (pl, pi):
                    r = fv(t2(pj) - u)
                    x *= (r.c * fv(t2(pi) - t2(pj)).z * fv(t2(pl) - t2(pj)).z
                          / (r.d * fv(t2(pj) - t1(pi)).z * fv(t2(pj) - t1(pl)).z))
            for pk in P1:
                if fixed:
                    x *= fv(t1(pk) - u).z * fv(t2(pl) - t1(pk)).z * fv(t2(pi) - t1(pk)).z
                else:
                    shifted = t2(pk) if reading == "printed" else t1(pk)
                    r = fv(shifted - u)
                    x *= r.d / r.b
            x *= a1 * xb(pi) * xb(pl)
            acc.add(P1 + [pl, pi], [s for s in P2 if s not in (pl, pi)], x)

    # 3. drop two level-one sites
    for a, pl in enumerate(P1):
        for b in range(a + 1, m2):
            pi = P1[b]
            ql, qi, r = fv(t1(pl) - u), fv(t1(pi) - u), fv(t1(pl) - t1(pi))
            x = ql.g_bar * qi.e_bar / (ql.b * qi.b) - ql.f_bar * r.g / (ql.b * r.d) * qi.z
            x *= a1 * alpha(t1(pl), params, 2) * alpha(t1(pi), params, 2)
            for h in range(a):
                x *= fv(t1(pl) - t1(P1[h])).omega
            for h in range(b):
                if h != a:
                    x *= fv(t1(pi) - t1(P1[h])).omega
            for pj in P1:
                if pj not in (pl, pi):
                    si, sl = fv(t1(pi) - t1(pj)), fv(t1(pl) - t1(pj))
                    x *= fv(t1(pj) - u).z * si.z * sl.z / (si.omega * sl.omega)
            for pk in P2:
                s = fv(t2(pk) - u)
                x *= (s.c / s.d * fv(t1(pl) - t2(pk)).z * fv(t2(pk) - t1(pl)).z
                      * fv(t1(pi) - t2(pk)).z * fv(t2(pk) - t1(pi)).z)
            acc.add([s for s in P1 if s not in (pl, pi)], P2, x)

    # 4. drop one level-one site and move one level-two site into its block
    for idx, pl in enumerate(P1):
        for pi in P2:
            qi, ql, lp = fv(t2(pi) - u), fv(t1(pl) - u), fv(t1(pl) - t1(pi))
            T1 = qi.e_bar / qi.d * ql.g_bar * lp.z / (ql.b * lp.omega)
            for ph in P1:
                if ph != pl:
                    r = fv(t1(pl) - t1(ph))
                    T1 *= r.z / r.omega
            q = fv(t2(pi) - t1(pl))
            T2 = (q.g_bar / q.b - q.f_bar / (q.b * q.y_bar)) * ql.f_bar * qi.c / (ql.b * qi.d)
            for pj in P1:
                if pj != pl:
                    r = fv(t1(pl) - t1(pj))
                    T2 *= r.c * fv(t1(pj) - u).z / (r.d * r.omega)
            T3 = 0j
            for pk in P1:
                if pk == pl:
                    continue
                r, qk = fv(t1(pl) - t1(pk)), fv(t1(pk) - u)
                second = qk.e_bar * ql.g_bar / (qk.b * ql.b)
                if fixed:
                    second *= r.z / r.omega
                y = r.g * r.z * ql.f_bar * qk.z / (r.d * r.omega * ql.b) - second
                s = fv(t1(pk) - t2(pi))
                y *= s.e * qi.c * lp.z / (s.b * qi.d * lp.omega)
                for pj in P1:
                    if pj not in (pl, pk):
                        sl = fv(t1(pl) - t1(pj))
                        y *= fv(t1(pj) - u).z * fv(t1(pk) - t1(pj)).z * sl.z / sl.omega
                T3 += y
            x = T1 + T2 + T3
            for pj in P2:
                if pj != pi:
                    r = fv(t2(pj) - u)
                    x *= (r.c * fv(t2(pi) - t2(pj)).z / (r.d * fv(t2(pj) - t1(pi)).z)
                          * fv(t1(pl) - t2(pj)).z * fv(t2(pj) - t1(pl)).z)
            x *= a1 * alpha(t1(pl), params, 2) * xb(pi)
            if fixed:
                for ph in P1[:idx]:
                    x *= fv(t1(pl) - t1(ph)).omega
            acc.add([s for s in P1 if s != pl] + [pi], [s for s in P2 if s != pi], x)
    return acc.result()


def combination_vector(combination: Combination, params: ModelParams) -> np.ndarray:
    out = np.zeros(3 ** params.n_sites, dtype=complex)
    for label, c in combination:
        out += c * _left_cached(label, params)
    return out


def direct_action(label: BasisLabel, u: complex, block: str, params: ModelParams) -> np.ndarray:
    return _left_cached(label, params) @ build_monodromy(u, params)[block]


def formula_residual(label: BasisLabel, u: complex, block: str, params: ModelParams,
                     reading: str = "corrected") -> float:
    """Relative mismatch between a decomposition formula and <left(label)| block(u)."""
    if block == "B1":
        combo = apply_b1_formula(label, u, params)
    elif block == "B2":
        combo = apply_b2_formula(label, u, params, reading)
    else:
        raise ValueError(f"no decomposition formula for {block}")
    direct = direct_action(label, u, block, params)
    diff = np.linalg.norm(combination_vector(combo, params) - direct)
    scale = np.linalg.norm(direct)
    return float(diff / scale) if scale else float(diff)
