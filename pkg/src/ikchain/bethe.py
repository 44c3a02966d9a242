"""Bethe states, Bethe equations and their components in the orthogonal basis.

The components F_n(label | u_1..u_n) = <left(label)|phi_n(u)> are obtained by
three routes: a direct bilinear pairing, a recursion driven by the B1/B2
decomposition formulas, and the closed forms for n = 1, 2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .basis import (
    BasisLabel,
    _left_cached,
    _right_cached,
    apply_b1_formula,
    apply_b2_formula,
    enumerate_labels,
    gram_formula,
)
from .errors import NearSingular, NoConvergence
from .hilbert import build_monodromy, state_weights, transfer, vacuum
from .kernel import (
    ModelParams,
    alpha,
    alpha_log_derivative,
    omega_log_derivative,
    point_values,
    z_log_derivative,
)

DISTINCT_ROOTS = 1e-8


@dataclass(frozen=True)
class BetheRoots:
    u: tuple[complex, ...] = ()

    def __post_init__(self):
        roots = tuple(complex(x) for x in self.u)
        object.__setattr__(self, "u", roots)
        for i in range(len(roots)):
            for j in range(i):
                if abs(roots[i] - roots[j]) <= DISTINCT_ROOTS:
                    raise ValueError(f"roots {i} and {j} coincide")

    def __len__(self) -> int:
        return len(self.u)

    def canonical(self) -> "BetheRoots":
        """Roots sorted by real then imaginary part (a table key, not a symmetrization)."""
        return BetheRoots(tuple(sorted(self.u, key=lambda x: (x.real, x.imag))))


def _as_tuple(roots: BetheRoots | Sequence[complex]) -> tuple[complex, ...]:
    return roots.u if isinstance(roots, BetheRoots) else tuple(complex(x) for x in roots)


# ---------------------------------------------------------------- Bethe states

def creation_weights(us: Sequence[complex], params: ModelParams) -> list[tuple[int, complex]]:
    """Weights of the B2(u_1) terms: (index i >= 1 of the dropped root, coefficient)."""
    fv = lambda x: point_values(x, params.eta)
    u1 = us[0]
    out = []
    for i in range(1, len(us)):
        x = alpha(us[i], params, 1) / fv(u1 - us[i]).y
        for j in range(1, i):
            x *= fv(us[i] - us[j]).omega
        for k in range(1, len(us)):
            if k != i:
                x *= fv(us[k] - us[i]).z
        out.append((i, x))
    return out


def bethe_state(roots: BetheRoots | Sequence[complex], params: ModelParams) -> np.ndarray:
    """|phi_n> = B1(u_1)|phi_{n-1}(u_2..)> - B2(u_1) sum_i weight_i |phi_{n-2}(u_2.. without u_i)>."""
    us = _as_tuple(roots)
    if len(us) > 2 * params.n_sites:
        raise ValueError("a chain of N sites carries at most 2N roots")
    memo: dict[tuple[complex, ...], np.ndarray] = {}

    def build(seq: tuple[complex, ...]) -> np.ndarray:
        if seq in memo:
            return memo[seq]
        if not seq:
            out = vacuum(params)
        else:
            blocks = build_monodromy(seq[0], params)
            out = blocks.B1 @ build(seq[1:])
            for i, w in creation_weights(seq, params):
                out = out - w * (blocks.B2 @ build(seq[1:i] + seq[i + 1:]))
        memo[seq] = out
        return out

    return build(us)


def weight_leakage(roots: BetheRoots | Sequence[complex], params: ModelParams) -> float:
    """Norm of the Bethe state outside the weight-n sector, relative to its norm."""
    us = _as_tuple(roots)
    phi = bethe_state(us, params)
    outside = state_weights(params.n_sites) != len(us)
    return float(np.linalg.norm(phi[outside]) / np.linalg.norm(phi))


def exchange_asymmetry(roots: BetheRoots | Sequence[complex], params: ModelParams,
                       i: int = 0, j: int = 1) -> float:
    """Relative change of |phi_n> when roots i and j are swapped (measured, never asserted)."""
    us = list(_as_tuple(roots))
    a = bethe_state(us, params)
    us[i], us[j] = us[j], us[i]
    b = bethe_state(us, params)
    return float(np.linalg.norm(a - b) / np.linalg.norm(a))


# ---------------------------------------------------------------- Bethe equations

def bae_residual(roots: BetheRoots | Sequence[complex], params: ModelParams) -> np.ndarray:
    """alpha1(u_j)/alpha2(u_j) - prod_k z(u_j-u_k)/z(u_k-u_j) omega(u_k-u_j), per root."""
    us = _as_tuple(roots)
    fv = lambda x: point_values(x, params.eta)
    out = []
    for j, uj in enumerate(us):
        rhs = 1.0 + 0j
        for k, uk in enumerate(us):
            if k != j:
                rhs *= fv(uj - uk).z / fv(uk - uj).z * fv(uk - uj).omega
        den = alpha(uj, params, 2)
        if den == 0:
            raise NearSingular("alpha2", uj)
        out.append(alpha(uj, params, 1) / den - rhs)
    return np.array(out, dtype=complex)


def _unwrap(x: complex) -> complex:
    return x - 2j * math.pi * round(x.imag / (2 * math.pi))


def bae_log_residual(roots: BetheRoots | Sequence[complex], params: ModelParams) -> np.ndarray:
    """log(LHS) - log(RHS) per root, with the phase folded into (-pi, pi]."""
    us = _as_tuple(roots)
    fv = lambda x: point_values(x, params.eta)
    out = []
    for j, uj in enumerate(us):
        h = sum(cmath.log(fv(uj - t).c) - cmath.log(fv(uj - t).b) for t in params.theta)
        for k, uk in enumerate(us):
            if k != j:
                h -= cmath.log(fv(uj - uk).z) - cmath.log(fv(uk - uj).z) + cmath.log(fv(uk - uj).omega)
        out.append(_unwrap(h))
    return np.array(out, dtype=complex)


def bae_jacobian(roots: BetheRoots | Sequence[complex], params: ModelParams) -> np.ndarray:
    """Holomorphic Jacobian of bae_log_residual from closed-form derivatives."""
    us = _as_tuple(roots)
    eta = params.eta
    n = len(us)
    J = np.zeros((n, n), dtype=complex)
    for j, uj in enumerate(us):
        J[j, j] = alpha_log_derivative(uj, params, 1) - alpha_log_derivative(uj, params, 2)
        for k, uk in enumerate(us):
            if k == j:
                continue
            # term log z(uj-uk) - log z(uk-uj) + log omega(uk-uj)
            d_uj = z_log_derivative(uj - uk, eta) + z_log_derivative(uk - uj, eta) - omega_log_derivative(uk - uj, eta)
            J[j, j] -= d_uj
            J[j, k] += d_uj
    return J


def solve_bae(n: int, initial_guesses: Sequence[Sequence[complex]], params: ModelParams,
              tol: float = 1e-11, max_iter: int = 200) -> BetheRoots:
    """Damped Newton on the log-form Bethe equations, trying each start in turn."""
    if n == 0:
        return BetheRoots(())
    if n > 2 * params.n_sites:
        raise ValueError("a chain of N sites carries at most 2N roots")
    best = math.inf
    for guess in initial_guesses:
        z = np.array(list(guess), dtype=complex).reshape(-1)
        if z.size != n:
            raise ValueError(f"initial guess {guess!r} does not have {n} roots")
        try:
            h = bae_log_residual(z, params)
        except (NearSingular, ValueError, ZeroDivisionError):
            continue
        r = float(np.abs(h).max())
        polish = 0
        for _ in range(max_iter):
            if r < tol:
                polish += 1
                if polish > 2 or r < 1e-15:
                    break
            try:
                step = np.linalg.solve(bae_jacobian(z, params), -h)
            except (np.linalg.LinAlgError, NearSingular, ZeroDivisionError):
                break
            damping = 1.0
            accepted = False
            while damping > 1e-8:
                trial = z + damping * step
                try:
                    h_trial = bae_log_residual(trial, params)
                    r_trial = float(np.abs(h_trial).max())
                except (NearSingular, ValueError, ZeroDivisionError):
                    r_trial = math.inf
                if r_trial < r or (r < tol and r_trial <= r):
                    z, h, r = trial, h_trial, r_trial
                    accepted = True
                    break
                damping /= 2
            if not accepted:
                break
        best = min(best, r)
        if r < tol:
            try:
                return BetheRoots(tuple(z))
            except ValueError:
                continue
    raise NoConvergence(best)


# ---------------------------------------------------------------- on-shell check

def transfer_eigenvalue(roots: BetheRoots | Sequence[complex], u: complex, params: ModelParams) -> complex:
    """Ratio (t(u) phi)_k / phi_k on the largest component k of phi."""
    phi = bethe_state(roots, params)
    k = int(np.argmax(np.abs(phi)))
    return complex((transfer(u, params) @ phi)[k] / phi[k])


def on_shell_check(roots: BetheRoots | Sequence[complex], params: ModelParams,
                   u_samples: Sequence[complex]) -> float:
    phi = bethe_state(roots, params)
    k = int(np.argmax(np.abs(phi)))
    worst = 0.0
    for u in u_samples:
        tphi = transfer(u, params) @ phi
        lam = tphi[k] / phi[k]
        worst = max(worst, float(np.linalg.norm(tphi - lam * phi) / np.linalg.norm(tphi)))
    return worst


def spectrum_distance(value: complex, u: complex, params: ModelParams) -> float:
    """Relative distance from ``value`` to the nearest eigenvalue of t(u)."""
    eig = np.linalg.eigvals(transfer(u, params))
    return float(np.min(np.abs(eig - value)) / max(abs(value), 1e-300))


# ---------------------------------------------------------------- F coefficients

def scalar_product(label: BasisLabel, roots: BetheRoots | Sequence[complex], params: ModelParams) -> complex:
    return complex(_left_cached(label, params) @ bethe_state(roots, params))


def f_direct(label: BasisLabel, roots: BetheRoots | Sequence[complex], params: ModelParams) -> complex:
    us = _as_tuple(roots)
    if label.weight != len(us):
        return 0j
    return scalar_product(label, us, params)


def f_recursive(label: BasisLabel, roots: BetheRoots | Sequence[complex], params: ModelParams,
                reading: str = "corrected") -> complex:
    """F_n through the B1/B2 decompositions applied to the first root.

    Every summand of the decompositions is paired with the F of the label it
    produces; the B2 terms also drop one of u_2..u_n with the Bethe-state weight.
    """
    memo: dict[tuple[BasisLabel, tuple[complex, ...]], complex] = {}

    def rec(lab: BasisLabel, us: tuple[complex, ...]) -> complex:
        if lab.weight != len(us):
            return 0j
        if not us:
            return 1.0 + 0j
        key = (lab, us)
        if key in memo:
            return memo[key]
        total = 0j
        for target, c in apply_b1_formula(lab, us[0], params):
            total += c * rec(target, us[1:])
        weights = creation_weights(us, params)
        if weights:
            b2 = apply_b2_formula(lab, us[0], params, reading)
            for i, w in weights:
                rest = us[1:i] + us[i + 1:]
                for target, c in b2:
                    total -= w * c * rec(target, rest)
        memo[key] = total
        return total

    return rec(label, _as_tuple(roots))


def f_explicit(label: BasisLabel, roots: BetheRoots | Sequence[complex], params: ModelParams,
               reading: str = "corrected") -> complex:
    """Closed forms for n = 1 and n = 2.

    ``reading="printed"`` reproduces two typeset details of the two-root
    formulas: the alpha3 factor of the level-two case is taken at site 1, and
    the last e_bar factor of the two level-one case has arguments
    (level-one site p_1) - u_2. The corrected reading uses site p_1 and
    (level-one site p_2) - u_1 respectively.
    """
    if reading not in ("corrected", "printed"):
        raise ValueError(f"unknown reading {reading!r}")
    us = _as_tuple(roots)
    fv = lambda x: point_values(x, params.eta)
    t1, t2 = params.theta_one, params.theta_two
    if label.weight != len(us):
        return 0j
    if len(us) == 1 and label.m2 == 1:
        p1 = label.p[0]
        q = fv(t1(p1) - us[0])
        return q.e_bar / q.b * alpha(us[0], params, 1) * alpha(t1(p1), params, 2)
    if len(us) == 2 and label.m == 1 and label.m2 == 0:
        u1, u2 = us
        p1 = label.p[0]
        q, r = fv(t2(p1) - u1), fv(t1(p1) - u2)
        bracket = q.e_bar * r.e_bar / (q.d * r.b) * cmath.exp(-params.eta) - q.f_bar / (fv(u1 - u2).y * q.d)
        site = 1 if reading == "printed" else p1
        return bracket * alpha(u1, params, 1) * alpha(u2, params, 1) * alpha(t2(site), params, 3)
    if len(us) == 2 and label.m == 2 and label.m2 == 2:
        u1, u2 = us
        p1, p2 = label.p
        y12 = fv(u1 - u2).y
        first = (fv(t1(p1) - u1).e_bar * fv(t1(p1) - t1(p2)).z * fv(t1(p2) - u2).e_bar * fv(t1(p2) - u1).z
                 / (fv(t1(p1) - u1).b * fv(t1(p1) - t1(p2)).omega * fv(t1(p2) - u2).b))
        second = (fv(t1(p2) - u1).e_bar * fv(t1(p2) - t1(p1)).z * fv(t1(p1) - u2).e_bar * fv(t1(p1) - u1).z
                  / (fv(t1(p2) - u1).b * fv(t1(p1) - u2).b))
        third = (fv(t1(p2) - u1).z * fv(t1(p1) - u1).f_bar * fv(t1(p1) - t1(p2)).g
                 / (y12 * fv(t1(p1) - u1).b * fv(t1(p1) - t1(p2)).d))
        last_e = fv(t1(p1) - u2).e_bar if reading == "printed" else fv(t1(p2) - u1).e_bar
        fourth = (fv(t1(p1) - u1).g_bar * last_e
                  / (y12 * fv(t1(p1) - u1).b * fv(t1(p2) - u1).b))
        return ((first + second + third - fourth) * alpha(u1, params, 1) * alpha(u2, params, 1)
                * alpha(t1(p1), params, 2) * alpha(t1(p2), params, 2))
    raise ValueError("closed forms exist only for n = 1 (one level-one site) and n = 2")


@dataclass
class FTable:
    """Components F_n for one root set, keyed by basis label (weight-n labels only)."""

    roots: BetheRoots
    entries: dict[BasisLabel, complex] = field(default_factory=dict)


def f_table(roots: BetheRoots | Sequence[complex], params: ModelParams, method: str = "recursive") -> FTable:
    us = _as_tuple(roots)
    table = FTable(BetheRoots(us))
    for label in enumerate_labels(params):
        if label.weight == len(us):
            if method == "recursive":
                table.entries[label] = f_recursive(label, us, params)
            else:
                table.entries[label] = f_direct(label, us, params)
    return table


def expand_bethe(roots: BetheRoots | Sequence[complex], params: ModelParams,
                 method: str = "recursive") -> list[tuple[BasisLabel, complex]]:
    """Coefficients F_n / G of the Bethe state on the right basis."""
    table = f_table(roots, params, method)
    return [(label, F / gram_formula(label, params)) for label, F in table.entries.items()]


def expansion_residual(roots: BetheRoots | Sequence[complex], params: ModelParams,
                       method: str = "recursive") -> float:
    phi = bethe_state(roots, params)
    rebuilt = np.zeros_like(phi)
    for label, c in expand_bethe(roots, params, method):
        rebuilt += c * _right_cached(label, params)
    return float(np.linalg.norm(rebuilt - phi) / np.linalg.norm(phi))
