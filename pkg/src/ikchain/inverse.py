"""Local matrix units e^{ij} at a site rebuilt from monodromy blocks at the inhomogeneities.

Two routes are offered. The "trace" route inverts transfer matrices:
tr_0(x_0 T_0(theta_k)) = prod_{j<k} t(theta_j)^{-1} x_k prod_{j<=k} t(theta_j).
The "product" route uses prod_j t(theta_j) = scalar * id to avoid inverses,
so x_k = scalar * prod_{j<k} t(theta_j) tr_0(x_0 T_0(theta_k)) prod_{j>k} t(theta_j).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from .errors import IndexOutOfRange, SingularTransfer
from .hilbert import build_monodromy, embed, transfer
from .kernel import ModelParams, phi_initial, unitarity_factor

CONDITION_LIMIT = 1e12


def matrix_unit(i: int, j: int) -> np.ndarray:
    """e^{ij} = |i><j| with 1-based labels."""
    if not (1 <= i <= 3 and 1 <= j <= 3):
        raise IndexOutOfRange(f"matrix unit ({i}, {j}) outside 1..3")
    e = np.zeros((3, 3), dtype=complex)
    e[i - 1, j - 1] = 1.0
    return e


def aux_trace(local: np.ndarray, site: int, params: ModelParams) -> np.ndarray:
    """tr_0(x_0 T_0(theta_site)) = sum_{a,b} x[a, b] T^b_a(theta_site)."""
    blocks = build_monodromy(params.theta[site - 1], params)
    out = np.zeros((3 ** params.n_sites,) * 2, dtype=complex)
    for a in range(3):
        for b in range(3):
            if local[a, b] != 0:
                out += local[a, b] * blocks.entry(b, a)
    return out


def _factor(site: int, params: ModelParams):
    t = transfer(params.theta[site - 1], params)
    cond = np.linalg.cond(t)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularTransfer(site, float(cond))
    return scipy.linalg.lu_factor(t)


def _check_site(site: int, params: ModelParams) -> None:
    if not 1 <= site <= params.n_sites:
        raise IndexOutOfRange(f"site {site} outside 1..{params.n_sites}")


def _relative(diff: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(diff) / np.linalg.norm(ref))


def check_trace_identity(site: int, local: np.ndarray, params: ModelParams) -> float:
    """Relative residual of the trace identity for one local operator at one site."""
    _check_site(site, params)
    local = np.asarray(local, dtype=complex)
    lhs = aux_trace(local, site, params)
    rhs = embed(local, site, params)
    for j in range(1, site + 1):
        rhs = rhs @ transfer(params.theta[j - 1], params)
    for j in range(1, site):
        rhs = scipy.linalg.lu_solve(_factor(j, params), rhs)
    return _relative(lhs - rhs, lhs)


def printed_prefactor(params: ModelParams) -> complex:
    """prod_{i<j} phi(theta_i - theta_j)^{-1} * (sinh eta - sinh 5 eta)^{-N}."""
    eta, th, n = params.eta, params.theta, params.n_sites
    pref = phi_initial(eta) ** (-n)
    for i in range(n):
        for j in range(i + 1, n):
            pref /= unitarity_factor(th[i] - th[j], eta)
    return pref


def _unscaled_product(local: np.ndarray, site: int, params: ModelParams) -> np.ndarray:
    n = params.n_sites
    before = [transfer(params.theta[j], params) for j in range(site - 1)]
    after = [transfer(params.theta[j], params) for j in range(site, n)]
    middle = aux_trace(local, site, params)
    return reduce(np.matmul, before + [middle] + after)


def reconstruct_local(i: int, j: int, site: int, params: ModelParams, route: str = "product") -> np.ndarray:
    """Rebuild e^{ij} at ``site`` from monodromy blocks.

    Each unit picks out one block: e^{ij} uses T[j-1][i-1] (e^{11} from A1,
    e^{12} from C1, ..., e^{33} from A3). The closed-form list stops at seven
    units; e^{23} (C3) and e^{32} (B3) are an extension by the same identity.
    """
    _check_site(site, params)
    local = matrix_unit(i, j)
    if route == "product":
        return printed_prefactor(params) * _unscaled_product(local, site, params)
    if route != "trace":
        raise ValueError(f"unknown route {route!r}")
    out = aux_trace(local, site, params)
    for k in range(1, site):
        out = transfer(params.theta[k - 1], params) @ out
    # right-multiply by prod_{k<=site} t(theta_k)^{-1}: solve X t = out via t^T X^T = out^T
    for k in range(1, site + 1):
        t = transfer(params.theta[k - 1], params)
        cond = np.linalg.cond(t)
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise SingularTransfer(k, float(cond))
        out = scipy.linalg.lu_solve(scipy.linalg.lu_factor(t.T), out.T).T
    return out


@dataclass(frozen=True)
class ReconstructionReport:
    site: int
    pair: tuple[int, int]
    residual: float
    prefactor_used: complex
    prefactor_empirical: complex
    prefactor_printed: complex

    @property
    def prefactor_mismatch(self) -> float:
        return abs(self.prefactor_empirical - self.prefactor_printed) / abs(self.prefactor_printed)


def reconstruction_report(i: int, j: int, site: int, params: ModelParams) -> ReconstructionReport:
    """Residual of the printed-prefactor reconstruction and the least-squares prefactor."""
    target = embed(matrix_unit(i, j), site, params)
    unscaled = _unscaled_product(matrix_unit(i, j), site, params)
    empirical = np.vdot(unscaled, target) / np.vdot(unscaled, unscaled)
    printed = printed_prefactor(params)
    residual = _relative(printed * unscaled - target, target)
    return ReconstructionReport(site, (i, j), residual, printed, complex(empirical), printed)


def transfer_product_residual(params: ModelParams) -> float:
    """How far prod_j t(theta_j) * printed_prefactor is from the identity."""
    prod = reduce(np.matmul, [transfer(t, params) for t in params.theta])
    D = prod.shape[0]
    return float(np.linalg.norm(printed_prefactor(params) * prod - np.eye(D)) / np.sqrt(D))
