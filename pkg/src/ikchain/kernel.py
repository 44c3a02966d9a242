"""Scalar functions of the model, the 9x9 R-matrix and its defining identities.

Everything here is a pure function of complex scalars. The ten entry functions
a .. g_bar and their ratios are evaluated with ``cmath`` for speed, since the
basis and Bethe formulas call them many thousands of times.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateParams, NearSingular

IPI = complex(0.0, math.pi)

# Relative size below which a denominator counts as zero.
SINGULAR_THRESHOLD = 1e-10
# Relative size below which a parameter combination counts as degenerate.
DEGENERACY_THRESHOLD = 1e-8

ELEMENT_NAMES = ("a", "b", "c", "d", "e", "e_bar", "f", "f_bar", "g", "g_bar")

# Nonzero R-matrix entries: ((row i, row j), (col i, col j)) in 1-based labels
# of |i> (x) |j>, together with the element function sitting there.
R_LAYOUT = (
    ((1, 1), (1, 1), "c"), ((1, 2), (1, 2), "b"), ((1, 3), (1, 3), "d"),
    ((2, 1), (2, 1), "b"), ((2, 2), (2, 2), "a"), ((2, 3), (2, 3), "b"),
    ((3, 1), (3, 1), "d"), ((3, 2), (3, 2), "b"), ((3, 3), (3, 3), "c"),
    ((1, 2), (2, 1), "e"), ((1, 3), (2, 2), "g"), ((1, 3), (3, 1), "f"),
    ((2, 1), (1, 2), "e_bar"), ((2, 2), (1, 3), "g_bar"), ((2, 2), (3, 1), "g"),
    ((2, 3), (3, 2), "e"), ((3, 1), (1, 3), "f_bar"), ((3, 1), (2, 2), "g_bar"),
    ((3, 2), (2, 3), "e_bar"),
)


def _pair_index(i: int, j: int) -> int:
    return 3 * (i - 1) + (j - 1)


def _swap_matrix() -> np.ndarray:
    P = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            P[3 * i + j, 3 * j + i] = 1.0
    return P


SWAP = _swap_matrix()
SWAP.flags.writeable = False


class Level(Enum):
    PLAIN = 0
    ONE = 1
    TWO = 2


def shift_one(u: complex, eta: complex) -> complex:
    return u + 4 * eta


def shift_two(u: complex, eta: complex) -> complex:
    return u + 6 * eta + IPI


@dataclass(frozen=True)
class ShiftedPoint:
    """A spectral point ``base`` lifted to one of the two special shifts."""

    base: complex
    level: Level = Level.PLAIN

    def value(self, eta: complex) -> complex:
        if self.level is Level.ONE:
            return shift_one(self.base, eta)
        if self.level is Level.TWO:
            return shift_two(self.base, eta)
        return complex(self.base)


def _pair_shifts(eta: complex) -> list[complex]:
    levels = [0j, 4 * eta, 6 * eta + IPI]
    shifts = {a - b for a in levels for b in levels}
    shifts |= {2 * eta, -2 * eta}
    return sorted(shifts, key=lambda s: (s.real, s.imag))


def phi_initial(eta: complex) -> complex:
    """The scalar in R(0) = phi * P."""
    return cmath.sinh(eta) - cmath.sinh(5 * eta)


def unitarity_factor(u: complex, eta: complex) -> complex:
    """Scalar with R12(u) R21(-u) = unitarity_factor(u) * id."""
    sh = cmath.sinh
    return (sh(eta) + sh(u - 5 * eta)) * (sh(eta) - sh(u + 5 * eta))


@dataclass(frozen=True)
class ModelParams:
    """Crossing parameter, inhomogeneities and run settings of one chain.

    ``generic=True`` (the default) rejects parameter sets where any b, c or d
    factor built from theta differences and the basis shifts vanishes. The
    homogeneous chain needed for the Hamiltonian fails that test by design, so
    it is built with ``ModelParams.homogeneous`` which only checks eta.
    """

    eta: complex
    n_sites: int
    theta: tuple[complex, ...] = ()
    tolerance: float = 1e-9
    seed: int = 0
    generic: bool = field(default=True, compare=True)

    def __post_init__(self):
        theta = tuple(complex(t) for t in self.theta) if self.theta else (0j,) * self.n_sites
        object.__setattr__(self, "eta", complex(self.eta))
        object.__setattr__(self, "theta", theta)
        if not isinstance(self.n_sites, (int, np.integer)) or self.n_sites < 1:
            raise DegenerateParams(f"n_sites must be a positive integer, got {self.n_sites!r}")
        if len(theta) != self.n_sites:
            raise DegenerateParams(f"theta has {len(theta)} entries but n_sites={self.n_sites}")
        if not self.tolerance > 0:
            raise DegenerateParams("tolerance must be positive")
        if self.seed < 0:
            raise DegenerateParams("seed must be an unsigned integer")
        self._check_eta()
        if self.generic:
            self._check_pairs()

    @classmethod
    def homogeneous(cls, eta: complex, n_sites: int, **kw) -> "ModelParams":
        return cls(eta=eta, n_sites=n_sites, theta=(0j,) * n_sites, generic=False, **kw)

    def _scale(self) -> float:
        return max(1.0, abs(cmath.sinh(5 * self.eta)))

    def _check_eta(self) -> None:
        eta = self.eta
        checks = {
            "sinh(eta)": cmath.sinh(eta),
            "sinh(2 eta)": cmath.sinh(2 * eta),
            "cosh(eta)": cmath.cosh(eta),
            "sinh(eta) - sinh(5 eta)": phi_initial(eta),
            "f(0)": element_tuple(0j, eta)[6],
        }
        limit = DEGENERACY_THRESHOLD * self._scale()
        for name, value in checks.items():
            if abs(value) <= limit:
                raise DegenerateParams(f"{name} vanishes for eta={eta!r}; choose a generic crossing parameter")

    def _check_pairs(self) -> None:
        limit = DEGENERACY_THRESHOLD * self._scale()
        shifts = _pair_shifts(self.eta)
        for j, tj in enumerate(self.theta, 1):
            for l, tl in enumerate(self.theta, 1):
                if j == l:
                    continue
                for s in shifts:
                    x = tj - tl + s
                    el = element_tuple(x, self.eta)
                    for name, k in (("b", 1), ("c", 2), ("d", 3)):
                        if abs(el[k]) <= limit:
                            raise DegenerateParams(
                                f"{name}(theta_{j} - theta_{l} + {s:.6g}) vanishes; "
                                "move the inhomogeneities apart"
                            )

    def theta_one(self, site: int) -> complex:
        return shift_one(self.theta[site - 1], self.eta)

    def theta_two(self, site: int) -> complex:
        return shift_two(self.theta[site - 1], self.eta)

    def with_theta(self, theta: Sequence[complex]) -> "ModelParams":
        return ModelParams(self.eta, len(theta), tuple(theta), self.tolerance, self.seed)


def require_generic(params: ModelParams) -> None:
    if not params.generic:
        raise DegenerateParams("this operation needs generic (pairwise distinct) inhomogeneities")


def sample_box(rng: np.random.Generator, size: int | None = None):
    """Uniform draws from the square [-1, 1] + [-1, 1]i."""
    if size is None:
        re, im = rng.uniform(-1.0, 1.0, 2)
        return complex(re, im)
    return rng.uniform(-1.0, 1.0, size) + 1j * rng.uniform(-1.0, 1.0, size)


def random_params(rng: np.random.Generator, n_sites: int, eta: complex | None = None,
                  max_tries: int = 1000, **kw) -> ModelParams:
    """Draw eta (unless given) and theta from the unit box, rejecting degenerate draws."""
    for _ in range(max_tries):
        e = sample_box(rng) if eta is None else eta
        theta = tuple(sample_box(rng, n_sites))
        try:
            return ModelParams(e, n_sites, theta, **kw)
        except DegenerateParams:
            continue
    raise DegenerateParams("could not draw a non-degenerate parameter set")


# ---------------------------------------------------------------- elements

@lru_cache(maxsize=1 << 16)
def element_tuple(u: complex, eta: complex) -> tuple[complex, ...]:
    """The ten entry functions (a, b, c, d, e, e_bar, f, f_bar, g, g_bar) at u."""
    sh, ch, ex = cmath.sinh, cmath.cosh, cmath.exp
    s1, s2, s3, s4, s5 = sh(eta), sh(2 * eta), sh(3 * eta), sh(4 * eta), sh(5 * eta)
    a = sh(u - 3 * eta) - s5 + s3 + s1
    b = sh(u - 3 * eta) + s3
    c = sh(u - 5 * eta) + s1
    d = sh(u - eta) + s1
    half = ch(u / 2 - 3 * eta)
    e = -2 * ex(-u / 2) * s2 * half
    e_bar = -2 * ex(u / 2) * s2 * half
    f = -2 * ex(-u + 2 * eta) * s1 * s2 - ex(-eta) * s4
    f_bar = 2 * ex(u - 2 * eta) * s1 * s2 - ex(eta) * s4
    g = 2 * ex(-u / 2 + 2 * eta) * sh(u / 2) * s2
    g_bar = -2 * ex(u / 2 - 2 * eta) * sh(u / 2) * s2
    return (a, b, c, d, e, e_bar, f, f_bar, g, g_bar)


def element_derivative_tuple(u: complex, eta: complex) -> tuple[complex, ...]:
    """Closed-form d/du of the ten entry functions."""
    ch, ex = cmath.cosh, cmath.exp
    s1, s2 = cmath.sinh(eta), cmath.sinh(2 * eta)
    da = ch(u - 3 * eta)
    db = ch(u - 3 * eta)
    dc = ch(u - 5 * eta)
    dd = ch(u - eta)
    # e = -sinh2eta (e^{-3eta} + e^{-u+3eta}), e_bar = -sinh2eta (e^{u-3eta} + e^{3eta})
    de = s2 * ex(-u + 3 * eta)
    de_bar = -s2 * ex(u - 3 * eta)
    df = 2 * ex(-u + 2 * eta) * s1 * s2
    df_bar = 2 * ex(u - 2 * eta) * s1 * s2
    # g = e^{2eta} sinh2eta (1 - e^{-u}), g_bar = -e^{-2eta} sinh2eta (e^{u} - 1)
    dg = ex(2 * eta - u) * s2
    dg_bar = -ex(u - 2 * eta) * s2
    return (da, db, dc, dd, de, de_bar, df, df_bar, dg, dg_bar)


@dataclass(frozen=True)
class ElementValues:
    a: complex
    b: complex
    c: complex
    d: complex
    e: complex
    e_bar: complex
    f: complex
    f_bar: complex
    g: complex
    g_bar: complex

    def as_dict(self) -> dict[str, complex]:
        return {k: getattr(self, k) for k in ELEMENT_NAMES}


def eval_elements(u: complex, params: ModelParams) -> ElementValues:
    return ElementValues(*element_tuple(complex(u), params.eta))


def eval_elements_derivative(u: complex, params: ModelParams) -> ElementValues:
    return ElementValues(*element_derivative_tuple(complex(u), params.eta))


class PointValues:
    """Entry functions at one argument plus the guarded ratios omega, y, y_bar, z.

    Ratios are computed on access so that a vanishing denominator only raises
    when that ratio is actually needed.
    """

    __slots__ = ("u", "a", "b", "c", "d", "e", "e_bar", "f", "f_bar", "g", "g_bar", "_scale")

    def __init__(self, u: complex, eta: complex):
        self.u = u
        (self.a, self.b, self.c, self.d, self.e, self.e_bar,
         self.f, self.f_bar, self.g, self.g_bar) = element_tuple(u, eta)
        self._scale = max(1.0, abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def _div(self, num: complex, den: complex, name: str) -> complex:
        if abs(den) < SINGULAR_THRESHOLD * self._scale:
            raise NearSingular(name, self.u)
        return num / den

    @property
    def omega(self) -> complex:
        return self._div(self.c * self.d, self.a * self.d - self.g * self.g_bar, "a*d - g*g_bar")

    w = omega

    @property
    def y(self) -> complex:
        return self._div(self.d, self.g_bar, "g_bar")

    @property
    def y_bar(self) -> complex:
        return self._div(self.d, self.g, "g")

    @property
    def z(self) -> complex:
        return self._div(self.c, self.b, "b")

    def ratio(self, num: str, den: str) -> complex:
        return self._div(getattr(self, num), getattr(self, den), den)


@lru_cache(maxsize=1 << 16)
def point_values(u: complex, eta: complex) -> PointValues:
    return PointValues(complex(u), complex(eta))


# ---------------------------------------------------------------- alphas

_ALPHA_INDEX = {1: 2, 2: 1, 3: 3}  # alpha1 <- c, alpha2 <- b, alpha3 <- d


def alpha(u: complex, params: ModelParams, which: int, skip: int | None = None) -> complex:
    """Vacuum eigenvalue product alpha_which(u); ``skip`` omits one site (1-based)."""
    k = _ALPHA_INDEX[which]
    out = 1.0 + 0j
    for site, t in enumerate(params.theta, 1):
        if site != skip:
            out *= element_tuple(complex(u) - t, params.eta)[k]
    return out


def alpha_log_derivative(u: complex, params: ModelParams, which: int) -> complex:
    """d/du log alpha_which(u)."""
    k = _ALPHA_INDEX[which]
    total = 0j
    for t in params.theta:
        x = complex(u) - t
        total += element_derivative_tuple(x, params.eta)[k] / element_tuple(x, params.eta)[k]
    return total


@dataclass(frozen=True)
class AlphaValues:
    alpha1: complex
    alpha2: complex
    alpha3: complex
    alpha1_skip: tuple[complex, ...]


def eval_alpha(u: complex, params: ModelParams) -> AlphaValues:
    return AlphaValues(
        alpha(u, params, 1),
        alpha(u, params, 2),
        alpha(u, params, 3),
        tuple(alpha(u, params, 1, skip=i) for i in range(1, params.n_sites + 1)),
    )


def xi_bar(u: complex, params: ModelParams) -> complex:
    """e^{-eta} alpha3(u + 6 eta + i pi) / alpha2(u + 4 eta)."""
    eta = params.eta
    den = alpha(shift_one(u, eta), params, 2)
    num = alpha(shift_two(u, eta), params, 3)
    if abs(den) < SINGULAR_THRESHOLD * max(1.0, abs(num)):
        raise NearSingular("alpha2(u + 4 eta)", complex(u))
    return cmath.exp(-eta) * num / den


def xi(u: complex, params: ModelParams) -> complex:
    return cmath.exp(2 * params.eta) * xi_bar(u, params)


@dataclass(frozen=True)
class AuxValues:
    omega: complex
    y: complex
    y_bar: complex
    z: complex
    xi: complex
    xi_bar: complex


def eval_aux(u: complex, params: ModelParams) -> AuxValues:
    pv = PointValues(complex(u), params.eta)
    xb = xi_bar(u, params)
    return AuxValues(pv.omega, pv.y, pv.y_bar, pv.z, cmath.exp(2 * params.eta) * xb, xb)


def omega_log_derivative(u: complex, eta: complex) -> complex:
    """d/du log omega(u) from the closed-form element derivatives."""
    a, _, c, d, _, _, _, _, g, gb = element_tuple(u, eta)
    da, _, dc, dd, _, _, _, _, dg, dgb = element_derivative_tuple(u, eta)
    den = a * d - g * gb
    dden = da * d + a * dd - dg * gb - g * dgb
    return dc / c + dd / d - dden / den


def z_log_derivative(u: complex, eta: complex) -> complex:
    _, b, c = element_tuple(u, eta)[:3]
    _, db, dc = element_derivative_tuple(u, eta)[:3]
    return dc / c - db / b


# ---------------------------------------------------------------- R-matrix

def _layout(values: Sequence[complex]) -> np.ndarray:
    lookup = dict(zip(ELEMENT_NAMES, values))
    R = np.zeros((9, 9), dtype=complex)
    for (i1, j1), (i2, j2), name in R_LAYOUT:
        R[_pair_index(i1, j1), _pair_index(i2, j2)] = lookup[name]
    return R


def r_matrix(u: complex, eta: complex) -> np.ndarray:
    return _layout(element_tuple(complex(u), complex(eta)))


def build_r(u: complex, params: ModelParams) -> np.ndarray:
    """The 9x9 R-matrix on V (x) V, basis |i>|j> in lexicographic order."""
    return r_matrix(u, params.eta)


def build_r_derivative(u: complex, params: ModelParams) -> np.ndarray:
    return _layout(element_derivative_tuple(complex(u), params.eta))


RBuilder = Callable[[complex, ModelParams], np.ndarray]


def _relative(diff: np.ndarray, ref: np.ndarray) -> float:
    scale = np.linalg.norm(ref)
    return float(np.linalg.norm(diff) / scale) if scale else float(np.linalg.norm(diff))


def check_qybe(u1: complex, u2: complex, u3: complex, params: ModelParams,
               r: RBuilder = build_r) -> float:
    """Relative Frobenius residual of the Yang-Baxter equation on V (x) V (x) V."""
    eye = np.eye(3)
    P23 = np.kron(eye, SWAP)
    R12 = np.kron(r(u1 - u2, params), eye)
    R23 = np.kron(eye, r(u2 - u3, params))
    R13 = P23 @ np.kron(r(u1 - u3, params), eye) @ P23
    lhs = R12 @ R13 @ R23
    rhs = R23 @ R13 @ R12
    return _relative(lhs - rhs, lhs)


def check_unitarity(u: complex, params: ModelParams, r: RBuilder = build_r) -> float:
    """Relative residual of R12(u) R21(-u) - unitarity_factor(u) id, with R21 = P R12 P."""
    lhs = r(u, params) @ SWAP @ r(-u, params) @ SWAP
    return _relative(lhs - unitarity_factor(u, params.eta) * np.eye(9), lhs)


def check_initial(params: ModelParams) -> float:
    """Largest entry of R(0) - phi P, scaled by |phi|."""
    phi = phi_initial(params.eta)
    return float(np.abs(build_r(0.0, params) - phi * SWAP).max() / abs(phi))
