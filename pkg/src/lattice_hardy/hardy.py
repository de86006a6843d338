"""Hardy weights w_{sigma,alpha} = kappa_{sigma-alpha} / kappa_{-alpha} and their constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import ModelParams, ParameterError, as_point
from .operator import LatticeFunction, quadratic_form
from .riesz import CoverageError, KernelTable, QuadratureSpec, build_table, riesz
from .special import digamma, ln_gamma

__all__ = [
    "HardyParams",
    "HardyTables",
    "alpha0",
    "hardy_weight",
    "psi",
    "psi_log_derivative",
    "optimal_constant",
    "build_hardy_tables",
    "hardy_deficit",
    "weight_rows",
]


def alpha0(params: ModelParams) -> float:
    return params.alpha0


def _open_range(sigma: float, d: int, alpha: float) -> None:
    if not sigma < alpha < d / 2.0:
        raise ParameterError(
            f"alpha must lie strictly inside (sigma, d/2) = ({sigma}, {d / 2}), got {alpha!r}"
        )


@dataclass(frozen=True)
class HardyParams:
    params: ModelParams
    alpha: float

    def __post_init__(self):
        _open_range(self.params.sigma, self.params.d, self.alpha)

    @classmethod
    def of(cls, d: int, sigma: float, alpha: float) -> "HardyParams":
        return cls(ModelParams(d, sigma), alpha)

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def sigma(self) -> float:
        return self.params.sigma


def hardy_weight(hp: HardyParams, x, q: QuadratureSpec | None = None) -> float:
    pt = as_point(x, hp.d)
    return riesz(hp.sigma - hp.alpha, pt, q) / riesz(-hp.alpha, pt, q)


def psi(sigma: float, d: int, alpha: float) -> float:
    """Psi_{sigma,d}(alpha) = 4^s G(d/2 - a + s) G(a) / (G(d/2 - a) G(a - s))."""
    ModelParams(d, sigma)
    _open_range(sigma, d, alpha)
    h = d / 2.0
    log_val = (
        ln_gamma(h - alpha + sigma) + ln_gamma(alpha) - ln_gamma(h - alpha) - ln_gamma(alpha - sigma)
    )
    return 4.0**sigma * math.exp(log_val)


def psi_log_derivative(sigma: float, d: int, alpha: float) -> float:
    """d/dalpha ln Psi_{sigma,d}(alpha), a digamma combination vanishing at alpha0."""
    params = ModelParams(d, sigma)
    _open_range(sigma, d, alpha)
    two_a0 = 2.0 * params.alpha0
    return (
        -digamma(two_a0 - alpha)
        + digamma(alpha)
        + digamma(two_a0 - sigma - alpha)
        - digamma(alpha - sigma)
    )


def optimal_constant(sigma: float, d: int) -> float:
    """c_{d,sigma} = 4^sigma Gamma(d/4 + sigma/2)^2 / Gamma(d/4 - sigma/2)^2."""
    ModelParams(d, sigma)
    lo = d / 4.0 - sigma / 2.0
    if not lo > 0.0:
        raise ParameterError(f"optimal constant undefined for sigma >= d/2 (d={d}, sigma={sigma})")
    return 4.0**sigma * math.exp(2.0 * (ln_gamma(d / 4.0 + sigma / 2.0) - ln_gamma(lo)))


@dataclass(frozen=True)
class HardyTables:
    """Kernel tables behind the form and weight of one HardyParams.

    ``operator`` holds kappa_sigma with its total mass, ``numerator`` holds
    kappa_{sigma-alpha} and ``denominator`` holds kappa_{-alpha}.
    """

    hp: HardyParams
    operator: KernelTable
    numerator: KernelTable
    denominator: KernelTable

    def __post_init__(self):
        hp = self.hp
        expect = (
            (self.operator, hp.sigma),
            (self.numerator, hp.sigma - hp.alpha),
            (self.denominator, -hp.alpha),
        )
        for table, alpha in expect:
            if table.alpha != alpha or table.d != hp.d:
                raise ParameterError(
                    f"table kappa_{table.alpha} in d={table.d} does not match kappa_{alpha} in d={hp.d}"
                )
        self.operator.mass()

    @property
    def weight_radius(self) -> int:
        return min(self.numerator.radius, self.denominator.radius)

    def weights(self, points) -> np.ndarray:
        return self.numerator.lookup_many(points) / self.denominator.lookup_many(points)


def build_hardy_tables(hp: HardyParams, radius: int, q: QuadratureSpec | None = None) -> HardyTables:
    """Tables for test functions supported in the l-infinity ball of ``radius``."""
    return HardyTables(
        hp,
        build_table(hp.sigma, hp.d, 2 * radius, q),
        build_table(hp.sigma - hp.alpha, hp.d, radius, q),
        build_table(-hp.alpha, hp.d, radius, q),
    )


def hardy_deficit(
    hp: HardyParams,
    phi: LatticeFunction,
    tables: HardyTables | None = None,
    q: QuadratureSpec | None = None,
) -> float:
    """Q^sigma(phi) - sum_x w_{sigma,alpha}(x) phi(x)^2."""
    if phi.d != hp.d:
        raise ParameterError(f"phi lives in Z^{phi.d}, weight in Z^{hp.d}")
    if len(phi) == 0:
        return 0.0
    reach = int(np.abs(phi.points).max())
    if tables is None:
        tables = build_hardy_tables(hp, reach, q)
    elif tables.hp != hp:
        raise ParameterError("tables were built for different Hardy parameters")
    if reach > tables.weight_radius:
        raise CoverageError(f"support reaches {reach}, weight tables cover {tables.weight_radius}")
    form = quadratic_form(hp.sigma, phi, tables.operator)
    weighted = float(np.dot(tables.weights(phi.points), phi.values**2))
    return form - weighted


def weight_rows(hp: HardyParams, points, q: QuadratureSpec | None = None) -> list[dict]:
    """CSV-ready rows (sigma, alpha, x, value) of the weight at the given points."""
    rows = []
    for x in points:
        pt = as_point(x, hp.d)
        rows.append(
            {
                "sigma": hp.sigma,
                "alpha": hp.alpha,
                "x": " ".join(str(c) for c in pt),
                "value": hardy_weight(hp, pt, q),
            }
        )
    return rows
