"""Numerical corroboration of the positive-critical / null-critical / subcritical split.

The classification itself is analytic in alpha.  What is measured here:

* partial sums of kappa_{sigma-alpha} kappa_{-alpha}, whose convergence
  decides positive criticality;
* the growth exponent of their dyadic shell sums;
* the energy (Q - w_{alpha0}) of truncated ground states kappa_{-(alpha0 - eps)};
* the limiting ratio of two weights along a ray.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .hardy import HardyParams, psi
from .lattice import ModelParams, ParameterError, orbit_sizes
from .operator import convolve_box
from .riesz import CoverageError, KernelTable, QuadratureSpec, build_table, riesz

__all__ = [
    "Criticality",
    "Verdict",
    "InsufficientDataError",
    "AlphaScan",
    "ScanReport",
    "classify",
    "summability_partial",
    "shell_sums",
    "shell_exponent",
    "verdict_for",
    "NullEnergy",
    "null_sequence_energy",
    "null_sequence_report",
    "WeightRatio",
    "weight_ratio_at_infinity",
    "scan",
]

ALPHA0_TOL = 1e-12


class InsufficientDataError(ValueError):
    """Too few sample radii for a fit."""


class Criticality(str, enum.Enum):
    POSITIVE_CRITICAL = "positive_critical"
    NULL_CRITICAL = "null_critical"
    SUBCRITICAL = "subcritical"


class Verdict(str, enum.Enum):
    CONVERGENT = "convergent"
    LOG_DIVERGENT = "log-divergent"
    DIVERGENT = "divergent"


def classify(sigma: float, alpha: float, d: int) -> Criticality:
    hp = HardyParams.of(d, sigma, alpha)
    a0 = hp.params.alpha0
    if abs(alpha - a0) <= ALPHA0_TOL:
        return Criticality.NULL_CRITICAL
    return Criticality.POSITIVE_CRITICAL if alpha < a0 else Criticality.SUBCRITICAL


def verdict_for(exponent: float) -> Verdict:
    """Shell exponent e: sum converges for e < -1, diverges logarithmically at e = -1."""
    if exponent < -1.2:
        return Verdict.CONVERGENT
    if exponent > -0.8:
        return Verdict.DIVERGENT
    if abs(exponent + 1.0) <= 0.2:
        return Verdict.LOG_DIVERGENT
    # (-1.2, -0.8) is covered above; only NaN reaches here
    raise ValueError(f"no verdict for exponent {exponent!r}")


def _check_pair(sigma: float, alpha: float, numerator: KernelTable, denominator: KernelTable) -> int:
    if numerator.alpha != sigma - alpha or denominator.alpha != -alpha:
        raise ParameterError(
            f"need tables kappa_{sigma - alpha} and kappa_{-alpha}, "
            f"got kappa_{numerator.alpha} and kappa_{denominator.alpha}"
        )
    if numerator.d != denominator.d:
        raise ParameterError("tables live in different dimensions")
    HardyParams.of(numerator.d, sigma, alpha)
    return min(numerator.radius, denominator.radius)


def _orbit_products(numerator: KernelTable, denominator: KernelTable, radius: int):
    """(reps, weighted products) over orbit representatives with |x|_inf <= radius."""
    keep = numerator.reps[:, 0] <= radius
    reps = numerator.reps[keep]
    num = numerator.values[keep]
    den = denominator.lookup_many(reps)
    return reps, num * den * orbit_sizes(reps)


def summability_partial(
    sigma: float, alpha: float, radius: int, numerator: KernelTable, denominator: KernelTable
) -> float:
    """sum_{|x|_inf <= R} kappa_{sigma-alpha}(x) kappa_{-alpha}(x)."""
    cover = _check_pair(sigma, alpha, numerator, denominator)
    if radius > cover:
        raise CoverageError(f"partial sum radius {radius} exceeds table radius {cover}")
    _, prod = _orbit_products(numerator, denominator, radius)
    return float(prod.sum())


def shell_sums(
    sigma: float, alpha: float, radii, numerator: KernelTable, denominator: KernelTable
) -> np.ndarray:
    """Sums of kappa_{sigma-alpha} kappa_{-alpha} over the annuli r < |x| <= 2r."""
    radii = [float(r) for r in radii]
    cover = _check_pair(sigma, alpha, numerator, denominator)
    reach = int(math.floor(2.0 * max(radii)))
    if reach > cover:
        raise CoverageError(f"shells up to |x| = {reach} exceed table radius {cover}")
    reps, prod = _orbit_products(numerator, denominator, reach)
    norm = np.sqrt((reps.astype(float) ** 2).sum(axis=1))
    return np.array([prod[(norm > r) & (norm <= 2.0 * r)].sum() for r in radii])


def shell_exponent(
    sigma: float, alpha: float, radii, numerator: KernelTable, denominator: KernelTable
) -> float:
    """Log-log slope of the radial density of the shell sums.

    Each dyadic shell sum is divided by its width r before fitting, so a
    summand ~ |x|^{-p} gives the exponent d - 1 - p.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise InsufficientDataError("shell_exponent needs at least 3 radii")
    if any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] < 10:
        raise ParameterError("radii must be increasing and at least 10")
    sums = shell_sums(sigma, alpha, radii, numerator, denominator)
    r = np.array(radii)
    return float(np.polyfit(np.log(r), np.log(sums / r), 1)[0])


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------


@dataclass
class AlphaScan:
    alpha: float
    partial_sums: list
    shell_exponent: float
    verdict: str
    classification: str


@dataclass
class ScanReport:
    d: int
    sigma: float
    alpha0: float
    radii: list
    alphas: list = field(default_factory=list)
    scans: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ScanReport":
        scans = [
            AlphaScan(
                alpha=s["alpha"],
                partial_sums=[[int(r), float(v)] for r, v in s["partial_sums"]],
                shell_exponent=s["shell_exponent"],
                verdict=s["verdict"],
                classification=s["classification"],
            )
            for s in data["scans"]
        ]
        return cls(
            d=int(data["d"]),
            sigma=float(data["sigma"]),
            alpha0=float(data["alpha0"]),
            radii=list(data["radii"]),
            alphas=[float(a) for a in data["alphas"]],
            scans=scans,
        )

    @classmethod
    def from_json(cls, text: str) -> "ScanReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# d={self.d} sigma={self.sigma!r} alpha0={self.alpha0!r} radii={self.radii}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["alpha", "radius", "partial_sum"])
        for s in self.scans:
            for radius, value in s.partial_sums:
                writer.writerow([repr(s.alpha), radius, repr(value)])
        return buf.getvalue()


def scan(
    sigma: float,
    d: int,
    alphas,
    radii,
    q: QuadratureSpec | None = None,
    tables: dict | None = None,
) -> ScanReport:
    """Partial sums, shell exponent, verdict and classification for each alpha.

    ``tables`` maps kernel order to a KernelTable and is filled in place, so
    kernels shared between alphas are built once.
    """
    params = ModelParams(d, sigma)
    radii = [int(r) for r in radii]
    for a in alphas:
        HardyParams(params, a)
    reach = 2 * max(radii)
    tables = {} if tables is None else tables

    def table(order: float) -> KernelTable:
        have = tables.get(order)
        if have is None or have.radius < reach:
            tables[order] = build_table(order, d, reach, q)
        return tables[order]

    report = ScanReport(d=d, sigma=sigma, alpha0=params.alpha0, radii=radii, alphas=list(alphas))
    for a in alphas:
        num, den = table(sigma - a), table(-a)
        expo = shell_exponent(sigma, a, radii, num, den)
        partials = [[r, summability_partial(sigma, a, r, num, den)] for r in radii + [reach]]
        report.scans.append(
            AlphaScan(
                alpha=a,
                partial_sums=partials,
                shell_exponent=expo,
                verdict=verdict_for(expo).value,
                classification=classify(sigma, a, d).value,
            )
        )
    return report


# ---------------------------------------------------------------------------
# null sequence energies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullEnergy:
    """Energy of the truncated ground state kappa_{-(alpha0 - eps)} on |x|_inf <= R.

    ``boundary`` = form - own_weighted is the energy the cutoff adds relative
    to the weight w_{alpha0 - eps}, for which the untruncated energy is zero.
    """

    d: int
    sigma: float
    epsilon: float
    radius: int
    form: float
    weighted: float
    own_weighted: float

    @property
    def energy(self) -> float:
        return self.form - self.weighted

    @property
    def boundary(self) -> float:
        return self.form - self.own_weighted

    @property
    def bulk(self) -> float:
        """sum (w_{alpha0 - eps} - w_{alpha0}) phi^2, the part that survives without a cutoff."""
        return self.own_weighted - self.weighted

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(energy=self.energy, boundary=self.boundary, bulk=self.bulk)
        return out


def null_sequence_report(
    sigma: float,
    epsilon: float,
    radius: int,
    d: int,
    tables: dict | None = None,
    q: QuadratureSpec | None = None,
) -> NullEnergy:
    params = ModelParams(d, sigma)
    a0 = params.alpha0
    if not 0.0 < epsilon < a0 - sigma:
        raise ParameterError(f"epsilon must lie in (0, alpha0 - sigma) = (0, {a0 - sigma}), got {epsilon!r}")
    alpha = a0 - epsilon
    tables = {} if tables is None else tables

    def table(order: float, reach: int) -> KernelTable:
        have = tables.get(order)
        if have is None or have.radius < reach:
            tables[order] = build_table(order, d, reach, q)
        return tables[order]

    ground = table(-alpha, radius).box_array(radius)
    op = table(sigma, 2 * radius)
    mass = op.mass()
    form = float(mass * np.sum(ground * ground) - np.sum(ground * convolve_box(op, ground)))

    def weight(a: float) -> np.ndarray:
        return table(sigma - a, radius).box_array(radius) / table(-a, radius).box_array(radius)

    sq = ground * ground
    res = NullEnergy(
        d=d,
        sigma=sigma,
        epsilon=epsilon,
        radius=radius,
        form=form,
        weighted=float(np.sum(weight(a0) * sq)),
        own_weighted=float(np.sum(weight(alpha) * sq)),
    )
    if res.boundary > 0.25 * abs(res.energy):
        warnings.warn(
            f"truncation boundary energy {res.boundary:.3e} exceeds 25% of the energy "
            f"{res.energy:.3e} (eps={epsilon}, R={radius})",
            RuntimeWarning,
            stacklevel=2,
        )
    return res


def null_sequence_energy(
    sigma: float,
    epsilon: float,
    radius: int,
    d: int,
    tables: dict | None = None,
    q: QuadratureSpec | None = None,
) -> float:
    """(Q^sigma - w_{sigma,alpha0}) of kappa_{-(alpha0 - eps)} truncated to |x|_inf <= R."""
    return null_sequence_report(sigma, epsilon, radius, d, tables, q).energy


# ---------------------------------------------------------------------------
# weight ratio along a ray
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightRatio:
    estimate: float
    predicted: float
    radii: tuple
    ratios: tuple

    @property
    def relative_error(self) -> float:
        return abs(self.estimate / self.predicted - 1.0)


def weight_ratio_at_infinity(
    sigma: float, alpha: float, radii, d: int, q: QuadratureSpec | None = None
) -> WeightRatio:
    """Limit of w_{sigma,alpha}(x) / w_{sigma,alpha0}(x) along x = (r, 0, ..., 0).

    Fits ratio(r) = L + c / r^2 and returns L next to Psi(alpha) / Psi(alpha0).
    """
    params = ModelParams(d, sigma)
    HardyParams(params, alpha)
    a0 = params.alpha0
    if abs(alpha - a0) <= ALPHA0_TOL:
        raise ParameterError("alpha must differ from alpha0")
    radii = tuple(int(r) for r in radii)
    if len(radii) < 2:
        raise InsufficientDataError("weight_ratio_at_infinity needs at least 2 radii")
    ratios = []
    for r in radii:
        x = (r,) + (0,) * (d - 1)
        w = riesz(sigma - alpha, x, q) / riesz(-alpha, x, q)
        w0 = riesz(sigma - a0, x, q) / riesz(-a0, x, q)
        ratios.append(w / w0)
    design = np.column_stack([np.ones(len(radii)), np.array(radii, dtype=float) ** -2.0])
    coef, *_ = np.linalg.lstsq(design, np.array(ratios), rcond=None)
    return WeightRatio(
        estimate=float(coef[0]),
        predicted=psi(sigma, d, alpha) / psi(sigma, d, a0),
        radii=radii,
        ratios=tuple(ratios),
    )
