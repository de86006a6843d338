"""Riesz kernels kappa_alpha on Z^d, their total mass and cached tables.

For alpha in (-d/2, 1) \\ {0} the kernel is the time integral

    kappa_alpha(x) = 1/|Gamma(-alpha)| * int_0^inf p_t(x) t^{-1-alpha} dt

with p_t the lattice heat kernel.  The integral is split in three pieces:

* ``[0, t1]``   Taylor expansion of p_t(x) about t = 0, integrated exactly;
* ``[t1, t2]``  composite Gauss-Legendre panels in s = log t, where the
  integrand p_{e^s}(x) e^{-alpha s} is analytic in a strip of half-width pi/2;
* ``[t2, inf)`` the large-t asymptotic series of the scaled Bessel factors,
  integrated term by term.  t2 = max(4 |x|^2, 100) keeps the series in its
  fast-converging regime.

All points of a batch share one set of nodes, so building a table over
hundreds of thousands of orbit representatives is a handful of dense products.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .heat import heat_kernel_table_1d
from .lattice import ParameterError, as_point, as_points, orbit_representatives, orbit_sizes
from .special import abs_gamma_neg, bessel_i0_scaled_complement, gamma

__all__ = [
    "QuadratureSpec",
    "QuadratureFailure",
    "CoverageError",
    "KernelTable",
    "riesz",
    "riesz_many",
    "riesz_asymptotic_constant",
    "riesz_asymptotic",
    "build_table",
    "total_mass",
    "check_alpha",
]

TAIL_POLICIES = ("asymptotic-series",)


class QuadratureFailure(RuntimeError):
    """The requested tolerance was not reached within the refinement budget."""


class CoverageError(LookupError):
    """A kernel table was asked for a point outside its box."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and region split for the Riesz time integral.

    ``head_cutoff`` is t1, ``tail_factor`` and ``tail_min`` fix
    t2 = max(tail_factor * |x|^2, tail_min).  Panels in log t start at width
    ``panel_width`` and are halved until the estimate meets the tolerance;
    ``max_subdivisions`` caps the number of panels per unit of log t.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    head_cutoff: float = 1e-4
    tail_factor: float = 4.0
    tail_min: float = 100.0
    panel_width: float = 1.0
    panel_order: int = 16
    max_subdivisions: int = 60
    tail_policy: str = "asymptotic-series"
    tail_terms: int = 24

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ParameterError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 10:
            raise ParameterError("max_subdivisions must be at least 10")
        if not 0 < self.head_cutoff <= 1e-2:
            raise ParameterError("head_cutoff must lie in (0, 1e-2]")
        if self.tail_policy not in TAIL_POLICIES:
            raise ParameterError(f"unknown tail_policy {self.tail_policy!r}")
        if self.panel_order < 4:
            raise ParameterError("panel_order must be at least 4")

    def tail_start(self, r2max: float) -> float:
        return max(self.tail_factor * r2max, self.tail_min)


DEFAULT_QUADRATURE = QuadratureSpec()


def check_alpha(alpha: float, d: int) -> None:
    if not -d / 2.0 < alpha <= 1.0:
        raise ParameterError(
            f"alpha must lie in (-d/2, 1] = ({-d / 2}, 1] for d = {d}, got {alpha!r}"
        )


# ---------------------------------------------------------------------------
# pieces of the time integral, vectorised over canonical points m (n, d), m >= 0
# ---------------------------------------------------------------------------


def _log_factorials(n: int) -> np.ndarray:
    out = np.zeros(n + 1)
    if n:
        out[1:] = np.cumsum(np.log(np.arange(1, n + 1, dtype=float)))
    return out


def _head(alpha: float, m: np.ndarray, t1: float, damping: float) -> np.ndarray:
    # p_t(x) e^{-damping t} = t^{n0}/prod m_i! * (1 - a t + (a^2/2 + S) t^2 - (a^3/6 + a S) t^3 + ...)
    d = m.shape[1]
    n0 = m.sum(axis=1).astype(float)
    a = 2.0 * d + damping
    s = (1.0 / (m + 1.0)).sum(axis=1)
    coefs = (np.ones_like(s), np.full_like(s, -a), a * a / 2.0 + s, -(a**3) / 6.0 - a * s)
    log_c0 = -_log_factorials(int(m.max()))[m].sum(axis=1)
    log_t1 = math.log(t1)
    total = np.zeros(m.shape[0])
    for j, c in enumerate(coefs):
        e = n0 + j - alpha
        total += c * np.exp(log_c0 + e * log_t1) / e
    return total


def _gauss_panels(lo: float, hi: float, width: float, order: int):
    n_panels = max(1, int(math.ceil((hi - lo) / width - 1e-12)))
    edges = np.linspace(lo, hi, n_panels + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _middle(alpha, m, s_lo, s_hi, width, order, damping) -> np.ndarray:
    s, w = _gauss_panels(s_lo, s_hi, width, order)
    t = np.exp(s)
    w = w * np.exp(-alpha * s - damping * t)
    table = heat_kernel_table_1d(t, int(m.max()))
    n, d = m.shape
    out = np.empty(n)
    chunk = max(1, 4_000_000 // t.size)
    for start in range(0, n, chunk):
        mm = m[start : start + chunk]
        prod = table[:, mm[:, 0]]
        for i in range(1, d):
            prod = prod * table[:, mm[:, i]]
        out[start : start + chunk] = w @ prod
    return out


def _asymptotic_coefficients(mmax: int, t2: float, terms: int) -> np.ndarray:
    # e^{-2t} I_m(2t) ~ (4 pi t)^{-1/2} sum_k c_k(m) t^{-k}; row m holds c_k(m) t2^{-k}
    mv = np.arange(mmax + 1, dtype=float)
    u = np.empty((mmax + 1, terms + 1))
    u[:, 0] = 1.0
    for k in range(1, terms + 1):
        u[:, k] = u[:, k - 1] * (-(4.0 * mv * mv - (2 * k - 1) ** 2)) / (16.0 * k * t2)
    return u


def _tail(alpha: float, m: np.ndarray, t2: float, terms: int) -> tuple[np.ndarray, np.ndarray]:
    """int_{t2}^inf p_t(x) t^{-1-alpha} dt and the size of the last series term."""
    n, d = m.shape
    u = _asymptotic_coefficients(int(m.max()), t2, terms)
    b = u[m[:, 0]]
    for i in range(1, d):
        f = u[m[:, i]]
        c = np.zeros_like(b)
        for k in range(terms + 1):
            c[:, k:] += b[:, k : k + 1] * f[:, : terms + 1 - k]
        b = c
    k = np.arange(terms + 1)
    denom = k + d / 2.0 + alpha
    pref = (4.0 * math.pi) ** (-d / 2.0) * t2 ** (-(d / 2.0 + alpha))
    series = b @ (1.0 / denom)
    last = np.abs(b[:, -1] / denom[-1]) + np.abs(b[:, -2] / denom[-2])
    return pref * series, pref * last


def _integral(alpha: float, m: np.ndarray, q: QuadratureSpec, t2: float, damping: float = 0.0):
    """Unnormalised time integral for canonical points m with n0 - alpha > 0."""
    t1 = q.head_cutoff
    if damping > 0:
        t_end = max(t2, 60.0 / damping)
    else:
        t_end = t2
    head = _head(alpha, m, t1, damping)
    if damping > 0:
        tail = np.zeros(m.shape[0])
    else:
        tail, last = _tail(alpha, m, t_end, q.tail_terms)
        if np.any(last > 1e-3 * q.rel_tol * np.abs(tail) + 1e-300):
            bad = m[np.argmax(last / (np.abs(tail) + 1e-300))].tolist()
            raise QuadratureFailure(f"tail series did not converge at x = {tuple(bad)}")
    s_lo, s_hi = math.log(t1), math.log(t_end)
    width = q.panel_width
    coarse = _middle(alpha, m, s_lo, s_hi, width, q.panel_order, damping)
    fine = coarse
    while True:
        width /= 2.0
        if 1.0 / width > q.max_subdivisions:
            total = head + coarse + tail
            bad = m[np.argmax(np.abs(fine - coarse) / (np.abs(total) + q.abs_tol))].tolist()
            raise QuadratureFailure(
                f"tolerance rel={q.rel_tol:g} not met with {q.max_subdivisions} panels "
                f"per unit log t; worst point x = {tuple(bad)}"
            )
        fine = _middle(alpha, m, s_lo, s_hi, width, q.panel_order, damping)
        total = head + fine + tail
        err = np.abs(fine - coarse)
        if np.all(err <= np.maximum(q.rel_tol * np.abs(total), q.abs_tol)):
            return total
        coarse = fine


def _canonical(points: np.ndarray) -> np.ndarray:
    return -np.sort(-np.abs(points), axis=1)


def riesz_many(alpha: float, points, q: QuadratureSpec | None = None, d: int | None = None,
               damping: float = 0.0) -> np.ndarray:
    """kappa_alpha at every row of ``points`` (shape (n, d)) on one shared grid.

    ``damping`` > 0 multiplies the integrand by e^{-damping t}; the result then
    increases to kappa_alpha as damping decreases to zero.
    """
    q = q or DEFAULT_QUADRATURE
    pts = as_points(points, d)
    d = pts.shape[1]
    check_alpha(alpha, d)
    if damping < 0:
        raise ParameterError("damping must be non-negative")
    m = _canonical(pts)
    n0 = m.sum(axis=1)
    out = np.zeros(m.shape[0])
    if alpha == 0.0:
        out[n0 == 0] = 1.0
        return out
    if alpha == 1.0:
        out[(n0 == 1)] = 1.0
        return out
    live = n0 > 0 if alpha > 0 else np.ones(m.shape[0], dtype=bool)
    if np.any(live):
        ml = m[live]
        r2max = float((ml.astype(float) ** 2).sum(axis=1).max())
        out[live] = _integral(alpha, ml, q, q.tail_start(r2max), damping) / abs_gamma_neg(alpha)
    return out


def riesz(alpha: float, x, q: QuadratureSpec | None = None, damping: float = 0.0) -> float:
    """kappa_alpha(x) for alpha in (-d/2, 1]."""
    pt = as_point(x)
    return float(riesz_many(alpha, np.array([pt]), q, len(pt), damping)[0])


def riesz_asymptotic_constant(alpha: float, d: int) -> float:
    """C_{d,alpha} = 4^alpha Gamma(d/2 + alpha) / (pi^{d/2} |Gamma(-alpha)|)."""
    if alpha == 0.0 or not -d / 2.0 < alpha < 1.0:
        raise ParameterError(f"need alpha in (-d/2, 1) minus 0 for d = {d}, got {alpha!r}")
    return 4.0**alpha * gamma(d / 2.0 + alpha) / (math.pi ** (d / 2.0) * abs_gamma_neg(alpha))


def riesz_asymptotic(alpha: float, x) -> float:
    """Leading-order profile C_{d,alpha} |x|^{-d-2 alpha}."""
    pt = as_point(x)
    r2 = float(sum(c * c for c in pt))
    if r2 == 0:
        raise ParameterError("riesz_asymptotic is undefined at x = 0")
    d = len(pt)
    return riesz_asymptotic_constant(alpha, d) * r2 ** (-(d + 2.0 * alpha) / 2.0)


# ---------------------------------------------------------------------------
# total mass
# ---------------------------------------------------------------------------


def total_mass(sigma: float, d: int, q: QuadratureSpec | None = None) -> float:
    """m_sigma = sum_{y != 0} kappa_sigma(y) = 1/|Gamma(-sigma)| int (1 - p_t(0)) t^{-1-sigma} dt."""
    q = q or DEFAULT_QUADRATURE
    if sigma == 1.0:
        return 2.0 * d
    if not 0.0 < sigma < 1.0:
        raise ParameterError(f"total_mass needs sigma in (0, 1], got {sigma!r}")
    t1, t2 = q.head_cutoff, q.tail_min
    a = 2.0 * d
    coefs = (a, -(a * a / 2.0 + d), a**3 / 6.0 + a * d)
    head = sum(c * t1 ** (j + 1 - sigma) / (j + 1 - sigma) for j, c in enumerate(coefs))
    tail_p, last = _tail(sigma, np.zeros((1, d), dtype=np.int64), t2, q.tail_terms)
    tail = t2 ** (-sigma) / sigma - float(tail_p[0])

    def middle(width):
        s, w = _gauss_panels(math.log(t1), math.log(t2), width, q.panel_order)
        t = np.exp(s)
        _, comp = bessel_i0_scaled_complement(2.0 * t)
        one_minus_p = -np.expm1(d * np.log1p(-comp))
        return float(np.dot(w * np.exp(-sigma * s), one_minus_p))

    width = q.panel_width
    coarse = middle(width)
    while True:
        width /= 2.0
        if 1.0 / width > q.max_subdivisions:
            raise QuadratureFailure(f"total_mass(sigma={sigma}, d={d}) did not converge")
        fine = middle(width)
        total = head + fine + tail
        if abs(fine - coarse) <= max(q.rel_tol * abs(total), q.abs_tol):
            return total / abs_gamma_neg(sigma)
        coarse = fine


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KernelTable:
    """kappa_alpha on the box |x|_inf <= radius, stored per hyperoctahedral orbit.

    ``reps`` holds the canonical representatives (coordinates sorted by absolute
    value, descending) and ``values`` the kernel there.  Lookups go through a
    dense array over the non-negative orthant.
    """

    alpha: float
    d: int
    radius: int
    reps: np.ndarray
    values: np.ndarray
    total_mass: float | None = None
    _orthant: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        reps = np.asarray(self.reps, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        if reps.shape != (values.size, self.d):
            raise ParameterError("reps and values do not match")
        orth = np.full((self.radius + 1,) * self.d, np.nan)
        for perm in itertools.permutations(range(self.d)):
            orth[tuple(reps[:, list(perm)].T)] = values
        if np.isnan(orth).any():
            raise ParameterError("table does not cover every orbit in its box")
        object.__setattr__(self, "reps", reps)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_orthant", orth)

    def lookup(self, x) -> float:
        pt = as_point(x, self.d)
        if max(abs(c) for c in pt) > self.radius:
            raise CoverageError(f"point {pt} lies outside the table box of radius {self.radius}")
        return float(self._orthant[tuple(abs(c) for c in pt)])

    __call__ = lookup

    def lookup_many(self, points) -> np.ndarray:
        pts = np.abs(as_points(points, self.d))
        if pts.size and pts.max() > self.radius:
            raise CoverageError(
                f"some points lie outside the table box of radius {self.radius}"
            )
        return self._orthant[tuple(pts.T)]

    def box_array(self, radius: int | None = None) -> np.ndarray:
        """Dense kernel values on [-radius, radius]^d (default: the full table)."""
        r = self.radius if radius is None else radius
        if r > self.radius:
            raise CoverageError(f"requested radius {r} exceeds table radius {self.radius}")
        idx = np.abs(np.arange(-r, r + 1))
        return self._orthant[np.ix_(*([idx] * self.d))]

    def box_sum(self, radius: int | None = None) -> float:
        """Sum of the kernel over all lattice points with |y|_inf <= radius."""
        r = self.radius if radius is None else radius
        if r > self.radius:
            raise CoverageError(f"requested radius {r} exceeds table radius {self.radius}")
        keep = self.reps[:, 0] <= r
        return float(np.dot(orbit_sizes(self.reps[keep]), self.values[keep]))

    def mass(self) -> float:
        if self.total_mass is None:
            raise ParameterError(f"table for alpha={self.alpha} carries no total mass")
        return self.total_mass

    def to_json(self) -> str:
        payload = {
            "alpha": self.alpha,
            "d": self.d,
            "radius": self.radius,
            "entries": [[r.tolist(), float(v)] for r, v in zip(self.reps, self.values)],
        }
        if self.total_mass is not None:
            payload["mass"] = self.total_mass
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "KernelTable":
        data = json.loads(text)
        entries = data["entries"]
        reps = np.array([e[0] for e in entries], dtype=np.int64).reshape(-1, data["d"])
        values = np.array([e[1] for e in entries], dtype=float)
        return cls(
            alpha=float(data["alpha"]),
            d=int(data["d"]),
            radius=int(data["radius"]),
            reps=reps,
            values=values,
            total_mass=data.get("mass"),
        )


def build_table(alpha: float, d: int, radius: int, q: QuadratureSpec | None = None) -> KernelTable:
    """Tabulate kappa_alpha on every orbit representative with |x|_inf <= radius.

    Tables for alpha in (0, 1] also carry the total mass.
    """
    if radius < 1:
        raise ParameterError("table radius must be at least 1")
    check_alpha(alpha, d)
    q = q or DEFAULT_QUADRATURE
    reps = orbit_representatives(d, radius)
    values = riesz_many(alpha, reps, q, d)
    mass = total_mass(alpha, d, q) if 0.0 < alpha <= 1.0 else None
    return KernelTable(alpha=float(alpha), d=d, radius=radius, reps=reps, values=values, total_mass=mass)
