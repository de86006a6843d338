"""The fractional Laplacian Delta^sigma as a weighted graph Laplacian on Z^d.

Delta^sigma f(x) = sum_y kappa_sigma(x - y) (f(x) - f(y)).  For finitely
supported f the sum over y outside the support collapses onto the total mass
m_sigma, so operator values and the quadratic form are exact up to the kernel
tolerance, with no truncation.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .lattice import ModelParams, ParameterError, as_point, as_points
from .riesz import (
    CoverageError,
    KernelTable,
    QuadratureSpec,
    build_table,
    riesz,
    riesz_asymptotic_constant,
    riesz_many,
)

__all__ = [
    "LatticeFunction",
    "apply_frac_laplacian",
    "quadratic_form",
    "green_kernel",
    "green_apply",
    "GroundStateResidual",
    "ground_state_residual",
    "far_field_sum",
]


@dataclass(frozen=True, eq=False)
class LatticeFunction:
    """A finitely supported real function on Z^d."""

    points: np.ndarray
    values: np.ndarray
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        pts = as_points(self.points)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if pts.shape[0] != vals.size:
            raise ParameterError("points and values differ in length")
        index = {tuple(p): i for i, p in enumerate(pts.tolist())}
        if len(index) != pts.shape[0]:
            raise ParameterError("support points must be distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_mapping(cls, mapping: dict, d: int | None = None) -> "LatticeFunction":
        keys = list(mapping)
        if keys and d is None:
            d = len(as_point(keys[0]))
        pts = [as_point(k, d) for k in keys]
        if not pts:
            if d is None:
                raise ParameterError("an empty function needs an explicit dimension")
            return cls(np.zeros((0, d), dtype=np.int64), np.zeros(0))
        return cls(np.array(pts, dtype=np.int64), np.array(list(mapping.values()), dtype=float))

    @classmethod
    def from_box(cls, array: np.ndarray, radius: int) -> "LatticeFunction":
        """Function whose values on [-radius, radius]^d are given by a dense array."""
        arr = np.asarray(array, dtype=float)
        d = arr.ndim
        if arr.shape != (2 * radius + 1,) * d:
            raise ParameterError("box array shape does not match the radius")
        grids = np.meshgrid(*([np.arange(-radius, radius + 1)] * d), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        return cls(pts, arr.ravel())

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.values.size

    def __call__(self, x) -> float:
        i = self._index.get(as_point(x, self.d))
        return 0.0 if i is None else float(self.values[i])

    def scaled(self, c: float) -> "LatticeFunction":
        return LatticeFunction(self.points, c * self.values)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "d": self.d,
                "entries": [[p, float(v)] for p, v in zip(self.points.tolist(), self.values)],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LatticeFunction":
        data = json.loads(text)
        d = int(data["d"])
        pts = np.array([e[0] for e in data["entries"]], dtype=np.int64).reshape(-1, d)
        vals = np.array([e[1] for e in data["entries"]], dtype=float)
        return cls(pts, vals)


def _check_sigma_table(sigma: float, table: KernelTable) -> float:
    if table.alpha != sigma:
        raise ParameterError(f"table holds kappa_{table.alpha}, expected kappa_{sigma}")
    return table.mass()


def _pair_kernel(table: KernelTable, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    diff = xs[:, None, :] - ys[None, :, :]
    if diff.size and np.abs(diff).max() > table.radius:
        raise CoverageError(
            f"differences up to {np.abs(diff).max()} exceed table radius {table.radius}"
        )
    return table.lookup_many(diff.reshape(-1, xs.shape[1])).reshape(xs.shape[0], ys.shape[0])


def apply_frac_laplacian(sigma: float, f: LatticeFunction, x, table: KernelTable):
    """Delta^sigma f at ``x`` (a point, or an (n, d) array of points).

    Uses Delta^sigma f(x) = f(x) m_sigma - sum_{y in supp f} kappa_sigma(x - y) f(y).
    """
    mass = _check_sigma_table(sigma, table)
    single = np.asarray(x).ndim <= 1
    xs = as_points(np.atleast_2d(x) if single else x, f.d)
    fx = np.array([f(p) for p in xs.tolist()])
    if len(f) == 0:
        out = np.zeros(xs.shape[0])
    else:
        k = _pair_kernel(table, xs, f.points)
        out = fx * mass - k @ f.values
    return float(out[0]) if single else out


def _next_fast_len(n: int) -> int:
    best = 1 << (n - 1).bit_length()
    p5 = 1
    while p5 < best:
        p35 = p5
        while p35 < best:
            m = p35
            while m < n:
                m *= 2
            best = min(best, m)
            p35 *= 3
        p5 *= 5
    return best


def _box_embedding(phi: LatticeFunction):
    lo, hi = phi.bounding_box()
    shape = tuple(int(s) for s in hi - lo + 1)
    arr = np.zeros(shape)
    arr[tuple((phi.points - lo).T)] = phi.values
    return arr


def convolve_box(kernel_table: KernelTable, arr: np.ndarray) -> np.ndarray:
    """(kappa * arr) restricted to the box of ``arr`` (values outside are zero)."""
    shape = arr.shape
    reach = max(shape) - 1
    if reach > kernel_table.radius:
        raise CoverageError(
            f"support spans {reach} lattice steps, table radius is {kernel_table.radius}"
        )
    kern = kernel_table.box_array(reach)
    # each axis only needs offsets up to its own extent
    kern = kern[tuple(slice(reach - (s - 1), reach + s) for s in shape)]
    # circular length 2s - 1 keeps wrap-around out of the extracted window
    sizes = [_next_fast_len(2 * s - 1) for s in shape]
    axes = list(range(arr.ndim))
    fk = np.fft.rfftn(kern, sizes, axes)
    fa = np.fft.rfftn(arr, sizes, axes)
    full = np.fft.irfftn(fk * fa, sizes, axes)
    return full[tuple(slice(s - 1, 2 * s - 1) for s in shape)]


def quadratic_form(sigma: float, phi: LatticeFunction, table: KernelTable, method: str = "auto") -> float:
    """Q^sigma(phi) = 1/2 sum_{x,y} kappa_sigma(x-y) (phi(x) - phi(y))^2, exactly.

    ``method="pairs"`` assembles the double sum over the support plus the
    mass term for pairs leaving it; ``method="fft"`` evaluates
    m_sigma sum phi^2 - <phi, kappa * phi> with a zero-padded FFT convolution
    (for large boxes).
    """
    mass = _check_sigma_table(sigma, table)
    if len(phi) == 0:
        return 0.0
    if method == "auto":
        method = "pairs" if len(phi) <= 4096 else "fft"
    if method == "pairs":
        k = _pair_kernel(table, phi.points, phi.points)
        v = phi.values
        diff2 = (v[:, None] - v[None, :]) ** 2
        inner = 0.5 * float(np.sum(k * diff2))
        outer = float(np.dot(v * v, mass - k.sum(axis=1)))
        return inner + outer
    if method == "fft":
        arr = _box_embedding(phi)
        conv = convolve_box(table, arr)
        return float(mass * np.sum(arr * arr) - np.sum(arr * conv))
    raise ParameterError(f"unknown method {method!r}")


def green_kernel(sigma: float, x, y, q: QuadratureSpec | None = None) -> float:
    """G^sigma(x, y) = kappa_{-sigma}(x - y)."""
    px, py = as_point(x), as_point(y)
    if len(px) != len(py):
        raise ParameterError("points live in different dimensions")
    ModelParams(len(px), sigma)
    return riesz(-sigma, tuple(a - b for a, b in zip(px, py)), q)


def green_apply(sigma: float, k: LatticeFunction, x, q: QuadratureSpec | None = None) -> float:
    """G^sigma k(x) = sum_{y in supp k} kappa_{-sigma}(x - y) k(y)."""
    ModelParams(k.d, sigma)
    if len(k) == 0:
        return 0.0
    px = np.array(as_point(x, k.d))
    vals = riesz_many(-sigma, px[None, :] - k.points, q, k.d)
    return float(np.dot(vals, k.values))


# ---------------------------------------------------------------------------
# far-field sums with asymptotic kernels
# ---------------------------------------------------------------------------


def _box_complement_integral(d: int, p: float) -> float:
    """int_{|u|_inf > 1} |u|^{-p} du for p > d."""
    if d == 1:
        return 2.0 / (p - 1.0)
    nodes, weights = np.polynomial.legendre.leggauss(48)
    grids = np.meshgrid(*([nodes] * (d - 1)), indexing="ij")
    wgrid = np.ones_like(grids[0])
    for w in np.meshgrid(*([weights] * (d - 1)), indexing="ij"):
        wgrid = wgrid * w
    r2 = sum(g * g for g in grids)
    face = float(np.sum(wgrid * (1.0 + r2) ** (-p / 2.0)))
    return 2.0 * d * face / (p - d)


def far_field_sum(x, a: float, b: float, radius: int, budget: int = 4_000_000) -> float:
    """sum_{|y|_inf > radius} |x - y|^{-a} |y|^{-b}, for a + b > d.

    Lattice points out to an outer radius fixed by ``budget`` are summed
    explicitly; the remainder is the continuum integral over the box
    complement with the |x - y| ~ |y| approximation (relative error
    O(|x|^2 / R_out^2)).
    """
    px = np.array(as_point(x), dtype=float)
    d = px.size
    p = a + b
    if not p > d:
        raise ParameterError("far-field sum diverges: need a + b > d")
    r_out = max(radius + 1, int((budget ** (1.0 / d)) / 2.0))
    total = 0.0
    if d == 1:
        y = np.arange(radius + 1, r_out + 1, dtype=float)
        for sgn in (1.0, -1.0):
            total += float(np.sum(np.abs(px[0] - sgn * y) ** (-a) * y ** (-b)))
    else:
        rng = np.arange(-r_out, r_out + 1)
        rest = np.meshgrid(*([rng] * (d - 1)), indexing="ij")
        rest = np.stack([g.ravel() for g in rest], axis=1).astype(float)
        rest_inf = np.abs(rest).max(axis=1)
        for y0 in rng:
            inf = np.maximum(abs(y0), rest_inf)
            keep = inf > radius
            if not np.any(keep):
                continue
            y = np.concatenate([np.full((int(keep.sum()), 1), float(y0)), rest[keep]], axis=1)
            dist2 = ((y - px) ** 2).sum(axis=1)
            norm2 = (y * y).sum(axis=1)
            total += float(np.sum(dist2 ** (-a / 2.0) * norm2 ** (-b / 2.0)))
    total += (r_out + 0.5) ** (d - p) * _box_complement_integral(d, p)
    return total


@dataclass(frozen=True)
class GroundStateResidual:
    x: tuple
    residual: float
    main_sum: float
    tail_correction: float
    target: float

    @property
    def relative(self) -> float:
        return abs(self.residual) / abs(self.target) if self.target else float("inf")


def ground_state_residual(
    sigma: float,
    alpha: float,
    x,
    truncation: int,
    q: QuadratureSpec | None = None,
    sigma_table: KernelTable | None = None,
    ground_table: KernelTable | None = None,
) -> GroundStateResidual:
    """Numerical residual of Delta^sigma kappa_{-alpha} = kappa_{sigma - alpha} at x.

    The operator is summed over |y|_inf <= truncation with exact kernel
    values.  Beyond the box, the kappa_{-alpha}(x) part is exact through the
    total mass and the kappa_{-alpha}(y) part uses the leading asymptotics of
    both kernels.
    """
    pt = as_point(x)
    d = len(pt)
    ModelParams(d, sigma)
    if not sigma <= alpha < d / 2.0:
        raise ParameterError(f"alpha must lie in [sigma, d/2) = [{sigma}, {d / 2}), got {alpha!r}")
    xinf = max(abs(c) for c in pt)
    if truncation < 4 * (xinf + 1):
        raise ParameterError("truncation radius must be at least 4 (|x|_inf + 1)")
    need = truncation + xinf
    if sigma_table is None:
        sigma_table = build_table(sigma, d, need, q)
    if ground_table is None:
        ground_table = build_table(-alpha, d, truncation, q)
    mass = _check_sigma_table(sigma, sigma_table)

    ys_axis = np.arange(-truncation, truncation + 1)
    grid = np.meshgrid(*([ys_axis] * d), indexing="ij")
    ys = np.stack([g.ravel() for g in grid], axis=1)
    k_sigma = sigma_table.lookup_many(np.array(pt)[None, :] - ys)
    g_y = ground_table.lookup_many(ys)
    g_x = ground_table.lookup(pt)
    main = float(np.dot(k_sigma, g_x - g_y))

    if sigma == 1.0:
        tail = 0.0
    else:
        near_mass = float(k_sigma.sum())
        tail = g_x * (mass - near_mass)
        c = riesz_asymptotic_constant(sigma, d) * riesz_asymptotic_constant(-alpha, d)
        tail -= c * far_field_sum(pt, d + 2.0 * sigma, d - 2.0 * alpha, truncation)
    target = riesz(sigma - alpha, pt, q) if alpha != sigma else float(all(c == 0 for c in pt))
    if abs(tail) > 0.1 * abs(main):
        warnings.warn(
            f"tail correction {tail:.3e} exceeds 10% of the truncated sum {main:.3e} at x={pt}",
            RuntimeWarning,
            stacklevel=2,
        )
    return GroundStateResidual(pt, main + tail - target, main, tail, target)
