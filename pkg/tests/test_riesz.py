import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lattice_hardy.lattice import ParameterError, orbit_representatives, orbit_sizes, signed_permutations
from lattice_hardy.riesz import (
    CoverageError,
    KernelTable,
    QuadratureFailure,
    QuadratureSpec,
    build_table,
    riesz,
    riesz_asymptotic,
    riesz_asymptotic_constant,
    riesz_many,
    total_mass,
)

# kappa_alpha(x) and m_sigma: 30-digit mpmath quadrature of the Bessel-product integral, frozen
MPMATH_KERNELS = [
    (-0.5, (0, 0), 0.64288224829445774),
    (-0.5, (3, 1), 0.050257251454517467),
    (0.5, (1, 0), 0.28018591145634878),
    (0.5, (2, 2), 0.0065357443515716166),
    (0.25, (5, 3), 0.0010037348451765803),
    (-1.0, (0, 0, 0), 0.252731009858663),
    (-1.0, (2, 1, 0), 0.035931603473490088),
    (0.5, (1, 1, 1), 0.0077331714239610587),
    (-0.75, (4, 0, 0), 0.0082287851764324592),
]
MPMATH_MASS = [
    (0.5, 2, 1.9161827973657002),
    (0.9, 2, 3.43614340510049071),
    (0.5, 3, 2.3876022428595904),
    (0.25, 3, 1.53328158751241181),
]


def kappa_1d_closed(alpha, m):
    """Closed form of the one-dimensional kernel through Gamma ratios."""
    m = abs(m)
    log_val = (
        alpha * math.log(4)
        + math.lgamma(0.5 + alpha)
        + math.lgamma(m - alpha)
        - 0.5 * math.log(math.pi)
        - math.lgamma(m + 1 + alpha)
    )
    return math.exp(log_val) / abs(math.gamma(-alpha))


@pytest.mark.parametrize("alpha,x,expected", MPMATH_KERNELS)
def test_kernel_matches_mpmath(alpha, x, expected):
    assert riesz(alpha, x) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("alpha", [-0.45, -0.25, -0.1, 0.1, 0.25, 0.5, 0.75, 0.95])
def test_kernel_1d_closed_form(alpha):
    ms = np.arange(0 if alpha < 0 else 1, 300, 7)
    got = riesz_many(alpha, ms[:, None])
    want = np.array([kappa_1d_closed(alpha, m) for m in ms])
    np.testing.assert_allclose(got, want, rtol=1e-10)


def test_indicator_orders():
    assert riesz(1, (1, 0)) == 1.0
    assert riesz(1, (1, 1)) == 0.0
    assert riesz(1, (0, 0)) == 0.0
    assert riesz(0, (0, 0, 0)) == 1.0
    assert riesz(0, (2,)) == 0.0
    assert riesz(0.3, (0,)) == 0.0


@pytest.mark.parametrize("alpha,d", [(-0.5, 1), (-1.0, 2), (1.2, 3), (-1.5, 3)])
def test_alpha_out_of_range(alpha, d):
    with pytest.raises(ParameterError):
        riesz(alpha, (1,) * d)


def test_quadrature_failure_names_the_point():
    q = QuadratureSpec(rel_tol=1e-300, abs_tol=1e-300, max_subdivisions=10)
    with pytest.raises(QuadratureFailure, match=r"\(3, 2\)"):
        riesz(0.5, (3, 2), q)


def test_quadrature_failure_when_panels_never_settle(monkeypatch):
    import importlib

    mod = importlib.import_module("lattice_hardy.riesz")
    monkeypatch.setattr(mod, "_middle", lambda alpha, m, lo, hi, width, *rest: np.full(m.shape[0], width))
    with pytest.raises(QuadratureFailure, match=r"worst point x = \(4, 1\)"):
        riesz(0.5, (1, 4))


def test_quadrature_spec_validation():
    with pytest.raises(ParameterError):
        QuadratureSpec(rel_tol=0)
    with pytest.raises(ParameterError):
        QuadratureSpec(max_subdivisions=5)
    with pytest.raises(ParameterError):
        QuadratureSpec(tail_policy="power-law-bound")


def test_asymptotic_constants():
    assert riesz_asymptotic_constant(-0.25, 1) == pytest.approx(4**-0.25 / math.sqrt(math.pi), rel=1e-14)
    assert riesz_asymptotic_constant(0.5, 1) == pytest.approx(1 / math.pi, rel=1e-14)
    # Green's function of the lattice Laplacian in d=3: 1 / (4 pi |x|)
    assert riesz_asymptotic_constant(-1.0, 3) == pytest.approx(1 / (4 * math.pi), rel=1e-14)
    with pytest.raises(ParameterError):
        riesz_asymptotic_constant(0.0, 2)


@given(st.floats(-1.45, 0.99).filter(lambda a: abs(a) > 1e-6), st.integers(1, 3))
def test_asymptotic_constant_positive(alpha, d):
    if alpha > -d / 2:
        assert riesz_asymptotic_constant(alpha, d) > 0


def test_asymptotic_profile_scaling():
    a = riesz_asymptotic(0.25, (3, 4))
    b = riesz_asymptotic(0.25, (6, 8))
    assert b / a == pytest.approx(2 ** -(2 + 0.5), rel=1e-14)
    with pytest.raises(ParameterError):
        riesz_asymptotic(0.25, (0, 0))


@pytest.mark.parametrize("d,alpha", [(1, -0.25), (1, 0.25), (2, -0.5), (2, 0.5), (3, -0.1), (3, 0.25)])
def test_asymptotic_error_order(d, alpha):
    rs = np.arange(20, 201, 20)
    pts = np.zeros((rs.size, d), dtype=int)
    pts[:, 0] = rs
    vals = riesz_many(alpha, pts)
    dev = np.abs(vals * rs ** (d + 2 * alpha) / riesz_asymptotic_constant(alpha, d) - 1)
    slope = np.polyfit(np.log(rs), np.log(dev), 1)[0]
    assert -2.3 <= slope <= -1.7


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=3), st.sampled_from([-0.4, 0.3, 0.8]))
def test_positive_and_symmetric(x, alpha):
    if not any(x) and alpha > 0:
        return
    v = riesz(alpha, x)
    assert v > 0
    for y in list(signed_permutations(x))[::5]:
        assert riesz(alpha, y) == pytest.approx(v, rel=1e-12)


def test_damping_increases_to_kernel():
    for alpha, x in [(-0.5, (2, 1)), (0.5, (1, 0)), (-0.25, (4,))]:
        target = riesz(alpha, x)
        vals = [riesz(alpha, x, damping=e) for e in (1.0, 0.1, 0.01)]
        assert vals[0] < vals[1] < vals[2] < target


def test_mass_1d_closed_form():
    for s in (0.1, 0.25, 0.4):
        expected = math.gamma(2 * s + 1) / math.gamma(s + 1) ** 2
        assert total_mass(s, 1) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("sigma,d,expected", MPMATH_MASS)
def test_mass_matches_mpmath(sigma, d, expected):
    assert total_mass(sigma, d) == pytest.approx(expected, rel=1e-10)


def test_mass_of_nearest_neighbour_kernel():
    assert total_mass(1.0, 3) == 6.0


def test_mass_continuous_on_grid():
    sig = np.linspace(0.1, 0.9, 17)
    m = np.array([total_mass(s, 3) for s in sig])
    assert np.all(np.diff(m) > 0)
    assert np.max(np.abs(np.diff(m, 2))) < 0.1


def test_table_mass_bounds_box_sums():
    tab = build_table(0.5, 2, 40)
    sums = [tab.box_sum(r) for r in (5, 10, 20, 40)]
    assert all(b > a for a, b in zip(sums, sums[1:]))
    assert sums[-1] < tab.mass()
    # the omitted tail behaves like R^{-2 sigma}
    gap = [tab.mass() - s for s in sums[1:]]
    ratios = [gap[i] / gap[i + 1] for i in range(2)]
    assert ratios == pytest.approx([2.0, 2.0], rel=0.1)


def test_table_lookup_matches_direct_evaluation():
    tab = build_table(-0.25, 2, 12)
    rng = np.random.default_rng(3)
    for x in rng.integers(-12, 13, size=(20, 2)):
        assert tab(x) == pytest.approx(riesz(-0.25, x), rel=1e-13)
    assert tab((-3, 5)) == tab((5, 3))


def test_table_positive_1d():
    tab = build_table(-0.25, 1, 50)
    assert np.all(tab.values > 0)
    assert tab.total_mass is None


def test_table_zero_at_origin_for_positive_order():
    tab = build_table(0.5, 3, 4)
    assert tab((0, 0, 0)) == 0.0
    assert np.all(tab.values >= 0)


def test_table_coverage():
    tab = build_table(0.5, 2, 5)
    with pytest.raises(CoverageError):
        tab((6, 0))
    with pytest.raises(CoverageError):
        tab.lookup_many([[1, 1], [0, 9]])
    with pytest.raises(ParameterError):
        tab_no_mass = build_table(-0.5, 2, 3)
        tab_no_mass.mass()


def test_table_json_round_trip():
    tab = build_table(0.25, 2, 6)
    back = KernelTable.from_json(tab.to_json())
    assert back.alpha == tab.alpha and back.radius == tab.radius and back.d == tab.d
    assert back.total_mass == tab.total_mass
    np.testing.assert_array_equal(back.box_array(), tab.box_array())


def test_orbit_bookkeeping():
    for d, r in [(1, 7), (2, 5), (3, 4)]:
        reps = orbit_representatives(d, r)
        assert orbit_sizes(reps).sum() == (2 * r + 1) ** d
