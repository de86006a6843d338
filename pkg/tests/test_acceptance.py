"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py`` (a summary block lists one
PASS/FAIL line per criterion) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time
import warnings

import numpy as np
import pytest

from lattice_hardy.criticality import classify, null_sequence_report, scan
from lattice_hardy.hardy import HardyParams, build_hardy_tables, hardy_deficit, hardy_weight, optimal_constant, psi
from lattice_hardy.heat import heat_kernel_1d, heat_kernel_table_1d
from lattice_hardy.lattice import ModelParams
from lattice_hardy.operator import LatticeFunction, apply_frac_laplacian, ground_state_residual, quadratic_form
from lattice_hardy.riesz import build_table, riesz_asymptotic_constant, riesz_many

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


def _box(d: int, r: int) -> np.ndarray:
    axis = np.arange(-r, r + 1)
    return np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def criterion_1():
    worst = max(abs(optimal_constant(1.0, d) / ((d - 2) ** 2 / 4) - 1) for d in range(3, 9))
    return worst <= 1e-12, f"max rel err {worst:.2e} over d=3..8 (tol 1e-12)"


PSI_GRID = [
    (1, 0.1), (1, 0.2), (1, 0.3), (1, 0.45),
    (2, 0.2), (2, 0.45), (2, 0.7), (2, 0.95),
    (3, 0.25), (3, 0.5), (3, 0.75), (3, 1.0),
    (4, 0.3), (4, 0.6), (4, 0.9), (4, 1.0),
    (6, 0.15), (6, 0.5), (6, 0.85), (6, 1.0),
]


def criterion_2():
    worst = 0.0
    for d, s in PSI_GRID:
        a0 = ModelParams(d, s).alpha0
        worst = max(worst, abs(psi(s, d, a0) / optimal_constant(s, d) - 1))
    return worst <= 1e-12, f"max rel err {worst:.2e} on {len(PSI_GRID)} (sigma, d) points (tol 1e-12)"


def criterion_3():
    rs = np.arange(20, 201, 10)
    parts, ok = [], True
    for d, a in [(1, -0.25), (2, -0.5), (3, 0.5), (3, -1.0)]:
        pts = np.zeros((rs.size, d), dtype=np.int64)
        pts[:, 0] = rs
        dev = np.abs(riesz_many(a, pts) * rs ** (d + 2 * a) / riesz_asymptotic_constant(a, d) - 1)
        slope = _slope(rs, dev)
        at100 = float(dev[rs == 100][0])
        ok &= -2.3 <= slope <= -1.7 and at100 < 0.01
        parts.append(f"(d={d},a={a}) slope {slope:.3f} dev@100 {at100:.1e}")
    return ok, "; ".join(parts)


def criterion_4():
    hp = HardyParams.of(1, 0.25, ModelParams(1, 0.25).alpha0)
    c = optimal_constant(0.25, 1)
    rs = np.arange(20, 201, 10)
    dev = np.array([abs(hardy_weight(hp, (int(r),)) * r**0.5 - c) / c for r in rs])
    slope = _slope(rs, dev)
    at100 = float(dev[rs == 100][0])
    ok = at100 <= 0.02 and -2.3 <= slope <= -1.7
    return ok, f"rel dev@100 {at100:.2e} (tol 2e-2), slope {slope:.3f} (want -2 +/- 0.3)"


def criterion_5():
    sigma, alpha, R = 0.25, 0.4, 400
    st = build_table(sigma, 1, R + 10)
    gt = build_table(-alpha, 1, R)
    worst = 0.0
    with warnings.catch_warnings():
        # the far-field correction is large by design at this radius
        warnings.simplefilter("ignore", RuntimeWarning)
        for x in range(-10, 11):
            res = ground_state_residual(sigma, alpha, (x,), R, sigma_table=st, ground_table=gt)
            worst = max(worst, abs(res.residual) / res.target)
    return worst <= 1e-5, f"max |res| / kappa_(sigma-alpha)(x) = {worst:.2e} over |x| <= 10 (tol 1e-5)"


HARDY_CONFIGS = [(1, 0.25, 0.3), (1, 0.25, 0.375), (2, 0.5, 0.9), (3, 0.5, 1.0), (3, 1.0, 1.1)]


def criterion_6():
    parts, ok = [], True
    for k, (d, s, a) in enumerate(HARDY_CONFIGS):
        hp = HardyParams.of(d, s, a)
        r = 6 if d <= 2 else 3
        tables = build_hardy_tables(hp, r)
        pts = _box(d, r)
        rng = np.random.default_rng(1000 + k)
        worst = np.inf
        for _ in range(100):
            phi = LatticeFunction(pts, rng.uniform(-1.0, 1.0, len(pts)))
            q = quadratic_form(s, phi, tables.operator)
            deficit = hardy_deficit(hp, phi, tables)
            worst = min(worst, deficit / q)
        ok &= worst >= -1e-8
        parts.append(f"({d},{s},{a}) min deficit/Q {worst:.3f}")
    return ok, "; ".join(parts)


def criterion_7():
    alphas = [0.75, 1.0, 1.25]
    report = scan(0.5, 3, alphas, [10, 20, 40, 80])
    want_e = {0.75: -2.0, 1.0: -1.0, 1.25: 0.0}
    want_c = {0.75: "positive_critical", 1.0: "null_critical", 1.25: "subcritical"}
    ok, parts = True, []
    for s in report.scans:
        cls = classify(0.5, s.alpha, 3).value
        ok &= abs(s.shell_exponent - want_e[s.alpha]) <= 0.2 and cls == want_c[s.alpha]
        parts.append(f"a={s.alpha}: exponent {s.shell_exponent:+.3f}, {cls}")
    return ok, "; ".join(parts)


def criterion_8():
    tables: dict = {}
    energies, boundary = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for eps in (0.1, 0.05, 0.025):
            res = null_sequence_report(0.5, eps, 60, 3, tables)
            energies.append(res.energy)
            boundary.append(res.boundary)
    ok = all(e >= 0 for e in energies) and all(b < a for a, b in zip(energies, energies[1:]))
    detail = ", ".join(f"{e:.4f}" for e in energies)
    share = ", ".join(f"{b / e:.0%}" for b, e in zip(boundary, energies))
    return ok, f"energies at eps=0.1,0.05,0.025: {detail} (boundary share {share})"


def criterion_9():
    p = heat_kernel_table_1d(5.0, 60)[0]
    mass = (p[0] + 2 * p[1:].sum()) ** 2
    K, worst = 80, 0.0
    for t in (0.5, 1.0, 2.5, 5.0):
        for s in (0.5, 2.0, 5.0):
            pt = heat_kernel_table_1d(t, 2 * K + 10)[0]
            ps = heat_kernel_table_1d(s, 2 * K + 10)[0]
            k = np.arange(-K, K + 1)
            for m in range(-10, 11):
                conv = float(np.sum(pt[np.abs(k)] * ps[np.abs(m - k)]))
                worst = max(worst, abs(conv - heat_kernel_1d(t + s, m)))
    ok = mass >= 1 - 1e-10 and worst <= 1e-9
    return ok, f"1 - sum p_5 = {1 - mass:.1e} (tol 1e-10); semigroup max err {worst:.1e} (tol 1e-9)"


def criterion_10():
    worst = 0.0
    for d, sigma in ((1, 0.25), (2, 0.5)):
        tab = build_table(sigma, d, 12)
        pts = _box(d, 6)
        rng = np.random.default_rng(77 + d)
        for _ in range(50):
            phi = LatticeFunction(pts, rng.uniform(-1.0, 1.0, len(pts)))
            form = quadratic_form(sigma, phi, tab)
            pairing = float(np.dot(phi.values, apply_frac_laplacian(sigma, phi, phi.points, tab)))
            worst = max(worst, abs(form - pairing) / abs(pairing))
    return worst <= 1e-9, f"max rel gap {worst:.1e} over 50 phi each in d=1,2 (tol 1e-9)"


CRITERIA = [
    (1, "optimal constant, classical case", criterion_1),
    (2, "psi at alpha0 equals optimal constant", criterion_2),
    (3, "Riesz kernel asymptotics", criterion_3),
    (4, "weight asymptotics d=1", criterion_4),
    (5, "ground-state identity", criterion_5),
    (6, "Hardy inequality on random phi", criterion_6),
    (7, "trichotomy corroboration d=3", criterion_7),
    (8, "null-sequence energy trend", criterion_8),
    (9, "heat-kernel normalisation and semigroup", criterion_9),
    (10, "form/operator equivalence", criterion_10),
]


def _evaluate(num, name, fn):
    start = time.perf_counter()
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} {name}: {detail} ({time.perf_counter() - start:.1f}s)"
    return ok, line


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, name, fn):
    ok, line = _evaluate(num, name, fn)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def main() -> int:
    failures = 0
    for num, name, fn in CRITERIA:
        ok, line = _evaluate(num, name, fn)
        print(line, flush=True)
        failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
