"""One test per acceptance criterion, each at its stated tolerance.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary and echoed to stdout as they run.
"""
import math

import pytest

from pspectral import models, suites

from conftest import ACCEPTANCE_LINES


def record(number, result):
    line = f"criterion {number:2d}: {result.line()}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return result


def test_01_ptrig_identity():
    res = record(1, suites.ptrig_identity(samples=10_000, tol=1e-10, budget=5.0))
    assert res.passed, res.detail


def test_02_pi_p_closed_form():
    res = record(2, suites.pi_p_closed_form(tol=1e-10, tol_pi=1e-12))
    assert res.passed, res.detail


def test_03_flat_limit():
    res = record(3, suites.flat_limit(tol=1e-3, budget=10.0))
    assert res.passed, res.detail


def test_04_linear_oracle():
    res = record(4, suites.linear_oracle(tol=1e-4, N=4000, budget=30.0))
    assert res.passed, res.detail


def test_05_cross_formulation():
    res = record(5, suites.cross_formulation(tol=1e-7))
    assert res.passed, res.detail


def test_06_monotonicity():
    # as stated: nonincreasing in d, nondecreasing in k and in n
    res = record(6, suites.monotonicity(tol=1e-10, points=21, n_direction=1.0))
    ns, lams = res.data["n"]
    drops = [l0 - l1 for l0, l1 in zip(lams, lams[1:])]
    ACCEPTANCE_LINES.append(
        f"    info: over n in [{ns[0]:g}, {ns[-1]:g}] lambda_bar falls from {lams[0]:.6g} to "
        f"{lams[-1]:.6g}; {sum(x > 0 for x in drops)}/{len(drops)} steps decrease, so the "
        f"nonincreasing-in-n variant {'holds' if min(drops) >= -1e-10 * lams[0] else 'fails'}")
    assert res.passed, res.detail


def test_07_jensen_diameter():
    res = record(7, suites.jensen_diameter(cases=10))
    assert res.passed, res.detail


def test_08_alpha_bar_p2():
    res = record(8, suites.alpha_bar_p2(tol=1e-10))
    assert res.passed, res.detail


def test_09_m_landscape():
    res = record(9, suites.m_landscape(tol=1e-3))
    assert res.passed, res.detail


def test_10_round_trip():
    res = record(10, suites.round_trip(cases=10, tol=1e-6))
    assert res.passed, res.detail


def test_11_gradient_comparison():
    res = record(11, suites.gradient_comparison(pairs=20, tol=1e-8))
    assert res.passed, res.detail


def test_12_sharpness():
    res = record(12, suites.sharpness(tol=0.01))
    assert res.passed, res.detail
    seq = [models.sharpness_diameter_bound(i, 2.0, -1.0) for i in (1, 10, 100, 1000)]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert seq[-1] == pytest.approx(2.0, rel=1e-4)
    assert math.isclose(seq[1], math.hypot(2.0, math.pi * math.cosh(1.0) / 10), rel_tol=1e-12)
